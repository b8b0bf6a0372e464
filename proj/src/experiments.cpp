#include "tandem_curb/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <iomanip>
#include <locale>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace tandem_curb {

std::vector<double> Axis::values() const {
    std::vector<double> v(static_cast<std::size_t>(std::max(n, 0)));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    if (n >= 2) v.back() = hi;
    return v;
}

Axis parse_axis(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) throw std::invalid_argument("axis must look like name=lo:hi:n or name=lo:hi/step");
    Axis a;
    a.name = text.substr(0, eq);
    std::string rest = text.substr(eq + 1);
    const auto c1 = rest.find(':');
    if (c1 == std::string::npos) throw std::invalid_argument("axis range missing ':' in " + text);
    a.lo = std::stod(rest.substr(0, c1));
    rest = rest.substr(c1 + 1);
    if (auto slash = rest.find('/'); slash != std::string::npos) {
        a.hi = std::stod(rest.substr(0, slash));
        const double step = std::stod(rest.substr(slash + 1));
        if (!(step > 0)) throw std::invalid_argument("axis step must be positive");
        const double k = (a.hi - a.lo) / step;
        if (std::abs(k - std::round(k)) > 1e-9 * std::max(1.0, k)) throw std::invalid_argument("axis step does not divide the range");
        a.n = static_cast<int>(std::round(k)) + 1;
    } else {
        const auto c2 = rest.find(':');
        if (c2 == std::string::npos) throw std::invalid_argument("axis needs lo:hi:n or lo:hi/step");
        a.hi = std::stod(rest.substr(0, c2));
        a.n = std::stoi(rest.substr(c2 + 1));
    }
    if (a.n < 2) throw std::invalid_argument("axis " + a.name + " needs at least 2 points");
    if (!(a.hi > a.lo)) throw std::invalid_argument("axis " + a.name + " needs lo < hi");
    return a;
}

void set_parameter(ModelParams& p, const std::string& name, double value) {
    static const std::vector<std::pair<std::string, double ModelParams::*>> fields = {
        {"alpha", &ModelParams::alpha},          {"beta", &ModelParams::beta},
        {"pi", &ModelParams::pi},                {"demand", &ModelParams::demand},
        {"s_highway", &ModelParams::s_highway},  {"s_curb_rv", &ModelParams::s_curb_rv},
        {"s_curb_pv", &ModelParams::s_curb_pv},  {"delta_rv", &ModelParams::delta_rv},
        {"delta_pv", &ModelParams::delta_pv},    {"pv_fixed_cost", &ModelParams::pv_fixed_cost},
        {"base_fee", &ModelParams::base_fee},
    };
    if (name == "cost_gap") {
        p.pv_fixed_cost = p.c_r + value;
        return;
    }
    if (name == "c_r") {
        const double gap = p.cost_gap();
        p.c_r = value;
        p.c_r_overridden = true;
        p.pv_fixed_cost = value + gap;  // sweeping c^R keeps u^P − c^R fixed
        return;
    }
    if (name == "gamma") {
        p.gamma = value;
        return;
    }
    for (const auto& [key, member] : fields)
        if (key == name) {
            p.*member = value;
            return;
        }
    throw std::invalid_argument("unknown sweep parameter: " + name);
}

std::string Table::to_csv() const {
    std::ostringstream os;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
        os << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return os.str();
}

int Table::column(const std::string& name) const {
    auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
}

namespace {

std::string num(double v) {
    if (!std::isfinite(v)) return "";
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::setprecision(10) << v;
    return os.str();
}

// CSV-safe free text: commas and quotes would break the row.
std::string clean(std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '"', '\'');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

struct Point {
    std::vector<double> x;
};

std::vector<Point> grid(const SweepSpec& spec) {
    std::vector<Point> pts{{}};
    for (const auto& a : spec.axes) {
        std::vector<Point> next;
        for (const auto& pt : pts)
            for (double v : a.values()) {
                Point q = pt;
                q.x.push_back(v);
                next.push_back(std::move(q));
            }
        pts = std::move(next);
    }
    return pts;
}

void check_spec(const SweepSpec& spec, std::size_t axes) {
    if (spec.axes.size() != axes)
        throw std::invalid_argument("sweep needs exactly " + std::to_string(axes) + " axis/axes");
    for (const auto& a : spec.axes) {
        if (a.n < 2) throw std::invalid_argument("axis " + a.name + " needs at least 2 points");
        if (!(a.hi > a.lo)) throw std::invalid_argument("axis " + a.name + " needs lo < hi");
        ModelParams probe = spec.base;
        set_parameter(probe, a.name, a.lo);  // rejects unknown names before any work
    }
}

// Evaluates every grid point on a pool of threads; rows land in grid order.
Table run(const SweepSpec& spec, std::vector<std::string> cols,
          const std::function<std::vector<std::string>(const ModelParams&)>& eval) {
    Table t;
    for (const auto& a : spec.axes) t.header.push_back(a.name);
    for (auto& c : cols) t.header.push_back(std::move(c));
    const std::vector<Point> pts = grid(spec);
    t.rows.resize(pts.size());
    const std::size_t width = t.header.size() - spec.axes.size();

    auto one = [&](std::size_t i) {
        std::vector<std::string> row;
        for (double v : pts[i].x) row.push_back(num(v));
        std::vector<std::string> rest;
        try {
            ModelParams p = spec.base;
            for (std::size_t k = 0; k < spec.axes.size(); ++k) set_parameter(p, spec.axes[k].name, pts[i].x[k]);
            rest = eval(revalidate(p, spec.late));
        } catch (const ValidationError& e) {
            rest.assign(width, "");
            rest[width - 2] = "invalid";
            rest[width - 1] = clean(e.what());
        }
        row.insert(row.end(), rest.begin(), rest.end());
        t.rows[i] = std::move(row);
    };

    unsigned n = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
    n = static_cast<unsigned>(std::min<std::size_t>(n, pts.size()));
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < n; ++w)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < pts.size();) one(i);
        });
    for (auto& th : pool) th.join();
    return t;
}

struct Evaluated {
    ScenarioId scenario = ScenarioId::Unsupported;
    std::optional<MetricsReport> e, o;
    std::string status = "ok", message;
};

Evaluated evaluate(const ModelParams& p, const SweepSpec& spec) {
    Evaluated r;
    try {
        if (spec.late) {
            const LateSolution s = solve_late(p);
            r.scenario = s.scenario;
            r.e = metrics(s, p);
        } else {
            const EquilibriumSolution s = solve(p, spec.spillover);
            r.scenario = s.scenario;
            r.e = metrics(s, p);
        }
    } catch (const RegimeError& e) {
        if (!spec.late) r.scenario = classify(p, spec.spillover);
        r.status = "regime";
        r.message = clean(e.what());
        return r;
    }
    try {
        const PricingScheme s = spec.late ? optimal_pricing_late(p) : optimal_pricing(p);
        r.o = with_comparison(metrics(s, p), *r.e);
    } catch (const RegimeError& e) {
        r.status = "no_pricing";
        r.message = clean(e.what());
    }
    return r;
}

std::vector<std::string> metric_cells(const Evaluated& r, bool tqt) {
    std::vector<std::string> c{to_string(r.scenario)};
    auto put = [&](const std::optional<MetricsReport>& m, bool priced) {
        c.push_back(m ? num(m->sc) : "");
        c.push_back(m ? num(m->cost()) : "");
        c.push_back(m ? num(m->n_rv) : "");
        if (priced) {
            c.push_back(m && m->sc_reduction ? num(*m->sc_reduction) : "");
            c.push_back(m && m->delta_c ? num(*m->delta_c) : "");
        }
    };
    put(r.e, false);
    put(r.o, true);
    if (tqt) {
        c.push_back(r.e ? num(r.e->tqt_h) : "");
        c.push_back(r.e ? num(r.e->tqt_cr) : "");
        c.push_back(r.e ? num(r.e->tqt_cp) : "");
    }
    c.push_back(r.status);
    c.push_back(r.message);
    return c;
}

std::vector<std::string> metric_columns(bool tqt) {
    std::vector<std::string> c{"scenario", "SC_e", "C_e", "NR_e", "SC_o", "C_o", "NR_o", "dSC_rel", "dC"};
    if (tqt) c.insert(c.end(), {"TQT_H", "TQT_CR", "TQT_CP"});
    c.insert(c.end(), {"status", "message"});
    return c;
}

}  // namespace

Table sweep_scenario_map(const SweepSpec& spec) {
    check_spec(spec, 2);
    return run(spec, {"scenario", "status", "message"}, [&](const ModelParams& p) -> std::vector<std::string> {
        return {to_string(classify(p, spec.spillover)), "ok", ""};
    });
}

Table sweep_metrics(const SweepSpec& spec) {
    check_spec(spec, 2);
    return run(spec, metric_columns(false), [&](const ModelParams& p) { return metric_cells(evaluate(p, spec), false); });
}

Table sweep_scalar(const SweepSpec& spec) {
    check_spec(spec, 1);
    return run(spec, metric_columns(true), [&](const ModelParams& p) { return metric_cells(evaluate(p, spec), true); });
}

namespace {

CaseLine clock_line(const std::string& label, double rel_hours, const std::string& target, const ModelParams& p) {
    CaseLine l;
    l.label = label;
    l.value = format_clock(rel_hours, p.preferred_arrival);
    l.target = target;
    l.deviation = (rel_hours - (parse_clock(target) - p.preferred_arrival)) * 60.0;
    l.minutes = true;
    return l;
}

CaseLine value_line(const std::string& label, double v, double target, int precision = 2) {
    std::ostringstream a, b;
    a << std::fixed << std::setprecision(precision) << v;
    b << std::fixed << std::setprecision(precision) << target;
    return {label, a.str(), b.str(), target != 0 ? (v - target) / target : v};
}

}  // namespace

CaseReport run_case_hk(const ModelParams& p) {
    CaseReport r;
    const EquilibriumSolution e = solve(p, Spillover::Bidirectional);
    r.scenario = e.scenario;
    r.no_toll = metrics(e, p);
    auto& b = r.before;
    b.push_back(clock_line("RV first departure", e.t0_rv, "6:35", p));
    b.push_back(clock_line("RV last departure", e.t1_rv, "7:58", p));
    b.push_back(clock_line("PV first departure", e.t0_pv, "7:29", p));
    b.push_back(clock_line("PV last departure", e.t1_pv, "7:44", p));
    // The highway queue starts with the first PV and ends when its exit curve rejoins time.
    double onset = e.t0_pv, end = e.t0_pv;
    const auto& ts = e.curves.q_H.times();
    const auto& qs = e.curves.q_H.values();
    bool seen = false;
    for (std::size_t i = 0; i < ts.size(); ++i)
        if (qs[i] > 1e-9) {
            if (!seen) onset = i > 0 ? ts[i - 1] : ts[i];
            seen = true;
            end = i + 1 < ts.size() ? ts[i + 1] : ts[i];
        }
    b.push_back(clock_line("highway queue onset", onset, "7:29", p));
    b.push_back(clock_line("highway queue dissipation", end, "8:15", p));
    b.push_back(value_line("N^R", r.no_toll.n_rv, 4027, 0));
    b.push_back(value_line("C", r.no_toll.cost(), 351.27));
    b.push_back(value_line("SC", r.no_toll.sc, 2515133.79));

    const PricingScheme s = optimal_pricing(p);
    r.priced = with_comparison(metrics(s, p), r.no_toll);
    auto& a = r.after;
    a.push_back(clock_line("RV first departure", s.so_t0_rv, "6:41", p));
    a.push_back(clock_line("RV last departure", s.so_t1_rv, "9:00", p));
    a.push_back(clock_line("PV first departure", s.so_t0_pv, "7:35", p));
    a.push_back(clock_line("PV last departure", s.so_t1_pv, "9:00", p));
    a.push_back(value_line("N^R", r.priced.n_rv, 4173, 0));
    a.push_back(value_line("C", r.priced.cost(), 342.12));
    a.push_back(value_line("SC", r.priced.sc, 1752941.70));
    a.push_back(value_line("RV fee max", s.fee_max_rv(), 231.67));
    a.push_back(value_line("PV fee max", s.fee_max_pv(), 141.67));
    a.push_back(value_line("SC reduction", *r.priced.sc_reduction, 0.30, 4));
    return r;
}

CaseReport run_case_hk() { return run_case_hk(hong_kong()); }

std::string CaseReport::to_text() const {
    std::ostringstream os;
    auto block = [&](const char* title, const std::vector<CaseLine>& lines) {
        os << title << '\n';
        os << "  " << std::left << std::setw(28) << "quantity" << std::right << std::setw(14) << "model" << std::setw(14)
           << "target" << std::setw(14) << "deviation" << '\n';
        for (const auto& l : lines) {
            std::ostringstream d;
            if (l.minutes)
                d << std::showpos << std::fixed << std::setprecision(1) << l.deviation << " min";
            else
                d << std::showpos << std::fixed << std::setprecision(2) << 100.0 * l.deviation << " %";
            os << "  " << std::left << std::setw(28) << l.label << std::right << std::setw(14) << l.value
               << std::setw(14) << l.target << std::setw(14) << d.str() << '\n';
        }
    };
    os << "scenario " << to_string(scenario) << '\n';
    block("no toll", before);
    block("optimal pricing", after);
    return os.str();
}

}  // namespace tandem_curb

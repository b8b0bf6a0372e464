// Command-line front end: tandem-curb {validate|classify|solve|simulate|price|verify|sweep|case-hk}.
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tandem_curb/experiments.hpp"
#include "tandem_curb/metrics.hpp"

using namespace tandem_curb;

namespace {

constexpr int kOk = 0, kValidation = 1, kRegime = 2, kVerifyFailed = 3;

struct Options {
    std::string config;
    std::string preset = "hk";
    std::string spillover = "bi";
    bool late = false;
    double dt = kDefaultDt;
    double tol = 1e-6;
    std::string out;
    bool priced = false;
    std::string kind = "map";
    std::vector<std::string> axes, sets;
    unsigned threads = 0;
};

ModelParams load(const Options& o) {
    RawConfig raw;
    if (!o.config.empty())
        raw = load_config_file(o.config);
    else if (o.preset == "hk")
        raw = hong_kong_raw();
    else if (o.preset == "synthetic")
        raw = synthetic_raw();
    else
        raw = late_example_raw();
    return build_parameters(raw, o.late);
}

Spillover mode(const Options& o) { return o.spillover == "uni" ? Spillover::Unidirectional : Spillover::Bidirectional; }

std::string clock(double t, const ModelParams& p) { return format_clock(t, p.preferred_arrival); }

void write_out(const Options& o, const std::string& text) {
    if (o.out.empty()) return;
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + o.out);
    f << text;
    std::cerr << "wrote " << o.out << '\n';
}

std::string fmt(double v) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::setprecision(10) << v;
    return os.str();
}

void print_warnings(const ModelParams& p) {
    for (const auto& w : p.warnings) std::cerr << "warning: " << w << '\n';
}

// Fluid curves on a uniform grid; waits are in hours.
std::string curves_csv(const FluidCurves& c, const DepartureProfile& prof, double dt) {
    std::ostringstream os;
    os << "time_h,A_H,D_H,A_CR,D_CR,A_CP,D_CP,w_H,w_CR,w_CP\n";
    const double a = prof.start(), b = std::max(c.horizon_end(), prof.end());
    const auto n = static_cast<long>(std::ceil((b - a) / dt));
    for (long i = 0; i <= n; ++i) {
        const double t = std::min(b, a + dt * static_cast<double>(i));
        os << fmt(t) << ',' << fmt(c.A_H(t)) << ',' << fmt(c.D_H(t)) << ',' << fmt(c.A_CR(t)) << ',' << fmt(c.D_CR(t))
           << ',' << fmt(c.A_CP(t)) << ',' << fmt(c.D_CP(t)) << ',' << fmt(std::max(0.0, c.highway_wait(t))) << ','
           << fmt(c.curb_wait(Mode::Rv, t)) << ',' << fmt(c.curb_wait(Mode::Pv, t)) << '\n';
    }
    return os.str();
}

std::string queues_csv(const SimulationResult& r) {
    std::ostringstream os;
    os << "time_h,q_H,q_CR,q_CP\n";
    for (std::size_t i = 0; i < r.size(); ++i)
        os << fmt(r.time(i)) << ',' << fmt(r.q_H[i]) << ',' << fmt(r.q_CR[i]) << ',' << fmt(r.q_CP[i]) << '\n';
    return os.str();
}

std::string fees_csv(const PricingScheme& s, double dt) {
    std::ostringstream os;
    os << "time_h,fee_rv,fee_pv\n";
    const double a = std::min(s.so_t0_rv, s.so_t0_pv) - 0.25, b = std::max(s.so_t1_rv, s.so_t1_pv) + 0.25;
    const auto n = static_cast<long>(std::ceil((b - a) / dt));
    for (long i = 0; i <= n; ++i) {
        const double t = std::min(b, a + dt * static_cast<double>(i));
        os << fmt(t) << ',' << fmt(fee_at(s, Mode::Rv, t)) << ',' << fmt(fee_at(s, Mode::Pv, t)) << '\n';
    }
    return os.str();
}

void print_metrics(const MetricsReport& m) {
    std::cout << std::fixed << std::setprecision(2);
    std::cout << "N^R " << m.n_rv << "  N^P " << m.n_pv << '\n';
    std::cout << "C^R " << m.cost_rv << "  C^P " << m.cost_pv << '\n';
    std::cout << "SC " << m.sc << '\n';
    std::cout << "TQT highway " << m.tqt_h << "  curb RV " << m.tqt_cr << "  curb PV " << m.tqt_cp << '\n';
    if (m.sc_reduction) std::cout << "SC reduction " << 100.0 * *m.sc_reduction << " %  dC " << *m.delta_c << '\n';
}

int cmd_validate(const Options& o) {
    const ModelParams p = load(o);
    print_warnings(p);
    std::cout << std::setprecision(6);
    std::cout << "valid\n";
    std::cout << "c^R " << p.c_r << (p.c_r_overridden ? " (overridden)" : "") << "  u^P " << p.pv_fixed_cost
              << "  u^P - c^R " << p.cost_gap() << '\n';
    std::cout << "pi " << p.pi << " per hour\n";
    std::cout << "K_R " << k_rv(p) << "  K_P " << k_pv(p) << '\n';
    return kOk;
}

int cmd_classify(const Options& o) {
    const ModelParams p = load(o);
    print_warnings(p);
    if (o.late) {
        const LateSolution s = solve_late(p, {.self_check = false});
        std::cout << to_string(s.scenario) << " onset " << to_string(s.onset) << " ordering " << to_string(s.ordering) << '\n';
        return kOk;
    }
    const ModelParams e = effective(p, mode(o));
    std::cout << to_string(classify(p, mode(o))) << '\n';
    std::cout << "initial phase " << to_string(initial_phase_regime(e)) << ", utilization "
              << to_string(classify_utilization(e)) << '\n';
    return kOk;
}

int cmd_solve(const Options& o) {
    const ModelParams p = load(o);
    print_warnings(p);
    const SolveOptions so{.self_check = true, .cost_tol = o.tol};
    if (o.late) {
        const LateSolution s = solve_late(p, so);
        std::cout << "scenario " << to_string(s.scenario) << " (" << to_string(s.ordering) << ")\n";
        std::cout << "RV [" << clock(s.t0_rv, p) << ", " << clock(s.t1_rv, p) << "]  PV [" << clock(s.t0_pv, p) << ", "
                  << clock(s.t1_pv, p) << "]  on-time RV " << clock(s.t_tilde_rv, p) << " PV " << clock(s.t_tilde_pv, p)
                  << "  highway clear " << clock(s.t_e, p) << '\n';
        for (const auto& d : s.diagnostics) std::cerr << "note: " << d << '\n';
        print_metrics(metrics(s, p));
        write_out(o, curves_csv(s.curves, s.profile, o.dt));
        return kOk;
    }
    const EquilibriumSolution s = solve(p, mode(o), so);
    std::cout << "scenario " << to_string(s.scenario);
    if (s.sub_case != SubCase::None) std::cout << " (" << to_string(s.sub_case) << ")";
    std::cout << '\n';
    std::cout << "RV [" << clock(s.t0_rv, p) << ", " << clock(s.t1_rv, p) << "]";
    if (s.has_pv) std::cout << "  PV [" << clock(s.t0_pv, p) << ", " << clock(s.t1_pv, p) << "]";
    std::cout << '\n';
    for (const auto& d : s.diagnostics) std::cerr << "note: " << d << '\n';
    print_metrics(metrics(s, p));
    write_out(o, curves_csv(s.curves, s.profile, o.dt));
    return kOk;
}

int cmd_simulate(const Options& o) {
    const ModelParams p = load(o);
    print_warnings(p);
    if (o.priced) {
        const PricingScheme s = o.late ? optimal_pricing_late(p) : optimal_pricing(p);
        const DepartureProfile prof = s.schedule();
        const SimulationResult r = simulate(prof, p, o.dt);
        print_metrics(metrics(r, prof, p, &s));
        std::cout << "max queue " << r.max_queue() << " veh\n";
        write_out(o, queues_csv(r));
        return kOk;
    }
    DepartureProfile prof;
    ModelParams e = p;
    if (o.late) {
        prof = solve_late(p).profile;
    } else {
        prof = solve(p, mode(o)).profile;
        e = effective(p, mode(o));
        e.gamma.reset();
    }
    const SimulationResult r = simulate(prof, e, o.dt);
    print_metrics(metrics(r, prof, e));
    std::cout << "max queue " << r.max_queue() << " veh\n";
    write_out(o, queues_csv(r));
    return kOk;
}

int cmd_price(const Options& o) {
    const ModelParams p = load(o);
    print_warnings(p);
    const PricingScheme s = o.late ? optimal_pricing_late(p) : optimal_pricing(p);
    std::cout << "regime " << to_string(s.regime);
    if (s.theta) std::cout << "  theta " << *s.theta;
    std::cout << '\n';
    std::cout << "RV [" << clock(s.so_t0_rv, p) << ", " << clock(s.so_t1_rv, p) << "]  PV [" << clock(s.so_t0_pv, p)
              << ", " << clock(s.so_t1_pv, p) << "]\n";
    std::cout << std::fixed << std::setprecision(2) << "fee RV [" << s.base_fee << ", " << s.fee_max_rv() << "]  PV ["
              << s.base_fee << ", " << s.fee_max_pv() << "]\n";
    MetricsReport m = metrics(s, p);
    try {
        if (o.late)
            m = with_comparison(m, metrics(solve_late(p), p));
        else
            m = with_comparison(m, metrics(solve(p, mode(o)), p));
    } catch (const RegimeError& e) {
        std::cerr << "note: no-toll comparison unavailable: " << e.what() << '\n';
    }
    print_metrics(m);
    write_out(o, fees_csv(s, o.dt));
    return kOk;
}

int cmd_verify(const Options& o) {
    const ModelParams p = load(o);
    print_warnings(p);
    Tolerances tol;
    tol.rel = o.tol;
    tol.dt = o.dt;
    VerificationReport r;
    if (o.priced)
        r = verify_equilibrium(o.late ? optimal_pricing_late(p) : optimal_pricing(p), p, tol);
    else if (o.late)
        r = verify_equilibrium(solve_late(p), p, tol);
    else
        r = verify_equilibrium(solve(p, mode(o)), p, tol);
    std::cout << r.to_text();
    write_out(o, r.to_csv());
    return r.pass() ? kOk : kVerifyFailed;
}

int cmd_sweep(const Options& o) {
    SweepSpec spec;
    spec.base = load(o);
    for (const auto& s : o.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("--set expects name=value");
        set_parameter(spec.base, s.substr(0, eq), std::stod(s.substr(eq + 1)));
    }
    spec.base = revalidate(spec.base, o.late);
    spec.spillover = mode(o);
    spec.late = o.late;
    spec.threads = o.threads;
    for (const auto& a : o.axes) spec.axes.push_back(parse_axis(a));
    Table t;
    if (o.kind == "map")
        t = sweep_scenario_map(spec);
    else if (o.kind == "metrics")
        t = sweep_metrics(spec);
    else
        t = sweep_scalar(spec);
    const std::string csv = t.to_csv();
    if (o.out.empty())
        std::cout << csv;
    else
        write_out(o, csv);
    return kOk;
}

int cmd_case_hk(const Options& o) {
    const ModelParams p = o.config.empty() ? hong_kong() : load(o);
    std::cout << run_case_hk(p).to_text();
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tandem highway and curbside bottleneck equilibria"};
    app.require_subcommand(1);
    app.fallthrough();
    Options o;
    app.add_option("--config", o.config, "JSON parameter file");
    app.add_option("--preset", o.preset, "bundled parameters when --config is absent")
        ->check(CLI::IsMember({"hk", "synthetic", "late"}));
    app.add_option("--spillover", o.spillover, "spillover model")->check(CLI::IsMember({"uni", "bi"}));
    app.add_flag("--late", o.late, "allow late arrival (needs gamma)");
    app.add_option("--dt", o.dt, "oracle and CSV time step, hours")->check(CLI::PositiveNumber);
    app.add_option("--tol", o.tol, "relative tolerance for closed-form checks")->check(CLI::PositiveNumber);
    app.add_option("--out", o.out, "CSV output path");

    std::vector<std::pair<std::string, std::function<int(const Options&)>>> cmds = {
        {"validate", cmd_validate}, {"classify", cmd_classify}, {"solve", cmd_solve},
        {"simulate", cmd_simulate}, {"price", cmd_price},       {"verify", cmd_verify},
        {"sweep", cmd_sweep},       {"case-hk", cmd_case_hk},
    };
    const std::map<std::string, std::string> help = {
        {"validate", "check parameters and print derived quantities"},
        {"classify", "equilibrium scenario of the parameters"},
        {"solve", "closed-form equilibrium; --out writes the cumulative curves"},
        {"simulate", "point-queue oracle run of the equilibrium (or --priced optimum); --out writes queues"},
        {"price", "optimal time-varying fees; --out writes the fee schedule"},
        {"verify", "equilibrium checks against the oracle; exit 3 on failure"},
        {"sweep", "parameter sweep to CSV"},
        {"case-hk", "Hong Kong before/after comparison"},
    };
    std::map<std::string, CLI::App*> subs;
    for (const auto& [name, fn] : cmds) subs[name] = app.add_subcommand(name, help.at(name));
    subs["simulate"]->add_flag("--priced", o.priced, "simulate the priced optimum");
    subs["verify"]->add_flag("--priced", o.priced, "verify the priced optimum");
    subs["sweep"]->add_option("--kind", o.kind, "map, metrics or scalar")->check(CLI::IsMember({"map", "metrics", "scalar"}));
    subs["sweep"]->add_option("--axis", o.axes, "name=lo:hi:n or name=lo:hi/step (repeatable)")->required();
    subs["sweep"]->add_option("--set", o.sets, "name=value override (repeatable)");
    subs["sweep"]->add_option("--threads", o.threads, "worker threads, 0 for all cores");

    CLI11_PARSE(app, argc, argv);
    try {
        for (const auto& [name, fn] : cmds)
            if (subs[name]->parsed()) return fn(o);
    } catch (const ValidationError& e) {
        std::cerr << "validation error (" << assumption_name(e.assumption()) << "): " << e.what() << '\n';
        return kValidation;
    } catch (const RegimeError& e) {
        std::cerr << "regime error: " << e.what() << '\n';
        return kRegime;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRegime;
    }
    return kOk;
}

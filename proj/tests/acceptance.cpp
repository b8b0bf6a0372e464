// Acceptance run: one PASS/FAIL line per criterion, tolerances pinned below.
// Exit status is nonzero only for failures outside the documented known-fail list.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "support.hpp"
#include "tandem_curb/experiments.hpp"

using namespace tandem_curb;

namespace {

struct Line {
    std::string name;
    bool pass = true;
    std::vector<std::string> failed;
    std::vector<std::string> notes;
    double seconds = 0;
    double budget = 0;

    void need(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            failed.push_back(what);
        }
    }
};

// Sub-checks expected to fail; each has a ledger entry.
const std::set<std::string> kKnownFail = {
    "8: L7 equal cost on the example",
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

bool within_rel(double v, double target, double rel) { return std::abs(v - target) <= rel * std::abs(target); }
double minutes_off(double rel_hours, const std::string& clock) { return std::abs(rel_hours + 9.0 - parse_clock(clock)) * 60.0; }

double first_onset(const PiecewiseCurve& q, double a, double b, bool last) {
    double hit = std::nan("");
    for (double t = a; t <= b; t += 1.0 / 3600)
        if (q(t) > 1e-6) {
            hit = t;
            if (!last) break;
        }
    return hit;
}

double check_value(const VerificationReport& v, const std::string& name) {
    for (const auto& c : v.checks)
        if (c.name == name) return c.value;
    return std::nan("");
}

Line timed(const std::string& name, double budget, const std::function<void(Line&)>& body) {
    Line l;
    l.name = name;
    l.budget = budget;
    const auto t0 = std::chrono::steady_clock::now();
    body(l);
    l.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (budget > 0) l.need(l.seconds < budget, fmt("runtime < %.0f s", budget));
    return l;
}

void criterion1(Line& l) {
    const ModelParams p = hong_kong();
    const EquilibriumSolution s = solve(p, Spillover::Bidirectional);
    const MetricsReport m = metrics(s, p);
    l.need(s.scenario == ScenarioId::S5, "scenario S5");
    l.need(within_rel(s.n_rv, 4027, 0.015), "N^R 4027 ±1.5%");
    l.need(within_rel(s.cost_rv, 351.27, 0.035), "C 351.27 ±3.5%");
    l.need(within_rel(m.sc, 2515133.79, 0.035), "SC 2,515,133.79 ±3.5%");
    l.need(minutes_off(s.t0_rv, "6:35") <= 3 && minutes_off(s.t1_rv, "7:58") <= 3, "RV interval ±3 min");
    l.need(minutes_off(s.t0_pv, "7:29") <= 3 && minutes_off(s.t1_pv, "7:44") <= 3, "PV interval ±3 min");
    const double on = first_onset(s.curves.q_H, -4, 1, false), off = first_onset(s.curves.q_H, -4, 1, true);
    l.need(minutes_off(on, "7:29") <= 3 && minutes_off(off, "8:15") <= 3, "highway queue 7:29-8:15 ±3 min");

    RawConfig r = hong_kong_raw();
    r.rv_fixed_cost = 110.3;
    const ModelParams q = build_parameters(r);
    const EquilibriumSolution so = solve(q, Spillover::Bidirectional);
    const PricingScheme ps = optimal_pricing(q);
    l.need(within_rel(so.cost_rv, 351.27, 0.005), "c^R=110.3: C 351.27 ±0.5%");
    l.need(within_rel(ps.so_cost, 342.12, 0.005), "c^R=110.3: Ĉ 342.12 ±0.5%");
    l.notes.push_back(fmt("N^R=%.2f", s.n_rv) + fmt(" C=%.2f", s.cost_rv) + fmt(" SC=%.2f", m.sc) +
                      fmt(" C(110.3)=%.2f", so.cost_rv) + fmt(" Ĉ(110.3)=%.2f", ps.so_cost));
}

void criterion2(Line& l) {
    const ModelParams p = hong_kong();
    const MetricsReport e = metrics(solve(p, Spillover::Bidirectional), p);
    const PricingScheme s = optimal_pricing(p);
    const MetricsReport o = with_comparison(metrics(s, p), e);
    l.need(within_rel(s.so_n_rv, 4173, 0.015), "N̂^R 4173 ±1.5%");
    l.need(within_rel(s.so_cost, 342.12, 0.035), "Ĉ 342.12 ±3.5%");
    l.need(within_rel(o.sc, 1752941.70, 0.035), "SC 1,752,941.70 ±3.5%");
    l.need(within_rel(s.fee_max_rv(), 231.67, 0.03), "RV fee max 231.67 ±3%");
    l.need(within_rel(s.fee_max_pv(), 141.67, 0.03), "PV fee max 141.67 ±3%");
    l.need(fee_at(s, Mode::Rv, s.so_t0_rv) == 0.0 && fee_at(s, Mode::Pv, s.so_t0_pv) == 0.0, "fees start at 0");
    l.need(*o.sc_reduction >= 0.27 && *o.sc_reduction <= 0.33, "SC reduction in [27%, 33%]");
    l.notes.push_back(fmt("N̂^R=%.2f", s.so_n_rv) + fmt(" Ĉ=%.3f", s.so_cost) + fmt(" SC=%.2f", o.sc) +
                      fmt(" fees %.2f", s.fee_max_rv()) + fmt("/%.2f", s.fee_max_pv()) +
                      fmt(" reduction=%.2f%%", 100 * *o.sc_reduction));
}

void criterion3(Line& l) {
    double spread = 0, gap = 0, qdev = 0;
    int runs = 0;
    for (const auto& rep : tsupport::representatives()) {
        for (int mi = 0; mi < (rep.both_spillovers ? 2 : 1); ++mi) {
            const Spillover mode = mi == 0 ? Spillover::Bidirectional : Spillover::Unidirectional;
            const EquilibriumSolution s = solve(rep.params, mode);
            Tolerances t;
            t.dt = 1e-3;
            const VerificationReport v = verify_equilibrium(s, rep.params, t);
            const std::string tag = rep.name + (mi ? " uni" : " bi");
            l.need(s.scenario == rep.expected, tag + " scenario");
            const double sp = check_value(v, "oracle cost spread"), g = check_value(v, "oracle inter-mode gap"),
                         q = check_value(v, "oracle queue deviation (veh)");
            l.need(sp <= 0.01, tag + " cost spread ≤ 1%");
            if (!std::isnan(g)) l.need(g <= 0.01, tag + " inter-mode gap ≤ 1%");  // absent for single-mode runs
            l.need(q <= 5.0, tag + " queue deviation ≤ 5 veh");
            spread = std::max(spread, sp);
            if (!std::isnan(g)) gap = std::max(gap, g);
            qdev = std::max(qdev, q);
            ++runs;
        }
    }
    l.notes.push_back(std::to_string(runs) + " runs" + fmt(", max spread %.2e", spread) + fmt(", max gap %.2e", gap) +
                      fmt(", max queue dev %.3f veh", qdev));
}

void criterion4(Line& l) {
    const double dt = 1e-3;
    auto zero_queue = [&](const PricingScheme& s, const ModelParams& p, const std::string& tag) {
        const SimulationResult r = simulate(s.schedule(), p, dt);
        l.need(r.max_queue() <= p.s_highway * dt, tag + " oracle queue ≤ s_H·dt");
        // Fee gap while both modes arrive; after t* both late fees fall at γ, so the gap persists.
        const double a = std::max(s.so_t0_rv, s.so_t0_pv), b = std::min(s.so_t1_rv, s.so_t1_pv);
        double worst = 0;
        for (int i = 0; i <= 50; ++i) {
            const double t = a + (b - a) * i / 50.0;
            worst = std::max(worst, std::abs(fee_at(s, Mode::Rv, t) - fee_at(s, Mode::Pv, t) - p.cost_gap()) / p.cost_gap());
        }
        l.need(worst <= 1e-9, tag + " fee gap = u^P − c^R");
        l.notes.push_back(tag + fmt(" max queue %.3g", r.max_queue()) + fmt(" gap err %.1e", worst));
    };
    zero_queue(optimal_pricing(hong_kong()), hong_kong(), "HK");
    const ModelParams ex = synthetic(900, 900, 1.0, 1500);
    zero_queue(optimal_pricing(ex), ex, "900/900/1500");
    const ModelParams late = build_parameters(late_example_raw(), true);
    zero_queue(optimal_pricing_late(late), late, "late example");
}

void criterion5(Line& l) {
    SweepSpec spec;
    spec.axes = {parse_axis("s_highway=1000:2500/5")};
    spec.base = synthetic(900, 900, 7.5);
    const Table t = sweep_scalar(spec);
    const int sh = t.column("s_highway"), se = t.column("SC_e"), so = t.column("SC_o"), st = t.column("status");
    double stop = std::nan(""), best = 1e300, arg = std::nan("");
    int bad = 0;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        if (t.rows[i][st] != "ok") {
            ++bad;
            continue;
        }
        const double x = std::stod(t.rows[i][sh]);
        if (i + 1 < t.rows.size() && std::isnan(stop) &&
            !(std::stod(t.rows[i + 1][se]) < std::stod(t.rows[i][se]) * (1 - 1e-12)))
            stop = x;
        const double c = std::stod(t.rows[i][so]);
        if (c < best) {
            best = c;
            arg = x;
        }
    }
    l.need(bad == 0, "every grid point solves");
    l.need(std::abs(stop - 1235) <= 10, "SC_e stops decreasing at 1235 ± 10");
    l.need(std::abs(arg - 1800) <= 10, "SC_o minimum at 1800 ± 10");
    l.notes.push_back(fmt("SC_e stops at %.0f", stop) + fmt(", SC_o min at %.0f", arg));
}

void criterion6(Line& l) {
    const std::map<double, std::set<std::string>> cases = {
        {1.0, {"S3", "S5", "S8"}},
        {3.75, {"S3", "S4", "S5", "S7", "S8"}},
        {8.0, {"S1", "S2", "S3", "S4", "S5", "S6"}},
    };
    for (const auto& [gap, want] : cases) {
        SweepSpec spec;
        spec.axes = {parse_axis("s_curb_rv=100:2400/100"), parse_axis("s_curb_pv=100:2400/100")};
        spec.base = synthetic(900, 900, gap);
        const Table t = sweep_scenario_map(spec);
        std::set<std::string> got;
        std::map<std::string, double> first_s8;  // per s_C^P row
        for (const auto& row : t.rows) {
            got.insert(row[2]);
            if (row[2] == "S8" && !first_s8.count(row[1])) first_s8[row[1]] = std::stod(row[0]);
        }
        std::string inv;
        for (const auto& s : got) inv += s + " ";
        l.need(got == want, fmt("inventory at gap %.2f", gap));
        l.notes.push_back(fmt("gap %.2f: ", gap) + inv);
        if (gap == 1.0) {
            const double boundary = 2500.0 * (6.4 + 8 - 3.9) / (6.4 + 8);
            double worst = 0;
            for (const auto& [row, x] : first_s8) worst = std::max(worst, std::abs(x - boundary));
            l.need(!first_s8.empty() && worst <= 100, "S5→S8 boundary within one cell");
            l.notes.push_back(fmt("boundary %.1f", boundary) + fmt(", worst first-S8 offset %.1f", worst));
        }
    }
}

void criterion7(Line& l) {
    SweepSpec spec;
    spec.axes = {parse_axis("s_curb_rv=1000:5000/10")};
    spec.base = hong_kong();
    const Table t = sweep_scalar(spec);
    const int sc = t.column("scenario"), th = t.column("TQT_H"), st = t.column("status");
    std::size_t k = 0;
    while (k < t.rows.size() && !(t.rows[k][sc] == "S8" && t.rows[k - 1][sc] == "S5")) ++k;
    l.need(k < t.rows.size(), "S5→S8 transition found");
    if (k >= t.rows.size()) return;
    const double at = std::stod(t.rows[k][0]);
    l.need(std::abs(at - 3264) <= 40, "transition at 3264 ± 40");
    auto tqt = [&](std::size_t i) { return std::stod(t.rows[i][th]); };
    // TQT_H falls into the transition and rises after it.
    bool ok = t.rows[k - 1][st] != "invalid" && t.rows[k + 1][st] != "invalid";
    ok = ok && tqt(k - 5) > tqt(k - 1) && tqt(k + 5) > tqt(k);
    l.need(ok, "TQT_H decreasing then increasing");
    l.notes.push_back(fmt("first S8 at %.0f", at) + fmt(", TQT_H %.1f", tqt(k - 5)) + fmt(" → %.1f", tqt(k - 1)) +
                      fmt(" | %.1f", tqt(k)) + fmt(" → %.1f", tqt(k + 5)));
}

void criterion8(Line& l) {
    std::mt19937_64 rng(8);
    // Bidirectional spillover lowers the total and RV co-departure rates and raises the PV one.
    int prop3 = 0, prop3_fail = 0;
    for (int draws = 0; prop3 < 50 && draws < 100000; ++draws) {
        const ModelParams p = tsupport::random_params(rng);
        const ScenarioId s = classify(p, Spillover::Bidirectional);
        if (s != ScenarioId::S3 && s != ScenarioId::S5 && s != ScenarioId::S8) continue;
        try {
            if (!compare_uni_bi(p).holds()) ++prop3_fail;
            ++prop3;
        } catch (const RegimeError&) {
        }
    }
    l.need(prop3 == 50 && prop3_fail == 0, "Proposition 3 on 50 instances");

    // δ^P = 0 reduces the bidirectional solution to the unidirectional one.
    int reduced = 0, reduce_fail = 0;
    for (int draws = 0; reduced < 50 && draws < 100000; ++draws) {
        ModelParams p = tsupport::random_params(rng);
        p.delta_pv = 0;
        p = revalidate(p);
        try {
            const EquilibriumSolution a = solve(p, Spillover::Bidirectional), b = solve(p, Spillover::Unidirectional);
            const bool same = a.scenario == b.scenario && tsupport::close_rel(a.n_rv, b.n_rv, 1e-9) &&
                              tsupport::close_rel(a.t0_rv, b.t0_rv, 1e-9) && tsupport::close_rel(a.t1_rv, b.t1_rv, 1e-9) &&
                              tsupport::close_rel(a.t0_pv, b.t0_pv, 1e-9) && tsupport::close_rel(a.t1_pv, b.t1_pv, 1e-9) &&
                              tsupport::close_rel(a.cost_rv, b.cost_rv, 1e-9) && tsupport::close_rel(a.cost_pv, b.cost_pv, 1e-9);
            if (!same) ++reduce_fail;
            ++reduced;
        } catch (const RegimeError&) {
        }
    }
    l.need(reduce_fail == 0, "bidirectional→unidirectional at δ^P = 0 (1e-9)");

    // Conservation, FIFO, nonnegativity and no profitable deviation on 100 solvable random sets.
    int verified = 0, verify_fail = 0, regime = 0;
    for (int draws = 0; verified < 100 && draws < 100000; ++draws) {
        const ModelParams p = tsupport::random_params(rng);
        try {
            const EquilibriumSolution s = solve(p, Spillover::Bidirectional);
            Tolerances t;
            t.run_oracle = true;
            const VerificationReport v = verify_equilibrium(s, p, t);
            const SimulationResult r = simulate(s.profile, p, 1e-3);
            bool fifo = true;
            for (std::size_t i = 1; i < r.size(); ++i)
                fifo = fifo && r.q_H[i] >= -1e-9 && r.q_CR[i] >= -1e-9 && r.q_CP[i] >= -1e-9 &&
                       r.D_CR[i] >= r.D_CR[i - 1] - 1e-9 && r.D_CR[i] <= r.A_CR[i] + 1e-9 &&
                       r.D_CP[i] <= r.A_CP[i] + 1e-9 && r.D_H[i] <= r.A_H[i] + 1e-9;
            if (!v.pass() || !fifo) {
                ++verify_fail;
                std::printf("%s", v.to_text().c_str());
            }
            ++verified;
        } catch (const RegimeError&) {
            ++regime;
        }
    }
    l.need(verified == 100 && verify_fail == 0, "invariants on 100 random sets");

    // Late-arrival example: rate symmetry holds by construction; equal cost is checked on its schedule.
    const ModelParams ex = build_parameters(late_example_raw(), true);
    const LateStageRates rates = late_stage_rates(ex);
    const double api = ex.alpha + ex.pi, g = ex.late_value(), b = ex.beta;
    const bool sym = tsupport::close_rel(rates.initial_rv, api * ex.s_curb_rv / (api - b), 1e-12) &&
                     tsupport::close_rel(rates.final_rv, api * ex.s_curb_rv / (api + g), 1e-12) &&
                     tsupport::close_rel(rates.both_late.rv + ex.delta_pv * rates.both_late.pv, api * ex.s_curb_rv / (api + g), 1e-12) &&
                     tsupport::close_rel(rates.both_late.pv + ex.delta_rv * rates.both_late.rv, ex.alpha * ex.s_curb_pv / (ex.alpha + g), 1e-12);
    l.need(sym, "8: early/late rate symmetry on the example");
    SolveOptions raw;
    raw.self_check = false;
    const LateSolution ls = solve_late(ex, raw);
    const double spread = std::max(cost_spread(ex, ls.curves, Mode::Rv, ls.t0_rv, ls.t1_rv, 200, ls.cost),
                                   cost_spread(ex, ls.curves, Mode::Pv, ls.t0_pv, ls.t1_pv, 200, ls.cost));
    l.need(spread <= 0.01, "8: L7 equal cost on the example");
    l.notes.push_back(std::to_string(prop3) + " Prop-3 instances, " + std::to_string(reduced) + " reductions, " +
                      std::to_string(verified) + " verified (" + std::to_string(regime) + " outside closed forms skipped)");
    l.notes.push_back(std::string("example pattern ") + to_string(ls.scenario) + fmt(", cost spread %.4f", spread));
}

}  // namespace

int main() {
    std::vector<Line> lines;
    lines.push_back(timed("1 Hong Kong no-toll equilibrium", 1.0, criterion1));
    lines.push_back(timed("2 Hong Kong priced optimum", 1.0, criterion2));
    lines.push_back(timed("3 oracle equivalence S1-S8", 30.0, criterion3));
    lines.push_back(timed("4 social optimum has no queues", 0, criterion4));
    lines.push_back(timed("5 capacity optimum over s_H", 0, criterion5));
    lines.push_back(timed("6 scenario map structure", 0, criterion6));
    lines.push_back(timed("7 S5→S8 transition and TQT_H", 0, criterion7));
    lines.push_back(timed("8 property suite", 0, criterion8));

    int unexpected = 0;
    for (const auto& l : lines) {
        std::printf("%s  %s  (%.3f s)\n", l.pass ? "PASS" : "FAIL", l.name.c_str(), l.seconds);
        for (const auto& n : l.notes) std::printf("      %s\n", n.c_str());
        for (const auto& f : l.failed) {
            const bool known = kKnownFail.count(f) > 0;
            std::printf("      failed: %s%s\n", f.c_str(), known ? " [known]" : "");
            if (!known) ++unexpected;
        }
    }
    std::printf("%d unexpected failure(s)\n", unexpected);
    return unexpected == 0 ? 0 : 1;
}

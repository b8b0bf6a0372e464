#include "tandem_curb/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

namespace tandem_curb {

namespace {

double trapezoid(const std::vector<double>& s, double dt) {
    if (s.size() < 2) return 0.0;
    double a = 0;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) a += 0.5 * (s[i] + s[i + 1]) * dt;
    return a;
}

double rel(double x, double ref) { return x / std::max(1.0, std::abs(ref)); }

// Travel time of a single extra commuter leaving at t, including before the first departure.
double probe_travel_time(const FluidCurves& c, Mode m, double t) {
    double hw = 0.0;
    if (!c.exit_H.empty() && t >= c.exit_H.front_time()) hw = std::max(0.0, c.exit_H(t) - t);
    const double at = t + hw;
    const auto& v = m == Mode::Rv ? c.V_R : c.V_P;
    double cw = 0.0;
    if (!v.empty() && at >= v.front_time()) cw = std::max(0.0, v(at));
    return hw + cw;
}

// Everything verification needs, independent of where the schedule came from.
struct View {
    ModelParams p;
    const DepartureProfile* profile = nullptr;
    const FluidCurves* curves = nullptr;
    const PricingScheme* fees = nullptr;
    bool used[2] = {false, false};
    double t0[2] = {0, 0}, t1[2] = {0, 0};
    double n[2] = {0, 0};
    double cost[2] = {0, 0};
    bool zero_queue = false;
};

int idx(Mode m) { return m == Mode::Rv ? 0 : 1; }

double fee_for(const View& v, Mode m, double arrival) { return v.fees ? fee_at(*v.fees, m, arrival) : 0.0; }

double fluid_cost(const View& v, Mode m, double t) {
    const double T = probe_travel_time(*v.curves, m, t);
    return generalized_cost(v.p, m, t, T, fee_for(v, m, t + T));
}

void add(VerificationReport& r, std::string name, double value, double tolerance) {
    r.checks.push_back({std::move(name), value, tolerance, value <= tolerance});
}

VerificationReport run_checks(const View& v, const Tolerances& tol) {
    VerificationReport r;
    const auto& prof = *v.profile;
    const double N = v.p.demand;
    const double ref = v.used[0] ? v.cost[0] : v.cost[1];
    constexpr Mode modes[2] = {Mode::Rv, Mode::Pv};

    double cons = std::abs(prof.total() - N);
    for (Mode m : modes) cons = std::max(cons, std::abs(prof.total(m) - v.n[idx(m)]));
    add(r, "conservation", rel(cons, N), 1e-9);
    if (N <= 0 || prof.segments.empty()) return r;

    // Equal cost inside each interval.
    for (Mode m : modes) {
        const int k = idx(m);
        if (!v.used[k]) continue;
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (int i = 0; i <= tol.samples; ++i) {
            const double t = v.t0[k] + (v.t1[k] - v.t0[k]) * i / tol.samples;
            const double c = fluid_cost(v, m, t);
            lo = std::min(lo, c);
            hi = std::max(hi, c);
        }
        r.intra_spread = std::max(r.intra_spread, rel(hi - lo, ref));
    }
    add(r, "intra-mode cost spread", r.intra_spread, tol.rel);
    if (v.used[0] && v.used[1]) {
        r.inter_gap = rel(std::abs(v.cost[0] - v.cost[1]), ref);
        add(r, "inter-mode cost gap", r.inter_gap, tol.rel);
    }

    // Leaving at an unused time within the peak must not pay. Without late arrival the
    // queues of a mode drain exactly at t* after its last departure, so a later departure
    // also lands at t*; that is the γ → ∞ limit of a vanishing late stage, so only the early
    // side is probed.
    const double span = prof.end() - prof.start();
    const double lo = prof.start() - 0.25 * span;
    const double hi = prof.end() + 0.25 * span;
    for (Mode m : modes) {
        const int k = idx(m);
        if (!v.used[k]) continue;
        const double a = v.t0[k], b = v.t1[k];
        const double before = std::max(0.0, a - lo), after = v.p.has_late() ? std::max(0.0, hi - b) : 0.0;
        const double len = before + after;
        if (len <= 0) continue;
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < tol.samples; ++i) {
            const double x = len * (i + 0.5) / tol.samples;
            const double t = x < before ? lo + x : b + (x - before);
            best = std::min(best, fluid_cost(v, m, t));
        }
        r.deviation_gain = std::max(r.deviation_gain, std::max(0.0, rel(v.cost[k] - best, ref)));
    }
    add(r, "deviation profitability", r.deviation_gain, tol.rel);

    // First RV sees no queue anywhere; first PV sees no curb queue.
    double first = 0.0;
    if (v.used[0]) first = probe_travel_time(*v.curves, Mode::Rv, v.t0[0]);
    if (v.used[1]) {
        const double at = v.t0[1] + std::max(0.0, v.curves->exit_H(v.t0[1]) - v.t0[1]);
        first = std::max(first, v.curves->curb_wait(Mode::Pv, at));
    }
    add(r, "first commuter wait (h)", first, tol.rel);

    if (!tol.run_oracle) return r;
    const SimulationResult sim = simulate(prof, v.p, tol.dt);
    const auto& c = *v.curves;
    for (std::size_t i = 0; i < sim.size(); ++i) {
        const double t = sim.time(i);
        r.oracle_queue_dev = std::max({r.oracle_queue_dev, std::abs(sim.q_H[i] - c.q_H(t)),
                                       std::abs(sim.q_CR[i] - c.q_CR(t)), std::abs(sim.q_CP[i] - c.q_CP(t))});
    }
    add(r, "oracle queue deviation (veh)", r.oracle_queue_dev, tol.queue_veh);

    double spread = 0.0, mean[2] = {0, 0};
    for (Mode m : modes) {
        const int k = idx(m);
        if (!v.used[k]) continue;
        double lo_c = std::numeric_limits<double>::infinity(), hi_c = -lo_c, sum = 0;
        for (int i = 0; i < tol.samples; ++i) {
            const double t = v.t0[k] + (v.t1[k] - v.t0[k]) * (i + 0.5) / tol.samples;
            const double T = sim.travel_time(m, t);
            // A discrete-time overshoot of t* by up to two steps counts as on time without late arrival.
            const double over = t + T;
            const double t_eff = !v.p.has_late() && over > 0 && over <= 2 * tol.dt ? t - over : t;
            const double cst = generalized_cost(v.p, m, t_eff, T, fee_for(v, m, t + T));
            lo_c = std::min(lo_c, cst);
            hi_c = std::max(hi_c, cst);
            sum += cst;
        }
        mean[k] = sum / tol.samples;
        spread = std::max(spread, rel(hi_c - lo_c, ref));
    }
    add(r, "oracle cost spread", spread, tol.oracle_rel);
    if (v.used[0] && v.used[1]) add(r, "oracle inter-mode gap", rel(std::abs(mean[0] - mean[1]), ref), tol.oracle_rel);
    if (v.zero_queue)
        add(r, "oracle zero queue (veh)", sim.max_queue(), v.p.s_highway * tol.dt);
    return r;
}

ModelParams without_late(ModelParams p) {
    p.gamma.reset();
    return p;
}

}  // namespace

MetricsReport metrics(const EquilibriumSolution& sol, const ModelParams& p) {
    MetricsReport m;
    if (p.demand <= 0) return m;
    m.n_rv = sol.n_rv;
    m.n_pv = sol.n_pv;
    m.cost_rv = sol.cost_rv;
    m.cost_pv = sol.cost_pv;
    m.sc = sol.n_rv * sol.cost_rv + sol.n_pv * sol.cost_pv;
    m.tqt_h = sol.curves.q_H.empty() ? 0.0 : sol.curves.q_H.integral();
    m.tqt_cr = sol.curves.q_CR.empty() ? 0.0 : sol.curves.q_CR.integral();
    m.tqt_cp = sol.curves.q_CP.empty() ? 0.0 : sol.curves.q_CP.integral();
    return m;
}

MetricsReport metrics(const LateSolution& sol, const ModelParams& p) {
    MetricsReport m;
    if (p.demand <= 0) return m;
    m.n_rv = sol.n_rv;
    m.n_pv = sol.n_pv;
    m.cost_rv = m.cost_pv = sol.cost;
    m.sc = (sol.n_rv + sol.n_pv) * sol.cost;
    m.tqt_h = sol.curves.q_H.integral();
    m.tqt_cr = sol.curves.q_CR.integral();
    m.tqt_cp = sol.curves.q_CP.integral();
    return m;
}

MetricsReport metrics(const PricingScheme& s, const ModelParams& p) {
    MetricsReport m;
    if (p.demand <= 0) return m;
    m.n_rv = s.so_n_rv;
    m.n_pv = s.so_n_pv;
    m.cost_rv = m.cost_pv = s.so_cost;
    m.sc = social_optimum_cost(s, p);
    return m;
}

MetricsReport metrics(const SimulationResult& r, const DepartureProfile& profile, const ModelParams& p,
                      const PricingScheme* fees) {
    MetricsReport m;
    if (p.demand <= 0 || profile.segments.empty()) return m;
    double total[2] = {0, 0}, count[2] = {0, 0};
    for (const auto& seg : profile.segments) {
        const int steps = std::max(1, static_cast<int>(std::ceil((seg.t1 - seg.t0) / r.dt)));
        const double h = (seg.t1 - seg.t0) / steps;
        for (Mode md : {Mode::Rv, Mode::Pv}) {
            const double rate = md == Mode::Rv ? seg.rv : seg.pv;
            if (rate <= 0) continue;
            const int k = md == Mode::Rv ? 0 : 1;
            for (int i = 0; i < steps; ++i) {
                const double t = seg.t0 + (i + 0.5) * h;
                const double T = r.travel_time(md, t);
                const double f = fees ? fee_at(*fees, md, t + T) : 0.0;
                const double c = generalized_cost(p, md, t, T, f);
                total[k] += c * rate * h;
                count[k] += rate * h;
                m.sc += (c - f) * rate * h;
            }
        }
    }
    m.n_rv = count[0];
    m.n_pv = count[1];
    m.cost_rv = count[0] > 0 ? total[0] / count[0] : 0.0;
    m.cost_pv = count[1] > 0 ? total[1] / count[1] : 0.0;
    m.tqt_h = trapezoid(r.q_H, r.dt);
    m.tqt_cr = trapezoid(r.q_CR, r.dt);
    m.tqt_cp = trapezoid(r.q_CP, r.dt);
    return m;
}

MetricsReport with_comparison(MetricsReport priced, const MetricsReport& no_toll) {
    priced.sc_reduction = no_toll.sc > 0 ? (no_toll.sc - priced.sc) / no_toll.sc : 0.0;
    priced.delta_c = priced.cost() - no_toll.cost();
    return priced;
}

bool VerificationReport::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::string VerificationReport::to_text() const {
    std::ostringstream os;
    std::size_t w = 0;
    for (const auto& c : checks) w = std::max(w, c.name.size());
    for (const auto& c : checks)
        os << std::left << std::setw(static_cast<int>(w) + 2) << c.name << std::right << std::scientific
           << std::setprecision(3) << std::setw(12) << c.value << "  <= " << std::setw(10) << c.tolerance << "  "
           << (c.pass ? "PASS" : "FAIL") << '\n';
    os << "overall: " << (pass() ? "PASS" : "FAIL") << '\n';
    return os.str();
}

std::string VerificationReport::to_csv() const {
    std::ostringstream os;
    os << "check,value,tolerance,pass\n" << std::setprecision(10);
    for (const auto& c : checks) os << '"' << c.name << "\"," << c.value << ',' << c.tolerance << ',' << c.pass << '\n';
    return os.str();
}

VerificationReport verify_equilibrium(const EquilibriumSolution& sol, const ModelParams& p, const Tolerances& tol) {
    View v;
    v.p = without_late(effective(p, sol.spillover));
    v.profile = &sol.profile;
    v.curves = &sol.curves;
    v.used[0] = sol.n_rv > 0;
    v.used[1] = sol.has_pv && sol.n_pv > 0;
    v.t0[0] = sol.t0_rv;
    v.t1[0] = sol.t1_rv;
    v.t0[1] = sol.t0_pv;
    v.t1[1] = sol.t1_pv;
    v.n[0] = sol.n_rv;
    v.n[1] = sol.n_pv;
    v.cost[0] = sol.cost_rv;
    v.cost[1] = sol.cost_pv;
    return run_checks(v, tol);
}

VerificationReport verify_equilibrium(const LateSolution& sol, const ModelParams& p, const Tolerances& tol) {
    View v;
    v.p = p;
    v.profile = &sol.profile;
    v.curves = &sol.curves;
    v.used[0] = v.used[1] = true;
    v.t0[0] = sol.t0_rv;
    v.t1[0] = sol.t1_rv;
    v.t0[1] = sol.t0_pv;
    v.t1[1] = sol.t1_pv;
    v.n[0] = sol.n_rv;
    v.n[1] = sol.n_pv;
    v.cost[0] = v.cost[1] = sol.cost;
    return run_checks(v, tol);
}

VerificationReport verify_equilibrium(const PricingScheme& s, const ModelParams& p, const Tolerances& tol) {
    const DepartureProfile prof = s.schedule();
    const FluidCurves curves = propagate(prof, p);
    View v;
    v.p = s.late ? p : without_late(p);
    v.profile = &prof;
    v.curves = &curves;
    v.fees = &s;
    v.used[0] = s.so_n_rv > 0;
    v.used[1] = s.so_n_pv > 0;
    v.t0[0] = s.so_t0_rv;
    v.t1[0] = s.so_t1_rv;
    v.t0[1] = s.so_t0_pv;
    v.t1[1] = s.so_t1_pv;
    v.n[0] = s.so_n_rv;
    v.n[1] = s.so_n_pv;
    v.cost[0] = v.cost[1] = s.so_cost;
    v.zero_queue = true;
    return run_checks(v, tol);
}

UniBiReport compare_uni_bi(const ModelParams& p) {
    auto overlapping = [](ScenarioId s) { return s == ScenarioId::S3 || s == ScenarioId::S5 || s == ScenarioId::S8; };
    const EquilibriumSolution bi = solve(p, Spillover::Bidirectional);
    const EquilibriumSolution uni = solve(p, Spillover::Unidirectional);
    if (!overlapping(bi.scenario) || !overlapping(uni.scenario))
        throw RegimeError(std::string("scenario mismatch: uni/bi comparison needs S3, S5 or S8, got ") +
                          to_string(uni.scenario) + "/" + to_string(bi.scenario));
    UniBiReport r;
    r.scenario_bi = bi.scenario;
    r.scenario_uni = uni.scenario;
    r.rv_bi = bi.co_rate_rv;
    r.pv_bi = bi.co_rate_pv;
    r.rv_uni = uni.co_rate_rv;
    r.pv_uni = uni.co_rate_pv;
    r.total_bi = r.rv_bi + r.pv_bi;
    r.total_uni = r.rv_uni + r.pv_uni;
    return r;
}

}  // namespace tandem_curb

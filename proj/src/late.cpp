#include "tandem_curb/late.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "tandem_curb/rates.hpp"

namespace tandem_curb {

const char* to_string(LateOrdering o) {
    switch (o) {
        case LateOrdering::RvLateThroughout: return "a";
        case LateOrdering::RvOnTimeFirst: return "b";
        case LateOrdering::PvOnTimeFirst: return "c";
        case LateOrdering::Impossible: return "impossible";
    }
    return "?";
}

const char* to_string(QueueOnset q) {
    switch (q) {
        case QueueOnset::CurbOnly: return "curb-only";
        case QueueOnset::CurbThenHighway: return "curb-then-highway";
        case QueueOnset::HighwayFromStart: return "highway-from-start";
    }
    return "?";
}

std::vector<RateStep> LateSolution::dep_rate_total() const { return rate_steps(curves.A_H); }

std::vector<RateStep> LateSolution::arr_rate_curb(Mode m) const {
    return rate_steps(m == Mode::Rv ? curves.A_CR : curves.A_CP);
}

LateStageRates late_stage_rates(const ModelParams& p) {
    const double g = p.late_value();
    const double kr = rv_queue_rate(p, p.beta), kp = pv_queue_rate(p, p.beta);
    const double kr_late = rv_queue_rate(p, -g), kp_late = pv_queue_rate(p, -g);
    return {kr, co_rates(p, kr, kp), co_rates(p, kr, kp_late), co_rates(p, kr_late, kp_late), kr_late};
}

LateOrdering classify_ordering(double ttr, double t0p, double ttp, double t1p) {
    if (ttr <= t0p) return LateOrdering::RvLateThroughout;
    if (ttr <= ttp) return LateOrdering::RvOnTimeFirst;
    if (ttr < t1p) return LateOrdering::PvOnTimeFirst;
    return LateOrdering::Impossible;
}

LateOrdering classify_ordering(const LateSolution& s) {
    return classify_ordering(s.t_tilde_rv, s.t0_pv, s.t_tilde_pv, s.t1_pv);
}

namespace {

// Affine form c·(t0R, t0P, t1P) + k.
struct Aff {
    std::array<double, 3> c{0, 0, 0};
    double k = 0;
    double at(const Eigen::Vector3d& x) const { return c[0] * x[0] + c[1] * x[1] + c[2] * x[2] + k; }
};
Aff operator+(Aff a, const Aff& b) {
    for (int i = 0; i < 3; ++i) a.c[i] += b.c[i];
    a.k += b.k;
    return a;
}
Aff operator*(double s, Aff a) {
    for (auto& v : a.c) v *= s;
    a.k *= s;
    return a;
}
Aff operator-(const Aff& a, const Aff& b) { return a + (-1.0) * b; }
Aff var(int i) {
    Aff a;
    a.c[i] = 1;
    return a;
}
Aff constant(double k) {
    Aff a;
    a.k = k;
    return a;
}

const char* table_row_hint(QueueOnset q, LateOrdering o) {
    static const char* names[3][3] = {{"L2", "L3", "L4"}, {"L5", "L6", "L7"}, {"L9", "L10", "L11"}};
    if (o == LateOrdering::Impossible) return "none";
    return names[static_cast<int>(q)][static_cast<int>(o)];
}

[[noreturn]] void outside(const std::string& why, QueueOnset q, LateOrdering o) {
    throw RegimeError("outside L7 regime: " + why + " (pattern " + table_row_hint(q, o) + ")");
}

LateSolution solve_impl(const ModelParams& p, bool strict, const SolveOptions& opt) {
    if (!p.has_late()) throw RegimeError("late-arrival solve requires gamma");
    const double a = p.alpha, b = p.beta, g = p.late_value(), api = p.alpha + p.pi;
    const double N = p.demand, D = p.cost_gap(), sH = p.s_highway;
    const LateStageRates r = late_stage_rates(p);

    QueueOnset onset = initial_phase_regime(p) == InitialRegime::CurbOnly ? QueueOnset::CurbThenHighway
                                                                         : QueueOnset::HighwayFromStart;
    if (onset == QueueOnset::CurbThenHighway && leq_tol(r.both_early.total(), sH))
        outside("co-departure stays below highway capacity", QueueOnset::CurbOnly, LateOrdering::PvOnTimeFirst);
    if (strict && onset == QueueOnset::HighwayFromStart)
        outside("highway queues from the first departure since (α+π)s_C^R/(α+π−β) > s_H", onset,
                LateOrdering::PvOnTimeFirst);
    for (double v : {r.both_early.rv, r.both_early.pv, r.pv_late.rv, r.pv_late.pv, r.both_late.rv, r.both_late.pv})
        if (v <= 0) outside("co-departure rate nonpositive", onset, LateOrdering::PvOnTimeFirst);

    const bool hw = onset == QueueOnset::HighwayFromStart;
    const Aff t0r = var(0), t0p = var(1), t1p = var(2);
    const double m = hw ? r.initial_rv / sH - 1.0 : 0.0;
    const Aff w0 = m * (t0p - t0r);
    const Aff ttp = (1.0 / a) * (b * t0p - (a - b) * w0);
    const Aff ttr = (b / api) * t0r;
    const Aff t1r = (-b / g) * t0r;
    const Aff a_t0p = r.initial_rv * (t0p - t0r);
    const Aff a_ttp = a_t0p + r.both_early.total() * (ttp - t0p);
    const Aff a_ttr = a_ttp + r.pv_late.total() * (ttr - ttp);
    const Aff a_t1p = a_ttr + r.both_late.total() * (t1p - ttr);
    const Aff tq = hw ? t0r : t0p;
    const Aff a_tq = hw ? constant(0.0) : a_t0p;
    const Aff w1 = (1.0 / sH) * (a_t1p - a_tq) - (t1p - tq);

    const std::array<Aff, 3> eq = {
        (-b) * t0r - constant(D) - ((-b) * t0p + (a - b) * w0),
        (-b) * t0p + (a - b) * w0 - (a + g) * w1 - g * t1p,
        a_t1p + r.final_rv * (t1r - t1p) - constant(N),
    };
    Eigen::Matrix3d M;
    Eigen::Vector3d rhs;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) M(i, j) = eq[i].c[j];
        rhs[i] = -eq[i].k;
    }
    const Eigen::Vector3d x = M.fullPivLu().solve(rhs);

    LateSolution s;
    s.onset = onset;
    s.scenario = hw ? ScenarioId::L11 : ScenarioId::L7;
    s.t0_rv = x[0];
    s.t0_pv = x[1];
    s.t1_pv = x[2];
    s.t1_rv = t1r.at(x);
    s.t_tilde_rv = ttr.at(x);
    s.t_tilde_pv = ttp.at(x);
    s.cost = -b * s.t0_rv + p.c_r;
    s.ordering = classify_ordering(s);

    std::ostringstream times;
    times << "[t0R=" << s.t0_rv << " t0P=" << s.t0_pv << " t~P=" << s.t_tilde_pv << " t~R=" << s.t_tilde_rv
          << " t1P=" << s.t1_pv << " t1R=" << s.t1_rv << "]";
    if (!std::isfinite(s.t0_rv) || !std::isfinite(s.t1_pv)) outside("singular stage system", onset, s.ordering);
    if (s.ordering != LateOrdering::PvOnTimeFirst)
        outside(std::string("departure ordering is case (") + to_string(s.ordering) + ") " + times.str(), onset,
                s.ordering);
    if (!(s.t0_rv < s.t0_pv && s.t0_pv < s.t_tilde_pv && s.t1_pv < s.t1_rv))
        outside("critical times out of order " + times.str(), onset, s.ordering);
    if (w1.at(x) < 0) outside("highway queue gone before the last PV " + times.str(), onset, s.ordering);

    s.profile.add(s.t0_rv, s.t0_pv, r.initial_rv, 0);
    s.profile.add(s.t0_pv, s.t_tilde_pv, r.both_early.rv, r.both_early.pv);
    s.profile.add(s.t_tilde_pv, s.t_tilde_rv, r.pv_late.rv, r.pv_late.pv);
    s.profile.add(s.t_tilde_rv, s.t1_pv, r.both_late.rv, r.both_late.pv);
    s.profile.add(s.t1_pv, s.t1_rv, r.final_rv, 0);
    s.n_rv = s.profile.total(Mode::Rv);
    s.n_pv = s.profile.total(Mode::Pv);

    // The last stage keeps the same home rate once the highway clears.
    const double drain = 1.0 - r.final_rv / sH;
    s.t_e = drain > 0 ? std::min(s.t1_rv, s.t1_pv + w1.at(x) / drain) : s.t1_rv;

    s.curves = propagate(s.profile, p);
    if (opt.self_check) {
        const int samples = std::max(opt.samples, 200);
        double spread = cost_spread(p, s.curves, Mode::Rv, s.t0_rv, s.t1_rv, samples, s.cost);
        spread = std::max(spread, cost_spread(p, s.curves, Mode::Pv, s.t0_pv, s.t1_pv, samples, s.cost));
        const double pv_cost = generalized_cost(p, Mode::Pv, s.t0_pv, s.curves.travel_time(Mode::Pv, s.t0_pv));
        const double gap = std::abs(pv_cost - s.cost) / std::max(1.0, std::abs(s.cost));
        if (!(spread <= opt.cost_tol && gap <= opt.cost_tol)) {
            std::ostringstream os;
            os << "equilibrium check failed: cost spread " << spread << ", inter-mode gap " << gap << " " << times.str();
            outside(os.str(), onset, s.ordering);
        }
    }
    if (hw)
        s.diagnostics.push_back(
            "highway queues from the first departure; critical times use the highway wait met by the first PV");
    return s;
}

}  // namespace

LateSolution solve_L7(const ModelParams& p, const SolveOptions& opt) { return solve_impl(p, true, opt); }

LateSolution solve_late(const ModelParams& p, const SolveOptions& opt) { return solve_impl(p, false, opt); }

}  // namespace tandem_curb

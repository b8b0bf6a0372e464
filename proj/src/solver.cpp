#include "tandem_curb/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tandem_curb/rates.hpp"

namespace tandem_curb {

const char* to_string(SubCase s) {
    switch (s) {
        case SubCase::None: return "none";
        case SubCase::PvEndsFirst: return "t1P<=t1R";
        case SubCase::RvEndsFirst: return "t1P>t1R";
        case SubCase::PvQueuedStart: return "pv-meets-highway-queue";
        case SubCase::PvFreeStart: return "pv-free-start";
    }
    return "?";
}

std::vector<RateStep> rate_steps(const PiecewiseCurve& cum) {
    std::vector<RateStep> out;
    const auto& t = cum.times();
    const auto s = cum.slopes();
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!out.empty() && std::abs(out.back().rate - s[i]) <= 1e-9 * std::max(1.0, std::abs(s[i])))
            out.back().t1 = t[i + 1];
        else
            out.push_back({t[i], t[i + 1], s[i]});
    }
    return out;
}

namespace {

bool lt_tol(double a, double b) { return a < b - 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); }

std::string describe(const CriticalTimes& c) {
    std::ostringstream os;
    os << "[" << to_string(c.sub_case) << ": t0R=" << c.t0_rv << " t0P=" << c.t0_pv << " t1R=" << c.t1_rv
       << " t1P=" << c.t1_pv << " NR=" << c.n_rv << "]";
    return os.str();
}

}  // namespace

std::vector<RateStep> EquilibriumSolution::dep_rate_total() const { return rate_steps(curves.A_H); }

std::vector<RateStep> EquilibriumSolution::arr_rate_curb(Mode m) const {
    return rate_steps(m == Mode::Rv ? curves.A_CR : curves.A_CP);
}

std::pair<double, double> initial_phase_rates(const ModelParams& p) {
    double k = k_rv(p);
    if (initial_phase_regime(p) == InitialRegime::CurbOnly) return {k, k};
    return {k, p.s_highway};
}

CriticalTimes closed_form_single(const ModelParams& p) {
    CriticalTimes c;
    const double N = p.demand, sR = p.s_curb_rv;
    c.n_rv = N;
    c.t0_rv = -N / sR;
    c.t1_rv = -p.beta * N / ((p.alpha + p.pi) * sR);
    return c;
}

CriticalTimes closed_form_separated(const ModelParams& p) {
    CriticalTimes c;
    const double a = p.alpha, b = p.beta, N = p.demand, D = p.cost_gap();
    const double sR = p.s_curb_rv, sP = p.s_curb_pv;
    c.n_rv = (N * b + D * sP) * sR / (b * (sR + sP));
    const double nP = N - c.n_rv;
    c.t0_rv = -c.n_rv / sR;
    c.t1_rv = -b / (a + p.pi) * c.n_rv / sR;
    c.t0_pv = -nP / sP;
    c.t1_pv = -(b / a) * nP / sP;
    return c;
}

CriticalTimes closed_form_s7(const ModelParams& p, SubCase which) {
    if (which == SubCase::PvFreeStart) {
        CriticalTimes c = closed_form_separated(p);
        c.sub_case = which;
        return c;
    }
    CriticalTimes c;
    c.sub_case = SubCase::PvQueuedStart;
    const double a = p.alpha, b = p.beta, api = p.alpha + p.pi, N = p.demand, D = p.cost_gap();
    const double sR = p.s_curb_rv, sP = p.s_curb_pv, sH = p.s_highway;
    c.n_rv = sH * sR / (sH * (sR + sP) - sP * sR) * N;
    c.t0_rv = -c.n_rv / sR;
    c.t1_rv = -b / api * c.n_rv / sR;
    // The first PV leaves the highway once every RV has: E0 = t0R + N^R/s_H. The printed
    // t0^P keeps the RV queue growing until t0^P, which only holds when t0^P = t1^R.
    const double e0 = c.t0_rv + c.n_rv / sH;
    c.t0_pv = (b * c.t0_rv + (a - b) * e0 + D) / a;
    c.t1_pv = c.t0_pv + (N - c.n_rv) * (a - b) / (a * sP);
    return c;
}

namespace {

// Unidirectional forms for the overlap scenarios.
CriticalTimes overlap_uni(const ModelParams& p, InitialRegime regime, SubCase which) {
    const double a = p.alpha, b = p.beta, api = p.alpha + p.pi, N = p.demand, D = p.cost_gap();
    const double sR = p.s_curb_rv, sP = p.s_curb_pv, sH = p.s_highway, dR = p.delta_rv;
    CriticalTimes c;
    c.sub_case = which;
    if (regime == InitialRegime::CurbOnly) {
        if (which == SubCase::PvEndsFirst) {
            const double k = dR * api * (a - b) / (a * (api - b));
            const double sPt = sP - k * sR;
            c.n_rv = (N * b + D * sPt) / (b * (sR + sPt)) * sR;
            c.t0_pv = -(N - c.n_rv) / sPt;
            c.t1_pv = -(b / a) * (N - c.n_rv) / sPt;
        } else {
            const double k = dR * api / (api - b);
            const double sPt = sP - k * sR;
            c.n_rv = (N * b + D * sPt) / (b * (sP + sR * (1 - dR))) * sR;
            const double x = N - (api - b * (1 - dR)) / (api - b) * c.n_rv;
            c.t0_pv = -x / sPt;
            c.t1_pv = -(b / a) * x / sPt;
        }
    } else {
        const double q = api * (a - b) / (a * (api - b));
        if (which == SubCase::PvEndsFirst) {
            const double sPt = sP - sR * dR * q;
            c.n_rv = (N / (sR + sPt) + D * api / (a * (api - b)) * sR * sPt / ((sR + sPt) * (sH - sR * q))) * sR;
            c.t0_pv = -N * sH * (api - b) / (sR * sPt * api) +
                      c.n_rv * (sH * (sR + sPt) * (api - b) / api - sR * sPt) / (sPt * sR * sR);
            c.t1_pv = c.t0_pv + (a - b) / a * (N - c.n_rv) / sPt;
        } else {
            const double e = sP - dR * sH;
            c.n_rv = (N / (sP + sR * (1 - dR)) + D * api / (a * (api - b)) * sR * e / ((sP + sR * (1 - dR)) * (sH - sR * q))) * sR;
            c.t0_pv = -N * sH * (api - b) / (sR * e * api) -
                      c.n_rv * (sR * (sP - sH * (api - b * (1 - dR)) / api) - sH * sP * (api - b) / api) / (sR * sR * e);
            c.t1_pv = c.t0_pv + N * (a - b) / (a * e) - c.n_rv * (sH * dR + sR * (1 - dR)) * (a - b) / (a * sR * e);
        }
    }
    c.t0_rv = -c.n_rv / sR;
    c.t1_rv = -b / api * c.n_rv / sR;
    return c;
}

// Bidirectional forms. r1 = K_R, r3 = K_P, r2 = ρR + ρP; r2R, r2P are the co-stage rates
// at the curb (home rates when the highway is free, FIFO shares of s_H otherwise).
CriticalTimes overlap_bi(const ModelParams& p, ScenarioId s, InitialRegime regime, SubCase which) {
    const double a = p.alpha, b = p.beta, pi = p.pi, api = p.alpha + p.pi, N = p.demand, D = p.cost_gap();
    const double sR = p.s_curb_rv, sP = p.s_curb_pv, sH = p.s_highway, dP = p.delta_pv;
    const CoRates co = co_rates_early(p);
    const double r1 = k_rv(p), r3 = k_pv(p), r2 = co.total();
    CriticalTimes c;
    c.sub_case = which;
    if (which == SubCase::PvEndsFirst) {
        // RV tail after the last PV; the PV curb sees the discounted rate s̃_C^P throughout.
        const double sPt = sP * co.pv / r3;
        double g, m;
        if (regime == InitialRegime::CurbOnly) {
            g = D / b;
            m = 0.0;
        } else {
            m = r1 / sH - 1.0;
            g = D / (a - (a - b) * r1 / sH);
        }
        c.t0_rv = -(N + (1 - dP) * sPt * g * (1 + m)) / (sR + (1 - dP) * sPt);
        c.t0_pv = c.t0_rv + g;
        const double nP = -sPt * (c.t0_pv + m * g);
        c.n_rv = N - nP;
        c.t1_pv = (b * c.t0_pv - (a - b) * m * g) / a;
        c.t1_rv = b / api * c.t0_rv;
        return c;
    }
    if (regime == InitialRegime::CurbOnly && s == ScenarioId::S3) {
        const double r2R = co.rv, r2P = co.pv;
        c.n_rv = (a * b * (api - b) * N * r2R - D * (r1 * (b * pi * r3 - a * (api - b) * r2P) + r3 * r2R * b * (a - b))) /
                 (b * (a * (api - b) * (r2P + r2R) - b * pi * r3));
        c.t0_rv = -api * (c.n_rv * b - D * (r1 - r2R)) / (b * (api - b) * r2R);
        c.t0_pv = c.t0_rv + D / b;
        c.t1_pv = b / a * c.t0_pv;
    } else if (regime == InitialRegime::CurbOnly) {
        const double r2R = sH * co.rv / r2;
        c.n_rv = (a * b * (api - b) * N * r2 * r2R -
                  D * (r1 * sH * (b * pi * r3 - a * (api - b) * r2) + r2 * r2R * (a * (api - b) * r1 + b * (a - b) * r3))) /
                 (b * sH * (a * (api - b) * r2 - b * pi * r3));
        c.t0_rv = -(c.n_rv * b * sH + D * (r2 * r2R - r1 * sH)) / (b * (api - b) / api * r2 * r2R);
        c.t0_pv = c.t0_rv + D / b;
        c.t1_pv = b / a * c.t0_pv;
    } else {
        const double r2R = sH * co.rv / r2;
        const double h = a * sH - (a - b) * r1;
        // The printed denominator carries an extra 1/(α+π−β) on its last factor; corrected here.
        c.n_rv = (a * (api - b) * N * r2 * r2R * h -
                  D * (r1 * sH * sH * (b * pi * r3 - a * (api - b) * r2) + a * api * r2 * r2R * (sH * (sR + sP) - sR * sP))) /
                 (sH * h * (a * (api - b) * r2 - b * pi * r3));
        c.t0_rv = -(c.n_rv * sH * ((a - b) * r1 - a * sH) + D * (r1 * sH - r2 * r2R) * sH) /
                  ((api - b) / api * ((a - b) * r1 - a * sH) * r2 * r2R);
        c.t0_pv = c.t0_rv + D * sH / h;
        c.t1_pv = b / a * c.t0_pv - (a - b) * D * (r1 - sH) / (a * h);
    }
    c.t1_rv = b / api * c.t0_rv;
    return c;
}

}  // namespace

CriticalTimes closed_form_overlap(const ModelParams& p, Spillover mode, InitialRegime regime, SubCase which) {
    const ModelParams q = effective(p, mode);
    if (mode == Spillover::Unidirectional) return overlap_uni(q, regime, which);
    ScenarioId s = regime == InitialRegime::CurbAndHighway ? ScenarioId::S8 : classify(q, mode);
    return overlap_bi(q, s, regime, which);
}

bool consistent(const ModelParams& p, ScenarioId s, const CriticalTimes& c) {
    switch (s) {
        case ScenarioId::S3:
        case ScenarioId::S5:
        case ScenarioId::S8: {
            if (!(lt_tol(c.t0_rv, c.t0_pv) && lt_tol(c.t0_pv, c.t1_rv) && lt_tol(c.t0_pv, c.t1_pv))) return false;
            if (c.sub_case == SubCase::PvEndsFirst) return leq_tol(c.t1_pv, c.t1_rv, 1e-12);
            return lt_tol(c.t1_rv, c.t1_pv);
        }
        case ScenarioId::S7: {
            const double w = (k_rv(p) - p.s_highway) * (c.t1_rv - c.t0_rv) / p.s_highway;
            if (c.sub_case == SubCase::PvQueuedStart)
                return leq_tol(c.t1_rv, c.t0_pv, 1e-12) && leq_tol(c.t0_pv, c.t1_rv + w, 1e-12);
            return lt_tol(c.t1_rv + w, c.t0_pv);
        }
        default: return true;
    }
}

DepartureProfile build_profile(const ModelParams& p0, ScenarioId s, const CriticalTimes& c, Spillover mode) {
    const ModelParams p = effective(p0, mode);
    DepartureProfile prof;
    const double kr = k_rv(p), kp = k_pv(p);
    switch (s) {
        case ScenarioId::S1:
        case ScenarioId::S6: prof.add(c.t0_rv, c.t1_rv, kr, 0); break;
        case ScenarioId::S2:
        case ScenarioId::S4:
        case ScenarioId::S7:
            prof.add(c.t0_rv, c.t1_rv, kr, 0);
            prof.add(c.t0_pv, c.t1_pv, 0, kp);
            break;
        case ScenarioId::S3:
        case ScenarioId::S5:
        case ScenarioId::S8: {
            const CoRates co = co_rates_early(p);
            if (co.rv <= 0 || co.pv <= 0)
                throw RegimeError("co-departure rate nonpositive; outside closed-form validity");
            prof.add(c.t0_rv, c.t0_pv, kr, 0);
            if (c.sub_case == SubCase::PvEndsFirst) {
                prof.add(c.t0_pv, c.t1_pv, co.rv, co.pv);
                prof.add(c.t1_pv, c.t1_rv, kr, 0);
            } else {
                prof.add(c.t0_pv, c.t1_rv, co.rv, co.pv);
                prof.add(c.t1_rv, c.t1_pv, 0, kp);
            }
            break;
        }
        default: throw RegimeError("no schedule for scenario " + std::string(to_string(s)));
    }
    return prof;
}

FluidCurves build_curves(const EquilibriumSolution& sol, const ModelParams& p) {
    return propagate(sol.profile, effective(p, sol.spillover));
}

double cost_spread(const ModelParams& p, const FluidCurves& c, Mode m, double a, double b, int samples, double ref) {
    double lo = 1e300, hi = -1e300;
    for (int i = 0; i <= samples; ++i) {
        double t = a + (b - a) * i / samples;
        double v = generalized_cost(p, m, t, c.travel_time(m, t));
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return (hi - lo) / std::max(1.0, std::abs(ref));
}

namespace {

EquilibriumSolution finish(const ModelParams& p0, ScenarioId s, Spillover mode, CriticalTimes c, const SolveOptions& opt) {
    const ModelParams p = effective(p0, mode);
    EquilibriumSolution sol;
    sol.scenario = s;
    sol.spillover = mode;
    sol.regime = initial_phase_regime(p);
    sol.utilization = classify_utilization(p);
    sol.sub_case = c.sub_case;
    const double N = p.demand;
    if (c.n_rv < 0 || c.n_rv > N) {
        std::ostringstream os;
        os << "N^R=" << c.n_rv << " outside [0, N]; clamped";
        sol.diagnostics.push_back(os.str());
        c.n_rv = std::clamp(c.n_rv, 0.0, N);
    }
    sol.t0_rv = c.t0_rv;
    sol.t1_rv = c.t1_rv;
    sol.n_rv = c.n_rv;
    sol.n_pv = N - c.n_rv;
    sol.has_pv = sol.utilization != UtilizationClass::RvOnly;
    if (sol.has_pv) {
        sol.t0_pv = c.t0_pv;
        sol.t1_pv = c.t1_pv;
    }
    sol.co_rate_rv = k_rv(p);
    sol.co_rate_pv = k_pv(p);
    sol.s_tilde_rv = p.s_curb_rv;
    sol.s_tilde_pv = p.s_curb_pv;
    if (sol.utilization == UtilizationClass::BothOverlapping) {
        const CoRates co = co_rates_early(p);
        sol.co_rate_rv = co.rv;
        sol.co_rate_pv = co.pv;
        sol.s_tilde_rv = p.s_curb_rv * co.rv / (co.rv + p.delta_pv * co.pv);
        sol.s_tilde_pv = p.s_curb_pv * co.pv / (co.pv + p.delta_rv * co.rv);
    }
    if (N <= 0) {
        // Nobody travels: the empty interval sits at t* with no queue, so costs reduce to the fixed parts.
        sol.cost_rv = p.c_r;
        sol.cost_pv = p.pv_fixed_cost;
        return sol;
    }

    sol.profile = build_profile(p, s, c, mode);
    sol.curves = propagate(sol.profile, p);
    sol.cost_rv = generalized_cost(p, Mode::Rv, sol.t0_rv, sol.curves.travel_time(Mode::Rv, sol.t0_rv));
    if (sol.has_pv)
        sol.cost_pv = generalized_cost(p, Mode::Pv, sol.t0_pv, sol.curves.travel_time(Mode::Pv, sol.t0_pv));

    if (opt.self_check) {
        const double ref = sol.cost_rv;
        double spread = cost_spread(p, sol.curves, Mode::Rv, sol.t0_rv, sol.t1_rv, opt.samples, ref);
        double gap = 0.0;
        if (sol.has_pv) {
            spread = std::max(spread, cost_spread(p, sol.curves, Mode::Pv, sol.t0_pv, sol.t1_pv, opt.samples, ref));
            gap = std::abs(sol.cost_rv - sol.cost_pv) / std::max(1.0, std::abs(ref));
        }
        if (!(spread <= opt.cost_tol && gap <= opt.cost_tol)) {
            std::ostringstream os;
            os << "outside closed-form validity for " << to_string(s) << ": cost spread " << spread << ", inter-mode gap "
               << gap << " " << describe(c);
            throw RegimeError(os.str());
        }
    }
    return sol;
}

void require(ScenarioId s, std::initializer_list<ScenarioId> allowed) {
    for (auto a : allowed)
        if (a == s) return;
    throw RegimeError(std::string("scenario mismatch: parameters classify as ") + to_string(s));
}

}  // namespace

EquilibriumSolution solve_single_mode(const ModelParams& p, const SolveOptions& opt) {
    ScenarioId s = classify(p, Spillover::Bidirectional);
    require(s, {ScenarioId::S1, ScenarioId::S6});
    return finish(p, s, Spillover::Bidirectional, closed_form_single(p), opt);
}

EquilibriumSolution solve_separated(const ModelParams& p, const SolveOptions& opt) {
    ScenarioId s = classify(p, Spillover::Bidirectional);
    require(s, {ScenarioId::S2, ScenarioId::S4, ScenarioId::S7});
    if (s != ScenarioId::S7) return finish(p, s, Spillover::Bidirectional, closed_form_separated(p), opt);
    CriticalTimes q = closed_form_s7(p, SubCase::PvQueuedStart);
    if (consistent(p, s, q)) return finish(p, s, Spillover::Bidirectional, q, opt);
    CriticalTimes f = closed_form_s7(p, SubCase::PvFreeStart);
    if (consistent(p, s, f)) return finish(p, s, Spillover::Bidirectional, f, opt);
    throw RegimeError("internal inconsistency: neither S7 case is self-consistent " + describe(q) + " " + describe(f));
}

EquilibriumSolution solve_overlapping(const ModelParams& p, Spillover mode, const SolveOptions& opt) {
    ScenarioId s = classify(p, mode);
    require(s, {ScenarioId::S3, ScenarioId::S5, ScenarioId::S8});
    const InitialRegime regime = initial_phase_regime(p);
    const ModelParams q = effective(p, mode);
    CriticalTimes le = closed_form_overlap(p, mode, regime, SubCase::PvEndsFirst);
    if (consistent(q, s, le)) return finish(p, s, mode, le, opt);
    CriticalTimes gt = closed_form_overlap(p, mode, regime, SubCase::RvEndsFirst);
    if (consistent(q, s, gt)) return finish(p, s, mode, gt, opt);
    throw RegimeError("neither departure ordering is self-consistent " + describe(le) + " " + describe(gt));
}

EquilibriumSolution solve(const ModelParams& p, Spillover mode, const SolveOptions& opt) {
    switch (classify(p, mode)) {
        case ScenarioId::S1:
        case ScenarioId::S6: return solve_single_mode(p, opt);
        case ScenarioId::S2:
        case ScenarioId::S4:
        case ScenarioId::S7: return solve_separated(p, opt);
        default: return solve_overlapping(p, mode, opt);
    }
}

}  // namespace tandem_curb

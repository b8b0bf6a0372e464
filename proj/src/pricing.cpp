#include "tandem_curb/pricing.hpp"

#include <algorithm>
#include <cmath>

#include "tandem_curb/classifier.hpp"

namespace tandem_curb {

const char* to_string(CapacityRegime r) {
    return r == CapacityRegime::CurbWithinHighway ? "curb<=highway" : "curb>highway";
}

CapacityRegime capacity_regime(const ModelParams& p) {
    return leq_tol(p.s_curb_rv + p.s_curb_pv, p.s_highway) ? CapacityRegime::CurbWithinHighway
                                                           : CapacityRegime::CurbExceedsHighway;
}

namespace {

// PV arrival rate at the optimum: full curb capacity, or whatever the highway leaves after RVs.
double pv_rate_at_optimum(const ModelParams& p) {
    return capacity_regime(p) == CapacityRegime::CurbWithinHighway ? p.s_curb_pv : p.s_highway - p.s_curb_rv;
}

void require_bimodal(const ModelParams& p) {
    if (p.demand <= 0) return;
    if (classify_utilization(p) == UtilizationClass::RvOnly)
        throw RegimeError("single-mode pricing out of scope: parameters are RV-only");
}

// ∫_a^b β·(−t) dt for a ≤ b ≤ 0.
double early_delay(double beta, double a, double b) { return beta * (a * a - b * b) / 2.0; }

}  // namespace

double PricingScheme::fee_max_rv() const { return fee_at(*this, Mode::Rv, 0.0); }
double PricingScheme::fee_max_pv() const { return fee_at(*this, Mode::Pv, 0.0); }

DepartureProfile PricingScheme::schedule() const {
    DepartureProfile prof;
    const double a = so_t0_rv, b = so_t0_pv;
    const double e = std::min(so_t1_rv, so_t1_pv), f = std::max(so_t1_rv, so_t1_pv);
    prof.add(a, b, rv_rate, 0);
    prof.add(b, e, rv_rate, pv_rate);
    if (f > e) prof.add(e, f, so_t1_rv > so_t1_pv ? rv_rate : 0, so_t1_rv > so_t1_pv ? 0 : pv_rate);
    return prof;
}

PricingScheme optimal_pricing(const ModelParams& p) {
    require_bimodal(p);
    PricingScheme s;
    s.regime = capacity_regime(p);
    s.base_fee = p.base_fee;
    s.beta = p.beta;
    const double N = p.demand, D = p.cost_gap(), b = p.beta, sR = p.s_curb_rv;
    const double rP = pv_rate_at_optimum(p);
    s.rv_rate = sR;
    s.pv_rate = rP;
    if (s.regime == CapacityRegime::CurbExceedsHighway) s.theta = rP / p.s_curb_pv;
    if (N <= 0) {
        s.so_cost = p.c_r + s.base_fee;
        return s;
    }
    s.so_t0_rv = -(N * b + D * rP) / (b * (sR + rP));
    s.so_t0_pv = -(N * b - D * sR) / (b * (sR + rP));
    if (s.so_t0_pv >= 0) throw RegimeError("single-mode pricing out of scope: no PV at the optimum");
    s.so_n_rv = -s.so_t0_rv * sR;
    s.so_n_pv = N - s.so_n_rv;
    s.so_cost = -b * s.so_t0_rv + p.c_r + s.base_fee;
    return s;
}

PricingScheme optimal_pricing_late(const ModelParams& p) {
    if (!p.has_late()) throw RegimeError("late-arrival pricing requires gamma");
    require_bimodal(p);
    PricingScheme s;
    s.late = true;
    s.regime = capacity_regime(p);
    s.base_fee = p.base_fee;
    const double N = p.demand, D = p.cost_gap(), b = p.beta, g = p.late_value(), sR = p.s_curb_rv;
    const double rP = pv_rate_at_optimum(p);
    s.beta = b;
    s.gamma = g;
    s.rv_rate = sR;
    s.pv_rate = rP;
    if (s.regime == CapacityRegime::CurbExceedsHighway) s.theta = rP / p.s_curb_pv;
    // Arrival windows of length d split around t* so both ends pay f0: early part γd/(β+γ).
    const double extra = D * (b + g) / (b * g);
    const double d_pv = (N - sR * extra) / (sR + rP);
    if (d_pv <= 0) throw RegimeError("single-mode pricing out of scope: no PV at the optimum");
    const double d_rv = d_pv + extra;
    s.so_t0_rv = -g * d_rv / (b + g);
    s.so_t1_rv = b * d_rv / (b + g);
    s.so_t0_pv = -g * d_pv / (b + g);
    s.so_t1_pv = b * d_pv / (b + g);
    s.so_n_rv = d_rv * sR;
    s.so_n_pv = d_pv * rP;
    s.so_cost = -b * s.so_t0_rv + p.c_r + s.base_fee;
    return s;
}

double fee_at(const PricingScheme& s, Mode m, double t) {
    const double t0 = m == Mode::Rv ? s.so_t0_rv : s.so_t0_pv;
    const double t1 = m == Mode::Rv ? s.so_t1_rv : s.so_t1_pv;
    if (t <= t0) return s.base_fee;
    const double peak = s.base_fee - s.beta * t0;
    if (t <= 0) return s.base_fee + s.beta * (t - t0);
    if (!s.late) return peak;
    if (t >= t1) return s.base_fee;
    return peak - s.gamma * t;
}

double social_optimum_cost(const PricingScheme& s, const ModelParams& p) {
    if (p.demand <= 0) return 0.0;
    double sc = s.so_n_rv * p.c_r + s.so_n_pv * p.pv_fixed_cost;
    sc += s.rv_rate * early_delay(s.beta, s.so_t0_rv, 0.0) + s.pv_rate * early_delay(s.beta, s.so_t0_pv, 0.0);
    if (s.late)
        sc += s.gamma * (s.rv_rate * s.so_t1_rv * s.so_t1_rv + s.pv_rate * s.so_t1_pv * s.so_t1_pv) / 2.0;
    return sc;
}

double max_fee_gap(const ModelParams& p) {
    const double D = p.cost_gap(), sR = p.s_curb_rv, sH = p.s_highway;
    if (capacity_regime(p) == CapacityRegime::CurbExceedsHighway)
        return D * (sR + p.s_curb_pv - sH) / (sH - sR);
    // Within-highway regime: the gap can grow until PVs vanish.
    return p.beta * p.demand / sR - D;
}

double social_cost_with_fee_gap(const ModelParams& p, double df) {
    const double N = p.demand, D = p.cost_gap(), b = p.beta, sR = p.s_curb_rv, sH = p.s_highway;
    const double g = (D + df) / b;  // t̂0P − t̂0R
    double t0p, pv_rate, rv_co_rate;
    if (capacity_regime(p) == CapacityRegime::CurbWithinHighway) {
        pv_rate = p.s_curb_pv;
        rv_co_rate = sR;
        t0p = (g * sR - N) / (sR + pv_rate);
    } else {
        const double theta = (sH - sR) * (1.0 + df / D) / p.s_curb_pv;
        pv_rate = theta * p.s_curb_pv;
        rv_co_rate = sH - pv_rate;
        t0p = (g * sR - N) / sH;
    }
    const double t0r = t0p - g;
    const double n_rv = sR * (t0p - t0r) - rv_co_rate * t0p;
    const double n_pv = -pv_rate * t0p;
    return n_rv * p.c_r + n_pv * p.pv_fixed_cost + sR * early_delay(b, t0r, t0p) +
           (rv_co_rate + pv_rate) * early_delay(b, t0p, 0.0);
}

}  // namespace tandem_curb

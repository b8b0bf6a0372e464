#pragma once

#include "tandem_curb/params.hpp"

namespace tandem_curb {

// Mode-alone home departure rates while that mode's curb queue persists.
// Late variants replace β by −γ.
inline double rv_queue_rate(const ModelParams& p, double schedule_slope) {
    double a = p.alpha + p.pi;
    return a * p.s_curb_rv / (a - schedule_slope);
}
inline double pv_queue_rate(const ModelParams& p, double schedule_slope) {
    return p.alpha * p.s_curb_pv / (p.alpha - schedule_slope);
}

struct CoRates {
    double rv = 0;  // home departure rate of RVs
    double pv = 0;
    double total() const { return rv + pv; }
};

// Co-departure rates solving ρR + δP ρP = K_R and ρP + δR ρR = K_P.
inline CoRates co_rates(const ModelParams& p, double k_rv, double k_pv) {
    double den = 1.0 - p.delta_rv * p.delta_pv;
    return {(k_rv - p.delta_pv * k_pv) / den, (k_pv - p.delta_rv * k_rv) / den};
}

inline double k_rv(const ModelParams& p) { return rv_queue_rate(p, p.beta); }
inline double k_pv(const ModelParams& p) { return pv_queue_rate(p, p.beta); }
inline CoRates co_rates_early(const ModelParams& p) { return co_rates(p, k_rv(p), k_pv(p)); }

}  // namespace tandem_curb

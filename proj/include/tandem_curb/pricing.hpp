#pragma once

#include <optional>

#include "tandem_curb/curves.hpp"
#include "tandem_curb/params.hpp"

namespace tandem_curb {

enum class CapacityRegime {
    CurbWithinHighway,  // s_C^R + s_C^P ≤ s_H
    CurbExceedsHighway,
};
const char* to_string(CapacityRegime r);

CapacityRegime capacity_regime(const ModelParams& p);

/// Queue-free social optimum and the time-varying fees that support it.
/// Fees are functions of arrival time, which equals departure time when nothing queues.
struct PricingScheme {
    CapacityRegime regime = CapacityRegime::CurbWithinHighway;
    bool late = false;
    double base_fee = 0;  // f0
    double delta_f = 0;   // initial-fee difference, 0 at the optimum

    double so_t0_rv = 0, so_t0_pv = 0;
    double so_t1_rv = 0, so_t1_pv = 0;  // t* (= 0) unless late arrival is allowed
    double so_n_rv = 0, so_n_pv = 0;
    double so_cost = 0;  // equal generalized cost including f0
    std::optional<double> theta;

    double rv_rate = 0, pv_rate = 0;  // arrival rates at the optimum
    double beta = 0, gamma = 0;

    double fee_max_rv() const;
    double fee_max_pv() const;
    DepartureProfile schedule() const;
};

PricingScheme optimal_pricing(const ModelParams& p);
PricingScheme optimal_pricing_late(const ModelParams& p);

double fee_at(const PricingScheme& s, Mode m, double arrival_time);

// Total cost net of fee transfers.
double social_optimum_cost(const PricingScheme& s, const ModelParams& p);

// Social cost when the PV initial fee exceeds the RV one by df (θ follows df in the
// CurbExceedsHighway regime). Used to check that df = 0 is optimal.
double social_cost_with_fee_gap(const ModelParams& p, double df);
// Largest admissible df for which both modes stay in use without queues.
double max_fee_gap(const ModelParams& p);

}  // namespace tandem_curb

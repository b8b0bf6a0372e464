#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tandem_curb/late.hpp"
#include "tandem_curb/oracle.hpp"
#include "tandem_curb/pricing.hpp"
#include "tandem_curb/solver.hpp"

namespace tandem_curb {

/// System-level results. SC is net of fee transfers; C includes fees.
struct MetricsReport {
    double sc = 0;
    double cost_rv = 0, cost_pv = 0;
    double n_rv = 0, n_pv = 0;
    double tqt_h = 0, tqt_cr = 0, tqt_cp = 0;  // veh·h
    std::optional<double> sc_reduction;       // (SC_e − SC_o)/SC_e, set on priced reports
    std::optional<double> delta_c;            // C_o − C_e

    double tqt_total() const { return tqt_h + tqt_cr + tqt_cp; }
    // Equilibrium cost of whichever mode is used (RV when both are).
    double cost() const { return n_rv > 0 ? cost_rv : cost_pv; }
};

MetricsReport metrics(const EquilibriumSolution& sol, const ModelParams& p);
MetricsReport metrics(const LateSolution& sol, const ModelParams& p);
MetricsReport metrics(const PricingScheme& s, const ModelParams& p);
// Sums experienced costs over every commuter of the profile; fees from the scheme when given.
MetricsReport metrics(const SimulationResult& r, const DepartureProfile& profile, const ModelParams& p,
                      const PricingScheme* fees = nullptr);

// Fills sc_reduction and delta_c of the priced report against the no-toll one.
MetricsReport with_comparison(MetricsReport priced, const MetricsReport& no_toll);

struct Tolerances {
    double rel = 1e-6;        // closed-form identities
    double oracle_rel = 0.01;  // oracle cost comparisons
    double queue_veh = 5.0;    // oracle vs fluid queue profiles
    double dt = kDefaultDt;
    int samples = 100;
    bool run_oracle = true;
};

struct Check {
    std::string name;
    double value = 0;
    double tolerance = 0;
    bool pass = false;
};

struct VerificationReport {
    double intra_spread = 0;       // max relative, over modes
    double inter_gap = 0;          // relative
    double deviation_gain = 0;     // max relative saving from leaving at an unused time
    double oracle_queue_dev = 0;   // veh
    std::vector<Check> checks;

    bool pass() const;
    std::string to_text() const;
    std::string to_csv() const;
};

VerificationReport verify_equilibrium(const EquilibriumSolution& sol, const ModelParams& p, const Tolerances& tol = {});
VerificationReport verify_equilibrium(const LateSolution& sol, const ModelParams& p, const Tolerances& tol = {});
// The optimum is checked with fees included, plus the zero-queue property in the oracle.
VerificationReport verify_equilibrium(const PricingScheme& s, const ModelParams& p, const Tolerances& tol = {});

/// Co-departure rates with the spillover as given against δ^P = 0.
struct UniBiReport {
    ScenarioId scenario_bi = ScenarioId::Unsupported, scenario_uni = ScenarioId::Unsupported;
    double total_bi = 0, total_uni = 0;
    double rv_bi = 0, rv_uni = 0;
    double pv_bi = 0, pv_uni = 0;

    bool total_reduced() const { return total_bi < total_uni; }
    bool rv_reduced() const { return rv_bi < rv_uni; }
    bool pv_increased() const { return pv_bi > pv_uni; }
    bool holds() const { return total_reduced() && rv_reduced() && pv_increased(); }
};

UniBiReport compare_uni_bi(const ModelParams& p);

}  // namespace tandem_curb

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tandem_curb/classifier.hpp"
#include "tandem_curb/curves.hpp"
#include "tandem_curb/params.hpp"

namespace tandem_curb {

enum class SubCase {
    None,
    PvEndsFirst,  // t1^P ≤ t1^R
    RvEndsFirst,  // t1^P > t1^R
    PvQueuedStart,  // S7, first PV meets the RV highway queue
    PvFreeStart,    // S7, highway queue gone before the first PV
};
const char* to_string(SubCase s);

/// Critical times and mode split produced by a closed form, before any schedule is built.
struct CriticalTimes {
    double t0_rv = 0, t1_rv = 0, t0_pv = 0, t1_pv = 0;
    double n_rv = 0;
    SubCase sub_case = SubCase::None;
};

struct RateStep {
    double t0, t1, rate;
};

// Slopes of a cumulative curve, merged into maximal constant steps.
std::vector<RateStep> rate_steps(const PiecewiseCurve& cumulative);

struct EquilibriumSolution {
    ScenarioId scenario = ScenarioId::Unsupported;
    Spillover spillover = Spillover::Bidirectional;
    InitialRegime regime = InitialRegime::CurbOnly;
    UtilizationClass utilization = UtilizationClass::RvOnly;
    SubCase sub_case = SubCase::None;

    double t0_rv = 0, t1_rv = 0;
    bool has_pv = false;
    double t0_pv = 0, t1_pv = 0;
    double n_rv = 0, n_pv = 0;
    double cost_rv = 0, cost_pv = 0;

    // Co-departure quantities (nominal capacities when there is no co-departure stage).
    double co_rate_rv = 0, co_rate_pv = 0;
    double s_tilde_rv = 0, s_tilde_pv = 0;

    DepartureProfile profile;
    FluidCurves curves;
    std::vector<std::string> diagnostics;

    double equilibrium_cost() const { return n_rv > 0 ? cost_rv : cost_pv; }
    std::vector<RateStep> dep_rate_total() const;
    std::vector<RateStep> arr_rate_curb(Mode m) const;
};

struct SolveOptions {
    bool self_check = true;
    double cost_tol = 1e-6;  // relative spread allowed before a point is declared outside validity
    int samples = 100;
};

// Ȧ_H and Ȧ_C^R during the RV-only initial phase.
std::pair<double, double> initial_phase_rates(const ModelParams& p);

CriticalTimes closed_form_single(const ModelParams& p);
CriticalTimes closed_form_separated(const ModelParams& p);  // S2, S4
CriticalTimes closed_form_s7(const ModelParams& p, SubCase which);
CriticalTimes closed_form_overlap(const ModelParams& p, Spillover mode, InitialRegime regime, SubCase which);

// Ordering test used to pick between the two overlap orderings and the two S7 cases.
bool consistent(const ModelParams& p, ScenarioId s, const CriticalTimes& ct);

DepartureProfile build_profile(const ModelParams& p, ScenarioId s, const CriticalTimes& ct, Spillover mode);

FluidCurves build_curves(const EquilibriumSolution& sol, const ModelParams& p);

EquilibriumSolution solve_single_mode(const ModelParams& p, const SolveOptions& opt = {});
EquilibriumSolution solve_separated(const ModelParams& p, const SolveOptions& opt = {});
EquilibriumSolution solve_overlapping(const ModelParams& p, Spillover mode, const SolveOptions& opt = {});
EquilibriumSolution solve(const ModelParams& p, Spillover mode, const SolveOptions& opt = {});

// Max relative spread of generalized cost over sampled departures inside [a, b].
double cost_spread(const ModelParams& p, const FluidCurves& c, Mode m, double a, double b, int samples, double ref);

}  // namespace tandem_curb

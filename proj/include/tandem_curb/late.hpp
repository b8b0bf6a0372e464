#pragma once

#include <string>
#include <vector>

#include "tandem_curb/classifier.hpp"
#include "tandem_curb/curves.hpp"
#include "tandem_curb/params.hpp"
#include "tandem_curb/rates.hpp"
#include "tandem_curb/solver.hpp"

namespace tandem_curb {

// How the on-time departure times sit inside the co-departure interval.
enum class LateOrdering {
    RvLateThroughout,  // (a) t̃^R ≤ t0^P
    RvOnTimeFirst,     // (b) t0^P < t̃^R ≤ t̃^P
    PvOnTimeFirst,     // (c) t̃^P < t̃^R < t1^P
    Impossible,        // t̃^R ≥ t1^P, ruled out by the model
};
const char* to_string(LateOrdering o);

// Queueing row of the late-arrival scenario table.
enum class QueueOnset {
    CurbOnly,          // highway never queues
    CurbThenHighway,   // highway queue starts with the first PV
    HighwayFromStart,  // both bottlenecks queue from the first RV
};
const char* to_string(QueueOnset q);

struct LateSolution {
    ScenarioId scenario = ScenarioId::Unsupported;
    QueueOnset onset = QueueOnset::CurbThenHighway;
    LateOrdering ordering = LateOrdering::PvOnTimeFirst;

    double t0_rv = 0, t1_rv = 0, t0_pv = 0, t1_pv = 0;
    double t_tilde_rv = 0, t_tilde_pv = 0;
    double t_e = 0;  // home time after which the highway queue is gone
    double n_rv = 0, n_pv = 0;
    double cost = 0;

    DepartureProfile profile;
    FluidCurves curves;
    std::vector<std::string> diagnostics;

    std::vector<RateStep> dep_rate_total() const;
    std::vector<RateStep> arr_rate_curb(Mode m) const;
};

// Home departure rates of the five stages: RV alone early, three co-departure stages, RV alone late.
struct LateStageRates {
    double initial_rv;
    CoRates both_early, pv_late, both_late;
    double final_rv;
};
LateStageRates late_stage_rates(const ModelParams& p);

LateOrdering classify_ordering(double t_tilde_rv, double t0_pv, double t_tilde_pv, double t1_pv);
LateOrdering classify_ordering(const LateSolution& s);

// Ordering (c) with the queue starting at the curb; the strict scenario.
LateSolution solve_L7(const ModelParams& p, const SolveOptions& opt = {});
// Ordering (c) with either onset that has a highway queue (L7 or L11).
LateSolution solve_late(const ModelParams& p, const SolveOptions& opt = {});

}  // namespace tandem_curb

#pragma once

#include <string>

#include "tandem_curb/params.hpp"

namespace tandem_curb {

enum class ScenarioId { S1, S2, S3, S4, S5, S6, S7, S8, L7, L11, Unsupported };
enum class InitialRegime { CurbOnly, CurbAndHighway };
enum class UtilizationClass { RvOnly, BothSeparated, BothOverlapping };

const char* to_string(ScenarioId s);
const char* to_string(InitialRegime r);
const char* to_string(UtilizationClass u);
int scenario_number(ScenarioId s);  // 1..8, 0 otherwise

constexpr double kClassifyEps = 1e-9;

// a ≤ b with relative tolerance; used for every non-strict table inequality.
bool leq_tol(double a, double b, double eps = kClassifyEps);

InitialRegime initial_phase_regime(const ModelParams& p);

// Threshold on u^P − c^R above which the two modes do not overlap.
double separation_threshold(const ModelParams& p);
// βN/s_C^R, the single-mode threshold.
double rv_only_threshold(const ModelParams& p);

UtilizationClass classify_utilization(const ModelParams& p);

// Total co-departure rate (home) with both curb queues present.
double co_departure_total(const ModelParams& p, Spillover mode);

ScenarioId classify(const ModelParams& p, Spillover mode);

}  // namespace tandem_curb

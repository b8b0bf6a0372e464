#include "tandem_curb/classifier.hpp"

#include <algorithm>
#include <cmath>

#include "tandem_curb/rates.hpp"

namespace tandem_curb {

const char* to_string(ScenarioId s) {
    switch (s) {
        case ScenarioId::S1: return "S1";
        case ScenarioId::S2: return "S2";
        case ScenarioId::S3: return "S3";
        case ScenarioId::S4: return "S4";
        case ScenarioId::S5: return "S5";
        case ScenarioId::S6: return "S6";
        case ScenarioId::S7: return "S7";
        case ScenarioId::S8: return "S8";
        case ScenarioId::L7: return "L7";
        case ScenarioId::L11: return "L11";
        case ScenarioId::Unsupported: return "unsupported";
    }
    return "?";
}

const char* to_string(InitialRegime r) {
    return r == InitialRegime::CurbOnly ? "CurbOnly" : "CurbAndHighway";
}

const char* to_string(UtilizationClass u) {
    switch (u) {
        case UtilizationClass::RvOnly: return "RvOnly";
        case UtilizationClass::BothSeparated: return "BothSeparated";
        case UtilizationClass::BothOverlapping: return "BothOverlapping";
    }
    return "?";
}

int scenario_number(ScenarioId s) {
    int v = static_cast<int>(s) + 1;
    return v <= 8 ? v : 0;
}

bool leq_tol(double a, double b, double eps) {
    return a <= b + eps * std::max({1.0, std::abs(a), std::abs(b)});
}

InitialRegime initial_phase_regime(const ModelParams& p) {
    double ratio = p.s_curb_rv / p.s_highway;
    double bound = (p.alpha + p.pi - p.beta) / (p.alpha + p.pi);
    return leq_tol(ratio, bound) ? InitialRegime::CurbOnly : InitialRegime::CurbAndHighway;
}

double rv_only_threshold(const ModelParams& p) { return p.beta * p.demand / p.s_curb_rv; }

double separation_threshold(const ModelParams& p) {
    const double a = p.alpha, b = p.beta, api = p.alpha + p.pi, N = p.demand;
    const double sR = p.s_curb_rv, sP = p.s_curb_pv, sH = p.s_highway;
    if (initial_phase_regime(p) == InitialRegime::CurbOnly)
        return N * b * (api - b) / (b * sP + api * sR);
    return N * (a * (api - b) * sH - api * (a - b) * sR) / (api * (sH * (sR + sP) - sR * sP));
}

UtilizationClass classify_utilization(const ModelParams& p) {
    double gap = p.cost_gap();
    if (leq_tol(rv_only_threshold(p), gap)) return UtilizationClass::RvOnly;
    if (leq_tol(separation_threshold(p), gap)) return UtilizationClass::BothSeparated;
    return UtilizationClass::BothOverlapping;
}

double co_departure_total(const ModelParams& p, Spillover mode) {
    return co_rates_early(effective(p, mode)).total();
}

namespace {

// S3 iff the co-departure stage keeps the highway uncongested.
bool curb_only_overlap(const ModelParams& p, Spillover mode) {
    const double a = p.alpha, b = p.beta, api = p.alpha + p.pi;
    const double sR = p.s_curb_rv, sP = p.s_curb_pv, sH = p.s_highway, dR = p.delta_rv;
    if (mode == Spillover::Unidirectional || p.delta_pv == 0.0) {
        double bound = (a - b) / a - (1 - dR) * api * (a - b) * sR / (a * (api - b) * sH);
        return leq_tol(sP / sH, bound);
    }
    const double dP = p.delta_pv, den = 1 - dR * dP;
    double need = api * (1 - dR) * sR / ((api - b) * den) + a * (1 - dP) * sP / ((a - b) * den);
    return leq_tol(need, sH);
}

}  // namespace

ScenarioId classify(const ModelParams& p, Spillover mode) {
    const UtilizationClass u = classify_utilization(p);
    if (initial_phase_regime(p) == InitialRegime::CurbOnly) {
        switch (u) {
            case UtilizationClass::RvOnly: return ScenarioId::S1;
            case UtilizationClass::BothSeparated:
                return leq_tol(p.s_curb_pv / p.s_highway, (p.alpha - p.beta) / p.alpha) ? ScenarioId::S2
                                                                                         : ScenarioId::S4;
            case UtilizationClass::BothOverlapping:
                return curb_only_overlap(p, mode) ? ScenarioId::S3 : ScenarioId::S5;
        }
    }
    switch (u) {
        case UtilizationClass::RvOnly: return ScenarioId::S6;
        case UtilizationClass::BothSeparated: return ScenarioId::S7;
        case UtilizationClass::BothOverlapping: return ScenarioId::S8;
    }
    return ScenarioId::Unsupported;
}

}  // namespace tandem_curb

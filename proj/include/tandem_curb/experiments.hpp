#pragma once

#include <string>
#include <vector>

#include "tandem_curb/metrics.hpp"

namespace tandem_curb {

/// Evenly spaced values of one parameter, endpoints included.
struct Axis {
    std::string name;  // s_curb_rv, s_curb_pv, s_highway, cost_gap, demand, delta_rv, delta_pv, c_r, ...
    double lo = 0, hi = 0;
    int n = 2;

    std::vector<double> values() const;
};

// Parses "name=lo:hi:n" or "name=lo:hi/step" (step must divide the range).
Axis parse_axis(const std::string& text);

struct SweepSpec {
    std::vector<Axis> axes;
    ModelParams base;
    Spillover spillover = Spillover::Bidirectional;
    bool late = false;
    unsigned threads = 0;  // 0: hardware concurrency
};

// Sets a named parameter on a copy; unknown names throw std::invalid_argument.
void set_parameter(ModelParams& p, const std::string& name, double value);

/// A CSV-ready table. Cells are preformatted so output is byte-identical across runs.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string to_csv() const;
    int column(const std::string& name) const;  // -1 when absent
};

// Columns: axes..., scenario, status, message.
Table sweep_scenario_map(const SweepSpec& spec);
// Columns: axes..., scenario, SC_e, C_e, NR_e, SC_o, C_o, NR_o, dSC_rel, dC, status, message.
Table sweep_metrics(const SweepSpec& spec);
// Columns as sweep_metrics plus TQT_H, TQT_CR, TQT_CP of the no-toll equilibrium.
Table sweep_scalar(const SweepSpec& spec);

struct CaseLine {
    std::string label;
    std::string value, target;
    double deviation = 0;  // relative, or minutes for clock entries
    bool minutes = false;
};

struct CaseReport {
    ScenarioId scenario = ScenarioId::Unsupported;
    MetricsReport no_toll, priced;
    std::vector<CaseLine> before, after;
    std::string to_text() const;
};

// Hong Kong before/after comparison against the published table.
CaseReport run_case_hk(const ModelParams& p);
CaseReport run_case_hk();

}  // namespace tandem_curb

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tandem_curb {

// Which standing assumption a parameter set violates.
enum class Assumption {
    MissingField,
    NonFinite,
    BetaBelowAlpha,
    PositiveBeta,
    CurbRvBelowHighway,
    CurbPvBelowHighway,
    PositiveCapacity,
    PvCostAboveRvCost,
    DeltaRvRange,
    DeltaPvRange,
    PositiveGamma,
    NonNegativeDemand,
    NonNegativeCost,
    UnknownKey,
    BadValue,
};

const char* assumption_name(Assumption a);

class ValidationError : public std::runtime_error {
public:
    ValidationError(Assumption a, const std::string& msg) : std::runtime_error(msg), assumption_(a) {}
    Assumption assumption() const { return assumption_; }

private:
    Assumption assumption_;
};

// Thrown when a parameter point falls outside the region a closed form covers.
class RegimeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Spillover { Unidirectional, Bidirectional };

/// Validated corridor parameters. All rates per hour, all times in hours
/// relative to the preferred arrival time t* (t* itself is kept only for display).
struct ModelParams {
    double alpha = 0;
    double beta = 0;
    std::optional<double> gamma;
    double pi = 0;  // per hour
    double lambda_dist = 0;
    double trip_length = 0;
    double rv_flag_fee = 0;
    double pv_fixed_cost = 0;
    double demand = 0;
    double preferred_arrival = 9.0;  // clock hours, display only
    double s_highway = 0;
    double s_curb_rv = 0;
    double s_curb_pv = 0;
    double delta_rv = 0;
    double delta_pv = 0;
    double base_fee = 0;

    double c_r = 0;  // λL + u^R unless overridden
    bool c_r_overridden = false;
    std::vector<std::string> warnings;

    double cost_gap() const { return pv_fixed_cost - c_r; }  // u^P − c^R
    bool has_late() const { return gamma.has_value(); }
    double late_value() const { return gamma.value_or(0.0); }
};

// Raw, unvalidated field values. Exactly one of pi_per_hour / pi_per_minute may be set.
struct RawConfig {
    std::optional<double> alpha, beta, gamma, pi_per_hour, pi_per_minute, lambda_dist, trip_length,
        rv_flag_fee, pv_fixed_cost, demand, preferred_arrival, s_highway, s_curb_rv, s_curb_pv,
        delta_rv, delta_pv, base_fee, rv_fixed_cost;
};

double fixed_cost_rv(double lambda_dist, double trip_length, double rv_flag_fee);

inline double per_minute_to_per_hour(double v) { return v * 60.0; }
inline double per_hour_to_per_minute(double v) { return v / 60.0; }

ModelParams build_parameters(const RawConfig& raw, bool late_mode = false);

// Revalidate after programmatic edits (sweeps mutate a copy and call this).
ModelParams revalidate(ModelParams p, bool late_mode = false);

// JSON text with snake_case keys; unknown keys are rejected. "pi" is per hour,
// "pi_per_minute" is the Table-style alternative. "preferred_arrival" accepts "HH:MM".
RawConfig parse_config_json(const std::string& text);
RawConfig load_config_file(const std::string& path);

// Parameters with δ^P forced to zero when the unidirectional model is requested.
ModelParams effective(const ModelParams& p, Spillover mode);

std::string format_clock(double rel_hours, double preferred_arrival_clock, bool seconds = false);
double parse_clock(const std::string& hhmm);

// Bundled parameter sets.
RawConfig hong_kong_raw();
RawConfig synthetic_raw();
RawConfig late_example_raw();
ModelParams hong_kong();
ModelParams synthetic(double s_curb_rv, double s_curb_pv, double cost_gap, double s_highway = 2500.0);

}  // namespace tandem_curb

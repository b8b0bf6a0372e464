#include "tandem_curb/params.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace tandem_curb {

const char* assumption_name(Assumption a) {
    switch (a) {
        case Assumption::MissingField: return "missing-field";
        case Assumption::NonFinite: return "non-finite";
        case Assumption::BetaBelowAlpha: return "beta-below-alpha";
        case Assumption::PositiveBeta: return "positive-beta";
        case Assumption::CurbRvBelowHighway: return "curb-rv-below-highway";
        case Assumption::CurbPvBelowHighway: return "curb-pv-below-highway";
        case Assumption::PositiveCapacity: return "positive-capacity";
        case Assumption::PvCostAboveRvCost: return "pv-cost-above-rv-cost";
        case Assumption::DeltaRvRange: return "delta-rv-range";
        case Assumption::DeltaPvRange: return "delta-pv-range";
        case Assumption::PositiveGamma: return "positive-gamma";
        case Assumption::NonNegativeDemand: return "non-negative-demand";
        case Assumption::NonNegativeCost: return "non-negative-cost";
        case Assumption::UnknownKey: return "unknown-key";
        case Assumption::BadValue: return "bad-value";
    }
    return "unknown";
}

double fixed_cost_rv(double lambda_dist, double trip_length, double rv_flag_fee) {
    return lambda_dist * trip_length + rv_flag_fee;
}

namespace {

double need(const std::optional<double>& v, const char* name) {
    if (!v) throw ValidationError(Assumption::MissingField, std::string("missing required field ") + name);
    if (!std::isfinite(*v)) throw ValidationError(Assumption::NonFinite, std::string(name) + " must be finite");
    return *v;
}

double opt(const std::optional<double>& v, const char* name, double fallback) {
    if (!v) return fallback;
    if (!std::isfinite(*v)) throw ValidationError(Assumption::NonFinite, std::string(name) + " must be finite");
    return *v;
}

}  // namespace

ModelParams revalidate(ModelParams p, bool late_mode) {
    p.warnings.clear();
    if (!(p.beta > 0)) throw ValidationError(Assumption::PositiveBeta, "requires β > 0");
    if (!(p.beta < p.alpha)) throw ValidationError(Assumption::BetaBelowAlpha, "requires β < α");
    if (p.pi < 0) throw ValidationError(Assumption::NonNegativeCost, "requires π ≥ 0");
    if (!(p.s_highway > 0) || !(p.s_curb_rv > 0) || !(p.s_curb_pv > 0))
        throw ValidationError(Assumption::PositiveCapacity, "requires positive service rates");
    if (!(p.s_curb_rv < p.s_highway)) throw ValidationError(Assumption::CurbRvBelowHighway, "requires s_C^R < s_H");
    if (!(p.s_curb_pv < p.s_highway)) throw ValidationError(Assumption::CurbPvBelowHighway, "requires s_C^P < s_H");
    if (p.demand < 0) throw ValidationError(Assumption::NonNegativeDemand, "requires N ≥ 0");
    if (!p.c_r_overridden) {
        if (p.lambda_dist < 0 || p.trip_length < 0 || p.rv_flag_fee < 0)
            throw ValidationError(Assumption::NonNegativeCost, "requires λ, L, u^R ≥ 0");
        p.c_r = fixed_cost_rv(p.lambda_dist, p.trip_length, p.rv_flag_fee);
    }
    if (!(p.pv_fixed_cost > p.c_r)) throw ValidationError(Assumption::PvCostAboveRvCost, "requires u^P > c^R");
    if (!(p.delta_rv >= 0 && p.delta_rv < 1)) throw ValidationError(Assumption::DeltaRvRange, "requires δ^R ∈ (0,1)");
    if (p.delta_rv == 0) p.warnings.push_back("δ^R = 0 lies outside the stated range (0,1)");
    if (!(p.delta_pv >= 0 && p.delta_pv < 1)) throw ValidationError(Assumption::DeltaPvRange, "requires δ^P ∈ [0,1)");
    if (late_mode && !p.gamma) throw ValidationError(Assumption::MissingField, "late-arrival mode requires γ");
    if (p.gamma) {
        if (!std::isfinite(*p.gamma)) throw ValidationError(Assumption::NonFinite, "γ must be finite");
        if (!(*p.gamma > 0)) throw ValidationError(Assumption::PositiveGamma, "requires γ > 0");
        if (*p.gamma <= p.beta) p.warnings.push_back("γ ≤ β");
    }
    return p;
}

ModelParams build_parameters(const RawConfig& raw, bool late_mode) {
    ModelParams p;
    p.alpha = need(raw.alpha, "alpha");
    p.beta = need(raw.beta, "beta");
    if (raw.pi_per_hour && raw.pi_per_minute)
        throw ValidationError(Assumption::BadValue, "give either pi or pi_per_minute, not both");
    if (raw.pi_per_minute)
        p.pi = per_minute_to_per_hour(need(raw.pi_per_minute, "pi_per_minute"));
    else
        p.pi = need(raw.pi_per_hour, "pi");
    p.pv_fixed_cost = need(raw.pv_fixed_cost, "pv_fixed_cost");
    p.demand = need(raw.demand, "demand");
    p.s_highway = need(raw.s_highway, "s_highway");
    p.s_curb_rv = need(raw.s_curb_rv, "s_curb_rv");
    p.s_curb_pv = need(raw.s_curb_pv, "s_curb_pv");
    p.delta_rv = need(raw.delta_rv, "delta_rv");
    p.delta_pv = need(raw.delta_pv, "delta_pv");
    p.preferred_arrival = opt(raw.preferred_arrival, "preferred_arrival", 9.0);
    p.base_fee = opt(raw.base_fee, "base_fee", 0.0);
    if (raw.rv_fixed_cost) {
        p.c_r = need(raw.rv_fixed_cost, "rv_fixed_cost");
        p.c_r_overridden = true;
        p.lambda_dist = opt(raw.lambda_dist, "lambda_dist", 0.0);
        p.trip_length = opt(raw.trip_length, "trip_length", 0.0);
        p.rv_flag_fee = opt(raw.rv_flag_fee, "rv_flag_fee", 0.0);
    } else {
        p.lambda_dist = need(raw.lambda_dist, "lambda_dist");
        p.trip_length = need(raw.trip_length, "trip_length");
        p.rv_flag_fee = need(raw.rv_flag_fee, "rv_flag_fee");
    }
    if (raw.gamma) p.gamma = *raw.gamma;
    return revalidate(std::move(p), late_mode);
}

ModelParams effective(const ModelParams& p, Spillover mode) {
    if (mode == Spillover::Bidirectional) return p;
    ModelParams q = p;
    q.delta_pv = 0.0;
    return q;
}

double parse_clock(const std::string& hhmm) {
    int h = 0, m = 0, s = 0;
    int n = std::sscanf(hhmm.c_str(), "%d:%d:%d", &h, &m, &s);
    if (n < 2 || m < 0 || m >= 60 || s < 0 || s >= 60)
        throw ValidationError(Assumption::BadValue, "bad clock time '" + hhmm + "'");
    return h + m / 60.0 + s / 3600.0;
}

std::string format_clock(double rel_hours, double preferred_arrival_clock, bool seconds) {
    double total = (preferred_arrival_clock + rel_hours) * 3600.0;
    long long secs = std::llround(seconds ? total : std::round(total / 60.0) * 60.0);
    bool neg = secs < 0;
    if (neg) secs = -secs;
    char buf[32];
    if (seconds)
        std::snprintf(buf, sizeof buf, "%s%lld:%02lld:%02lld", neg ? "-" : "", secs / 3600, (secs / 60) % 60, secs % 60);
    else
        std::snprintf(buf, sizeof buf, "%s%lld:%02lld", neg ? "-" : "", secs / 3600, (secs / 60) % 60);
    return buf;
}

RawConfig parse_config_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(Assumption::BadValue, std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ValidationError(Assumption::BadValue, "config must be a JSON object");
    RawConfig r;
    struct Slot {
        const char* key;
        std::optional<double> RawConfig::*field;
    };
    static const Slot slots[] = {
        {"alpha", &RawConfig::alpha},
        {"beta", &RawConfig::beta},
        {"gamma", &RawConfig::gamma},
        {"pi", &RawConfig::pi_per_hour},
        {"pi_per_minute", &RawConfig::pi_per_minute},
        {"lambda_dist", &RawConfig::lambda_dist},
        {"trip_length", &RawConfig::trip_length},
        {"rv_flag_fee", &RawConfig::rv_flag_fee},
        {"pv_fixed_cost", &RawConfig::pv_fixed_cost},
        {"demand", &RawConfig::demand},
        {"preferred_arrival", &RawConfig::preferred_arrival},
        {"s_highway", &RawConfig::s_highway},
        {"s_curb_rv", &RawConfig::s_curb_rv},
        {"s_curb_pv", &RawConfig::s_curb_pv},
        {"delta_rv", &RawConfig::delta_rv},
        {"delta_pv", &RawConfig::delta_pv},
        {"base_fee", &RawConfig::base_fee},
        {"rv_fixed_cost", &RawConfig::rv_fixed_cost},
    };
    for (auto it = j.begin(); it != j.end(); ++it) {
        const Slot* hit = nullptr;
        for (const auto& s : slots)
            if (it.key() == s.key) hit = &s;
        if (!hit) throw ValidationError(Assumption::UnknownKey, "unknown config key '" + it.key() + "'");
        if (it->is_null()) continue;
        if (it.key() == "preferred_arrival" && it->is_string()) {
            r.*(hit->field) = parse_clock(it->get<std::string>());
        } else if (it->is_number()) {
            r.*(hit->field) = it->get<double>();
        } else {
            throw ValidationError(Assumption::BadValue, "config key '" + it.key() + "' must be a number");
        }
    }
    return r;
}

RawConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError(Assumption::BadValue, "cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_json(ss.str());
}

RawConfig hong_kong_raw() {
    RawConfig r;
    r.alpha = 120;
    r.beta = 100;
    r.lambda_dist = 9.5;
    r.pi_per_minute = 1.9;
    r.rv_flag_fee = 27;
    r.pv_fixed_cost = 200;
    r.trip_length = 9;
    r.demand = 7158;
    r.preferred_arrival = 9.0;
    r.s_highway = 5700;
    r.s_curb_pv = 2100;
    r.s_curb_rv = 1800;
    r.delta_rv = 0.1;
    r.delta_pv = 0.1;
    return r;
}

RawConfig synthetic_raw() {
    RawConfig r;
    r.alpha = 6.4;
    r.beta = 3.9;
    r.pi_per_hour = 8.0;
    r.lambda_dist = 0;
    r.trip_length = 0;
    r.rv_flag_fee = 0;
    r.pv_fixed_cost = 7.5;
    r.demand = 3000;
    r.preferred_arrival = 9.0;
    r.s_highway = 2500;
    r.s_curb_rv = 900;
    r.s_curb_pv = 900;
    r.delta_rv = 0.1;
    r.delta_pv = 0.1;
    r.base_fee = 0;
    return r;
}

RawConfig late_example_raw() {
    RawConfig r;
    r.alpha = 4;
    r.beta = 3;
    r.gamma = 4.8;
    r.pi_per_hour = 4;
    r.rv_fixed_cost = 0;
    r.pv_fixed_cost = 1;
    r.demand = 6500;
    r.preferred_arrival = 9.0;
    r.s_highway = 5500;
    r.s_curb_rv = 4000;
    r.s_curb_pv = 4500;
    r.delta_rv = 0.3;
    r.delta_pv = 0.3;
    return r;
}

ModelParams hong_kong() { return build_parameters(hong_kong_raw()); }

ModelParams synthetic(double s_curb_rv, double s_curb_pv, double cost_gap, double s_highway) {
    RawConfig r = synthetic_raw();
    r.s_curb_rv = s_curb_rv;
    r.s_curb_pv = s_curb_pv;
    r.pv_fixed_cost = cost_gap;
    r.s_highway = s_highway;
    return build_parameters(r);
}

}  // namespace tandem_curb

#pragma once

#include <functional>
#include <vector>

#include "tandem_curb/params.hpp"

namespace tandem_curb {

enum class Mode { Rv, Pv };

/// Continuous piecewise-linear function given by breakpoints; constant outside them.
class PiecewiseCurve {
public:
    PiecewiseCurve() = default;
    PiecewiseCurve(std::vector<double> t, std::vector<double> v);

    // Appends a breakpoint; times must be nondecreasing. Near-duplicate times merge.
    void push(double t, double v);

    double operator()(double t) const;
    // Right derivative (slope of the segment starting at or after t).
    double slope(double t) const;
    double integral(double a, double b) const;
    double integral() const;
    // Smallest t with value ≥ y, for nondecreasing curves.
    double inverse(double y) const;
    double max_value() const;
    double min_value() const;

    bool empty() const { return t_.empty(); }
    std::size_t size() const { return t_.size(); }
    const std::vector<double>& times() const { return t_; }
    const std::vector<double>& values() const { return v_; }
    double front_time() const { return t_.front(); }
    double back_time() const { return t_.back(); }
    std::vector<double> slopes() const;

    static PiecewiseCurve combine(const PiecewiseCurve& a, const PiecewiseCurve& b,
                                  const std::function<double(double, double)>& f);

private:
    std::vector<double> t_, v_;
};

struct DepartureSegment {
    double t0 = 0, t1 = 0;
    double rv = 0, pv = 0;  // home departure rates, veh/h
};

/// Piecewise-constant home departure rates per mode.
struct DepartureProfile {
    std::vector<DepartureSegment> segments;

    void add(double t0, double t1, double rv, double pv);
    double start() const;
    double end() const;
    double total(Mode m) const;
    double total() const { return total(Mode::Rv) + total(Mode::Pv); }
    double rate(Mode m, double t) const;
    double cumulative(Mode m, double t) const;
    std::vector<double> breakpoints() const;
};

/// Exact fluid solution of the two tandem point queues for a given profile.
struct FluidCurves {
    PiecewiseCurve A_H, A_H_rv, A_H_pv;  // home departures = highway arrivals
    PiecewiseCurve exit_H;               // home time -> highway exit time
    PiecewiseCurve D_H;
    PiecewiseCurve A_CR, A_CP;  // curb arrivals, clock time
    PiecewiseCurve V_R, V_P;    // curb work backlog (hours) seen by a curb arrival at that time
    PiecewiseCurve D_CR, D_CP;
    PiecewiseCurve q_H, q_CR, q_CP;  // vehicles in queue, clock time

    double highway_wait(double t) const { return exit_H(t) - t; }
    double curb_wait(Mode m, double curb_time) const { return m == Mode::Rv ? V_R(curb_time) : V_P(curb_time); }
    double travel_time(Mode m, double t) const;
    double horizon_end() const;
};

FluidCurves propagate(const DepartureProfile& profile, const ModelParams& p);

// Generalized cost of a commuter of mode m leaving home at t with total travel time T.
// Late arrival uses γ; in no-late mode arrival after t* is treated as infeasible (+inf).
double generalized_cost(const ModelParams& p, Mode m, double t, double travel_time, double fee = 0.0);

}  // namespace tandem_curb

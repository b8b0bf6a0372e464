#pragma once

#include <vector>

#include "tandem_curb/curves.hpp"
#include "tandem_curb/params.hpp"

namespace tandem_curb {

constexpr double kDefaultDt = 1e-3;

/// Discrete-time run of the tandem point queues. Index i is clock time t0 + i·dt.
/// Curb queues are kept in service-equivalent vehicles: a mode-m arrival adds one unit,
/// plus δ units per other-mode arrival while the other curb is queued (the spillover).
struct SimulationResult {
    double dt = kDefaultDt;
    double t0 = 0;
    double cap_rv = 0, cap_pv = 0;
    std::vector<double> A_H, D_H;      // cumulative highway arrivals / exits
    std::vector<double> A_H_rv;        // cumulative RV highway arrivals
    std::vector<double> A_CR, A_CP;    // cumulative curb arrivals
    std::vector<double> D_CR, D_CP;    // cumulative curb exits (FIFO)
    std::vector<double> E_R, E_P;      // curb backlog in service-equivalent vehicles
    std::vector<double> q_H, q_CR, q_CP;

    std::size_t size() const { return A_H.size(); }
    double time(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
    double horizon_end() const { return time(size() - 1); }

    // Linear interpolation of a grid series at clock time t.
    double sample(const std::vector<double>& series, double t) const;
    double highway_wait(double home_time) const;
    double curb_wait(Mode m, double curb_time) const;
    double travel_time(Mode m, double home_time) const;
    double max_queue() const;
};

SimulationResult simulate(const DepartureProfile& profile, const ModelParams& p, double dt = kDefaultDt);

// Generalized cost a commuter of mode m leaving home at t experiences in the simulation.
double experienced_cost(const SimulationResult& r, const ModelParams& p, Mode m, double t, double fee = 0.0);

}  // namespace tandem_curb

#include <doctest.h>

#include <cmath>

#include "support.hpp"

using namespace tandem_curb;
using tsupport::close_rel;

namespace {

ModelParams corridor(double sH, double sR, double sP, double dR = 0.1, double dP = 0.1) {
    RawConfig r = synthetic_raw();
    r.s_highway = sH;
    r.s_curb_rv = sR;
    r.s_curb_pv = sP;
    r.delta_rv = dR;
    r.delta_pv = dP;
    return build_parameters(r);
}

// First and last grid time with a queue above eps.
std::pair<double, double> queue_span(const SimulationResult& r, const std::vector<double>& q, double eps) {
    double a = 1e9, b = -1e9;
    for (std::size_t i = 0; i < q.size(); ++i)
        if (q[i] > eps) {
            a = std::min(a, r.time(i));
            b = std::max(b, r.time(i));
        }
    return {a, b};
}

}  // namespace

TEST_CASE("inflow below every capacity never queues") {
    const ModelParams p = corridor(2500, 900, 900);
    DepartureProfile prof;
    prof.add(-1, 0, 800, 800);
    const SimulationResult r = simulate(prof, p, 1e-3);
    CHECK(r.max_queue() < 1e-9);
    CHECK(r.D_CR.back() == doctest::Approx(800));
    CHECK(r.D_CP.back() == doctest::Approx(800));
    CHECK(r.travel_time(Mode::Rv, -0.5) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("a single overloaded bottleneck builds a triangular queue") {
    const ModelParams p = corridor(2500, 1000, 900);
    DepartureProfile prof;
    prof.add(-2, -1, 2000, 0);
    const double dt = 1e-3;
    const SimulationResult r = simulate(prof, p, dt);
    CHECK(r.max_queue() == doctest::Approx(1000).epsilon(1e-3));
    const auto [on, off] = queue_span(r, r.q_CR, 1e-6);
    CHECK(std::abs(on + 2) <= 2 * dt);
    CHECK(std::abs(off - 0) <= 2 * dt);
    // The last vehicle waits one hour.
    CHECK(r.travel_time(Mode::Rv, -1.0 - 1e-9) == doctest::Approx(1.0).epsilon(5e-3));
    CHECK(std::abs(r.sample(r.q_H, -1.5)) < 1e-9);
}

TEST_CASE("queues stay FIFO-consistent and nonnegative") {
    const ModelParams p = hong_kong();
    const EquilibriumSolution s = solve(p, Spillover::Bidirectional);
    const SimulationResult r = simulate(s.profile, p, 1e-3);
    for (std::size_t i = 1; i < r.size(); ++i) {
        CHECK(r.q_H[i] >= -1e-9);
        CHECK(r.q_CR[i] >= -1e-9);
        CHECK(r.q_CP[i] >= -1e-9);
        CHECK(r.D_H[i] >= r.D_H[i - 1] - 1e-9);
        CHECK(r.D_H[i] <= r.A_H[i] + 1e-9);
        CHECK(r.D_CR[i] <= r.A_CR[i] + 1e-9);
    }
    CHECK(r.D_CR.back() + r.D_CP.back() == doctest::Approx(p.demand));
}

TEST_CASE("Hong Kong equilibrium replayed in discrete time") {
    const ModelParams p = hong_kong();
    const EquilibriumSolution s = solve(p, Spillover::Bidirectional);
    const double dt = 1e-3;
    const SimulationResult r = simulate(s.profile, p, dt);

    const auto [on, off] = queue_span(r, r.q_H, 1e-6);
    double f_on = 1e9, f_off = -1e9;
    for (double t = -3; t <= 0; t += dt / 10)
        if (s.curves.q_H(t) > 1e-6) {
            f_on = std::min(f_on, t);
            f_off = std::max(f_off, t);
        }
    CHECK(std::abs(on - f_on) <= 2 * dt);
    CHECK(std::abs(off - f_off) <= 2 * dt);

    // Experienced cost matches the equilibrium cost within 1% for both modes.
    CHECK(close_rel(experienced_cost(r, p, Mode::Rv, s.t0_rv), 351.27, 0.01));
    CHECK(close_rel(experienced_cost(r, p, Mode::Pv, 0.5 * (s.t0_pv + s.t1_pv)), s.cost_pv, 0.01));

    // Library oracle and the independent packet oracle agree along the RV interval.
    const tsupport::PacketOracle o(s.profile, p, dt);
    for (int i = 0; i <= 20; ++i) {
        const double t = s.t0_rv + (s.t1_rv - s.t0_rv) * i / 20.0;
        CHECK(std::abs(r.travel_time(Mode::Rv, t) - o.travel_time(Mode::Rv, t)) < 5 * dt);
    }
    CHECK(std::abs(r.max_queue() - o.max_queue()) < 5.0);
}

TEST_CASE("priced Hong Kong schedule replays without queues") {
    const ModelParams p = hong_kong();
    const PricingScheme s = optimal_pricing(p);
    const SimulationResult r = simulate(s.schedule(), p, 1e-3);
    CHECK(r.max_queue() <= p.s_highway * 1e-3);
    const double mid = 0.5 * (s.so_t0_pv - 0.0);
    CHECK(close_rel(experienced_cost(r, p, Mode::Rv, mid, fee_at(s, Mode::Rv, mid)), 342.12, 0.01));
    CHECK(close_rel(experienced_cost(r, p, Mode::Pv, mid, fee_at(s, Mode::Pv, mid)), s.so_cost, 1e-3));
}

TEST_CASE("spillover only slows a curb while the other curb is queued") {
    // PV curb never saturates: RVs see no spillover even with δ^P large.
    const ModelParams p = corridor(2500, 500, 2000, 0.1, 0.9);
    DepartureProfile prof;
    prof.add(-1, 0, 800, 500);
    const SimulationResult r = simulate(prof, p, 1e-3);
    CHECK(r.sample(r.q_CP, -0.5) < 1e-6);
    CHECK(r.sample(r.q_CR, -0.0) == doctest::Approx(300).epsilon(1e-3));
    const tsupport::PacketOracle o(prof, p, 1e-3);
    CHECK(o.travel_time(Mode::Rv, -0.01) == doctest::Approx(r.travel_time(Mode::Rv, -0.01)).epsilon(1e-2));
}

TEST_CASE("step size guard") {
    const ModelParams p = hong_kong();
    DepartureProfile prof;
    prof.add(-1, 0, 100, 100);
    CHECK_THROWS(simulate(prof, p, 0.0));
    CHECK_THROWS(simulate(prof, p, -1e-3));
}

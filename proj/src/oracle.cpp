#include "tandem_curb/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tandem_curb {

namespace {

constexpr double kEmpty = 1e-9;  // vehicles

// Smallest clock time at which a nondecreasing grid series reaches y.
double first_reach(const SimulationResult& r, const std::vector<double>& s, double y) {
    auto it = std::lower_bound(s.begin(), s.end(), y - 1e-12);
    if (it == s.end()) return r.horizon_end();
    std::size_t k = static_cast<std::size_t>(it - s.begin());
    if (k == 0) return r.t0;
    double lo = s[k - 1], hi = s[k];
    double frac = hi > lo ? (y - lo) / (hi - lo) : 1.0;
    return r.time(k - 1) + std::clamp(frac, 0.0, 1.0) * r.dt;
}

// FIFO exits of a curb: an arrival at t leaves at t + E(t)/s.
std::vector<double> curb_exits(const SimulationResult& r, const std::vector<double>& arrivals,
                               const std::vector<double>& backlog, double cap) {
    const std::size_t n = r.size();
    std::vector<double> exit_time(n), out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) exit_time[i] = r.time(i) + backlog[i] / cap;
    std::size_t k = 0;
    for (std::size_t j = 0; j < n; ++j) {
        const double t = r.time(j);
        while (k + 1 < n && exit_time[k + 1] <= t) ++k;
        if (exit_time[k] > t) {
            out[j] = 0.0;
            continue;
        }
        double v = arrivals[k];
        if (k + 1 < n && exit_time[k + 1] > exit_time[k]) {
            double f = (t - exit_time[k]) / (exit_time[k + 1] - exit_time[k]);
            v += f * (arrivals[k + 1] - arrivals[k]);
        }
        out[j] = std::min(v, arrivals[j]);
    }
    return out;
}

}  // namespace

double SimulationResult::sample(const std::vector<double>& s, double t) const {
    if (s.empty()) return 0.0;
    double x = (t - t0) / dt;
    if (x <= 0) return s.front();
    std::size_t i = static_cast<std::size_t>(x);
    if (i + 1 >= s.size()) return s.back();
    double f = x - static_cast<double>(i);
    return s[i] + f * (s[i + 1] - s[i]);
}

double SimulationResult::highway_wait(double t) const {
    if (t < t0 || t > horizon_end()) throw std::out_of_range("departure time outside simulated horizon");
    return std::max(0.0, first_reach(*this, D_H, sample(A_H, t)) - t);
}

double SimulationResult::curb_wait(Mode m, double t) const {
    const auto& e = m == Mode::Rv ? E_R : E_P;
    return sample(e, t) / (m == Mode::Rv ? cap_rv : cap_pv);
}

double SimulationResult::travel_time(Mode m, double t) const {
    double w = highway_wait(t);
    return w + curb_wait(m, t + w);
}

double SimulationResult::max_queue() const {
    double m = 0;
    for (const auto* s : {&q_H, &q_CR, &q_CP})
        for (double v : *s) m = std::max(m, v);
    return m;
}

SimulationResult simulate(const DepartureProfile& profile, const ModelParams& p, double dt) {
    if (!(dt > 0)) throw std::invalid_argument("dt must be positive");
    SimulationResult r;
    r.dt = dt;
    r.cap_rv = p.s_curb_rv;
    r.cap_pv = p.s_curb_pv;
    if (profile.segments.empty()) {
        r.A_H = r.D_H = r.A_H_rv = r.A_CR = r.A_CP = r.D_CR = r.D_CP = r.E_R = r.E_P = r.q_H = r.q_CR = r.q_CP = {0.0};
        return r;
    }
    double peak = 0;
    for (const auto& s : profile.segments) peak = std::max(peak, s.rv + s.pv);
    const double total = profile.total();
    if (peak * dt > std::max(total, 1.0)) throw std::invalid_argument("dt too large: one step carries more than N");

    // Highway arrivals as exact piecewise-linear curves of home time.
    PiecewiseCurve cum_all, cum_rv;
    for (double t : profile.breakpoints()) {
        cum_all.push(t, profile.cumulative(Mode::Rv, t) + profile.cumulative(Mode::Pv, t));
        cum_rv.push(t, profile.cumulative(Mode::Rv, t));
    }

    r.t0 = profile.start();
    const double sH = p.s_highway, sR = p.s_curb_rv, sP = p.s_curb_pv;
    const double limit = profile.end() + 48.0;
    double q = 0, eR = 0, eP = 0, d = 0, d_rv = 0, a_cr = 0, a_cp = 0;
    auto record = [&](double t) {
        r.A_H.push_back(cum_all(t));
        r.A_H_rv.push_back(cum_rv(t));
        r.D_H.push_back(d);
        r.A_CR.push_back(a_cr);
        r.A_CP.push_back(a_cp);
        r.E_R.push_back(eR);
        r.E_P.push_back(eP);
    };
    record(r.t0);
    for (std::size_t i = 0;; ++i) {
        const double t = r.time(i), t1 = r.time(i + 1);
        if (t >= profile.end() && q <= kEmpty && eR <= kEmpty && eP <= kEmpty) break;
        if (t > limit) throw std::runtime_error("simulation did not clear within 48 h of the last departure");

        const double inflow = cum_all(t1) - cum_all(t);
        const double out = std::min(q + inflow, sH * dt);
        q = q + inflow - out;
        const double d_next = d + out;
        // FIFO: the exiting cohort is the one whose cumulative arrival count matches.
        double arr_r = out > 0 ? std::clamp(cum_rv(cum_all.inverse(d_next)) - d_rv, 0.0, out) : 0.0;
        // Rounding in the split must not count as an arrival: it would switch the spillover on.
        if (arr_r < 1e-9 * out) arr_r = 0.0;
        if (out - arr_r < 1e-9 * out) arr_r = out;
        const double arr_p = out - arr_r;
        const double d_rv_next = d_rv + arr_r;
        d = d_next;
        d_rv = d_rv_next;
        a_cr += arr_r;
        a_cp += arr_p;

        // Spillover discount needs both modes arriving and a queue at the other curb.
        const bool both = arr_r > 0 && arr_p > 0;
        const double cap_r = sR * dt * (1 + 1e-9), cap_p = sP * dt * (1 + 1e-9);
        bool busy_r = eR > kEmpty || arr_r > cap_r, busy_p = eP > kEmpty || arr_p > cap_p;
        double in_r = 0, in_p = 0;
        for (int pass = 0; pass < 2; ++pass) {
            in_r = arr_r + (both && busy_p ? p.delta_pv * arr_p : 0.0);
            in_p = arr_p + (both && busy_r ? p.delta_rv * arr_r : 0.0);
            busy_r = eR > kEmpty || in_r > cap_r;
            busy_p = eP > kEmpty || in_p > cap_p;
        }
        eR = std::max(0.0, eR + in_r - sR * dt);
        eP = std::max(0.0, eP + in_p - sP * dt);
        record(t1);
    }

    r.D_CR = curb_exits(r, r.A_CR, r.E_R, sR);
    r.D_CP = curb_exits(r, r.A_CP, r.E_P, sP);
    const std::size_t n = r.size();
    r.q_H.resize(n);
    r.q_CR.resize(n);
    r.q_CP.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        r.q_H[i] = std::max(0.0, r.A_H[i] - r.D_H[i]);
        r.q_CR[i] = std::max(0.0, r.A_CR[i] - r.D_CR[i]);
        r.q_CP[i] = std::max(0.0, r.A_CP[i] - r.D_CP[i]);
    }
    return r;
}

double experienced_cost(const SimulationResult& r, const ModelParams& p, Mode m, double t, double fee) {
    return generalized_cost(p, m, t, r.travel_time(m, t), fee);
}

}  // namespace tandem_curb

#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <string>
#include <vector>

#include "tandem_curb/metrics.hpp"

namespace tsupport {

using namespace tandem_curb;

inline bool close_rel(double a, double b, double rel) { return std::abs(a - b) <= rel * std::max(1.0, std::abs(b)); }

/// Packet-level re-implementation of the two tandem point queues, kept apart from the
/// library oracle. Each time step releases one packet; the highway serves packets FIFO,
/// each curb serves a FIFO of (vehicles, work) packets at one hour of work per hour.
/// A packet's work is its vehicles over the curb rate, plus δ times the other mode's
/// packet over the same rate while both arrive and the other curb is queued.
class PacketOracle {
public:
    PacketOracle(const DepartureProfile& prof, const ModelParams& p, double dt) : t0_(prof.start()), dt_(dt) {
        std::deque<Mix> hq;
        std::deque<Work> qr, qp;
        double ah = 0, dh = 0, acr = 0, dcr = 0, acp = 0, dcp = 0;
        auto record = [&] {
            AH_.push_back(ah);
            DH_.push_back(dh);
            ACR_.push_back(acr);
            DCR_.push_back(dcr);
            ACP_.push_back(acp);
            DCP_.push_back(dcp);
        };
        auto pending = [](const auto& q) {
            double w = 0;
            for (const auto& x : q) w += x.size();
            return w;
        };
        record();
        for (std::size_t i = 0;; ++i) {
            const double t = t0_ + dt * static_cast<double>(i);
            if (t >= prof.end() && pending(hq) < 1e-9 && pending(qr) < 1e-12 && pending(qp) < 1e-12) break;
            if (i > 50'000'000) break;
            const double inr = prof.cumulative(Mode::Rv, t + dt) - prof.cumulative(Mode::Rv, t);
            const double inp = prof.cumulative(Mode::Pv, t + dt) - prof.cumulative(Mode::Pv, t);
            if (inr + inp > 0) hq.push_back({inr, inp});
            ah += inr + inp;

            double cap = p.s_highway * dt, outr = 0, outp = 0;
            while (cap > 1e-15 && !hq.empty()) {
                Mix& f = hq.front();
                const double m = f.size();
                if (m <= cap) {
                    outr += f.r;
                    outp += f.p;
                    cap -= m;
                    hq.pop_front();
                } else {
                    const double k = cap / m;
                    outr += f.r * k;
                    outp += f.p * k;
                    f.r -= f.r * k;
                    f.p -= f.p * k;
                    cap = 0;
                }
            }
            dh += outr + outp;
            acr += outr;
            acp += outp;

            const bool both = outr > 1e-12 && outp > 1e-12;
            const double wr = pending(qr), wp = pending(qp);
            bool qR = wr > 1e-12 || outr > p.s_curb_rv * dt * (1 + 1e-9);
            bool qP = wp > 1e-12 || outp > p.s_curb_pv * dt * (1 + 1e-9);
            double spr = 0, spp = 0;
            for (int pass = 0; pass < 2; ++pass) {
                spr = both && qP ? p.delta_pv * outp / p.s_curb_rv : 0.0;
                spp = both && qR ? p.delta_rv * outr / p.s_curb_pv : 0.0;
                qR = wr > 1e-12 || outr / p.s_curb_rv + spr > dt * (1 + 1e-9);
                qP = wp > 1e-12 || outp / p.s_curb_pv + spp > dt * (1 + 1e-9);
            }
            if (outr > 0) qr.push_back({outr, outr / p.s_curb_rv + spr});
            if (outp > 0) qp.push_back({outp, outp / p.s_curb_pv + spp});
            dcr += serve(qr, dt);
            dcp += serve(qp, dt);
            record();
        }
    }

    double horizon_end() const { return t0_ + dt_ * static_cast<double>(AH_.size() - 1); }

    // Door-to-curb-exit time of a cohort leaving home at t.
    double travel_time(Mode m, double t) const {
        const double eh = std::max(t, reach(DH_, at(AH_, t)));
        const auto& A = m == Mode::Rv ? ACR_ : ACP_;
        const auto& D = m == Mode::Rv ? DCR_ : DCP_;
        return std::max(eh, reach(D, at(A, eh))) - t;
    }

    double max_queue() const {
        double q = 0;
        for (std::size_t i = 0; i < AH_.size(); ++i)
            q = std::max({q, AH_[i] - DH_[i], ACR_[i] - DCR_[i], ACP_[i] - DCP_[i]});
        return q;
    }

    double curb_exits(Mode m) const { return m == Mode::Rv ? DCR_.back() : DCP_.back(); }

private:
    struct Mix {
        double r, p;
        double size() const { return r + p; }
    };
    struct Work {
        double veh, work;
        double size() const { return work; }
    };

    static double serve(std::deque<Work>& q, double dt) {
        double rem = dt, v = 0;
        while (rem > 1e-15 && !q.empty()) {
            Work& f = q.front();
            if (f.work <= rem) {
                v += f.veh;
                rem -= f.work;
                q.pop_front();
            } else {
                const double k = rem / f.work;
                v += f.veh * k;
                f.veh -= f.veh * k;
                f.work -= rem;
                rem = 0;
            }
        }
        return v;
    }

    double at(const std::vector<double>& s, double t) const {
        const double x = (t - t0_) / dt_;
        if (x <= 0) return s.front();
        const auto i = static_cast<std::size_t>(x);
        if (i + 1 >= s.size()) return s.back();
        return s[i] + (x - static_cast<double>(i)) * (s[i + 1] - s[i]);
    }

    double reach(const std::vector<double>& s, double y) const {
        auto it = std::lower_bound(s.begin(), s.end(), y - 1e-9);
        if (it == s.end()) return horizon_end();
        const auto k = static_cast<std::size_t>(it - s.begin());
        if (k == 0) return t0_;
        const double lo = s[k - 1], hi = s[k];
        const double f = hi > lo ? std::clamp((y - lo) / (hi - lo), 0.0, 1.0) : 1.0;
        return t0_ + dt_ * (static_cast<double>(k - 1) + f);
    }

    double t0_, dt_;
    std::vector<double> AH_, DH_, ACR_, DCR_, ACP_, DCP_;
};

// Max relative spread of packet-oracle costs over a mode's interval.
inline double packet_cost_spread(const PacketOracle& o, const ModelParams& p, Mode m, double a, double b, double ref,
                                 int samples = 100) {
    double lo = 1e300, hi = -1e300;
    for (int i = 0; i < samples; ++i) {
        const double t = a + (b - a) * (i + 0.5) / samples;
        const double c = generalized_cost(p, m, t, o.travel_time(m, t));
        lo = std::min(lo, c);
        hi = std::max(hi, c);
    }
    return (hi - lo) / std::max(1.0, std::abs(ref));
}

/// Random parameters inside every standing assumption.
inline ModelParams random_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    RawConfig r;
    r.alpha = 4.0 + 16.0 * u(rng);
    r.beta = *r.alpha * (0.2 + 0.7 * u(rng));
    r.pi_per_hour = 12.0 * u(rng);
    r.demand = 1000.0 + 7000.0 * u(rng);
    r.s_highway = 2000.0 + 4000.0 * u(rng);
    r.s_curb_rv = *r.s_highway * (0.1 + 0.85 * u(rng));
    r.s_curb_pv = *r.s_highway * (0.1 + 0.85 * u(rng));
    r.delta_rv = 0.02 + 0.48 * u(rng);
    r.delta_pv = 0.02 + 0.48 * u(rng);
    r.rv_fixed_cost = 5.0 * u(rng);
    const double gap_max = 1.3 * *r.beta * *r.demand / *r.s_curb_rv;
    r.pv_fixed_cost = *r.rv_fixed_cost + 0.01 + gap_max * u(rng);
    return build_parameters(r);
}

struct Representative {
    std::string name;
    ScenarioId expected;
    ModelParams params;
    bool both_spillovers;  // also run with δ^P = 0 when the scenario has co-departure
};

// One parameter set per no-late scenario, on the synthetic corridor (s_H = 2500).
inline std::vector<Representative> representatives() {
    return {
        {"S1", ScenarioId::S1, synthetic(1500, 300, 8.0), false},
        {"S2", ScenarioId::S2, synthetic(900, 900, 8.0), false},
        {"S3", ScenarioId::S3, synthetic(300, 300, 1.0), true},
        {"S4", ScenarioId::S4, synthetic(1800, 1800, 3.75), false},
        {"S5", ScenarioId::S5, synthetic(600, 900, 1.0), true},
        {"S6", ScenarioId::S6, synthetic(2100, 300, 8.0), false},
        {"S7", ScenarioId::S7, synthetic(2100, 300, 3.75), false},
        {"S8", ScenarioId::S8, synthetic(2100, 300, 1.0), true},
    };
}

}  // namespace tsupport

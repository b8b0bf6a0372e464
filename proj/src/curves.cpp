#include "tandem_curb/curves.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tandem_curb {

namespace {
constexpr double kTimeMerge = 1e-12;
}

PiecewiseCurve::PiecewiseCurve(std::vector<double> t, std::vector<double> v) {
    if (t.size() != v.size()) throw std::invalid_argument("curve size mismatch");
    for (std::size_t i = 0; i < t.size(); ++i) push(t[i], v[i]);
}

void PiecewiseCurve::push(double t, double v) {
    if (!t_.empty()) {
        if (t < t_.back() - kTimeMerge) throw std::invalid_argument("curve times must be nondecreasing");
        if (t - t_.back() <= kTimeMerge) {
            v_.back() = v;
            return;
        }
    }
    t_.push_back(t);
    v_.push_back(v);
}

double PiecewiseCurve::operator()(double t) const {
    if (t_.empty()) return 0.0;
    if (t <= t_.front()) return v_.front();
    if (t >= t_.back()) return v_.back();
    auto it = std::upper_bound(t_.begin(), t_.end(), t);
    std::size_t i = static_cast<std::size_t>(it - t_.begin());
    double w = (t - t_[i - 1]) / (t_[i] - t_[i - 1]);
    return v_[i - 1] + w * (v_[i] - v_[i - 1]);
}

double PiecewiseCurve::slope(double t) const {
    if (t_.size() < 2 || t < t_.front() || t >= t_.back()) return 0.0;
    auto it = std::upper_bound(t_.begin(), t_.end(), t);
    std::size_t i = static_cast<std::size_t>(it - t_.begin());
    return (v_[i] - v_[i - 1]) / (t_[i] - t_[i - 1]);
}

std::vector<double> PiecewiseCurve::slopes() const {
    std::vector<double> s;
    for (std::size_t i = 1; i < t_.size(); ++i) s.push_back((v_[i] - v_[i - 1]) / (t_[i] - t_[i - 1]));
    return s;
}

double PiecewiseCurve::integral(double a, double b) const {
    if (t_.empty() || b <= a) return 0.0;
    std::vector<double> pts{a};
    for (double t : t_)
        if (t > a && t < b) pts.push_back(t);
    pts.push_back(b);
    double s = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) s += 0.5 * ((*this)(pts[i - 1]) + (*this)(pts[i])) * (pts[i] - pts[i - 1]);
    return s;
}

double PiecewiseCurve::integral() const { return t_.empty() ? 0.0 : integral(t_.front(), t_.back()); }

double PiecewiseCurve::inverse(double y) const {
    if (t_.empty()) return 0.0;
    if (y <= v_.front()) return t_.front();
    if (y > v_.back()) return std::numeric_limits<double>::infinity();
    auto it = std::lower_bound(v_.begin(), v_.end(), y);
    std::size_t i = static_cast<std::size_t>(it - v_.begin());
    if (v_[i] == v_[i - 1]) return t_[i];
    return t_[i - 1] + (y - v_[i - 1]) / (v_[i] - v_[i - 1]) * (t_[i] - t_[i - 1]);
}

double PiecewiseCurve::max_value() const { return v_.empty() ? 0.0 : *std::max_element(v_.begin(), v_.end()); }
double PiecewiseCurve::min_value() const { return v_.empty() ? 0.0 : *std::min_element(v_.begin(), v_.end()); }

PiecewiseCurve PiecewiseCurve::combine(const PiecewiseCurve& a, const PiecewiseCurve& b,
                                       const std::function<double(double, double)>& f) {
    std::vector<double> ts = a.t_;
    ts.insert(ts.end(), b.t_.begin(), b.t_.end());
    std::sort(ts.begin(), ts.end());
    PiecewiseCurve out;
    for (double t : ts) out.push(t, f(a(t), b(t)));
    return out;
}

void DepartureProfile::add(double t0, double t1, double rv, double pv) {
    if (!(t1 > t0)) return;
    if (rv < 0 || pv < 0) throw std::invalid_argument("negative departure rate");
    segments.push_back({t0, t1, rv, pv});
    std::sort(segments.begin(), segments.end(), [](const auto& x, const auto& y) { return x.t0 < y.t0; });
}

double DepartureProfile::start() const { return segments.empty() ? 0.0 : segments.front().t0; }

double DepartureProfile::end() const {
    double e = segments.empty() ? 0.0 : segments.front().t1;
    for (const auto& s : segments) e = std::max(e, s.t1);
    return e;
}

double DepartureProfile::total(Mode m) const {
    double n = 0.0;
    for (const auto& s : segments) n += (m == Mode::Rv ? s.rv : s.pv) * (s.t1 - s.t0);
    return n;
}

double DepartureProfile::rate(Mode m, double t) const {
    double r = 0.0;
    for (const auto& s : segments)
        if (t >= s.t0 && t < s.t1) r += m == Mode::Rv ? s.rv : s.pv;
    return r;
}

double DepartureProfile::cumulative(Mode m, double t) const {
    double n = 0.0;
    for (const auto& s : segments) {
        double hi = std::min(t, s.t1);
        if (hi > s.t0) n += (m == Mode::Rv ? s.rv : s.pv) * (hi - s.t0);
    }
    return n;
}

std::vector<double> DepartureProfile::breakpoints() const {
    std::vector<double> b;
    for (const auto& s : segments) {
        b.push_back(s.t0);
        b.push_back(s.t1);
    }
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end(), [](double x, double y) { return std::abs(x - y) <= kTimeMerge; }), b.end());
    return b;
}

double FluidCurves::travel_time(Mode m, double t) const {
    double e = exit_H(t);
    return (e - t) + curb_wait(m, e);
}

double FluidCurves::horizon_end() const {
    double e = 0.0;
    for (const auto* c : {&D_H, &D_CR, &D_CP, &A_H})
        if (!c->empty()) e = std::max(e, c->back_time());
    return e;
}

namespace {

struct CurbState {
    double vr = 0, vp = 0;
};

// Work inflow per unit time into each curb backlog, with the spillover switched on only
// when both modes arrive and the other curb is congested (monotone fixed point).
void curb_slopes(const ModelParams& p, double ar, double ap, const CurbState& st, double tol, double& sr, double& sp) {
    bool both = ar > 0 && ap > 0;
    bool congR = st.vr > tol, congP = st.vp > tol;
    double inR = 0, inP = 0;
    for (int pass = 0; pass < 3; ++pass) {
        inR = (ar + ((both && congP) ? p.delta_pv * ap : 0.0)) / p.s_curb_rv;
        inP = (ap + ((both && congR) ? p.delta_rv * ar : 0.0)) / p.s_curb_pv;
        bool nR = congR || inR > 1.0, nP = congP || inP > 1.0;
        if (nR == congR && nP == congP) break;
        congR = nR;
        congP = nP;
    }
    sr = (st.vr > tol || inR > 1.0) ? inR - 1.0 : 0.0;
    sp = (st.vp > tol || inP > 1.0) ? inP - 1.0 : 0.0;
}

}  // namespace

FluidCurves propagate(const DepartureProfile& profile, const ModelParams& p) {
    FluidCurves c;
    if (profile.segments.empty()) return c;
    const double sH = p.s_highway;
    const double qtol = 1e-9;

    // Highway, in home time.
    std::vector<double> bps = profile.breakpoints();
    struct HwPt {
        double t, q, ar, ap;
    };
    std::vector<HwPt> hw;
    double t = bps.front(), q = 0, ar = 0, ap = 0;
    hw.push_back({t, q, ar, ap});
    for (std::size_t k = 0; k + 1 < bps.size() || q > qtol;) {
        double tn;
        double hr = 0, hp = 0;
        if (k + 1 < bps.size()) {
            tn = bps[k + 1];
            double mid = 0.5 * (bps[k] + bps[k + 1]);
            hr = profile.rate(Mode::Rv, mid);
            hp = profile.rate(Mode::Pv, mid);
        } else {
            tn = std::numeric_limits<double>::infinity();
        }
        double sig = hr + hp;
        double dq = (q > qtol || sig > sH) ? sig - sH : 0.0;
        double hit = dq < 0 ? t + q / -dq : std::numeric_limits<double>::infinity();
        if (hit < tn) {
            ar += hr * (hit - t);
            ap += hp * (hit - t);
            t = hit;
            q = 0;
            hw.push_back({t, q, ar, ap});
            if (!std::isfinite(tn)) break;
            continue;
        }
        ar += hr * (tn - t);
        ap += hp * (tn - t);
        q = std::max(0.0, q + dq * (tn - t));
        t = tn;
        hw.push_back({t, q, ar, ap});
        ++k;
        if (k + 1 >= bps.size() && q <= qtol) break;
    }

    for (const auto& h : hw) {
        c.A_H_rv.push(h.t, h.ar);
        c.A_H_pv.push(h.t, h.ap);
        c.A_H.push(h.t, h.ar + h.ap);
        c.exit_H.push(h.t, h.t + h.q / sH);
    }
    // Curb arrivals: cohort departing home at t reaches the curb at exit_H(t).
    for (const auto& h : hw) {
        double e = h.t + h.q / sH;
        c.A_CR.push(e, h.ar);
        c.A_CP.push(e, h.ap);
        c.D_H.push(e, h.ar + h.ap);
    }

    // Curb work backlogs, in clock time.
    const std::vector<double>& ct = c.A_CR.times();
    struct CbPt {
        double t, vr, vp;
    };
    std::vector<CbPt> cb;
    CurbState st;
    double tc = ct.front();
    cb.push_back({tc, 0, 0});
    const double vtol = 1e-12;
    std::size_t j = 0;
    while (true) {
        double tn, a_r = 0, a_p = 0;
        if (j + 1 < ct.size()) {
            tn = ct[j + 1];
            double mid = 0.5 * (ct[j] + ct[j + 1]);
            a_r = c.A_CR.slope(mid);
            a_p = c.A_CP.slope(mid);
        } else {
            if (st.vr <= vtol && st.vp <= vtol) break;
            tn = std::numeric_limits<double>::infinity();
        }
        double sr, sp;
        curb_slopes(p, a_r, a_p, st, vtol, sr, sp);
        double hr = (sr < 0 && st.vr > vtol) ? tc + st.vr / -sr : std::numeric_limits<double>::infinity();
        double hp = (sp < 0 && st.vp > vtol) ? tc + st.vp / -sp : std::numeric_limits<double>::infinity();
        double hit = std::min(hr, hp);
        if (hit < tn) {
            st.vr = (hit == hr) ? 0.0 : std::max(0.0, st.vr + sr * (hit - tc));
            st.vp = (hit == hp) ? 0.0 : std::max(0.0, st.vp + sp * (hit - tc));
            tc = hit;
            cb.push_back({tc, st.vr, st.vp});
            continue;
        }
        st.vr = std::max(0.0, st.vr + sr * (tn - tc));
        st.vp = std::max(0.0, st.vp + sp * (tn - tc));
        if (st.vr <= vtol) st.vr = 0;
        if (st.vp <= vtol) st.vp = 0;
        tc = tn;
        cb.push_back({tc, st.vr, st.vp});
        ++j;
    }
    for (const auto& b : cb) {
        c.V_R.push(b.t, b.vr);
        c.V_P.push(b.t, b.vp);
    }
    for (const auto& b : cb) {
        c.D_CR.push(b.t + b.vr, c.A_CR(b.t));
    }
    for (const auto& b : cb) {
        c.D_CP.push(b.t + b.vp, c.A_CP(b.t));
    }

    auto diff = [](double a, double b) { return std::max(0.0, a - b); };
    c.q_H = PiecewiseCurve::combine(c.A_H, c.D_H, diff);
    c.q_CR = PiecewiseCurve::combine(c.A_CR, c.D_CR, diff);
    c.q_CP = PiecewiseCurve::combine(c.A_CP, c.D_CP, diff);
    return c;
}

double generalized_cost(const ModelParams& p, Mode m, double t, double travel_time, double fee) {
    double arrival = t + travel_time;
    double sched;
    if (arrival <= 1e-9)
        sched = p.beta * std::max(0.0, -arrival);
    else if (p.gamma)
        sched = *p.gamma * arrival;
    else
        return std::numeric_limits<double>::infinity();
    if (m == Mode::Rv) return (p.alpha + p.pi) * travel_time + sched + p.c_r + fee;
    return p.alpha * travel_time + sched + p.pv_fixed_cost + fee;
}

}  // namespace tandem_curb

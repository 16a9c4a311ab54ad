#include "ktorus/ode.hpp"

#include <algorithm>
#include <cmath>

#include "ktorus/errors.hpp"

namespace ktorus {

namespace {

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

}  // namespace

bool DenseSolution::covers(double t) const {
    double lo = std::min(t_begin_, t_end_);
    double hi = std::max(t_begin_, t_end_);
    return t >= lo && t <= hi;
}

void DenseSolution::start(double t0, const double* y0) {
    t_begin_ = t_end_ = t0;
    t0_.clear();
    h_.clear();
    rc_.clear();
    y_begin_.assign(y0, y0 + dim_);
}

void DenseSolution::push(double t0, double h, const double* rcont) {
    t0_.push_back(t0);
    h_.push_back(h);
    rc_.insert(rc_.end(), rcont, rcont + 5 * dim_);
    t_end_ = t0 + h;
}

std::size_t DenseSolution::step_of(double t) const {
    if (t0_.empty()) {
        throw Error(ErrorKind::SpanExhausted, "empty dense solution");
    }
    bool fwd = h_[0] > 0;
    // first step whose end is past t in the integration direction
    auto it = std::partition_point(t0_.begin(), t0_.end(), [&](double s) {
        return fwd ? s <= t : s >= t;
    });
    std::size_t k = static_cast<std::size_t>(it - t0_.begin());
    return k == 0 ? 0 : k - 1;
}

void DenseSolution::eval(double t, double* y) const {
    if (!covers(t)) {
        throw Error(ErrorKind::SpanExhausted, "time outside the integrated span");
    }
    if (t0_.empty()) {
        std::copy(y_begin_.begin(), y_begin_.end(), y);
        return;
    }
    std::size_t k = step_of(t);
    double th = (t - t0_[k]) / h_[k];
    double th1 = 1.0 - th;
    const double* r = &rc_[5 * dim_ * k];
    for (int i = 0; i < dim_; ++i) {
        y[i] = r[i] + th * (r[dim_ + i] +
                            th1 * (r[2 * dim_ + i] + th * (r[3 * dim_ + i] + th1 * r[4 * dim_ + i])));
    }
}

double DenseSolution::operator()(double t, int i) const {
    double buf[16];
    std::vector<double> big;
    double* y = buf;
    if (dim_ > 16) {
        big.resize(dim_);
        y = big.data();
    }
    eval(t, y);
    return y[i];
}

OdeResult integrate_dopri5(const Rhs& f, int n, double t, const double* y0, double t_end,
                           const OdeOptions& opt, const StepObserver& observer) {
    OdeResult res;
    res.sol = DenseSolution(n);
    res.sol.start(t, y0);
    if (t_end == t) {
        res.reached_end = true;
        return res;
    }
    const double dir = t_end > t ? 1.0 : -1.0;
    std::vector<double> y(y0, y0 + n), y1(n), ys(n), k1(n), k2(n), k3(n), k4(n), k5(n), k6(n),
        k7(n), rc(5 * n);
    f(t, y.data(), k1.data());
    double hmax = opt.h_max > 0 ? opt.h_max : std::abs(t_end - t);

    auto scale = [&](double a, double b) {
        return opt.atol + opt.rtol * std::max(std::abs(a), std::abs(b));
    };

    double h = opt.h0;
    if (h <= 0.0) {
        // starting step after Hairer, Norsett and Wanner
        double dnf = 0, dny = 0;
        for (int i = 0; i < n; ++i) {
            double sk = scale(y[i], y[i]);
            dnf += (k1[i] / sk) * (k1[i] / sk);
            dny += (y[i] / sk) * (y[i] / sk);
        }
        h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * std::sqrt(dny / dnf);
        h = std::min(h, hmax);
        for (int i = 0; i < n; ++i) ys[i] = y[i] + dir * h * k1[i];
        f(t + dir * h, ys.data(), k2.data());
        double der2 = 0;
        for (int i = 0; i < n; ++i) {
            double sk = scale(y[i], y[i]);
            der2 += ((k2[i] - k1[i]) / sk) * ((k2[i] - k1[i]) / sk);
        }
        der2 = std::sqrt(der2) / h;
        double der12 = std::max(der2, std::sqrt(dnf));
        double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 0.2);
        h = std::min({100 * h, h1, hmax});
    }
    h = std::min(h, hmax);

    double facold = 1e-4;
    const double beta = 0.04, expo1 = 0.2 - beta * 0.75, safe = 0.9;
    bool last = false;
    std::size_t nstep = 0;
    while (true) {
        if (++nstep > opt.max_steps) {
            throw Error(ErrorKind::HorizonExceeded, "ode step budget exhausted");
        }
        if ((t + dir * 1.01 * h - t_end) * dir >= 0.0) {
            h = std::abs(t_end - t);
            last = true;
        }
        double hs = dir * h;
        for (int i = 0; i < n; ++i) ys[i] = y[i] + hs * a21 * k1[i];
        f(t + c2 * hs, ys.data(), k2.data());
        for (int i = 0; i < n; ++i) ys[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
        f(t + c3 * hs, ys.data(), k3.data());
        for (int i = 0; i < n; ++i) ys[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        f(t + c4 * hs, ys.data(), k4.data());
        for (int i = 0; i < n; ++i)
            ys[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        f(t + c5 * hs, ys.data(), k5.data());
        for (int i = 0; i < n; ++i)
            ys[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        double tph = last ? t_end : t + hs;
        f(tph, ys.data(), k6.data());
        for (int i = 0; i < n; ++i)
            y1[i] = y[i] + hs * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        f(tph, y1.data(), k7.data());
        double err = 0.0;
        for (int i = 0; i < n; ++i) {
            double ei = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                              e7 * k7[i]);
            double sk = scale(y[i], y1[i]);
            err += (ei / sk) * (ei / sk);
        }
        err = std::sqrt(err / n);
        if (!std::isfinite(err)) {
            throw Error(ErrorKind::Numeric, "non-finite state in ode step");
        }
        double fac11 = std::pow(err, expo1);
        double fac = fac11 / std::pow(facold, beta);
        fac = std::max(0.1, std::min(5.0, fac / safe));
        double hnew = h / fac;
        if (err <= 1.0) {
            facold = std::max(err, 1e-4);
            for (int i = 0; i < n; ++i) {
                double ydiff = y1[i] - y[i];
                double bspl = hs * k1[i] - ydiff;
                rc[i] = y[i];
                rc[n + i] = ydiff;
                rc[2 * n + i] = bspl;
                rc[3 * n + i] = ydiff - hs * k7[i] - bspl;
                rc[4 * n + i] = hs * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                                      d6 * k6[i] + d7 * k7[i]);
            }
            res.sol.push(t, hs, rc.data());
            t = tph;
            y.swap(y1);
            k1.swap(k7);
            if (observer && observer(res.sol)) {
                res.stopped = true;
                return res;
            }
            if (last) {
                res.reached_end = true;
                return res;
            }
            h = std::min(hnew, hmax);
        } else {
            ++res.rejected;
            last = false;
            h = h / std::min(5.0, fac11 / safe);
        }
        if (h < 1e-14 * std::max(1.0, std::abs(t))) {
            throw Error(ErrorKind::Numeric, "ode step size underflow");
        }
    }
}

}  // namespace ktorus

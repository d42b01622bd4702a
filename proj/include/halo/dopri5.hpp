#pragma once

// Adaptive Dormand-Prince 5(4) stepper with the 4th-order continuous
// extension (Hairer, Norsett & Wanner, "dopri5"). Works on fixed-size
// std::array states so the whole step stays on the stack.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <string>
#include <utility>

#include "halo/error.hpp"

namespace halo::ode {

template <std::size_t N>
using State = std::array<double, N>;

struct StepControl {
    double abs_tol = 1e-8;
    double rel_tol = 1e-6;
    double max_step = std::numeric_limits<double>::infinity();
    long max_steps = 1'000'000;
};

// Everything needed to evaluate the interpolant on [t, t + h].
template <std::size_t N>
struct DenseStep {
    double t = 0.0;
    double h = 0.0;
    std::array<State<N>, 5> rcont{};

    State<N> operator()(double at) const {
        const double s = std::clamp((at - t) / h, 0.0, 1.0);
        const double s1 = 1.0 - s;
        State<N> y;
        for (std::size_t i = 0; i < N; ++i) {
            y[i] = rcont[0][i] +
                   s * (rcont[1][i] + s1 * (rcont[2][i] + s * (rcont[3][i] + s1 * rcont[4][i])));
        }
        return y;
    }
};

namespace detail {

struct Tableau {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                            a75 = -2187.0 / 6784, a76 = 11.0 / 84;
    // 5th minus 4th order weights
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    static constexpr double d1 = -12715105075.0 / 11282082432.0,
                            d3 = 87487479700.0 / 32700410799.0,
                            d4 = -10690763975.0 / 1880347072.0,
                            d5 = 701980252875.0 / 199316789632.0,
                            d6 = -1453857185.0 / 822651844.0,
                            d7 = 69997945.0 / 29380423.0;
};

template <std::size_t N>
State<N> axpy(const State<N>& y, double h, std::initializer_list<std::pair<double, const State<N>*>> terms) {
    State<N> out = y;
    for (const auto& [c, k] : terms) {
        if (c == 0.0) continue;
        for (std::size_t i = 0; i < N; ++i) out[i] += h * c * (*k)[i];
    }
    return out;
}

template <class Rhs, std::size_t N>
double initial_step(Rhs& rhs, double t, const State<N>& y, const State<N>& f0, double span,
                    const StepControl& ctl) {
    double d0 = 0.0, d1 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double sk = ctl.abs_tol + ctl.rel_tol * std::abs(y[i]);
        d0 += (y[i] / sk) * (y[i] / sk);
        d1 += (f0[i] / sk) * (f0[i] / sk);
    }
    d0 = std::sqrt(d0 / N);
    d1 = std::sqrt(d1 / N);
    double h = (d0 < 1e-10 || d1 < 1e-10) ? 1e-6 : 0.01 * d0 / d1;
    h = std::min({h, span, ctl.max_step});
    State<N> y1;
    for (std::size_t i = 0; i < N; ++i) y1[i] = y[i] + h * f0[i];
    State<N> f1;
    rhs(t + h, y1, f1);
    double d2 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double sk = ctl.abs_tol + ctl.rel_tol * std::abs(y[i]);
        d2 += ((f1[i] - f0[i]) / sk) * ((f1[i] - f0[i]) / sk);
    }
    d2 = std::sqrt(d2 / N) / h;
    const double dmax = std::max(d1, d2);
    const double h1 = dmax <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / dmax, 1.0 / 5.0);
    return std::min({100.0 * h, h1, span, ctl.max_step});
}

}  // namespace detail

// Integrates y' = rhs(t, y) from t0 to t1 (t1 > t0), calling on_step(DenseStep)
// after every accepted step. rhs has signature void(double, const State&, State&).
// Returns y(t1); the last step lands exactly on t1.
template <std::size_t N, class Rhs, class OnStep>
State<N> integrate(Rhs&& rhs, double t0, double t1, State<N> y, const StepControl& ctl,
                   OnStep&& on_step) {
    using T = detail::Tableau;
    constexpr double safety = 0.9, fac_min = 0.2, fac_max = 10.0, beta = 0.04;
    const double expo = 0.2 - beta * 0.75;

    State<N> k1, k2, k3, k4, k5, k6, k7;
    rhs(t0, y, k1);
    double t = t0;
    double h = detail::initial_step(rhs, t0, y, k1, t1 - t0, ctl);
    double err_old = 1e-4;
    bool rejected = false;
    long steps = 0;

    while (t < t1) {
        if (++steps > ctl.max_steps) {
            throw IntegrationError("maximum number of steps exceeded at t=" + std::to_string(t), t);
        }
        bool last = false;
        if (t + h >= t1 || t + 1.01 * h >= t1) {
            h = t1 - t;
            last = true;
        }
        if (h <= 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
            throw IntegrationError("step size underflow at t=" + std::to_string(t), t);
        }

        rhs(t + T::c2 * h, detail::axpy<N>(y, h, {{T::a21, &k1}}), k2);
        rhs(t + T::c3 * h, detail::axpy<N>(y, h, {{T::a31, &k1}, {T::a32, &k2}}), k3);
        rhs(t + T::c4 * h, detail::axpy<N>(y, h, {{T::a41, &k1}, {T::a42, &k2}, {T::a43, &k3}}), k4);
        rhs(t + T::c5 * h,
            detail::axpy<N>(y, h, {{T::a51, &k1}, {T::a52, &k2}, {T::a53, &k3}, {T::a54, &k4}}), k5);
        const double t_new = last ? t1 : t + h;
        rhs(t_new,
            detail::axpy<N>(y, h, {{T::a61, &k1}, {T::a62, &k2}, {T::a63, &k3}, {T::a64, &k4}, {T::a65, &k5}}),
            k6);
        const State<N> y_new = detail::axpy<N>(
            y, h, {{T::a71, &k1}, {T::a73, &k3}, {T::a74, &k4}, {T::a75, &k5}, {T::a76, &k6}});
        rhs(t_new, y_new, k7);

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double e = h * (T::e1 * k1[i] + T::e3 * k3[i] + T::e4 * k4[i] + T::e5 * k5[i] +
                                  T::e6 * k6[i] + T::e7 * k7[i]);
            const double sk =
                ctl.abs_tol + ctl.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
            err += (e / sk) * (e / sk);
        }
        err = std::sqrt(err / N);
        if (!std::isfinite(err)) {
            throw IntegrationError("non-finite state at t=" + std::to_string(t), t);
        }

        if (err <= 1.0) {
            DenseStep<N> dense;
            dense.t = t;
            dense.h = t_new - t;
            for (std::size_t i = 0; i < N; ++i) {
                const double ydiff = y_new[i] - y[i];
                const double bspl = h * k1[i] - ydiff;
                dense.rcont[0][i] = y[i];
                dense.rcont[1][i] = ydiff;
                dense.rcont[2][i] = bspl;
                dense.rcont[3][i] = ydiff - h * k7[i] - bspl;
                dense.rcont[4][i] = h * (T::d1 * k1[i] + T::d3 * k3[i] + T::d4 * k4[i] +
                                         T::d5 * k5[i] + T::d6 * k6[i] + T::d7 * k7[i]);
            }
            on_step(static_cast<const DenseStep<N>&>(dense));

            // PI step-size control
            double fac = err == 0.0 ? fac_max
                                    : safety * std::pow(err, -expo) * std::pow(err_old, beta);
            fac = std::clamp(fac, fac_min, fac_max);
            if (rejected) fac = std::min(fac, 1.0);
            err_old = std::max(err, 1e-4);
            y = y_new;
            k1 = k7;
            t = t_new;
            h = std::min(h * fac, ctl.max_step);
            rejected = false;
        } else {
            h *= std::max(fac_min, safety * std::pow(err, -0.2));
            rejected = true;
        }
    }
    return y;
}

}  // namespace halo::ode

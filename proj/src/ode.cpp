#include "rande/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rande {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                 a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                 a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
// 5th-order weights (also the a7 row; the pair is FSAL).
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
// Difference between the 5th- and 4th-order weights.
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Dense-output coefficients (Hairer, Norsett & Wanner's CONTD5).
constexpr double d1 = -12715105075.0 / 11282082432.0,
                 d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0,
                 d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0,
                 d7 = 69997945.0 / 29380423.0;

struct Workspace {
    std::vector<double> k1, k2, k3, k4, k5, k6, k7, y_stage, y_new;
    std::vector<double> r1, r2, r3, r4, r5;  // dense-output polynomial

    explicit Workspace(std::size_t n)
        : k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), y_stage(n), y_new(n),
          r1(n), r2(n), r3(n), r4(n), r5(n) {}
};

// One Dormand-Prince step from (t, y) with step h. Requires ws.k1 = f(t, y).
// Fills ws.y_new and ws.k7 = f(t + h, y_new); returns the scaled error norm.
double dopri5_step(const OdeRhs& rhs, double t, std::span<const double> y,
                   double h, const OdeTols& tols, Workspace& ws) {
    const std::size_t n = y.size();
    auto& k1 = ws.k1;
    auto& ys = ws.y_stage;

    for (std::size_t i = 0; i < n; ++i) ys[i] = y[i] + h * a21 * k1[i];
    rhs(t + c2 * h, ys, ws.k2);
    for (std::size_t i = 0; i < n; ++i)
        ys[i] = y[i] + h * (a31 * k1[i] + a32 * ws.k2[i]);
    rhs(t + c3 * h, ys, ws.k3);
    for (std::size_t i = 0; i < n; ++i)
        ys[i] = y[i] + h * (a41 * k1[i] + a42 * ws.k2[i] + a43 * ws.k3[i]);
    rhs(t + c4 * h, ys, ws.k4);
    for (std::size_t i = 0; i < n; ++i)
        ys[i] = y[i] + h * (a51 * k1[i] + a52 * ws.k2[i] + a53 * ws.k3[i] +
                            a54 * ws.k4[i]);
    rhs(t + c5 * h, ys, ws.k5);
    for (std::size_t i = 0; i < n; ++i)
        ys[i] = y[i] + h * (a61 * k1[i] + a62 * ws.k2[i] + a63 * ws.k3[i] +
                            a64 * ws.k4[i] + a65 * ws.k5[i]);
    rhs(t + h, ys, ws.k6);
    for (std::size_t i = 0; i < n; ++i)
        ws.y_new[i] = y[i] + h * (b1 * k1[i] + b3 * ws.k3[i] + b4 * ws.k4[i] +
                                  b5 * ws.k5[i] + b6 * ws.k6[i]);
    rhs(t + h, ws.y_new, ws.k7);

    double err_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double e = h * (e1 * k1[i] + e3 * ws.k3[i] + e4 * ws.k4[i] +
                        e5 * ws.k5[i] + e6 * ws.k6[i] + e7 * ws.k7[i]);
        double sc = tols.abs + tols.rel * std::max(std::abs(y[i]), std::abs(ws.y_new[i]));
        double q = e / sc;
        err_sq += q * q;
    }
    return std::sqrt(err_sq / static_cast<double>(n));
}

void prepare_dense(double h, std::span<const double> y, Workspace& ws) {
    const std::size_t n = y.size();
    for (std::size_t i = 0; i < n; ++i) {
        double ydiff = ws.y_new[i] - y[i];
        double bspl = h * ws.k1[i] - ydiff;
        ws.r1[i] = y[i];
        ws.r2[i] = ydiff;
        ws.r3[i] = bspl;
        ws.r4[i] = ydiff - h * ws.k7[i] - bspl;
        ws.r5[i] = h * (d1 * ws.k1[i] + d3 * ws.k3[i] + d4 * ws.k4[i] +
                        d5 * ws.k5[i] + d6 * ws.k6[i] + d7 * ws.k7[i]);
    }
}

void eval_dense(double theta, const Workspace& ws, std::span<double> out) {
    const double th1 = 1.0 - theta;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = ws.r1[i] +
                 theta * (ws.r2[i] +
                          th1 * (ws.r3[i] +
                                 theta * (ws.r4[i] + th1 * ws.r5[i])));
    }
}

double scaled_norm(std::span<const double> v, std::span<const double> ref,
                   const OdeTols& tols) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        double sc = tols.abs + tols.rel * std::abs(ref[i]);
        double q = v[i] / sc;
        s += q * q;
    }
    return std::sqrt(s / static_cast<double>(v.size()));
}

// Initial step size after Hairer's HINIT, trimmed to this pair.
double initial_step(const OdeRhs& rhs, double t0, std::span<const double> y0,
                    std::span<const double> f0, double span, const OdeTols& tols,
                    Workspace& ws) {
    double d0 = scaled_norm(y0, y0, tols);
    double d1 = scaled_norm(f0, y0, tols);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 * span : 0.01 * (d0 / d1);
    h0 = std::min(h0, span);

    auto& y1 = ws.y_stage;
    for (std::size_t i = 0; i < y0.size(); ++i) y1[i] = y0[i] + h0 * f0[i];
    rhs(t0 + h0, y1, ws.k2);
    double d2 = 0.0;
    for (std::size_t i = 0; i < y0.size(); ++i) {
        double sc = tols.abs + tols.rel * std::abs(y0[i]);
        double q = (ws.k2[i] - f0[i]) / sc;
        d2 += q * q;
    }
    d2 = std::sqrt(d2 / static_cast<double>(y0.size())) / h0;

    double dm = std::max(d1, d2);
    double h1 = (dm <= 1e-15) ? std::max(1e-6 * span, h0 * 1e-3)
                              : std::pow(0.01 / dm, 0.2);
    return std::min({100.0 * h0, h1, span});
}

}  // namespace

Trajectory integrate_adaptive(const OdeRhs& rhs, std::span<const double> y0,
                              const TimeGrid& time, OdeTols tols, double max_step) {
    if (!(tols.rel > 0.0) || !(tols.abs > 0.0)) {
        throw std::invalid_argument("integrate_adaptive: tolerances must be positive");
    }
    const std::size_t n = y0.size();
    const double span = time.t_max - time.t_min;
    const double h_min = 1e-12 * span;

    Trajectory out;
    out.time = time;
    out.dim = n;
    out.values.assign(time.n_points * n, 0.0);
    std::copy(y0.begin(), y0.end(), out.row(0).begin());

    Workspace ws(n);
    std::vector<double> y(y0.begin(), y0.end());
    double t = time.t_min;
    rhs(t, y, ws.k1);
    for (double v : ws.k1) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument(
                "integrate_adaptive: right-hand side not finite at the initial state");
        }
    }

    double h = initial_step(rhs, t, y, ws.k1, span, tols, ws);
    if (max_step > 0.0) h = std::min(h, max_step);

    // PI controller constants (beta = 0.04).
    constexpr double beta = 0.04;
    constexpr double expo1 = 0.2 - beta * 0.75;
    constexpr double safe = 0.9;
    constexpr double fac_max = 5.0, fac_min = 0.1;
    double fac_old = 1e-4;

    std::size_t next_out = 1;
    const double t_eps = 1e-14 * std::max(1.0, std::abs(time.t_max));

    while (next_out < time.n_points) {
        if (h < h_min) {
            throw SolverFailure(
                "integrate_adaptive: step size underflow (stiffness or blow-up) at t = " +
                    std::to_string(t),
                t);
        }
        bool last = false;
        if (t + h >= time.t_max - t_eps) {
            h = time.t_max - t;
            last = true;
        }

        double err = dopri5_step(rhs, t, y, h, tols, ws);
        if (!(err <= 1.0)) {  // also catches NaN
            double fac11 = std::isfinite(err) ? std::pow(err, expo1) : 10.0;
            h /= std::min(1.0 / fac_min, fac11 / safe);
            continue;
        }

        prepare_dense(h, y, ws);
        while (next_out < time.n_points) {
            double t_next = time.t(next_out);
            if (next_out == time.n_points - 1) t_next = time.t_max;
            if (t_next > t + h + t_eps && !last) break;
            double theta = std::clamp((t_next - t) / h, 0.0, 1.0);
            eval_dense(theta, ws, out.row(next_out));
            ++next_out;
        }

        t = last ? time.t_max : t + h;
        std::swap(y, ws.y_new);
        std::swap(ws.k1, ws.k7);  // FSAL

        double fac11 = std::pow(std::max(err, 1e-10), expo1);
        double fac = fac11 / std::pow(fac_old, beta);
        fac = std::clamp(fac / safe, 1.0 / fac_max, 1.0 / fac_min);
        fac_old = std::max(err, 1e-4);
        h = h / fac;
        if (max_step > 0.0) h = std::min(h, max_step);
    }
    return out;
}

Trajectory integrate_fixed_step(const OdeRhs& rhs, std::span<const double> y0,
                                const TimeGrid& time, double h) {
    if (!(h > 0.0)) {
        throw std::invalid_argument("integrate_fixed_step: h must be positive");
    }
    const std::size_t n = y0.size();
    Trajectory out;
    out.time = time;
    out.dim = n;
    out.values.assign(time.n_points * n, 0.0);
    std::copy(y0.begin(), y0.end(), out.row(0).begin());

    Workspace ws(n);
    OdeTols dummy;  // error estimate unused
    std::vector<double> y(y0.begin(), y0.end());
    for (std::size_t j = 1; j < time.n_points; ++j) {
        double t0 = time.t(j - 1);
        double t1 = time.t(j);
        auto steps = static_cast<std::size_t>(std::ceil((t1 - t0) / h - 1e-12));
        steps = std::max<std::size_t>(steps, 1);
        double hs = (t1 - t0) / static_cast<double>(steps);
        double t = t0;
        for (std::size_t s = 0; s < steps; ++s) {
            rhs(t, y, ws.k1);
            dopri5_step(rhs, t, y, hs, dummy, ws);
            y = ws.y_new;
            t += hs;
        }
        std::copy(y.begin(), y.end(), out.row(j).begin());
    }
    return out;
}

}  // namespace rande

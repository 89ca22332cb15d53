#include "rande/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rande {

SpatialGrid::SpatialGrid(double x_min_, double x_max_, std::size_t n_points_)
    : x_min(x_min_), x_max(x_max_), n_points(n_points_) {
    if (n_points < 3) {
        throw std::invalid_argument("SpatialGrid: need at least 3 points, got " +
                                    std::to_string(n_points));
    }
    if (!(x_max > x_min)) {
        throw std::invalid_argument("SpatialGrid: x_max must exceed x_min");
    }
}

std::vector<double> SpatialGrid::points() const {
    std::vector<double> xs(n_points);
    for (std::size_t k = 0; k < n_points; ++k) xs[k] = x(k);
    xs.back() = x_max;
    return xs;
}

TimeGrid::TimeGrid(double t_min_, double t_max_, std::size_t n_points_)
    : t_min(t_min_), t_max(t_max_), n_points(n_points_) {
    if (n_points < 2) {
        throw std::invalid_argument("TimeGrid: need at least 2 points");
    }
    if (!(t_max > t_min)) {
        throw std::invalid_argument("TimeGrid: t_max must exceed t_min");
    }
}

SpaceTimeField::SpaceTimeField(const TimeGrid& t, const SpatialGrid& s)
    : time(t), space(s), values(t.n_points * s.n_points, 0.0) {}

SpaceTimeField::SpaceTimeField(const TimeGrid& t, const SpatialGrid& s,
                               std::vector<double> v)
    : time(t), space(s), values(std::move(v)) {
    if (values.size() != time.n_points * space.n_points) {
        throw std::invalid_argument("SpaceTimeField: value count does not match grids");
    }
}

void SpaceTimeField::validate() const {
    if (values.size() != time.n_points * space.n_points) {
        throw std::invalid_argument("SpaceTimeField: value count does not match grids");
    }
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("SpaceTimeField: non-finite value");
        }
    }
}

void laplacian_neumann_into(std::span<const double> v, double inv_dx2,
                            std::span<double> out) {
    const std::size_t n = v.size();
    out[0] = 2.0 * (v[1] - v[0]) * inv_dx2;
    for (std::size_t k = 1; k + 1 < n; ++k) {
        out[k] = (v[k - 1] - 2.0 * v[k] + v[k + 1]) * inv_dx2;
    }
    out[n - 1] = 2.0 * (v[n - 2] - v[n - 1]) * inv_dx2;
}

ScalarField laplacian_neumann(std::span<const double> field, const SpatialGrid& grid) {
    if (field.size() != grid.n_points) {
        throw std::invalid_argument("laplacian_neumann: field length " +
                                    std::to_string(field.size()) +
                                    " does not match grid with " +
                                    std::to_string(grid.n_points) + " points");
    }
    ScalarField out(field.size());
    const double dx = grid.dx();
    laplacian_neumann_into(field, 1.0 / (dx * dx), out);
    return out;
}

void interp_time_into(const SpaceTimeField& field, double t, std::span<double> out) {
    const TimeGrid& tg = field.time;
    const double span = tg.t_max - tg.t_min;
    const double eps = 1e-12 * span;
    if (t < tg.t_min - eps || t > tg.t_max + eps) {
        throw std::invalid_argument("interp_time: t outside stored range");
    }
    double s = (t - tg.t_min) / tg.dt();
    // Snap to a stored row when t is a grid time up to roundoff.
    double nearest = std::round(s);
    if (std::abs(s - nearest) < 1e-9 && nearest >= 0.0 &&
        nearest <= static_cast<double>(tg.n_points - 1)) {
        auto r = field.row(static_cast<std::size_t>(nearest));
        std::copy(r.begin(), r.end(), out.begin());
        return;
    }
    if (s <= 0.0) {
        auto r = field.row(0);
        std::copy(r.begin(), r.end(), out.begin());
        return;
    }
    std::size_t j = static_cast<std::size_t>(s);
    if (j >= tg.n_points - 1) {
        auto r = field.row(tg.n_points - 1);
        std::copy(r.begin(), r.end(), out.begin());
        return;
    }
    double theta = s - static_cast<double>(j);
    auto r0 = field.row(j);
    auto r1 = field.row(j + 1);
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = r0[k] + theta * (r1[k] - r0[k]);
    }
}

ScalarField interp_time(const SpaceTimeField& field, double t) {
    ScalarField out(field.n_x());
    interp_time_into(field, t, out);
    return out;
}

double trapezoid_mass(std::span<const double> v, double dx) {
    if (v.size() < 2) return 0.0;
    double sum = 0.5 * (v.front() + v.back());
    for (std::size_t k = 1; k + 1 < v.size(); ++k) sum += v[k];
    return sum * dx;
}

}  // namespace rande

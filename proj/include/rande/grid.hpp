#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rande {

// Uniform 1D spatial grid over [x_min, x_max] cm, both endpoints included.
struct SpatialGrid {
    double x_min = 0.0;
    double x_max = 1.0;
    std::size_t n_points = 3;

    SpatialGrid() = default;
    SpatialGrid(double x_min, double x_max, std::size_t n_points);

    double dx() const { return (x_max - x_min) / static_cast<double>(n_points - 1); }
    double x(std::size_t k) const { return x_min + static_cast<double>(k) * dx(); }
    std::vector<double> points() const;

    bool operator==(const SpatialGrid&) const = default;
};

// Uniform time grid over [t_min, t_max], both endpoints included.
struct TimeGrid {
    double t_min = 0.0;
    double t_max = 1.0;
    std::size_t n_points = 2;

    TimeGrid() = default;
    TimeGrid(double t_min, double t_max, std::size_t n_points);

    double dt() const { return (t_max - t_min) / static_cast<double>(n_points - 1); }
    double t(std::size_t j) const { return t_min + static_cast<double>(j) * dt(); }

    bool operator==(const TimeGrid&) const = default;
};

// Density at the nodes of one spatial grid (dimensionless, carrying capacity
// normalized to 1).
using ScalarField = std::vector<double>;

// Density values on an (n_t x n_x) grid, stored row-major in time. The
// universal carrier for PDE solutions and observed data.
struct SpaceTimeField {
    TimeGrid time;
    SpatialGrid space;
    std::vector<double> values;  // time.n_points * space.n_points

    SpaceTimeField() = default;
    SpaceTimeField(const TimeGrid& t, const SpatialGrid& s);  // zero-filled
    SpaceTimeField(const TimeGrid& t, const SpatialGrid& s, std::vector<double> v);

    std::size_t n_t() const { return time.n_points; }
    std::size_t n_x() const { return space.n_points; }

    std::span<const double> row(std::size_t j) const {
        return {values.data() + j * n_x(), n_x()};
    }
    std::span<double> row(std::size_t j) {
        return {values.data() + j * n_x(), n_x()};
    }
    double at(std::size_t j, std::size_t k) const { return values[j * n_x() + k]; }
    double& at(std::size_t j, std::size_t k) { return values[j * n_x() + k]; }

    // Throws if shape or finiteness invariants are broken.
    void validate() const;
};

// Second spatial derivative with zero-flux ends: the ghost node mirrors the
// first interior neighbor, so node 0 evaluates to 2(v[1] - v[0])/dx^2.
ScalarField laplacian_neumann(std::span<const double> field, const SpatialGrid& grid);

// Allocation-free variant for integrator right-hand sides.
void laplacian_neumann_into(std::span<const double> field, double inv_dx2,
                            std::span<double> out);

// Row of `field` at time t, linear between stored rows, exact at grid times.
// t must lie in [t_min, t_max].
ScalarField interp_time(const SpaceTimeField& field, double t);
void interp_time_into(const SpaceTimeField& field, double t, std::span<double> out);

// Trapezoid-rule integral of nodal values with uniform spacing dx.
double trapezoid_mass(std::span<const double> v, double dx);

}  // namespace rande

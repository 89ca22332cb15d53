#include "rande/models.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rande {

InitialCondition InitialCondition::gaussian_bump(double amplitude, double width,
                                                 double center) {
    InitialCondition ic;
    ic.kind = Kind::GaussianBump;
    ic.amplitude = amplitude;
    ic.width = width;
    ic.center = center;
    return ic;
}

InitialCondition InitialCondition::step(double amplitude, double edge) {
    InitialCondition ic;
    ic.kind = Kind::Step;
    ic.amplitude = amplitude;
    ic.center = edge;
    ic.width = 0.0;
    return ic;
}

InitialCondition InitialCondition::custom(std::vector<double> samples) {
    InitialCondition ic;
    ic.kind = Kind::Custom;
    ic.samples = std::move(samples);
    return ic;
}

ScalarField InitialCondition::evaluate(const SpatialGrid& grid) const {
    ScalarField u(grid.n_points);
    switch (kind) {
        case Kind::GaussianBump: {
            if (!(width > 0.0)) {
                throw std::invalid_argument("InitialCondition: gaussian width must be positive");
            }
            for (std::size_t k = 0; k < grid.n_points; ++k) {
                double z = (grid.x(k) - center) / width;
                u[k] = amplitude * std::exp(-z * z);
            }
            break;
        }
        case Kind::Step: {
            for (std::size_t k = 0; k < grid.n_points; ++k) {
                u[k] = grid.x(k) <= center ? amplitude : 0.0;
            }
            break;
        }
        case Kind::Custom: {
            if (samples.size() != grid.n_points) {
                throw std::invalid_argument(
                    "InitialCondition: custom sample count does not match grid");
            }
            u = samples;
            break;
        }
    }
    for (double v : u) {
        if (!(v >= 0.0) || v > 1.0) {
            throw std::invalid_argument(
                "InitialCondition: profile values must lie in [0, 1]");
        }
    }
    return u;
}

SpaceTimeField solve_fisher_kpp(const PhenotypeNode& node, const InitialCondition& ic,
                                const SpatialGrid& sgrid, const TimeGrid& tgrid,
                                OdeTols tols) {
    const double dx = sgrid.dx();
    const double inv_dx2 = 1.0 / (dx * dx);
    const double D = node.D;
    const double rho = node.rho;
    ScalarField u0 = ic.evaluate(sgrid);

    std::vector<double> lap(sgrid.n_points);
    auto rhs = [&, lap](double, std::span<const double> y,
                        std::span<double> dydt) mutable {
        laplacian_neumann_into(y, inv_dx2, lap);
        for (std::size_t k = 0; k < y.size(); ++k) {
            dydt[k] = D * lap[k] + rho * y[k] * (1.0 - y[k]);
        }
    };
    Trajectory traj = integrate_adaptive(rhs, u0, tgrid, tols);
    return SpaceTimeField(tgrid, sgrid, std::move(traj.values));
}

CoupledSolution solve_coupled_competition(std::span<const PhenotypeNode> nodes,
                                          const WeightVector& weights,
                                          const InitialCondition& ic,
                                          const SpatialGrid& sgrid,
                                          const TimeGrid& tgrid, OdeTols tols) {
    ScalarField profile = ic.evaluate(sgrid);
    std::vector<ScalarField> states(nodes.size(), profile);
    return solve_coupled_competition(nodes, weights, states, sgrid, tgrid, tols);
}

CoupledSolution solve_coupled_competition(std::span<const PhenotypeNode> nodes,
                                          const WeightVector& weights,
                                          std::span<const ScalarField> initial_states,
                                          const SpatialGrid& sgrid,
                                          const TimeGrid& tgrid, OdeTols tols) {
    if (nodes.empty()) {
        throw std::invalid_argument("solve_coupled_competition: empty node list");
    }
    if (nodes.size() != weights.size() || nodes.size() != initial_states.size()) {
        throw std::invalid_argument(
            "solve_coupled_competition: node, weight and state counts differ");
    }
    const std::size_t M = nodes.size();
    const std::size_t nx = sgrid.n_points;
    const double inv_dx2 = 1.0 / (sgrid.dx() * sgrid.dx());

    std::vector<double> y0(M * nx);
    for (std::size_t i = 0; i < M; ++i) {
        if (initial_states[i].size() != nx) {
            throw std::invalid_argument(
                "solve_coupled_competition: initial state length does not match grid");
        }
        std::copy(initial_states[i].begin(), initial_states[i].end(),
                  y0.begin() + i * nx);
    }

    // Crowding weights w_i * alpha_i precomputed once.
    std::vector<double> crowd(M);
    for (std::size_t i = 0; i < M; ++i) crowd[i] = weights[i] * nodes[i].alpha;

    std::vector<double> interaction(nx);
    auto rhs = [&, interaction](double, std::span<const double> y,
                                std::span<double> dydt) mutable {
        std::fill(interaction.begin(), interaction.end(), 0.0);
        for (std::size_t i = 0; i < M; ++i) {
            const double wi = crowd[i];
            if (wi == 0.0) continue;
            const double* ci = y.data() + i * nx;
            for (std::size_t k = 0; k < nx; ++k) interaction[k] += wi * ci[k];
        }
        for (std::size_t i = 0; i < M; ++i) {
            const double D = nodes[i].D;
            const double rho = nodes[i].rho;
            std::span<const double> ci = y.subspan(i * nx, nx);
            std::span<double> di = dydt.subspan(i * nx, nx);
            laplacian_neumann_into(ci, inv_dx2, di);
            for (std::size_t k = 0; k < nx; ++k) {
                di[k] = D * di[k] + rho * ci[k] * (1.0 - interaction[k]);
            }
        }
    };

    Trajectory traj = integrate_adaptive(rhs, y0, tgrid, tols);

    CoupledSolution sol;
    sol.per_node.reserve(M);
    for (std::size_t i = 0; i < M; ++i) {
        SpaceTimeField f(tgrid, sgrid);
        for (std::size_t j = 0; j < tgrid.n_points; ++j) {
            auto src = traj.row(j).subspan(i * nx, nx);
            std::copy(src.begin(), src.end(), f.row(j).begin());
        }
        sol.per_node.push_back(std::move(f));
    }
    sol.aggregate = aggregate(weights, sol.per_node);
    return sol;
}

SpaceTimeField solve_phenotype_vs_data(const PhenotypeNode& node,
                                       const SpaceTimeField& u_obs,
                                       std::span<const double> c0, OdeTols tols) {
    u_obs.validate();
    if (c0.size() != u_obs.n_x()) {
        throw std::invalid_argument(
            "solve_phenotype_vs_data: c0 length does not match observed grid");
    }
    for (double v : c0) {
        if (!(v >= 0.0)) {
            throw std::invalid_argument("solve_phenotype_vs_data: c0 must be nonnegative");
        }
    }
    const SpatialGrid& sgrid = u_obs.space;
    const TimeGrid& tgrid = u_obs.time;
    const double inv_dx2 = 1.0 / (sgrid.dx() * sgrid.dx());
    const double D = node.D;
    const double rho = node.rho;

    std::vector<double> lap(sgrid.n_points);
    std::vector<double> u_now(sgrid.n_points);
    auto rhs = [&, lap, u_now](double t, std::span<const double> y,
                               std::span<double> dydt) mutable {
        interp_time_into(u_obs, t, u_now);
        laplacian_neumann_into(y, inv_dx2, lap);
        for (std::size_t k = 0; k < y.size(); ++k) {
            dydt[k] = D * lap[k] + rho * y[k] * (1.0 - u_now[k]);
        }
    };
    // Cap steps at the data spacing so the piecewise-linear driver's kinks
    // stay inside one step's error estimate.
    Trajectory traj = integrate_adaptive(rhs, c0, tgrid, tols, tgrid.dt());
    return SpaceTimeField(tgrid, sgrid, std::move(traj.values));
}

SpaceTimeField aggregate(const WeightVector& weights,
                         std::span<const SpaceTimeField> per_node) {
    if (per_node.empty()) {
        throw std::invalid_argument("aggregate: no fields");
    }
    if (weights.size() != per_node.size()) {
        throw std::invalid_argument("aggregate: weight count does not match fields");
    }
    const SpaceTimeField& first = per_node.front();
    for (const auto& f : per_node) {
        if (!(f.time == first.time) || !(f.space == first.space) ||
            f.values.size() != first.values.size()) {
            throw std::invalid_argument("aggregate: field shapes differ");
        }
    }
    SpaceTimeField out(first.time, first.space);
    for (std::size_t i = 0; i < per_node.size(); ++i) {
        const double wi = weights[i];
        if (wi == 0.0) continue;
        const auto& src = per_node[i].values;
        for (std::size_t c = 0; c < src.size(); ++c) out.values[c] += wi * src[c];
    }
    return out;
}

}  // namespace rande

#pragma once

#include <span>
#include <vector>

#include "rande/distributions.hpp"
#include "rande/grid.hpp"
#include "rande/ode.hpp"

namespace rande {

// One phenotype's traits: diffusion D (cm^2/time), growth rho (1/time) and a
// competitive advantage alpha entering the shared crowding term (neutral
// competition, alpha = 1, is used throughout the default pipeline).
struct PhenotypeNode {
    double D = 0.0;
    double rho = 0.0;
    double alpha = 1.0;
};

// Initial density profile u(x, 0). Values must lie in [0, 1].
struct InitialCondition {
    enum class Kind { GaussianBump, Step, Custom };

    Kind kind = Kind::GaussianBump;
    double amplitude = 0.1;
    double width = 0.1;   // gaussian length scale: amp * exp(-((x-center)/width)^2)
    double center = 0.0;
    std::vector<double> samples;  // Kind::Custom only

    // Tumor-core default: 0.1 * exp(-x^2 / 0.01) seeded at the left boundary.
    static InitialCondition gaussian_bump(double amplitude = 0.1, double width = 0.1,
                                          double center = 0.0);
    // amplitude for x <= edge, zero beyond.
    static InitialCondition step(double amplitude, double edge);
    static InitialCondition custom(std::vector<double> samples);

    ScalarField evaluate(const SpatialGrid& grid) const;
};

// Output of the coupled competition solve. The aggregate is the weighted sum
// of the per-node fields at every grid point.
struct CoupledSolution {
    SpaceTimeField aggregate;
    std::vector<SpaceTimeField> per_node;
};

// du/dt = D u_xx + rho u (1 - u), zero-flux boundaries.
SpaceTimeField solve_fisher_kpp(const PhenotypeNode& node, const InitialCondition& ic,
                                const SpatialGrid& sgrid, const TimeGrid& tgrid,
                                OdeTols tols = {});

// The M coupled phenotype equations dc_i/dt = D_i c_i,xx + rho_i c_i (1 - u)
// with the shared crowding term u = sum_i w_i alpha_i c_i. Every phenotype
// starts from the same profile ic, so u(x,0) = ic(x).
CoupledSolution solve_coupled_competition(std::span<const PhenotypeNode> nodes,
                                          const WeightVector& weights,
                                          const InitialCondition& ic,
                                          const SpatialGrid& sgrid,
                                          const TimeGrid& tgrid, OdeTols tols = {});

// Same system started from one explicit profile per phenotype (used when the
// phenotype states at the start time are already known, e.g. continuing a
// solve from mid-trajectory states).
CoupledSolution solve_coupled_competition(std::span<const PhenotypeNode> nodes,
                                          const WeightVector& weights,
                                          std::span<const ScalarField> initial_states,
                                          const SpatialGrid& sgrid,
                                          const TimeGrid& tgrid, OdeTols tols = {});

// One phenotype driven by observed aggregate data instead of the coupled
// crowding term: dc/dt = D c_xx + rho c (1 - u_obs(x, t)) with u_obs linearly
// interpolated in time. The solve covers u_obs's full time grid from c0.
SpaceTimeField solve_phenotype_vs_data(const PhenotypeNode& node,
                                       const SpaceTimeField& u_obs,
                                       std::span<const double> c0, OdeTols tols = {});

// Pointwise weighted sum of per-node fields.
SpaceTimeField aggregate(const WeightVector& weights,
                         std::span<const SpaceTimeField> per_node);

}  // namespace rande

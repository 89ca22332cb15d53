#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace rande {

// Discrete (D, rho) node set over Omega_D x Omega_rho. Nodes are ordered
// row-major with D as the slow axis: node(i) = (D_nodes[i / n_rho],
// rho_nodes[i % n_rho]). build_mesh produces evenly spaced axes; meshes made
// by index subsampling keep strict monotonicity but may have uneven gaps.
struct ParameterMesh {
    std::vector<double> D_nodes;
    std::vector<double> rho_nodes;

    std::size_t size() const { return D_nodes.size() * rho_nodes.size(); }
    std::size_t index(std::size_t iD, std::size_t irho) const {
        return iD * rho_nodes.size() + irho;
    }
    std::pair<double, double> node(std::size_t i) const {
        return {D_nodes[i / rho_nodes.size()], rho_nodes[i % rho_nodes.size()]};
    }
    double max_D_spacing() const;
    double max_rho_spacing() const;

    void validate() const;  // strictly increasing, at least one node per axis
};

// M_D (resp. M_rho) evenly spaced nodes spanning the closed ranges, endpoints
// included.
ParameterMesh build_mesh(double D_min, double D_max, std::size_t M_D,
                         double rho_min, double rho_max, std::size_t M_rho);

// Nonnegative weights over mesh nodes summing to one: a discrete probability
// measure with one atom per node. Construction validates the simplex
// invariants (sum within 1e-12 of one).
class WeightVector {
public:
    explicit WeightVector(std::vector<double> w);
    static WeightVector delta(std::size_t dim, std::size_t atom);

    const std::vector<double>& values() const { return w_; }
    double operator[](std::size_t i) const { return w_[i]; }
    std::size_t size() const { return w_.size(); }

private:
    std::vector<double> w_;
};

struct GaussianComponent {
    double mean_D = 0.0;
    double std_D = 1.0;
    double mean_rho = 0.0;
    double std_rho = 1.0;
    double weight = 1.0;
};

// Mixture of axis-independent bivariate Gaussians (diagonal covariance).
struct GaussianMixtureSpec {
    std::vector<GaussianComponent> components;

    void validate() const;

    // Proliferative (D=0.01, rho=10) + invasive (D=0.1, rho=1) populations,
    // equal mass.
    static GaussianMixtureSpec two_population();
    // Same plus an intermediate population at (D=0.04, rho=5).
    static GaussianMixtureSpec three_population();
};

// Mixture density at (D, rho).
double mixture_density(const GaussianMixtureSpec& spec, double D, double rho);

// Discrete measure for the mixture: each component's density is evaluated at
// the nodes, normalized to unit mass on the mesh, and the components are
// mixed with their weights. Throws when a component's density vanishes on
// the whole mesh (mesh entirely in its far tails).
WeightVector discretize_mixture(const GaussianMixtureSpec& spec,
                                const ParameterMesh& mesh);

struct Sample {
    double D = 0.0;
    double rho = 0.0;
};
using SampleSet = std::vector<Sample>;

// H i.i.d. categorical draws of node coordinates; deterministic per seed.
SampleSet sample_weights(const WeightVector& weights, const ParameterMesh& mesh,
                         std::size_t H, std::uint64_t seed);

// Euclidean projection onto the probability simplex.
WeightVector project_to_simplex(std::span<const double> v);
void project_to_simplex_inplace(std::span<double> v);

// Uniform (flat Dirichlet) draw on the simplex; deterministic per seed.
WeightVector random_simplex(std::size_t dim, std::uint64_t seed);

}  // namespace rande

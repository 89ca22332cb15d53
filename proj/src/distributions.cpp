#include "rande/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "rande/rng.hpp"

namespace rande {

namespace {

double max_spacing(const std::vector<double>& nodes) {
    double m = 0.0;
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        m = std::max(m, nodes[i] - nodes[i - 1]);
    }
    return m;
}

void check_axis(const std::vector<double>& nodes, const char* name) {
    if (nodes.empty()) {
        throw std::invalid_argument(std::string("ParameterMesh: empty ") + name + " axis");
    }
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        if (!(nodes[i] > nodes[i - 1])) {
            throw std::invalid_argument(std::string("ParameterMesh: ") + name +
                                        " axis not strictly increasing");
        }
    }
}

}  // namespace

double ParameterMesh::max_D_spacing() const { return max_spacing(D_nodes); }
double ParameterMesh::max_rho_spacing() const { return max_spacing(rho_nodes); }

void ParameterMesh::validate() const {
    check_axis(D_nodes, "D");
    check_axis(rho_nodes, "rho");
}

ParameterMesh build_mesh(double D_min, double D_max, std::size_t M_D,
                         double rho_min, double rho_max, std::size_t M_rho) {
    if (M_D < 2 || M_rho < 2) {
        throw std::invalid_argument("build_mesh: need at least 2 nodes per axis");
    }
    if (!(D_max > D_min) || !(rho_max > rho_min)) {
        throw std::invalid_argument("build_mesh: degenerate parameter range");
    }
    ParameterMesh mesh;
    mesh.D_nodes.resize(M_D);
    mesh.rho_nodes.resize(M_rho);
    for (std::size_t i = 0; i < M_D; ++i) {
        mesh.D_nodes[i] = D_min + (D_max - D_min) * static_cast<double>(i) /
                                      static_cast<double>(M_D - 1);
    }
    mesh.D_nodes.back() = D_max;
    for (std::size_t i = 0; i < M_rho; ++i) {
        mesh.rho_nodes[i] = rho_min + (rho_max - rho_min) * static_cast<double>(i) /
                                          static_cast<double>(M_rho - 1);
    }
    mesh.rho_nodes.back() = rho_max;
    return mesh;
}

WeightVector::WeightVector(std::vector<double> w) : w_(std::move(w)) {
    if (w_.empty()) {
        throw std::invalid_argument("WeightVector: empty");
    }
    double sum = 0.0;
    for (double v : w_) {
        if (!(v >= 0.0)) {  // rejects negatives and NaN
            throw std::invalid_argument("WeightVector: negative or non-finite weight");
        }
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        throw std::invalid_argument("WeightVector: weights sum to " +
                                    std::to_string(sum) + ", expected 1");
    }
}

WeightVector WeightVector::delta(std::size_t dim, std::size_t atom) {
    std::vector<double> w(dim, 0.0);
    w.at(atom) = 1.0;
    return WeightVector(std::move(w));
}

void GaussianMixtureSpec::validate() const {
    if (components.empty()) {
        throw std::invalid_argument("GaussianMixtureSpec: no components");
    }
    double sum = 0.0;
    for (const auto& c : components) {
        if (!(c.std_D > 0.0) || !(c.std_rho > 0.0)) {
            throw std::invalid_argument("GaussianMixtureSpec: stds must be positive");
        }
        if (!(c.weight >= 0.0)) {
            throw std::invalid_argument("GaussianMixtureSpec: negative component weight");
        }
        sum += c.weight;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument("GaussianMixtureSpec: component weights must sum to 1");
    }
}

GaussianMixtureSpec GaussianMixtureSpec::two_population() {
    GaussianMixtureSpec spec;
    spec.components = {
        {0.01, 5e-4, 10.0, 1.0, 0.5},  // proliferative / grow
        {0.1, 1e-3, 1.0, 1.0, 0.5},    // invasive / go
    };
    return spec;
}

GaussianMixtureSpec GaussianMixtureSpec::three_population() {
    GaussianMixtureSpec spec;
    spec.components = {
        {0.01, 5e-4, 10.0, 1.0, 1.0 / 3.0},
        {0.04, 5e-4, 5.0, 1.0, 1.0 / 3.0},  // intermediate
        {0.1, 1e-3, 1.0, 1.0, 1.0 / 3.0},
    };
    return spec;
}

double mixture_density(const GaussianMixtureSpec& spec, double D, double rho) {
    spec.validate();
    constexpr double inv_sqrt_2pi = 0.3989422804014327;
    double density = 0.0;
    for (const auto& c : spec.components) {
        double zD = (D - c.mean_D) / c.std_D;
        double zr = (rho - c.mean_rho) / c.std_rho;
        double nD = inv_sqrt_2pi / c.std_D * std::exp(-0.5 * zD * zD);
        double nr = inv_sqrt_2pi / c.std_rho * std::exp(-0.5 * zr * zr);
        density += c.weight * nD * nr;
    }
    return density;
}

WeightVector discretize_mixture(const GaussianMixtureSpec& spec,
                                const ParameterMesh& mesh) {
    spec.validate();
    mesh.validate();
    // Each component is discretized to a probability vector on the mesh and
    // the vectors are mixed with the component weights. Normalizing per
    // component keeps every subpopulation's mass at its component weight even
    // when the mesh resolves the components unevenly (the D stds are far
    // below the node spacing on the standard meshes).
    std::vector<double> w(mesh.size(), 0.0);
    std::vector<double> comp(mesh.size());
    for (const auto& c : spec.components) {
        if (c.weight == 0.0) continue;
        constexpr double inv_sqrt_2pi = 0.3989422804014327;
        double sum = 0.0;
        for (std::size_t i = 0; i < comp.size(); ++i) {
            auto [D, rho] = mesh.node(i);
            double zD = (D - c.mean_D) / c.std_D;
            double zr = (rho - c.mean_rho) / c.std_rho;
            comp[i] = (inv_sqrt_2pi / c.std_D * std::exp(-0.5 * zD * zD)) *
                      (inv_sqrt_2pi / c.std_rho * std::exp(-0.5 * zr * zr));
            sum += comp[i];
        }
        if (!(sum > 0.0)) {
            throw std::invalid_argument(
                "discretize_mixture: a component's density vanishes on the whole mesh");
        }
        for (std::size_t i = 0; i < comp.size(); ++i) {
            w[i] += c.weight * comp[i] / sum;
        }
    }
    // Absorb rounding drift so the simplex invariant holds exactly enough.
    double s2 = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& v : w) v /= s2;
    return WeightVector(std::move(w));
}

SampleSet sample_weights(const WeightVector& weights, const ParameterMesh& mesh,
                         std::size_t H, std::uint64_t seed) {
    if (weights.size() != mesh.size()) {
        throw std::invalid_argument("sample_weights: weights do not match mesh");
    }
    if (H == 0) {
        throw std::invalid_argument("sample_weights: H must be positive");
    }
    std::vector<double> cumulative(weights.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        cumulative[i] = acc;
    }
    Rng rng(seed);
    SampleSet samples;
    samples.reserve(H);
    for (std::size_t i = 0; i < H; ++i) {
        std::size_t idx = rng.categorical(cumulative);
        auto [D, rho] = mesh.node(idx);
        samples.push_back({D, rho});
    }
    return samples;
}

void project_to_simplex_inplace(std::span<double> v) {
    const std::size_t n = v.size();
    // Sort-based projection (Held et al.): threshold tau so that
    // sum(max(v_i - tau, 0)) = 1.
    static thread_local std::vector<double> sorted;
    sorted.assign(v.begin(), v.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    double cumsum = 0.0;
    double tau = 0.0;
    std::size_t support = 0;
    for (std::size_t j = 0; j < n; ++j) {
        cumsum += sorted[j];
        double candidate = (cumsum - 1.0) / static_cast<double>(j + 1);
        if (sorted[j] - candidate > 0.0) {
            tau = candidate;
            support = j + 1;
        }
    }
    if (support == 0) {  // all equal and tiny; fall back to uniform
        for (double& x : v) x = 1.0 / static_cast<double>(n);
        return;
    }
    double sum = 0.0;
    for (double& x : v) {
        x = std::max(x - tau, 0.0);
        sum += x;
    }
    for (double& x : v) x /= sum;
}

WeightVector project_to_simplex(std::span<const double> v) {
    if (v.empty()) {
        throw std::invalid_argument("project_to_simplex: empty vector");
    }
    for (double x : v) {
        if (!std::isfinite(x)) {
            throw std::invalid_argument("project_to_simplex: non-finite input");
        }
    }
    std::vector<double> w(v.begin(), v.end());
    project_to_simplex_inplace(w);
    return WeightVector(std::move(w));
}

WeightVector random_simplex(std::size_t dim, std::uint64_t seed) {
    if (dim == 0) {
        throw std::invalid_argument("random_simplex: dim must be at least 1");
    }
    Rng rng(seed);
    std::vector<double> w(dim);
    double sum = 0.0;
    for (double& x : w) {
        x = -std::log(1.0 - rng.uniform());  // Exp(1) => flat Dirichlet
        sum += x;
    }
    for (double& x : w) x /= sum;
    double s2 = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& x : w) x /= s2;
    return WeightVector(std::move(w));
}

}  // namespace rande

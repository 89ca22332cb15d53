#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "rande/distributions.hpp"
#include "rande/grid.hpp"
#include "rande/models.hpp"
#include "rande/synthdata.hpp"

namespace rande {

struct BasisProvenance {
    std::string dataset_id;
    OdeTols tols{};
};

// Precomputed phenotype solutions c(x,t;D_i,rho_i) driven by the observed
// aggregate (one per mesh node, D-major order), all on the fit window's
// grids. Makes the weight-fit objective linear in the weights.
struct BasisLibrary {
    ParameterMesh mesh;
    std::vector<SpaceTimeField> solutions;
    BasisProvenance provenance;
};

// Solves every mesh node against the observed fit-window data, starting each
// phenotype from the observed profile at the first fit time (negative noise
// excursions clamped to zero). Node solves are independent and run on up to
// `threads` workers. node_seconds, when given, receives per-node solve times.
BasisLibrary build_basis_library(const SpaceTimeField& data_fit,
                                 const ParameterMesh& mesh, OdeTols tols,
                                 unsigned threads = 1,
                                 std::vector<double>* node_seconds = nullptr);

// Evenly spread index subset: round(linspace(0, source-1, target)),
// deduplicated, endpoints forced. Requires 2 <= target <= source.
std::vector<std::size_t> subsample_indices(std::size_t source, std::size_t target);

// Lower-resolution library over the selected node subset; solutions are
// shared values, never re-solved.
BasisLibrary subsample_library(const BasisLibrary& lib, std::size_t M_D,
                               std::size_t M_rho);

struct PrmfFitConfig {
    std::size_t n_starts = 20;
    double tol = 1e-10;        // relative objective change per iteration
    std::size_t max_iter = 5000;
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

struct PrmfFitResult {
    ParameterMesh mesh;           // the (possibly subsampled) mesh fitted on
    std::vector<double> weights;  // simplex point, one weight per node
    double sse_fit = 0.0;
    double aic = 0.0;
    bool converged = true;
    std::vector<double> per_start_sse;

    std::size_t M_D() const { return mesh.D_nodes.size(); }
    std::size_t M_rho() const { return mesh.rho_nodes.size(); }
    std::size_t n_params() const { return mesh.size(); }
};

// Minimizes sum_{j,k} [u_obs - sum_i w_i c_i]^2 over the simplex. The
// objective is a convex quadratic in w, so accelerated projected gradient
// (with adaptive restart) converges to the global optimum; an active-set
// refinement then solves the identified face exactly. Runs n_starts random
// initializations and returns the best; deterministic per seed.
PrmfFitResult fit_prmf(const BasisLibrary& lib, const SpaceTimeField& data_fit,
                       const PrmfFitConfig& config);

// AIC = n ln(sse/n) + 2 (p + 1). Returns -inf for sse == 0 (degenerate,
// noiseless data). Requires n_obs > n_params.
double compute_aic(double sse, std::size_t n_obs, std::size_t n_params);

// Minimum-AIC result; ties go to fewer parameters, then lexicographic dims.
const PrmfFitResult& select_model(std::span<const PrmfFitResult> results);

// Admissible box Q for the pointwise fits.
struct ParameterBox {
    double D_min = 0.0, D_max = 0.12;
    double rho_min = 0.0, rho_max = 12.0;
};

// An explicit starting point in parameter space (e.g. a padded optimum from
// a smaller model).
struct PointwiseStart {
    std::vector<PhenotypeNode> nodes;
    std::vector<double> weights;
};

struct PointwiseFitConfig {
    std::size_t M = 2;  // subpopulation count
    ParameterBox bounds;
    std::size_t n_starts = 20;
    std::size_t max_evals = 0;  // per start; 0 -> 200 * dimension
    double tol = 1e-8;          // relative objective spread of the simplex
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::vector<PointwiseStart> extra_starts;  // tried before the random ones
};

struct PointwiseFitResult {
    std::vector<PhenotypeNode> nodes;
    std::vector<double> weights;  // normalized to sum 1
    double sse_fit = 0.0;
    double aic = 0.0;
    std::vector<double> per_start_sse;
    std::size_t n_evals = 0;
};

// Pointwise M-subpopulation fit by Nelder-Mead simplex search in a
// transformed space (logistic maps for the box bounds, softmax for the
// weights). Every objective evaluation runs the coupled competition solve on
// the fit window, starting all phenotypes from the observed initial profile.
PointwiseFitResult fit_pointwise(const SpaceTimeField& data_fit,
                                 const PointwiseFitConfig& config, OdeTols tols);

// Warm start for a larger model: the smaller fit's phenotypes plus
// mid-box filler nodes carrying negligible weight.
PointwiseStart pad_pointwise_start(const PointwiseFitResult& smaller,
                                   std::size_t M_target, const ParameterBox& bounds);

// Forecast from fitted weights: re-solves the self-consistent coupled system
// (not the data-driven one) from t = 0 over the full horizon. Nodes with
// exactly zero weight do not influence the aggregate and are skipped.
SpaceTimeField predict_rande(const WeightVector& weights, const ParameterMesh& mesh,
                             const InitialCondition& ic, const SpatialGrid& sgrid,
                             const TimeGrid& tgrid, OdeTols tols = {});

// Library directory: library.json + one c_<iD>_<irho>.csv per node.
void write_library(const BasisLibrary& lib, const std::filesystem::path& dir);
BasisLibrary read_library(const std::filesystem::path& dir);

}  // namespace rande

#include "rande/estimation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "rande/io_util.hpp"
#include "rande/json_io.hpp"
#include "rande/parallel.hpp"
#include "rande/rng.hpp"

namespace rande {

namespace {

ScalarField clamped_initial_profile(const SpaceTimeField& data_fit) {
    ScalarField c0(data_fit.row(0).begin(), data_fit.row(0).end());
    for (double& v : c0) v = std::clamp(v, 0.0, 1.0);
    return c0;
}

}  // namespace

BasisLibrary build_basis_library(const SpaceTimeField& data_fit,
                                 const ParameterMesh& mesh, OdeTols tols,
                                 unsigned threads, std::vector<double>* node_seconds) {
    data_fit.validate();
    mesh.validate();
    if (data_fit.n_t() < 2) {
        throw std::invalid_argument("build_basis_library: fit window needs at least 2 times");
    }
    ScalarField c0 = clamped_initial_profile(data_fit);

    BasisLibrary lib;
    lib.mesh = mesh;
    lib.provenance.tols = tols;
    lib.solutions.resize(mesh.size());
    if (node_seconds) node_seconds->assign(mesh.size(), 0.0);
    parallel_for(mesh.size(), threads, [&](std::size_t i) {
        auto [D, rho] = mesh.node(i);
        auto begin = std::chrono::steady_clock::now();
        try {
            lib.solutions[i] =
                solve_phenotype_vs_data({D, rho, 1.0}, data_fit, c0, tols);
            if (node_seconds) {
                (*node_seconds)[i] = std::chrono::duration<double>(
                                         std::chrono::steady_clock::now() - begin)
                                         .count();
            }
        } catch (const SolverFailure& e) {
            std::size_t iD = i / mesh.rho_nodes.size();
            std::size_t irho = i % mesh.rho_nodes.size();
            throw SolverFailure("basis node (" + std::to_string(iD) + ", " +
                                    std::to_string(irho) + ") with D = " +
                                    std::to_string(D) + ", rho = " + std::to_string(rho) +
                                    " failed: " + e.what(),
                                e.t_last());
        }
    });
    return lib;
}

std::vector<std::size_t> subsample_indices(std::size_t source, std::size_t target) {
    if (target < 2 || target > source) {
        throw std::invalid_argument("subsample_indices: need 2 <= target <= source");
    }
    std::vector<std::size_t> idx;
    idx.reserve(target);
    for (std::size_t i = 0; i < target; ++i) {
        double pos = static_cast<double>(i) * static_cast<double>(source - 1) /
                     static_cast<double>(target - 1);
        idx.push_back(static_cast<std::size_t>(std::llround(pos)));
    }
    idx.front() = 0;
    idx.back() = source - 1;
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    return idx;
}

BasisLibrary subsample_library(const BasisLibrary& lib, std::size_t M_D,
                               std::size_t M_rho) {
    const std::size_t srcD = lib.mesh.D_nodes.size();
    const std::size_t srcR = lib.mesh.rho_nodes.size();
    if (M_D > srcD || M_rho > srcR) {
        throw std::invalid_argument("subsample_library: requested dims exceed the source mesh");
    }
    auto iD = subsample_indices(srcD, M_D);
    auto iR = subsample_indices(srcR, M_rho);

    BasisLibrary sub;
    sub.provenance = lib.provenance;
    sub.mesh.D_nodes.reserve(iD.size());
    for (std::size_t a : iD) sub.mesh.D_nodes.push_back(lib.mesh.D_nodes[a]);
    sub.mesh.rho_nodes.reserve(iR.size());
    for (std::size_t b : iR) sub.mesh.rho_nodes.push_back(lib.mesh.rho_nodes[b]);
    sub.solutions.reserve(iD.size() * iR.size());
    for (std::size_t a : iD) {
        for (std::size_t b : iR) {
            sub.solutions.push_back(lib.solutions[lib.mesh.index(a, b)]);
        }
    }
    return sub;
}

namespace {

struct QuadraticObjective {
    const Eigen::MatrixXd& G;
    const Eigen::VectorXd& b;
    double dd;

    double operator()(const Eigen::VectorXd& w) const {
        return w.dot(G * w) - 2.0 * b.dot(w) + dd;
    }
};

double power_iteration_max_eig(const Eigen::MatrixXd& G) {
    const auto n = G.rows();
    Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(double(n)));
    double lambda = 0.0;
    for (int it = 0; it < 100; ++it) {
        Eigen::VectorXd gv = G * v;
        double nrm = gv.norm();
        if (nrm <= 0.0) return 0.0;
        v = gv / nrm;
        lambda = nrm;
    }
    return lambda;
}

// Accelerated projected gradient with function-value restart on the simplex.
// Returns the best iterate; sets `converged` when the relative objective
// change dropped below tol before max_iter.
Eigen::VectorXd fista_simplex(const Eigen::MatrixXd& G, const Eigen::VectorXd& b,
                              double dd, const Eigen::VectorXd& w0, double lip,
                              std::size_t max_iter, double tol, bool& converged) {
    QuadraticObjective f{G, b, dd};
    const double step = lip > 0.0 ? 1.0 / lip : 1.0;
    Eigen::VectorXd w = w0;
    Eigen::VectorXd v = w0;
    Eigen::VectorXd w_new(w.size());
    double theta = 1.0;
    double f_w = f(w);
    converged = false;

    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        w_new = v - step * 2.0 * (G * v - b);
        project_to_simplex_inplace({w_new.data(), static_cast<std::size_t>(w_new.size())});
        double f_new = f(w_new);
        if (f_new > f_w) {
            // momentum overshot: restart from the last good point
            v = w;
            theta = 1.0;
            Eigen::VectorXd probe = w - step * 2.0 * (G * w - b);
            project_to_simplex_inplace({probe.data(), static_cast<std::size_t>(probe.size())});
            double f_probe = f(probe);
            if (f_probe > f_w) {  // plain gradient step cannot improve: done
                converged = true;
                break;
            }
            w_new = probe;
            f_new = f_probe;
        }
        double theta_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
        v = w_new + ((theta - 1.0) / theta_new) * (w_new - w);
        double df = std::abs(f_w - f_new);
        w = w_new;
        theta = theta_new;
        bool small_change = df <= tol * std::max(f_new, 0.0) + 1e-300;
        f_w = f_new;
        if (small_change) {
            converged = true;
            break;
        }
    }
    return w;
}

// Equality-constrained minimizer on the face spanned by `support`: solves
// the KKT system [2 G_SS, 1; 1^T, 0] [w; lambda] = [2 b_S; 1]. Returns false
// when the solve degenerates. On success mu receives the face's stationarity
// value (the common gradient component on the support).
bool solve_face(const Eigen::MatrixXd& G, const Eigen::VectorXd& b,
                const std::vector<Eigen::Index>& support, Eigen::VectorXd& wS,
                double& mu) {
    const auto k = static_cast<Eigen::Index>(support.size());
    Eigen::MatrixXd A(k + 1, k + 1);
    Eigen::VectorXd rhs(k + 1);
    for (Eigen::Index r = 0; r < k; ++r) {
        for (Eigen::Index c = 0; c < k; ++c) {
            A(r, c) = 2.0 * G(support[r], support[c]);
        }
        A(r, k) = 1.0;
        A(k, r) = 1.0;
        rhs[r] = 2.0 * b[support[r]];
    }
    A(k, k) = 0.0;
    rhs[k] = 1.0;
    Eigen::VectorXd sol = A.colPivHouseholderQr().solve(rhs);
    if (!sol.allFinite()) return false;
    wS = sol.head(k);
    mu = -sol[k];  // gradient component 2(Gw - b)_i on the support
    return true;
}

// One face-polish pass: exact equality-constrained solve on the current
// support, shrinking by the most negative coordinate while infeasible.
// Returns true and writes the candidate when a feasible face solution comes
// out; the caller keeps it only if the objective improves.
bool face_polish(const Eigen::MatrixXd& G, const Eigen::VectorXd& b,
                 const Eigen::VectorXd& w, Eigen::VectorXd& candidate) {
    std::vector<Eigen::Index> support;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        if (w[i] > 1e-12) support.push_back(i);
    }
    double mu = 0.0;
    Eigen::VectorXd wS;
    while (!support.empty()) {
        if (!solve_face(G, b, support, wS, mu)) return false;
        Eigen::Index worst = -1;
        double worst_val = -1e-12;
        for (Eigen::Index r = 0; r < wS.size(); ++r) {
            if (wS[r] < worst_val) {
                worst_val = wS[r];
                worst = r;
            }
        }
        if (worst < 0) {
            candidate = Eigen::VectorXd::Zero(w.size());
            double sum = 0.0;
            for (std::size_t r = 0; r < support.size(); ++r) {
                double v = std::max(wS[static_cast<Eigen::Index>(r)], 0.0);
                candidate[support[r]] = v;
                sum += v;
            }
            if (!(sum > 0.0)) return false;
            candidate /= sum;
            return true;
        }
        support.erase(support.begin() + worst);
    }
    return false;
}

// Pairwise-exchange descent on the simplex: repeatedly shift mass from the
// active coordinate with the largest gradient to the coordinate with the
// smallest. Each step is the exact 1D minimizer, so the objective is
// monotone; the KKT gap max_{w_i>0} g_i - min_j g_j bounds the remaining
// suboptimality f(w) - f* directly, giving a global-optimality certificate
// for this convex problem. Returns the final gap.
double pair_exchange(const Eigen::MatrixXd& G, const Eigen::VectorXd& b,
                     Eigen::VectorXd& w, double gap_tol, std::size_t max_steps) {
    const auto M = w.size();
    Eigen::VectorXd Gw = G * w;
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t step = 0; step < max_steps; ++step) {
        if (step % 512 == 511) Gw = G * w;  // control drift from rank-1 updates
        Eigen::Index hi = -1, lo = -1;
        double g_hi = -std::numeric_limits<double>::infinity();
        double g_lo = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < M; ++i) {
            double gi = 2.0 * (Gw[i] - b[i]);
            if (gi < g_lo) {
                g_lo = gi;
                lo = i;
            }
            if (w[i] > 0.0 && gi > g_hi) {
                g_hi = gi;
                hi = i;
            }
        }
        gap = g_hi - g_lo;
        if (!(gap > gap_tol) || hi == lo) return std::max(gap, 0.0);

        double curv = 2.0 * (G(lo, lo) - 2.0 * G(hi, lo) + G(hi, hi));
        double t = curv > 0.0 ? std::min(w[hi], gap / curv) : w[hi];
        double df = -gap * t + 0.5 * curv * t * t;
        if (!(df < 0.0) || !(t > 0.0)) return std::max(gap, 0.0);
        w[lo] += t;
        w[hi] -= t;
        if (w[hi] < 0.0) w[hi] = 0.0;
        Gw += t * (G.col(lo) - G.col(hi));
    }
    return std::max(gap, 0.0);
}

// Drives the iterate to the global optimum: alternating exchange descent
// (with its optimality certificate) and exact face solves. Every candidate
// is accepted only when the quadratic objective improves, so the result is
// never worse than the input. Returns true when the certificate held.
bool refine_simplex_qp(const Eigen::MatrixXd& G, const Eigen::VectorXd& b, double dd,
                       Eigen::VectorXd& w, double gap_tol) {
    QuadraticObjective f{G, b, dd};
    double f_best = f(w);
    bool certified = false;
    for (int round = 0; round < 6; ++round) {
        Eigen::VectorXd candidate;
        if (face_polish(G, b, w, candidate)) {
            double fc = f(candidate);
            if (fc < f_best) {
                w = candidate;
                f_best = fc;
            }
        }
        Eigen::VectorXd trial = w;
        double gap = pair_exchange(G, b, trial, gap_tol, 50000);
        double ft = f(trial);
        if (ft < f_best) {
            w = trial;
            f_best = ft;
        }
        if (gap <= gap_tol) {
            certified = true;
            break;
        }
    }
    return certified;
}

}  // namespace

PrmfFitResult fit_prmf(const BasisLibrary& lib, const SpaceTimeField& data_fit,
                       const PrmfFitConfig& config) {
    const std::size_t M = lib.mesh.size();
    if (lib.solutions.size() != M || M == 0) {
        throw std::invalid_argument("fit_prmf: library has no solutions");
    }
    const SpaceTimeField& ref = lib.solutions.front();
    if (!(ref.time == data_fit.time) || !(ref.space == data_fit.space)) {
        throw std::invalid_argument("fit_prmf: library and data grids differ");
    }
    const std::size_t n_obs = data_fit.values.size();

    Eigen::MatrixXd C(n_obs, M);
    for (std::size_t i = 0; i < M; ++i) {
        C.col(static_cast<Eigen::Index>(i)) = Eigen::Map<const Eigen::VectorXd>(
            lib.solutions[i].values.data(), static_cast<Eigen::Index>(n_obs));
    }
    Eigen::Map<const Eigen::VectorXd> d(data_fit.values.data(),
                                        static_cast<Eigen::Index>(n_obs));

    PrmfFitResult result;
    result.mesh = lib.mesh;

    auto residual_sse = [&](const Eigen::VectorXd& w) {
        return (d - C * w).squaredNorm();
    };

    if (M == 1) {
        result.weights = {1.0};
        result.sse_fit = residual_sse(Eigen::VectorXd::Ones(1));
        result.aic = compute_aic(result.sse_fit, n_obs, 1);
        result.per_start_sse = {result.sse_fit};
        return result;
    }

    Eigen::MatrixXd G = C.transpose() * C;
    Eigen::VectorXd b = C.transpose() * d;
    const double dd = d.squaredNorm();
    const double lip = 2.0 * power_iteration_max_eig(G) * 1.01;

    struct StartOutcome {
        Eigen::VectorXd w;
        double sse = std::numeric_limits<double>::infinity();
        bool converged = false;
    };
    std::vector<StartOutcome> outcomes(config.n_starts);
    std::vector<std::uint64_t> seeds(config.n_starts);
    for (std::size_t s = 0; s < config.n_starts; ++s) {
        seeds[s] = derive_seed(config.seed, "prmf_start:" + std::to_string(s));
    }

    const double gap_tol = 1e-12 * (dd + 1.0);
    parallel_for(config.n_starts, config.threads, [&](std::size_t s) {
        WeightVector w0 = random_simplex(M, seeds[s]);
        Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(
            w0.values().data(), static_cast<Eigen::Index>(M));
        bool conv = false;
        w = fista_simplex(G, b, dd, w, lip, config.max_iter, config.tol, conv);
        bool certified = refine_simplex_qp(G, b, dd, w, gap_tol);
        outcomes[s] = {w, residual_sse(w), conv || certified};
    });

    std::size_t best = 0;
    result.per_start_sse.resize(config.n_starts);
    for (std::size_t s = 0; s < config.n_starts; ++s) {
        result.per_start_sse[s] = outcomes[s].sse;
        if (outcomes[s].sse < outcomes[best].sse) best = s;
    }
    const Eigen::VectorXd& w = outcomes[best].w;
    result.weights.assign(w.data(), w.data() + w.size());
    result.sse_fit = outcomes[best].sse;
    result.converged = outcomes[best].converged;
    result.aic = compute_aic(result.sse_fit, n_obs, M);
    return result;
}

double compute_aic(double sse, std::size_t n_obs, std::size_t n_params) {
    if (!(sse >= 0.0)) {
        throw std::invalid_argument("compute_aic: sse must be nonnegative");
    }
    if (n_obs <= n_params) {
        throw std::invalid_argument("compute_aic: need more observations than parameters");
    }
    const double penalty = 2.0 * (static_cast<double>(n_params) + 1.0);
    if (sse == 0.0) {
        return -std::numeric_limits<double>::infinity();
    }
    const double n = static_cast<double>(n_obs);
    return n * std::log(sse / n) + penalty;
}

const PrmfFitResult& select_model(std::span<const PrmfFitResult> results) {
    if (results.empty()) {
        throw std::invalid_argument("select_model: no candidates");
    }
    auto better = [](const PrmfFitResult& a, const PrmfFitResult& b) {
        double aic_a = std::isnan(a.aic) ? std::numeric_limits<double>::infinity() : a.aic;
        double aic_b = std::isnan(b.aic) ? std::numeric_limits<double>::infinity() : b.aic;
        if (aic_a != aic_b) return aic_a < aic_b;
        if (a.n_params() != b.n_params()) return a.n_params() < b.n_params();
        if (a.M_D() != b.M_D()) return a.M_D() < b.M_D();
        return a.M_rho() < b.M_rho();
    };
    const PrmfFitResult* best = &results[0];
    for (const auto& r : results.subspan(1)) {
        if (better(r, *best)) best = &r;
    }
    return *best;
}

namespace {

// Bounded Nelder-Mead working in an unconstrained space:
//   D_i, rho_i -> logistic map onto the box; weights -> softmax with the last
//   logit pinned to zero. Dimension is 3M - 1 (2 for M = 1).
struct PointwiseTransform {
    std::size_t M;
    ParameterBox box;

    std::size_t dim() const { return M == 1 ? 2 : 3 * M - 1; }

    static double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }
    static double logit(double p) {
        p = std::clamp(p, 1e-9, 1.0 - 1e-9);
        return std::log(p / (1.0 - p));
    }

    void decode(std::span<const double> theta, std::vector<PhenotypeNode>& nodes,
                std::vector<double>& weights) const {
        nodes.resize(M);
        weights.assign(M, 1.0);
        for (std::size_t i = 0; i < M; ++i) {
            nodes[i].D = box.D_min + (box.D_max - box.D_min) * sigmoid(theta[i]);
            nodes[i].rho =
                box.rho_min + (box.rho_max - box.rho_min) * sigmoid(theta[M + i]);
            nodes[i].alpha = 1.0;
        }
        if (M > 1) {
            double max_logit = 0.0;
            for (std::size_t i = 0; i + 1 < M; ++i) {
                max_logit = std::max(max_logit, theta[2 * M + i]);
            }
            double sum = 0.0;
            for (std::size_t i = 0; i < M; ++i) {
                double logit_i = (i + 1 < M) ? theta[2 * M + i] : 0.0;
                weights[i] = std::exp(logit_i - max_logit);
                sum += weights[i];
            }
            for (double& v : weights) v /= sum;
        }
        double s2 = std::accumulate(weights.begin(), weights.end(), 0.0);
        for (double& v : weights) v /= s2;
    }

    std::vector<double> encode(const std::vector<PhenotypeNode>& nodes,
                               const std::vector<double>& weights) const {
        std::vector<double> theta(dim(), 0.0);
        for (std::size_t i = 0; i < M; ++i) {
            theta[i] = logit((nodes[i].D - box.D_min) / (box.D_max - box.D_min));
            theta[M + i] =
                logit((nodes[i].rho - box.rho_min) / (box.rho_max - box.rho_min));
        }
        if (M > 1) {
            double wM = std::max(weights[M - 1], 1e-12);
            for (std::size_t i = 0; i + 1 < M; ++i) {
                theta[2 * M + i] = std::log(std::max(weights[i], 1e-12) / wM);
            }
        }
        return theta;
    }
};

struct NelderMeadOutcome {
    std::vector<double> theta;
    double f = std::numeric_limits<double>::infinity();
    std::size_t evals = 0;
};

NelderMeadOutcome nelder_mead(const std::function<double(std::span<const double>)>& f,
                              std::vector<double> x0, double step,
                              std::size_t max_evals, double tol) {
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> xs(n + 1, x0);
    std::vector<double> fs(n + 1);
    for (std::size_t i = 0; i < n; ++i) xs[i + 1][i] += step;

    NelderMeadOutcome out;
    auto eval = [&](std::span<const double> x) {
        double v = f(x);
        ++out.evals;
        if (v < out.f) {
            out.f = v;
            out.theta.assign(x.begin(), x.end());
        }
        return v;
    };
    for (std::size_t i = 0; i <= n; ++i) fs[i] = eval(xs[i]);

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);
    while (out.evals < max_evals) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
        const std::size_t lo = order[0], hi = order[n], second_hi = order[n - 1];
        if (std::isfinite(fs[lo]) &&
            fs[hi] - fs[lo] <= tol * (std::abs(fs[lo]) + 1e-30)) {
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == hi) continue;
            for (std::size_t k = 0; k < n; ++k) centroid[k] += xs[i][k];
        }
        for (double& c : centroid) c /= static_cast<double>(n);

        for (std::size_t k = 0; k < n; ++k) xr[k] = centroid[k] + (centroid[k] - xs[hi][k]);
        double fr = eval(xr);
        if (fr < fs[lo]) {
            for (std::size_t k = 0; k < n; ++k) xe[k] = centroid[k] + 2.0 * (centroid[k] - xs[hi][k]);
            double fe = eval(xe);
            if (fe < fr) {
                xs[hi] = xe;
                fs[hi] = fe;
            } else {
                xs[hi] = xr;
                fs[hi] = fr;
            }
        } else if (fr < fs[second_hi]) {
            xs[hi] = xr;
            fs[hi] = fr;
        } else {
            bool outside = fr < fs[hi];
            if (outside) {
                for (std::size_t k = 0; k < n; ++k) xc[k] = centroid[k] + 0.5 * (xr[k] - centroid[k]);
            } else {
                for (std::size_t k = 0; k < n; ++k) xc[k] = centroid[k] - 0.5 * (centroid[k] - xs[hi][k]);
            }
            double fc = eval(xc);
            if (fc < std::min(fr, fs[hi])) {
                xs[hi] = xc;
                fs[hi] = fc;
            } else {  // shrink toward the best vertex
                for (std::size_t i = 0; i <= n; ++i) {
                    if (i == lo) continue;
                    for (std::size_t k = 0; k < n; ++k) {
                        xs[i][k] = xs[lo][k] + 0.5 * (xs[i][k] - xs[lo][k]);
                    }
                    fs[i] = eval(xs[i]);
                    if (out.evals >= max_evals) break;
                }
            }
        }
    }
    return out;
}

}  // namespace

PointwiseFitResult fit_pointwise(const SpaceTimeField& data_fit,
                                 const PointwiseFitConfig& config, OdeTols tols) {
    if (config.M == 0) {
        throw std::invalid_argument("fit_pointwise: M must be at least 1");
    }
    if (!(config.bounds.D_max > config.bounds.D_min) ||
        !(config.bounds.rho_max > config.bounds.rho_min)) {
        throw std::invalid_argument("fit_pointwise: degenerate bounds");
    }
    data_fit.validate();

    PointwiseTransform transform{config.M, config.bounds};
    const std::size_t dim = transform.dim();
    const std::size_t max_evals =
        config.max_evals == 0 ? 200 * dim : config.max_evals;

    InitialCondition ic = InitialCondition::custom(clamped_initial_profile(data_fit));
    Eigen::Map<const Eigen::VectorXd> d(data_fit.values.data(),
                                        static_cast<Eigen::Index>(data_fit.values.size()));

    auto objective = [&](std::span<const double> theta) -> double {
        std::vector<PhenotypeNode> nodes;
        std::vector<double> weights;
        transform.decode(theta, nodes, weights);
        try {
            CoupledSolution sol = solve_coupled_competition(
                nodes, WeightVector(weights), ic, data_fit.space, data_fit.time, tols);
            Eigen::Map<const Eigen::VectorXd> u(
                sol.aggregate.values.data(),
                static_cast<Eigen::Index>(sol.aggregate.values.size()));
            return (d - u).squaredNorm();
        } catch (const SolverFailure&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    // Explicit starts first, then random uniform-in-Q starts.
    std::vector<std::vector<double>> starts;
    for (const auto& s : config.extra_starts) {
        if (s.nodes.size() != config.M || s.weights.size() != config.M) {
            throw std::invalid_argument("fit_pointwise: extra start has wrong subpopulation count");
        }
        starts.push_back(transform.encode(s.nodes, s.weights));
    }
    for (std::size_t s = 0; s < config.n_starts; ++s) {
        Rng rng(derive_seed(config.seed, "pde_start:" + std::to_string(s)));
        std::vector<PhenotypeNode> nodes(config.M);
        for (auto& n : nodes) {
            n.D = config.bounds.D_min +
                  (config.bounds.D_max - config.bounds.D_min) * rng.uniform();
            n.rho = config.bounds.rho_min +
                    (config.bounds.rho_max - config.bounds.rho_min) * rng.uniform();
        }
        std::vector<double> w(config.M, 1.0 / static_cast<double>(config.M));
        if (config.M > 1) {
            w = random_simplex(config.M,
                               derive_seed(config.seed, "pde_w:" + std::to_string(s)))
                    .values();
        }
        starts.push_back(transform.encode(nodes, w));
    }

    std::vector<NelderMeadOutcome> outcomes(starts.size());
    parallel_for(starts.size(), config.threads, [&](std::size_t s) {
        outcomes[s] = nelder_mead(objective, starts[s], 0.5, max_evals, config.tol);
    });

    std::size_t best = 0;
    PointwiseFitResult result;
    result.per_start_sse.resize(starts.size());
    for (std::size_t s = 0; s < starts.size(); ++s) {
        result.per_start_sse[s] = outcomes[s].f;
        result.n_evals += outcomes[s].evals;
        if (outcomes[s].f < outcomes[best].f) best = s;
    }
    if (!std::isfinite(outcomes[best].f)) {
        std::string diag = "fit_pointwise: every start failed;";
        for (std::size_t s = 0; s < starts.size(); ++s) {
            diag += " start " + std::to_string(s) + ": sse = " +
                    std::to_string(outcomes[s].f) + ";";
        }
        throw std::runtime_error(diag);
    }

    transform.decode(outcomes[best].theta, result.nodes, result.weights);
    result.sse_fit = outcomes[best].f;
    result.aic = compute_aic(result.sse_fit, data_fit.values.size(), 3 * config.M);
    return result;
}

PointwiseStart pad_pointwise_start(const PointwiseFitResult& smaller,
                                   std::size_t M_target, const ParameterBox& bounds) {
    if (smaller.nodes.size() > M_target) {
        throw std::invalid_argument("pad_pointwise_start: target smaller than source");
    }
    PointwiseStart start;
    start.nodes = smaller.nodes;
    start.weights = smaller.weights;
    while (start.nodes.size() < M_target) {
        start.nodes.push_back({0.5 * (bounds.D_min + bounds.D_max),
                               0.5 * (bounds.rho_min + bounds.rho_max), 1.0});
        start.weights.push_back(1e-12);
    }
    double sum = std::accumulate(start.weights.begin(), start.weights.end(), 0.0);
    for (double& w : start.weights) w /= sum;
    return start;
}

SpaceTimeField predict_rande(const WeightVector& weights, const ParameterMesh& mesh,
                             const InitialCondition& ic, const SpatialGrid& sgrid,
                             const TimeGrid& tgrid, OdeTols tols) {
    if (weights.size() != mesh.size()) {
        throw std::invalid_argument("predict_rande: weights do not match mesh");
    }
    std::vector<PhenotypeNode> nodes;
    std::vector<double> active;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] == 0.0) continue;
        auto [D, rho] = mesh.node(i);
        nodes.push_back({D, rho, 1.0});
        active.push_back(weights[i]);
    }
    CoupledSolution sol = solve_coupled_competition(
        nodes, WeightVector(std::move(active)), ic, sgrid, tgrid, tols);
    return std::move(sol.aggregate);
}

void write_library(const BasisLibrary& lib, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const SpaceTimeField& ref = lib.solutions.at(0);
    nlohmann::json meta = {
        {"mesh", lib.mesh},
        {"time", ref.time},
        {"space", ref.space},
        {"dataset_id", lib.provenance.dataset_id},
        {"tols", lib.provenance.tols},
    };
    atomic_write_text(dir / "library.json", meta.dump(2) + "\n");
    for (std::size_t a = 0; a < lib.mesh.D_nodes.size(); ++a) {
        for (std::size_t b = 0; b < lib.mesh.rho_nodes.size(); ++b) {
            const auto& f = lib.solutions[lib.mesh.index(a, b)];
            write_matrix_csv(dir / ("c_" + std::to_string(a) + "_" + std::to_string(b) +
                                    ".csv"),
                             f.values, f.n_t(), f.n_x());
        }
    }
}

BasisLibrary read_library(const std::filesystem::path& dir) {
    nlohmann::json meta = nlohmann::json::parse(read_text(dir / "library.json"));
    BasisLibrary lib;
    meta.at("mesh").get_to(lib.mesh);
    TimeGrid time = meta.at("time").get<TimeGrid>();
    SpatialGrid space = meta.at("space").get<SpatialGrid>();
    lib.provenance.dataset_id = meta.value("dataset_id", "");
    if (meta.contains("tols")) meta.at("tols").get_to(lib.provenance.tols);
    lib.solutions.reserve(lib.mesh.size());
    for (std::size_t a = 0; a < lib.mesh.D_nodes.size(); ++a) {
        for (std::size_t b = 0; b < lib.mesh.rho_nodes.size(); ++b) {
            auto values = read_matrix_csv(
                dir / ("c_" + std::to_string(a) + "_" + std::to_string(b) + ".csv"),
                time.n_points, space.n_points);
            lib.solutions.emplace_back(time, space, std::move(values));
        }
    }
    return lib;
}

}  // namespace rande

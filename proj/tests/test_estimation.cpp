#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <stdexcept>

#include "rande/estimation.hpp"
#include "rande/rng.hpp"

using namespace rande;

namespace {

DataSetSpec small_spec(double sigma = 0.01) {
    DataSetSpec spec;
    spec.space = SpatialGrid(0.0, 1.0, 31);
    spec.time = TimeGrid(0.0, 1.0, 11);
    spec.gen_M_D = 4;
    spec.gen_M_rho = 4;
    spec.t_split = 0.6;
    spec.sigma = sigma;
    spec.seed = 404;
    return spec;
}

double basis_combination_sse(const BasisLibrary& lib, const std::vector<double>& w,
                             const SpaceTimeField& data) {
    double s = 0.0;
    for (std::size_t c = 0; c < data.values.size(); ++c) {
        double u = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            u += w[i] * lib.solutions[i].values[c];
        }
        double d = u - data.values[c];
        s += d * d;
    }
    return s;
}

}  // namespace

TEST_CASE("basis node with D = 0 and rho = 0 stays at its initial profile") {
    auto data = generate_dataset(small_spec());
    auto fit = data.fit_window();
    ParameterMesh mesh = build_mesh(0.0, 0.1, 2, 0.0, 5.0, 2);
    auto lib = build_basis_library(fit, mesh, {}, 1);
    REQUIRE(lib.solutions.size() == 4);
    const auto& frozen = lib.solutions[mesh.index(0, 0)];  // node (0, 0)
    for (std::size_t j = 0; j < frozen.n_t(); ++j) {
        for (std::size_t k = 0; k < frozen.n_x(); ++k) {
            CHECK(frozen.at(j, k) == doctest::Approx(frozen.at(0, k)).epsilon(1e-9));
        }
    }
}

TEST_CASE("a 20x20 mesh yields 400 cached solutions") {
    auto data = generate_dataset(small_spec());
    auto fit = data.fit_window();
    ParameterMesh mesh = build_mesh(0.0, 0.12, 20, 0.0, 12.0, 20);
    std::vector<double> node_seconds;
    auto lib = build_basis_library(fit, mesh, {}, 1, &node_seconds);
    CHECK(lib.solutions.size() == 400);
    CHECK(node_seconds.size() == 400);
    for (const auto& f : lib.solutions) {
        CHECK(f.time == fit.time);
        CHECK(f.space == fit.space);
    }
}

TEST_CASE("basis solution at a single-phenotype dataset's node matches the data") {
    SpatialGrid sg(0.0, 2.0, 101);
    TimeGrid tg(0.0, 1.0, 201);
    PhenotypeNode node{0.02, 1.0, 1.0};
    auto clean = solve_fisher_kpp(node, InitialCondition::gaussian_bump(), sg, tg, {});
    ScalarField c0(clean.row(0).begin(), clean.row(0).end());
    auto basis = solve_phenotype_vs_data(node, clean, c0, {});
    double max_err = 0.0;
    for (std::size_t i = 0; i < clean.values.size(); ++i) {
        max_err = std::max(max_err, std::abs(clean.values[i] - basis.values[i]));
    }
    CHECK(max_err < 1e-5);  // 10x the integrator's relative tolerance
}

TEST_CASE("subsample index rule") {
    CHECK(subsample_indices(20, 5) == std::vector<std::size_t>{0, 5, 10, 14, 19});
    CHECK(subsample_indices(20, 20).size() == 20);
    CHECK(subsample_indices(20, 2) == std::vector<std::size_t>{0, 19});
    CHECK(subsample_indices(5, 5) == std::vector<std::size_t>{0, 1, 2, 3, 4});
    CHECK_THROWS_AS(subsample_indices(5, 6), std::invalid_argument);
    CHECK_THROWS_AS(subsample_indices(5, 1), std::invalid_argument);
}

TEST_CASE("subsampled libraries share node values exactly") {
    auto data = generate_dataset(small_spec());
    auto fit = data.fit_window();
    ParameterMesh mesh = build_mesh(0.0, 0.12, 6, 0.0, 12.0, 5);
    auto lib = build_basis_library(fit, mesh, {}, 1);

    auto same = subsample_library(lib, 6, 5);
    REQUIRE(same.solutions.size() == lib.solutions.size());
    for (std::size_t i = 0; i < lib.solutions.size(); ++i) {
        CHECK(same.solutions[i].values == lib.solutions[i].values);
    }

    auto sub = subsample_library(lib, 3, 2);
    auto iD = subsample_indices(6, 3);
    auto iR = subsample_indices(5, 2);
    for (std::size_t a = 0; a < iD.size(); ++a) {
        for (std::size_t b = 0; b < iR.size(); ++b) {
            const auto& got = sub.solutions[sub.mesh.index(a, b)];
            const auto& src = lib.solutions[lib.mesh.index(iD[a], iR[b])];
            CHECK(got.values == src.values);
            CHECK(sub.mesh.D_nodes[a] == lib.mesh.D_nodes[iD[a]]);
            CHECK(sub.mesh.rho_nodes[b] == lib.mesh.rho_nodes[iR[b]]);
        }
    }
    CHECK_THROWS_AS(subsample_library(lib, 7, 5), std::invalid_argument);
}

TEST_CASE("weight fit recovers manufactured in-span data to machine precision") {
    auto data = generate_dataset(small_spec(0.0));
    auto fit = data.fit_window();
    ParameterMesh mesh = build_mesh(0.0, 0.12, 6, 0.0, 12.0, 6);
    auto lib = build_basis_library(fit, mesh, {}, 1);

    std::vector<double> w_true(mesh.size(), 0.0);
    w_true[mesh.index(1, 4)] = 0.6;
    w_true[mesh.index(4, 1)] = 0.4;
    SpaceTimeField target(fit.time, fit.space);
    for (std::size_t i = 0; i < w_true.size(); ++i) {
        if (w_true[i] == 0.0) continue;
        for (std::size_t c = 0; c < target.values.size(); ++c) {
            target.values[c] += w_true[i] * lib.solutions[i].values[c];
        }
    }
    double dd = 0.0;
    for (double v : target.values) dd += v * v;

    PrmfFitConfig config;
    config.n_starts = 5;
    config.seed = 77;
    auto result = fit_prmf(lib, target, config);
    CHECK(result.sse_fit <= 1e-12 * dd);
    CHECK(result.per_start_sse.size() == 5);

    // fitted aggregate reproduces the data pointwise
    double max_err = 0.0;
    for (std::size_t c = 0; c < target.values.size(); ++c) {
        double u = 0.0;
        for (std::size_t i = 0; i < result.weights.size(); ++i) {
            u += result.weights[i] * lib.solutions[i].values[c];
        }
        max_err = std::max(max_err, std::abs(u - target.values[c]));
    }
    CHECK(max_err <= 1e-6);

    // moment recovery within one mesh cell
    double mD = 0.0, mr = 0.0, mD_true = 0.0, mr_true = 0.0;
    for (std::size_t i = 0; i < result.weights.size(); ++i) {
        auto [D, rho] = mesh.node(i);
        mD += result.weights[i] * D;
        mr += result.weights[i] * rho;
        mD_true += w_true[i] * D;
        mr_true += w_true[i] * rho;
    }
    CHECK(std::abs(mD - mD_true) <= mesh.max_D_spacing());
    CHECK(std::abs(mr - mr_true) <= mesh.max_rho_spacing());
}

TEST_CASE("single-node library always returns weight one") {
    auto data = generate_dataset(small_spec());
    auto fit = data.fit_window();
    BasisLibrary lib;
    lib.mesh.D_nodes = {0.03};
    lib.mesh.rho_nodes = {2.0};
    lib.solutions.push_back(
        solve_phenotype_vs_data({0.03, 2.0, 1.0}, fit,
                                ScalarField(fit.row(0).begin(), fit.row(0).end()), {}));
    PrmfFitConfig config;
    config.n_starts = 3;
    auto result = fit_prmf(lib, fit, config);
    REQUIRE(result.weights.size() == 1);
    CHECK(result.weights[0] == 1.0);
}

TEST_CASE("returned weights beat every vertex and random simplex points") {
    auto data = generate_dataset(small_spec());
    auto fit = data.fit_window();
    ParameterMesh mesh = build_mesh(0.0, 0.1, 2, 0.0, 6.0, 2);
    auto lib = build_basis_library(fit, mesh, {}, 1);

    SUBCASE("on all-zero data") {
        SpaceTimeField zeros(fit.time, fit.space);
        PrmfFitConfig config;
        config.n_starts = 4;
        auto result = fit_prmf(lib, zeros, config);
        for (std::size_t v = 0; v < mesh.size(); ++v) {
            std::vector<double> vertex(mesh.size(), 0.0);
            vertex[v] = 1.0;
            CHECK(result.sse_fit <=
                  basis_combination_sse(lib, vertex, zeros) * (1.0 + 1e-12));
        }
    }
    SUBCASE("on observed data, against vertices and 100 random points") {
        PrmfFitConfig config;
        config.n_starts = 4;
        config.seed = 5;
        auto result = fit_prmf(lib, fit, config);
        for (std::size_t v = 0; v < mesh.size(); ++v) {
            std::vector<double> vertex(mesh.size(), 0.0);
            vertex[v] = 1.0;
            CHECK(result.sse_fit <=
                  basis_combination_sse(lib, vertex, fit) * (1.0 + 1e-12));
        }
        for (int trial = 0; trial < 100; ++trial) {
            WeightVector w = random_simplex(mesh.size(), 9000 + trial);
            CHECK(result.sse_fit <=
                  basis_combination_sse(lib, w.values(), fit) * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("multi-start weight fit is deterministic per seed") {
    auto data = generate_dataset(small_spec());
    auto fit = data.fit_window();
    ParameterMesh mesh = build_mesh(0.0, 0.12, 4, 0.0, 12.0, 4);
    auto lib = build_basis_library(fit, mesh, {}, 1);
    PrmfFitConfig config;
    config.n_starts = 6;
    config.seed = 19;
    auto a = fit_prmf(lib, fit, config);
    auto b = fit_prmf(lib, fit, config);
    CHECK(a.sse_fit == b.sse_fit);
    CHECK(a.weights == b.weights);
    CHECK(a.per_start_sse == b.per_start_sse);
}

TEST_CASE("AIC formula and edge cases") {
    CHECK(compute_aic(1.0, 100, 25) ==
          doctest::Approx(100.0 * std::log(0.01) + 52.0).epsilon(1e-9));
    CHECK(std::abs(compute_aic(1.0, 100, 25) + 408.517) < 1e-3);

    // doubling the parameter count at fixed sse adds exactly 2 * delta
    double a1 = compute_aic(2.5, 500, 20);
    double a2 = compute_aic(2.5, 500, 40);
    CHECK(a2 - a1 == doctest::Approx(40.0).epsilon(1e-12));

    // lower sse wins at equal parameter count
    CHECK(compute_aic(1.0, 500, 20) < compute_aic(1.5, 500, 20));

    CHECK(compute_aic(0.0, 100, 5) == -std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS(compute_aic(-1.0, 100, 5), std::invalid_argument);
    CHECK_THROWS_AS(compute_aic(1.0, 10, 10), std::invalid_argument);
}

TEST_CASE("model selection: minimum AIC with deterministic tie-breaking") {
    auto make = [](std::size_t mD, std::size_t mR, double sse, double aic) {
        PrmfFitResult r;
        r.mesh = build_mesh(0.0, 1.0, mD, 0.0, 1.0, mR);
        r.weights.assign(r.mesh.size(), 1.0 / double(r.mesh.size()));
        r.sse_fit = sse;
        r.aic = aic;
        return r;
    };
    std::vector<PrmfFitResult> single;
    single.push_back(make(5, 5, 1.0, -100.0));
    CHECK(&select_model(single) == &single[0]);

    std::vector<PrmfFitResult> tie;
    tie.push_back(make(10, 10, 1.0, -100.0));
    tie.push_back(make(5, 5, 1.0, -100.0));
    CHECK(select_model(tie).M_D() == 5);

    // a larger mesh that fits noise loses when the sse gain is below the penalty
    std::size_t n_obs = 1000;
    std::vector<PrmfFitResult> sweep;
    sweep.push_back(make(5, 5, 1.0, compute_aic(1.0, n_obs, 25)));
    sweep.push_back(make(10, 10, 0.99, compute_aic(0.99, n_obs, 100)));
    CHECK(select_model(sweep).n_params() == 25);

    std::vector<PrmfFitResult> none;
    CHECK_THROWS_AS(select_model(none), std::invalid_argument);
}

TEST_CASE("pointwise fit recovers a single-phenotype dataset within 2 percent") {
    SpatialGrid sg(0.0, 1.0, 41);
    TimeGrid tg(0.0, 0.8, 9);
    PhenotypeNode truth{0.05, 3.0, 1.0};
    auto ic = InitialCondition::gaussian_bump(0.1, 0.2, 0.0);
    auto clean = solve_fisher_kpp(truth, ic, sg, tg, {});

    PointwiseFitConfig config;
    config.M = 1;
    config.bounds = {0.0, 0.12, 0.0, 12.0};
    config.n_starts = 6;
    config.seed = 55;
    auto result = fit_pointwise(clean, config, {});
    REQUIRE(result.nodes.size() == 1);
    CHECK(result.weights[0] == doctest::Approx(1.0));
    CHECK(std::abs(result.nodes[0].D - truth.D) / truth.D < 0.02);
    CHECK(std::abs(result.nodes[0].rho - truth.rho) / truth.rho < 0.02);
    CHECK(result.n_evals > 0);
}

TEST_CASE("seeded nesting keeps the larger model at least as good") {
    auto data = generate_dataset(small_spec());
    auto fit = data.fit_window();

    PointwiseFitConfig c2;
    c2.M = 2;
    c2.n_starts = 2;
    c2.max_evals = 400;
    c2.seed = 8;
    auto r2 = fit_pointwise(fit, c2, {});

    PointwiseFitConfig c4;
    c4.M = 4;
    c4.n_starts = 2;
    c4.max_evals = 400;
    c4.seed = 8;
    c4.extra_starts.push_back(pad_pointwise_start(r2, 4, c4.bounds));
    auto r4 = fit_pointwise(fit, c4, {});
    CHECK(r4.sse_fit <= r2.sse_fit * (1.0 + 1e-6) + 1e-12);
}

TEST_CASE("permuting subpopulation labels leaves the objective unchanged") {
    auto data = generate_dataset(small_spec());
    auto fit = data.fit_window();
    InitialCondition ic = InitialCondition::custom([&] {
        ScalarField c0(fit.row(0).begin(), fit.row(0).end());
        for (double& v : c0) v = std::clamp(v, 0.0, 1.0);
        return c0;
    }());

    std::vector<PhenotypeNode> nodes{{0.02, 7.0, 1.0}, {0.09, 2.0, 1.0}};
    std::vector<double> w{0.3, 0.7};
    auto direct = solve_coupled_competition(nodes, WeightVector(w), ic, fit.space,
                                            fit.time, {});
    std::swap(nodes[0], nodes[1]);
    std::swap(w[0], w[1]);
    auto swapped = solve_coupled_competition(nodes, WeightVector(w), ic, fit.space,
                                             fit.time, {});
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t c = 0; c < fit.values.size(); ++c) {
        double d1 = direct.aggregate.values[c] - fit.values[c];
        double d2 = swapped.aggregate.values[c] - fit.values[c];
        s1 += d1 * d1;
        s2 += d2 * d2;
    }
    CHECK(s1 == doctest::Approx(s2).epsilon(1e-9));
}

TEST_CASE("forecast round-trips the generation and reduces to Fisher-KPP") {
    DataSetSpec spec = small_spec(0.0);
    spec.gen_M_D = 3;
    spec.gen_M_rho = 3;
    auto data = generate_dataset(spec);
    ParameterMesh mesh =
        build_mesh(spec.D_min, spec.D_max, 3, spec.rho_min, spec.rho_max, 3);
    WeightVector w = discretize_mixture(spec.mixture, mesh);

    auto forecast = predict_rande(w, mesh, spec.ic, spec.space, spec.time, spec.tols);
    double max_err = 0.0;
    for (std::size_t i = 0; i < forecast.values.size(); ++i) {
        max_err = std::max(max_err, std::abs(forecast.values[i] -
                                             data.u_clean->values[i]));
    }
    CHECK(max_err <= 1e-5);  // same closed system, within 10x integrator tol

    // an atomic measure forecasts exactly like the single equation
    std::vector<double> atom(mesh.size(), 0.0);
    atom[mesh.index(1, 1)] = 1.0;
    auto [D, rho] = mesh.node(mesh.index(1, 1));
    auto single = solve_fisher_kpp({D, rho, 1.0}, spec.ic, spec.space, spec.time, {});
    auto reduced = predict_rande(WeightVector(atom), mesh, spec.ic, spec.space,
                                 spec.time, {});
    double diff = 0.0;
    for (std::size_t i = 0; i < single.values.size(); ++i) {
        diff = std::max(diff, std::abs(single.values[i] - reduced.values[i]));
    }
    CHECK(diff <= 1e-5);
}

TEST_CASE("library files round-trip bit-exactly") {
    auto data = generate_dataset(small_spec());
    auto fit = data.fit_window();
    ParameterMesh mesh = build_mesh(0.0, 0.12, 3, 0.0, 12.0, 2);
    auto lib = build_basis_library(fit, mesh, {}, 1);
    lib.provenance.dataset_id = "abc123";

    auto dir = std::filesystem::temp_directory_path() / "rande_tests" / "library";
    std::filesystem::remove_all(dir);
    write_library(lib, dir);
    auto loaded = read_library(dir);
    CHECK(loaded.mesh.D_nodes == lib.mesh.D_nodes);
    CHECK(loaded.mesh.rho_nodes == lib.mesh.rho_nodes);
    CHECK(loaded.provenance.dataset_id == "abc123");
    REQUIRE(loaded.solutions.size() == lib.solutions.size());
    for (std::size_t i = 0; i < lib.solutions.size(); ++i) {
        CHECK(loaded.solutions[i].values == lib.solutions[i].values);
    }
    std::filesystem::remove_all(dir);
}

#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "rande/analysis.hpp"
#include "rande/models.hpp"

using namespace rande;

namespace {

double max_abs_diff(const SpaceTimeField& a, const SpaceTimeField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        m = std::max(m, std::abs(a.values[i] - b.values[i]));
    }
    return m;
}

}  // namespace

TEST_CASE("initial condition profiles") {
    SpatialGrid g(0.0, 2.0, 101);
    auto bump = InitialCondition::gaussian_bump().evaluate(g);
    CHECK(bump[0] == doctest::Approx(0.1));
    CHECK(bump[50] == doctest::Approx(0.1 * std::exp(-100.0)));

    auto step = InitialCondition::step(0.3, 0.5).evaluate(g);
    CHECK(step[0] == 0.3);
    CHECK(step[25] == 0.3);  // x = 0.5 inclusive
    CHECK(step[26] == 0.0);

    CHECK_THROWS_AS(InitialCondition::custom({0.1, 0.2}).evaluate(g),
                    std::invalid_argument);
    CHECK_THROWS_AS(InitialCondition::gaussian_bump(1.5).evaluate(g),
                    std::invalid_argument);
}

TEST_CASE("pure diffusion of a constant stays constant") {
    SpatialGrid sg(0.0, 1.0, 21);
    TimeGrid tg(0.0, 0.5, 6);
    auto ic = InitialCondition::custom(ScalarField(21, 0.3));
    auto u = solve_fisher_kpp({0.2, 0.0, 1.0}, ic, sg, tg, {});
    for (double v : u.values) CHECK(v == doctest::Approx(0.3).epsilon(1e-9));
}

TEST_CASE("reaction-only solve matches the logistic solution") {
    SpatialGrid sg(0.0, 1.0, 11);
    TimeGrid tg(0.0, 0.2, 3);
    auto ic = InitialCondition::custom(ScalarField(11, 0.1));
    auto u = solve_fisher_kpp({0.0, 10.0, 1.0}, ic, sg, tg, {});
    const double e2 = std::exp(2.0);
    const double exact = 0.1 * e2 / (1.0 + 0.1 * (e2 - 1.0));
    CHECK(exact == doctest::Approx(0.4508501).epsilon(1e-5));
    for (std::size_t k = 0; k < 11; ++k) {
        CHECK(std::abs(u.at(2, k) - exact) < 1e-4);
    }
}

TEST_CASE("front speed approaches the classical asymptotic value") {
    // homogeneous Fisher-KPP: late-time front speed ~ 2 sqrt(D rho)
    SpatialGrid sg(0.0, 3.0, 301);
    TimeGrid tg(0.0, 3.0, 31);
    auto u = solve_fisher_kpp({0.01, 10.0, 1.0}, InitialCondition::gaussian_bump(),
                              sg, tg, {});
    auto profile = wave_speed_profile(u, std::vector<double>{0.5}, 1.4, 3.0);
    REQUIRE_FALSE(profile.missing[0]);
    const double expected = 2.0 * std::sqrt(0.01 * 10.0);
    CHECK(std::abs(profile.speeds[0] - expected) / expected < 0.10);
}

TEST_CASE("coupled system with one phenotype reduces to Fisher-KPP") {
    SpatialGrid sg(0.0, 1.0, 41);
    TimeGrid tg(0.0, 0.6, 7);
    PhenotypeNode node{0.02, 4.0, 1.0};
    auto ic = InitialCondition::gaussian_bump(0.1, 0.2, 0.0);
    auto single = solve_fisher_kpp(node, ic, sg, tg, {});
    std::vector<PhenotypeNode> nodes{node};
    auto coupled = solve_coupled_competition(nodes, WeightVector({1.0}), ic, sg, tg, {});
    CHECK(max_abs_diff(single, coupled.aggregate) < 1e-5);  // 10x integrator tol
}

TEST_CASE("identical phenotypes stay identical and equal the aggregate") {
    SpatialGrid sg(0.0, 1.0, 31);
    TimeGrid tg(0.0, 0.5, 6);
    std::vector<PhenotypeNode> nodes{{0.03, 5.0, 1.0}, {0.03, 5.0, 1.0}};
    auto ic = InitialCondition::gaussian_bump(0.1, 0.2, 0.0);
    auto sol = solve_coupled_competition(nodes, WeightVector({0.5, 0.5}), ic, sg, tg, {});
    CHECK(max_abs_diff(sol.per_node[0], sol.per_node[1]) == 0.0);
    CHECK(max_abs_diff(sol.per_node[0], sol.aggregate) < 1e-12);
}

TEST_CASE("two-phenotype aggregate respects the single-phenotype envelope") {
    SpatialGrid sg(0.0, 2.0, 81);
    TimeGrid tg(0.0, 1.0, 11);
    auto ic = InitialCondition::gaussian_bump();
    PhenotypeNode grow{0.01, 10.0, 1.0};
    PhenotypeNode go{0.1, 1.0, 1.0};
    auto f_grow = solve_fisher_kpp(grow, ic, sg, tg, {});
    auto f_go = solve_fisher_kpp(go, ic, sg, tg, {});
    std::vector<PhenotypeNode> nodes{grow, go};
    auto sol = solve_coupled_competition(nodes, WeightVector({0.5, 0.5}), ic, sg, tg, {});
    double tol = 1e-6;
    double max_val = 0.0;
    for (std::size_t i = 0; i < sol.aggregate.values.size(); ++i) {
        double lo = std::min(f_grow.values[i], f_go.values[i]);
        double hi = std::max(f_grow.values[i], f_go.values[i]);
        CHECK(sol.aggregate.values[i] >= lo - tol);
        CHECK(sol.aggregate.values[i] <= hi + tol);
        max_val = std::max(max_val, sol.aggregate.values[i]);
    }
    CHECK(max_val <= 1.0 + 1e-6);
}

TEST_CASE("empty node list and mismatched weights are rejected") {
    SpatialGrid sg(0.0, 1.0, 11);
    TimeGrid tg(0.0, 0.1, 2);
    auto ic = InitialCondition::gaussian_bump(0.1, 0.3, 0.0);
    std::vector<PhenotypeNode> none;
    CHECK_THROWS_AS(
        solve_coupled_competition(none, WeightVector({1.0}), ic, sg, tg, {}),
        std::invalid_argument);
    std::vector<PhenotypeNode> one{{0.01, 1.0, 1.0}};
    CHECK_THROWS_AS(
        solve_coupled_competition(one, WeightVector({0.5, 0.5}), ic, sg, tg, {}),
        std::invalid_argument);
}

TEST_CASE("data-driven phenotype solve: saturated data conserves mass") {
    SpatialGrid sg(0.0, 2.0, 101);
    TimeGrid tg(0.0, 1.0, 21);
    SpaceTimeField ones(tg, sg);
    for (double& v : ones.values) v = 1.0;
    ScalarField c0 = InitialCondition::gaussian_bump().evaluate(sg);
    auto c = solve_phenotype_vs_data({0.05, 5.0, 1.0}, ones, c0, {});
    double m0 = trapezoid_mass(c.row(0), sg.dx());
    for (std::size_t j = 0; j < tg.n_points; ++j) {
        double mj = trapezoid_mass(c.row(j), sg.dx());
        CHECK(std::abs(mj - m0) <= 1e-6 * m0);
    }
}

TEST_CASE("data-driven phenotype solve: zero growth decouples from the data") {
    SpatialGrid sg(0.0, 1.0, 41);
    TimeGrid tg(0.0, 0.5, 6);
    SpaceTimeField arbitrary(tg, sg);
    for (std::size_t i = 0; i < arbitrary.values.size(); ++i) {
        arbitrary.values[i] = 0.5 + 0.3 * std::sin(double(i));
    }
    ScalarField c0 = InitialCondition::gaussian_bump(0.1, 0.2, 0.5).evaluate(sg);
    auto with_data = solve_phenotype_vs_data({0.04, 0.0, 1.0}, arbitrary, c0, {});
    auto pure = solve_fisher_kpp({0.04, 0.0, 1.0},
                                 InitialCondition::custom(c0), sg, tg, {});
    CHECK(max_abs_diff(with_data, pure) < 1e-6);
}

TEST_CASE("data-driven phenotype solve: exponential growth oracle") {
    SpatialGrid sg(0.0, 1.0, 11);
    TimeGrid tg(0.0, 1.0, 5);
    SpaceTimeField zeros(tg, sg);
    ScalarField c0(11, 0.1);
    auto c = solve_phenotype_vs_data({0.0, 1.0, 1.0}, zeros, c0, {});
    for (std::size_t k = 0; k < 11; ++k) {
        CHECK(std::abs(c.at(4, k) - 0.1 * std::exp(1.0)) < 1e-4);
    }
    ScalarField negative(11, -0.1);
    CHECK_THROWS_AS(solve_phenotype_vs_data({0.0, 1.0, 1.0}, zeros, negative, {}),
                    std::invalid_argument);
}

TEST_CASE("aggregate is the pointwise weighted sum") {
    SpatialGrid sg(0.0, 1.0, 5);
    TimeGrid tg(0.0, 1.0, 2);
    SpaceTimeField a(tg, sg), b(tg, sg);
    for (double& v : a.values) v = 0.2;
    for (double& v : b.values) v = 0.6;

    std::vector<SpaceTimeField> one{a};
    auto same = aggregate(WeightVector({1.0}), one);
    CHECK(max_abs_diff(same, a) == 0.0);

    std::vector<SpaceTimeField> both{a, b};
    auto mixed = aggregate(WeightVector({0.25, 0.75}), both);
    for (double v : mixed.values) CHECK(v == doctest::Approx(0.5));

    std::vector<SpaceTimeField> equal{a, a};
    auto convex = aggregate(WeightVector({0.3, 0.7}), equal);
    CHECK(max_abs_diff(convex, a) < 1e-15);

    SpaceTimeField wrong(TimeGrid(0.0, 1.0, 3), sg);
    std::vector<SpaceTimeField> bad{a, wrong};
    CHECK_THROWS_AS(aggregate(WeightVector({0.5, 0.5}), bad), std::invalid_argument);
}

TEST_CASE("coupled solution invariants: consistency and nonnegativity") {
    SpatialGrid sg(0.0, 2.0, 61);
    TimeGrid tg(0.0, 1.0, 11);
    std::vector<PhenotypeNode> nodes{{0.01, 8.0, 1.0}, {0.05, 3.0, 1.0}, {0.1, 1.0, 1.0}};
    WeightVector w({0.3, 0.3, 0.4});
    auto sol = solve_coupled_competition(nodes, w, InitialCondition::gaussian_bump(),
                                         sg, tg, {});
    auto recombined = aggregate(w, sol.per_node);
    double scale = 0.0;
    for (double v : sol.aggregate.values) scale = std::max(scale, std::abs(v));
    CHECK(max_abs_diff(recombined, sol.aggregate) <= 1e-10 * std::max(1.0, scale));

    double min_val = 0.0;
    for (const auto& f : sol.per_node) {
        for (double v : f.values) min_val = std::min(min_val, v);
    }
    CHECK(min_val >= -1e-6);
}

TEST_CASE("spatial refinement converges at second order") {
    TimeGrid tg(0.0, 0.5, 6);
    auto ic = InitialCondition::gaussian_bump(0.1, 0.25, 0.0);
    PhenotypeNode node{0.05, 4.0, 1.0};
    OdeTols tight{1e-9, 1e-12};

    auto coarse = solve_fisher_kpp(node, ic, SpatialGrid(0.0, 2.0, 51), tg, tight);
    auto mid = solve_fisher_kpp(node, ic, SpatialGrid(0.0, 2.0, 101), tg, tight);
    auto fine = solve_fisher_kpp(node, ic, SpatialGrid(0.0, 2.0, 201), tg, tight);

    // compare on the shared nodes of the final row
    double d1 = 0.0, d2 = 0.0;
    for (std::size_t k = 0; k < 51; ++k) {
        d1 = std::max(d1, std::abs(coarse.at(5, k) - mid.at(5, 2 * k)));
        d2 = std::max(d2, std::abs(mid.at(5, 2 * k) - fine.at(5, 4 * k)));
    }
    CHECK(d1 / d2 > 3.0);  // ~4 for O(dx^2)
    CHECK(d1 / d2 < 6.0);
}

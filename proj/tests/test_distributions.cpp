#include <doctest.h>

#include <cmath>
#include <set>
#include <stdexcept>

#include "rande/distributions.hpp"
#include "rande/rng.hpp"

using namespace rande;

TEST_CASE("build_mesh spans the closed ranges with even spacing") {
    ParameterMesh mesh = build_mesh(0.0, 0.12, 5, 0.0, 12.0, 5);
    std::vector<double> want{0.0, 0.03, 0.06, 0.09, 0.12};
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(mesh.D_nodes[i] == doctest::Approx(want[i]).epsilon(1e-14));
    }
    CHECK(mesh.rho_nodes.back() == 12.0);

    ParameterMesh corners = build_mesh(0.0, 1.0, 2, 0.0, 1.0, 2);
    CHECK(corners.size() == 4);
    CHECK(corners.D_nodes == std::vector<double>{0.0, 1.0});

    CHECK(build_mesh(0.0, 0.12, 20, 0.0, 12.0, 20).size() == 400);
    CHECK_THROWS_AS(build_mesh(0.0, 1.0, 1, 0.0, 1.0, 5), std::invalid_argument);
}

TEST_CASE("node ordering is row-major with D as the slow axis") {
    ParameterMesh mesh = build_mesh(0.0, 1.0, 3, 0.0, 10.0, 4);
    CHECK(mesh.index(0, 0) == 0);
    CHECK(mesh.index(0, 3) == 3);
    CHECK(mesh.index(1, 0) == 4);
    auto [D, rho] = mesh.node(mesh.index(2, 1));
    CHECK(D == doctest::Approx(1.0));
    CHECK(rho == doctest::Approx(10.0 / 3.0));
}

TEST_CASE("WeightVector enforces the simplex invariants") {
    CHECK_THROWS_AS(WeightVector({0.5, 0.6}), std::invalid_argument);
    CHECK_THROWS_AS(WeightVector({-0.1, 1.1}), std::invalid_argument);
    CHECK_THROWS_AS(WeightVector({}), std::invalid_argument);
    WeightVector w({0.25, 0.75});
    CHECK(w[1] == 0.75);
    WeightVector atom = WeightVector::delta(4, 2);
    CHECK(atom[2] == 1.0);
}

TEST_CASE("mixture density peak, tails and table values") {
    GaussianMixtureSpec single;
    single.components = {{0.05, 0.01, 5.0, 2.0, 1.0}};
    double peak = mixture_density(single, 0.05, 5.0);
    CHECK(peak == doctest::Approx(1.0 / (2.0 * M_PI * 0.01 * 2.0)).epsilon(1e-12));
    CHECK(mixture_density(single, 0.05 + 20.0 * 0.01, 5.0) < 1e-80);

    GaussianMixtureSpec table = GaussianMixtureSpec::two_population();
    double at_grow = mixture_density(table, 0.01, 10.0);
    double dominant = 0.5 / (2.0 * M_PI * 5e-4 * 1.0);
    CHECK(at_grow == doctest::Approx(dominant).epsilon(1e-6));
}

TEST_CASE("mixture mass inside Omega is essentially complete for the default spec") {
    GaussianMixtureSpec spec = GaussianMixtureSpec::two_population();
    // 2D trapezoid quadrature on a 200x200 grid over Omega
    const std::size_t n = 200;
    double hD = 0.12 / double(n - 1);
    double hr = 12.0 / double(n - 1);
    double mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double wi = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        for (std::size_t j = 0; j < n; ++j) {
            double wj = (j == 0 || j == n - 1) ? 0.5 : 1.0;
            mass += wi * wj * mixture_density(spec, hD * double(i), hr * double(j));
        }
    }
    mass *= hD * hr;
    // exact truncated-normal mass: the go component's rho mean sits one std
    // from the lower boundary, so Omega holds 0.5 Phi(2) + 0.5 (1 - Phi(-1))
    const double expected = 0.5 * 0.9772498680518208 + 0.5 * 0.8413447460685429;
    CHECK(mass == doctest::Approx(expected).epsilon(2e-3));
    CHECK(mass >= 0.9);
}

TEST_CASE("discretize_mixture keeps each component's mass on the mesh") {
    GaussianMixtureSpec wide;
    wide.components = {{0.06, 1e3, 6.0, 1e5, 1.0}};  // effectively flat
    ParameterMesh mesh = build_mesh(0.0, 0.12, 5, 0.0, 12.0, 5);
    WeightVector w = discretize_mixture(wide, mesh);
    for (std::size_t i = 0; i < w.size(); ++i) {
        CHECK(w[i] == doctest::Approx(1.0 / 25.0).epsilon(1e-4));
    }

    GaussianMixtureSpec narrow;
    narrow.components = {{0.06, 1e-6, 6.0, 1e-6, 1.0}};  // sits on the center node
    WeightVector atom = discretize_mixture(narrow, mesh);
    CHECK(atom[mesh.index(2, 2)] > 0.99);

    // The default two-population spec splits its mass between two disjoint
    // regions around the component means.
    ParameterMesh gen = build_mesh(0.0, 0.12, 30, 0.0, 12.0, 60);
    WeightVector table = discretize_mixture(GaussianMixtureSpec::two_population(), gen);
    double grow_mass = 0.0, go_mass = 0.0, elsewhere = 0.0;
    for (std::size_t i = 0; i < table.size(); ++i) {
        auto [D, rho] = gen.node(i);
        if (std::abs(D - 0.01) < 0.02 && std::abs(rho - 10.0) < 4.0) {
            grow_mass += table[i];
        } else if (std::abs(D - 0.1) < 0.02 && std::abs(rho - 1.0) < 4.0) {
            go_mass += table[i];
        } else {
            elsewhere += table[i];
        }
    }
    CHECK(grow_mass == doctest::Approx(0.5).epsilon(0.01));
    CHECK(go_mass == doctest::Approx(0.5).epsilon(0.01));
    CHECK(elsewhere < 1e-3);
}

TEST_CASE("sampling an atomic measure") {
    ParameterMesh mesh = build_mesh(0.0, 1.0, 2, 0.0, 1.0, 2);
    SUBCASE("single atom yields identical samples") {
        WeightVector w = WeightVector::delta(4, 3);
        auto samples = sample_weights(w, mesh, 50, 123);
        for (const Sample& s : samples) {
            CHECK(s.D == 1.0);
            CHECK(s.rho == 1.0);
        }
    }
    SUBCASE("two equal atoms concentrate at one half each") {
        WeightVector w({0.5, 0.0, 0.0, 0.5});
        auto samples = sample_weights(w, mesh, 100000, 99);
        double first = 0.0;
        for (const Sample& s : samples) {
            if (s.D == 0.0) first += 1.0;
        }
        CHECK(first / 100000.0 == doctest::Approx(0.5).epsilon(0.02));
    }
    SUBCASE("deterministic per seed, H = 0 rejected") {
        WeightVector w({0.25, 0.25, 0.25, 0.25});
        auto a = sample_weights(w, mesh, 1000, 7);
        auto b = sample_weights(w, mesh, 1000, 7);
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].D == b[i].D);
            CHECK(a[i].rho == b[i].rho);
        }
        CHECK_THROWS_AS(sample_weights(w, mesh, 0, 7), std::invalid_argument);
    }
}

TEST_CASE("empirical distribution converges in total variation") {
    ParameterMesh mesh = build_mesh(0.0, 1.0, 3, 0.0, 1.0, 2);
    std::vector<double> w(6, 0.0);
    w[0] = 0.2;
    w[3] = 0.5;
    w[5] = 0.3;
    WeightVector weights(w);
    auto tv = [&](std::size_t H, std::uint64_t seed) {
        auto samples = sample_weights(weights, mesh, H, seed);
        std::vector<double> counts(6, 0.0);
        for (const Sample& s : samples) {
            for (std::size_t i = 0; i < 6; ++i) {
                auto [D, rho] = mesh.node(i);
                if (s.D == D && s.rho == rho) {
                    counts[i] += 1.0;
                    break;
                }
            }
        }
        double dist = 0.0;
        for (std::size_t i = 0; i < 6; ++i) {
            dist += std::abs(counts[i] / double(H) - w[i]);
        }
        return 0.5 * dist;
    };
    CHECK(tv(1000, 5) <= 3.0 / std::sqrt(1000.0));
    CHECK(tv(100000, 5) <= 3.0 / std::sqrt(100000.0));
}

TEST_CASE("simplex projection examples") {
    auto p1 = project_to_simplex(std::vector<double>{0.5, 0.5});
    CHECK(p1[0] == doctest::Approx(0.5).epsilon(1e-14));
    auto p2 = project_to_simplex(std::vector<double>{2.0, 0.0});
    CHECK(p2[0] == doctest::Approx(1.0));
    CHECK(p2[1] == doctest::Approx(0.0));
    auto p3 = project_to_simplex(std::vector<double>{0.6, 0.6});
    CHECK(p3[0] == doctest::Approx(0.5));
    CHECK(p3[1] == doctest::Approx(0.5));
    CHECK_THROWS_AS(project_to_simplex(std::vector<double>{1.0, std::nan("")}),
                    std::invalid_argument);
}

TEST_CASE("projection is idempotent and always lands on the simplex") {
    Rng rng(2024);
    for (int trial = 0; trial < 2000; ++trial) {
        std::size_t dim = 1 + static_cast<std::size_t>(rng.uniform() * 16.0);
        std::vector<double> v(dim);
        for (double& x : v) x = rng.uniform(-100.0, 100.0);
        WeightVector w = project_to_simplex(v);  // constructor checks the invariants
        WeightVector again = project_to_simplex(w.values());
        for (std::size_t i = 0; i < dim; ++i) {
            CHECK(std::abs(again[i] - w[i]) <= 1e-12);
        }
    }
}

TEST_CASE("random_simplex moments and determinism") {
    CHECK(random_simplex(1, 4)[0] == 1.0);

    std::vector<double> mean(4, 0.0);
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
        WeightVector w = random_simplex(4, 1000 + static_cast<std::uint64_t>(i));
        for (std::size_t k = 0; k < 4; ++k) mean[k] += w[k];
    }
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(mean[k] / draws == doctest::Approx(0.25).epsilon(0.02));
    }

    WeightVector a = random_simplex(6, 11);
    WeightVector b = random_simplex(6, 12);
    bool identical = true;
    for (std::size_t k = 0; k < 6; ++k) identical = identical && a[k] == b[k];
    CHECK_FALSE(identical);
}

TEST_CASE("three-population preset splits its mass three ways") {
    GaussianMixtureSpec spec = GaussianMixtureSpec::three_population();
    spec.validate();
    ParameterMesh mesh = build_mesh(0.0, 0.12, 30, 0.0, 12.0, 60);
    WeightVector w = discretize_mixture(spec, mesh);
    double grow = 0.0, mid = 0.0, go = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        auto [D, rho] = mesh.node(i);
        if (std::abs(D - 0.01) < 0.015 && std::abs(rho - 10.0) < 3.0) grow += w[i];
        if (std::abs(D - 0.04) < 0.015 && std::abs(rho - 5.0) < 3.0) mid += w[i];
        if (std::abs(D - 0.1) < 0.015 && std::abs(rho - 1.0) < 3.0) go += w[i];
    }
    CHECK(grow == doctest::Approx(1.0 / 3.0).epsilon(0.02));
    CHECK(mid == doctest::Approx(1.0 / 3.0).epsilon(0.02));
    CHECK(go == doctest::Approx(1.0 / 3.0).epsilon(0.05));
}

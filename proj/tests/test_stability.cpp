#include <doctest.h>

#include <cmath>

#include "phaseless/rng.hpp"
#include "phaseless/solver.hpp"
#include "phaseless/stability.hpp"
#include "phaseless/surface.hpp"

using namespace phaseless;

namespace {

Eigen::MatrixXd worked_matrix() {
    Eigen::MatrixXd a(3, 2);
    a << 1, 0, 0, 1, 1, 1;
    return a;
}

Eigen::VectorXd vec2(double a, double b) {
    Eigen::VectorXd v(2);
    v << a, b;
    return v;
}

Eigen::VectorXd vec3(double a, double b, double c) {
    Eigen::VectorXd v(3);
    v << a, b, c;
    return v;
}

} // namespace

TEST_CASE("solution_set_distance") {
    const SenseMatrix a(worked_matrix());
    CHECK(solution_set_distance(a, Observation(vec3(1, 2, 3)), Observation(vec3(1, 2, 3))) <=
          1e-12);
    // classes +-(1,2) vs +-(2,4): min(||(1,2)||, ||(3,6)||) = sqrt(5)
    CHECK(solution_set_distance(a, Observation(vec3(1, 2, 3)), Observation(vec3(2, 4, 6))) ==
          doctest::Approx(std::sqrt(5.0)).epsilon(1e-9));
}

TEST_CASE("unique_projection classifies U_A membership") {
    const SenseMatrix a(worked_matrix());
    CHECK(unique_projection(a, Observation(vec3(1, 2, 3))).unique);
    CHECK(!unique_projection(a, Observation(vec3(1, 1, 1))).unique);
}

TEST_CASE("instability_witness worked example") {
    const SenseMatrix a(worked_matrix());
    const Observation b0(vec3(1, 1, 1));

    const WitnessPair w = instability_witness(a, b0, 0.1);
    CHECK((w.b1.values - w.b2.values).norm() == doctest::Approx(0.04714).epsilon(1e-3));
    CHECK((w.y1 - w.y2).norm() == doctest::Approx(2.0 / 3 * std::sqrt(2.0)).epsilon(1e-8));
    CHECK(w.ratio == doctest::Approx(20.0).epsilon(1e-8));

    const WitnessPair half = instability_witness(a, b0, 0.5);
    CHECK(half.ratio == doctest::Approx(4.0).epsilon(1e-8));

    // the perturbed solution sets sit sqrt(20)/3 apart
    CHECK(solution_set_distance(a, w.b1, w.b2) ==
          doctest::Approx(std::sqrt(20.0) / 3).epsilon(1e-6));

    CHECK_THROWS_AS(instability_witness(a, Observation(vec3(1, 2, 3)), 0.1),
                    std::invalid_argument);
    CHECK_THROWS_AS(instability_witness(a, b0, 1.5), std::invalid_argument);
}

TEST_CASE("witness ratio law and no uniform stability") {
    const SenseMatrix a(worked_matrix());
    const Observation b0(vec3(1, 1, 1));
    for (const double eps : {1e-1, 1e-2, 1e-3}) {
        const WitnessPair w = instability_witness(a, b0, eps);
        CHECK(std::abs(w.ratio - 2.0 / eps) <= 1e-8 * (2.0 / eps));
        const double solution_ratio =
            solution_set_distance(a, w.b1, w.b2) / (w.b1.values - w.b2.values).norm();
        CHECK(solution_ratio >= 1.0 / eps);
    }
}

TEST_CASE("nonunique_seed_search finds the classic tie point") {
    const SenseMatrix a(worked_matrix());
    const auto seeds = nonunique_seed_search(a, 8, 7);
    REQUIRE(!seeds.empty());
    bool found = false;
    for (const auto& seed : seeds)
        if ((seed.values - vec3(1, 1, 1)).norm() <= 1e-6) found = true;
    CHECK(found);
    for (const auto& seed : seeds)
        CHECK(best_approximations(a, seed, 1e-6).points.size() >= 2);
}

TEST_CASE("nonunique_seed_search without the PR property") {
    const SenseMatrix eye(Eigen::MatrixXd::Identity(2, 2));
    const auto seeds = nonunique_seed_search(eye, 4, 7);
    REQUIRE(!seeds.empty());
    CHECK(solve_global(eye, seeds.front()).classes.size() >= 2);
}

TEST_CASE("nonunique_seed_search with zero trials") {
    CHECK(nonunique_seed_search(SenseMatrix(worked_matrix()), 0, 7).empty());
}

TEST_CASE("convex_region_scan around a surface point") {
    const SenseMatrix a(worked_matrix());
    const StabilityReport report =
        convex_region_scan(a, Observation(vec3(1, 2, 3)), 0.1, 60, 42);
    CHECK(report.pairs.size() >= 55);  // degenerate pairs may be skipped
    CHECK(report.max_projection_ratio <= 1.0 + 1e-6);
    CHECK(std::isfinite(report.max_solution_ratio));
    CHECK(report.seed == 42);

    // determinism: identical seed, identical report
    const StabilityReport again =
        convex_region_scan(a, Observation(vec3(1, 2, 3)), 0.1, 60, 42);
    REQUIRE(again.pairs.size() == report.pairs.size());
    for (std::size_t i = 0; i < report.pairs.size(); ++i) {
        CHECK(again.pairs[i].b1 == report.pairs[i].b1);
        CHECK(again.pairs[i].projection_ratio == report.pairs[i].projection_ratio);
    }
}

TEST_CASE("convex_region_scan edge cases") {
    const SenseMatrix a(worked_matrix());
    const StabilityReport single = convex_region_scan(a, Observation(vec3(1, 2, 3)), 0.0, 10, 1);
    CHECK(single.pairs.empty());
    CHECK(single.max_projection_ratio == 0.0);

    CHECK_THROWS_AS(convex_region_scan(a, Observation(vec3(1, 1, 1)), 0.1, 10, 1),
                    std::invalid_argument);
}

TEST_CASE("projection is continuous along segments inside U_A") {
    const SenseMatrix a(worked_matrix());
    const Eigen::VectorXd from = vec3(1, 2, 3);
    const Eigen::VectorXd to = vec3(1.3, 1.9, 2.8);

    const auto max_step = [&](int parts) {
        double worst = 0.0;
        Eigen::VectorXd prev;
        for (int t = 0; t <= parts; ++t) {
            const Eigen::VectorXd b =
                from + (static_cast<double>(t) / parts) * (to - from);
            const UniqueProjection up = unique_projection(a, Observation(b));
            REQUIRE(up.unique);
            if (t > 0) worst = std::max(worst, (up.point - prev).norm());
            prev = up.point;
        }
        return worst;
    };
    const double coarse = max_step(8);
    const double fine = max_step(16);
    CHECK(fine < coarse);
}

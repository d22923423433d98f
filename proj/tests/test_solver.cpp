#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "phaseless/certificates.hpp"
#include "phaseless/rng.hpp"
#include "phaseless/solver.hpp"
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

bool has_class(const SolutionSet& s, const Eigen::VectorXd& x, double tol = 1e-8) {
    return std::any_of(s.classes.begin(), s.classes.end(), [&](const SignClass& cls) {
        return quotient_distance(cls.rep, x) <= tol;
    });
}

} // namespace

TEST_CASE("solve_global with exact data and PR property") {
    const SenseMatrix a(worked_matrix());
    const SolutionSet s = solve_global(a, Observation(vec3(1, 2, 3)));
    REQUIRE(s.classes.size() == 1);
    CHECK(has_class(s, vec2(1, 2)));
    CHECK(s.optimal_value <= 1e-12);
    CHECK(s.patterns_explored == 4);
}

TEST_CASE("solve_global three-minimizer instance") {
    const SenseMatrix a(worked_matrix());
    const SolutionSet s = solve_global(a, Observation(vec3(1, 1, 1)));
    REQUIRE(s.classes.size() == 3);
    CHECK(s.optimal_value == doctest::Approx(1.0 / 3).epsilon(1e-10));
    CHECK(has_class(s, vec2(2.0 / 3, 2.0 / 3)));
    CHECK(has_class(s, vec2(4.0 / 3, -2.0 / 3)));
    CHECK(has_class(s, vec2(-2.0 / 3, 4.0 / 3)));
    for (const auto& cls : s.classes)
        CHECK(cls.value == doctest::Approx(s.optimal_value).epsilon(1e-9));
}

TEST_CASE("solve_global without PR property keeps both classes") {
    const SenseMatrix eye(Eigen::MatrixXd::Identity(2, 2));
    const SolutionSet s = solve_global(eye, Observation(vec2(1, 1)));
    REQUIRE(s.classes.size() == 2);
    CHECK(has_class(s, vec2(1, 1)));
    CHECK(has_class(s, vec2(1, -1)));
    CHECK(s.optimal_value <= 1e-14);
}

TEST_CASE("fixed_point_iterate") {
    const SenseMatrix eye(Eigen::MatrixXd::Identity(2, 2));
    const FixedPointResult one_step =
        fixed_point_iterate(eye, Observation(vec2(1, 1)), vec2(0.3, 9.0));
    CHECK(one_step.converged);
    CHECK(one_step.iters == 1);
    CHECK(one_step.x.isApprox(vec2(1, 1), 1e-12));

    const SenseMatrix a(worked_matrix());
    const FixedPointResult run =
        fixed_point_iterate(a, Observation(vec3(1, 2, 3)), vec2(0.5, 1.5));
    CHECK(run.converged);
    CHECK(quotient_distance(run.x, vec2(1, 2)) <= 1e-10);
    const SolutionSet s = solve_global(a, Observation(vec3(1, 2, 3)));
    CHECK(quotient_distance(run.x, s.classes[0].rep) <= 1e-9);

    // x0 = 0: all signs +1, first iterate is the plain least squares solution
    const Observation b(vec3(0.2, 1.4, 0.9));
    const FixedPointResult from_zero =
        fixed_point_iterate(a, b, Eigen::VectorXd::Zero(2), 1);
    const Eigen::MatrixXd gram = a.entries().transpose() * a.entries();
    const Eigen::VectorXd ls = gram.ldlt().solve(a.entries().transpose() * b.values);
    CHECK(from_zero.x.isApprox(ls, 1e-12));

    Eigen::MatrixXd deficient(2, 2);
    deficient << 1, 0, 2, 0;
    CHECK_THROWS_AS(
        fixed_point_iterate(SenseMatrix(deficient), Observation(vec2(1, 1)), vec2(0, 0)),
        std::invalid_argument);
}

TEST_CASE("fixed-point objective descent and limit verification") {
    CounterRng rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        const SenseMatrix a(rng.normal_matrix(4, 2));
        if (!a.full_column_rank()) continue;
        const Observation b(rng.uniform_vector(4, 0.0, 2.0));
        Eigen::VectorXd x = rng.normal_vector(2);
        double value = objective(a, b, x);
        for (int step = 0; step < 20; ++step) {
            const FixedPointResult next = fixed_point_iterate(a, b, x, 1, 0.0);
            const double next_value = objective(a, b, next.x);
            CHECK(next_value <= value + 1e-10 * (1.0 + value));
            x = next.x;
            value = next_value;
        }
        const FixedPointResult limit = fixed_point_iterate(a, b, x, 100);
        if (limit.converged) CHECK(verify_fixed_point(a, b, limit.x, 1e-6));
    }
}

TEST_CASE("verify_fixed_point") {
    const SenseMatrix a(worked_matrix());
    const SolutionSet s = solve_global(a, Observation(vec3(1, 1, 1)));
    for (const auto& cls : s.classes)
        CHECK(verify_fixed_point(a, Observation(vec3(1, 1, 1)), cls.rep, 1e-9));

    const SenseMatrix eye(Eigen::MatrixXd::Identity(2, 2));
    CHECK(!verify_fixed_point(eye, Observation(vec2(1, 1)), vec2(2, 2), 1e-9));

    // one-step fixed point when the signs are already consistent
    const Observation b(vec3(1, 2, 3));
    const Eigen::MatrixXd gram = a.entries().transpose() * a.entries();
    const Eigen::VectorXd x = gram.ldlt().solve(a.entries().transpose() * b.values);
    CHECK(verify_fixed_point(a, b, x, 1e-9));
}

TEST_CASE("grid_oracle basics") {
    const SenseMatrix a(worked_matrix());
    const Observation b(vec3(1, 2, 3));  // = |A (1,2)| with (1,2) on the grid
    const GridScan scan = grid_oracle(a, b, vec2(-2, -2), vec2(2, 2), 0.5);
    CHECK(scan.best_value <= 1e-12);
    bool found_plus = false, found_minus = false;
    for (const auto& p : scan.argmins) {
        if ((p - vec2(1, 2)).norm() <= 1e-12) found_plus = true;
        if ((p + vec2(1, 2)).norm() <= 1e-12) found_minus = true;
    }
    CHECK(found_plus);
    CHECK(found_minus);

    // step wider than the box collapses to the single corner point
    const GridScan corner = grid_oracle(a, b, vec2(0, 0), vec2(1, 1), 5.0);
    CHECK(corner.best_value == doctest::Approx(objective(a, b, vec2(0, 0))));
    REQUIRE(corner.argmins.size() == 1);

    CHECK_THROWS_AS(grid_oracle(SenseMatrix(Eigen::MatrixXd::Identity(4, 4)), Observation(Eigen::VectorXd::Ones(4)),
                                Eigen::VectorXd::Zero(4), Eigen::VectorXd::Ones(4), 0.5),
                    std::invalid_argument);
    CHECK_THROWS_AS(grid_oracle(a, b, vec2(1, 1), vec2(0, 0), 0.5), std::invalid_argument);
    CHECK_THROWS_AS(grid_oracle(a, b, vec2(0, 0), vec2(1, 1), 0.0), std::invalid_argument);
}

TEST_CASE("solve_global agrees with the grid oracle on random instances") {
    CounterRng rng(61);
    for (int trial = 0; trial < 12; ++trial) {
        const int m = trial % 2 == 0 ? 3 : 4;
        const Eigen::MatrixXd entries = testingoracles::well_conditioned_matrix(rng, m, 2);
        const SenseMatrix a(entries);
        const Observation b(rng.uniform_vector(m, 0.0, 1.0));
        const SolutionSet s = solve_global(a, b);

        // minimizers satisfy sigma_min ||x|| - ||b|| <= ||b||
        const double reach = 2.0 * b.values.norm() / a.singular_values().minCoeff() + 0.5;
        const double step = 0.02;
        const Eigen::VectorXd lo = Eigen::VectorXd::Constant(2, -reach);
        const Eigen::VectorXd hi = Eigen::VectorXd::Constant(2, reach);
        const GridScan scan = grid_oracle(a, b, lo, hi, step);
        CHECK(std::abs(s.optimal_value - scan.best_value) <= 2.0 * scan.value_tol);
        CHECK(s.optimal_value <= scan.best_value + 1e-9);
    }
}

TEST_CASE("solve_global single-row instance") {
    Eigen::MatrixXd a(1, 1);
    a << 2;
    Eigen::VectorXd b(1);
    b << 3;
    const SolutionSet s = solve_global(SenseMatrix(a), Observation(b));
    REQUIRE(s.classes.size() == 1);
    CHECK(std::abs(s.classes[0].rep[0]) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(s.patterns_explored == 1);
}

TEST_CASE("solve_global refuses instances beyond the enumeration cap") {
    CounterRng rng(79);
    const SenseMatrix big(rng.normal_matrix(kEnumerationCap + 1, 2));
    CHECK_THROWS_AS((void)solve_global(big, Observation(Eigen::VectorXd::Ones(kEnumerationCap + 1))),
                    std::invalid_argument);
}

TEST_CASE("optimal value is the squared surface distance") {
    CounterRng rng(83);
    for (int trial = 0; trial < 50; ++trial) {
        const SenseMatrix a(rng.normal_matrix(4, 2));
        const Observation b(rng.uniform_vector(4, 0.0, 2.0));
        const double dist = surface_distance(a, b);
        CHECK(solve_global(a, b).optimal_value ==
              doctest::Approx(dist * dist).epsilon(1e-9));
    }
}

TEST_CASE("finiteness bound on the number of classes") {
    CounterRng rng(67);
    for (int trial = 0; trial < 100; ++trial) {
        const int m = 3 + static_cast<int>(rng.next_u64() % 2);
        const SenseMatrix a(rng.normal_matrix(m, 2));
        const Observation b(rng.uniform_vector(m, 0.0, 1.5));
        const SolutionSet s = solve_global(a, b);
        CHECK(s.classes.size() >= 1);
        CHECK(s.classes.size() <= (std::size_t{1} << (m - 1)));
    }
}

TEST_CASE("solution classes are invariant under row permutations") {
    CounterRng rng(71);
    for (int trial = 0; trial < 40; ++trial) {
        const SenseMatrix a(rng.normal_matrix(4, 2));
        const Eigen::VectorXd b = rng.uniform_vector(4, 0.0, 1.5);
        std::vector<int> perm{0, 1, 2, 3};
        for (int i = 3; i > 0; --i)
            std::swap(perm[static_cast<std::size_t>(i)],
                      perm[rng.next_u64() % static_cast<std::uint64_t>(i + 1)]);
        Eigen::MatrixXd pa(4, 2);
        Eigen::VectorXd pb(4);
        for (int i = 0; i < 4; ++i) {
            pa.row(i) = a.entries().row(perm[static_cast<std::size_t>(i)]);
            pb[i] = b[perm[static_cast<std::size_t>(i)]];
        }
        const SolutionSet s1 = solve_global(a, Observation(b));
        const SolutionSet s2 = solve_global(SenseMatrix(pa), Observation(pb));
        CHECK(s1.classes.size() == s2.classes.size());
        CHECK(s1.optimal_value == doctest::Approx(s2.optimal_value).epsilon(1e-8));
        for (const auto& cls : s1.classes) CHECK(has_class(s2, cls.rep, 1e-6));
    }
}

TEST_CASE("exact recovery under the complement property") {
    CounterRng rng(73);
    int done = 0;
    while (done < 30) {
        const int d = 2 + static_cast<int>(rng.next_u64() % 2);
        const int m = 2 * d - 1 + static_cast<int>(rng.next_u64() % 2);
        const SenseMatrix a(rng.normal_matrix(m, d));
        if (complement_property(a).verdict != Verdict::Holds) continue;
        const Eigen::VectorXd x0 = rng.normal_vector(d);
        const Observation b(abs_measure(a, x0));
        const SolutionSet s = solve_global(a, b);
        REQUIRE(s.classes.size() == 1);
        CHECK(quotient_distance(s.classes[0].rep, x0) <= 1e-8);
        ++done;
    }
}

#include "phaseless/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "phaseless/certificates.hpp"
#include "phaseless/rng.hpp"
#include "phaseless/solver.hpp"
#include "phaseless/surface.hpp"

namespace phaseless {

UniqueProjection unique_projection(const SenseMatrix& a, const Observation& b) {
    const int m = static_cast<int>(a.m());
    const std::uint64_t n = SignPattern::canonical_count(m);

    UniqueProjection out;
    out.best = std::numeric_limits<double>::infinity();
    std::vector<ConeProjection> projections;
    projections.reserve(n);
    for (std::uint64_t k = 0; k < n; ++k) {
        projections.push_back(cone_project(a, SignPattern::from_index(k, m), b));
        if (projections.back().distance < out.best) {
            out.best = projections.back().distance;
            out.point = projections.back().point;
        }
    }
    out.runner_up = std::numeric_limits<double>::infinity();
    for (const auto& proj : projections) {
        if ((proj.point - out.point).norm() <= kPointDedupTol) continue;
        out.runner_up = std::min(out.runner_up, proj.distance);
    }
    out.unique = out.runner_up - out.best > 1e-8 * (1.0 + out.best);
    return out;
}

double solution_set_distance(const SenseMatrix& a, const Observation& b1, const Observation& b2) {
    const SolutionSet s1 = solve_global(a, b1);
    const SolutionSet s2 = solve_global(a, b2);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c1 : s1.classes)
        for (const auto& c2 : s2.classes)
            best = std::min(best, quotient_distance(c1.rep, c2.rep));
    return best;
}

WitnessPair instability_witness(const SenseMatrix& a, const Observation& b0, double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("instability_witness: epsilon must lie in (0, 1)");
    const BestApproximationSet approx = best_approximations(a, b0, 1e-7);
    if (approx.points.size() < 2)
        throw std::invalid_argument(
            "instability_witness: seed has a unique best approximation, no witness possible");

    const Eigen::VectorXd& y1 = approx.points[0];
    const Eigen::VectorXd& y2 = approx.points[1];
    const double half = epsilon / 2.0;

    WitnessPair pair;
    pair.epsilon = epsilon;
    pair.b1 = Observation(half * y1 + (1.0 - half) * b0.values);
    pair.b2 = Observation(half * y2 + (1.0 - half) * b0.values);

    const UniqueProjection p1 = unique_projection(a, pair.b1);
    const UniqueProjection p2 = unique_projection(a, pair.b2);
    if (!p1.unique || (p1.point - y1).norm() > 1e-6 * (1.0 + y1.norm()))
        throw std::logic_error("instability_witness: P(b1) is not {y1} as constructed");
    if (!p2.unique || (p2.point - y2).norm() > 1e-6 * (1.0 + y2.norm()))
        throw std::logic_error("instability_witness: P(b2) is not {y2} as constructed");
    pair.y1 = p1.point;
    pair.y2 = p2.point;

    const double input_dist = (pair.b1.values - pair.b2.values).norm();
    if (input_dist <= 0.0)
        throw std::logic_error("instability_witness: degenerate pair, b1 == b2");
    pair.ratio = (p1.point - p2.point).norm() / input_dist;
    return pair;
}

namespace {

// Index of the cone attaining d(K_A, b), lowest index on ties.
std::uint64_t leading_pattern(const SenseMatrix& a, const Eigen::VectorXd& b) {
    const int m = static_cast<int>(a.m());
    const std::uint64_t n = SignPattern::canonical_count(m);
    std::uint64_t best_k = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::uint64_t k = 0; k < n; ++k) {
        const double dist = cone_project(a, SignPattern::from_index(k, m), Observation(b)).distance;
        if (dist < best) {
            best = dist;
            best_k = k;
        }
    }
    return best_k;
}

bool verified_nonunique(const SenseMatrix& a, const Eigen::VectorXd& b) {
    if (best_approximations(a, Observation(b), 1e-7).points.size() >= 2) return true;
    // Exact multi-solution data maps several classes onto one surface point.
    return solve_global(a, Observation(b)).classes.size() >= 2;
}

void push_if_new(std::vector<Observation>& seeds, const Eigen::VectorXd& b) {
    for (const auto& seen : seeds)
        if ((seen.values - b).norm() <= 1e-6) return;
    seeds.push_back(Observation(b));
}

} // namespace

std::vector<Observation> nonunique_seed_search(const SenseMatrix& a, int trials,
                                               std::uint64_t rng_seed) {
    std::vector<Observation> seeds;
    if (trials <= 0) return seeds;

    const int m = static_cast<int>(a.m());
    CounterRng rng(rng_seed);
    const Certificate cp = complement_property(a);

    if (cp.verdict != Verdict::Holds) {
        // Complement-property violation: u orthogonal to the rows in I, v to
        // the rest; then |A(u+v)| = |A(u-v)| with u+v != +-(u-v).
        const auto& rows = std::get<ComplementEvidence>(cp.evidence).violating_rows;
        std::vector<char> mask(static_cast<std::size_t>(m), 0);
        for (int r : rows) mask[static_cast<std::size_t>(r)] = 1;
        Eigen::MatrixXd sub_i(rows.size(), a.d());
        Eigen::MatrixXd sub_c(m - rows.size(), a.d());
        int ri = 0, rc = 0;
        for (int i = 0; i < m; ++i) {
            if (mask[static_cast<std::size_t>(i)])
                sub_i.row(ri++) = a.entries().row(i);
            else
                sub_c.row(rc++) = a.entries().row(i);
        }
        const auto kernel_vector = [&](const Eigen::MatrixXd& sub) -> Eigen::VectorXd {
            if (sub.rows() == 0) return Eigen::VectorXd::Unit(a.d(), 0);
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(sub, Eigen::ComputeFullV);
            return svd.matrixV().col(a.d() - 1);
        };
        const Eigen::VectorXd u = kernel_vector(sub_i);
        const Eigen::VectorXd v = kernel_vector(sub_c);
        if (quotient_distance(u, v) > 1e-9) {  // u, v not parallel
            const Eigen::VectorXd b = abs_measure(a, u + v);
            if (verified_nonunique(a, b)) push_if_new(seeds, b);
        }
        if (--trials <= 0) return seeds;
    } else {
        // Midpoint of a non-convexity witness. A failed or inapplicable
        // search (d = 1) just falls through to the bisection strategy.
        try {
            const NonconvexityWitness witness = nonconvexity_witness(a, 500, rng.next_u64());
            if (verified_nonunique(a, witness.midpoint)) push_if_new(seeds, witness.midpoint);
        } catch (const SearchBudgetError&) {
        } catch (const std::invalid_argument&) {
        }
        if (--trials <= 0) return seeds;
    }

    // Bisection along segments whose endpoints prefer different cones, until
    // the two leading cone distances tie within 1e-10.
    const double scale = 1.0 + a.sigma_max();
    for (int trial = 0; trial < trials; ++trial) {
        Eigen::VectorXd lo = rng.uniform_vector(m, 0.0, scale);
        Eigen::VectorXd hi = rng.uniform_vector(m, 0.0, scale);
        std::uint64_t pat_lo = leading_pattern(a, lo);
        std::uint64_t pat_hi = leading_pattern(a, hi);
        if (pat_lo == pat_hi) continue;
        for (int step = 0; step < 60; ++step) {
            const Eigen::VectorXd mid = 0.5 * (lo + hi);
            const std::uint64_t pat_mid = leading_pattern(a, mid);
            if (pat_mid == pat_lo) {
                lo = mid;
            } else {
                hi = mid;
                pat_hi = pat_mid;
            }
            const double d_lo =
                cone_project(a, SignPattern::from_index(pat_lo, m), Observation(mid)).distance;
            const double d_hi =
                cone_project(a, SignPattern::from_index(pat_hi, m), Observation(mid)).distance;
            if (std::abs(d_lo - d_hi) <= 1e-10) {
                if (verified_nonunique(a, mid)) push_if_new(seeds, mid);
                break;
            }
        }
    }
    return seeds;
}

StabilityReport convex_region_scan(const SenseMatrix& a, const Observation& center, double radius,
                                   int samples, std::uint64_t rng_seed) {
    if (center.values.size() != a.m())
        throw std::invalid_argument("convex_region_scan: center length mismatch");
    if (radius < 0.0) throw std::invalid_argument("convex_region_scan: negative radius");
    if (samples < 0) throw std::invalid_argument("convex_region_scan: negative sample count");

    const auto require_in_ua = [&](const Eigen::VectorXd& b) -> UniqueProjection {
        UniqueProjection up = unique_projection(a, Observation(b));
        if (!up.unique) {
            std::ostringstream os;
            os << "convex_region_scan: sampled point is outside U_A (best " << up.best
               << ", runner-up " << up.runner_up << "): [" << b.transpose() << "]";
            throw std::invalid_argument(os.str());
        }
        return up;
    };

    StabilityReport report;
    report.seed = rng_seed;
    {
        // Membership in U_A is certified per sampled point only; nothing is
        // claimed for the rest of the ball.
        std::ostringstream os;
        os << "ball(center=[" << center.values.transpose() << "], radius=" << radius
           << "); sampled points individually verified in U_A";
        report.region = os.str();
    }
    require_in_ua(center.values);
    if (radius == 0.0 || samples == 0) return report;

    CounterRng rng(rng_seed);
    const Eigen::Index m = a.m();
    const auto draw = [&]() -> Eigen::VectorXd {
        Eigen::VectorXd dir = rng.normal_vector(m);
        const double norm = dir.norm();
        if (norm <= 0.0) return center.values;
        const double r = radius * std::pow(rng.next_double(), 1.0 / static_cast<double>(m));
        return center.values + (r / norm) * dir;
    };

    for (int i = 0; i < samples; ++i) {
        const Eigen::VectorXd b1 = draw();
        const Eigen::VectorXd b2 = draw();
        const UniqueProjection p1 = require_in_ua(b1);
        const UniqueProjection p2 = require_in_ua(b2);
        const double input_dist = (b1 - b2).norm();
        if (input_dist <= 1e-14 * (1.0 + center.values.norm())) continue;

        PairSample sample;
        sample.b1 = b1;
        sample.b2 = b2;
        sample.input_dist = input_dist;
        sample.projection_ratio = (p1.point - p2.point).norm() / input_dist;
        sample.solution_ratio =
            solution_set_distance(a, Observation(b1), Observation(b2)) / input_dist;
        report.max_projection_ratio = std::max(report.max_projection_ratio, sample.projection_ratio);
        report.max_solution_ratio = std::max(report.max_solution_ratio, sample.solution_ratio);
        report.pairs.push_back(std::move(sample));
    }
    return report;
}

} // namespace phaseless

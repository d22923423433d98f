#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phaseless/core.hpp"

namespace phaseless {

/// Observation pair demonstrating instability: small input displacement,
/// large displacement of the (unique) projections and solutions.
struct WitnessPair {
    Observation b1, b2;
    double ratio = 0.0;    // ||P(b1) - P(b2)|| / ||b1 - b2||, equals 2/epsilon
    double epsilon = 0.0;  // construction parameter
    Eigen::VectorXd y1, y2;  // the verified unique projections
};

struct PairSample {
    Eigen::VectorXd b1, b2;
    double input_dist = 0.0;
    double projection_ratio = 0.0;
    double solution_ratio = 0.0;
};

struct StabilityReport {
    std::vector<PairSample> pairs;
    double max_projection_ratio = 0.0;
    double max_solution_ratio = 0.0;
    std::string region;
    std::uint64_t seed = 0;
};

/// U_A membership probe: the best approximation is unique when the best
/// distance among cones whose projection point differs from the winner
/// exceeds the winning distance by more than 1e-8 * (1 + d(K_A, b)).
struct UniqueProjection {
    bool unique = false;
    Eigen::VectorXd point;     // projection of the winning cone
    double best = 0.0;         // d(K_A, b)
    double runner_up = 0.0;    // best distance to a visibly different point (inf if none)
};

UniqueProjection unique_projection(const SenseMatrix& a, const Observation& b);

/// min over class pairs of the quotient distance between the solution sets
/// of b1 and b2.
double solution_set_distance(const SenseMatrix& a, const Observation& b1, const Observation& b2);

/// Builds b1 = (eps/2) y1 + (1-eps/2) b0 and b2 likewise from the first two
/// best approximations of b0, verifies each has a unique projection, and
/// reports the displacement ratio (2/eps in exact arithmetic). b0 must have
/// at least two best approximations.
WitnessPair instability_witness(const SenseMatrix& a, const Observation& b0, double epsilon);

/// Searches for observations with at least two best approximations (or, for
/// matrices without the phase retrieval property, exact two-class data):
/// midpoints of non-convexity witnesses, the complement-property violation
/// construction, and bisection along segments whose endpoints prefer
/// different cones. May return fewer seeds than asked, possibly none.
std::vector<Observation> nonunique_seed_search(const SenseMatrix& a, int trials,
                                               std::uint64_t rng_seed);

/// Samples observation pairs in the ball around `center`, verifies every
/// sample lies in U_A (aborts otherwise) and reports the worst projection and
/// solution displacement ratios.
StabilityReport convex_region_scan(const SenseMatrix& a, const Observation& center, double radius,
                                   int samples, std::uint64_t rng_seed);

} // namespace phaseless

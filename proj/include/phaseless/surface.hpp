#pragma once

#include <cstdint>
#include <vector>

#include "phaseless/core.hpp"

namespace phaseless {

/// Best approximation to b from one cone K_eps = {y >= 0 : y = D_eps A x},
/// together with a preimage and the KKT residual of the solve.
struct ConeProjection {
    SignPattern pattern;
    Eigen::VectorXd point;     // y* in K_eps nearest to b
    Eigen::VectorXd preimage;  // x* with D_eps A x* = y*
    double distance = 0.0;     // ||b - y*||
    double kkt_residual = 0.0;
};

/// P_{K_A}(b): the points of the phaseless surface nearest to b.
struct BestApproximationSet {
    std::vector<Eigen::VectorXd> points;          // ordered by pattern index
    std::vector<std::uint64_t> pattern_indices;   // cone that produced each point
    double distance = 0.0;                        // d(K_A, b)
    double tol = 0.0;
};

struct Membership {
    bool inside = false;
    Eigen::VectorXd witness;   // x with || |Ax| - y || <= tol (when inside)
    double distance = 0.0;     // exact surface distance; a lower bound when outside
};

struct NonconvexityWitness {
    Eigen::VectorXd y1, y2;    // both in K_A
    Eigen::VectorXd midpoint;  // (y1 + y2) / 2, outside K_A
    double midpoint_distance = 0.0;
};

/// Solves min_x ||D_eps A x - b||^2 s.t. D_eps A x >= 0 by a primal
/// active-set method warm-started from the unconstrained least squares
/// solution. The cone contains 0, so a minimizer always exists.
ConeProjection cone_project(const SenseMatrix& a, const SignPattern& eps, const Observation& b);

/// Exact membership test for the phaseless surface. y with an entry < -tol
/// is rejected without enumeration.
Membership membership(const SenseMatrix& a, const Eigen::VectorXd& y, double tol);

/// d(K_A, b) = min over canonical sign patterns of the per-cone distance.
double surface_distance(const SenseMatrix& a, const Observation& b);

/// Enumerates canonical patterns, keeps projections with distance within
/// the relative band d*(1+tol)+tol, and dedups points closer than the
/// dedup tolerance (1e-7 absolute).
BestApproximationSet best_approximations(const SenseMatrix& a, const Observation& b, double tol);

/// Dedup tolerance for best-approximation points.
inline constexpr double kPointDedupTol = 1e-7;

/// Searches for y1, y2 in K_A whose midpoint lies off the surface by more
/// than 1e-6: sample x, flip coordinate subsets to get x', test the midpoint
/// of |Ax| and |Ax'|. Requires the phase retrieval (complement) property;
/// throws SearchBudgetError after `budget` midpoint tests.
NonconvexityWitness nonconvexity_witness(const SenseMatrix& a, int budget = 2000,
                                         std::uint64_t seed = 1);

} // namespace phaseless

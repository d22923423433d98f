#pragma once

#include <cstdint>
#include <vector>

#include "phaseless/core.hpp"

namespace phaseless {

struct FixedPointResult {
    Eigen::VectorXd x;
    int iters = 0;
    bool converged = false;
};

struct GridScan {
    double best_value = 0.0;
    std::vector<Eigen::VectorXd> argmins;  // grid points within value_tol of the best
    double value_tol = 0.0;                // Lipschitz bound * step
};

/// Global solution of min_x || |Ax| - b ||^2 by exhaustive cone decomposition:
/// every canonical sign pattern contributes its constrained minimizer, and
/// minimizers within tol*(1+f*) of the best value f* are deduped into sign
/// classes. For b >= 0 and full-rank A every returned class is checked
/// against the fixed-point equation.
SolutionSet solve_global(const SenseMatrix& a, const Observation& b, double tol = 1e-9);

/// Alternating iteration x <- (A^T A)^{-1} A^T (b (.) s(Ax)) with s(0) := +1.
/// Stops on a fixed point (step below tol*(1+||x||) or the sign pattern
/// mapping to itself) or when a sign pattern repeats (cycle). Requires
/// rank(A) = d. For b >= 0 the objective is non-increasing.
FixedPointResult fixed_point_iterate(const SenseMatrix& a, const Observation& b,
                                     const Eigen::VectorXd& x0, int max_iters = 256,
                                     double tol = 1e-12);

/// True iff ||x - (A^T A)^{-1} A^T (b (.) s(Ax))|| <= tol * (1 + ||x||).
bool verify_fixed_point(const SenseMatrix& a, const Observation& b, const Eigen::VectorXd& x,
                        double tol = 1e-8);

/// Independent brute-force oracle: evaluates the objective on the axis-aligned
/// grid [lo, hi] with the given step (d <= 3).
GridScan grid_oracle(const SenseMatrix& a, const Observation& b, const Eigen::VectorXd& lo,
                     const Eigen::VectorXd& hi, double step);

} // namespace phaseless

#include "phaseless/solver.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "phaseless/surface.hpp"
#include "phaseless/threads.hpp"

namespace phaseless {

namespace {

// (A^T A)^{-1} A^T (b (.) s), precomputed normal-equation factorization.
struct FixedPointMap {
    explicit FixedPointMap(const SenseMatrix& a) : entries(a.entries()) {
        if (!a.full_column_rank())
            throw std::invalid_argument("fixed-point map: rank-deficient matrix");
        llt.compute(entries.transpose() * entries);
    }

    Eigen::VectorXd step(const Eigen::VectorXd& b, const Eigen::VectorXd& x) const {
        Eigen::VectorXd signed_b(b.size());
        const Eigen::VectorXd ax = entries * x;
        for (Eigen::Index i = 0; i < b.size(); ++i)
            signed_b[i] = ax[i] < 0.0 ? -b[i] : b[i];  // s(0) := +1
        return llt.solve(entries.transpose() * signed_b);
    }

    const Eigen::MatrixXd& entries;
    Eigen::LLT<Eigen::MatrixXd> llt;
};

std::uint64_t sign_mask(const Eigen::VectorXd& v) {
    std::uint64_t mask = 0;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (v[i] < 0.0) mask |= std::uint64_t{1} << i;
    return mask;
}

} // namespace

SolutionSet solve_global(const SenseMatrix& a, const Observation& b, double tol) {
    if (b.values.size() != a.m())
        throw std::invalid_argument("solve_global: observation length mismatch");
    if (tol < 0.0) throw std::invalid_argument("solve_global: negative tolerance");

    const int m = static_cast<int>(a.m());
    const std::uint64_t n = SignPattern::canonical_count(m);  // enforces the cap

    std::vector<double> values(n);
    parallel_for_index(n, [&](std::uint64_t k) {
        const ConeProjection proj = cone_project(a, SignPattern::from_index(k, m), b);
        values[k] = objective(a, b, proj.preimage);
    });

    double best = values[0];
    for (std::uint64_t k = 1; k < n; ++k) best = std::min(best, values[k]);
    const double band = best + tol * (1.0 + best);

    SolutionSet out;
    out.optimal_value = best;
    out.ties_within = tol;
    out.patterns_explored = n;
    for (std::uint64_t k = 0; k < n; ++k) {
        if (values[k] > band) continue;
        const ConeProjection proj = cone_project(a, SignPattern::from_index(k, m), b);
        const Eigen::VectorXd rep = canonical_sign_rep(proj.preimage);
        bool fresh = true;
        for (const auto& cls : out.classes) {
            if (quotient_distance(cls.rep, rep) <= kPointDedupTol) {
                fresh = false;
                break;
            }
        }
        if (fresh) out.classes.push_back({rep, values[k]});
    }

    // Necessary-condition check: for nonnegative data every minimizer obeys
    // the fixed-point equation. A class sitting slack above f* inside the tie
    // band may drift from the true minimizer by ~ sqrt(slack)/sigma_min, so
    // the allowance grows with its slack.
    if (a.full_column_rank() && b.values.minCoeff() >= 0.0) {
        const double sigma_min = a.singular_values()(a.d() - 1);
        const FixedPointMap map(a);
        for (const auto& cls : out.classes) {
            const double slack = std::max(cls.value - best, 0.0);
            const double allowed =
                1e-6 * (1.0 + cls.rep.norm()) + 2.0 * std::sqrt(slack) / sigma_min;
            const double residual = (cls.rep - map.step(b.values, cls.rep)).norm();
            if (residual > allowed) {
                std::ostringstream os;
                os << "solve_global: internal inconsistency, a returned class fails the "
                      "fixed-point equation (value " << cls.value << ", residual " << residual
                   << ")";
                throw std::logic_error(os.str());
            }
        }
    }
    return out;
}

FixedPointResult fixed_point_iterate(const SenseMatrix& a, const Observation& b,
                                     const Eigen::VectorXd& x0, int max_iters, double tol) {
    if (b.values.size() != a.m())
        throw std::invalid_argument("fixed_point_iterate: observation length mismatch");
    if (x0.size() != a.d())
        throw std::invalid_argument("fixed_point_iterate: start length mismatch");
    if (!x0.allFinite()) throw std::invalid_argument("fixed_point_iterate: non-finite start");
    if (a.m() > 63)
        throw std::invalid_argument("fixed_point_iterate: too many rows for pattern tracking");

    const FixedPointMap map(a);
    FixedPointResult result;
    Eigen::VectorXd x = x0;
    std::set<std::uint64_t> seen;
    for (int iter = 1; iter <= max_iters; ++iter) {
        const std::uint64_t pattern = sign_mask(a.entries() * x);
        const Eigen::VectorXd x_next = map.step(b.values, x);
        const std::uint64_t pattern_next = sign_mask(a.entries() * x_next);
        result.x = x_next;
        result.iters = iter;
        if ((x_next - x).norm() <= tol * (1.0 + x.norm()) || pattern_next == pattern) {
            // pattern_next == pattern means the next step reproduces x_next
            result.converged = true;
            return result;
        }
        if (seen.count(pattern_next)) return result;  // cycle, not converged
        seen.insert(pattern);
        x = x_next;
    }
    result.x = x;
    result.iters = max_iters;
    return result;
}

bool verify_fixed_point(const SenseMatrix& a, const Observation& b, const Eigen::VectorXd& x,
                        double tol) {
    if (b.values.size() != a.m())
        throw std::invalid_argument("verify_fixed_point: observation length mismatch");
    if (x.size() != a.d()) throw std::invalid_argument("verify_fixed_point: vector length mismatch");
    const FixedPointMap map(a);
    return (x - map.step(b.values, x)).norm() <= tol * (1.0 + x.norm());
}

GridScan grid_oracle(const SenseMatrix& a, const Observation& b, const Eigen::VectorXd& lo,
                     const Eigen::VectorXd& hi, double step) {
    const Eigen::Index d = a.d();
    if (d > 3) throw std::invalid_argument("grid_oracle: d > 3 is too expensive");
    if (lo.size() != d || hi.size() != d)
        throw std::invalid_argument("grid_oracle: box dimension mismatch");
    if (b.values.size() != a.m())
        throw std::invalid_argument("grid_oracle: observation length mismatch");
    if (!(step > 0.0)) throw std::invalid_argument("grid_oracle: step must be positive");

    std::vector<Eigen::Index> counts(static_cast<std::size_t>(d));
    Eigen::Index total = 1;
    for (Eigen::Index i = 0; i < d; ++i) {
        if (hi[i] < lo[i]) throw std::invalid_argument("grid_oracle: empty box (hi < lo)");
        counts[static_cast<std::size_t>(i)] =
            static_cast<Eigen::Index>(std::floor((hi[i] - lo[i]) / step + 1e-9)) + 1;
        total *= counts[static_cast<std::size_t>(i)];
    }

    // Gradient bound over the box: ||grad f|| <= 2 sigma_max (sigma_max R + ||b||)
    // with R the norm of the farthest corner.
    double corner_sq = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
        const double w = std::max(std::abs(lo[i]), std::abs(hi[i]));
        corner_sq += w * w;
    }
    const double lipschitz =
        2.0 * a.sigma_max() * (a.sigma_max() * std::sqrt(corner_sq) + b.values.norm());

    GridScan scan;
    scan.value_tol = lipschitz * step;
    scan.best_value = std::numeric_limits<double>::infinity();

    Eigen::VectorXd x(d);
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(d), 0);
    std::vector<double> best_values;
    std::vector<Eigen::VectorXd> candidates;
    for (Eigen::Index flat = 0; flat < total; ++flat) {
        for (Eigen::Index i = 0; i < d; ++i)
            x[i] = lo[i] + static_cast<double>(idx[static_cast<std::size_t>(i)]) * step;
        const double f = ((a.entries() * x).cwiseAbs() - b.values).squaredNorm();
        if (f < scan.best_value) scan.best_value = f;
        if (f <= scan.best_value + scan.value_tol) {
            candidates.push_back(x);
            best_values.push_back(f);
            if (candidates.size() > 4096) {  // drop points the improving best has ruled out
                std::size_t keep = 0;
                for (std::size_t i = 0; i < candidates.size(); ++i) {
                    if (best_values[i] <= scan.best_value + scan.value_tol) {
                        candidates[keep] = std::move(candidates[i]);
                        best_values[keep] = best_values[i];
                        ++keep;
                    }
                }
                candidates.resize(keep);
                best_values.resize(keep);
            }
        }
        for (Eigen::Index i = 0; i < d; ++i) {
            if (++idx[static_cast<std::size_t>(i)] < counts[static_cast<std::size_t>(i)]) break;
            idx[static_cast<std::size_t>(i)] = 0;
        }
    }
    for (std::size_t i = 0; i < candidates.size(); ++i)
        if (best_values[i] <= scan.best_value + scan.value_tol)
            scan.argmins.push_back(std::move(candidates[i]));
    return scan;
}

} // namespace phaseless

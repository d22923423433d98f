#include "phaseless/surface.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "phaseless/certificates.hpp"
#include "phaseless/rng.hpp"
#include "phaseless/threads.hpp"

namespace phaseless {

namespace {

// Min-norm least squares via SVD. The rank cut is anchored to `scale` (the
// parent matrix's largest singular value), not to the submatrix's own, so a
// numerically-zero system solves to 0 instead of blowing up along 1e-16
// directions.
Eigen::VectorXd lstsq(const Eigen::MatrixXd& m, const Eigen::VectorXd& rhs, double scale) {
    if (m.rows() == 0 || m.cols() == 0) return Eigen::VectorXd::Zero(m.cols());
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double tol = kRankRelTol * std::max(scale, sv.size() > 0 ? sv[0] : 0.0);
    Eigen::VectorXd coef = svd.matrixU().transpose() * rhs;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        coef[i] = sv[i] > tol ? coef[i] / sv[i] : 0.0;
    return svd.matrixV() * coef;
}

// Orthonormal basis of null(m). `scale` anchors the rank cut to the parent
// matrix so numerically-zero rows are treated consistently.
Eigen::MatrixXd null_basis(const Eigen::MatrixXd& m, double scale) {
    const Eigen::Index d = m.cols();
    if (m.rows() == 0) return Eigen::MatrixXd::Identity(d, d);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double tol = kRankRelTol * std::max(scale, sv.size() > 0 ? sv[0] : 0.0);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv[i] > tol) ++rank;
    return svd.matrixV().rightCols(d - rank);
}

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& m, const std::vector<char>& mask, int count) {
    Eigen::MatrixXd out(count, m.cols());
    int r = 0;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        if (mask[static_cast<std::size_t>(i)]) out.row(r++) = m.row(i);
    return out;
}

} // namespace

ConeProjection cone_project(const SenseMatrix& a, const SignPattern& eps, const Observation& b) {
    if (eps.m() != a.m())
        throw std::invalid_argument("cone_project: pattern length does not match row count");
    if (b.values.size() != a.m())
        throw std::invalid_argument("cone_project: observation length does not match row count");

    const Eigen::MatrixXd bmat = eps.apply_rows(a.entries());  // D_eps A
    const Eigen::Index m = bmat.rows();
    const Eigen::Index d = bmat.cols();
    // The projection is positively homogeneous in b, so solve at unit norm
    // (where the fixed tolerances below are calibrated) and rescale at the end.
    const double data_scale = b.values.norm() > 0.0 ? b.values.norm() : 1.0;
    const Eigen::VectorXd bv = b.values / data_scale;
    const double bnorm = bv.norm();
    const double feas_tol = 1e-12 * (1.0 + bnorm);
    const double scale = a.sigma_max();

    const Eigen::VectorXd x_ls = lstsq(bmat, bv, scale);

    std::vector<char> in_w(static_cast<std::size_t>(m), 0);
    int w_count = 0;
    Eigen::VectorXd x;

    if ((bmat * x_ls).minCoeff() >= -feas_tol) {
        x = x_ls;  // unconstrained optimum already in the cone
    } else {
        x = Eigen::VectorXd::Zero(d);  // 0 is always feasible
        const int guard = 200 + 20 * static_cast<int>(m) * (static_cast<int>(d) + 1);
        for (int iter = 0;; ++iter) {
            if (iter > guard)
                throw std::logic_error("cone_project: active-set iteration guard exceeded");

            // Equality-constrained step target: min ||Bx - b|| s.t. B_W x = 0.
            Eigen::VectorXd x_hat;
            if (w_count == 0) {
                x_hat = x_ls;
            } else {
                const Eigen::MatrixXd bw = select_rows(bmat, in_w, w_count);
                const Eigen::MatrixXd z = null_basis(bw, scale);
                x_hat = z.cols() == 0 ? Eigen::VectorXd::Zero(d).eval()
                                      : (z * lstsq(bmat * z, bv, scale)).eval();
            }

            const Eigen::VectorXd p = x_hat - x;
            if (p.norm() <= 1e-13 * (1.0 + x.norm())) {
                if (w_count == 0) break;  // feasible unconstrained optimum
                const Eigen::VectorXd g = 2.0 * bmat.transpose() * (bmat * x - bv);
                const Eigen::MatrixXd bwt = select_rows(bmat, in_w, w_count).transpose();
                const Eigen::VectorXd mu = lstsq(bwt, g, scale);
                const double mu_tol = 1e-11 * (1.0 + g.norm());
                int drop = -1;
                double worst = -mu_tol;
                int r = 0;
                for (Eigen::Index i = 0; i < m; ++i) {
                    if (!in_w[static_cast<std::size_t>(i)]) continue;
                    if (mu[r] < worst) {  // most negative; ties keep the lower index
                        worst = mu[r];
                        drop = static_cast<int>(i);
                    }
                    ++r;
                }
                if (drop < 0) break;  // KKT satisfied
                in_w[static_cast<std::size_t>(drop)] = 0;
                --w_count;
                continue;
            }

            // Longest feasible step toward x_hat.
            double alpha = 1.0;
            int blocker = -1;
            const double pnorm = p.norm();
            for (Eigen::Index i = 0; i < m; ++i) {
                if (in_w[static_cast<std::size_t>(i)]) continue;
                const double bp = bmat.row(i).dot(p);
                if (bp >= -1e-14 * (1.0 + bmat.row(i).norm() * pnorm)) continue;
                const double ai = std::max(bmat.row(i).dot(x) / -bp, 0.0);
                if (ai < alpha) {
                    alpha = ai;
                    blocker = static_cast<int>(i);
                }
            }
            x += alpha * p;
            if (blocker >= 0) {
                in_w[static_cast<std::size_t>(blocker)] = 1;
                ++w_count;
            }
        }
    }

    ConeProjection out;
    out.pattern = eps;
    out.preimage = x;
    out.point = bmat * x;

    // Entries that dip below zero by no more than the forward-error noise of
    // the product are rounding artifacts; the exact projection is >= 0 there.
    // The raw dip still enters the KKT residual below.
    const double raw_feas = std::max(0.0, -out.point.minCoeff());
    const double product_noise =
        std::max(16.0 * 2.2e-16 * (scale * x.norm() + bnorm + 1.0), feas_tol);
    for (Eigen::Index i = 0; i < m; ++i)
        if (out.point[i] < 0.0 && out.point[i] >= -product_noise) out.point[i] = 0.0;
    out.distance = (bv - out.point).norm();

    // KKT residual: stationarity with clamped multipliers, feasibility,
    // complementarity.
    const Eigen::VectorXd g = 2.0 * bmat.transpose() * (out.point - bv);
    double r_stat = g.norm();
    double r_comp = 0.0;
    if (w_count > 0) {
        const Eigen::MatrixXd bwt = select_rows(bmat, in_w, w_count).transpose();
        const Eigen::VectorXd mu = lstsq(bwt, g, scale).cwiseMax(0.0);
        r_stat = (g - bwt * mu).norm();
        int r = 0;
        for (Eigen::Index i = 0; i < m; ++i)
            if (in_w[static_cast<std::size_t>(i)])
                r_comp = std::max(r_comp, std::abs(mu[r++] * out.point[i]));
    }
    const double r_feas = std::max(raw_feas, -out.point.minCoeff());
    out.kkt_residual = data_scale * std::max({r_stat, r_feas, r_comp});
    out.preimage *= data_scale;
    out.point *= data_scale;
    out.distance *= data_scale;
    return out;
}

namespace {

struct DistanceSweep {
    std::vector<double> distances;  // by canonical pattern index
    std::uint64_t best_index = 0;
    double best_distance = 0.0;
};

DistanceSweep sweep_distances(const SenseMatrix& a, const Observation& b) {
    const int m = static_cast<int>(a.m());
    const std::uint64_t n = SignPattern::canonical_count(m);  // enforces the cap
    DistanceSweep sweep;
    sweep.distances.resize(n);
    parallel_for_index(n, [&](std::uint64_t k) {
        sweep.distances[k] = cone_project(a, SignPattern::from_index(k, m), b).distance;
    });
    sweep.best_index = 0;
    sweep.best_distance = sweep.distances[0];
    for (std::uint64_t k = 1; k < n; ++k) {
        if (sweep.distances[k] < sweep.best_distance) {
            sweep.best_distance = sweep.distances[k];
            sweep.best_index = k;
        }
    }
    return sweep;
}

} // namespace

double surface_distance(const SenseMatrix& a, const Observation& b) {
    if (b.values.size() != a.m())
        throw std::invalid_argument("surface_distance: observation length mismatch");
    return sweep_distances(a, b).best_distance;
}

Membership membership(const SenseMatrix& a, const Eigen::VectorXd& y, double tol) {
    if (y.size() != a.m()) throw std::invalid_argument("membership: vector length mismatch");
    if (!y.allFinite()) throw std::invalid_argument("membership: non-finite entries");
    if (tol < 0.0) throw std::invalid_argument("membership: negative tolerance");

    Membership verdict;
    if (y.minCoeff() < -tol) {
        // K_A lies in the nonnegative orthant; distance to the orthant is a
        // valid lower bound on the surface distance.
        verdict.inside = false;
        verdict.distance = y.cwiseMin(0.0).norm();
        return verdict;
    }
    const Observation b(y);
    const DistanceSweep sweep = sweep_distances(a, b);
    verdict.distance = sweep.best_distance;
    verdict.inside = sweep.best_distance <= tol;
    if (verdict.inside) {
        const int m = static_cast<int>(a.m());
        verdict.witness = cone_project(a, SignPattern::from_index(sweep.best_index, m), b).preimage;
    }
    return verdict;
}

BestApproximationSet best_approximations(const SenseMatrix& a, const Observation& b, double tol) {
    if (b.values.size() != a.m())
        throw std::invalid_argument("best_approximations: observation length mismatch");
    if (tol < 0.0) throw std::invalid_argument("best_approximations: negative tolerance");

    const int m = static_cast<int>(a.m());
    const DistanceSweep sweep = sweep_distances(a, b);
    const double band = sweep.best_distance * (1.0 + tol) + tol;

    BestApproximationSet out;
    out.distance = sweep.best_distance;
    out.tol = tol;
    for (std::uint64_t k = 0; k < sweep.distances.size(); ++k) {
        if (sweep.distances[k] > band) continue;
        ConeProjection proj = cone_project(a, SignPattern::from_index(k, m), b);
        bool fresh = true;
        for (const auto& seen : out.points) {
            if ((seen - proj.point).norm() <= kPointDedupTol) {
                fresh = false;
                break;
            }
        }
        if (fresh) {
            out.points.push_back(std::move(proj.point));
            out.pattern_indices.push_back(k);
        }
    }
    return out;
}

NonconvexityWitness nonconvexity_witness(const SenseMatrix& a, int budget, std::uint64_t seed) {
    if (a.d() < 2)
        throw std::invalid_argument("nonconvexity_witness: requires d >= 2 (the surface is a ray for d = 1)");
    if (complement_property(a).verdict != Verdict::Holds)
        throw std::invalid_argument("nonconvexity_witness: matrix lacks the phase retrieval property");

    const Eigen::Index d = a.d();
    CounterRng rng(seed);
    const std::uint64_t flip_masks = (std::uint64_t{1} << std::min<Eigen::Index>(d, 6)) - 1;
    int tests = 0;
    for (int round = 0;; ++round) {
        const Eigen::VectorXd x =
            round == 0 ? Eigen::VectorXd::Ones(d).eval() : rng.uniform_vector(d, -1.0, 1.0);
        for (std::uint64_t mask = 1; mask < flip_masks; ++mask) {
            Eigen::VectorXd flipped = x;
            for (Eigen::Index i = 0; i < d; ++i)
                if ((mask >> i) & 1) flipped[i] = -flipped[i];
            const Eigen::VectorXd y1 = abs_measure(a, x);
            const Eigen::VectorXd y2 = abs_measure(a, flipped);
            const Eigen::VectorXd mid = 0.5 * (y1 + y2);
            if (++tests > budget)
                throw SearchBudgetError("nonconvexity_witness: budget exhausted with no midpoint off the surface");
            const double dist = surface_distance(a, Observation(mid));
            if (dist > 1e-6) return {y1, y2, mid, dist};
        }
    }
}

} // namespace phaseless

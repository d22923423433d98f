#include "phaseless/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "phaseless/solver.hpp"

namespace phaseless {

const char* to_string(CertificateKind k) {
    switch (k) {
        case CertificateKind::ComplementProperty: return "complement_property";
        case CertificateKind::Scp: return "scp";
        case CertificateKind::PolyScreen: return "poly_screen";
        case CertificateKind::NearSurface: return "near_surface";
        case CertificateKind::ExactUnique: return "exact_unique";
    }
    return "?";
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Holds: return "holds";
        case Verdict::Fails: return "fails";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

namespace {

std::vector<int> mask_to_rows(std::uint64_t mask, int m) {
    std::vector<int> rows;
    for (int i = 0; i < m; ++i)
        if ((mask >> i) & 1) rows.push_back(i);
    return rows;
}

// rank(A_I) == d, judged against the full matrix's largest singular value.
bool subset_spans(const Eigen::MatrixXd& a, std::uint64_t mask, double sigma_max) {
    const Eigen::Index d = a.cols();
    const int rows = __builtin_popcountll(mask);
    if (rows < d) return false;
    Eigen::MatrixXd sub(rows, d);
    int r = 0;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        if ((mask >> i) & 1) sub.row(r++) = a.row(i);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sub);
    const double tol = kRankRelTol * sigma_max;
    const Eigen::VectorXd& sv = svd.singularValues();
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv[i] > tol) ++rank;
    return rank == d;
}

} // namespace

Certificate complement_property(const SenseMatrix& a) {
    const int m = static_cast<int>(a.m());
    if (m > kEnumerationCap)
        throw std::invalid_argument("complement_property: enumeration cap exceeded");
    const std::uint64_t full = (m == 64) ? ~std::uint64_t{0} : (std::uint64_t{1} << m) - 1;
    const double sigma_max = a.sigma_max();

    // One subset per unordered pair {I, I^c}: iterate masks with row 0 absent.
    for (std::uint64_t half = 0; half < (std::uint64_t{1} << (m - 1)); ++half) {
        const std::uint64_t mask = half << 1;
        const std::uint64_t cmask = full & ~mask;
        if (subset_spans(a.entries(), mask, sigma_max)) continue;
        if (subset_spans(a.entries(), cmask, sigma_max)) continue;
        const std::uint64_t reported = std::min(mask, cmask);
        return {CertificateKind::ComplementProperty, Verdict::Fails,
                ComplementEvidence{mask_to_rows(reported, m)}};
    }
    return {CertificateKind::ComplementProperty, Verdict::Holds, ComplementEvidence{}};
}

Certificate scp_sigma(const SenseMatrix& a) {
    const int m = static_cast<int>(a.m());
    if (m > kEnumerationCap) throw std::invalid_argument("scp_sigma: enumeration cap exceeded");
    const Eigen::Index d = a.d();

    std::vector<Eigen::MatrixXd> outer;
    outer.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i)
        outer.push_back(a.entries().row(i).transpose() * a.entries().row(i));
    Eigen::MatrixXd gram_total = Eigen::MatrixXd::Zero(d, d);
    for (const auto& p : outer) gram_total += p;

    const auto lambda_min = [&](const Eigen::MatrixXd& g) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
        return std::max(es.eigenvalues()(0), 0.0);
    };

    // Gray-code walk over all subsets containing row 0: one outer product is
    // added or removed per step. Gamma and its complement carry the same
    // value, so this covers every unordered pair.
    double best = std::numeric_limits<double>::infinity();
    std::uint64_t best_mask = 1;
    Eigen::MatrixXd gram = outer[0];
    std::uint64_t gray_prev = 0;
    const std::uint64_t half_count = std::uint64_t{1} << (m - 1);
    for (std::uint64_t k = 0; k < half_count; ++k) {
        const std::uint64_t gray = k ^ (k >> 1);
        if (k > 0) {
            const std::uint64_t changed = gray ^ gray_prev;  // single bit
            const int row = 1 + __builtin_ctzll(changed);
            if (gray & changed)
                gram += outer[static_cast<std::size_t>(row)];
            else
                gram -= outer[static_cast<std::size_t>(row)];
        }
        gray_prev = gray;
        const std::uint64_t mask = 1 | (gray << 1);
        const double value = std::max(lambda_min(gram), lambda_min(gram_total - gram));
        if (value < best || (value == best && mask < best_mask)) {
            best = value;
            best_mask = mask;
        }
    }

    ScpEvidence ev;
    ev.sigma_sq = best;
    ev.sigma = std::sqrt(best);
    ev.gamma = mask_to_rows(best_mask, m);
    const Verdict verdict = best > 0.0 ? Verdict::Holds : Verdict::Fails;
    return {CertificateKind::Scp, verdict, std::move(ev)};
}

double gaussian_scp_bound(int m, int d, double eps) {
    if (d < 1) throw std::invalid_argument("gaussian_scp_bound: d must be positive");
    if (m <= 2 * d)
        throw std::invalid_argument("gaussian_scp_bound: requires m > 2d (formula singular at R = 2)");
    if (!(eps > 0.0)) throw std::invalid_argument("gaussian_scp_bound: eps must be positive");
    const double r = static_cast<double>(m) / d;
    const double lead = 1.0 / (std::sqrt(2.0) * std::exp(1.0 + eps / (r - 2.0)));
    return lead * (m - 2.0 * d + 2.0) / (std::pow(2.0, r / (r - 2.0)) * std::sqrt(static_cast<double>(m)));
}

namespace {

const Eigen::MatrixXd& orthonormal_form(const SenseMatrix& a) {
    if (a.whitened()) return a.whitened()->matrix;
    const Eigen::MatrixXd gram = a.entries().transpose() * a.entries();
    const double defect =
        (gram - Eigen::MatrixXd::Identity(a.d(), a.d())).cwiseAbs().maxCoeff();
    if (defect > 1e-10) {
        std::ostringstream os;
        os << "poly_screen_value: matrix is not whitened (||A^T A - I||_max = " << defect << ")";
        throw std::invalid_argument(os.str());
    }
    return a.entries();
}

} // namespace

double poly_screen_value(const SenseMatrix& whitened, const SignPattern& eps1,
                         const SignPattern& eps2, const Observation& b) {
    const Eigen::MatrixXd& at = orthonormal_form(whitened);
    if (eps1.m() != at.rows() || eps2.m() != at.rows() || b.values.size() != at.rows())
        throw std::invalid_argument("poly_screen_value: dimension mismatch");
    const Eigen::VectorXd u = at.transpose() * eps1.apply(b.values);
    const Eigen::VectorXd v = at.transpose() * eps2.apply(b.values);
    return u.squaredNorm() - v.squaredNorm();
}

Certificate poly_screen(const SenseMatrix& a, const Observation& b, double tol) {
    const int m = static_cast<int>(a.m());
    if (b.values.size() != m) throw std::invalid_argument("poly_screen: observation length mismatch");
    const std::uint64_t n = SignPattern::canonical_count(m);  // enforces the cap
    const SenseMatrix white = whiten(a);                      // rejects rank deficiency
    const Eigen::MatrixXd at = white.whitened()->matrix.transpose();  // d x m

    // Quadratic form per canonical pattern, by a Gray-code walk: flipping the
    // sign of entry i moves u by -+ 2 b_i atilde_i.
    std::vector<double> by_index(n);
    Eigen::VectorXd u = at * b.values;
    std::uint64_t gray_prev = 0;
    for (std::uint64_t k = 0; k < n; ++k) {
        const std::uint64_t gray = k ^ (k >> 1);
        if (k > 0) {
            const std::uint64_t changed = gray ^ gray_prev;
            const int row = 1 + __builtin_ctzll(changed);
            const double sign = (gray & changed) ? -1.0 : 1.0;  // bit set = entry turns negative
            u += 2.0 * sign * b.values[row] * at.col(row);
        }
        gray_prev = gray;
        by_index[gray] = u.squaredNorm();
    }

    std::vector<std::uint64_t> order(n);
    std::iota(order.begin(), order.end(), std::uint64_t{0});
    std::sort(order.begin(), order.end(), [&](std::uint64_t lhs, std::uint64_t rhs) {
        return by_index[lhs] < by_index[rhs] || (by_index[lhs] == by_index[rhs] && lhs < rhs);
    });

    PolyScreenEvidence ev;
    ev.threshold = tol * b.values.squaredNorm();
    ev.pairs_checked = n * (n - 1) / 2;

    // Two-pointer sweep over the sorted values counts every pair with
    // |P| <= threshold without enumerating all of them.
    std::uint64_t lo = 0;
    for (std::uint64_t hi = 1; hi < n; ++hi) {
        while (by_index[order[hi]] - by_index[order[lo]] > ev.threshold) ++lo;
        ev.near_zero_count += hi - lo;
        for (std::uint64_t j = lo; j < hi && ev.near_zero.size() < kPolyScreenEvidenceCap; ++j) {
            const std::uint64_t k1 = std::min(order[j], order[hi]);
            const std::uint64_t k2 = std::max(order[j], order[hi]);
            ev.near_zero.push_back({SignPattern::from_index(k1, m), SignPattern::from_index(k2, m),
                                    by_index[k1] - by_index[k2]});
        }
    }

    const Verdict verdict = ev.near_zero_count == 0 ? Verdict::Holds : Verdict::Inconclusive;
    return {CertificateKind::PolyScreen, verdict, std::move(ev)};
}

Certificate near_surface_uniqueness(const SenseMatrix& a, const Eigen::VectorXd& x0,
                                    const Eigen::VectorXd& eta) {
    if (x0.size() != a.d())
        throw std::invalid_argument("near_surface_uniqueness: x0 length mismatch");
    if (eta.size() != a.m())
        throw std::invalid_argument("near_surface_uniqueness: eta length mismatch");
    const Eigen::VectorXd measured = abs_measure(a, x0);
    const Eigen::VectorXd b = measured + eta;
    if (b.minCoeff() < 0.0) {
        std::ostringstream os;
        os << "near_surface_uniqueness: b = |A x0| + eta has a negative entry ("
           << b.minCoeff() << ")";
        throw std::invalid_argument(os.str());
    }

    const SenseMatrix white = whiten(a);  // rejects rank deficiency
    const Certificate scp = scp_sigma(SenseMatrix(white.whitened()->matrix));
    const double sigma = std::get<ScpEvidence>(scp.evidence).sigma;

    NearSurfaceEvidence ev;
    ev.lambda = measured.minCoeff();
    ev.eta_norm = eta.norm();
    ev.beta = std::min(sigma, 1.0 - 1e-12);
    ev.margin = ev.beta * ev.beta * ev.lambda - ev.eta_norm;

    Verdict verdict;
    if (sigma <= 0.0)
        verdict = Verdict::Inconclusive;  // the bound is vacuous without a positive SCP level
    else
        verdict = ev.eta_norm <= ev.beta * ev.beta * ev.lambda ? Verdict::Holds : Verdict::Fails;
    return {CertificateKind::NearSurface, verdict, ev};
}

Certificate certify_unique(const SenseMatrix& a, const Observation& b, double tol) {
    const Certificate cp = complement_property(a);
    if (cp.verdict != Verdict::Holds) {
        ExactUniqueEvidence ev;
        ev.note = "matrix lacks the complement (phase retrieval) property; "
                  "uniqueness is not equivalent to a single best approximation";
        return {CertificateKind::ExactUnique, Verdict::Inconclusive, std::move(ev)};
    }
    const SolutionSet ss = solve_global(a, b, tol);
    ExactUniqueEvidence ev;
    ev.classes = ss.classes;
    ev.optimal_value = ss.optimal_value;
    const Verdict verdict = ss.classes.size() == 1 ? Verdict::Holds : Verdict::Fails;
    return {CertificateKind::ExactUnique, verdict, std::move(ev)};
}

} // namespace phaseless

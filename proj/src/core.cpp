#include "phaseless/core.hpp"

#include <cmath>
#include <sstream>

namespace phaseless {

namespace {

void require_finite(const Eigen::MatrixXd& m, const char* what) {
    if (!m.allFinite()) throw std::invalid_argument(std::string(what) + ": non-finite entries");
}

void require_same_length(Eigen::Index got, Eigen::Index want, const char* what) {
    if (got != want) {
        std::ostringstream os;
        os << what << ": dimension mismatch (got " << got << ", expected " << want << ")";
        throw std::invalid_argument(os.str());
    }
}

} // namespace

SenseMatrix::SenseMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
    if (entries_.rows() < 1 || entries_.cols() < 1)
        throw std::invalid_argument("SenseMatrix: need m >= 1 and d >= 1");
    require_finite(entries_, "SenseMatrix");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(entries_);
    singular_values_ = svd.singularValues();
    const double tol = kRankRelTol * sigma_max();
    rank_ = 0;
    for (Eigen::Index i = 0; i < singular_values_.size(); ++i)
        if (singular_values_[i] > tol) ++rank_;
}

Observation::Observation(Eigen::VectorXd b) : values(std::move(b)) {
    require_finite(values, "Observation");
}

Observation::Observation(Eigen::VectorXd b, Eigen::VectorXd eta)
    : values(std::move(b)), noise(std::move(eta)) {
    require_finite(values, "Observation");
    require_finite(*noise, "Observation noise");
    require_same_length(noise->size(), values.size(), "Observation noise");
}

SignPattern SignPattern::from_index(std::uint64_t index, int m) {
    if (m < 1 || m > 63) throw std::invalid_argument("SignPattern: m out of range");
    if (m <= kEnumerationCap && index >= canonical_count(m))
        throw std::invalid_argument("SignPattern: index out of range");
    SignPattern p;
    p.signs_.resize(m);
    p.signs_[0] = 1;
    for (int i = 1; i < m; ++i)
        p.signs_[i] = ((index >> (i - 1)) & 1) ? -1 : 1;
    return p;
}

SignPattern SignPattern::of_vector(const Eigen::VectorXd& v) {
    SignPattern p;
    p.signs_.resize(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i)
        p.signs_[i] = (v[i] < 0.0) ? -1 : 1;  // sign(0) := +1
    return p;
}

std::uint64_t SignPattern::canonical_count(int m) {
    if (m < 1 || m > kEnumerationCap)
        throw std::invalid_argument("SignPattern: enumeration cap exceeded");
    return std::uint64_t{1} << (m - 1);
}

SignPattern SignPattern::canonical() const {
    return (!signs_.empty() && signs_[0] == -1) ? negated() : *this;
}

SignPattern SignPattern::negated() const {
    SignPattern p(*this);
    for (auto& s : p.signs_) s = static_cast<std::int8_t>(-s);
    return p;
}

std::uint64_t SignPattern::index() const {
    if (!is_canonical()) throw std::logic_error("SignPattern::index: pattern not canonical");
    std::uint64_t k = 0;
    for (int i = 1; i < m(); ++i)
        if (signs_[i] < 0) k |= std::uint64_t{1} << (i - 1);
    return k;
}

Eigen::VectorXd SignPattern::apply(const Eigen::VectorXd& v) const {
    require_same_length(v.size(), m(), "SignPattern::apply");
    Eigen::VectorXd out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = signs_[i] * v[i];
    return out;
}

Eigen::MatrixXd SignPattern::apply_rows(const Eigen::MatrixXd& mat) const {
    require_same_length(mat.rows(), m(), "SignPattern::apply_rows");
    Eigen::MatrixXd out = mat;
    for (Eigen::Index i = 0; i < mat.rows(); ++i)
        if (signs_[i] < 0) out.row(i) = -out.row(i);
    return out;
}

Eigen::VectorXd canonical_sign_rep(const Eigen::VectorXd& x) {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (std::abs(x[i]) > kCanonicalSignTol)
            return x[i] > 0.0 ? x : Eigen::VectorXd(-x);
    }
    return x;
}

double objective(const SenseMatrix& a, const Observation& b, const Eigen::VectorXd& x) {
    require_same_length(b.values.size(), a.m(), "objective: b");
    require_same_length(x.size(), a.d(), "objective: x");
    return ((a.entries() * x).cwiseAbs() - b.values).squaredNorm();
}

double quotient_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    require_same_length(y.size(), x.size(), "quotient_distance");
    return std::min((x - y).norm(), (x + y).norm());
}

Eigen::VectorXd abs_measure(const SenseMatrix& a, const Eigen::VectorXd& x) {
    require_same_length(x.size(), a.d(), "abs_measure");
    return (a.entries() * x).cwiseAbs();
}

SenseMatrix whiten(const SenseMatrix& a) {
    const Eigen::Index d = a.d();
    if (!a.full_column_rank()) {
        const double tol = kRankRelTol * a.sigma_max();
        double deficient = 0.0;
        if (a.singular_values().size() == d) deficient = a.singular_values()[d - 1];
        std::ostringstream os;
        os << "whiten: rank-deficient matrix (rank " << a.rank() << " < d = " << d
           << "); singular value " << d << " is " << deficient << " <= tolerance " << tol;
        throw std::invalid_argument(os.str());
    }
    // Symmetric square root of the Gram matrix: T = (A^T A)^{1/2},
    // Atilde = A T^{-1}. Reduces to Atilde = A, T = I when A is already
    // column-orthonormal.
    const Eigen::MatrixXd gram = a.entries().transpose() * a.entries();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("whiten: eigendecomposition failed");
    const Eigen::VectorXd lam = es.eigenvalues();
    const Eigen::MatrixXd v = es.eigenvectors();
    Eigen::VectorXd root = lam.cwiseMax(0.0).cwiseSqrt();
    WhitenedForm w;
    w.transform = v * root.asDiagonal() * v.transpose();
    w.matrix = a.entries() * (v * root.cwiseInverse().asDiagonal() * v.transpose());
    SenseMatrix out(a);
    out.whitened_ = std::move(w);
    return out;
}

} // namespace phaseless

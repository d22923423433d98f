#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "phaseless/errors.hpp"

namespace phaseless {

/// Enumeration-based sweeps refuse instances with more rows than this
/// (2^(m-1) half-patterns at the cap).
inline constexpr int kEnumerationCap = 24;

/// A singular value counts as nonzero iff it exceeds kRankRelTol * sigma_max.
inline constexpr double kRankRelTol = 1e-10;

/// Canonical sign rule: first coordinate with magnitude above this is made positive.
inline constexpr double kCanonicalSignTol = 1e-12;

struct WhitenedForm {
    Eigen::MatrixXd matrix;     // Atilde, columns orthonormal
    Eigen::MatrixXd transform;  // T with xtilde = T x and Atilde * T = A
};

/// The measurement matrix A in R^{m x d} with its cached spectral data.
/// Immutable after construction.
class SenseMatrix {
public:
    explicit SenseMatrix(Eigen::MatrixXd entries);

    const Eigen::MatrixXd& entries() const { return entries_; }
    Eigen::Index m() const { return entries_.rows(); }
    Eigen::Index d() const { return entries_.cols(); }

    double sigma_max() const { return singular_values_.size() ? singular_values_[0] : 0.0; }
    const Eigen::VectorXd& singular_values() const { return singular_values_; }
    int rank() const { return rank_; }
    bool full_column_rank() const { return rank_ == static_cast<int>(d()); }

    const std::optional<WhitenedForm>& whitened() const { return whitened_; }

private:
    friend SenseMatrix whiten(const SenseMatrix& a);

    Eigen::MatrixXd entries_;
    Eigen::VectorXd singular_values_;  // descending
    int rank_ = 0;
    std::optional<WhitenedForm> whitened_;
};

/// Observation vector b, optionally with the noise that produced it
/// (when synthesized as |A x0| + eta).
struct Observation {
    Eigen::VectorXd values;
    std::optional<Eigen::VectorXd> noise;

    Observation() = default;
    explicit Observation(Eigen::VectorXd b);
    Observation(Eigen::VectorXd b, Eigen::VectorXd eta);
};

/// eps in {+1,-1}^m selecting one polyhedral cone K_eps of the phaseless
/// surface. Canonical form has eps[0] = +1 (K_eps = K_{-eps}); canonical
/// patterns are indexed 0 .. 2^(m-1)-1 by the sign bits of rows 1..m-1.
class SignPattern {
public:
    static SignPattern from_index(std::uint64_t index, int m);
    /// Entrywise sign of v with sign(0) := +1. Not canonicalized.
    static SignPattern of_vector(const Eigen::VectorXd& v);
    static std::uint64_t canonical_count(int m);

    int m() const { return static_cast<int>(signs_.size()); }
    int sign(int i) const { return signs_[i]; }
    bool is_canonical() const { return !signs_.empty() && signs_[0] == 1; }
    SignPattern canonical() const;
    SignPattern negated() const;
    std::uint64_t index() const;  // canonical patterns only

    /// D_eps v
    Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
    /// D_eps M (flips the sign of whole rows)
    Eigen::MatrixXd apply_rows(const Eigen::MatrixXd& m) const;

    bool operator==(const SignPattern& other) const { return signs_ == other.signs_; }

private:
    std::vector<std::int8_t> signs_;
};

/// A solution x represented canonically up to global sign, with its
/// objective value.
struct SignClass {
    Eigen::VectorXd rep;
    double value = 0.0;
};

/// Canonical representative of {x, -x}: the first coordinate with magnitude
/// above kCanonicalSignTol is made positive; the all-zero vector is its own
/// representative. Idempotent.
Eigen::VectorXd canonical_sign_rep(const Eigen::VectorXd& x);

/// All global minimizers of min_x || |Ax| - b ||^2 as sign classes.
struct SolutionSet {
    std::vector<SignClass> classes;
    double optimal_value = 0.0;
    double ties_within = 0.0;            // tie tolerance used to collect classes
    std::uint64_t patterns_explored = 0;
};

/// || |Ax| - b ||^2
double objective(const SenseMatrix& a, const Observation& b, const Eigen::VectorXd& x);

/// min(||x - y||, ||x + y||) -- the metric on R^d / {+-1}.
double quotient_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// |Ax| entrywise; the result lies on the phaseless surface by construction.
Eigen::VectorXd abs_measure(const SenseMatrix& a, const Eigen::VectorXd& x);

/// Returns a copy of `a` with the whitened form populated: Atilde with
/// Atilde^T Atilde = I and T = (A^T A)^{1/2}, so Atilde * T = A and
/// |Atilde xtilde| = |A x| for xtilde = T x. Requires rank(A) = d.
SenseMatrix whiten(const SenseMatrix& a);

} // namespace phaseless

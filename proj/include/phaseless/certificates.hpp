#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "phaseless/core.hpp"

namespace phaseless {

enum class CertificateKind { ComplementProperty, Scp, PolyScreen, NearSurface, ExactUnique };
enum class Verdict { Holds, Fails, Inconclusive };

const char* to_string(CertificateKind k);
const char* to_string(Verdict v);

/// Row subset violating the complement property (empty when the property holds).
struct ComplementEvidence {
    std::vector<int> violating_rows;  // 0-based
};

struct ScpEvidence {
    double sigma = 0.0;
    double sigma_sq = 0.0;
    std::vector<int> gamma;  // 0-based subset attaining the minimum
};

struct PolyScreenEvidence {
    struct Pair {
        SignPattern first, second;
        double value = 0.0;  // P_{first,second}(b)
    };
    std::vector<Pair> near_zero;       // capped at kPolyScreenEvidenceCap
    std::uint64_t near_zero_count = 0; // true number of pairs at or below threshold
    std::uint64_t pairs_checked = 0;
    double threshold = 0.0;
};

struct NearSurfaceEvidence {
    double beta = 0.0;
    double lambda = 0.0;
    double eta_norm = 0.0;
    double margin = 0.0;  // beta^2 * lambda - ||eta||
};

struct ExactUniqueEvidence {
    std::vector<SignClass> classes;
    double optimal_value = 0.0;
    std::string note;
};

struct Certificate {
    CertificateKind kind;
    Verdict verdict;
    std::variant<std::monostate, ComplementEvidence, ScpEvidence, PolyScreenEvidence,
                 NearSurfaceEvidence, ExactUniqueEvidence>
        evidence;
};

inline constexpr std::size_t kPolyScreenEvidenceCap = 64;

/// Complement property: for every row subset I, the rows in I or in its
/// complement span R^d. Equivalent to the phase retrieval property over R.
/// On failure the evidence carries the lowest violating subset.
Certificate complement_property(const SenseMatrix& a);

/// sigma^2 = min over Gamma of max(lambda_min(Gram(Gamma)), lambda_min(Gram(Gamma^c))),
/// with empty subsets contributing 0. Evidence carries sigma and an achieving Gamma.
Certificate scp_sigma(const SenseMatrix& a);

/// Closed-form strong-complement-property level for an m x d Gaussian matrix,
/// sigma = (m - 2d + 2) / (sqrt(2) e^{1 + eps/(R-2)} 2^{R/(R-2)} sqrt(m)) with
/// R = m/d. Requires m > 2d.
double gaussian_scp_bound(int m, int d, double eps);

/// P_{eps1,eps2}(b) = ||Atilde^T D_eps1 b||^2 - ||Atilde^T D_eps2 b||^2 for a
/// column-orthonormal matrix. Accepts a whitened SenseMatrix (uses its
/// whitened form) or one whose own entries are column-orthonormal.
double poly_screen_value(const SenseMatrix& whitened, const SignPattern& eps1,
                         const SignPattern& eps2, const Observation& b);

/// Whitens A and sweeps all unordered canonical pattern pairs. Holds
/// (unique-compatible) iff every |P| > tol * ||b||^2; otherwise inconclusive
/// with the near-zero pairs as evidence. A zero P never proves non-uniqueness.
Certificate poly_screen(const SenseMatrix& a, const Observation& b, double tol = 1e-8);

/// Near-surface uniqueness test for b = |A x0| + eta: holds when
/// ||eta|| <= beta^2 * lambda with beta the strongest admissible SCP level of
/// the whitened matrix and lambda = min_i |A x0|_i. Requires b >= 0.
Certificate near_surface_uniqueness(const SenseMatrix& a, const Eigen::VectorXd& x0,
                                    const Eigen::VectorXd& eta);

/// Ground-truth uniqueness verdict via global solution: holds iff exactly one
/// class lies in the tie band. Inconclusive when A lacks the complement
/// property (the equivalence needs it).
Certificate certify_unique(const SenseMatrix& a, const Observation& b, double tol = 1e-9);

} // namespace phaseless

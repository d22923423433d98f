#pragma once

#include <string>

#include <json.hpp>

#include "phaseless/certificates.hpp"
#include "phaseless/core.hpp"
#include "phaseless/solver.hpp"
#include "phaseless/stability.hpp"
#include "phaseless/surface.hpp"

namespace phaseless {

/// Matrix file: CSV with a first line "m,d" and m rows of d comma-separated
/// decimals, or JSON {"m","d","entries"}. Dispatches on the leading
/// non-whitespace character.
SenseMatrix read_matrix(const std::string& path);

/// Vector file: CSV with one decimal per line, or JSON {"values":[...]}.
Eigen::VectorXd read_vector(const std::string& path);

SenseMatrix parse_matrix_csv(const std::string& text);
Eigen::VectorXd parse_vector_csv(const std::string& text);

std::string write_matrix_csv(const Eigen::MatrixXd& m);
std::string write_vector_csv(const Eigen::VectorXd& v);

nlohmann::json vector_json(const Eigen::VectorXd& v);
nlohmann::json matrix_json(const Eigen::MatrixXd& m);
nlohmann::json sign_pattern_json(const SignPattern& p);
nlohmann::json solution_set_json(const SolutionSet& s);
nlohmann::json best_approximations_json(const BestApproximationSet& s);
nlohmann::json membership_json(const Membership& m);
nlohmann::json nonconvexity_witness_json(const NonconvexityWitness& w);
nlohmann::json certificate_json(const Certificate& c);
nlohmann::json witness_pair_json(const WitnessPair& w);
nlohmann::json stability_report_json(const StabilityReport& r);

} // namespace phaseless

#include "phaseless/io.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace phaseless {

namespace {

using nlohmann::json;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

bool looks_like_json(const std::string& text) {
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        return c == '{' || c == '[';
    }
    return false;
}

double parse_decimal(const std::string& token, int line) {
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(token, &used);
    } catch (const std::exception&) {
        throw ParseError("expected a decimal, got \"" + token + "\"", line);
    }
    for (std::size_t i = used; i < token.size(); ++i)
        if (!std::isspace(static_cast<unsigned char>(token[i])))
            throw ParseError("trailing characters after decimal in \"" + token + "\"", line);
    return value;
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(',', start);
        out.push_back(s.substr(start, pos == std::string::npos ? pos : pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

std::vector<std::string> nonblank_lines_keep_numbers(const std::string& text,
                                                     std::vector<int>& numbers) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        bool blank = true;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
        if (blank) continue;
        lines.push_back(line);
        numbers.push_back(n);
    }
    return lines;
}

SenseMatrix matrix_from_json(const json& j) {
    if (!j.is_object() || !j.contains("m") || !j.contains("d") || !j.contains("entries"))
        throw ParseError("matrix JSON must have fields \"m\", \"d\", \"entries\"");
    const Eigen::Index m = j.at("m").get<Eigen::Index>();
    const Eigen::Index d = j.at("d").get<Eigen::Index>();
    const auto& entries = j.at("entries");
    if (!entries.is_array() || static_cast<Eigen::Index>(entries.size()) != m)
        throw ParseError("matrix JSON: \"entries\" must be an array of m rows");
    Eigen::MatrixXd a(m, d);
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto& row = entries.at(static_cast<std::size_t>(i));
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != d)
            throw ParseError("matrix JSON: row " + std::to_string(i + 1) + " must have d entries");
        for (Eigen::Index k = 0; k < d; ++k)
            a(i, k) = row.at(static_cast<std::size_t>(k)).get<double>();
    }
    return SenseMatrix(std::move(a));
}

Eigen::VectorXd vector_from_json(const json& j) {
    if (!j.is_object() || !j.contains("values") || !j.at("values").is_array())
        throw ParseError("vector JSON must have an array field \"values\"");
    const auto& values = j.at("values");
    Eigen::VectorXd v(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) v[static_cast<Eigen::Index>(i)] = values.at(i).get<double>();
    return v;
}

} // namespace

SenseMatrix parse_matrix_csv(const std::string& text) {
    std::vector<int> numbers;
    const std::vector<std::string> lines = nonblank_lines_keep_numbers(text, numbers);
    if (lines.empty()) throw ParseError("empty matrix file");
    const auto header = split_commas(lines[0]);
    if (header.size() != 2)
        throw ParseError("matrix header must be \"m,d\"", numbers[0]);
    const int m = static_cast<int>(parse_decimal(header[0], numbers[0]));
    const int d = static_cast<int>(parse_decimal(header[1], numbers[0]));
    if (m < 1 || d < 1) throw ParseError("matrix header must give m >= 1 and d >= 1", numbers[0]);
    if (static_cast<int>(lines.size()) != m + 1)
        throw ParseError("expected " + std::to_string(m) + " matrix rows, found " +
                         std::to_string(lines.size() - 1));
    Eigen::MatrixXd a(m, d);
    for (int i = 0; i < m; ++i) {
        const auto row = split_commas(lines[static_cast<std::size_t>(i) + 1]);
        if (static_cast<int>(row.size()) != d)
            throw ParseError("expected " + std::to_string(d) + " entries", numbers[static_cast<std::size_t>(i) + 1]);
        for (int k = 0; k < d; ++k)
            a(i, k) = parse_decimal(row[static_cast<std::size_t>(k)], numbers[static_cast<std::size_t>(i) + 1]);
    }
    return SenseMatrix(std::move(a));
}

Eigen::VectorXd parse_vector_csv(const std::string& text) {
    std::vector<int> numbers;
    const std::vector<std::string> lines = nonblank_lines_keep_numbers(text, numbers);
    if (lines.empty()) throw ParseError("empty vector file");
    Eigen::VectorXd v(static_cast<Eigen::Index>(lines.size()));
    for (std::size_t i = 0; i < lines.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = parse_decimal(lines[i], numbers[i]);
    return v;
}

SenseMatrix read_matrix(const std::string& path) {
    const std::string text = slurp(path);
    if (looks_like_json(text)) {
        json j;
        try {
            j = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ParseError(std::string("matrix JSON: ") + e.what());
        }
        return matrix_from_json(j);
    }
    return parse_matrix_csv(text);
}

Eigen::VectorXd read_vector(const std::string& path) {
    const std::string text = slurp(path);
    if (looks_like_json(text)) {
        json j;
        try {
            j = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ParseError(std::string("vector JSON: ") + e.what());
        }
        return vector_from_json(j);
    }
    return parse_vector_csv(text);
}

std::string write_matrix_csv(const Eigen::MatrixXd& m) {
    std::ostringstream os;
    os.precision(17);
    os << m.rows() << "," << m.cols() << "\n";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            os << (j ? "," : "") << m(i, j);
        os << "\n";
    }
    return os.str();
}

std::string write_vector_csv(const Eigen::VectorXd& v) {
    std::ostringstream os;
    os.precision(17);
    for (Eigen::Index i = 0; i < v.size(); ++i) os << v[i] << "\n";
    return os.str();
}

nlohmann::json vector_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return json{{"m", m.rows()}, {"d", m.cols()}, {"entries", std::move(rows)}};
}

nlohmann::json sign_pattern_json(const SignPattern& p) {
    json a = json::array();
    for (int i = 0; i < p.m(); ++i) a.push_back(p.sign(i));
    return a;
}

nlohmann::json solution_set_json(const SolutionSet& s) {
    json classes = json::array();
    for (const auto& cls : s.classes)
        classes.push_back(json{{"rep", vector_json(cls.rep)}, {"value", cls.value}});
    return json{{"optimal_value", s.optimal_value},
                {"classes", std::move(classes)},
                {"ties_within", s.ties_within},
                {"num_patterns_explored", s.patterns_explored}};
}

nlohmann::json best_approximations_json(const BestApproximationSet& s) {
    json points = json::array();
    for (const auto& p : s.points) points.push_back(vector_json(p));
    return json{{"distance", s.distance}, {"points", std::move(points)}};
}

nlohmann::json membership_json(const Membership& m) {
    json j{{"inside", m.inside}, {"distance", m.distance}};
    if (m.inside) j["witness"] = vector_json(m.witness);
    return j;
}

nlohmann::json nonconvexity_witness_json(const NonconvexityWitness& w) {
    return json{{"y1", vector_json(w.y1)},
                {"y2", vector_json(w.y2)},
                {"midpoint", vector_json(w.midpoint)},
                {"midpoint_distance", w.midpoint_distance}};
}

namespace {

json one_based(const std::vector<int>& rows) {
    json a = json::array();
    for (int r : rows) a.push_back(r + 1);
    return a;
}

} // namespace

nlohmann::json certificate_json(const Certificate& c) {
    json evidence = json::object();
    if (const auto* cp = std::get_if<ComplementEvidence>(&c.evidence)) {
        evidence["violating_rows"] = one_based(cp->violating_rows);
    } else if (const auto* scp = std::get_if<ScpEvidence>(&c.evidence)) {
        evidence["sigma"] = scp->sigma;
        evidence["sigma_sq"] = scp->sigma_sq;
        evidence["gamma"] = one_based(scp->gamma);
    } else if (const auto* poly = std::get_if<PolyScreenEvidence>(&c.evidence)) {
        json pairs = json::array();
        for (const auto& p : poly->near_zero)
            pairs.push_back(json{{"eps1", sign_pattern_json(p.first)},
                                 {"eps2", sign_pattern_json(p.second)},
                                 {"value", p.value}});
        evidence["near_zero_pairs"] = std::move(pairs);
        evidence["near_zero_count"] = poly->near_zero_count;
        evidence["pairs_checked"] = poly->pairs_checked;
        evidence["threshold"] = poly->threshold;
    } else if (const auto* near = std::get_if<NearSurfaceEvidence>(&c.evidence)) {
        evidence["beta"] = near->beta;
        evidence["lambda"] = near->lambda;
        evidence["eta_norm"] = near->eta_norm;
        evidence["margin"] = near->margin;
    } else if (const auto* exact = std::get_if<ExactUniqueEvidence>(&c.evidence)) {
        json classes = json::array();
        for (const auto& cls : exact->classes)
            classes.push_back(json{{"rep", vector_json(cls.rep)}, {"value", cls.value}});
        evidence["classes"] = std::move(classes);
        evidence["optimal_value"] = exact->optimal_value;
        if (!exact->note.empty()) evidence["note"] = exact->note;
    }
    return json{{"kind", to_string(c.kind)}, {"verdict", to_string(c.verdict)},
                {"evidence", std::move(evidence)}};
}

nlohmann::json witness_pair_json(const WitnessPair& w) {
    return json{{"b1", vector_json(w.b1.values)},
                {"b2", vector_json(w.b2.values)},
                {"projection_1", vector_json(w.y1)},
                {"projection_2", vector_json(w.y2)},
                {"epsilon", w.epsilon},
                {"ratio", w.ratio}};
}

nlohmann::json stability_report_json(const StabilityReport& r) {
    json pairs = json::array();
    for (const auto& p : r.pairs)
        pairs.push_back(json{{"b1", vector_json(p.b1)},
                             {"b2", vector_json(p.b2)},
                             {"dist", p.input_dist},
                             {"projection_ratio", p.projection_ratio},
                             {"solution_ratio", p.solution_ratio}});
    return json{{"region", r.region},
                {"seed", r.seed},
                {"max_projection_ratio", r.max_projection_ratio},
                {"max_solution_ratio", r.max_solution_ratio},
                {"pairs", std::move(pairs)}};
}

} // namespace phaseless

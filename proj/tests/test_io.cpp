#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "phaseless/io.hpp"

using namespace phaseless;
using nlohmann::json;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name, const std::string& content)
        : path(std::string("/tmp/phaseless_io_") + name) {
        std::ofstream out(path, std::ios::binary);
        out << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

} // namespace

TEST_CASE("matrix CSV round trip") {
    Eigen::MatrixXd a(3, 2);
    a << 1, 0, 0, 1, 1, 1;
    const TempFile f("m.csv", write_matrix_csv(a));
    const SenseMatrix parsed = read_matrix(f.path);
    CHECK(parsed.entries() == a);
}

TEST_CASE("matrix CSV parse errors carry line numbers") {
    const TempFile missing("bad1.csv", "2,2\n1,0\n");
    CHECK_THROWS_AS(read_matrix(missing.path), ParseError);

    const TempFile garbled("bad2.csv", "2,2\n1,0\nx,1\n");
    try {
        read_matrix(garbled.path);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }

    const TempFile short_row("bad3.csv", "2,2\n1,0\n1\n");
    try {
        read_matrix(short_row.path);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }

    const TempFile empty("bad4.csv", "");
    CHECK_THROWS_AS(read_matrix(empty.path), ParseError);
}

TEST_CASE("vector CSV") {
    const TempFile f("v.csv", "1.5\n-2\n0.25\n");
    const Eigen::VectorXd v = read_vector(f.path);
    REQUIRE(v.size() == 3);
    CHECK(v[0] == 1.5);
    CHECK(v[1] == -2.0);
    CHECK(v[2] == 0.25);

    Eigen::VectorXd w(2);
    w << 0.1, -0.30000000000000004;
    const TempFile g("w.csv", write_vector_csv(w));
    CHECK(read_vector(g.path) == w);  // 17 significant digits survive

    const TempFile bad("vbad.csv", "1.0\ntwo\n");
    try {
        read_vector(bad.path);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("JSON mirrors of the file formats") {
    Eigen::MatrixXd a(2, 2);
    a << 1, 2, 3, 4;
    const TempFile f("m.json", matrix_json(a).dump());
    CHECK(read_matrix(f.path).entries() == a);

    const TempFile v("v.json", R"({"values": [1.0, -0.5]})");
    const Eigen::VectorXd parsed = read_vector(v.path);
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[1] == -0.5);

    const TempFile bad("mbad.json", R"({"m": 2, "d": 2})");
    CHECK_THROWS_AS(read_matrix(bad.path), ParseError);
}

TEST_CASE("emitted JSON re-parses to equal values") {
    SolutionSet s;
    s.optimal_value = 1.0 / 3.0;
    s.ties_within = 1e-9;
    s.patterns_explored = 4;
    Eigen::VectorXd rep(2);
    rep << 2.0 / 3.0, -4.0 / 3.0;
    s.classes.push_back({rep, 1.0 / 3.0});

    const json j = json::parse(solution_set_json(s).dump());
    CHECK(j["optimal_value"].get<double>() == s.optimal_value);  // bit-exact round trip
    CHECK(j["classes"][0]["rep"][1].get<double>() == rep[1]);
    CHECK(j["num_patterns_explored"].get<std::uint64_t>() == 4);
}

TEST_CASE("certificate JSON uses 1-based row sets") {
    Certificate c{CertificateKind::ComplementProperty, Verdict::Fails,
                  ComplementEvidence{{0}}};
    const json j = certificate_json(c);
    CHECK(j["kind"] == "complement_property");
    CHECK(j["verdict"] == "fails");
    CHECK(j["evidence"]["violating_rows"] == json::array({1}));
}

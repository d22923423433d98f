// phaseless: exact global solver, uniqueness certificates and stability
// experiments for min_x || |Ax| - b ||^2 over the reals.
//
// Exit codes: 0 success / unique, 1 input error, 2 non-unique result,
// 3 search budget exhausted.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "phaseless/certificates.hpp"
#include "phaseless/io.hpp"
#include "phaseless/rng.hpp"
#include "phaseless/solver.hpp"
#include "phaseless/stability.hpp"
#include "phaseless/surface.hpp"
#include "phaseless/threads.hpp"

namespace {

using nlohmann::json;
using namespace phaseless;

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitNonUnique = 2;
constexpr int kExitBudget = 3;

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

int default_threads() {
    if (const char* env = std::getenv("PHASELESS_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return 1;
}

struct SolveArgs {
    std::string matrix_path, b_path;
    double tol = 1e-9;
    bool verbose = false;
};

int run_solve(const SolveArgs& args) {
    const SenseMatrix a = read_matrix(args.matrix_path);
    const Observation b(read_vector(args.b_path));
    const SolutionSet ss = solve_global(a, b, args.tol);
    emit(solution_set_json(ss));
    if (args.verbose) {
        std::cerr << "optimal value " << ss.optimal_value << ", " << ss.classes.size()
                  << " class(es) over " << ss.patterns_explored << " patterns\n";
        for (const auto& cls : ss.classes)
            std::cerr << "  class [" << cls.rep.transpose() << "]  value " << cls.value << "\n";
    }
    return ss.classes.size() == 1 ? kExitOk : kExitNonUnique;
}

struct CertifyArgs {
    std::string matrix_path, b_path, mode, x0_path, eta_path;
    double tol = 1e-8;
    double exact_tol = 1e-9;
};

int run_certify(const CertifyArgs& args) {
    const SenseMatrix a = read_matrix(args.matrix_path);
    Certificate cert;
    if (args.mode == "cp") {
        cert = complement_property(a);
    } else if (args.mode == "scp") {
        cert = scp_sigma(a);
    } else if (args.mode == "poly") {
        if (args.b_path.empty())
            throw std::invalid_argument("certify --mode poly needs an observation file");
        cert = poly_screen(a, Observation(read_vector(args.b_path)), args.tol);
    } else if (args.mode == "near-surface") {
        if (args.x0_path.empty() || args.eta_path.empty())
            throw std::invalid_argument("certify --mode near-surface needs --x0 and --eta");
        cert = near_surface_uniqueness(a, read_vector(args.x0_path), read_vector(args.eta_path));
    } else if (args.mode == "exact") {
        if (args.b_path.empty())
            throw std::invalid_argument("certify --mode exact needs an observation file");
        cert = certify_unique(a, Observation(read_vector(args.b_path)), args.exact_tol);
    } else {
        throw std::invalid_argument("unknown certify mode: " + args.mode);
    }
    emit(certificate_json(cert));
    return cert.verdict == Verdict::Fails ? kExitNonUnique : kExitOk;
}

struct MonteCarloArgs {
    std::string matrix_path;
    int samples = 1000;
    std::uint64_t seed = 1;
    std::string box = "0,1";
    double tie_tol = 1e-9;
    bool verbose = false;
};

std::pair<double, double> parse_box(const std::string& box) {
    const std::size_t comma = box.find(',');
    if (comma == std::string::npos)
        throw std::invalid_argument("--box expects \"lo,hi\"");
    try {
        return {std::stod(box.substr(0, comma)), std::stod(box.substr(comma + 1))};
    } catch (const std::exception&) {
        throw std::invalid_argument("--box expects \"lo,hi\" with decimal bounds");
    }
}

int run_montecarlo(const MonteCarloArgs& args) {
    const SenseMatrix a = read_matrix(args.matrix_path);
    if (complement_property(a).verdict != Verdict::Holds)
        throw std::invalid_argument(
            "montecarlo: matrix lacks the complement property; uniqueness for almost "
            "every nonnegative observation needs it");
    const auto bounds = parse_box(args.box);
    const double lo = std::max(bounds.first, 0.0);
    const double hi = bounds.second;
    if (!(hi >= lo)) throw std::invalid_argument("montecarlo: empty box");

    CounterRng rng(args.seed);
    int failures = 0;
    json failing = json::array();
    for (int i = 0; i < args.samples; ++i) {
        const Observation b(rng.uniform_vector(a.m(), lo, hi));
        const SolutionSet ss = solve_global(a, b, args.tie_tol);
        if (ss.classes.size() != 1) {
            ++failures;
            failing.push_back(vector_json(b.values));
        }
    }
    json out{{"samples", args.samples},
             {"failures", failures},
             {"seed", args.seed},
             {"box", json::array({lo, hi})},
             {"tie_tol", args.tie_tol},
             {"failing", std::move(failing)}};
    out["fraction"] =
        args.samples > 0 ? json(static_cast<double>(failures) / args.samples) : json(nullptr);
    emit(out);
    if (args.verbose)
        std::cerr << failures << " / " << args.samples << " draws in [" << lo << "," << hi
                  << "]^" << a.m() << " were non-unique\n";
    return failures == 0 ? kExitOk : kExitNonUnique;
}

struct InstabilityArgs {
    std::string matrix_path, seed_b_path;
    double epsilon = 0.1;
    int trials = 32;
    std::uint64_t seed = 1;
};

int run_instability(const InstabilityArgs& args) {
    const SenseMatrix a = read_matrix(args.matrix_path);
    Observation b0;
    if (!args.seed_b_path.empty()) {
        b0 = Observation(read_vector(args.seed_b_path));
    } else {
        const auto seeds = nonunique_seed_search(a, args.trials, args.seed);
        if (seeds.empty()) {
            std::cerr << "no non-unique seed found within " << args.trials << " trials\n";
            return kExitBudget;
        }
        b0 = seeds.front();
    }
    const WitnessPair pair = instability_witness(a, b0, args.epsilon);
    json out = witness_pair_json(pair);
    out["seed_b"] = vector_json(b0.values);
    emit(out);
    return kExitOk;
}

struct ScanArgs {
    std::string matrix_path, center_path;
    double radius = 0.1;
    int samples = 100;
    std::uint64_t seed = 1;
    bool verbose = false;
};

int run_scan(const ScanArgs& args) {
    const SenseMatrix a = read_matrix(args.matrix_path);
    const Observation center(read_vector(args.center_path));
    const StabilityReport report =
        convex_region_scan(a, center, args.radius, args.samples, args.seed);
    emit(stability_report_json(report));
    if (args.verbose)
        std::cerr << report.pairs.size() << " pairs, max projection ratio "
                  << report.max_projection_ratio << ", max solution ratio "
                  << report.max_solution_ratio << "\n";
    return kExitOk;
}

struct WitnessArgs {
    std::string matrix_path;
    int budget = 2000;
    std::uint64_t seed = 1;
};

int run_witness(const WitnessArgs& args) {
    const SenseMatrix a = read_matrix(args.matrix_path);
    const NonconvexityWitness w = nonconvexity_witness(a, args.budget, args.seed);
    emit(nonconvexity_witness_json(w));
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact solver and certificates for min || |Ax| - b ||^2"};
    app.require_subcommand(1);

    int threads = default_threads();
    app.add_option("--threads", threads, "worker cap for enumeration sweeps")
        ->check(CLI::PositiveNumber);

    SolveArgs solve_args;
    auto* solve = app.add_subcommand("solve", "global solution set");
    solve->add_option("matrix", solve_args.matrix_path)->required();
    solve->add_option("b", solve_args.b_path)->required();
    solve->add_option("--tol", solve_args.tol, "tie tolerance (relative)");
    solve->add_flag("--verbose", solve_args.verbose, "human-readable summary on stderr");

    CertifyArgs certify_args;
    auto* certify = app.add_subcommand("certify", "uniqueness certificates");
    certify->add_option("matrix", certify_args.matrix_path)->required();
    certify->add_option("b", certify_args.b_path);
    certify->add_option("--mode", certify_args.mode)
        ->required()
        ->check(CLI::IsMember({"cp", "scp", "poly", "near-surface", "exact"}));
    certify->add_option("--x0", certify_args.x0_path);
    certify->add_option("--eta", certify_args.eta_path);
    certify->add_option("--tol", certify_args.tol, "poly screen tolerance (relative)");
    certify->add_option("--exact-tol", certify_args.exact_tol, "tie tolerance for exact mode");

    MonteCarloArgs mc_args;
    auto* mc = app.add_subcommand("montecarlo", "uniqueness frequency over random observations");
    mc->add_option("matrix", mc_args.matrix_path)->required();
    mc->add_option("--samples", mc_args.samples)->check(CLI::NonNegativeNumber);
    mc->add_option("--seed", mc_args.seed);
    mc->add_option("--box", mc_args.box, "sampling box \"lo,hi\" (clipped to >= 0)");
    mc->add_option("--tie-tol", mc_args.tie_tol);
    mc->add_flag("--verbose", mc_args.verbose, "summary on stderr");

    InstabilityArgs inst_args;
    auto* inst = app.add_subcommand("instability", "constructive instability witness");
    inst->add_option("matrix", inst_args.matrix_path)->required();
    inst->add_option("--epsilon", inst_args.epsilon)
        ->required()
        ->check(CLI::Range(std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0)));
    inst->add_option("--seed-b", inst_args.seed_b_path, "observation with >= 2 best approximations");
    inst->add_option("--trials", inst_args.trials);
    inst->add_option("--seed", inst_args.seed);

    ScanArgs scan_args;
    auto* scan = app.add_subcommand("scan", "stability ratios over a ball inside U_A");
    scan->add_option("matrix", scan_args.matrix_path)->required();
    scan->add_option("--center", scan_args.center_path)->required();
    scan->add_option("--radius", scan_args.radius)->check(CLI::NonNegativeNumber);
    scan->add_option("--samples", scan_args.samples)->check(CLI::NonNegativeNumber);
    scan->add_option("--seed", scan_args.seed);
    scan->add_flag("--verbose", scan_args.verbose, "summary on stderr");

    WitnessArgs witness_args;
    auto* witness = app.add_subcommand("witness-nonconvex", "two surface points whose midpoint is off the surface");
    witness->add_option("matrix", witness_args.matrix_path)->required();
    witness->add_option("--budget", witness_args.budget);
    witness->add_option("--seed", witness_args.seed);

    CLI11_PARSE(app, argc, argv);
    set_max_threads(threads);

    try {
        if (solve->parsed()) return run_solve(solve_args);
        if (certify->parsed()) return run_certify(certify_args);
        if (mc->parsed()) return run_montecarlo(mc_args);
        if (inst->parsed()) return run_instability(inst_args);
        if (scan->parsed()) return run_scan(scan_args);
        if (witness->parsed()) return run_witness(witness_args);
    } catch (const SearchBudgetError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBudget;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitInputError;
}

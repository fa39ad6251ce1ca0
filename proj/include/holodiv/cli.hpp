#pragma once

#include "holodiv/ba_kernel.hpp"
#include "holodiv/common.hpp"
#include "holodiv/geometry.hpp"
#include "holodiv/poly.hpp"

#include <json.hpp>

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace holodiv {

inline constexpr const char* report_version = "holodiv-report/1";

struct Params {
    double kappa = 0.05;
    double eps0 = 0.1;
    double c_sep = 1.0;
    int k_max = 4;
    double q = 2.0;  // infinity allowed ("inf")
    int N = 4;
    int quad_nodes = 256;
    std::uint64_t mc_samples = 1000000;
    std::optional<std::uint64_t> seed;
    double residual_tol = 1e-8;
    double level_floor = 1e-3;
    int deriv_max = 2;
    int k1 = 2;
    int k2 = 2;
    int samples = 1000;  // glue / graded-grid sample count
    double patch_radius = 5e-4;
    std::optional<Point> focus;  // boundary point; default: where the -e1 ray from the center exits
};

struct ProblemSpec {
    nlohmann::json domain_json;
    ConvexDomain domain = ConvexDomain::ball(make_point(1.0, 0.0), 1.0);
    HoloPoly f1, f2, g;
    // set when g was given as a1 f1 + a2 f2
    std::optional<std::pair<HoloPoly, HoloPoly>> cofactors;
    Params params;

    // Canonical form with defaults filled; hashed into the report.
    nlohmann::json to_json() const;
};

// Throws SchemaError (detail = field path) or RangeError (detail names the value).
ProblemSpec parse_problem(const nlohmann::json& j);
ProblemSpec parse_problem_file(const std::string& path);

HoloPoly parse_poly(const nlohmann::json& j, const std::string& path);
nlohmann::json poly_to_json(const HoloPoly& p);
// "1", "z1", "z2", "z1*z2", "z1^2*z2", ... (a single monomial)
HoloPoly parse_monomial(const std::string& s);
// "a,b" (real) or "a,b,c,d" (re/im pairs)
Point parse_point(const std::string& s);

std::uint64_t fnv1a(const std::string& s);

enum class Command { Certify, Divide, Glue, Covering, KernelCheck, Counterexample };
const char* to_string(Command c);
Command command_from_string(const std::string& s);

struct RunOptions {
    std::optional<std::uint64_t> seed;
    unsigned threads = 0;
    std::optional<Point> at;  // divide
    // kernel-check
    std::optional<int> N;
    std::optional<std::uint64_t> samples;
    std::optional<Point> z;
    std::optional<std::string> g;
    // covering CSV in / out
    std::string covering_in;
    std::string covering_out;
    // counterexample
    int q = 3;
    double eps_min = 1e-4;
    double eps_max = 1e-2;
    int eps_points = 9;
};

struct Report {
    std::string problem_hash;
    nlohmann::json payloads = nlohmann::json::object();
    std::vector<std::string> erratum_flags;
    bool pass = true;
    bool input_error = false;

    nlohmann::json to_json() const;
    // 0 pass, 2 numeric failure, 3 input error
    int exit_code() const { return input_error ? 3 : (pass ? 0 : 2); }
};

struct CounterexampleReport {
    int q = 3;
    double kappa = 0.05;
    std::vector<double> eps;
    std::vector<double> values;
    std::vector<double> tangent_values;
    double slope = 0.0;
    double expected = 0.0;
    double tolerance = 0.1;  // relative
    bool pass = false;

    nlohmann::json to_json() const;
};

// f1 = z2^2, f2 = z2^2 - z1^q, g = z1^{q/2} z2 on the ball |z - (1,0)| < 1,
// certificate at centers (eps, 0). q odd >= 3.
CounterexampleReport run_counterexample(int q, const std::vector<double>& eps_grid, double kappa = 0.05,
                                        unsigned threads = 0);
std::vector<double> log_grid(double lo, double hi, int points);

// Runs commands in dependency order; each command's failure is recorded in its
// payload. Input errors (missing seed, bad flags) mark the report.
Report run_pipeline(const ProblemSpec& spec, const std::vector<Command>& commands, const RunOptions& opt);

}  // namespace holodiv

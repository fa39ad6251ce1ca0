#include "holodiv/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace holodiv;

namespace {

int emit(const Report& rep, const std::string& out) {
    const std::string text = rep.to_json().dump(2) + "\n";
    if (out.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(out);
        if (!f) {
            std::cerr << "cannot write " << out << "\n";
            return 3;
        }
        f << text;
    }
    return rep.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"holodiv: certificates and constructive division in strictly convex domains of C^2"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string out;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    app.add_option("--out", out, "report path (stdout if absent)");
    auto* seed_opt = app.add_option("--seed", seed, "seed for stochastic paths");
    app.add_option("--threads", threads, "worker threads (HOLODIV_THREADS if absent)");

    std::string problem;
    std::string at, z, g, covering_in, covering_out;
    int N = 0;
    std::uint64_t samples = 0;
    RunOptions opt;

    auto* certify = app.add_subcommand("certify", "divided-difference certificates");
    auto* divide = app.add_subcommand("divide", "local division on one Koranyi ball");
    auto* glue = app.add_subcommand("glue", "glued global solution on a covering");
    auto* covering = app.add_subcommand("covering", "build and verify a kappa-covering");
    auto* kernel = app.add_subcommand("kernel-check", "reproducing identity by Monte Carlo");
    auto* counter = app.add_subcommand("counterexample", "certificate divergence rate for z2^2, z2^2 - z1^q");

    for (auto* sc : {certify, divide, glue, covering, kernel})
        sc->add_option("problem", problem, "problem JSON")->required();
    divide->add_option("--at", at, "center z as re1,im1,re2,im2 or x1,x2")->required();
    glue->add_option("--covering", covering_in, "covering CSV to reuse");
    covering->add_option("--csv", covering_out, "write the covering as CSV");
    auto* n_opt = kernel->add_option("--N", N, "weight exponent");
    auto* s_opt = kernel->add_option("--samples", samples, "Monte Carlo samples");
    kernel->add_option("--seed", seed, "seed (same as the global flag)");
    kernel->add_option("--z", z, "evaluation point");
    kernel->add_option("--g", g, "monomial such as 1, z1, z1*z2");
    counter->add_option("--q", opt.q, "odd exponent >= 3")->required();
    counter->add_option("--eps-min", opt.eps_min, "smallest eps");
    counter->add_option("--eps-max", opt.eps_max, "largest eps");
    counter->add_option("--points", opt.eps_points, "log-spaced eps values");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 3;
    }

    opt.threads = threads;
    if (seed_opt->count() > 0 || kernel->get_option("--seed")->count() > 0) opt.seed = seed;
    if (n_opt->count() > 0) opt.N = N;
    if (s_opt->count() > 0) opt.samples = samples;
    opt.covering_in = covering_in;
    opt.covering_out = covering_out;

    try {
        if (!at.empty()) opt.at = parse_point(at);
        if (!z.empty()) opt.z = parse_point(z);
        if (!g.empty()) opt.g = g;

        if (counter->parsed()) {
            Report rep;
            rep.problem_hash = "none";
            const auto cr = run_counterexample(opt.q, log_grid(opt.eps_min, opt.eps_max, opt.eps_points), 0.05, threads);
            rep.payloads["counterexample"] = cr.to_json();
            rep.pass = cr.pass;
            return emit(rep, out);
        }

        Command cmd = Command::Certify;
        if (divide->parsed()) cmd = Command::Divide;
        if (glue->parsed()) cmd = Command::Glue;
        if (covering->parsed()) cmd = Command::Covering;
        if (kernel->parsed()) cmd = Command::KernelCheck;
        const auto spec = parse_problem_file(problem);
        return emit(run_pipeline(spec, {cmd}, opt), out);
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return (e.code() == ErrorCode::SchemaError || e.code() == ErrorCode::RangeError) ? 3 : 2;
    }
}

#include "holodiv/cli.hpp"

#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace holodiv;
using nlohmann::json;

namespace {

const std::string fixtures = HOLODIV_FIXTURES;

json load(const std::string& name) {
    std::ifstream in(fixtures + "/" + name);
    return json::parse(in);
}

Error error_of(const json& j) {
    try {
        parse_problem(j);
    } catch (const Error& e) {
        return e;
    }
    FAIL("parse_problem accepted the input");
    return Error(ErrorCode::SchemaError, "");
}

// Light version of the model pair for repeated pipeline runs.
json light_model() {
    json j = load("model_pair.json");
    j["params"]["level_floor"] = 0.03;
    j["params"]["samples"] = 150;
    return j;
}

// Key and type structure of a report; array entries collapse to the first element.
json skeleton(const json& j) {
    if (j.is_object()) {
        json out = json::object();
        for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = skeleton(it.value());
        return out;
    }
    if (j.is_array()) return j.empty() ? json::array() : json::array({skeleton(j[0])});
    if (j.is_number() || j.is_null()) return "number";
    if (j.is_boolean()) return "bool";
    return "string";
}

// Empty arrays on either side match any array.
void compare_skeleton(const json& want, const json& got, const std::string& path) {
    INFO(path);
    REQUIRE(want.type() == got.type());
    if (want.is_object()) {
        for (auto it = want.begin(); it != want.end(); ++it) {
            CHECK_MESSAGE(got.contains(it.key()), "missing key ", path, ".", it.key());
            if (got.contains(it.key())) compare_skeleton(it.value(), got[it.key()], path + "." + it.key());
        }
        for (auto it = got.begin(); it != got.end(); ++it)
            CHECK_MESSAGE(want.contains(it.key()), "unexpected key ", path, ".", it.key());
    } else if (want.is_array()) {
        if (!want.empty() && !got.empty()) compare_skeleton(want[0], got[0], path + "[]");
    } else {
        CHECK(want == got);
    }
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(HOLODIV_CLI) + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("model pair fixture parses with defaults") {
    const auto spec = parse_problem(load("model_pair.json"));
    CHECK(spec.params.kappa == 0.05);
    CHECK(spec.params.eps0 == 0.1);
    CHECK(spec.params.N == 4);
    REQUIRE(spec.params.seed);
    CHECK(*spec.params.seed == 42);
    REQUIRE(spec.cofactors);
    const Point z = make_point(cplx(0.3, 0.1), cplx(-0.2, 0.4));
    const cplx expect = spec.cofactors->first(z) * spec.f1(z) + spec.cofactors->second(z) * spec.f2(z);
    CHECK(std::abs(spec.g(z) - expect) < 1e-15);
    CHECK(spec.domain.kind() == ConvexDomain::Kind::Ball);
}

TEST_CASE("schema and range errors carry the field path") {
    json j = load("model_pair.json");
    SUBCASE("missing f2") {
        j.erase("f2");
        const auto e = error_of(j);
        CHECK(e.code() == ErrorCode::SchemaError);
        CHECK(e.detail() == "f2");
    }
    SUBCASE("kappa out of range") {
        j["params"]["kappa"] = 0.9;
        const auto e = error_of(j);
        CHECK(e.code() == ErrorCode::RangeError);
        CHECK(e.detail().find("params.kappa") != std::string::npos);
        CHECK(e.detail().find("0.9") != std::string::npos);
    }
    SUBCASE("unknown keys") {
        j["params"]["kapa"] = 0.01;
        CHECK(error_of(j).detail() == "params.kapa");
        j["params"].erase("kapa");
        j["f1"]["terms"][0]["x"] = 1;
        CHECK(error_of(j).detail() == "f1.terms[0].x");
        j["f1"]["terms"][0].erase("x");
        j["extra"] = true;
        CHECK(error_of(j).detail() == "extra");
    }
    SUBCASE("bad types") {
        j["params"]["seed"] = -1;
        CHECK(error_of(j).detail() == "params.seed");
        j["params"]["seed"] = 1;
        j["domain"]["type"] = "torus";
        CHECK(error_of(j).detail() == "domain.type");
    }
    SUBCASE("ellipsoid must be Hermitian positive definite") {
        j["domain"] = {{"type", "ellipsoid"},
                       {"center", {{1.0, 0.0}, {0.0, 0.0}}},
                       {"matrix", {{1.0, 0.0}, {0.0, -1.0}}}};
        CHECK(error_of(j).code() == ErrorCode::RangeError);
        j["domain"]["matrix"] = {{1.0, {0.0, 0.5}}, {{0.0, 0.5}, 1.0}};
        CHECK(error_of(j).code() == ErrorCode::RangeError);
        j["domain"]["matrix"] = {{2.0, {0.0, 0.5}}, {{0.0, -0.5}, 1.0}};
        CHECK(parse_problem(j).domain.kind() == ConvexDomain::Kind::HermitianEllipsoid);
    }
}

TEST_CASE("shorthand input forms") {
    json j = load("model_pair.json");
    j["domain"] = {{"kind", "ball"}, {"center", {1.0, 0.0}}, {"radius", 1.0}};
    j["f1"] = json::array({{{"i", 0}, {"j", 1}, {"c", 1}}});
    j["f2"] = {{"terms", {{{"i", 0}, {"j", 1}, {"c", {1.0, 0.0}}}, {{"i", 2}, {"j", 0}, {"re", -1.0}}}}};
    const auto a = parse_problem(j);
    const auto b = parse_problem(load("model_pair.json"));
    CHECK(a.to_json()["f1"] == b.to_json()["f1"]);
    CHECK(a.to_json()["f2"] == b.to_json()["f2"]);
    CHECK(parse_monomial("z1^2*z2").coeff(2, 1) == cplx(1.0));
    CHECK(parse_point("0.1,0").isApprox(make_point(0.1, 0.0)));
    CHECK(parse_point("0.1,0.2,0.3,0.4").isApprox(make_point(cplx(0.1, 0.2), cplx(0.3, 0.4))));
    CHECK_THROWS_AS(parse_monomial("z3"), Error);
}

TEST_CASE("stochastic commands need a seed") {
    json j = light_model();
    j["params"].erase("seed");
    const auto spec = parse_problem(j);
    const auto rep = run_pipeline(spec, {Command::Certify}, {});
    CHECK(rep.input_error);
    CHECK(rep.exit_code() == 3);
    CHECK(rep.to_json()["payloads"]["error"]["detail"] == "params.seed");

    RunOptions opt;
    opt.seed = 9;
    opt.samples = 20000;
    CHECK(run_pipeline(spec, {Command::KernelCheck}, opt).exit_code() != 3);
}

TEST_CASE("empty command list gives a valid report") {
    const auto rep = run_pipeline(parse_problem(load("model_pair.json")), {}, {});
    const json j = rep.to_json();
    CHECK(j["version"] == report_version);
    CHECK(j["payloads"].empty());
    CHECK(j["pass"] == true);
    CHECK(j["problem_hash"].get<std::string>().size() == 16);
    CHECK(rep.exit_code() == 0);
}

TEST_CASE("pipeline is deterministic and matches the golden schema") {
    const auto spec = parse_problem(light_model());
    RunOptions opt;
    opt.at = make_point(0.1, 0.0);
    opt.eps_points = 3;
    const std::vector<Command> cmds{Command::Certify, Command::Divide, Command::Glue,
                                    Command::Covering, Command::KernelCheck, Command::Counterexample};
    const json a = run_pipeline(spec, cmds, opt).to_json();
    opt.threads = 3;
    const json b = run_pipeline(spec, cmds, opt).to_json();
    CHECK(a.dump() == b.dump());
    CHECK(a["pass"] == true);
    for (auto it = a["payloads"].begin(); it != a["payloads"].end(); ++it) {
        INFO(it.key());
        CHECK(it.value()["pass"] == true);
    }

    const std::string golden = std::string(HOLODIV_GOLDEN) + "/model_pair_schema.json";
    if (std::getenv("HOLODIV_REGEN_GOLDEN")) {
        std::ofstream(golden) << skeleton(a).dump(2) << "\n";
    }
    std::ifstream in(golden);
    REQUIRE(in.good());
    compare_skeleton(json::parse(in), skeleton(a), "report");
}

TEST_CASE("model pair full pipeline at fixture defaults") {
    const auto spec = parse_problem(load("model_pair.json"));
    RunOptions opt;
    opt.at = make_point(0.1, 0.0);
    const auto rep = run_pipeline(spec, {Command::Certify, Command::Divide, Command::Glue, Command::Covering,
                                         Command::KernelCheck},
                                  opt);
    const json j = rep.to_json();
    for (auto it = j["payloads"].begin(); it != j["payloads"].end(); ++it) {
        INFO(it.key() << ": " << it.value().dump().substr(0, 400));
        CHECK(it.value()["pass"] == true);
    }
    CHECK(rep.exit_code() == 0);
}

TEST_CASE("g off the ideal at an interior common zero") {
    const auto spec = parse_problem(load("interior_zero.json"));
    RunOptions opt;
    opt.at = make_point(0.2, 0.0);
    const auto rep = run_pipeline(spec, {Command::Divide}, opt);
    const json j = rep.to_json();
    CHECK(j["payloads"]["divide"]["error"]["code"] == "IncompleteIdeal");
    CHECK(rep.exit_code() == 2);
}

TEST_CASE("shared component is reported") {
    const auto spec = parse_problem(load("shared_component.json"));
    RunOptions opt;
    opt.at = make_point(0.1, 0.0);
    const auto rep = run_pipeline(spec, {Command::Divide}, opt);
    CHECK_FALSE(rep.pass);
    CHECK(rep.exit_code() == 2);
}

TEST_CASE("counterexample report") {
    const auto r3 = run_counterexample(3, log_grid(1e-4, 1e-2, 5));
    CHECK(r3.pass);
    CHECK(r3.slope == doctest::Approx(-1.0).epsilon(0.1));
    CHECK_THROWS_AS(run_counterexample(4, log_grid(1e-4, 1e-2, 5)), Error);
    const auto g = log_grid(1e-4, 1e-2, 3);
    CHECK(g[1] == doctest::Approx(1e-3));
}

TEST_CASE("exit codes of the binary") {
    const std::string model = fixtures + "/model_pair.json";
    CHECK(run_cli("divide " + model + " --at 0.1,0") == 0);
    CHECK(run_cli("divide " + fixtures + "/interior_zero.json --at 0.2,0") == 2);
    CHECK(run_cli("divide /nonexistent.json --at 0.1,0") == 3);
    CHECK(run_cli("divide " + model) == 3);
    CHECK(run_cli("counterexample --q 4") == 3);
    CHECK(run_cli("frobnicate") == 3);
    CHECK(run_cli("counterexample --q 3 --points 3") == 0);
    CHECK(run_cli("kernel-check " + model + " --seed 5 --samples 100000 --g z1 --z 1.2,0") == 0);
}

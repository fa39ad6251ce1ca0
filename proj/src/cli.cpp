#include "holodiv/cli.hpp"

#include "holodiv/divided.hpp"
#include "holodiv/gluing.hpp"
#include "holodiv/local_division.hpp"
#include "holodiv/varieties.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <random>
#include <set>
#include <sstream>

namespace holodiv {

using nlohmann::json;

namespace {

[[noreturn]] void schema(const std::string& path) { throw Error(ErrorCode::SchemaError, path); }

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) schema(path.empty() ? "<root>" : path);
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* a : allowed) known = known || it.key() == a;
        if (!known) schema(join(path, it.key()));
    }
}

const json& require(const json& j, const char* key, const std::string& path) {
    if (!j.contains(key)) schema(join(path, key));
    return j.at(key);
}

double number(const json& j, const std::string& path) {
    if (!j.is_number()) schema(path);
    return j.get<double>();
}

std::int64_t integer(const json& j, const std::string& path) {
    if (!j.is_number_integer()) schema(path);
    return j.get<std::int64_t>();
}

cplx complex_value(const json& j, const std::string& path) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    schema(path);
}

Point point_value(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2) schema(path);
    return make_point(complex_value(j[0], path + "[0]"), complex_value(j[1], path + "[1]"));
}

json cjson(cplx c) { return json::array({c.real(), c.imag()}); }
json pjson(const Point& p) { return json::array({cjson(p(0)), cjson(p(1))}); }

void range_check(bool ok, const std::string& path, double value, const char* range) {
    if (ok) return;
    std::ostringstream s;
    s << path << " = " << std::setprecision(17) << value << " outside " << range;
    throw Error(ErrorCode::RangeError, s.str());
}

ConvexDomain parse_domain(const json& j) {
    const std::string path = "domain";
    if (!j.is_object()) schema(path);
    // "type" per the documented schema; "kind" accepted as an alias
    if (j.contains("type") && j.contains("kind")) schema(path + ".kind");
    const char* tag = j.contains("kind") ? "kind" : "type";
    const auto& kind = require(j, tag, path);
    if (!kind.is_string()) schema(join(path, tag));
    const double collar = j.contains("collar") ? number(j["collar"], path + ".collar") : 0.5;
    range_check(collar > 0.0 && collar < 1.0, path + ".collar", collar, "(0, 1)");
    const Point center = point_value(require(j, "center", path), path + ".center");
    if (kind == "ball") {
        check_keys(j, path, {tag, "center", "radius", "collar"});
        const double r = number(require(j, "radius", path), path + ".radius");
        range_check(r > 0.0, path + ".radius", r, "(0, inf)");
        return ConvexDomain::ball(center, r, collar);
    }
    if (kind == "ellipsoid") {
        check_keys(j, path, {tag, "center", "matrix", "collar"});
        const auto& m = require(j, "matrix", path);
        if (!m.is_array() || m.size() != 2) schema(path + ".matrix");
        Eigen::Matrix2cd A;
        for (int r = 0; r < 2; ++r) {
            const std::string rp = path + ".matrix[" + std::to_string(r) + "]";
            if (!m[r].is_array() || m[r].size() != 2) schema(rp);
            for (int c = 0; c < 2; ++c) A(r, c) = complex_value(m[r][c], rp + "[" + std::to_string(c) + "]");
        }
        const double asym = (A - A.adjoint()).norm();
        range_check(asym <= 1e-12 * A.norm(), path + ".matrix", asym, "Hermitian matrices (asymmetry shown)");
        const double lmin = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd>(A).eigenvalues().minCoeff();
        range_check(lmin > 0.0, path + ".matrix", lmin, "positive definite (smallest eigenvalue shown)");
        return ConvexDomain::ellipsoid(A, center, collar);
    }
    schema(join(path, tag));
}

Params parse_params(const json& j) {
    const std::string path = "params";
    check_keys(j, path,
               {"kappa", "eps0", "c_sep", "k_max", "q", "N", "quad_nodes", "mc_samples", "seed", "residual_tol",
                "level_floor", "deriv_max", "k1", "k2", "samples", "patch_radius", "focus"});
    Params p;
    auto num = [&](const char* key, double& out) {
        if (j.contains(key)) out = number(j[key], join(path, key));
    };
    auto intg = [&](const char* key, int& out) {
        if (j.contains(key)) out = static_cast<int>(integer(j[key], join(path, key)));
    };
    num("kappa", p.kappa);
    num("eps0", p.eps0);
    num("c_sep", p.c_sep);
    intg("k_max", p.k_max);
    if (j.contains("q")) {
        if (j["q"].is_string() && j["q"] == "inf")
            p.q = std::numeric_limits<double>::infinity();
        else
            p.q = number(j["q"], "params.q");
    }
    intg("N", p.N);
    intg("quad_nodes", p.quad_nodes);
    if (j.contains("mc_samples")) {
        const auto v = integer(j["mc_samples"], "params.mc_samples");
        range_check(v >= 1 && v <= 1000000000, "params.mc_samples", static_cast<double>(v), "[1, 1e9]");
        p.mc_samples = static_cast<std::uint64_t>(v);
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) schema("params.seed");
        p.seed = j["seed"].get<std::uint64_t>();
    }
    num("residual_tol", p.residual_tol);
    num("level_floor", p.level_floor);
    intg("deriv_max", p.deriv_max);
    intg("k1", p.k1);
    intg("k2", p.k2);
    intg("samples", p.samples);
    num("patch_radius", p.patch_radius);
    if (j.contains("focus")) p.focus = point_value(j["focus"], "params.focus");

    range_check(p.kappa > 0.0 && p.kappa <= 0.1, "params.kappa", p.kappa, "(0, 0.1]");
    range_check(p.eps0 > 0.0 && p.eps0 <= 0.5, "params.eps0", p.eps0, "(0, 0.5]");
    range_check(p.c_sep > 0.0 && p.c_sep <= 10.0, "params.c_sep", p.c_sep, "(0, 10]");
    range_check(p.k_max >= 1 && p.k_max <= 8, "params.k_max", p.k_max, "[1, 8]");
    range_check(p.q >= 1.0, "params.q", p.q, "[1, inf]");
    range_check(p.N >= 1 && p.N <= 16, "params.N", p.N, "[1, 16]");
    range_check(p.quad_nodes >= 8 && p.quad_nodes <= 4096, "params.quad_nodes", p.quad_nodes, "[8, 4096]");
    range_check(p.residual_tol > 0.0 && p.residual_tol <= 1e-2, "params.residual_tol", p.residual_tol, "(0, 1e-2]");
    range_check(p.level_floor > 0.0 && p.level_floor < p.eps0, "params.level_floor", p.level_floor, "(0, eps0)");
    range_check(p.deriv_max >= 0 && p.deriv_max <= 4, "params.deriv_max", p.deriv_max, "[0, 4]");
    range_check(p.k1 >= 0 && p.k1 <= 4, "params.k1", p.k1, "[0, 4]");
    range_check(p.k2 >= 0 && p.k2 <= 8, "params.k2", p.k2, "[0, 8]");
    range_check(p.samples >= 1 && p.samples <= 1000000, "params.samples", p.samples, "[1, 1e6]");
    range_check(p.patch_radius > 0.0 && p.patch_radius <= 0.1, "params.patch_radius", p.patch_radius, "(0, 0.1]");
    return p;
}

std::string hex64(std::uint64_t v) {
    std::ostringstream s;
    s << std::hex << std::setw(16) << std::setfill('0') << v;
    return s.str();
}

json error_json(const Error& e) { return {{"code", to_string(e.code())}, {"detail", e.detail()}}; }

bool is_input_error(const Error& e) {
    return e.code() == ErrorCode::SchemaError || e.code() == ErrorCode::RangeError;
}

Point default_focus(const ConvexDomain& dom) {
    return project_to_level(dom, dom.center(), make_point(-1.0, 0.0), 0.0);
}

CoveringParams covering_params(const ProblemSpec& spec) {
    CoveringParams cp;
    cp.kappa = spec.params.kappa;
    cp.eps0 = spec.params.eps0;
    cp.c_sep = spec.params.c_sep;
    cp.level_floor = spec.params.level_floor;
    cp.patch_radius = spec.params.patch_radius;
    cp.focus = spec.params.focus ? *spec.params.focus : default_focus(spec.domain);
    return cp;
}

LocalConfig local_config(const ProblemSpec& spec) {
    LocalConfig cfg;
    cfg.common_zeros = complete_intersection_check(spec.f1, spec.f2).common_zeros;
    cfg.quad_nodes = spec.params.quad_nodes;
    cfg.residual_tol = spec.params.residual_tol;
    return cfg;
}

void add_flags(std::vector<std::string>& flags, const std::vector<std::string>& more) {
    for (const auto& f : more)
        if (std::find(flags.begin(), flags.end(), f) == flags.end()) flags.push_back(f);
}

json covering_payload(const KappaCovering& cov, const CoveringReport& rep) {
    json levels = json::array();
    for (const auto& lv : cov.levels)
        levels.push_back({{"j", lv.j}, {"value", lv.value}, {"separation", lv.separation}, {"centers", lv.centers.size()}});
    json viol = json::array();
    for (std::size_t i = 0; i < rep.violations.size() && i < 20; ++i) {
        const auto& v = rep.violations[i];
        viol.push_back({{"kind", v.kind}, {"j", v.j}, {"k", v.k}, {"other", v.other}, {"value", v.value}, {"bound", v.bound}});
    }
    return {{"centers", cov.size()},
            {"levels", levels},
            {"overlap_bound", cov.overlap_bound},
            {"probes", rep.probes},
            {"overlap_max", rep.overlap_max},
            {"overlap_4kappa_max", rep.overlap_4kappa_max},
            {"violation_count", rep.violations.size()},
            {"violations", viol},
            {"pass", rep.ok() && rep.overlap_max <= rep.overlap_limit}};
}

}  // namespace

HoloPoly parse_poly(const json& j, const std::string& path) {
    // {"terms": [{"i", "j", "re", "im"}]}; a bare term array and "c" (number
    // or [re, im]) in place of re/im are accepted as shorthand
    std::string base = path;
    const json* terms = &j;
    if (j.is_object()) {
        check_keys(j, path, {"terms"});
        base = path + ".terms";
        terms = &require(j, "terms", path);
    }
    if (!terms->is_array()) schema(base);
    HoloPoly p;
    for (std::size_t t = 0; t < terms->size(); ++t) {
        const json& term = (*terms)[t];
        const std::string tp = base + "[" + std::to_string(t) + "]";
        check_keys(term, tp, {"i", "j", "c", "re", "im"});
        const auto i = integer(require(term, "i", tp), tp + ".i");
        const auto k = integer(require(term, "j", tp), tp + ".j");
        range_check(i >= 0 && i <= 64, tp + ".i", static_cast<double>(i), "[0, 64]");
        range_check(k >= 0 && k <= 64, tp + ".j", static_cast<double>(k), "[0, 64]");
        cplx c;
        if (term.contains("c")) {
            if (term.contains("re") || term.contains("im")) schema(tp + ".c");
            c = complex_value(term["c"], tp + ".c");
        } else {
            const double re = number(require(term, "re", tp), tp + ".re");
            const double im = term.contains("im") ? number(term["im"], tp + ".im") : 0.0;
            c = {re, im};
        }
        p.set(static_cast<int>(i), static_cast<int>(k), p.coeff(static_cast<int>(i), static_cast<int>(k)) + c);
    }
    return p;
}

json poly_to_json(const HoloPoly& p) {
    json terms = json::array();
    for (const auto& [k, c] : p.terms())
        terms.push_back({{"i", k.first}, {"j", k.second}, {"re", c.real()}, {"im", c.imag()}});
    return {{"terms", terms}};
}

HoloPoly parse_monomial(const std::string& s) {
    if (s == "1") return HoloPoly::constant(1.0);
    int e1 = 0, e2 = 0;
    std::stringstream ss(s);
    std::string factor;
    while (std::getline(ss, factor, '*')) {
        int power = 1;
        const auto caret = factor.find('^');
        std::string var = factor.substr(0, caret);
        if (caret != std::string::npos) {
            try {
                power = std::stoi(factor.substr(caret + 1));
            } catch (const std::exception&) {
                throw Error(ErrorCode::SchemaError, "--g");
            }
        }
        if (power < 0) throw Error(ErrorCode::RangeError, "--g exponent " + std::to_string(power) + " below 0");
        if (var == "z1")
            e1 += power;
        else if (var == "z2")
            e2 += power;
        else
            throw Error(ErrorCode::SchemaError, "--g");
    }
    return HoloPoly::monomial(e1, e2);
}

Point parse_point(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    try {
        while (std::getline(ss, item, ',')) v.push_back(std::stod(item));
    } catch (const std::exception&) {
        throw Error(ErrorCode::SchemaError, "point '" + s + "'");
    }
    if (v.size() == 2) return make_point(v[0], v[1]);
    if (v.size() == 4) return make_point({v[0], v[1]}, {v[2], v[3]});
    throw Error(ErrorCode::SchemaError, "point '" + s + "'");
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

ProblemSpec parse_problem(const json& j) {
    check_keys(j, "", {"domain", "f1", "f2", "g", "params"});
    ProblemSpec spec;
    spec.domain_json = require(j, "domain", "");
    spec.domain = parse_domain(spec.domain_json);
    spec.f1 = parse_poly(require(j, "f1", ""), "f1");
    spec.f2 = parse_poly(require(j, "f2", ""), "f2");
    if (spec.f1.is_zero()) throw Error(ErrorCode::RangeError, "f1 is the zero polynomial");
    if (spec.f2.is_zero()) throw Error(ErrorCode::RangeError, "f2 is the zero polynomial");
    const auto& g = require(j, "g", "");
    if (g.is_object() && g.contains("ideal")) {
        check_keys(g, "g", {"ideal"});
        const auto& id = require(g, "ideal", "g");
        check_keys(id, "g.ideal", {"a1", "a2"});
        const HoloPoly a1 = parse_poly(require(id, "a1", "g.ideal"), "g.ideal.a1");
        const HoloPoly a2 = parse_poly(require(id, "a2", "g.ideal"), "g.ideal.a2");
        spec.cofactors = std::make_pair(a1, a2);
        spec.g = a1 * spec.f1 + a2 * spec.f2;
    } else {
        spec.g = parse_poly(g, "g");
    }
    spec.params = j.contains("params") ? parse_params(j["params"]) : Params{};
    return spec;
}

ProblemSpec parse_problem_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::SchemaError, "cannot open problem file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::SchemaError, "<root>: " + std::string(e.what()));
    }
    return parse_problem(j);
}

json ProblemSpec::to_json() const {
    const auto& p = params;
    json pj = {{"kappa", p.kappa},
               {"eps0", p.eps0},
               {"c_sep", p.c_sep},
               {"k_max", p.k_max},
               {"q", std::isinf(p.q) ? json("inf") : json(p.q)},
               {"N", p.N},
               {"quad_nodes", p.quad_nodes},
               {"mc_samples", p.mc_samples},
               {"residual_tol", p.residual_tol},
               {"level_floor", p.level_floor},
               {"deriv_max", p.deriv_max},
               {"k1", p.k1},
               {"k2", p.k2},
               {"samples", p.samples},
               {"patch_radius", p.patch_radius}};
    if (p.seed) pj["seed"] = *p.seed;
    if (p.focus) pj["focus"] = pjson(*p.focus);
    json g = poly_to_json(this->g);
    if (cofactors) g = {{"ideal", {{"a1", poly_to_json(cofactors->first)}, {"a2", poly_to_json(cofactors->second)}}}};
    return {{"domain", domain_json}, {"f1", poly_to_json(f1)}, {"f2", poly_to_json(f2)}, {"g", g}, {"params", pj}};
}

const char* to_string(Command c) {
    switch (c) {
        case Command::Certify: return "certify";
        case Command::Divide: return "divide";
        case Command::Glue: return "glue";
        case Command::Covering: return "covering";
        case Command::KernelCheck: return "kernel-check";
        case Command::Counterexample: return "counterexample";
    }
    return "unknown";
}

Command command_from_string(const std::string& s) {
    for (auto c : {Command::Certify, Command::Divide, Command::Glue, Command::Covering, Command::KernelCheck,
                   Command::Counterexample})
        if (s == to_string(c)) return c;
    throw Error(ErrorCode::SchemaError, "command '" + s + "'");
}

json Report::to_json() const {
    return {{"version", report_version},
            {"problem_hash", problem_hash},
            {"payloads", payloads},
            {"erratum_flags", erratum_flags},
            {"pass", pass}};
}

json CounterexampleReport::to_json() const {
    return {{"q", q},         {"kappa", kappa},       {"eps", eps},           {"values", values},
            {"tangent_values", tangent_values},       {"slope", slope},       {"expected_slope", expected},
            {"tolerance", tolerance},                 {"pass", pass}};
}

std::vector<double> log_grid(double lo, double hi, int points) {
    if (!(lo > 0.0 && hi >= lo) || points < 1) throw Error(ErrorCode::RangeError, "log grid needs 0 < lo <= hi");
    std::vector<double> out;
    for (int i = 0; i < points; ++i) {
        const double t = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
        out.push_back(std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo))));
    }
    return out;
}

CounterexampleReport run_counterexample(int q, const std::vector<double>& eps_grid, double kappa, unsigned threads) {
    if (q < 3 || q % 2 == 0) throw Error(ErrorCode::RangeError, "q = " + std::to_string(q) + " must be odd and >= 3");
    if (eps_grid.size() < 2) throw Error(ErrorCode::RangeError, "counterexample needs at least two eps values");
    const auto dom = ConvexDomain::ball(make_point(1.0, 0.0), 1.0);
    const HoloPoly z2sq = HoloPoly::monomial(0, 2);
    const HoloPoly f1 = z2sq;
    const HoloPoly f2 = z2sq - HoloPoly::monomial(q, 0);
    const double half = 0.5 * q;
    // principal branch; Re z1 >= 0 on this ball
    const HoloFn g = [half](const Point& z) { return std::pow(z(0), half) * z(1); };

    CounterexampleReport rep;
    rep.q = q;
    rep.kappa = kappa;
    rep.expected = 0.5 * (1.0 - q);
    SupInftyOptions opt;
    opt.threads = threads;
    for (double e : eps_grid) {
        const auto cert = cert_sup_infty(g, f1, f2, dom, std::vector<Point>{make_point(e, 0.0)}, kappa, 1, opt);
        rep.eps.push_back(e);
        rep.values.push_back(cert.value);
        rep.tangent_values.push_back(cert.value_tangent);
    }
    rep.slope = loglog_slope(rep.eps, rep.values);
    rep.pass = std::abs(rep.slope - rep.expected) <= rep.tolerance * std::abs(rep.expected);
    return rep;
}

Report run_pipeline(const ProblemSpec& spec, const std::vector<Command>& commands, const RunOptions& opt) {
    Report rep;
    rep.problem_hash = hex64(fnv1a(spec.to_json().dump()));
    const std::set<Command> want(commands.begin(), commands.end());
    const unsigned threads = resolve_threads(opt.threads);
    const auto& P = spec.params;
    const std::optional<std::uint64_t> seed = opt.seed ? opt.seed : P.seed;

    auto fail = [&](Command c, const Error& e) {
        rep.payloads[to_string(c)] = {{"error", error_json(e)}, {"pass", false}};
        rep.pass = false;
        if (is_input_error(e)) rep.input_error = true;
    };

    const bool stochastic = want.count(Command::Certify) || want.count(Command::Glue) ||
                            want.count(Command::Covering) || want.count(Command::KernelCheck);
    if (stochastic && !seed) {
        rep.payloads["error"] = error_json(Error(ErrorCode::SchemaError, "params.seed"));
        rep.pass = false;
        rep.input_error = true;
        return rep;
    }

    const HoloFn g = spec.g.fn();

    // covering -> certify / locals -> glue
    std::optional<KappaCovering> cov;
    if (want.count(Command::Covering) || want.count(Command::Certify) || want.count(Command::Glue)) {
        try {
            if (!opt.covering_in.empty()) {
                std::ifstream in(opt.covering_in);
                if (!in) throw Error(ErrorCode::SchemaError, "cannot open covering CSV " + opt.covering_in);
                cov = read_covering_csv(in, spec.domain, covering_params(spec));
            } else {
                cov = build_kappa_covering(spec.domain, covering_params(spec));
            }
            if (want.count(Command::Covering)) {
                const auto vr = verify_covering(*cov, spec.domain, 1000, *seed);
                rep.payloads["covering"] = covering_payload(*cov, vr);
                rep.pass = rep.pass && rep.payloads["covering"]["pass"].get<bool>();
            }
            if (!opt.covering_out.empty()) {
                std::ofstream out(opt.covering_out);
                if (!out) throw Error(ErrorCode::SchemaError, "cannot write covering CSV " + opt.covering_out);
                write_covering_csv(out, *cov, spec.domain);
            }
        } catch (const Error& e) {
            fail(Command::Covering, e);
            cov.reset();
        }
    }

    if (want.count(Command::Certify)) {
        try {
            if (!cov) throw Error(ErrorCode::CollarExhausted, "no covering available");
            json certs = json::object();
            bool ok = true;
            const auto grid = graded_grid(spec.domain, P.samples, *seed);
            auto put = [&](const char* key, const Certificate& c) {
                certs[key] = c.to_json();
                ok = ok && std::isfinite(c.value);
            };
            put("ratio", cert_ratio(g, spec.f1, spec.f2, grid));
            SupInftyOptions so;
            so.k_max = P.k_max;
            so.threads = threads;
            put("sup_infty_1", cert_sup_infty(g, spec.f1, spec.f2, spec.domain, *cov, 1, so));
            put("sup_infty_2", cert_sup_infty(g, spec.f1, spec.f2, spec.domain, *cov, 2, so));
            if (std::isfinite(P.q)) {
                LqOptions lo;
                lo.k_max = P.k_max;
                lo.threads = threads;
                put("lq_1", cert_lq(g, spec.f1, spec.f2, spec.domain, *cov, P.q, 1, lo));
                put("lq_2", cert_lq(g, spec.f1, spec.f2, spec.domain, *cov, P.q, 2, lo));
            }
            rep.payloads["certify"] = {{"certificates", certs}, {"pass", ok}};
            rep.pass = rep.pass && ok;
            add_flags(rep.erratum_flags, {"g_l_pairing_on_X_{3-l}"});
        } catch (const Error& e) {
            fail(Command::Certify, e);
        }
    }

    if (want.count(Command::Divide)) {
        try {
            if (!opt.at) throw Error(ErrorCode::SchemaError, "--at");
            const auto div = local_divide(g, spec.f1, spec.f2, spec.domain, *opt.at, P.kappa, local_config(spec));
            const auto rr = residual_check(div, 200);
            const auto& fac = div.factorization();
            const bool ok = rr.max_residual < P.residual_tol * rr.scale;
            rep.payloads["divide"] = {{"z", pjson(*opt.at)},
                                      {"rho", div.rho_z()},
                                      {"kappa", P.kappa},
                                      {"I1", fac.i_count[0]},
                                      {"I2", fac.i_count[1]},
                                      {"p_count", fac.p_count},
                                      {"quad_nodes", P.quad_nodes},
                                      {"sup_ghat", {rr.sup_ghat1, rr.sup_ghat2}},
                                      {"max_residual", rr.max_residual},
                                      {"max_identity24", rr.max_identity24},
                                      {"sup_ghat1", rr.sup_ghat1},
                                      {"sup_ghat2", rr.sup_ghat2},
                                      {"scale", rr.scale},
                                      {"samples", rr.samples},
                                      {"erratum_flags", div.erratum_flags()},
                                      {"pass", ok}};
            add_flags(rep.erratum_flags, div.erratum_flags());
            rep.pass = rep.pass && ok;
        } catch (const Error& e) {
            fail(Command::Divide, e);
        }
    }

    if (want.count(Command::Glue)) {
        try {
            if (!cov) throw Error(ErrorCode::CollarExhausted, "no covering available");
            const PartitionOfUnity pou(*cov, spec.domain, P.deriv_max);
            std::mt19937_64 rng(*seed);
            std::vector<Point> samples;
            for (int i = 0; i < P.samples; ++i) samples.push_back(sample_covered_point(*cov, spec.domain, rng));

            // locals for every ball touching a sample
            std::set<std::size_t> need_set;
            for (const auto& z : samples)
                for (auto j : pou.candidates(z)) need_set.insert(j);
            const std::vector<std::size_t> need(need_set.begin(), need_set.end());
            const auto cfg = local_config(spec);
            std::vector<std::optional<LocalDivision>> built(need.size());
            std::vector<std::optional<Error>> errors(need.size());
            parallel_for(need.size(), threads, [&](std::size_t k) {
                try {
                    built[k].emplace(local_divide(g, spec.f1, spec.f2, spec.domain, cov->center(need[k]), P.kappa, cfg));
                } catch (const Error& e) {
                    errors[k] = e;
                }
            });
            LocalSet locals = make_local_set(g, spec.f1, spec.f2, spec.domain, *cov, cfg);
            std::set<std::size_t> failed;
            json failures = json::array();
            std::vector<std::string> flags;
            for (std::size_t k = 0; k < need.size(); ++k) {
                if (built[k]) {
                    add_flags(flags, built[k]->erratum_flags());
                    locals.provide(need[k], std::move(*built[k]));
                } else {
                    failed.insert(need[k]);
                    if (failures.size() < 20)
                        failures.push_back({{"ball", need[k]}, {"center", pjson(cov->center(need[k]))}, {"error", error_json(*errors[k])}});
                }
            }
            std::vector<Point> usable;
            for (const auto& z : samples) {
                const auto c = pou.candidates(z);
                if (std::none_of(c.begin(), c.end(), [&](std::size_t j) { return failed.count(j) > 0; }))
                    usable.push_back(z);
            }
            const auto sol = glue_global(g, spec.f1, spec.f2, locals, pou);
            const auto gc = check_glue(sol, usable, threads);
            json hyp = nullptr;
            if (!usable.empty()) {
                try {
                    const std::vector<Point> hs(usable.begin(), usable.begin() + std::min<std::size_t>(usable.size(), 16));
                    const PairFn pf = [&sol](const Point& z) { return sol(z); };
                    hyp = verify_main_hypotheses(pf, spec.domain, P.q, P.k1, P.N, hs, P.k2, 1e-4, threads).to_json();
                } catch (const Error& e) {
                    hyp = {{"error", error_json(e)}};
                }
            }
            const bool ok = failed.empty() && gc.ok && !usable.empty();
            rep.payloads["glue"] = {{"locals", {{"needed", need.size()}, {"built", need.size() - failed.size()},
                                                {"failed", failed.size()}, {"failures", failures}}},
                                    {"samples", samples.size()},
                                    {"evaluated", gc.samples},
                                    {"max_global_residual", gc.max_global_residual},
                                    {"max_local_residual", gc.max_local_residual},
                                    {"max_excess", gc.max_excess},
                                    {"max_balls", gc.max_balls},
                                    {"sup_g1", gc.sup_g1},
                                    {"sup_g2", gc.sup_g2},
                                    {"scale", gc.scale},
                                    {"hypotheses", hyp},
                                    {"pass", ok}};
            add_flags(rep.erratum_flags, flags);
            rep.pass = rep.pass && ok;
        } catch (const Error& e) {
            fail(Command::Glue, e);
        }
    }

    if (want.count(Command::KernelCheck)) {
        try {
            const int N = opt.N ? *opt.N : P.N;
            const std::uint64_t n = opt.samples ? *opt.samples : P.mc_samples;
            if (N < 1) throw Error(ErrorCode::RangeError, "--N = " + std::to_string(N) + " below 1");
            const Point z = opt.z ? *opt.z : spec.domain.center();
            const HoloPoly gk = opt.g ? parse_monomial(*opt.g) : spec.g;
            KernelContext ctx(spec.domain, N);
            // calibration draws from an independent stream
            const std::uint64_t cal_seed = *seed ^ 0x9e3779b97f4a7c15ull;
            const cplx C = calibrate(ctx, spec.domain.center(), MonteCarlo{n, cal_seed}, threads);
            const auto res = reproduce_check(ctx, gk.fn(), z, MonteCarlo{n, *seed}, threads);
            const double tol = 5e-2 * std::abs(res.reference) + 5e-3;
            json out = res.to_json();
            out["N"] = N;
            out["z"] = pjson(z);
            out["g"] = poly_to_json(gk);
            out["calibration"] = {{"z0", pjson(spec.domain.center())}, {"constant", cjson(C)}, {"samples", n}};
            out["tolerance"] = tol;
            out["pass"] = res.abs_error <= tol;
            rep.payloads["kernel-check"] = out;
            rep.pass = rep.pass && res.abs_error <= tol;
        } catch (const Error& e) {
            fail(Command::KernelCheck, e);
        }
    }

    if (want.count(Command::Counterexample)) {
        try {
            const auto cr = run_counterexample(opt.q, log_grid(opt.eps_min, opt.eps_max, opt.eps_points), P.kappa, threads);
            rep.payloads["counterexample"] = cr.to_json();
            rep.pass = rep.pass && cr.pass;
        } catch (const Error& e) {
            fail(Command::Counterexample, e);
        }
    }
    return rep;
}

}  // namespace holodiv

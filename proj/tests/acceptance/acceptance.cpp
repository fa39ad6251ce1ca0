// Runs the eleven acceptance criteria at their pinned tolerances and budgets.
// Prints one [PASS]/[FAIL] line per criterion; exit status 1 if any fails.

#include "holodiv/ba_kernel.hpp"
#include "holodiv/cli.hpp"
#include "holodiv/divided.hpp"
#include "holodiv/geometry.hpp"
#include "holodiv/gluing.hpp"
#include "holodiv/local_division.hpp"
#include "holodiv/varieties.hpp"

#include "generators.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

using namespace holodiv;

namespace {

const Point c0 = make_point(1.0, 0.0);
const ConvexDomain ball = ConvexDomain::ball(c0, 1.0);
const HoloPoly z1 = HoloPoly::z1(), z2 = HoloPoly::z2();
const HoloPoly f1 = z2, f2 = z2 - z1 * z1;

struct Outcome {
    bool ok = false;
    std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double limit_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = body();
    } catch (const std::exception& e) {
        out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool ok = out.ok && secs < limit_s;
    if (!ok) ++failures;
    std::printf("[%s] %2d %s: %s; %.2f s (limit %.0f s)\n", ok ? "PASS" : "FAIL", id, name, out.detail.c_str(), secs,
                limit_s);
    std::fflush(stdout);
}

// Five ideal members a1 f1 + a2 f2 with random quadratic cofactors.
struct Member {
    HoloPoly a1, a2, g;
};
std::vector<Member> ideal_members(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<Member> out;
    for (int i = 0; i < 5; ++i) {
        Member m{gen::poly(rng, 2), gen::poly(rng, 2), {}};
        m.g = m.a1 * f1 + m.a2 * f2;
        out.push_back(m);
    }
    return out;
}

// sup over the closed ball by the maximum principle: dense boundary sample
double sup_on_ball(const HoloPoly& p, std::mt19937_64& rng) {
    double s = 0.0;
    for (int i = 0; i < 20000; ++i) s = std::max(s, std::abs(p(c0 + gen::unit_vector(rng))));
    return s;
}

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

}  // namespace

int main() {
    criterion(1, "counterexample rate", 30.0, [] {
        std::ostringstream d;
        bool ok = true;
        for (int q : {3, 5}) {
            const auto r = run_counterexample(q, log_grid(1e-4, 1e-2, 9));
            d << "q=" << q << " slope " << fmt("%.4f", r.slope) << " (expect " << r.expected << " +-10%) ";
            ok = ok && r.pass;
        }
        return Outcome{ok, d.str()};
    });

    criterion(2, "Leibniz identity", 5.0, [] {
        std::mt19937_64 rng(2);
        double worst = 0.0;
        for (int s = 0; s < 1000; ++s) {
            const auto a = gen::unipoly(rng, 4), b = gen::unipoly(rng, 4);
            const ScalarFn fa = [a](cplx x) { return horner(a, x); };
            const ScalarFn fb = [b](cplx x) { return horner(b, x); };
            const auto r = leibniz_check(fa, fb, gen::nodes(rng, 2 + s % 5, 1.0, 1e-3));
            worst = std::max(worst, r.residual / r.scale);
        }
        return Outcome{worst < 1e-10, "max residual/scale " + fmt("%.2e", worst) + " over 1000 pairs (< 1e-10)"};
    });

    criterion(3, "interpolation exactness", 5.0, [] {
        const HoloPoly g = (HoloPoly::constant(1.0) + z1 * cplx(0.5, -0.25)) * f1 + z2 * f2 * 2.0;
        const auto fac = factorize(f1, f2, ball, make_point(0.1, 0.0), 0.05);
        std::mt19937_64 rng(3);
        double worst = 0.0;
        int nodes = 0;
        for (int s = 0; s < 100; ++s) {
            const cplx a = gen::complex_in_disc(rng, fac.radius_1);
            // l = 1 gives g~2 on the nodes of X1; l = 2 the symmetric g~1
            for (int l : {1, 2}) {
                const auto gt = newton_interpolant(g.fn(), fac, l, a, 1e-7 * std::sqrt(4.0 * fac.radius_1));
                const auto other = fac[2 - l].fiber(a);
                for (cplx node : gt.nodes) {
                    const cplx direct = g(fac.frame.point(a, node)) / fac[2 - l].P(other, node);
                    worst = std::max(worst, std::abs(gt(node) - direct) / std::max(std::abs(direct), 1e-300));
                    ++nodes;
                }
            }
        }
        return Outcome{worst <= 1e-9 && nodes >= 100,
                       "max relative error " + fmt("%.2e", worst) + " at " + std::to_string(nodes) + " nodes of 100 fibers (<= 1e-9)"};
    });

    criterion(4, "local division residual", 60.0, [] {
        double worst = 0.0;
        for (const auto& m : ideal_members(4)) {
            for (double eps : {0.1, 0.05, 0.025}) {
                LocalConfig cfg;
                cfg.quad_nodes = 256;
                const auto div = local_divide(m.g.fn(), f1, f2, ball, make_point(eps, 0.0), 0.05, cfg);
                const auto r = residual_check(div, 200);
                worst = std::max(worst, r.max_residual / r.scale);
            }
        }
        return Outcome{worst < 1e-8, "max residual/scale " + fmt("%.2e", worst) + " over 15 balls (< 1e-8)"};
    });

    criterion(5, "global glue residual", 120.0, [] {
        CoveringParams p;
        p.kappa = 0.05;
        p.eps0 = 0.1;
        const auto cov = build_kappa_covering(ball, p);
        const PartitionOfUnity pou(cov, ball);
        const HoloPoly g = (HoloPoly::constant(1.0) + z1 * cplx(0.5, -0.25)) * f1 + z2 * f2 * 2.0;
        const auto locals = make_local_set(g.fn(), f1, f2, ball, cov, LocalConfig{});
        const auto sol = glue_global(g.fn(), f1, f2, locals, pou);
        std::mt19937_64 rng(5);
        std::vector<Point> samples;
        for (int i = 0; i < 1000; ++i) samples.push_back(sample_covered_point(cov, ball, rng));
        const auto c = check_glue(sol, samples);
        std::ostringstream d;
        d << "global " << fmt("%.2e", c.max_global_residual) << " vs local " << fmt("%.2e", c.max_local_residual)
          << ", max excess " << fmt("%.1e", c.max_excess) << ", " << c.samples << " samples, " << locals.built()
          << " locals";
        return Outcome{c.ok && c.samples == 1000, d.str()};
    });

    criterion(6, "reproducing identity", 120.0, [] {
        KernelContext ctx(ball, 4);
        const cplx C = calibrate(ctx, c0, MonteCarlo{1000000, 6001});
        const std::vector<Point> pts{c0, make_point(1.5, 0.0), make_point(0.7, cplx(0.0, 0.4))};
        const std::vector<HoloPoly> gs{HoloPoly::constant(1.0), z1, z1 * z2};
        double worst = 0.0;  // error / tolerance
        std::uint64_t seed = 6100;
        for (const Point& z : pts) {
            if (std::abs(ball.rho(z)) < 0.3) return Outcome{false, "test point too close to the boundary"};
            for (const HoloPoly& g : gs) {
                const auto r = reproduce_check(ctx, g.fn(), z, MonteCarlo{1000000, ++seed});
                worst = std::max(worst, r.abs_error / (5e-2 * std::abs(r.reference) + 5e-3));
            }
        }
        return Outcome{worst <= 1.0, "C = " + fmt("%.5f", C.real()) + ", max error/tolerance " + fmt("%.3f", worst) +
                                         " over 9 checks (<= 1)"};
    });

    criterion(7, "Hefer exactness", 2.0, [] {
        std::mt19937_64 rng(7);
        double worst = 0.0;
        for (int p = 0; p < 10; ++p) {
            const auto h = hefer_form(gen::poly(rng, 1 + p % 6));
            for (int s = 0; s < 100; ++s)
                worst = std::max(worst, h.residual(gen::point_in_ball(rng, c0, 1.0), gen::point_in_ball(rng, c0, 1.0)));
        }
        return Outcome{worst < 1e-13, "max relative residual " + fmt("%.2e", worst) + " (< 1e-13)"};
    });

    criterion(8, "geometry suite", 10.0, [] {
        std::mt19937_64 rng(8);
        double tau_err = 0.0;
        for (int s = 0; s < 8; ++s) {
            const Point z = gen::shell_point(rng, ball, 1e-3, 0.3);
            const Point v = koranyi_frame(ball, z).v;
            for (double eps : {1e-4, 1e-3, 1e-2, 1e-1})
                tau_err = std::max(tau_err, std::abs(tau(ball, z, v, eps) / std::sqrt(eps) - 1.0));
        }
        int bad = 0, pairs = 0;
        while (pairs < 1000) {
            const Point z = gen::shell_point(rng, ball, 1e-3, 0.3);
            const auto f = koranyi_frame(ball, z);
            const Point zeta = f.point(gen::complex_in_disc(rng, 0.05), gen::complex_in_disc(rng, 0.2));
            if (!ball.in_collar(zeta)) continue;
            const double d = delta(ball, z, zeta);
            if (!in_koranyi_ball(f, zeta, d + 1e-9) || in_koranyi_ball(f, zeta, d - 1e-9)) ++bad;
            ++pairs;
        }
        const auto a = quasi_metric_probe(ball, 20000, 1), b = quasi_metric_probe(ball, 20000, 2);
        const double drift = std::abs(a.c1_tri / b.c1_tri - 1.0);
        std::ostringstream d;
        d << "tau/sqrt(eps) error " << fmt("%.1e", tau_err) << ", delta membership failures " << bad << "/1000, c1_tri "
          << fmt("%.4f", a.c1_tri) << " / " << fmt("%.4f", b.c1_tri) << " (drift " << fmt("%.3f", drift) << ")";
        return Outcome{tau_err <= 1e-10 && bad == 0 && std::isfinite(a.c1_tri) && drift <= 0.2, d.str()};
    });

    criterion(9, "kappa-covering", 60.0, [] {
        CoveringParams p;
        p.kappa = 0.05;
        p.eps0 = 0.1;
        const auto cov = build_kappa_covering(ball, p);
        const auto r = verify_covering(cov, ball, 1000, 9);
        std::ostringstream d;
        d << cov.size() << " centers on " << cov.levels.size() << " levels, " << r.violations.size()
          << " violations, overlap M = " << r.overlap_max << " (<= 64)";
        return Outcome{r.ok() && r.overlap_max <= 64, d.str()};
    });

    criterion(10, "complete intersection", 1.0, [] {
        auto only_origin = [](const IntersectionResult& r) {
            if (!r.complete || r.common_zeros.empty()) return false;
            for (const auto& p : r.common_zeros)
                if (p.norm() > 1e-3) return false;
            return true;
        };
        const bool a = only_origin(complete_intersection_check(z2, z2 - z1 * z1));
        const bool b = !complete_intersection_check(z2, z2 * (HoloPoly::constant(1.0) + z1)).complete;
        const bool c = only_origin(complete_intersection_check(z2 * z2, z2 * z2 - HoloPoly::monomial(3, 0)));
        std::ostringstream d;
        d << "(z2, z2-z1^2) " << (a ? "ok" : "wrong") << ", (z2, z2(1+z1)) " << (b ? "ok" : "wrong")
          << ", (z2^2, z2^2-z1^3) " << (c ? "ok" : "wrong");
        return Outcome{a && b && c, d.str()};
    });

    criterion(11, "necessary-condition consistency", 60.0, [] {
        const auto members = ideal_members(11);
        // centers where X1 and X2 pass within reach: along (eps, 0) and on X2
        std::vector<Point> centers;
        for (double e : log_grid(1e-3, 1e-1, 8))
            for (const Point& z : {make_point(e, 0.0), make_point(e, e * e), make_point(e, cplx(0.0, 0.5 * e * e))})
                if (ball.in_collar(z)) centers.push_back(z);
        std::mt19937_64 rng(12);
        double C[2] = {0.0, 0.0};
        const double kappas[2] = {0.05, 0.025};
        for (const auto& m : members) {
            const double bound = std::max(sup_on_ball(m.a1, rng), sup_on_ball(m.a2, rng));
            for (int k = 0; k < 2; ++k)
                for (int l : {1, 2}) {
                    const auto cert = cert_sup_infty(m.g.fn(), f1, f2, ball, centers, kappas[k], l);
                    C[k] = std::max(C[k], cert.value / bound);
                }
        }
        const double Cmax = std::max(C[0], C[1]);
        const double drift = std::abs(C[1] / C[0] - 1.0);
        std::ostringstream d;
        d << "C = " << fmt("%.4f", Cmax) << " (kappa 0.05: " << fmt("%.4f", C[0]) << ", kappa 0.025: "
          << fmt("%.4f", C[1]) << ", drift " << fmt("%.3f", drift) << " <= 0.5)";
        return Outcome{std::isfinite(Cmax) && Cmax > 0.0 && drift <= 0.5, d.str()};
    });

    std::printf("%d of 11 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}

#include "holodiv/geometry.hpp"

#include "generators.hpp"

#include <doctest.h>

#include <sstream>

using namespace holodiv;

namespace {

const ConvexDomain ball = ConvexDomain::ball(make_point(1.0, 0.0), 1.0);

Eigen::Matrix2cd ellipsoid_matrix() {
    Eigen::Matrix2cd A;
    A << 2.0, cplx(0.3, 0.4), cplx(0.3, -0.4), 1.0;
    return A;
}

}  // namespace

TEST_CASE("rho values on the ball of center (1,0)") {
    CHECK(ball.rho(make_point(1.0, 0.0)) == doctest::Approx(-1.0));
    CHECK(ball.rho(make_point(0.0, 0.0)) == doctest::Approx(0.0));
    CHECK(ball.rho(make_point(0.1, 0.0)) == doctest::Approx(-0.19).epsilon(1e-14));
}

TEST_CASE("gradient matches finite differences of rho") {
    std::mt19937_64 rng(11);
    const auto ell = ConvexDomain::ellipsoid(ellipsoid_matrix(), make_point(0.5, cplx(0.0, 0.2)));
    for (const ConvexDomain* dom : {&ball, &ell}) {
        for (int s = 0; s < 50; ++s) {
            const Point z = gen::point_in_ball(rng, dom->center(), 0.5);
            const Point g = dom->grad(z);
            const double h = 1e-6;
            for (int i = 0; i < 2; ++i) {
                Point ex = Point::Zero(), ey = Point::Zero();
                ex(i) = h;
                ey(i) = cplx(0.0, h);
                const double dx = (dom->rho(z + ex) - dom->rho(z - ex)) / (2 * h);
                const double dy = (dom->rho(z + ey) - dom->rho(z - ey)) / (2 * h);
                // d/dz = (d/dx - i d/dy) / 2
                const cplx fd = 0.5 * cplx(dx, -dy);
                CHECK(std::abs(fd - g(i)) <= 1e-6 * std::max(1.0, std::abs(g(i))));
            }
        }
    }
}

TEST_CASE("Koranyi frame examples") {
    const double eps = 0.1;
    const auto f = koranyi_frame(ball, make_point(eps, 0.0));
    CHECK(std::abs(f.eta(0) + 1.0) < 1e-14);
    CHECK(std::abs(f.eta(1)) < 1e-14);
    CHECK(std::abs(std::abs(f.v(1)) - 1.0) < 1e-14);
    CHECK(std::abs(f.v(0)) < 1e-14);

    const auto top = koranyi_frame(ball, make_point(1.0, 1.0));
    CHECK(std::abs(std::abs(top.eta(1)) - 1.0) < 1e-14);
    CHECK(std::abs(top.eta(0)) < 1e-14);
    CHECK(std::abs(std::abs(top.v(0)) - 1.0) < 1e-14);
}

TEST_CASE("frame invariants and outward normal on an ellipsoid") {
    const auto ell = ConvexDomain::ellipsoid(ellipsoid_matrix(), Point::Zero());
    std::mt19937_64 rng(5);
    for (int s = 0; s < 100; ++s) {
        const Point z = project_to_level(ell, Point::Zero(), gen::unit_vector(rng), 0.0);
        const auto f = koranyi_frame(ell, z);
        CHECK(std::abs(f.eta.norm() - 1.0) < 1e-12);
        CHECK(std::abs(f.v.norm() - 1.0) < 1e-12);
        CHECK(std::abs(herm(f.eta, f.v)) < 1e-12);
        // eta against the independently normalised conjugate gradient
        Point cg = ell.grad(z).conjugate();
        cg /= cg.norm();
        const cplx pairing = herm(cg, f.eta);
        CHECK(std::abs(pairing.imag()) < 1e-12);
        CHECK(pairing.real() > 1.0 - 1e-12);
        CHECK(ell.rho(z + 1e-6 * f.eta) > ell.rho(z));
    }
}

TEST_CASE("degenerate gradient at the center") {
    CHECK_THROWS_AS(koranyi_frame(ball, ball.center()), Error);
    try {
        koranyi_frame(ball, ball.center());
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateGradient);
    }
}

TEST_CASE("Koranyi coordinates round trip") {
    const auto f = koranyi_frame(ball, make_point(0.2, cplx(0.1, 0.05)));
    auto [a0, b0] = f.coords(f.base);
    CHECK(std::abs(a0) == 0.0);
    CHECK(std::abs(b0) == 0.0);
    auto [a1, b1] = f.coords(f.base + 0.3 * f.eta);
    CHECK(std::abs(a1 - 0.3) < 1e-15);
    CHECK(std::abs(b1) < 1e-15);
    std::mt19937_64 rng(3);
    for (int s = 0; s < 200; ++s) {
        const Point z = gen::point_in_ball(rng, ball.center(), 1.0);
        const auto [a, b] = f.coords(z);
        CHECK((f.point(a, b) - z).norm() < 1e-12);
    }
}

TEST_CASE("tau scaling along the tangent and the normal") {
    for (double eps : {1e-4, 1e-3, 1e-2, 1e-1}) {
        const Point z = make_point(eps, 0.0);
        const auto f = koranyi_frame(ball, z);
        CHECK(std::abs(tau(ball, z, f.v, eps) / std::sqrt(eps) - 1.0) < 1e-10);
        const double r0 = 1.0 - eps;
        const double expect = std::sqrt(r0 * r0 + eps) - r0;
        CHECK(std::abs(tau(ball, z, f.eta, eps) - expect) < 1e-10 * expect);
    }
    // monotone as eps -> 0
    const Point z = make_point(0.05, cplx(0.1, 0.0));
    const Point v = make_point(cplx(0.6, 0.0), cplx(0.0, 0.8));
    double prev = tau(ball, z, v, 1e-1);
    for (double eps : {3e-2, 1e-2, 3e-3, 1e-3, 1e-4}) {
        const double t = tau(ball, z, v, eps);
        CHECK(t < prev);
        prev = t;
    }
}

TEST_CASE("delta examples") {
    const Point z = make_point(0.1, 0.0);
    const auto f = koranyi_frame(ball, z);
    CHECK(delta(ball, z, z) == 0.0);
    CHECK(delta(ball, z, z + 0.01 * f.eta) == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(delta(ball, z, z + 0.1 * f.v) == doctest::Approx(0.01).epsilon(1e-12));
    CHECK_THROWS_AS(delta(ball, z, ball.center()), Error);
}

TEST_CASE("property: delta is the infimum of the Koranyi ball radii") {
    std::mt19937_64 rng(2024);
    int checked = 0;
    for (int s = 0; s < 1000; ++s) {
        const Point z = gen::shell_point(rng, ball, 1e-3, 0.3);
        const auto f = koranyi_frame(ball, z);
        const Point zeta = f.point(gen::complex_in_disc(rng, 0.05), gen::complex_in_disc(rng, 0.2));
        if (!ball.in_collar(zeta)) continue;
        const double d = delta(ball, z, zeta);
        CHECK(in_koranyi_ball(f, zeta, d + 1e-9));
        CHECK_FALSE(in_koranyi_ball(f, zeta, d - 1e-9));
        ++checked;
    }
    CHECK(checked > 900);
}

TEST_CASE("quasi-metric probe") {
    const auto p1 = quasi_metric_probe(ball, 10000, 1);
    const auto p2 = quasi_metric_probe(ball, 10000, 2);
    CHECK(std::isfinite(p1.c1_tri));
    CHECK(std::isfinite(p1.c1_sym));
    CHECK(p1.c1_tri > 0.0);
    CHECK(std::abs(p1.c1_tri / p2.c1_tri - 1.0) <= 0.2);
    CHECK_THROWS_AS(quasi_metric_probe(ball, 50, 1), Error);
}

TEST_CASE("degenerate triples") {
    std::mt19937_64 rng(8);
    for (int s = 0; s < 100; ++s) {
        const Point z = gen::shell_point(rng, ball, 1e-3, 0.3);
        const Point zeta = gen::shell_point(rng, ball, 1e-3, 0.3);
        // xi = z: delta(z,zeta) / (0 + delta(z,zeta)) = 1
        const double d = delta(ball, z, zeta);
        const double ratio = d / (delta(ball, z, z) + delta(ball, z, zeta));
        CHECK(ratio <= 1.0);
        CHECK(delta(ball, z, z) == 0.0);
    }
}

TEST_CASE("frames at nearby points agree") {
    std::mt19937_64 rng(17);
    for (int s = 0; s < 100; ++s) {
        const Point z = gen::shell_point(rng, ball, 1e-3, 0.3);
        const Point w = z + 5e-7 * gen::unit_vector(rng);
        const auto a = koranyi_frame(ball, z), b = koranyi_frame(ball, w);
        CHECK((a.eta - b.eta).norm() < 1e-4);
        // v is phase-fixed, so no alignment is needed beyond the convention
        const cplx phase = herm(b.v, a.v);
        CHECK((a.v - phase / std::abs(phase) * b.v).norm() < 1e-4);
    }
}

TEST_CASE("covering on the ball: builder passes the verifier") {
    CoveringParams p;
    const auto cov = build_kappa_covering(ball, p);
    REQUIRE(cov.size() > 0);
    for (const auto& lv : cov.levels)
        for (const auto& c : lv.centers) CHECK(std::abs(ball.rho(c) - lv.value) <= 1e-9);
    const auto rep = verify_covering(cov, ball, 300, 99);
    CHECK(rep.violations.empty());
    CHECK(rep.overlap_max <= 64);
}

TEST_CASE("covering defects are reported") {
    CoveringParams p;
    p.level_floor = 0.05;
    auto cov = build_kappa_covering(ball, p);
    SUBCASE("coincident centers violate separation") {
        cov.levels[0].centers.push_back(cov.levels[0].centers.front());
        cov.reindex();
        const auto rep = verify_covering(cov, ball, 50, 1);
        CHECK(std::any_of(rep.violations.begin(), rep.violations.end(),
                          [](const CoveringViolation& v) { return v.kind == "separation"; }));
    }
    SUBCASE("kappa = 0.5 breaks the 4 kappa inclusion") {
        auto big = cov;
        big.params.kappa = 0.5;
        const auto rep = verify_covering(big, ball, 10, 1);
        CHECK(std::any_of(rep.violations.begin(), rep.violations.end(),
                          [](const CoveringViolation& v) { return v.kind == "inclusion"; }));
    }
}

TEST_CASE("eps0 beyond the collar") {
    CoveringParams p;
    p.eps0 = 0.6;
    try {
        build_kappa_covering(ball, p);
        FAIL("expected CollarExhausted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::CollarExhausted);
    }
}

TEST_CASE("covering CSV round trip") {
    CoveringParams p;
    p.level_floor = 0.02;
    const auto cov = build_kappa_covering(ball, p);
    std::stringstream ss;
    write_covering_csv(ss, cov, ball);
    const auto back = read_covering_csv(ss, ball, p);
    REQUIRE(back.size() == cov.size());
    for (std::size_t i = 0; i < cov.size(); ++i) CHECK((back.center(i) - cov.center(i)).norm() < 1e-15);
}

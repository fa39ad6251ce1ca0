#include "holodiv/local_division.hpp"
#include "holodiv/varieties.hpp"

#include "generators.hpp"

#include <doctest.h>

#include <algorithm>

using namespace holodiv;

namespace {

const ConvexDomain ball = ConvexDomain::ball(make_point(1.0, 0.0), 1.0);
const HoloPoly z1 = HoloPoly::z1(), z2 = HoloPoly::z2();

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error raised");
    return ErrorCode::RangeError;
}

}  // namespace

TEST_CASE("restrict_to_line") {
    const auto p = restrict_to_line(z2, make_point(0.3, 0.0), make_point(0.0, 1.0));
    REQUIRE(p.size() >= 2);
    CHECK(std::abs(p[0]) == 0.0);
    CHECK(std::abs(p[1] - 1.0) == 0.0);

    const double eps = 0.1;
    const auto q = restrict_to_line(z2 - z1 * z1, make_point(eps, 0.0), make_point(0.0, 1.0));
    CHECK(std::abs(q[0] + eps * eps) < 1e-17);
    CHECK(std::abs(q[1] - 1.0) < 1e-17);

    std::mt19937_64 rng(1);
    for (int s = 0; s < 20; ++s) {
        const HoloPoly f = gen::poly(rng, 5);
        const Point base = gen::point_in_ball(rng, Point::Zero(), 1.0);
        const Point dir = gen::unit_vector(rng);
        const auto r = restrict_to_line(f, base, dir);
        for (int t = 0; t < 20; ++t) {
            const cplx lam = gen::complex_in_disc(rng, 1.0);
            const cplx direct = f(base + lam * dir);
            CHECK(std::abs(horner(r, lam) - direct) <= 1e-12 * std::max(1.0, f.abs_eval(base + lam * dir)));
        }
    }
}

TEST_CASE("HoloPoly derivatives match finite differences") {
    std::mt19937_64 rng(2);
    for (int s = 0; s < 20; ++s) {
        const HoloPoly f = gen::poly(rng, 4);
        const Point z = gen::point_in_ball(rng, Point::Zero(), 0.8);
        const double h = 1e-5;
        const Point e1 = make_point(h, 0.0), e2 = make_point(0.0, h);
        const cplx fd1 = (f(z + e1) - f(z - e1)) / (2 * h);
        const cplx fd2 = (f(z + e2) - f(z - e2)) / (2 * h);
        CHECK(std::abs(fd1 - f.d1()(z)) <= 1e-6 * std::max(1.0, std::abs(fd1)));
        CHECK(std::abs(fd2 - f.d2()(z)) <= 1e-6 * std::max(1.0, std::abs(fd2)));
        CHECK(std::abs(f.d1().d2()(z) - f.d2().d1()(z)) < 1e-12);
    }
}

TEST_CASE("fiber roots") {
    const double eps = 0.1;
    const auto fr = koranyi_frame(ball, make_point(eps, 0.0));
    const auto r = fiber_roots(z2 - z1 * z1, fr, 0.0, 1.0);
    REQUIRE(r.size() == 1);
    CHECK(std::abs(r[0] - eps * eps) < 1e-14);

    const auto d = fiber_roots(z2 * z2, fr, 0.03, 1.0);
    REQUIRE(d.size() == 2);
    CHECK(std::abs(d[0]) < 1e-12);
    CHECK(d[0] == d[1]);
    CHECK(root_multiplicities(d) == std::vector<int>{2, 2});

    CHECK(fiber_roots(HoloPoly::constant(1.0), fr, 0.0, 1.0).empty());
    // z1 - eps vanishes on the whole fiber through the base
    CHECK(code_of([&] { fiber_roots(z1 - HoloPoly::constant(eps), fr, 0.0, 1.0); }) ==
          ErrorCode::IdenticallyZeroFiber);
}

TEST_CASE("property: roots of random polynomials are zeros") {
    std::mt19937_64 rng(3);
    for (int s = 0; s < 100; ++s) {
        const UniPoly p = gen::unipoly(rng, 1 + s % 7);
        const auto roots = poly_roots(p);
        CHECK(roots.size() == p.size() - 1);
        double scale = 0.0;
        for (cplx c : p) scale = std::max(scale, std::abs(c));
        for (cplx r : roots) {
            double mag = 0.0;
            for (std::size_t k = p.size(); k-- > 0;) mag = mag * std::abs(r) + std::abs(p[k]);
            CHECK(std::abs(horner(p, r)) <= 1e-9 * std::max(scale, mag));
        }
    }
}

TEST_CASE("track_roots follows the model curve") {
    const double eps = 0.1;
    const auto fr = koranyi_frame(ball, make_point(eps, 0.0));
    std::vector<cplx> path;
    for (int s = 0; s <= 40; ++s) path.push_back(std::polar(0.004 * s / 40.0, 0.7));
    const auto c = track_roots(z2 - z1 * z1, fr, path);
    REQUIRE(c.count() == 1);
    for (std::size_t s = 0; s < path.size(); ++s)
        CHECK(std::abs(c.values[s][0] - (eps - path[s]) * (eps - path[s])) < 1e-13);

    const auto flat = track_roots(z2, fr, path);
    REQUIRE(flat.count() == 1);
    for (const auto& row : flat.values) CHECK(std::abs(row[0]) < 1e-15);
}

TEST_CASE("crossing curves raise BranchCollision") {
    const double eps = 0.01;
    const auto fr = koranyi_frame(ball, make_point(eps, 0.0));
    // fiber z2^2 - (eps - z1s)^2, the two curves meet at z1s = eps
    std::vector<cplx> path;
    for (int s = 0; s <= 20; ++s) path.push_back(2.0 * eps * s / 20.0);
    CHECK(code_of([&] { track_roots((z2 - z1) * (z2 + z1), fr, path); }) == ErrorCode::BranchCollision);
}

TEST_CASE("select_index_set threshold") {
    const double kappa = 0.05, rho = -0.1;
    const double bound = std::sqrt(2 * kappa * std::abs(rho));
    RootCurves c;
    c.samples = {0.0, 0.001};
    c.multiplicity = {1, 1, 1};
    c.values = {{0.0, 10 * bound, bound * (1 - 1e-6)}, {0.0, 10 * bound, bound * (1 - 1e-6)}};
    CHECK(select_index_set(c, kappa, rho) == std::vector<int>{0, 2});
    c.values[0][2] = c.values[1][2] = bound;
    CHECK(select_index_set(c, kappa, rho) == std::vector<int>{0});
}

TEST_CASE("Weierstrass splits") {
    const double eps = 0.1, kappa = 0.05;
    const Point z = make_point(eps, 0.0);
    const auto fr = koranyi_frame(ball, z);
    const double rho = ball.rho(z);
    const double r = kappa * std::abs(rho);

    SUBCASE("z2 splits with constant Q") {
        const auto sp = weierstrass_split(z2, fr, kappa, rho);
        CHECK(sp.index_set().size() == 1);
        for (auto [a, b] : ball_samples(r, 50)) CHECK(std::abs(sp.Q(a, b) - 1.0) < 1e-12);
    }
    SUBCASE("z2 - z1^2 splits with Q = 1") {
        const auto sp = weierstrass_split(z2 - z1 * z1, fr, kappa, rho);
        REQUIRE(sp.index_set().size() == 1);
        for (auto [a, b] : ball_samples(r, 50)) CHECK(std::abs(sp.Q(a, b) - 1.0) < 1e-9);
    }
    SUBCASE("no curve near the ball: P = 1, Q = f") {
        const HoloPoly f = z2 - HoloPoly::constant(0.5);
        const auto sp = weierstrass_split(f, fr, kappa, rho);
        CHECK(sp.index_set().empty());
        for (auto [a, b] : ball_samples(r, 20)) {
            CHECK(sp.P(a, b) == cplx(1.0));
            CHECK(std::abs(sp.Q(a, b) - f(fr.point(a, b))) < 1e-14);
        }
    }
}

TEST_CASE("property: factorization identity on ball samples") {
    std::mt19937_64 rng(4);
    const std::vector<std::pair<HoloPoly, HoloPoly>> pairs = {
        {z2, z2 - z1 * z1},
        {z2 * z2, z2 * z2 - z1 * z1 * z1},
        {z2 - HoloPoly::constant(0.02) * z1, z2 + z1 * z1 * HoloPoly::constant(cplx(0.3, 0.1))},
    };
    for (const auto& [f1, f2] : pairs) {
        for (double eps : {0.1, 0.05}) {
            const Point z = make_point(eps, 0.0);
            const auto fac = factorize(f1, f2, ball, z, 0.05);
            const auto samples = ball_samples(fac.radius_1, 1000);
            for (int l = 0; l < 2; ++l) {
                const HoloPoly& f = l == 0 ? f1 : f2;
                double worst = 0.0;
                for (auto [a, b] : samples) {
                    const auto fb = fac[l].fiber(a);
                    const cplx lhs = f(fac.frame.point(a, b));
                    const double err = std::abs(lhs - fac[l].P(fb, b) * fac[l].Q(fb, b));
                    worst = std::max(worst, err / std::max(1.0, std::abs(lhs)));
                }
                CHECK(worst <= 1e-9);
                CHECK(fac.min_abs_q[l] > 0.0);
            }
        }
    }
}

TEST_CASE("complete intersection fixtures") {
    const auto a = complete_intersection_check(z2, z2 - z1 * z1);
    CHECK(a.complete);
    REQUIRE(a.common_zeros.size() >= 1);
    for (const auto& p : a.common_zeros) CHECK(p.norm() < 1e-6);

    const auto b = complete_intersection_check(z2, z2 * (HoloPoly::constant(1.0) + z1));
    CHECK_FALSE(b.complete);
    REQUIRE(b.witness);
    CHECK(std::abs((*b.witness)(1)) < 1e-9);

    for (int q : {3, 5}) {
        const auto c = complete_intersection_check(z2 * z2, z2 * z2 - HoloPoly::monomial(q, 0));
        CHECK(c.complete);
        REQUIRE(!c.common_zeros.empty());
        for (const auto& p : c.common_zeros) CHECK(p.norm() < 1e-3);
    }
}

TEST_CASE("property: complete intersection is symmetric") {
    std::mt19937_64 rng(6);
    for (int s = 0; s < 30; ++s) {
        HoloPoly f1 = gen::poly(rng, 2), f2 = gen::poly(rng, 2);
        if (s % 3 == 0) {
            const HoloPoly common = gen::poly(rng, 1);
            f1 = f1 * common;
            f2 = f2 * common;
        }
        const auto x = complete_intersection_check(f1, f2);
        const auto y = complete_intersection_check(f2, f1);
        CHECK(x.complete == y.complete);
        if (s % 3 == 0) CHECK_FALSE(x.complete);
        if (x.complete && y.complete) CHECK(x.common_zeros.size() == y.common_zeros.size());
    }
}

#include "holodiv/local_division.hpp"

#include "holodiv/divided.hpp"

#include <boost/random/sobol.hpp>
#include <boost/random/uniform_01.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>

namespace holodiv {

cplx NewtonInterp::operator()(cplx w) const {
    cplx acc = 0.0;
    for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * (w - nodes[k]) + coeffs[k];
    return acc;
}

NewtonInterp newton_interpolant(const HoloFn& g, const FiberFactorization& fac, int l, cplx z1s,
                                double jitter_scale) {
    if (l != 1 && l != 2) throw Error(ErrorCode::RangeError, "l must be 1 or 2");
    const auto fb = fac[l - 1].fiber(z1s);
    const auto other = fac[2 - l].fiber(z1s);
    NewtonInterp out;
    out.nodes = fb.alpha;
    if (out.nodes.empty()) return out;

    // identical nodes (multiple roots) are spread by multiples of the jitter
    for (std::size_t i = 0; i < out.nodes.size(); ++i) {
        int dup = 0;
        for (std::size_t j = 0; j < i; ++j)
            if (fb.alpha[j] == fb.alpha[i]) ++dup;
        if (dup > 0) {
            out.nodes[i] += static_cast<double>(dup) * jitter_scale;
            out.jittered = true;
        }
    }
    try {
        check_distinct(out.nodes);
    } catch (const Error&) {
        throw Error(ErrorCode::ConfluentNodes, "interpolation nodes stay confluent after jitter");
    }

    const auto& split_other = fac[2 - l];
    std::vector<cplx> values(out.nodes.size());
    double pscale = 1.0;
    for (cplx a : other.alpha) pscale *= std::max(std::abs(a), jitter_scale);
    for (std::size_t i = 0; i < out.nodes.size(); ++i) {
        const cplx p = split_other.P(other, out.nodes[i]);
        if (std::abs(p) <= 1e-12 * pscale)
            throw Error(ErrorCode::SingularNodeValue, "node of X_" + std::to_string(l) +
                                                          " lies on X_" + std::to_string(3 - l) + " inside the ball");
        values[i] = g(fac.frame.point(z1s, out.nodes[i])) / p;
    }
    const auto table = divided_diff_values(out.nodes, values);
    out.coeffs.resize(out.nodes.size());
    for (std::size_t k = 0; k < out.nodes.size(); ++k) out.coeffs[k] = table.at(0, k);
    return out;
}

double cutoff_transition(double r) {
    auto sigma = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
    if (r <= 1.0 / 3.0) return 0.0;
    if (r >= 2.0 / 3.0) return 1.0;
    const double t = 3.0 * r - 1.0;
    const double a = sigma(t);
    return a / (a + sigma(1.0 - t));
}

std::pair<double, double> cutoffs(cplx arg1, cplx arg2) {
    const double a = std::abs(arg1);
    const double b = std::abs(arg2);
    if (a == 0.0 && b == 0.0) throw Error(ErrorCode::BothArgumentsZero, "both cutoff arguments vanish");
    const double chi1 = b == 0.0 ? 1.0 : cutoff_transition(a / b);
    return {chi1, 1.0 - chi1};
}

LocalDivision::LocalDivision(HoloFn g, HoloPoly f1, HoloPoly f2, ConvexDomain domain, Point z, double kappa,
                             LocalConfig cfg)
    : g_(std::move(g)),
      f1_(std::move(f1)),
      f2_(std::move(f2)),
      domain_(std::move(domain)),
      z_(std::move(z)),
      kappa_(kappa),
      cfg_(std::move(cfg)) {
    if (!(kappa > 0.0 && kappa <= 0.1)) throw Error(ErrorCode::RangeError, "kappa must lie in (0, 0.1]");
    if (cfg_.quad_nodes < 8) throw Error(ErrorCode::RangeError, "quad_nodes must be >= 8");
    fac_ = factorize(f1_, f2_, domain_, z_, kappa_, cfg_.factorization);
}

LocalDivision::FiberData LocalDivision::fiber_at(cplx z1s) const {
    FiberData fd;
    fd.z1s = z1s;
    fd.fb[0] = fac_[0].fiber(z1s);
    fd.fb[1] = fac_[1].fiber(z1s);

    const double rc = contour_radius();
    const double inner = cfg_.mode == ErrorMode::Circle ? rc : std::sqrt(3.5 * fac_.radius_1);
    for (int l = 0; l < 2; ++l)
        for (cplx a : fd.fb[l].alpha)
            if (!(std::abs(a) < inner * (1.0 - 1e-3)))
                throw Error(ErrorCode::RootNearContour, "root |alpha| = " + std::to_string(std::abs(a)) +
                                                            " not inside the contour radius " + std::to_string(inner));

    const double jitter = cfg_.node_jitter * rc;
    // g~1 interpolates at the X2 nodes, g~2 at the X1 nodes
    fd.gt[0] = newton_interpolant(g_, fac_, 2, z1s, jitter);
    fd.gt[1] = newton_interpolant(g_, fac_, 1, z1s, jitter);
    if (fd.gt[0].jittered || fd.gt[1].jittered) std::atomic_ref<bool>(jitter_used_).store(true);

    if (cfg_.drop_error_term) return fd;
    std::vector<double> radii{rc}, rw{1.0};
    if (cfg_.mode == ErrorMode::Annulus) {
        std::vector<double> x, w;
        gauss_legendre(cfg_.annulus_radii, x, w);
        radii.clear();
        rw.clear();
        for (std::size_t m = 0; m < x.size(); ++m) {
            radii.push_back(inner + 0.5 * (x[m] + 1.0) * (rc - inner));
            rw.push_back(0.5 * w[m]);
        }
    }
    const int n = cfg_.quad_nodes;
    for (std::size_t m = 0; m < radii.size(); ++m)
        for (int k = 0; k < n; ++k) {
            const cplx xi = std::polar(radii[m], 2.0 * pi * (k + 0.5) / n);
            const cplx den = fac_[0].P(fd.fb[0], xi) * fac_[1].P(fd.fb[1], xi);
            fd.contour_nodes.push_back(xi);
            fd.contour_weights.push_back(rw[m] * g_(fac_.frame.point(z1s, xi)) * xi / (den * static_cast<double>(n)));
        }
    return fd;
}

cplx LocalDivision::error_integral(const FiberData& fd, cplx z2s) const {
    cplx e = 0.0;
    for (std::size_t k = 0; k < fd.contour_nodes.size(); ++k) e += fd.contour_weights[k] / (fd.contour_nodes[k] - z2s);
    return e;
}

LocalDivision::Values LocalDivision::evaluate(const FiberData& fd, cplx z2s) const {
    Values v;
    const Point zeta = fac_.frame.point(fd.z1s, z2s);
    v.g = g_(zeta);
    v.f1 = f1_(zeta);
    v.f2 = f2_(zeta);
    v.P1 = fac_[0].P(fd.fb[0], z2s);
    v.P2 = fac_[1].P(fd.fb[1], z2s);
    v.Q1 = fac_[0].Q(fd.fb[0], z2s);
    v.Q2 = fac_[1].Q(fd.fb[1], z2s);
    v.gt1 = fd.gt[0](z2s);
    v.gt2 = fd.gt[1](z2s);
    v.e = cfg_.drop_error_term ? cplx(0.0) : error_integral(fd, z2s);

    const double rho = std::abs(domain_.rho(zeta));
    const auto i1 = static_cast<double>(fac_.i_count[0]);
    const auto i2 = static_cast<double>(fac_.i_count[1]);
    // |f_l rho^{i_l} / P_l| = |Q_l| |rho|^{i_l}
    const auto [c1, c2] = cutoffs(v.Q1 * std::pow(rho, i1), v.Q2 * std::pow(rho, i2));
    v.chi1 = c1;
    v.chi2 = c2;
    v.ghat1 = (v.gt1 + v.chi1 * v.P2 * v.e) / v.Q1;
    v.ghat2 = (v.gt2 + v.chi2 * v.P1 * v.e) / v.Q2;
    v.residual = std::abs(v.g - v.ghat1 * v.f1 - v.ghat2 * v.f2);
    v.identity24 = std::abs(v.g - v.P1 * v.gt1 - v.P2 * v.gt2 - v.P1 * v.P2 * v.e);
    return v;
}

LocalDivision::Values LocalDivision::evaluate(const Point& zeta) const {
    const auto [a, b] = fac_.frame.coords(zeta);
    return evaluate(fiber_at(a), b);
}

std::vector<std::string> LocalDivision::erratum_flags() const {
    std::vector<std::string> f{"g_l_pairing_on_X_{3-l}", "g_tilde_2_sum_to_i1"};
    if (jitter_used_) f.push_back("node_jitter");
    return f;
}

LocalDivision local_divide(const HoloFn& g, const HoloPoly& f1, const HoloPoly& f2, const ConvexDomain& domain,
                           const Point& z, double kappa, const LocalConfig& cfg) {
    LocalDivision div(g, f1, f2, domain, z, kappa, cfg);
    const auto zeros = cfg.common_zeros ? *cfg.common_zeros : complete_intersection_check(f1, f2).common_zeros;
    const double gscale = std::max(1.0, std::abs(g(z)));
    for (const Point& p : zeros) {
        if (!in_koranyi_ball(div.frame(), p, div.radius())) continue;
        const double gp = std::abs(g(p));
        if (gp > 1e3 * cfg.residual_tol * gscale)
            throw Error(ErrorCode::IncompleteIdeal, "g = " + std::to_string(gp) + " at a common zero of f1, f2 in the ball");
    }
    if (cfg.verify_samples > 0 && !cfg.drop_error_term) {
        const auto rep = residual_check(div, cfg.verify_samples);
        if (rep.max_residual > 1e3 * cfg.residual_tol * rep.scale)
            throw Error(ErrorCode::IncompleteIdeal, "local residual " + std::to_string(rep.max_residual) +
                                                        " exceeds 1e3 * residual_tol");
    }
    return div;
}

std::vector<std::pair<cplx, cplx>> ball_samples(double radius, int count, double shrink) {
    boost::random::sobol eng(4);
    boost::random::uniform_01<double> u;
    std::vector<std::pair<cplx, cplx>> out;
    out.reserve(count);
    const double r1 = shrink * radius;
    const double r2 = std::sqrt(shrink * radius);
    for (int i = 0; i < count; ++i) {
        const double a = u(eng), b = u(eng), c = u(eng), d = u(eng);
        out.emplace_back(std::polar(r1 * std::sqrt(a), 2.0 * pi * b), std::polar(r2 * std::sqrt(c), 2.0 * pi * d));
    }
    return out;
}

ResidualReport residual_check(const LocalDivision& div, const std::vector<std::pair<cplx, cplx>>& samples) {
    ResidualReport rep;
    for (const auto& [a, b] : samples) {
        const auto v = div.evaluate(div.fiber_at(a), b);
        rep.max_residual = std::max(rep.max_residual, v.residual);
        rep.max_identity24 = std::max(rep.max_identity24, v.identity24);
        rep.sup_ghat1 = std::max(rep.sup_ghat1, std::abs(v.ghat1));
        rep.sup_ghat2 = std::max(rep.sup_ghat2, std::abs(v.ghat2));
        rep.sup_g = std::max(rep.sup_g, std::abs(v.g));
        ++rep.samples;
    }
    rep.scale = std::max(1.0, rep.sup_g);
    return rep;
}

ResidualReport residual_check(const LocalDivision& div, int samples) {
    return residual_check(div, ball_samples(div.radius(), samples));
}

}  // namespace holodiv

#include "holodiv/ba_kernel.hpp"

#include "holodiv/divided.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace holodiv {

namespace {

constexpr double pole_tol = 1e-12;
constexpr std::size_t mc_shards = 64;

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

void add_term(HeferForm::Terms& t, const HeferForm::Key& k, cplx c) {
    if (c == cplx(0.0)) return;
    auto [it, inserted] = t.emplace(k, c);
    if (!inserted) it->second += c;
}

// int_0^1 of d_i(z1^p z2^q) at zeta + t (z - zeta), expanded term by term:
// (1-t)^{a-k} t^k pieces integrate to Beta values.
void integrate_monomial(HeferForm::Terms& out, int a, int b, cplx c) {
    const double denom = factorial(a + b + 1);
    for (int k = 0; k <= a; ++k)
        for (int m = 0; m <= b; ++m) {
            const double beta = factorial(k + m) * factorial(a + b - k - m) / denom;
            add_term(out, {a - k, b - m, k, m}, c * binom(a, k) * binom(b, m) * beta);
        }
}

cplx eval_terms(const HeferForm::Terms& t, const Point& zeta, const Point& z) {
    cplx acc = 0.0;
    for (const auto& [k, c] : t)
        acc += c * std::pow(zeta(0), k[0]) * std::pow(zeta(1), k[1]) * std::pow(z(0), k[2]) * std::pow(z(1), k[3]);
    return acc;
}

struct Accum {
    cplx sum = 0.0;
    double sum_sq = 0.0;
    std::uint64_t n = 0;
};

ReproduceResult reproduce_mc(const KernelContext& ctx, const HoloFn& g, const Point& z, const MonteCarlo& mc,
                             unsigned threads) {
    if (mc.samples == 0) throw Error(ErrorCode::RangeError, "MC needs samples > 0");
    const auto& dom = ctx.domain();
    const Point c = dom.center();
    const double r = dom.bbox_radius();
    const double volume = 16.0 * r * r * r * r;

    std::vector<Accum> shards(mc_shards);
    parallel_for(mc_shards, resolve_threads(threads), [&](std::size_t s) {
        std::seed_seq seq{static_cast<std::uint32_t>(mc.seed), static_cast<std::uint32_t>(mc.seed >> 32),
                          static_cast<std::uint32_t>(s)};
        std::mt19937_64 rng(seq);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        const std::uint64_t count = mc.samples / mc_shards + (s < mc.samples % mc_shards ? 1 : 0);
        Accum acc;
        for (std::uint64_t i = 0; i < count; ++i) {
            const double x0 = u(rng), x1 = u(rng), x2 = u(rng), x3 = u(rng);
            const Point zeta = c + r * make_point({x0, x1}, {x2, x3});
            if (!(dom.rho(zeta) < 0.0)) continue;
            const cplx f = g(zeta) * ctx.density(zeta, z, 2);
            acc.sum += f;
            acc.sum_sq += std::norm(f);
        }
        acc.n = count;
        shards[s] = acc;
    });

    Accum tot;
    for (const auto& a : shards) {
        tot.sum += a.sum;
        tot.sum_sq += a.sum_sq;
        tot.n += a.n;
    }
    const double n = static_cast<double>(tot.n);
    ReproduceResult res;
    const cplx mean = tot.sum / n;
    res.integral = volume * mean;
    const double var = std::max(0.0, tot.sum_sq / n - std::norm(mean));
    res.stderr_estimate = volume * std::sqrt(var / n);
    res.evaluations = tot.n;
    return res;
}

ReproduceResult reproduce_tensor(const KernelContext& ctx, const HoloFn& g, const Point& z, const Tensor& t,
                                 unsigned threads) {
    const auto& dom = ctx.domain();
    if (!dom.quadratic())
        throw Error(ErrorCode::RangeError, "tensor quadrature needs a ball or an ellipsoid domain");
    if (t.nodes < 2) throw Error(ErrorCode::RangeError, "tensor quadrature needs nodes >= 2");
    const auto n = static_cast<std::uint64_t>(t.nodes);
    if (n * n * n * n > t.budget)
        throw Error(ErrorCode::QuadratureBudgetExceeded,
                    std::to_string(n) + "^4 nodes exceed the budget " + std::to_string(t.budget));

    // zeta = c + L w, w = R (cos psi e^{i th1}, sin psi e^{i th2}),
    // dV = |det L|^2 R^3 cos psi sin psi dR dpsi dth1 dth2
    std::vector<double> x, w;
    gauss_legendre(t.nodes, x, w);
    const Eigen::Matrix2cd& L = dom.unit_ball_map();
    const double jac = std::norm(L.determinant());
    const Point c = dom.center();

    std::vector<cplx> partial(t.nodes);
    parallel_for(t.nodes, resolve_threads(threads), [&](std::size_t a) {
        const double R = 0.5 * (x[a] + 1.0);
        const double wR = 0.5 * w[a] * R * R * R;
        cplx acc = 0.0;
        for (int b = 0; b < t.nodes; ++b) {
            const double psi = 0.25 * pi * (x[b] + 1.0);
            const double wpsi = 0.25 * pi * w[b] * std::cos(psi) * std::sin(psi);
            for (int k1 = 0; k1 < t.nodes; ++k1) {
                const cplx e1 = std::polar(R * std::cos(psi), 2.0 * pi * k1 / t.nodes);
                for (int k2 = 0; k2 < t.nodes; ++k2) {
                    const cplx e2 = std::polar(R * std::sin(psi), 2.0 * pi * k2 / t.nodes);
                    const Point zeta = c + L * make_point(e1, e2);
                    acc += wpsi * g(zeta) * ctx.density(zeta, z, 2);
                }
            }
        }
        const double dth = 2.0 * pi / t.nodes;
        partial[a] = wR * dth * dth * acc;
    });
    ReproduceResult res;
    for (cplx p : partial) res.integral += jac * p;
    res.evaluations = n * n * n * n;
    return res;
}

}  // namespace

KernelContext::KernelContext(ConvexDomain domain, int N, cplx C) : domain_(std::move(domain)), N_(N), C_(C) {
    if (N < 1) throw Error(ErrorCode::RangeError, "N must be a positive integer");
}

Point KernelContext::h(const Point& zeta) const { return -domain_.grad(zeta); }

Point KernelContext::h_tilde(const Point& zeta) const { return h(zeta) / domain_.rho(zeta); }

cplx KernelContext::denominator(const Point& zeta, const Point& z) const {
    return 1.0 + bilin(h_tilde(zeta), zeta - z);
}

Eigen::Matrix2cd KernelContext::dbar_matrix(const Point& zeta) const {
    const double r = domain_.rho(zeta);
    const Point g = domain_.grad(zeta);
    const auto H = domain_.hess(zeta);
    Eigen::Matrix2cd M;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) M(i, j) = -H.mixed(i, j) / r + g(i) * std::conj(g(j)) / (r * r);
    return M;
}

Eigen::Matrix2cd KernelContext::dbar_matrix_ball(const Point& zeta) const {
    if (domain_.kind() != ConvexDomain::Kind::Ball)
        throw Error(ErrorCode::RangeError, "closed-form dbar matrix needs a ball");
    const Point d = zeta - domain_.center();
    const double r2 = domain_.radius() * domain_.radius();
    const double rho = d.squaredNorm() / r2 - 1.0;
    Eigen::Matrix2cd M;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            M(i, j) = (i == j ? -1.0 / (r2 * rho) : 0.0) + std::conj(d(i)) * d(j) / (r2 * r2 * rho * rho);
    return M;
}

cplx KernelContext::density(const Point& zeta, const Point& z, int n) const {
    if (n < 0 || n > 2) throw Error(ErrorCode::RangeError, "kernel degree n must be 0, 1 or 2");
    const cplx D = denominator(zeta, z);
    if (std::abs(D) < pole_tol) throw Error(ErrorCode::PoleProximity, "|1 + <h~, zeta - z>| below 1e-12");
    const cplx pole = std::pow(D, -(N_ + n));
    if (n == 0) return pole;
    const Eigen::Matrix2cd M = dbar_matrix(zeta);
    if (n == 1) return pole * M.trace();
    return C_ * pole * M.determinant();
}

cplx kernel_density(const KernelContext& ctx, const Point& zeta, const Point& z, int n) {
    return ctx.density(zeta, z, n);
}

nlohmann::json ReproduceResult::to_json() const {
    return {{"integral", {integral.real(), integral.imag()}},
            {"reference", {reference.real(), reference.imag()}},
            {"abs_error", abs_error},
            {"stderr_estimate", stderr_estimate},
            {"evaluations", evaluations}};
}

ReproduceResult reproduce_check(const KernelContext& ctx, const HoloFn& g, const Point& z, const Quadrature& quad,
                                unsigned threads) {
    if (!(ctx.domain().rho(z) < 0.0)) throw Error(ErrorCode::RangeError, "z must lie in D");
    ReproduceResult res = std::visit(
        [&](const auto& q) {
            if constexpr (std::is_same_v<std::decay_t<decltype(q)>, MonteCarlo>)
                return reproduce_mc(ctx, g, z, q, threads);
            else
                return reproduce_tensor(ctx, g, z, q, threads);
        },
        quad);
    res.reference = g(z);
    res.error = res.integral - res.reference;
    res.abs_error = std::abs(res.error);
    return res;
}

cplx calibrate(KernelContext& ctx, const Point& z0, const Quadrature& quad, unsigned threads) {
    ctx.set_constant(1.0);
    const auto res = reproduce_check(ctx, [](const Point&) { return cplx(1.0); }, z0, quad, threads);
    if (std::abs(res.integral) == 0.0) throw Error(ErrorCode::RangeError, "calibration integral vanished");
    ctx.set_constant(1.0 / res.integral);
    return ctx.constant();
}

HeferForm::HeferForm(HoloPoly f, Terms b1, Terms b2) : f_(std::move(f)), b1_(std::move(b1)), b2_(std::move(b2)) {}

cplx HeferForm::b(int i, const Point& zeta, const Point& z) const {
    if (i != 1 && i != 2) throw Error(ErrorCode::RangeError, "Hefer index must be 1 or 2");
    return eval_terms(i == 1 ? b1_ : b2_, zeta, z);
}

double HeferForm::residual(const Point& zeta, const Point& z) const {
    const cplx fz = f_(z), fzeta = f_(zeta);
    const cplx rhs = b(1, zeta, z) * (z(0) - zeta(0)) + b(2, zeta, z) * (z(1) - zeta(1));
    return std::abs(fz - fzeta - rhs) / std::max({1.0, std::abs(fz), std::abs(fzeta)});
}

HeferForm hefer_form(const HoloPoly& f) {
    HeferForm::Terms b1, b2;
    for (const auto& [k, c] : f.terms()) {
        const auto [p, q] = k;
        if (p > 0) integrate_monomial(b1, p - 1, q, c * static_cast<double>(p));
        if (q > 0) integrate_monomial(b2, p, q - 1, c * static_cast<double>(q));
    }
    return HeferForm(f, std::move(b1), std::move(b2));
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0.0, my = 0.0;
    const auto n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) mx += std::log(x[i]), my += std::log(y[i]);
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    return sxx > 0.0 ? sxy / sxx : 0.0;
}

nlohmann::json EstiBAReport::to_json() const {
    nlohmann::json r = nlohmann::json::array();
    for (const auto& row : rows)
        r.push_back({{"eps", row.eps}, {"max_h1", row.max_h1}, {"max_h2", row.max_h2}, {"min_ratio", row.min_ratio}});
    return {{"rows", r}, {"slope_h1", slope_h1}, {"slope_h2", slope_h2}, {"min_ratio", min_ratio}, {"samples", samples}};
}

EstiBAReport estiBA_probe(const KernelContext& ctx, const std::vector<Point>& centers,
                          const std::vector<double>& eps_grid, const EstiBAOptions& opt) {
    const auto& dom = ctx.domain();
    EstiBAReport rep;
    rep.min_ratio = std::numeric_limits<double>::infinity();
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> xs, h1s, h2s;
    for (double eps : eps_grid) {
        EstiBARow row;
        row.eps = eps;
        row.min_ratio = std::numeric_limits<double>::infinity();
        for (const Point& zeta : centers) {
            const KoranyiFrame fz = koranyi_frame(dom, zeta);
            const Point h = ctx.h(zeta);
            const double rz = dom.rho(zeta);
            for (int s = 0; s < opt.samples_per_eps; ++s) {
                // uniform in the polydisc P_eps(zeta), kept strictly inside D
                const cplx a = std::polar(eps * std::sqrt(u(rng)), 2.0 * pi * u(rng));
                const cplx b = std::polar(std::sqrt(eps * u(rng)), 2.0 * pi * u(rng));
                const Point z = fz.point(a, b);
                const double rho_z = dom.rho(z);
                if (!(rho_z < 0.0) || !dom.in_collar(z)) continue;
                const KoranyiFrame fr = koranyi_frame(dom, z);
                row.max_h1 = std::max(row.max_h1, std::abs(bilin(h, fr.eta)));
                row.max_h2 = std::max(row.max_h2, std::abs(bilin(h, fr.v)));
                const double num = std::abs(rz + bilin(h, zeta - z));
                row.min_ratio = std::min(row.min_ratio, num / (eps + std::abs(rz) + std::abs(rho_z)));
                ++rep.samples;
            }
        }
        rep.min_ratio = std::min(rep.min_ratio, row.min_ratio);
        if (row.max_h1 > 0.0 && row.max_h2 > 0.0) {
            xs.push_back(eps);
            h1s.push_back(row.max_h1);
            h2s.push_back(row.max_h2);
        }
        rep.rows.push_back(row);
    }
    rep.slope_h1 = loglog_slope(xs, h1s);
    rep.slope_h2 = loglog_slope(xs, h2s);
    return rep;
}

}  // namespace holodiv

#include "holodiv/gluing.hpp"

#include <algorithm>
#include <cmath>

namespace holodiv {

double bump_profile(double x) {
    auto sigma = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
    if (x <= 0.5) return 1.0;
    if (x >= 1.0) return 0.0;
    const double t = 2.0 * x - 1.0;
    const double a = sigma(1.0 - t);
    return a / (a + sigma(t));
}

namespace {

// Level membership margin: inside P_{kappa|L|}(z_j) the defining function
// moves by about 3 kappa |L|; twice that is searched.
constexpr double kLevelMargin = 6.0;

}  // namespace

PartitionOfUnity::PartitionOfUnity(const KappaCovering& covering, const ConvexDomain& domain, int deriv_max)
    : cov_(&covering), domain_(domain), deriv_max_(deriv_max) {
    if (deriv_max < 0 || deriv_max > 2) throw Error(ErrorCode::RangeError, "deriv_max must be 0, 1 or 2");
    const std::size_t n = covering.size();
    frames_.reserve(n);
    radius_.reserve(n);
    hashes_.resize(covering.levels.size());
    std::size_t flat = 0;
    for (std::size_t li = 0; li < covering.levels.size(); ++li) {
        const auto& lev = covering.levels[li];
        const double r = covering.params.kappa * std::abs(lev.value);
        hashes_[li].cell = std::sqrt(r * r + r);
        for (const Point& c : lev.centers) {
            frames_.push_back(koranyi_frame(domain, c));
            radius_.push_back(covering.ball_radius(flat));
            hashes_[li].cells[key(c, hashes_[li].cell, 0, 0, 0, 0)].push_back(flat);
            ++flat;
        }
    }
}

std::uint64_t PartitionOfUnity::key(const Point& z, double cell, int d0, int d1, int d2, int d3) const {
    const int d[4] = {d0, d1, d2, d3};
    const double x[4] = {z(0).real(), z(0).imag(), z(1).real(), z(1).imag()};
    std::uint64_t k = 0;
    for (int i = 0; i < 4; ++i) {
        const auto c = static_cast<std::int64_t>(std::floor(x[i] / cell)) + d[i];
        k = (k << 16) | (static_cast<std::uint64_t>(c + 32768) & 0xffffULL);
    }
    return k;
}

double PartitionOfUnity::bump(std::size_t j, const Point& z) const {
    const auto [a, b] = frames_[j].coords(z);
    const double r = radius_[j];
    const double u = std::abs(a) / r;
    if (u >= 1.0) return 0.0;
    const double w = std::norm(b) / r;
    if (w >= 1.0) return 0.0;
    return bump_profile(u) * bump_profile(w);
}

std::vector<std::size_t> PartitionOfUnity::candidates(const Point& z) const {
    std::vector<std::size_t> out;
    const double rz = domain_.rho(z);
    const double kappa = cov_->params.kappa;
    for (std::size_t li = 0; li < cov_->levels.size(); ++li) {
        const double L = cov_->levels[li].value;
        if (std::abs(rz - L) > kLevelMargin * kappa * std::abs(L)) continue;
        const auto& h = hashes_[li];
        for (int d0 = -1; d0 <= 1; ++d0)
            for (int d1 = -1; d1 <= 1; ++d1)
                for (int d2 = -1; d2 <= 1; ++d2)
                    for (int d3 = -1; d3 <= 1; ++d3) {
                        const auto it = h.cells.find(key(z, h.cell, d0, d1, d2, d3));
                        if (it == h.cells.end()) continue;
                        for (std::size_t j : it->second)
                            if (bump(j, z) > 0.0) out.push_back(j);
                    }
    }
    std::sort(out.begin(), out.end());
    return out;
}

PartitionOfUnity::Weights PartitionOfUnity::weights(const Point& z) const {
    Weights w;
    for (std::size_t j : candidates(z)) {
        w.index.push_back(j);
        w.chi.push_back(bump(j, z));
        w.denominator += w.chi.back();
    }
    if (!(w.denominator > 0.0)) throw Error(ErrorCode::UncoveredPoint, "no partition bump is positive here");
    for (double& c : w.chi) c /= w.denominator;
    return w;
}

double PartitionOfUnity::chi(std::size_t j, const Point& z) const {
    const double b = bump(j, z);
    if (b == 0.0) return 0.0;
    double s = 0.0;
    for (std::size_t k : candidates(z)) s += bump(k, z);
    return b / s;
}

double PartitionOfUnity::derivative_constant(const std::vector<Point>& samples) const {
    double C = 0.0;
    for (const Point& z : samples) {
        for (std::size_t j : candidates(z)) {
            const auto& fr = frames_[j];
            const double rj = std::abs(cov_->center_rho(j));
            // real directions with their anisotropy weight
            const Point dirs[4] = {fr.eta, cplx(0.0, 1.0) * fr.eta, fr.v, cplx(0.0, 1.0) * fr.v};
            const double wt[4] = {1.0, 1.0, 0.5, 0.5};
            double hstep[4];
            for (int a = 0; a < 4; ++a) hstep[a] = 1e-4 * std::pow(rj, wt[a]);
            auto f = [&](const Point& p) {
                try {
                    return chi(j, p);
                } catch (const Error&) {
                    return 0.0;
                }
            };
            if (deriv_max_ >= 1)
                for (int a = 0; a < 4; ++a) {
                    const Point da = hstep[a] * dirs[a];
                    const double d = (f(z + da) - f(z - da)) / (2.0 * hstep[a]);
                    C = std::max(C, std::abs(d) * std::pow(rj, wt[a]));
                }
            if (deriv_max_ >= 2)
                for (int a = 0; a < 4; ++a)
                    for (int b = a; b < 4; ++b) {
                        const Point da = hstep[a] * dirs[a];
                        const Point db = hstep[b] * dirs[b];
                        const double d = (f(z + da + db) - f(z + da - db) - f(z - da + db) + f(z - da - db)) /
                                         (4.0 * hstep[a] * hstep[b]);
                        C = std::max(C, std::abs(d) * std::pow(rj, wt[a] + wt[b]));
                    }
        }
    }
    return C;
}

LocalSet::LocalSet(std::size_t size, Factory factory) : size_(size), factory_(std::move(factory)) {}
LocalSet::LocalSet(std::size_t size) : size_(size) {}

void LocalSet::provide(std::size_t j, LocalDivision div) {
    if (j >= size_) throw Error(ErrorCode::RangeError, "local index out of range");
    std::lock_guard<std::mutex> lock(mu_);
    cache_[j] = std::make_shared<const LocalDivision>(std::move(div));
}

const LocalDivision& LocalSet::get(std::size_t j, const Point& center) const {
    {
        std::lock_guard<std::mutex> lock(mu_);
        const auto it = cache_.find(j);
        if (it != cache_.end()) return *it->second;
    }
    if (!factory_) throw Error(ErrorCode::MissingLocal, "no local solution for ball " + std::to_string(j));
    // built outside the lock; a concurrent duplicate build is discarded
    auto div = std::make_shared<const LocalDivision>(factory_(j, center));
    std::lock_guard<std::mutex> lock(mu_);
    return *cache_.try_emplace(j, std::move(div)).first->second;
}

std::size_t LocalSet::built() const {
    std::lock_guard<std::mutex> lock(mu_);
    return cache_.size();
}

GlobalSolution::GlobalSolution(HoloFn g, HoloPoly f1, HoloPoly f2, const PartitionOfUnity& pou, const LocalSet& locals)
    : g_(std::move(g)), f1_(std::move(f1)), f2_(std::move(f2)), pou_(&pou), locals_(&locals) {}

GlueValue GlobalSolution::evaluate(const Point& z) const {
    const auto w = pou_->weights(z);
    GlueValue out;
    for (std::size_t k = 0; k < w.index.size(); ++k) {
        const std::size_t j = w.index[k];
        const auto v = locals_->get(j, pou_->covering().center(j)).evaluate(z);
        out.g1 += w.chi[k] * v.ghat1;
        out.g2 += w.chi[k] * v.ghat2;
        out.max_local_residual = std::max(out.max_local_residual, v.residual);
        out.rounding_scale = std::max(out.rounding_scale, std::abs(v.ghat1 * v.f1) + std::abs(v.ghat2 * v.f2));
    }
    const cplx g = g_(z);
    out.residual = std::abs(g - out.g1 * f1_(z) - out.g2 * f2_(z));
    out.scale = std::max(1.0, std::abs(g));
    out.rounding_scale = std::max(out.rounding_scale, out.scale);
    out.balls = static_cast<int>(w.index.size());
    return out;
}

GlobalSolution glue_global(const HoloFn& g, const HoloPoly& f1, const HoloPoly& f2, const LocalSet& locals,
                           const PartitionOfUnity& pou) {
    return GlobalSolution(g, f1, f2, pou, locals);
}

LocalSet make_local_set(const HoloFn& g, const HoloPoly& f1, const HoloPoly& f2, const ConvexDomain& domain,
                        const KappaCovering& covering, const LocalConfig& cfg) {
    const double kappa = covering.params.kappa;
    return LocalSet(covering.size(), [=](std::size_t, const Point& c) {
        return LocalDivision(g, f1, f2, domain, c, kappa, cfg);
    });
}

GlueCheck check_glue(const GlobalSolution& sol, const std::vector<Point>& samples, unsigned threads) {
    std::vector<GlueValue> vals(samples.size());
    parallel_for(samples.size(), resolve_threads(threads), [&](std::size_t i) { vals[i] = sol.evaluate(samples[i]); });
    GlueCheck c;
    c.max_excess = -std::numeric_limits<double>::infinity();
    for (const auto& v : vals) {
        c.max_global_residual = std::max(c.max_global_residual, v.residual);
        c.max_local_residual = std::max(c.max_local_residual, v.max_local_residual);
        c.scale = std::max(c.scale, v.scale);
        c.max_balls = std::max(c.max_balls, v.balls);
        c.sup_g1 = std::max(c.sup_g1, std::abs(v.g1));
        c.sup_g2 = std::max(c.sup_g2, std::abs(v.g2));
        const double bound = v.max_local_residual * (1.0 + 1e-9) + 1e-14 * v.rounding_scale;
        c.max_excess = std::max(c.max_excess, v.residual - bound);
        if (v.residual > bound) c.ok = false;
        ++c.samples;
    }
    return c;
}

nlohmann::json HypothesisReport::to_json() const {
    nlohmann::json n = nlohmann::json::array();
    for (const auto& x : norms) {
        nlohmann::json q = std::isinf(x.q) ? nlohmann::json("inf") : nlohmann::json(x.q);
        n.push_back({{"l", x.l}, {"alpha", x.alpha}, {"beta", x.beta}, {"q", q}, {"value", x.value}});
    }
    return {{"norms", n}, {"decay_slope", decay_slope}, {"k2", k2}, {"decay_ok", decay_ok}, {"samples", samples}};
}

namespace {

struct WirtingerOp {
    Point dir;
    double h;
};

// Nested anti-holomorphic Wirtinger derivative of both components.
std::pair<cplx, cplx> wirtinger(const PairFn& F, const std::vector<WirtingerOp>& ops, std::size_t depth, const Point& z) {
    if (depth == 0) return F(z);
    const auto& op = ops[depth - 1];
    const Point a = op.h * op.dir;
    const Point b = cplx(0.0, op.h) * op.dir;
    const auto p = wirtinger(F, ops, depth - 1, z + a);
    const auto m = wirtinger(F, ops, depth - 1, z - a);
    const auto pi_ = wirtinger(F, ops, depth - 1, z + b);
    const auto mi = wirtinger(F, ops, depth - 1, z - b);
    const cplx I(0.0, 1.0);
    const double s = 1.0 / (4.0 * op.h);
    return {s * ((p.first - m.first) + I * (pi_.first - mi.first)),
            s * ((p.second - m.second) + I * (pi_.second - mi.second))};
}

}  // namespace

HypothesisReport verify_main_hypotheses(const PairFn& gtilde, const ConvexDomain& domain, double q, int k1, int N,
                                        const std::vector<Point>& samples, int k2, double step, unsigned threads) {
    if (k1 < 1) throw Error(ErrorCode::RangeError, "k1 must be >= 1");
    if (!(q >= 1.0)) throw Error(ErrorCode::RangeError, "q must be >= 1 or infinity");
    std::vector<std::pair<int, int>> orders;
    for (int t = 1; t <= k1; ++t)
        for (int a = t; a >= 0; --a) orders.emplace_back(a, t - a);

    const std::size_t ns = samples.size();
    // per sample: scaled |derivative| for (order, l), then |rho| and |rho|^N |g~|
    std::vector<std::vector<double>> vals(ns, std::vector<double>(2 * orders.size(), 0.0));
    std::vector<double> rho(ns), decay(ns);
    parallel_for(ns, resolve_threads(threads), [&](std::size_t i) {
        const Point& z = samples[i];
        const double r = std::abs(domain.rho(z));
        rho[i] = r;
        const KoranyiFrame fr = koranyi_frame(domain, z);
        const auto g0 = gtilde(z);
        decay[i] = std::pow(r, N) * std::max(std::abs(g0.first), std::abs(g0.second));
        for (std::size_t o = 0; o < orders.size(); ++o) {
            const auto [a, b] = orders[o];
            std::vector<WirtingerOp> ops;
            for (int t = 0; t < a; ++t) ops.push_back({fr.eta, step * r});
            for (int t = 0; t < b; ++t) ops.push_back({fr.v, step * std::sqrt(r)});
            const auto d = wirtinger(gtilde, ops, ops.size(), z);
            const double w = std::pow(r, a + 0.5 * b);
            vals[i][2 * o] = std::abs(d.first) * w;
            vals[i][2 * o + 1] = std::abs(d.second) * w;
        }
    });

    HypothesisReport rep;
    rep.samples = static_cast<int>(ns);
    rep.k2 = k2;
    for (std::size_t o = 0; o < orders.size(); ++o)
        for (int l = 1; l <= 2; ++l) {
            HypothesisNorm h;
            h.l = l;
            h.alpha = orders[o].first;
            h.beta = orders[o].second;
            h.q = q;
            double acc = 0.0;
            for (std::size_t i = 0; i < ns; ++i) {
                const double v = vals[i][2 * o + l - 1];
                if (std::isinf(q))
                    acc = std::max(acc, v);
                else
                    acc += std::pow(v, q);
            }
            h.value = std::isinf(q) ? acc : (ns ? std::pow(acc / ns, 1.0 / q) : 0.0);
            rep.norms.push_back(h);
        }

    // decay proxy: shell maxima of |rho|^N |g~| over log-spaced |rho| bins
    if (ns >= 2) {
        const auto [lo, hi] = std::minmax_element(rho.begin(), rho.end());
        const double a = std::log(*lo), b = std::log(*hi);
        const int bins = 6;
        std::vector<double> bx(bins, 0.0), by(bins, -1.0);
        for (std::size_t i = 0; i < ns; ++i) {
            int k = b > a ? static_cast<int>((std::log(rho[i]) - a) / (b - a) * bins) : 0;
            k = std::clamp(k, 0, bins - 1);
            if (decay[i] > by[k]) by[k] = decay[i], bx[k] = rho[i];
        }
        std::vector<double> xs, ys;
        for (int k = 0; k < bins; ++k)
            if (by[k] > 0.0) xs.push_back(std::log(bx[k])), ys.push_back(std::log(by[k]));
        if (xs.size() >= 2) {
            double mx = 0, my = 0;
            for (std::size_t k = 0; k < xs.size(); ++k) mx += xs[k], my += ys[k];
            mx /= xs.size();
            my /= ys.size();
            double sxy = 0, sxx = 0;
            for (std::size_t k = 0; k < xs.size(); ++k) sxy += (xs[k] - mx) * (ys[k] - my), sxx += (xs[k] - mx) * (xs[k] - mx);
            rep.decay_slope = sxx > 0 ? sxy / sxx : 0.0;
        }
    }
    rep.decay_ok = rep.decay_slope >= k2;
    return rep;
}

}  // namespace holodiv

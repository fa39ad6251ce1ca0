#include "holodiv/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace holodiv {

namespace {

Eigen::Matrix2cd inverse_sqrt(const Eigen::Matrix2cd& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(a);
    const Eigen::Vector2d ev = es.eigenvalues();
    if (ev.minCoeff() <= 0.0) throw Error(ErrorCode::RangeError, "ellipsoid matrix must be positive definite");
    Eigen::Vector2cd d(1.0 / std::sqrt(ev(0)), 1.0 / std::sqrt(ev(1)));
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

// Uniform direction on the unit sphere of C^2 = R^4.
Point random_unit(std::mt19937_64& rng) {
    std::normal_distribution<double> n01(0.0, 1.0);
    for (;;) {
        Point p = make_point({n01(rng), n01(rng)}, {n01(rng), n01(rng)});
        const double r = p.norm();
        if (r > 1e-12) return p / r;
    }
}

cplx random_in_disc(std::mt19937_64& rng, double radius) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double r = radius * std::sqrt(u(rng));
    const double t = 2.0 * pi * u(rng);
    return std::polar(r, t);
}

}  // namespace

ConvexDomain ConvexDomain::ball(const Point& center, double radius, double collar) {
    if (!(radius > 0.0)) throw Error(ErrorCode::RangeError, "ball radius must be positive");
    ConvexDomain d;
    d.kind_ = Kind::Ball;
    d.center_ = center;
    d.radius_ = radius;
    d.matrix_ = Eigen::Matrix2cd::Identity() / (radius * radius);
    d.ball_map_ = Eigen::Matrix2cd::Identity() * radius;
    d.collar_ = collar;
    d.bbox_radius_ = radius;
    return d;
}

ConvexDomain ConvexDomain::ellipsoid(const Eigen::Matrix2cd& matrix, const Point& center, double collar) {
    if ((matrix - matrix.adjoint()).norm() > 1e-12 * std::max(1.0, matrix.norm()))
        throw Error(ErrorCode::RangeError, "ellipsoid matrix must be Hermitian");
    ConvexDomain d;
    d.kind_ = Kind::HermitianEllipsoid;
    d.center_ = center;
    d.matrix_ = matrix;
    d.ball_map_ = inverse_sqrt(matrix);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(matrix);
    d.radius_ = 1.0 / std::sqrt(es.eigenvalues().maxCoeff());
    d.bbox_radius_ = 1.0 / std::sqrt(es.eigenvalues().minCoeff());
    d.collar_ = collar;
    return d;
}

ConvexDomain ConvexDomain::custom(CustomFns fns, const Point& bbox_center, double bbox_radius, double collar) {
    ConvexDomain d;
    d.kind_ = Kind::Custom;
    d.fns_ = std::move(fns);
    d.center_ = bbox_center;
    d.radius_ = bbox_radius;
    d.bbox_radius_ = bbox_radius;
    d.collar_ = collar;
    return d;
}

double ConvexDomain::rho(const Point& z) const {
    switch (kind_) {
        case Kind::Ball: return (z - center_).squaredNorm() / (radius_ * radius_) - 1.0;
        case Kind::HermitianEllipsoid: {
            const Point w = z - center_;
            return std::real(herm(w, matrix_ * w)) - 1.0;
        }
        case Kind::Custom: return fns_.rho(z);
    }
    return 0.0;
}

Point ConvexDomain::grad(const Point& z) const {
    switch (kind_) {
        case Kind::Ball: return (z - center_).conjugate() / (radius_ * radius_);
        case Kind::HermitianEllipsoid: return (matrix_ * (z - center_)).conjugate();
        case Kind::Custom: return fns_.grad(z);
    }
    return Point::Zero();
}

RhoHessian ConvexDomain::hess(const Point& z) const {
    if (kind_ == Kind::Custom) return fns_.hess(z);
    RhoHessian h;
    h.mixed = matrix_.transpose();
    return h;
}

bool ConvexDomain::in_collar(const Point& z) const { return std::abs(rho(z)) < collar_; }

double ConvexDomain::max_increment(const Point& z, const Point& v, double t) const {
    if (quadratic()) {
        const cplx gv = bilin(grad(z), v);
        const double q = std::real(herm(v, matrix_ * v));
        return 2.0 * t * std::abs(gv) + t * t * q;
    }
    const double r0 = rho(z);
    auto inc = [&](double th) { return rho(z + std::polar(t, th) * v) - r0; };
    constexpr int coarse = 64;
    int best = 0;
    double best_val = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < coarse; ++i) {
        const double val = inc(2.0 * pi * i / coarse);
        if (val > best_val) {
            best_val = val;
            best = i;
        }
    }
    // golden-section refinement around the coarse maximiser
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = 2.0 * pi * (best - 1) / coarse;
    double b = 2.0 * pi * (best + 1) / coarse;
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    double fc = inc(c);
    double fd = inc(d);
    for (int it = 0; it < 60; ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = inc(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = inc(d);
        }
    }
    return std::max({best_val, fc, fd});
}

KoranyiFrame koranyi_frame(const ConvexDomain& domain, const Point& zeta) {
    const Point g = domain.grad(zeta);
    const double n = g.norm();
    if (n < 1e-12) throw Error(ErrorCode::DegenerateGradient, "gradient of rho vanishes at the frame base");
    KoranyiFrame f;
    f.base = zeta;
    f.eta = g.conjugate() / n;
    Point v = make_point(-std::conj(f.eta(1)), std::conj(f.eta(0)));
    const int lead = std::abs(v(0)) > 1e-12 ? 0 : 1;
    v *= std::conj(v(lead)) / std::abs(v(lead));
    v(lead) = std::abs(v(lead));
    f.v = v;
    return f;
}

double tau(const ConvexDomain& domain, const Point& z, const Point& v, double eps) {
    if (!(eps > 0.0)) throw Error(ErrorCode::RangeError, "tau requires eps > 0");
    auto m = [&](double t) { return domain.max_increment(z, v, t); };
    double hi = std::sqrt(eps);
    int guard = 0;
    while (m(hi) < eps && guard++ < 200) hi *= 2.0;
    double lo = hi;
    guard = 0;
    while (m(lo) >= eps && guard++ < 2000) lo *= 0.5;
    if (guard >= 2000) return 0.0;
    // bisection on the monotone max-over-phase increment
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (m(mid) < eps)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double delta_in_frame(const KoranyiFrame& frame, const Point& zeta) {
    const auto [a, b] = frame.coords(zeta);
    return std::max(std::abs(a), std::norm(b));
}

double delta(const ConvexDomain& domain, const Point& z, const Point& zeta) {
    if (!domain.in_collar(z) || !domain.in_collar(zeta))
        throw Error(ErrorCode::OutsideCollar, "delta is defined for points of the collar only");
    return delta_in_frame(koranyi_frame(domain, z), zeta);
}

bool in_koranyi_ball(const KoranyiFrame& frame, const Point& zeta, double r) {
    if (!(r > 0.0)) return false;
    const auto [a, b] = frame.coords(zeta);
    return std::abs(a) < r && std::abs(b) < std::sqrt(r);
}

Point sample_shell_point(const ConvexDomain& domain, std::mt19937_64& rng, double rho_lo, double rho_hi) {
    std::uniform_real_distribution<double> u(rho_lo, rho_hi);
    if (domain.quadratic()) {
        const double r = u(rng);
        const Point w = std::sqrt(std::max(0.0, 1.0 + r)) * random_unit(rng);
        return domain.center() + domain.unit_ball_map() * w;
    }
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int attempt = 0; attempt < 1000000; ++attempt) {
        const Point p = domain.center() + domain.bbox_radius() * std::pow(u01(rng), 0.25) * random_unit(rng);
        const double r = domain.rho(p);
        if (r >= rho_lo && r <= rho_hi) return p;
    }
    throw Error(ErrorCode::CollarExhausted, "no sample found in the requested rho shell");
}

Point project_to_level(const ConvexDomain& domain, const Point& z, const Point& dir, double level) {
    const double r0 = domain.rho(z) - level;
    const double b = std::real(bilin(domain.grad(z), dir));
    double t = 0.0;
    if (domain.quadratic()) {
        const double q = std::real(herm(dir, domain.matrix() * dir));
        const double disc = b * b - q * r0;
        if (disc < 0.0) throw Error(ErrorCode::CollarExhausted, "projection line misses the level set");
        const double s = std::sqrt(disc);
        // root of q t^2 + 2 b t + r0 closest to 0
        t = (b >= 0.0) ? -r0 / (b + s) : -r0 / (b - s);
        if (!std::isfinite(t)) t = (-b + s) / q;
    }
    Point p = z + t * dir;
    for (int it = 0; it < 60; ++it) {
        const double f = domain.rho(p) - level;
        if (std::abs(f) <= 1e-15) break;
        const double df = 2.0 * std::real(bilin(domain.grad(p), dir));
        if (std::abs(df) < 1e-300) throw Error(ErrorCode::CollarExhausted, "projection stalled");
        const double step = f / df;
        t -= step;
        p = z + t * dir;
        if (std::abs(step) <= 1e-16 * (1.0 + std::abs(t))) break;
    }
    if (std::abs(domain.rho(p) - level) > 1e-10) throw Error(ErrorCode::CollarExhausted, "projection did not converge");
    return p;
}

QuasiMetricProbe quasi_metric_probe(const ConvexDomain& domain, int samples, std::uint64_t seed) {
    if (samples < 100) throw Error(ErrorCode::RangeError, "quasi_metric_probe needs at least 100 samples");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ulog(-4.0, -1.0);
    QuasiMetricProbe out;
    const double lo = -0.9 * domain.collar();
    const double hi = -1e-3 * domain.collar();
    int done = 0;
    while (done < samples) {
        const Point z = sample_shell_point(domain, rng, lo, hi);
        const KoranyiFrame fz = koranyi_frame(domain, z);
        const double r1 = std::pow(10.0, ulog(rng));
        const Point xi = fz.point(random_in_disc(rng, r1), random_in_disc(rng, std::sqrt(r1)));
        if (!domain.in_collar(xi)) continue;
        const KoranyiFrame fx = koranyi_frame(domain, xi);
        const double r2 = std::pow(10.0, ulog(rng));
        const Point zeta = fx.point(random_in_disc(rng, r2), random_in_disc(rng, std::sqrt(r2)));
        if (!domain.in_collar(zeta)) continue;
        const KoranyiFrame fzeta = koranyi_frame(domain, zeta);

        const double d_z_zeta = delta_in_frame(fz, zeta);
        const double d_zeta_z = delta_in_frame(fzeta, z);
        const double d_z_xi = delta_in_frame(fz, xi);
        const double d_xi_zeta = delta_in_frame(fx, zeta);
        if (d_zeta_z > 0.0) out.c1_sym = std::max(out.c1_sym, d_z_zeta / d_zeta_z);
        if (d_z_xi + d_xi_zeta > 0.0) out.c1_tri = std::max(out.c1_tri, d_z_zeta / (d_z_xi + d_xi_zeta));
        if (d_z_xi > 0.0) out.c1_rho = std::max(out.c1_rho, std::abs(domain.rho(z) - domain.rho(xi)) / d_z_xi);
        ++done;
    }
    out.samples = done;
    return out;
}

// ---------------------------------------------------------------------------
// kappa-covering

void KappaCovering::reindex() {
    offsets.assign(1, 0);
    for (const auto& lv : levels) offsets.push_back(offsets.back() + lv.centers.size());
}

std::pair<int, int> KappaCovering::locate(std::size_t flat) const {
    const auto it = std::upper_bound(offsets.begin(), offsets.end(), flat);
    const int lv = static_cast<int>(std::distance(offsets.begin(), it)) - 1;
    return {lv, static_cast<int>(flat - offsets[lv])};
}

const Point& KappaCovering::center(std::size_t flat) const {
    const auto [lv, k] = locate(flat);
    return levels[lv].centers[k];
}

double KappaCovering::center_rho(std::size_t flat) const { return levels[locate(flat).first].value; }

double KappaCovering::ball_radius(std::size_t flat) const {
    return params.kappa * std::abs(center_rho(flat));
}

Point patch_point(const ConvexDomain& domain, const CoveringLevel& level, double a, cplx b) {
    const KoranyiFrame& f = level.patch_frame;
    return project_to_level(domain, f.point(cplx(0.0, a), b), f.eta, level.value);
}

namespace {

struct CellKey {
    long long a, b, c, d;
    bool operator==(const CellKey& o) const { return a == o.a && b == o.b && c == o.c && d == o.d; }
};

struct CellHash {
    std::size_t operator()(const CellKey& k) const noexcept {
        std::uint64_t h = 1469598103934665603ULL;
        for (long long x : {k.a, k.b, k.c, k.d}) {
            h ^= static_cast<std::uint64_t>(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return static_cast<std::size_t>(h);
    }
};

// Euclidean grid on R^4 used for complete neighbour queries.
class EuclidGrid {
public:
    explicit EuclidGrid(double cell) : cell_(cell) {}
    void insert(const Point& p, int id) { cells_[key(p)].push_back(id); }
    template <class F>
    void visit(const Point& p, F&& f) const {
        const CellKey k = key(p);
        for (long long i = -1; i <= 1; ++i)
            for (long long j = -1; j <= 1; ++j)
                for (long long m = -1; m <= 1; ++m)
                    for (long long n = -1; n <= 1; ++n) {
                        const auto it = cells_.find({k.a + i, k.b + j, k.c + m, k.d + n});
                        if (it == cells_.end()) continue;
                        for (int id : it->second) f(id);
                    }
    }

private:
    CellKey key(const Point& p) const {
        return {static_cast<long long>(std::floor(p(0).real() / cell_)),
                static_cast<long long>(std::floor(p(0).imag() / cell_)),
                static_cast<long long>(std::floor(p(1).real() / cell_)),
                static_cast<long long>(std::floor(p(1).imag() / cell_))};
    }
    double cell_;
    std::unordered_map<CellKey, std::vector<int>, CellHash> cells_;
};

}  // namespace

KappaCovering build_kappa_covering(const ConvexDomain& domain, const CoveringParams& params) {
    if (!(params.kappa > 0.0 && params.kappa <= 0.1)) throw Error(ErrorCode::RangeError, "kappa must lie in (0, 0.1]");
    if (!(params.c_sep > 0.0) || params.c_sep * params.kappa >= 1.0)
        throw Error(ErrorCode::RangeError, "c_sep * kappa must lie in (0, 1)");
    if (!(params.eps0 > 0.0) || !(params.level_floor > 0.0) || params.level_floor > params.eps0)
        throw Error(ErrorCode::RangeError, "need 0 < level_floor <= eps0");
    if (params.eps0 >= domain.collar())
        throw Error(ErrorCode::CollarExhausted, "level -eps0 lies outside the declared collar");

    KappaCovering cov;
    cov.params = params;
    const double ratio = 1.0 - params.c_sep * params.kappa;
    const KoranyiFrame focus_frame = koranyi_frame(domain, params.focus);
    const double rp = params.patch_radius;
    const double density = std::max(1, params.grid_density);

    for (int j = 0;; ++j) {
        const double depth = std::pow(ratio, j) * params.eps0;
        if (depth < params.level_floor) break;
        CoveringLevel lv;
        lv.j = j;
        lv.value = -depth;
        lv.separation = params.c_sep * params.kappa * depth;
        lv.patch_frame = koranyi_frame(domain, project_to_level(domain, params.focus, focus_frame.eta, lv.value));
        const double s = lv.separation;
        const double rs = std::sqrt(s);
        const double ha = s / density;
        const double hb = rs / density;
        // grids span the closed patch so its edges are sampled as well
        const int na = static_cast<int>(std::ceil(rp / ha));
        const int nb = static_cast<int>(std::ceil(std::sqrt(rp) / hb));
        const double step_a = na > 0 ? rp / na : 0.0;
        const double step_b = nb > 0 ? std::sqrt(rp) / nb : 0.0;

        // candidate hash on patch parameters (a, Re b, Im b); the a-range
        // absorbs the twist of the level set between nearby frames
        std::unordered_map<CellKey, std::vector<int>, CellHash> cells;
        std::vector<KoranyiFrame> frames;
        const long long reach_a = 1 + static_cast<long long>(std::ceil(4.0 * std::sqrt(2.0 * rp / s)));
        auto key_of = [&](double a, cplx b) {
            return CellKey{static_cast<long long>(std::floor(a / s)), static_cast<long long>(std::floor(b.real() / rs)),
                           static_cast<long long>(std::floor(b.imag() / rs)), 0};
        };
        // Returns (covered, insertable) for a candidate against accepted centers.
        auto inspect = [&](const Point& x, const KoranyiFrame& fx, const CellKey& k) {
            bool covered = false;
            bool insertable = true;
            // nearest cells first so rejections exit early
            for (long long m = 0; m <= 2 * reach_a; ++m)
                for (long long db = -2; db <= 2; ++db)
                    for (long long dc = -2; dc <= 2; ++dc) {
                        const long long da = (m % 2 == 0) ? m / 2 : -(m + 1) / 2;
                        const auto it = cells.find({k.a + da, k.b + db, k.c + dc, 0});
                        if (it == cells.end()) continue;
                        for (int id : it->second) {
                            const double d_xc = delta_in_frame(fx, lv.centers[id]);
                            if (d_xc < s) covered = true;
                            if (std::min(d_xc, delta_in_frame(frames[id], x)) < s) insertable = false;
                            if (covered && !insertable) return std::pair{covered, insertable};
                        }
                    }
            return std::pair{covered, insertable};
        };
        auto accept = [&](const Point& x, const KoranyiFrame& fx, const CellKey& k) {
            cells[k].push_back(static_cast<int>(lv.centers.size()));
            lv.centers.push_back(x);
            frames.push_back(fx);
        };
        // Greedy maximal packing on the grid.
        auto grid_point = [&](double a, cplx b) {
            const Point x = patch_point(domain, lv, a, b);
            return std::pair{x, koranyi_frame(domain, x)};
        };
        // The base grid is followed by its half-step shifts, which fill the
        // holes a maximal packing on the base grid leaves between nodes.
        for (int shift = 0; shift < 8; ++shift) {
            const double oa = (shift & 1) ? 0.5 : 0.0;
            const double obr = (shift & 2) ? 0.5 : 0.0;
            const double obi = (shift & 4) ? 0.5 : 0.0;
            for (int ia = -na; ia <= na; ++ia)
                for (int ibr = -nb; ibr <= nb; ++ibr)
                    for (int ibi = -nb; ibi <= nb; ++ibi) {
                        const double a = std::clamp((ia + oa) * step_a, -rp, rp);
                        const cplx b(std::clamp((ibr + obr) * step_b, -std::sqrt(rp), std::sqrt(rp)),
                                     std::clamp((ibi + obi) * step_b, -std::sqrt(rp), std::sqrt(rp)));
                        const auto [x, fx] = grid_point(a, b);
                        const CellKey k = key_of(a, b);
                        if (inspect(x, fx, k).second) accept(x, fx, k);
                    }
        }
        // patch edges at a finer step; corner holes escape the face probes
        {
            const double sq = std::sqrt(rp);
            const int ea = 4 * na, eb = 4 * nb;
            auto edge = [&](double a, cplx b) {
                const auto [x, fx] = grid_point(a, b);
                const CellKey k = key_of(a, b);
                if (inspect(x, fx, k).second) accept(x, fx, k);
            };
            for (int sa : {-1, 1})
                for (int sb : {-1, 1}) {
                    for (int i = -ea; i <= ea; ++i) {
                        const double a = ea > 0 ? rp * i / ea : 0.0;
                        edge(a, cplx(sa * sq, sb * sq));
                    }
                    for (int i = -eb; i <= eb; ++i) {
                        const double t = eb > 0 ? sq * i / eb : 0.0;
                        edge(sa * rp, cplx(sb * sq, t));
                        edge(sa * rp, cplx(t, sb * sq));
                    }
                }
        }
        // Holes left between grid nodes touch some ball boundary, so probe
        // just outside every accepted ball (new centers included).
        const double sq = std::sqrt(rp);
        for (std::size_t id = 0; id < lv.centers.size(); ++id) {
            const KoranyiFrame fc = frames[id];
            auto probe = [&](double t, cplx b) {
                Point x = project_to_level(domain, fc.point(cplx(0.0, t), b), fc.eta, lv.value);
                auto [pa, pb] = lv.patch_frame.coords(x);
                double a = pa.imag();
                // probes past the patch edge are pulled back onto it
                if (std::abs(a) > rp || std::abs(pb.real()) > sq || std::abs(pb.imag()) > sq) {
                    a = std::clamp(a, -rp, rp);
                    pb = cplx(std::clamp(pb.real(), -sq, sq), std::clamp(pb.imag(), -sq, sq));
                    x = patch_point(domain, lv, a, pb);
                }
                const KoranyiFrame fx = koranyi_frame(domain, x);
                const CellKey k = key_of(a, pb);
                if (inspect(x, fx, k).second) accept(x, fx, k);
            };
            constexpr double out = 1.0 + 1e-6;
            constexpr int nang = 16;
            for (int m = 0; m < nang; ++m) {
                const cplx dir = std::polar(1.0, 2.0 * pi * m / nang);
                for (int r = 0; r <= 4; ++r) {
                    probe(s * (r - 2) / 2.0, out * rs * dir);
                    probe(out * s, rs * r / 4.0 * dir);
                    probe(-out * s, rs * r / 4.0 * dir);
                }
            }
        }
        cov.levels.push_back(std::move(lv));
    }
    cov.reindex();
    return cov;
}

CoveringReport verify_covering(const KappaCovering& covering, const ConvexDomain& domain, int probe_samples,
                               std::uint64_t seed, int overlap_limit) {
    constexpr double probe_shrink = 0.95;
    CoveringReport rep;
    rep.overlap_limit = overlap_limit;
    rep.centers = covering.size();
    const double kappa = covering.params.kappa;
    const double rp = covering.params.patch_radius;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);

    const std::size_t nl = covering.levels.size();
    std::vector<EuclidGrid> grids;
    std::vector<std::vector<KoranyiFrame>> frames(nl);
    grids.reserve(nl);
    for (std::size_t i = 0; i < nl; ++i) {
        const auto& lv = covering.levels[i];
        const double s = lv.separation;
        const double r4 = 4.0 * kappa * std::abs(lv.value);
        const double big = std::max(s, r4);
        grids.emplace_back(1.01 * std::sqrt(big * big + big));
        for (std::size_t k = 0; k < lv.centers.size(); ++k) {
            grids.back().insert(lv.centers[k], static_cast<int>(k));
            frames[i].push_back(koranyi_frame(domain, lv.centers[k]));
        }
    }

    // (i) level membership, (ii) separation, inclusion of the 4 kappa ball
    for (std::size_t i = 0; i < nl; ++i) {
        const auto& lv = covering.levels[i];
        const double s = lv.separation;
        for (std::size_t k = 0; k < lv.centers.size(); ++k) {
            const Point& c = lv.centers[k];
            const double err = std::abs(domain.rho(c) - lv.value);
            if (err > 1e-9) rep.violations.push_back({"level", lv.j, static_cast<int>(k), -1, err, 1e-9});
            grids[i].visit(c, [&](int other) {
                if (other <= static_cast<int>(k)) return;
                const double d = std::min(delta_in_frame(frames[i][k], lv.centers[other]),
                                          delta_in_frame(frames[i][other], c));
                if (d < s) rep.violations.push_back({"separation", lv.j, static_cast<int>(k), other, d, s});
            });
            const double r4 = 4.0 * kappa * std::abs(lv.value);
            double worst = -std::numeric_limits<double>::infinity();
            constexpr int nph = 12;
            for (int p = 0; p < nph; ++p)
                for (int q = 0; q < nph; ++q) {
                    const Point x = frames[i][k].point(std::polar(r4, 2.0 * pi * p / nph),
                                                       std::polar(std::sqrt(r4), 2.0 * pi * q / nph));
                    worst = std::max(worst, domain.rho(x));
                }
            if (worst >= 0.0) rep.violations.push_back({"inclusion", lv.j, static_cast<int>(k), -1, worst, 0.0});
        }
    }

    auto multiplicity = [&](const Point& z, double rz) {
        std::pair<int, int> m{0, 0};
        for (std::size_t i = 0; i < nl; ++i) {
            const auto& lv = covering.levels[i];
            if (std::abs(rz - lv.value) > std::max(0.5, 6.0 * kappa) * std::abs(lv.value)) continue;
            const double r = kappa * std::abs(lv.value);
            grids[i].visit(z, [&](int id) {
                if (in_koranyi_ball(frames[i][id], z, r)) ++m.first;
                if (in_koranyi_ball(frames[i][id], z, 4.0 * r)) ++m.second;
            });
        }
        return m;
    };

    // (iii) coverage on each level, plus pointwise overlap
    for (std::size_t i = 0; i < nl; ++i) {
        const auto& lv = covering.levels[i];
        const double s = lv.separation;
        for (int p = 0; p < probe_samples; ++p) {
            // the outer 5% of the patch is a truncation artifact: a full
            // covering would have centers beyond the patch edge
            const double pr = probe_shrink * rp, pb = probe_shrink * std::sqrt(rp);
            const Point z = patch_point(domain, lv, pr * u(rng), cplx(pb * u(rng), pb * u(rng)));
            const KoranyiFrame fz = koranyi_frame(domain, z);
            double best = std::numeric_limits<double>::infinity();
            grids[i].visit(z, [&](int id) { best = std::min(best, delta_in_frame(fz, lv.centers[id])); });
            ++rep.probes;
            if (!(best < s)) rep.violations.push_back({"coverage", lv.j, -1, -1, best, s});
            const auto m = multiplicity(z, lv.value);
            rep.overlap_max = std::max(rep.overlap_max, m.first);
            rep.overlap_4kappa_max = std::max(rep.overlap_4kappa_max, m.second);
        }
    }
    // off-level probes of the covered region
    if (nl > 0) {
        for (int p = 0; p < probe_samples * static_cast<int>(nl); ++p) {
            const Point z = sample_covered_point(covering, domain, rng);
            const auto m = multiplicity(z, domain.rho(z));
            ++rep.offlevel_probes;
            if (m.first == 0) ++rep.offlevel_uncovered;
            rep.overlap_max = std::max(rep.overlap_max, m.first);
            rep.overlap_4kappa_max = std::max(rep.overlap_4kappa_max, m.second);
        }
    }
    if (rep.overlap_max > overlap_limit)
        rep.violations.push_back({"overlap", -1, -1, -1, static_cast<double>(rep.overlap_max),
                                  static_cast<double>(overlap_limit)});
    return rep;
}

Point sample_covered_point(const KappaCovering& covering, const ConvexDomain& domain, std::mt19937_64& rng,
                           double shrink) {
    if (covering.levels.empty()) throw Error(ErrorCode::UncoveredPoint, "empty covering");
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double top = std::abs(covering.levels.front().value);
    const double bottom = std::abs(covering.levels.back().value);
    const double depth = std::exp(std::log(bottom) + u01(rng) * (std::log(top) - std::log(bottom)));
    std::size_t best = 0;
    for (std::size_t i = 1; i < covering.levels.size(); ++i)
        if (std::abs(std::abs(covering.levels[i].value) - depth) < std::abs(std::abs(covering.levels[best].value) - depth))
            best = i;
    const auto& lv = covering.levels[best];
    const double rp = covering.params.patch_radius * shrink;
    const KoranyiFrame& f = lv.patch_frame;
    const Point guess = f.point(cplx(0.0, rp * u(rng)), cplx(std::sqrt(rp) * u(rng), std::sqrt(rp) * u(rng)));
    return project_to_level(domain, guess, f.eta, -depth);
}

void write_covering_csv(std::ostream& out, const KappaCovering& covering, const ConvexDomain& domain) {
    out << "j,k,z1re,z1im,z2re,z2im,rho,level\n";
    out.precision(17);
    for (const auto& lv : covering.levels) {
        for (std::size_t k = 0; k < lv.centers.size(); ++k) {
            const Point& c = lv.centers[k];
            out << lv.j << ',' << k << ',' << c(0).real() << ',' << c(0).imag() << ',' << c(1).real() << ','
                << c(1).imag() << ',' << domain.rho(c) << ',' << lv.value << '\n';
        }
    }
}

KappaCovering read_covering_csv(std::istream& in, const ConvexDomain& domain, const CoveringParams& params) {
    KappaCovering cov;
    cov.params = params;
    std::string line;
    std::getline(in, line);
    if (line.rfind("j,k,z1re", 0) != 0) throw Error(ErrorCode::SchemaError, "covering csv header");
    std::map<int, CoveringLevel> by_level;
    const double ratio = 1.0 - params.c_sep * params.kappa;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> v;
        while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
        if (v.size() != 8) throw Error(ErrorCode::SchemaError, "covering csv row needs 8 columns");
        const int j = static_cast<int>(v[0]);
        auto& lv = by_level[j];
        lv.j = j;
        lv.value = v[7];
        lv.separation = params.c_sep * params.kappa * std::pow(ratio, j) * params.eps0;
        lv.centers.push_back(make_point({v[2], v[3]}, {v[4], v[5]}));
    }
    const KoranyiFrame ff = koranyi_frame(domain, params.focus);
    for (auto& [j, lv] : by_level) {
        lv.patch_frame = koranyi_frame(domain, project_to_level(domain, params.focus, ff.eta, lv.value));
        cov.levels.push_back(std::move(lv));
    }
    cov.reindex();
    return cov;
}

}  // namespace holodiv

#include "holodiv/varieties.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace holodiv {

namespace {

// Roots beyond this modulus come from near-vanishing leading coefficients and
// are never tracked.
constexpr double kFarRoot = 1e4;

double max_abs(const UniPoly& p) {
    double m = 0.0;
    for (cplx c : p) m = std::max(m, std::abs(c));
    return m;
}

// sum_j |c_j| j!/(j-k)! |x|^(j-k)
double abs_derivative_scale(const UniPoly& p, int k, double x) {
    double s = 0.0;
    for (std::size_t j = static_cast<std::size_t>(k); j < p.size(); ++j) {
        double f = 1.0;
        for (int t = 0; t < k; ++t) f *= static_cast<double>(j - t);
        s += std::abs(p[j]) * f * std::pow(x, static_cast<double>(j - k));
    }
    return s;
}

bool is_multiple_root(const UniPoly& p, cplx x, int m) {
    UniPoly d = p;
    const double ax = std::abs(x);
    for (int k = 0; k < m; ++k) {
        const double tol = k == 0 ? 1e-14 : 1e-12;
        if (std::abs(horner(d, x)) > tol * abs_derivative_scale(p, k, ax)) return false;
        d = derivative(d);
    }
    return true;
}

std::vector<cplx> raw_roots(const UniPoly& p) {
    const int n = static_cast<int>(p.size()) - 1;
    if (n <= 0) return {};
    if (n == 1) return {-p[0] / p[1]};
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) comp(i, n - 1) = -p[i] / p[n];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
    std::vector<cplx> out(n);
    for (int i = 0; i < n; ++i) out[i] = es.eigenvalues()(i);
    return out;
}

void newton_polish(const UniPoly& p, cplx& x) {
    const UniPoly dp = derivative(p);
    double best = std::abs(horner(p, x));
    for (int it = 0; it < 4 && best > 0.0; ++it) {
        const cplx d = horner(dp, x);
        if (d == cplx(0.0)) return;
        const cplx y = x - horner(p, x) / d;
        const double v = std::abs(horner(p, y));
        if (!(v < best)) return;
        x = y;
        best = v;
    }
}

bool lex_less(cplx a, cplx b) { return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag()); }

struct Matching {
    std::vector<cplx> values;
    double max_jump = 0.0;
};

// Greedy one-to-one assignment of previous labeled values to new roots,
// closest pairs first.
Matching match_roots(const std::vector<cplx>& prev, const std::vector<cplx>& roots) {
    const std::size_t n = prev.size();
    std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
    pairs.reserve(n * roots.size());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < roots.size(); ++j) pairs.emplace_back(std::abs(prev[i] - roots[j]), i, j);
    std::sort(pairs.begin(), pairs.end());
    std::vector<char> used_i(n, 0), used_j(roots.size(), 0);
    Matching m;
    m.values.assign(n, cplx(0.0));
    for (const auto& [d, i, j] : pairs) {
        if (used_i[i] || used_j[j]) continue;
        used_i[i] = used_j[j] = 1;
        m.values[i] = roots[j];
        m.max_jump = std::max(m.max_jump, d);
    }
    return m;
}

std::vector<cplx> tracked_roots(const HoloPoly& f, const KoranyiFrame& frame, cplx z1s) {
    const UniPoly p = fiber_poly(f, frame, z1s);
    if (max_abs(p) == 0.0) throw Error(ErrorCode::IdenticallyZeroFiber, "f vanishes on the whole fiber line");
    std::vector<cplx> r = poly_roots(p);
    r.erase(std::remove_if(r.begin(), r.end(), [](cplx x) { return std::abs(x) > kFarRoot; }), r.end());
    return r;
}

}  // namespace

std::vector<cplx> poly_roots(UniPoly p) {
    trim(p, 1e-14);
    if (p.size() <= 1) return {};
    // exact zero roots
    std::size_t zeros = 0;
    while (zeros < p.size() && p[zeros] == cplx(0.0)) ++zeros;
    UniPoly q(p.begin() + static_cast<std::ptrdiff_t>(zeros), p.end());
    std::vector<cplx> r = raw_roots(q);
    for (cplx& x : r) newton_polish(q, x);

    // merge numerically multiple roots
    double scale = 0.0;
    for (cplx x : r) scale = std::max(scale, std::abs(x));
    const double gate = 1e-4 * std::max(scale, 1e-300);
    std::vector<int> group(r.size(), -1);
    int ng = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (group[i] >= 0) continue;
        group[i] = ng;
        std::vector<std::size_t> stack{i};
        while (!stack.empty()) {
            const std::size_t a = stack.back();
            stack.pop_back();
            for (std::size_t b = 0; b < r.size(); ++b)
                if (group[b] < 0 && std::abs(r[a] - r[b]) <= gate) {
                    group[b] = ng;
                    stack.push_back(b);
                }
        }
        ++ng;
    }
    for (int g = 0; g < ng; ++g) {
        std::vector<std::size_t> idx;
        cplx mean = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i)
            if (group[i] == g) {
                idx.push_back(i);
                mean += r[i];
            }
        if (idx.size() < 2) continue;
        mean /= static_cast<double>(idx.size());
        if (is_multiple_root(q, mean, static_cast<int>(idx.size())))
            for (std::size_t i : idx) r[i] = mean;
    }
    r.insert(r.end(), zeros, cplx(0.0));
    std::sort(r.begin(), r.end(), lex_less);
    return r;
}

std::vector<int> root_multiplicities(const std::vector<cplx>& roots) {
    std::vector<int> m(roots.size(), 0);
    for (std::size_t i = 0; i < roots.size(); ++i)
        for (std::size_t j = 0; j < roots.size(); ++j)
            if (roots[i] == roots[j]) ++m[i];
    return m;
}

UniPoly fiber_poly(const HoloPoly& f, const KoranyiFrame& frame, cplx z1s) {
    return restrict_to_line(f, frame.point(z1s, 0.0), frame.v);
}

std::vector<cplx> fiber_roots(const HoloPoly& f, const KoranyiFrame& frame, cplx z1s, double window) {
    const UniPoly p = fiber_poly(f, frame, z1s);
    if (max_abs(p) == 0.0) throw Error(ErrorCode::IdenticallyZeroFiber, "f vanishes on the whole fiber line");
    std::vector<cplx> r = poly_roots(p);
    r.erase(std::remove_if(r.begin(), r.end(), [&](cplx x) { return !(std::abs(x) < window); }), r.end());
    return r;
}

RootCurves track_roots(const HoloPoly& f, const KoranyiFrame& frame, const std::vector<cplx>& path) {
    RootCurves out;
    out.samples = path;
    if (path.empty()) return out;

    std::vector<std::vector<cplx>> roots(path.size());
    for (std::size_t s = 0; s < path.size(); ++s) roots[s] = tracked_roots(f, frame, path[s]);

    // spacing h, derivative bound D over simple roots
    const HoloPoly f1 = f.d1();
    const HoloPoly f2 = f.d2();
    double h = 0.0, dmax = 0.0, amax = 0.0;
    for (std::size_t s = 0; s < path.size(); ++s) {
        if (s > 0) h = std::max(h, std::abs(path[s] - path[s - 1]));
        const auto mult = root_multiplicities(roots[s]);
        for (std::size_t i = 0; i < roots[s].size(); ++i) {
            amax = std::max(amax, std::abs(roots[s][i]));
            if (mult[i] > 1) continue;
            const Point z = frame.point(path[s], roots[s][i]);
            const Point grad = make_point(f1(z), f2(z));
            const cplx dl = bilin(grad, frame.v);
            if (dl == cplx(0.0)) continue;
            dmax = std::max(dmax, std::abs(bilin(grad, frame.eta) / dl));
        }
    }
    const double floor_tol = 1e-13 * amax;
    out.collision_tol = h * dmax + floor_tol;
    out.track_tol = 10.0 * h * dmax + 1e3 * floor_tol;

    out.values.push_back(roots[0]);
    out.multiplicity = root_multiplicities(roots[0]);
    const std::size_t n = roots[0].size();
    for (std::size_t s = 1; s < path.size(); ++s) {
        if (roots[s].size() != n)
            throw Error(ErrorCode::BranchCollision, "fiber root count changes along the tracked path");
        const auto& prev = out.values.back();
        Matching m = match_roots(prev, roots[s]);
        out.max_jump = std::max(out.max_jump, m.max_jump);
        if (m.max_jump > out.track_tol)
            throw Error(ErrorCode::BranchCollision, "root curve jump exceeds track_tol; refine the sampling");
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (prev[i] != prev[j] && std::abs(m.values[i] - m.values[j]) < out.collision_tol)
                    throw Error(ErrorCode::BranchCollision, "two root curves meet near z1* = " +
                                                                std::to_string(path[s].real()) + "+" +
                                                                std::to_string(path[s].imag()) + "i");
        out.values.push_back(std::move(m.values));
    }
    return out;
}

RootCurves track_disc(const HoloPoly& f, const KoranyiFrame& frame, double radius, int rings, int rays) {
    if (rings < 1 || rays < 1) throw Error(ErrorCode::RangeError, "track_disc needs rings, rays >= 1");
    std::vector<double> t(rings);
    for (int m = 1; m <= rings; ++m) t[m - 1] = static_cast<double>(m) / rings;
    // sample the open inner disc |z1*| < radius/2 up to its edge
    bool inner_edge = false;
    for (double& x : t)
        if (std::abs(x - 0.5) < 1e-12) {
            x = 0.4999;
            inner_edge = true;
        }
    if (!inner_edge) {
        t.push_back(0.4999);
        std::sort(t.begin(), t.end());
    }

    RootCurves out;
    for (int a = 0; a < rays; ++a) {
        const cplx dir = std::polar(1.0, 2.0 * pi * a / rays);
        std::vector<cplx> path{cplx(0.0)};
        for (double x : t) path.push_back(radius * x * dir);
        RootCurves ray = track_roots(f, frame, path);
        if (a == 0) {
            out = std::move(ray);
            continue;
        }
        out.samples.insert(out.samples.end(), ray.samples.begin() + 1, ray.samples.end());
        out.values.insert(out.values.end(), ray.values.begin() + 1, ray.values.end());
        out.collision_tol = std::max(out.collision_tol, ray.collision_tol);
        out.track_tol = std::max(out.track_tol, ray.track_tol);
        out.max_jump = std::max(out.max_jump, ray.max_jump);
    }
    return out;
}

std::vector<int> select_index_set(const RootCurves& curves, double kappa, double rho_z) {
    const double disc = kappa * std::abs(rho_z);
    const double bound = std::sqrt(2.0 * kappa * std::abs(rho_z));
    std::vector<int> out;
    for (std::size_t i = 0; i < curves.count(); ++i)
        for (std::size_t s = 0; s < curves.samples.size(); ++s)
            if (std::abs(curves.samples[s]) < disc && std::abs(curves.values[s][i]) < bound) {
                out.push_back(static_cast<int>(i));
                break;
            }
    return out;
}

WeierstrassSplit::WeierstrassSplit(HoloPoly f, KoranyiFrame frame, RootCurves curves, std::vector<int> index_set)
    : f_(std::move(f)), frame_(std::move(frame)), curves_(std::move(curves)), index_set_(std::move(index_set)) {
    for (int i : index_set_)
        if (i < 0 || static_cast<std::size_t>(i) >= curves_.count())
            throw Error(ErrorCode::RangeError, "index set refers to an untracked curve");
}

WeierstrassSplit::Fiber WeierstrassSplit::fiber(cplx z1s) const {
    Fiber fb;
    fb.z1s = z1s;
    fb.fiber = fiber_poly(f_, frame_, z1s);
    trim(fb.fiber, 1e-14);
    if (fb.fiber.empty()) throw Error(ErrorCode::IdenticallyZeroFiber, "f vanishes on the whole fiber line");
    if (!index_set_.empty()) {
        std::size_t best = 0;
        for (std::size_t s = 1; s < curves_.samples.size(); ++s)
            if (std::abs(curves_.samples[s] - z1s) < std::abs(curves_.samples[best] - z1s)) best = s;
        std::vector<cplx> roots = poly_roots(fb.fiber);
        roots.erase(std::remove_if(roots.begin(), roots.end(), [](cplx x) { return std::abs(x) > kFarRoot; }),
                    roots.end());
        if (roots.size() != curves_.count())
            throw Error(ErrorCode::BranchCollision, "fiber root count differs from the tracked curves");
        fb.labeled = match_roots(curves_.values[best], roots).values;
        for (int i : index_set_) fb.alpha.push_back(fb.labeled[i]);
    }
    fb.q = deflate(fb.fiber, fb.alpha);
    return fb;
}

cplx WeierstrassSplit::P(const Fiber& fb, cplx z2s) const {
    cplx p = 1.0;
    for (cplx a : fb.alpha) p *= z2s - a;
    return p;
}

cplx WeierstrassSplit::Q(const Fiber& fb, cplx z2s) const { return horner(fb.q, z2s); }

namespace {

struct SplitStats {
    double min_q = std::numeric_limits<double>::infinity();
    double max_q = 0.0;
    double residual = 0.0;
};

SplitStats probe_split(const WeierstrassSplit& sp, double radius, const FactorizationConfig& cfg) {
    SplitStats st;
    std::vector<double> frac;
    for (int a = 0; a < cfg.probe_radial; ++a) frac.push_back(static_cast<double>(a) / cfg.probe_radial);
    frac.push_back(0.95);
    auto disc = [&](double r) {
        std::vector<cplx> pts{cplx(0.0)};
        for (std::size_t a = 1; a < frac.size(); ++a)
            for (int b = 0; b < cfg.probe_angular; ++b)
                pts.push_back(std::polar(r * frac[a], 2.0 * pi * (b + 0.5 * a) / cfg.probe_angular));
        return pts;
    };
    const auto z1 = disc(radius);
    const auto z2 = disc(std::sqrt(radius));
    for (cplx a : z1) {
        const auto fb = sp.fiber(a);
        for (cplx b : z2) {
            const cplx q = sp.Q(fb, b);
            const cplx fv = sp.f()(sp.frame().point(a, b));
            st.min_q = std::min(st.min_q, std::abs(q));
            st.max_q = std::max(st.max_q, std::abs(q));
            st.residual = std::max(st.residual, std::abs(fv - sp.P(fb, b) * q) / std::max(1.0, std::abs(fv)));
        }
    }
    return st;
}

WeierstrassSplit build_split(const HoloPoly& f, const KoranyiFrame& frame, double kappa, double rho_z,
                             const FactorizationConfig& cfg, SplitStats& st) {
    RootCurves curves = track_disc(f, frame, 2.0 * kappa * std::abs(rho_z), cfg.rings, cfg.rays);
    std::vector<int> index_set = select_index_set(curves, kappa, rho_z);
    WeierstrassSplit sp(f, frame, std::move(curves), std::move(index_set));
    st = probe_split(sp, kappa * std::abs(rho_z), cfg);
    if (st.min_q == 0.0 || st.max_q > cfg.unstable_ratio * st.min_q)
        throw Error(ErrorCode::DeflationUnstable, "|Q| varies by more than " + std::to_string(cfg.unstable_ratio) +
                                                      " across the Koranyi ball");
    return sp;
}

}  // namespace

WeierstrassSplit weierstrass_split(const HoloPoly& f, const KoranyiFrame& frame, double kappa, double rho_z,
                                   const FactorizationConfig& cfg) {
    SplitStats st;
    return build_split(f, frame, kappa, rho_z, cfg, st);
}

FiberFactorization factorize(const HoloPoly& f1, const HoloPoly& f2, const ConvexDomain& domain, const Point& z,
                             double kappa, const FactorizationConfig& cfg) {
    FiberFactorization out;
    out.rho_z = domain.rho(z);
    if (!(out.rho_z < 0.0)) throw Error(ErrorCode::OutsideCollar, "factorization center must lie inside D");
    out.frame = koranyi_frame(domain, z);
    out.kappa = kappa;
    out.radius_1 = kappa * std::abs(out.rho_z);
    const double contour = std::sqrt(4.0 * out.radius_1);
    const HoloPoly* fs[2] = {&f1, &f2};
    for (int l = 0; l < 2; ++l) {
        SplitStats st;
        out.split[l].emplace(build_split(*fs[l], out.frame, kappa, out.rho_z, cfg, st));
        const auto& sp = *out.split[l];
        out.i_count[l] = static_cast<int>(sp.index_set().size());
        int p = 0;
        for (std::size_t i = 0; i < sp.curves().count(); ++i)
            for (const auto& vals : sp.curves().values)
                if (std::abs(vals[i]) < contour) {
                    ++p;
                    break;
                }
        out.p_count[l] = p;
        out.min_abs_q[l] = st.min_q;
        out.max_abs_q[l] = st.max_q;
        out.max_split_residual = std::max(out.max_split_residual, st.residual);
    }
    return out;
}

// ---------------------------------------------------------------------------
// complete intersections

namespace {

// Formal Sylvester matrix of a (degree m) and b (degree n), ascending input.
Eigen::MatrixXcd sylvester(const UniPoly& a, const UniPoly& b) {
    const int m = static_cast<int>(a.size()) - 1;
    const int n = static_cast<int>(b.size()) - 1;
    const int size = m + n;
    Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(size, size);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k <= m; ++k) S(i, i + k) = a[m - k];
    for (int i = 0; i < m; ++i)
        for (int k = 0; k <= n; ++k) S(n + i, i + k) = b[n - k];
    return S;
}

// Coefficients in the eliminated variable at a fixed value of the other one.
UniPoly specialize(const std::vector<UniPoly>& rows, cplx x) {
    UniPoly out(rows.size());
    for (std::size_t j = 0; j < rows.size(); ++j) out[j] = horner(rows[j], x);
    return out;
}

UniPoly normalized(UniPoly p) {
    const double m = max_abs(p);
    if (m > 0.0)
        for (cplx& c : p) c /= m;
    return p;
}

struct Elimination {
    bool shared = false;
    std::optional<Point> witness;
};

// Tests whether f1, f2 share a factor of positive degree in the eliminated
// variable (index `var`). Sylvester rank at three random values of the other
// variable.
Elimination shared_component(const HoloPoly& f1, const HoloPoly& f2, int var) {
    const auto rows1 = var == 1 ? f1.by_z2() : f1.by_z1();
    const auto rows2 = var == 1 ? f2.by_z2() : f2.by_z1();
    Elimination out;
    if (rows1.size() < 2 && rows2.size() < 2) return out;  // degree 0 in var for both
    std::mt19937_64 rng(0x5eed1234ULL + var);
    std::uniform_real_distribution<double> ur(0.5, 1.5), ua(0.0, 2.0 * pi);
    int deficient = 0;
    cplx last_x = 0.0;
    UniPoly last_a, last_b;
    for (int t = 0; t < 3; ++t) {
        const cplx x = std::polar(ur(rng), ua(rng));
        UniPoly a = normalized(specialize(rows1, x));
        UniPoly b = normalized(specialize(rows2, x));
        trim(a, 1e-13);
        trim(b, 1e-13);
        if (a.empty() || b.empty()) {
            ++deficient;  // one function vanishes on the whole line
            last_x = x, last_a = a, last_b = b;
            continue;
        }
        if (a.size() < 2 || b.size() < 2) continue;
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(sylvester(a, b));
        const auto& sv = svd.singularValues();
        if (sv(sv.size() - 1) <= 1e-9 * sv(0)) {
            ++deficient;
            last_x = x, last_a = a, last_b = b;
        }
    }
    if (deficient < 3) return out;
    out.shared = true;
    // common root of the two specializations
    const UniPoly& src = last_a.size() >= 2 ? last_a : last_b;
    const UniPoly& other = &src == &last_a ? last_b : last_a;
    cplx best = 0.0;
    double best_v = std::numeric_limits<double>::infinity();
    for (cplx r : poly_roots(src)) {
        const double v = other.empty() ? 0.0 : std::abs(horner(other, r));
        if (v < best_v) best_v = v, best = r;
    }
    out.witness = var == 1 ? make_point(last_x, best) : make_point(best, last_x);
    return out;
}

// Resultant in z2 as a polynomial in z1, by interpolation on the unit circle.
UniPoly resultant_z2(const HoloPoly& f1, const HoloPoly& f2) {
    const auto rows1 = f1.by_z2();
    const auto rows2 = f2.by_z2();
    const int m = static_cast<int>(rows1.size()) - 1;
    const int n = static_cast<int>(rows2.size()) - 1;
    const int bound = n * std::max(0, f1.degree_z1()) + m * std::max(0, f2.degree_z1());
    const int N = bound + 1;
    std::vector<cplx> vals(N);
    for (int k = 0; k < N; ++k) {
        const cplx x = std::polar(1.0, 2.0 * pi * k / N);
        const Eigen::MatrixXcd S = sylvester(specialize(rows1, x), specialize(rows2, x));
        vals[k] = S.size() == 0 ? cplx(1.0) : S.fullPivLu().determinant();
    }
    UniPoly c(N, cplx(0.0));
    for (int j = 0; j < N; ++j) {
        for (int k = 0; k < N; ++k) c[j] += vals[k] * std::polar(1.0, -2.0 * pi * j * k / N);
        c[j] /= static_cast<double>(N);
    }
    const double mx = max_abs(c);
    for (cplx& x : c)
        if (std::abs(x) <= 1e-11 * mx) x = 0.0;
    return c;
}

// Newton on (f1, f2); returns the final point.
Point newton2(const HoloPoly& f1, const HoloPoly& f2, Point z) {
    const HoloPoly a1 = f1.d1(), a2 = f1.d2(), b1 = f2.d1(), b2 = f2.d2();
    for (int it = 0; it < 300; ++it) {
        const Eigen::Vector2cd F(f1(z), f2(z));
        if (F.norm() == 0.0) break;
        Eigen::Matrix2cd J;
        J << a1(z), a2(z), b1(z), b2(z);
        const Eigen::Vector2cd step = J.completeOrthogonalDecomposition().solve(F);
        if (!step.allFinite() || step.norm() == 0.0) break;
        z -= step;
        if (step.norm() < 1e-17 * std::max(1.0, z.norm())) break;
    }
    return z;
}

}  // namespace

IntersectionResult complete_intersection_check(const HoloPoly& f1, const HoloPoly& f2) {
    if (f1.is_zero() || f2.is_zero()) throw Error(ErrorCode::RangeError, "complete_intersection_check needs nonzero f1, f2");
    IntersectionResult out;
    for (int var : {1, 0}) {
        Elimination e = shared_component(f1, f2, var);
        if (e.shared) {
            out.complete = false;
            out.witness = e.witness;
            return out;
        }
    }
    out.complete = true;

    // candidates z1 from the resultant, z2 from the fibers of whichever
    // function depends on z2
    UniPoly res = resultant_z2(f1, f2);
    trim(res);
    std::vector<cplx> z1c = poly_roots(res);
    const auto rows = f1.degree_z2() >= 1 ? f1.by_z2() : f2.by_z2();
    std::vector<Point> found;
    for (cplx x : z1c) {
        UniPoly fib = specialize(rows, x);
        trim(fib, 1e-12);
        for (cplx y : poly_roots(fib)) {
            const Point z = newton2(f1, f2, make_point(x, y));
            if (!z.allFinite()) continue;
            const double r1 = std::abs(f1(z)) / std::max(1.0, f1.abs_eval(z));
            const double r2 = std::abs(f2(z)) / std::max(1.0, f2.abs_eval(z));
            if (r1 > 1e-10 || r2 > 1e-10) continue;
            bool dup = false;
            for (const Point& p : found)
                if ((p - z).norm() < 1e-4 * std::max(1.0, z.norm())) dup = true;
            if (!dup) found.push_back(z);
        }
    }
    std::sort(found.begin(), found.end(), [](const Point& a, const Point& b) {
        if (a(0) != b(0)) return lex_less(a(0), b(0));
        return lex_less(a(1), b(1));
    });
    out.common_zeros = std::move(found);
    return out;
}

}  // namespace holodiv

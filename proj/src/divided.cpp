#include "holodiv/divided.hpp"

#include "holodiv/varieties.hpp"

#include <boost/math/special_functions/legendre.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace holodiv {

void check_distinct(const std::vector<cplx>& nodes) {
    double scale = 0.0;
    for (cplx x : nodes) scale = std::max(scale, std::abs(x));
    for (std::size_t i = 0; i < nodes.size(); ++i)
        for (std::size_t j = i + 1; j < nodes.size(); ++j)
            if (std::abs(nodes[i] - nodes[j]) <= 1e-12 * scale)
                throw Error(ErrorCode::DuplicateNodes,
                            "nodes " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
}

DividedDiffTable divided_diff_values(const std::vector<cplx>& nodes, const std::vector<cplx>& values) {
    if (nodes.empty() || nodes.size() != values.size())
        throw Error(ErrorCode::RangeError, "divided differences need matching nonempty nodes and values");
    check_distinct(nodes);
    DividedDiffTable t;
    t.nodes = nodes;
    t.values = values;
    const std::size_t n = nodes.size();
    t.table.resize(n);
    t.table[0] = values;
    for (std::size_t k = 1; k < n; ++k) {
        t.table[k].resize(n - k);
        for (std::size_t i = 0; i + k < n; ++i)
            t.table[k][i] = (t.table[k - 1][i] - t.table[k - 1][i + 1]) / (nodes[i] - nodes[i + k]);
    }
    return t;
}

DividedDiffTable divided_diff(const ScalarFn& h, const std::vector<cplx>& nodes) {
    std::vector<cplx> values(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) values[i] = h(nodes[i]);
    return divided_diff_values(nodes, values);
}

DividedDiffTable divided_diff(const HoloFn& h, const Point& z, const Point& v, const std::vector<cplx>& nodes) {
    std::vector<cplx> values(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) values[i] = h(z + nodes[i] * v);
    return divided_diff_values(nodes, values);
}

namespace {

std::vector<std::vector<double>> abs_table(const std::vector<cplx>& nodes, const std::vector<cplx>& values) {
    const std::size_t n = nodes.size();
    std::vector<std::vector<double>> t(n);
    t[0].resize(n);
    for (std::size_t i = 0; i < n; ++i) t[0][i] = std::abs(values[i]);
    for (std::size_t k = 1; k < n; ++k) {
        t[k].resize(n - k);
        for (std::size_t i = 0; i + k < n; ++i)
            t[k][i] = (t[k - 1][i] + t[k - 1][i + 1]) / std::abs(nodes[i] - nodes[i + k]);
    }
    return t;
}

}  // namespace

LeibnizResult leibniz_check(const ScalarFn& alpha, const ScalarFn& beta, const std::vector<cplx>& nodes) {
    const std::size_t n = nodes.size();
    std::vector<cplx> va(n), vb(n), vab(n);
    for (std::size_t i = 0; i < n; ++i) {
        va[i] = alpha(nodes[i]);
        vb[i] = beta(nodes[i]);
        vab[i] = va[i] * vb[i];
    }
    const auto ta = divided_diff_values(nodes, va);
    const auto tb = divided_diff_values(nodes, vb);
    const auto tab = divided_diff_values(nodes, vab);
    const auto aa = abs_table(nodes, va);
    const auto ab = abs_table(nodes, vb);
    const auto aab = abs_table(nodes, vab);
    LeibnizResult r;
    // every contiguous run, the prefixes being the case i = 0
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            cplx sum = 0.0;
            double scale = aab[j - i][i];
            for (std::size_t k = i; k <= j; ++k) {
                sum += ta.at(i, k) * tb.at(k, j);
                scale += aa[k - i][i] * ab[j - k][k];
            }
            r.residual = std::max(r.residual, std::abs(tab.at(i, j) - sum));
            r.scale = std::max(r.scale, scale);
        }
    return r;
}

std::vector<cplx> lambda_set(const HoloPoly& f1, const HoloPoly& f2, const ConvexDomain& domain, const Point& z,
                             const Point& v, double kappa, int l) {
    if (l != 1 && l != 2) throw Error(ErrorCode::RangeError, "l must be 1 or 2");
    const double rz = domain.rho(z);
    if (!(rz < 0.0) || !domain.in_collar(z)) throw Error(ErrorCode::OutsideCollar, "lambda_set center outside the collar");
    const double radius = tau(domain, z, v, 3.0 * kappa * std::abs(rz));
    const HoloPoly& zero_of = l == 1 ? f2 : f1;
    const HoloPoly& fl = l == 1 ? f1 : f2;

    UniPoly p = restrict_to_line(zero_of, z, v);
    bool nonzero = false;
    for (cplx c : p) nonzero = nonzero || c != cplx(0.0);
    if (!nonzero) throw Error(ErrorCode::IdenticallyZeroFiber, "f vanishes on the whole line");
    const UniPoly pl = restrict_to_line(fl, z, v);

    std::vector<cplx> out;
    for (cplx x : poly_roots(p)) {
        if (!(std::abs(x) < radius)) continue;
        double scale = 0.0;
        for (std::size_t k = 0; k < pl.size(); ++k) scale += std::abs(pl[k]) * std::pow(std::abs(x), double(k));
        if (std::abs(horner(pl, x)) < 1e-10 * scale || scale == 0.0) continue;  // x lies on X_l
        out.push_back(x);
    }
    // a multiple zero is one point of the variety
    std::vector<cplx> uniq;
    double mx = 0.0;
    for (cplx x : out) mx = std::max(mx, std::abs(x));
    for (cplx x : out) {
        bool dup = false;
        for (cplx y : uniq) dup = dup || std::abs(x - y) <= 1e-12 * mx;
        if (!dup) uniq.push_back(x);
    }
    return uniq;
}

const char* to_string(CertKind k) {
    switch (k) {
        case CertKind::RatioSup: return "ratio_sup";
        case CertKind::SupInfty1: return "sup_infty_1";
        case CertKind::SupInfty2: return "sup_infty_2";
        case CertKind::Lq1: return "lq_1";
        case CertKind::Lq2: return "lq_2";
    }
    return "unknown";
}

namespace {

nlohmann::json point_json(const Point& p) {
    return nlohmann::json::array({p(0).real(), p(0).imag(), p(1).real(), p(1).imag()});
}

}  // namespace

nlohmann::json Certificate::to_json() const {
    nlohmann::json w = nlohmann::json::array();
    for (const auto& x : witnesses) {
        nlohmann::json lam = nlohmann::json::array();
        for (cplx c : x.lambdas) lam.push_back({c.real(), c.imag()});
        w.push_back({{"z", point_json(x.z)}, {"v", point_json(x.v)}, {"lambdas", lam}, {"contribution", x.contribution}});
    }
    nlohmann::json j = {{"kind", to_string(kind)},
                        {"value", value},
                        {"k_max", k_max},
                        {"kappa", kappa},
                        {"q", q},
                        {"witnesses", w},
                        {"truncation_flags", truncation_flags}};
    if (kind == CertKind::SupInfty1 || kind == CertKind::SupInfty2) j["value_tangent"] = value_tangent;
    if (kind == CertKind::RatioSup) j["skipped"] = skipped;
    if (!level_partial.empty()) j["level_partial"] = level_partial;
    if (!covering_id.empty()) j["covering_id"] = covering_id;
    j["seed"] = seed;
    return j;
}

std::vector<Point> sample_directions(const KoranyiFrame& frame, int count, double theta_max) {
    std::vector<Point> out{frame.v};
    const int others = count - 1;
    for (int k = 1; k <= others; ++k) {
        const double theta = theta_max * (k % 2 == 1 ? 1.0 : 0.5);
        const cplx phase = std::polar(1.0, 2.0 * pi * (k - 1) / others);
        out.push_back(std::cos(theta) * frame.v + std::sin(theta) * phase * frame.eta);
    }
    return out;
}

namespace {

struct CenterResult {
    Witness best;
    double tangent = 0.0;
    bool truncated = false;
};

template <class Fn>
void for_each_subset(std::size_t n, std::size_t k, Fn&& fn) {
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        fn(idx);
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

CenterResult sup_at_center(const HoloFn& g, const HoloPoly& f1, const HoloPoly& f2, const ConvexDomain& domain,
                           const Point& z, double kappa, int l, const SupInftyOptions& opt) {
    CenterResult res;
    const HoloPoly& fl = l == 1 ? f1 : f2;
    const KoranyiFrame frame = koranyi_frame(domain, z);
    const double rz = std::abs(domain.rho(z));
    const auto dirs = sample_directions(frame, opt.directions, opt.theta_max);
    for (std::size_t d = 0; d < dirs.size(); ++d) {
        const Point& v = dirs[d];
        const auto nodes = lambda_set(f1, f2, domain, z, v, kappa, l);
        if (nodes.empty()) continue;
        const double t = tau(domain, z, v, rz);
        std::vector<cplx> vals(nodes.size());
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const Point p = z + nodes[i] * v;
            vals[i] = g(p) / fl(p);
        }
        if (nodes.size() > static_cast<std::size_t>(opt.k_max)) res.truncated = true;
        const std::size_t kk = std::min<std::size_t>(nodes.size(), opt.k_max);
        for (std::size_t k = 1; k <= kk; ++k)
            for_each_subset(nodes.size(), k, [&](const std::vector<std::size_t>& idx) {
                std::vector<cplx> sn, sv;
                for (std::size_t i : idx) sn.push_back(nodes[i]), sv.push_back(vals[i]);
                const double c = std::abs(divided_diff_values(sn, sv).top()) * std::pow(t, double(k - 1));
                if (d == 0) res.tangent = std::max(res.tangent, c);
                if (c > res.best.contribution) res.best = Witness{z, v, sn, c};
            });
    }
    return res;
}

Certificate reduce_sup(std::vector<CenterResult>& per, int l, double kappa, const SupInftyOptions& opt) {
    Certificate cert;
    cert.kind = l == 1 ? CertKind::SupInfty1 : CertKind::SupInfty2;
    cert.k_max = opt.k_max;
    cert.kappa = kappa;
    cert.truncation_flags.push_back("directions=" + std::to_string(opt.directions));
    bool truncated = false;
    std::vector<Witness> w;
    for (auto& r : per) {
        cert.value = std::max(cert.value, r.best.contribution);
        cert.value_tangent = std::max(cert.value_tangent, r.tangent);
        truncated = truncated || r.truncated;
        if (r.best.contribution > 0.0) w.push_back(std::move(r.best));
    }
    if (truncated) cert.truncation_flags.push_back("k_max");
    std::stable_sort(w.begin(), w.end(), [](const Witness& a, const Witness& b) { return a.contribution > b.contribution; });
    if (w.size() > static_cast<std::size_t>(opt.witnesses)) w.resize(opt.witnesses);
    cert.witnesses = std::move(w);
    return cert;
}

}  // namespace

Certificate cert_sup_infty(const HoloFn& g, const HoloPoly& f1, const HoloPoly& f2, const ConvexDomain& domain,
                           const std::vector<Point>& centers, double kappa, int l, const SupInftyOptions& opt) {
    if (opt.k_max < 1) throw Error(ErrorCode::RangeError, "k_max must be >= 1");
    if (l != 1 && l != 2) throw Error(ErrorCode::RangeError, "l must be 1 or 2");
    std::vector<CenterResult> per(centers.size());
    parallel_for(centers.size(), resolve_threads(opt.threads),
                 [&](std::size_t i) { per[i] = sup_at_center(g, f1, f2, domain, centers[i], kappa, l, opt); });
    return reduce_sup(per, l, kappa, opt);
}

Certificate cert_sup_infty(const HoloFn& g, const HoloPoly& f1, const HoloPoly& f2, const ConvexDomain& domain,
                           const KappaCovering& covering, int l, const SupInftyOptions& opt) {
    std::vector<Point> centers;
    centers.reserve(covering.size());
    for (const auto& lev : covering.levels) centers.insert(centers.end(), lev.centers.begin(), lev.centers.end());
    Certificate c = cert_sup_infty(g, f1, f2, domain, centers, covering.params.kappa, l, opt);
    c.covering_id = "kappa=" + std::to_string(covering.params.kappa) + ",eps0=" + std::to_string(covering.params.eps0) +
                    ",centers=" + std::to_string(covering.size());
    return c;
}

std::vector<Point> graded_grid(const ConvexDomain& domain, int count, std::uint64_t seed, double rho_min) {
    std::mt19937_64 rng(seed);
    const double rho_max = std::abs(domain.rho(domain.center()));
    std::uniform_real_distribution<double> u(std::log(rho_min), std::log(rho_max));
    std::vector<Point> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        const double level = std::exp(u(rng));
        out.push_back(sample_shell_point(domain, rng, -std::min(rho_max, 1.01 * level), -0.99 * level));
    }
    return out;
}

Certificate cert_ratio(const HoloFn& g, const HoloPoly& f1, const HoloPoly& f2, const std::vector<Point>& grid) {
    Certificate cert;
    cert.kind = CertKind::RatioSup;
    Witness best;
    for (const Point& z : grid) {
        const double m = std::max(std::abs(f1(z)), std::abs(f2(z)));
        if (m < 1e-14) {
            ++cert.skipped;
            continue;
        }
        const double r = std::abs(g(z)) / m;
        if (r > best.contribution) best = Witness{z, Point::Zero(), {}, r};
    }
    cert.value = best.contribution;
    if (best.contribution > 0.0) cert.witnesses.push_back(best);
    cert.truncation_flags.push_back("grid=" + std::to_string(grid.size()));
    return cert;
}

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.clear();
    w.clear();
    const auto zeros = boost::math::legendre_p_zeros<double>(n);  // nonnegative half
    for (double r : zeros) {
        const double d = boost::math::legendre_p_prime(n, r);
        const double wt = 2.0 / ((1.0 - r * r) * d * d);
        x.push_back(r);
        w.push_back(wt);
        if (r != 0.0) {
            x.push_back(-r);
            w.push_back(wt);
        }
    }
}

Certificate cert_lq(const HoloFn& g, const HoloPoly& f1, const HoloPoly& f2, const ConvexDomain& domain,
                    const KappaCovering& covering, double q, int l, const LqOptions& opt) {
    if (!(q >= 1.0)) throw Error(ErrorCode::RangeError, "q must be >= 1");
    if (l != 1 && l != 2) throw Error(ErrorCode::RangeError, "l must be 1 or 2");
    const double kappa = covering.params.kappa;
    const HoloPoly& fl = l == 1 ? f1 : f2;
    std::vector<double> gx, gw;
    gauss_legendre(opt.radial_nodes, gx, gw);

    const std::size_t n = covering.size();
    std::vector<double> per(n, 0.0);
    std::vector<char> truncated(n, 0);
    parallel_for(n, resolve_threads(opt.threads), [&](std::size_t c) {
        const Point& zj = covering.center(c);
        const double rj = std::abs(domain.rho(zj));
        const KoranyiFrame frame = koranyi_frame(domain, zj);
        const double R = 2.0 * kappa * rj;
        double acc = 0.0;
        for (std::size_t a = 0; a < gx.size(); ++a) {
            const double r = 0.5 * R * (gx[a] + 1.0);
            const double wr = 0.5 * R * gw[a] * r * (2.0 * pi / opt.angular_nodes);
            for (int b = 0; b < opt.angular_nodes; ++b) {
                const Point zp = frame.point(std::polar(r, 2.0 * pi * b / opt.angular_nodes), 0.0);
                const auto nodes = lambda_set(f1, f2, domain, zp, frame.v, kappa, l);
                if (nodes.empty()) continue;
                if (nodes.size() > static_cast<std::size_t>(opt.k_max)) truncated[c] = 1;
                std::vector<cplx> vals(nodes.size());
                for (std::size_t i = 0; i < nodes.size(); ++i) {
                    const Point p = zp + nodes[i] * frame.v;
                    vals[i] = g(p) / fl(p);
                }
                // ordered tuples of distinct nodes: k! times each subset
                double s = 0.0;
                double fact = 1.0;
                const std::size_t kk = std::min<std::size_t>(nodes.size(), opt.k_max);
                for (std::size_t k = 1; k <= kk; ++k) {
                    fact *= static_cast<double>(k);
                    const double weight = std::pow(rj, q * (k - 1) / 2.0 + 1.0);
                    for_each_subset(nodes.size(), k, [&](const std::vector<std::size_t>& idx) {
                        std::vector<cplx> sn, sv;
                        for (std::size_t i : idx) sn.push_back(nodes[i]), sv.push_back(vals[i]);
                        s += fact * weight * std::pow(std::abs(divided_diff_values(sn, sv).top()), q);
                    });
                }
                acc += wr * s;
            }
        }
        per[c] = acc;
    });

    Certificate cert;
    cert.kind = l == 1 ? CertKind::Lq1 : CertKind::Lq2;
    cert.k_max = opt.k_max;
    cert.kappa = kappa;
    cert.q = q;
    cert.covering_id = "kappa=" + std::to_string(kappa) + ",eps0=" + std::to_string(covering.params.eps0) +
                       ",centers=" + std::to_string(n);
    double total = 0.0;
    std::size_t c = 0;
    Witness best;
    for (const auto& lev : covering.levels) {
        for (std::size_t k = 0; k < lev.centers.size(); ++k, ++c) {
            total += per[c];
            if (per[c] > best.contribution) best = Witness{lev.centers[k], Point::Zero(), {}, per[c]};
        }
        cert.level_partial.push_back(total);
    }
    cert.value = total;
    if (best.contribution > 0.0) cert.witnesses.push_back(best);
    if (std::any_of(truncated.begin(), truncated.end(), [](char t) { return t != 0; }))
        cert.truncation_flags.push_back("k_max");
    cert.truncation_flags.push_back("quadrature=" + std::to_string(opt.radial_nodes) + "x" +
                                    std::to_string(opt.angular_nodes));
    return cert;
}

}  // namespace holodiv

#pragma once

#include "holodiv/common.hpp"
#include "holodiv/geometry.hpp"
#include "holodiv/poly.hpp"

#include <json.hpp>

#include <functional>
#include <string>
#include <vector>

namespace holodiv {

using ScalarFn = std::function<cplx(cplx)>;

// table[k][i] = h[lambda_i, ..., lambda_{i+k}]
struct DividedDiffTable {
    std::vector<cplx> nodes;
    std::vector<cplx> values;
    std::vector<std::vector<cplx>> table;

    std::size_t size() const { return nodes.size(); }
    // h[lambda_i .. lambda_j], i <= j
    cplx at(std::size_t i, std::size_t j) const { return table[j - i][i]; }
    cplx top() const { return table.back()[0]; }
};

// Throws DuplicateNodes when two nodes are closer than 1e-12 max|lambda|.
void check_distinct(const std::vector<cplx>& nodes);

DividedDiffTable divided_diff_values(const std::vector<cplx>& nodes, const std::vector<cplx>& values);
DividedDiffTable divided_diff(const ScalarFn& h, const std::vector<cplx>& nodes);
// h_{z,v}[lambda] = h(z + lambda v)
DividedDiffTable divided_diff(const HoloFn& h, const Point& z, const Point& v, const std::vector<cplx>& nodes);

struct LeibnizResult {
    double residual = 0.0;
    // forward-error scale: sum_k |alpha|[..] |beta|[..] with the tables built
    // from |values| and |node gaps|
    double scale = 0.0;
};

LeibnizResult leibniz_check(const ScalarFn& alpha, const ScalarFn& beta, const std::vector<cplx>& nodes);

// Lambda^(l)_{z,v}: zeros of f_{3-l} on z + lambda v with |lambda| < tau(z, v,
// 3 kappa |rho(z)|), minus the points of X_l. l is 1 or 2.
std::vector<cplx> lambda_set(const HoloPoly& f1, const HoloPoly& f2, const ConvexDomain& domain, const Point& z,
                             const Point& v, double kappa, int l);

enum class CertKind { RatioSup, SupInfty1, SupInfty2, Lq1, Lq2 };
const char* to_string(CertKind k);

struct Witness {
    Point z = Point::Zero();
    Point v = Point::Zero();
    std::vector<cplx> lambdas;
    double contribution = 0.0;
};

struct Certificate {
    CertKind kind = CertKind::RatioSup;
    double value = 0.0;
    // sup restricted to the complex-tangent direction v_z (sup-infinity only)
    double value_tangent = 0.0;
    int k_max = 0;
    double kappa = 0.0;
    double q = 0.0;
    std::string covering_id;
    std::uint64_t seed = 0;
    std::vector<Witness> witnesses;  // largest contributions first
    std::vector<std::string> truncation_flags;
    int skipped = 0;
    std::vector<double> level_partial;  // cumulative sums by covering level (L^q)

    nlohmann::json to_json() const;
};

// Unit directions at a center: the frame tangent v first, then tilted
// directions cos(theta) v + sin(theta) e^{i phi} eta with theta <= theta_max.
std::vector<Point> sample_directions(const KoranyiFrame& frame, int count, double theta_max);

struct SupInftyOptions {
    int k_max = 4;
    int directions = 8;
    double theta_max = pi / 4.0;
    int witnesses = 5;
    unsigned threads = 0;
};

// Centers given explicitly, or taken from a covering.
Certificate cert_sup_infty(const HoloFn& g, const HoloPoly& f1, const HoloPoly& f2, const ConvexDomain& domain,
                           const std::vector<Point>& centers, double kappa, int l, const SupInftyOptions& opt = {});
Certificate cert_sup_infty(const HoloFn& g, const HoloPoly& f1, const HoloPoly& f2, const ConvexDomain& domain,
                           const KappaCovering& covering, int l, const SupInftyOptions& opt = {});

// Koranyi-graded sample of D: |rho| log-uniform over [rho_min, |rho| max].
std::vector<Point> graded_grid(const ConvexDomain& domain, int count, std::uint64_t seed, double rho_min = 1e-6);

Certificate cert_ratio(const HoloFn& g, const HoloPoly& f1, const HoloPoly& f2, const std::vector<Point>& grid);

struct LqOptions {
    int k_max = 4;
    int radial_nodes = 8;
    int angular_nodes = 16;
    unsigned threads = 0;
};

Certificate cert_lq(const HoloFn& g, const HoloPoly& f1, const HoloPoly& f2, const ConvexDomain& domain,
                    const KappaCovering& covering, double q, int l, const LqOptions& opt = {});

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

}  // namespace holodiv

#pragma once

#include "holodiv/common.hpp"
#include "holodiv/geometry.hpp"
#include "holodiv/poly.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <map>
#include <variant>
#include <vector>

namespace holodiv {

class KernelContext {
public:
    KernelContext(ConvexDomain domain, int N, cplx C = 1.0);

    const ConvexDomain& domain() const { return domain_; }
    int N() const { return N_; }
    cplx constant() const { return C_; }
    void set_constant(cplx C) { C_ = C; }

    // h_i(zeta) = -d rho / d zeta_i
    Point h(const Point& zeta) const;
    Point h_tilde(const Point& zeta) const;
    // 1 + <h~(zeta), zeta - z>
    cplx denominator(const Point& zeta, const Point& z) const;
    // M(i,j) = d(h_i / rho) / d conj(zeta_j), from grad and Hessian of rho
    Eigen::Matrix2cd dbar_matrix(const Point& zeta) const;
    // Same matrix written out for a ball; throws RangeError for other kinds.
    Eigen::Matrix2cd dbar_matrix_ball(const Point& zeta) const;

    // Density of P^{N,n}(., z) against Lebesgue measure. n = 2 uses det M and
    // the calibrated constant; n = 1 pairs dbar h~ with the Kaehler form
    // (trace M), n = 0 is D^{-N}. Throws PoleProximity if |D| < 1e-12.
    cplx density(const Point& zeta, const Point& z, int n = 2) const;

private:
    ConvexDomain domain_;
    int N_;
    cplx C_;
};

cplx kernel_density(const KernelContext& ctx, const Point& zeta, const Point& z, int n = 2);

struct MonteCarlo {
    std::uint64_t samples = 1000000;
    std::uint64_t seed = 0;
};
struct Tensor {
    int nodes = 24;
    std::uint64_t budget = 1u << 22;  // max nodes^4
};
using Quadrature = std::variant<MonteCarlo, Tensor>;

struct ReproduceResult {
    cplx integral = 0.0;
    cplx reference = 0.0;
    cplx error = 0.0;  // integral - reference
    double abs_error = 0.0;
    double stderr_estimate = 0.0;  // 0 for tensor quadrature
    std::uint64_t evaluations = 0;

    nlohmann::json to_json() const;
};

// int_D g(zeta) P^{N,2}(zeta, z). MC draws uniformly from the bounding box of
// D and rejects outside points; tensor mode needs a ball or ellipsoid.
ReproduceResult reproduce_check(const KernelContext& ctx, const HoloFn& g, const Point& z, const Quadrature& quad,
                                unsigned threads = 0);

// Fixes C so that int_D P^{N,2}(., z0) = 1. Returns the constant and sets it on ctx.
cplx calibrate(KernelContext& ctx, const Point& z0, const Quadrature& quad, unsigned threads = 0);

// f(z) - f(zeta) = sum_i b_i(zeta, z) (z_i - zeta_i), b_i exact polynomials.
class HeferForm {
public:
    // exponents of (zeta1, zeta2, z1, z2)
    using Key = std::array<int, 4>;
    using Terms = std::map<Key, cplx>;

    HeferForm() = default;
    HeferForm(HoloPoly f, Terms b1, Terms b2);

    cplx b(int i, const Point& zeta, const Point& z) const;
    const Terms& terms(int i) const { return i == 1 ? b1_ : b2_; }
    const HoloPoly& poly() const { return f_; }

    // |f(z) - f(zeta) - sum_i b_i (z_i - zeta_i)| / max(1, |f(z)|, |f(zeta)|)
    double residual(const Point& zeta, const Point& z) const;

private:
    HoloPoly f_;
    Terms b1_, b2_;
};

HeferForm hefer_form(const HoloPoly& f);

struct EstiBAOptions {
    int samples_per_eps = 64;
    std::uint64_t seed = 1;
};

struct EstiBARow {
    double eps = 0.0;
    double max_h1 = 0.0;
    double max_h2 = 0.0;
    double min_ratio = 0.0;  // (i): |rho(zeta) + <h, zeta - z>| / (eps + |rho(zeta)| + |rho(z)|)
};

struct EstiBAReport {
    std::vector<EstiBARow> rows;
    double slope_h1 = 0.0;
    double slope_h2 = 0.0;
    double min_ratio = 0.0;
    int samples = 0;

    nlohmann::json to_json() const;
};

// Samples z in P_eps(zeta) for each center zeta and eps; h* are the
// components of h(zeta) in the Koranyi frame at z.
EstiBAReport estiBA_probe(const KernelContext& ctx, const std::vector<Point>& centers,
                          const std::vector<double>& eps_grid, const EstiBAOptions& opt = {});

// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace holodiv

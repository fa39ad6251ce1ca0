#pragma once

#include "holodiv/common.hpp"
#include "holodiv/geometry.hpp"
#include "holodiv/poly.hpp"
#include "holodiv/varieties.hpp"

#include <optional>
#include <string>
#include <vector>

namespace holodiv {

enum class ErrorMode { Circle, Annulus };

struct LocalConfig {
    int quad_nodes = 256;
    ErrorMode mode = ErrorMode::Circle;
    int annulus_radii = 4;
    double residual_tol = 1e-8;
    double node_jitter = 1e-7;  // times the contour radius
    // Ball samples checked at assembly; IncompleteIdeal above 1e3 * residual_tol.
    int verify_samples = 32;
    // Test hook: assemble without the contour term e.
    bool drop_error_term = false;
    // Common zeros of f1, f2; computed by local_divide when absent. Every
    // ideal member vanishes there, so a nonzero g at one inside the ball
    // means IncompleteIdeal.
    std::optional<std::vector<Point>> common_zeros;
    FactorizationConfig factorization;
};

// Newton form of the interpolant of `values` at `nodes`.
struct NewtonInterp {
    std::vector<cplx> nodes;  // after jitter
    std::vector<cplx> coeffs;
    bool jittered = false;

    cplx operator()(cplx w) const;
};

// Nodes alpha_{l,i}(z1*), i in I_l; values (g/P_{3-l}) there. Returns the
// interpolant g~_{3-l}; empty when I_l is empty.
NewtonInterp newton_interpolant(const HoloFn& g, const FiberFactorization& fac, int l, cplx z1s,
                                double jitter_scale);

// Smooth cutoff on the ratio r = |arg1| / |arg2|: 0 below 1/3, 1 above 2/3.
double cutoff_transition(double r);
// (chi1, chi2) for the pair of arguments. Throws BothArgumentsZero.
std::pair<double, double> cutoffs(cplx arg1, cplx arg2);

class LocalDivision {
public:
    struct FiberData {
        cplx z1s;
        WeierstrassSplit::Fiber fb[2];
        NewtonInterp gt[2];  // gt[0] = g~1 (nodes on X2), gt[1] = g~2 (nodes on X1)
        std::vector<cplx> contour_nodes;
        std::vector<cplx> contour_weights;  // e(w) = sum weights / (node - w)
    };

    struct Values {
        cplx g, f1, f2;
        cplx P1, P2, Q1, Q2;
        cplx gt1, gt2, e;
        double chi1 = 0.0, chi2 = 0.0;
        cplx ghat1, ghat2;
        double residual = 0.0;    // |g - ghat1 f1 - ghat2 f2|
        double identity24 = 0.0;  // |g - P1 g~1 - P2 g~2 - P1 P2 e|
    };

    LocalDivision(HoloFn g, HoloPoly f1, HoloPoly f2, ConvexDomain domain, Point z, double kappa, LocalConfig cfg);

    FiberData fiber_at(cplx z1s) const;
    Values evaluate(const FiberData& fd, cplx z2s) const;
    Values evaluate(const Point& zeta) const;
    cplx error_integral(const FiberData& fd, cplx z2s) const;

    const Point& center() const { return z_; }
    double kappa() const { return kappa_; }
    double rho_z() const { return fac_.rho_z; }
    double radius() const { return fac_.radius_1; }  // kappa |rho(z)|
    double contour_radius() const { return std::sqrt(4.0 * fac_.radius_1); }
    const KoranyiFrame& frame() const { return fac_.frame; }
    const FiberFactorization& factorization() const { return fac_; }
    const LocalConfig& config() const { return cfg_; }
    const HoloFn& g() const { return g_; }
    std::vector<std::string> erratum_flags() const;

    // set once any fiber needed node jitter
    bool jitter_used() const { return jitter_used_; }

private:
    HoloFn g_;
    HoloPoly f1_, f2_;
    ConvexDomain domain_;
    Point z_;
    double kappa_;
    LocalConfig cfg_;
    FiberFactorization fac_;
    mutable bool jitter_used_ = false;
};

LocalDivision local_divide(const HoloFn& g, const HoloPoly& f1, const HoloPoly& f2, const ConvexDomain& domain,
                           const Point& z, double kappa, const LocalConfig& cfg = {});

// Sobol points of P_{s kappa|rho(z)|}(z), s = shrink, as frame coordinates.
std::vector<std::pair<cplx, cplx>> ball_samples(double radius, int count, double shrink = 0.999);

struct ResidualReport {
    double max_residual = 0.0;
    double max_identity24 = 0.0;
    double sup_ghat1 = 0.0;
    double sup_ghat2 = 0.0;
    double sup_g = 0.0;
    double scale = 1.0;  // max(1, sup |g|)
    int samples = 0;
};

ResidualReport residual_check(const LocalDivision& div, const std::vector<std::pair<cplx, cplx>>& samples);
ResidualReport residual_check(const LocalDivision& div, int samples);

}  // namespace holodiv

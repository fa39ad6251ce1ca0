#pragma once

#include "holodiv/common.hpp"
#include "holodiv/geometry.hpp"
#include "holodiv/poly.hpp"

#include <array>
#include <optional>
#include <vector>

namespace holodiv {

// Roots of a univariate polynomial (companion eigenvalues, Newton polish).
// Numerically multiple roots are merged to their mean and repeated, so a
// root of multiplicity m appears m times with identical value.
std::vector<cplx> poly_roots(UniPoly p);

// Multiplicity of each entry of a root list (identical values grouped).
std::vector<int> root_multiplicities(const std::vector<cplx>& roots);

// Fiber polynomial lambda -> f(frame.point(z1s, lambda)).
UniPoly fiber_poly(const HoloPoly& f, const KoranyiFrame& frame, cplx z1s);

// Roots with |lambda| < window. Throws IdenticallyZeroFiber.
std::vector<cplx> fiber_roots(const HoloPoly& f, const KoranyiFrame& frame, cplx z1s, double window);

// Labeled root curves over a set of z1* samples. values[s][i] is curve i at
// samples[s]; labels are fixed by the sorted roots at samples[0].
struct RootCurves {
    std::vector<cplx> samples;
    std::vector<std::vector<cplx>> values;
    std::vector<int> multiplicity;  // at samples[0]
    double collision_tol = 0.0;
    double track_tol = 0.0;
    double max_jump = 0.0;

    std::size_t count() const { return multiplicity.size(); }
};

// Tracks along a path: consecutive samples are adjacent. Throws
// BranchCollision when distinct curves come within collision_tol, when a
// matched step exceeds track_tol, or when the root count changes.
RootCurves track_roots(const HoloPoly& f, const KoranyiFrame& frame, const std::vector<cplx>& path);

// Polar grid on |z1*| <= radius: the center plus `rays` rays of `rings`
// points each, tracked outward from the center. One ring sits just inside
// radius/2 so the open inner disc used by select_index_set is sampled to
// its edge.
RootCurves track_disc(const HoloPoly& f, const KoranyiFrame& frame, double radius, int rings = 8, int rays = 12);

// Curves whose modulus drops below sqrt(2 kappa |rho|) at some sample with
// |z1*| < kappa |rho|.
std::vector<int> select_index_set(const RootCurves& curves, double kappa, double rho_z);

// P = prod_{i in I} (z2* - alpha_i(z1*)) and Q = f / P by deflation of the
// fiber polynomial, in the starred coordinates of a frame.
class WeierstrassSplit {
public:
    WeierstrassSplit(HoloPoly f, KoranyiFrame frame, RootCurves curves, std::vector<int> index_set);

    struct Fiber {
        cplx z1s;
        std::vector<cplx> labeled;  // all curves, in label order
        std::vector<cplx> alpha;    // the I-roots
        UniPoly fiber;
        UniPoly q;
    };
    Fiber fiber(cplx z1s) const;

    cplx P(const Fiber& fb, cplx z2s) const;
    cplx Q(const Fiber& fb, cplx z2s) const;
    cplx P(cplx z1s, cplx z2s) const { return P(fiber(z1s), z2s); }
    cplx Q(cplx z1s, cplx z2s) const { return Q(fiber(z1s), z2s); }

    const std::vector<int>& index_set() const { return index_set_; }
    const RootCurves& curves() const { return curves_; }
    const HoloPoly& f() const { return f_; }
    const KoranyiFrame& frame() const { return frame_; }

private:
    HoloPoly f_;
    KoranyiFrame frame_;
    RootCurves curves_;
    std::vector<int> index_set_;
};

struct FactorizationConfig {
    int rings = 8;
    int rays = 12;
    // Koranyi-ball probe for the DeflationUnstable test and |Q| statistics
    int probe_radial = 4;
    int probe_angular = 8;
    double unstable_ratio = 1e6;
};

struct FiberFactorization {
    KoranyiFrame frame;
    double rho_z = 0.0;
    double kappa = 0.0;
    double radius_1 = 0.0;  // kappa |rho(z)|
    std::array<std::optional<WeierstrassSplit>, 2> split;
    std::array<int, 2> i_count{0, 0};
    std::array<int, 2> p_count{0, 0};
    std::array<double, 2> min_abs_q{0.0, 0.0};
    std::array<double, 2> max_abs_q{0.0, 0.0};
    double max_split_residual = 0.0;

    const WeierstrassSplit& operator[](int l) const { return *split[l]; }
};

FiberFactorization factorize(const HoloPoly& f1, const HoloPoly& f2, const ConvexDomain& domain, const Point& z,
                             double kappa, const FactorizationConfig& cfg = {});

// Splits a single function on the Koranyi ball P_{kappa|rho(z)|}(z).
WeierstrassSplit weierstrass_split(const HoloPoly& f, const KoranyiFrame& frame, double kappa, double rho_z,
                                   const FactorizationConfig& cfg = {});

struct IntersectionResult {
    bool complete = false;
    std::vector<Point> common_zeros;
    std::optional<Point> witness;  // a point of a shared component when not complete
};

IntersectionResult complete_intersection_check(const HoloPoly& f1, const HoloPoly& f2);

}  // namespace holodiv

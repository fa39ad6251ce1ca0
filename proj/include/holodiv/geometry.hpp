#pragma once

#include "holodiv/common.hpp"

#include <array>
#include <iosfwd>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace holodiv {

// Second derivatives of rho: mixed(i,j) = d2 rho / dz_i dzbar_j, pure(i,j) = d2 rho / dz_i dz_j.
struct RhoHessian {
    Eigen::Matrix2cd mixed = Eigen::Matrix2cd::Zero();
    Eigen::Matrix2cd pure = Eigen::Matrix2cd::Zero();
};

class ConvexDomain {
public:
    enum class Kind { Ball, HermitianEllipsoid, Custom };

    struct CustomFns {
        std::function<double(const Point&)> rho;
        std::function<Point(const Point&)> grad;
        std::function<RhoHessian(const Point&)> hess;
    };

    // rho = |z - c|^2 / r^2 - 1
    static ConvexDomain ball(const Point& center, double radius, double collar = 0.5);
    // rho = (z - c)^* A (z - c) - 1 with A Hermitian positive definite
    static ConvexDomain ellipsoid(const Eigen::Matrix2cd& matrix, const Point& center, double collar = 0.5);
    // bbox_center/bbox_radius must enclose the closure of D.
    static ConvexDomain custom(CustomFns fns, const Point& bbox_center, double bbox_radius, double collar);

    Kind kind() const { return kind_; }
    const Point& center() const { return center_; }
    double radius() const { return radius_; }
    const Eigen::Matrix2cd& matrix() const { return matrix_; }
    double collar() const { return collar_; }
    double bbox_radius() const { return bbox_radius_; }

    double rho(const Point& z) const;
    // (d rho / dz_1, d rho / dz_2)
    Point grad(const Point& z) const;
    RhoHessian hess(const Point& z) const;
    std::pair<double, Point> rho_grad(const Point& z) const { return {rho(z), grad(z)}; }

    bool quadratic() const { return kind_ != Kind::Custom; }
    bool in_collar(const Point& z) const;

    // max over |lambda| = t of rho(z + lambda v) - rho(z)
    double max_increment(const Point& z, const Point& v, double t) const;

    // Affine image of the unit ball of C^2 onto D (quadratic kinds only): z = center + L w.
    const Eigen::Matrix2cd& unit_ball_map() const { return ball_map_; }

private:
    Kind kind_ = Kind::Ball;
    Point center_ = Point::Zero();
    double radius_ = 1.0;
    Eigen::Matrix2cd matrix_ = Eigen::Matrix2cd::Identity();
    Eigen::Matrix2cd ball_map_ = Eigen::Matrix2cd::Identity();
    double collar_ = 0.5;
    double bbox_radius_ = 1.0;
    CustomFns fns_;
};

struct KoranyiFrame {
    Point base;
    Point eta;  // unit outer normal
    Point v;    // unit complex tangent, first nonzero component real-positive

    std::pair<cplx, cplx> coords(const Point& z) const {
        const Point d = z - base;
        return {herm(eta, d), herm(v, d)};
    }
    Point point(cplx z1s, cplx z2s) const { return base + z1s * eta + z2s * v; }
};

KoranyiFrame koranyi_frame(const ConvexDomain& domain, const Point& zeta);

double tau(const ConvexDomain& domain, const Point& z, const Point& v, double eps);

// max(|z1*|, |z2*|^2) in the frame at z. Throws OutsideCollar.
double delta(const ConvexDomain& domain, const Point& z, const Point& zeta);
double delta_in_frame(const KoranyiFrame& frame, const Point& zeta);
// Strict membership in P_r(frame.base).
bool in_koranyi_ball(const KoranyiFrame& frame, const Point& zeta, double r);

struct QuasiMetricProbe {
    double c1_sym = 0.0;  // max delta(z,zeta)/delta(zeta,z)
    double c1_tri = 0.0;  // max delta(z,zeta)/(delta(z,xi)+delta(xi,zeta))
    double c1_rho = 0.0;  // max |rho(z)-rho(zeta)|/eps over zeta in P_eps(z)
    int samples = 0;
};

QuasiMetricProbe quasi_metric_probe(const ConvexDomain& domain, int samples, std::uint64_t seed);

// Uniform-ish point of D with rho in [rho_lo, rho_hi] (both negative).
Point sample_shell_point(const ConvexDomain& domain, std::mt19937_64& rng, double rho_lo, double rho_hi);

// Moves z along the real line through direction dir until rho = level.
Point project_to_level(const ConvexDomain& domain, const Point& z, const Point& dir, double level);

struct CoveringParams {
    double kappa = 0.05;
    double eps0 = 0.1;
    double c_sep = 1.0;
    double level_floor = 1e-3;
    // Boundary point around which the levels are sampled, and the Koranyi
    // radius of the sampled patch on each level.
    Point focus = Point::Zero();
    double patch_radius = 5e-4;
    int grid_density = 4;
};

struct CoveringLevel {
    int j = 0;
    double value = 0.0;       // -(1 - c kappa)^j eps0
    double separation = 0.0;  // c kappa (1 - c kappa)^j eps0
    KoranyiFrame patch_frame;
    std::vector<Point> centers;
};

struct KappaCovering {
    CoveringParams params;
    std::vector<CoveringLevel> levels;
    int overlap_bound = 0;
    std::vector<std::size_t> offsets;  // prefix sums of level sizes

    // Must be called after levels change; enables flat indexing.
    void reindex();
    std::size_t size() const { return offsets.empty() ? 0 : offsets.back(); }
    // flat index -> (level position, k)
    std::pair<int, int> locate(std::size_t flat) const;
    const Point& center(std::size_t flat) const;
    double center_rho(std::size_t flat) const;
    double ball_radius(std::size_t flat) const;  // kappa |rho(z_j)|
};

KappaCovering build_kappa_covering(const ConvexDomain& domain, const CoveringParams& params);

struct CoveringViolation {
    std::string kind;  // level, separation, coverage, inclusion, overlap
    int j = 0;
    int k = -1;
    int other = -1;
    double value = 0.0;
    double bound = 0.0;
};

struct CoveringReport {
    std::vector<CoveringViolation> violations;
    std::size_t centers = 0;
    std::size_t probes = 0;
    int overlap_max = 0;          // pointwise multiplicity of the P_{kappa|rho|} balls
    int overlap_4kappa_max = 0;   // pointwise multiplicity of the P_{4 kappa|rho|} balls
    std::size_t offlevel_probes = 0;
    std::size_t offlevel_uncovered = 0;
    int overlap_limit = 64;
    bool ok() const { return violations.empty(); }
};

CoveringReport verify_covering(const KappaCovering& covering, const ConvexDomain& domain, int probe_samples,
                               std::uint64_t seed = 7, int overlap_limit = 64);

// Random point of the covered region between the first and last level, inside
// `shrink` times the patch.
Point sample_covered_point(const KappaCovering& covering, const ConvexDomain& domain, std::mt19937_64& rng,
                           double shrink = 0.8);

void write_covering_csv(std::ostream& out, const KappaCovering& covering, const ConvexDomain& domain);
KappaCovering read_covering_csv(std::istream& in, const ConvexDomain& domain, const CoveringParams& params);

// Maps a patch parameter (a, b) on level `level` to the level set.
Point patch_point(const ConvexDomain& domain, const CoveringLevel& level, double a, cplx b);

}  // namespace holodiv

#pragma once

#include "holodiv/common.hpp"
#include "holodiv/geometry.hpp"
#include "holodiv/local_division.hpp"

#include <json.hpp>

#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

namespace holodiv {

// psi(x) = 1 for x <= 1/2, 0 for x >= 1, C^infinity in between.
double bump_profile(double x);

class PartitionOfUnity {
public:
    PartitionOfUnity(const KappaCovering& covering, const ConvexDomain& domain, int deriv_max = 2);

    // Raw bump of ball j: psi(|z1*|/r) psi(|z2*|^2/r), r = kappa |rho(z_j)|.
    double bump(std::size_t j, const Point& z) const;
    // Flat indices of balls whose support contains z.
    std::vector<std::size_t> candidates(const Point& z) const;

    struct Weights {
        std::vector<std::size_t> index;
        std::vector<double> chi;
        double denominator = 0.0;
    };
    // Normalized weights; throws UncoveredPoint when no bump is positive.
    Weights weights(const Point& z) const;
    double chi(std::size_t j, const Point& z) const;

    // max over samples and supporting j of |D^a chi_j| |rho_j|^{n + t/2}
    // for real directional derivatives of order <= deriv_max along the frame
    // of z_j (n normal, t tangent directions).
    double derivative_constant(const std::vector<Point>& samples) const;

    const KappaCovering& covering() const { return *cov_; }
    const KoranyiFrame& frame(std::size_t j) const { return frames_[j]; }
    double radius(std::size_t j) const { return radius_[j]; }
    int deriv_max() const { return deriv_max_; }

private:
    struct LevelHash {
        double cell = 0.0;
        std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells;
    };
    std::uint64_t key(const Point& z, double cell, int d0, int d1, int d2, int d3) const;

    const KappaCovering* cov_;
    ConvexDomain domain_;
    int deriv_max_;
    std::vector<KoranyiFrame> frames_;
    std::vector<double> radius_;
    std::vector<LevelHash> hashes_;
};

// Local solutions per covering ball, given explicitly or built on demand.
class LocalSet {
public:
    using Factory = std::function<LocalDivision(std::size_t j, const Point& center)>;

    LocalSet(std::size_t size, Factory factory);
    explicit LocalSet(std::size_t size);

    void provide(std::size_t j, LocalDivision div);
    // Throws MissingLocal when absent and there is no factory.
    const LocalDivision& get(std::size_t j, const Point& center) const;
    std::size_t built() const;

private:
    std::size_t size_;
    Factory factory_;
    mutable std::mutex mu_;
    mutable std::unordered_map<std::size_t, std::shared_ptr<const LocalDivision>> cache_;
};

struct GlueValue {
    cplx g1 = 0.0, g2 = 0.0;
    double residual = 0.0;        // |g - g1 f1 - g2 f2|
    double max_local_residual = 0.0;
    double scale = 1.0;           // max(1, |g|)
    // max(scale, max_j |ghat1 f1| + |ghat2 f2|): cancellation in the sum
    double rounding_scale = 1.0;
    int balls = 0;
};

class GlobalSolution {
public:
    GlobalSolution(HoloFn g, HoloPoly f1, HoloPoly f2, const PartitionOfUnity& pou, const LocalSet& locals);

    GlueValue evaluate(const Point& z) const;
    std::pair<cplx, cplx> operator()(const Point& z) const {
        const auto v = evaluate(z);
        return {v.g1, v.g2};
    }

private:
    HoloFn g_;
    HoloPoly f1_, f2_;
    const PartitionOfUnity* pou_;
    const LocalSet* locals_;
};

GlobalSolution glue_global(const HoloFn& g, const HoloPoly& f1, const HoloPoly& f2, const LocalSet& locals,
                           const PartitionOfUnity& pou);

// Lazy locals for every ball of a covering.
LocalSet make_local_set(const HoloFn& g, const HoloPoly& f1, const HoloPoly& f2, const ConvexDomain& domain,
                        const KappaCovering& covering, const LocalConfig& cfg);

struct GlueCheck {
    double max_global_residual = 0.0;
    double max_local_residual = 0.0;
    double max_excess = 0.0;  // max of global - local bound, <= 0 when the check holds
    double scale = 1.0;
    int samples = 0;
    int max_balls = 0;
    double sup_g1 = 0.0, sup_g2 = 0.0;
    bool ok = true;
};

// Global residual <= local * (1 + 1e-9) + 1e-14 rounding_scale at every sample.
GlueCheck check_glue(const GlobalSolution& sol, const std::vector<Point>& samples, unsigned threads = 0);

struct HypothesisNorm {
    int l = 1;
    int alpha = 0;  // order in conj(eta)
    int beta = 0;   // order in conj(v)
    double q = 0.0;
    double value = 0.0;
};

struct HypothesisReport {
    std::vector<HypothesisNorm> norms;
    double decay_slope = 0.0;  // log-log slope of max |rho|^N |g~| per shell
    int k2 = 2;
    bool decay_ok = false;
    int samples = 0;

    nlohmann::json to_json() const;
};

using PairFn = std::function<std::pair<cplx, cplx>(const Point&)>;

// Anti-holomorphic frame derivatives by nested central differences of the
// Wirtinger form d/dconj(w) = (D_w + i D_{iw}) / 2, steps 1e-4 |rho| along
// eta and 1e-4 |rho|^{1/2} along v. q = infinity gives sup norms.
HypothesisReport verify_main_hypotheses(const PairFn& gtilde, const ConvexDomain& domain, double q, int k1, int N,
                                        const std::vector<Point>& samples, int k2 = 2, double step = 1e-4,
                                        unsigned threads = 0);

}  // namespace holodiv

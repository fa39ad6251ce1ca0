#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace holodiv {

using cplx = std::complex<double>;
using Point = Eigen::Vector2cd;

inline constexpr double pi = 3.14159265358979323846;

enum class ErrorCode {
    DegenerateGradient,
    OutsideCollar,
    CollarExhausted,
    IdenticallyZeroFiber,
    BranchCollision,
    DeflationUnstable,
    DuplicateNodes,
    ConfluentNodes,
    SingularNodeValue,
    RootNearContour,
    BothArgumentsZero,
    IncompleteIdeal,
    UncoveredPoint,
    MissingLocal,
    PoleProximity,
    QuadratureBudgetExceeded,
    SchemaError,
    RangeError,
};

const char* to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail);
    ErrorCode code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string detail_;
};

// A holomorphic function sampled pointwise. Polynomials convert to this; the
// counterexample numerator z1^{q/2} z2 does not have a polynomial form.
using HoloFn = std::function<cplx(const Point&)>;

inline Point make_point(cplx a, cplx b) {
    Point p;
    p << a, b;
    return p;
}

// Hermitian inner product, conjugate-linear in the first slot.
inline cplx herm(const Point& a, const Point& b) { return a.dot(b); }
// Bilinear pairing sum a_i b_i, e.g. the derivative of rho along a direction.
inline cplx bilin(const Point& a, const Point& b) { return a(0) * b(0) + a(1) * b(1); }

// Runs fn(i) for i in [0, n) on up to `threads` workers. Results must be
// written to per-index slots so reductions stay deterministic.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

// Worker count: explicit value if nonzero, else HOLODIV_THREADS, else 1.
unsigned resolve_threads(unsigned requested);

}  // namespace holodiv

#pragma once

#include "holodiv/common.hpp"

#include <map>
#include <utility>
#include <vector>

namespace holodiv {

// Ascending coefficients c_0 + c_1 x + ...
using UniPoly = std::vector<cplx>;

cplx horner(const UniPoly& p, cplx x);
UniPoly derivative(const UniPoly& p);
// Quotient of p by the monic product of (x - r) over roots; remainder dropped.
UniPoly deflate(const UniPoly& p, const std::vector<cplx>& roots);
UniPoly from_roots(const std::vector<cplx>& roots);
// Removes leading coefficients below rel_tol * max |c|.
void trim(UniPoly& p, double rel_tol = 0.0);

// Bivariate polynomial sum c_ij z1^i z2^j with a sparse, ordered term map.
class HoloPoly {
public:
    using Key = std::pair<int, int>;

    HoloPoly() = default;
    static HoloPoly constant(cplx c);
    static HoloPoly monomial(int i, int j, cplx c = 1.0);
    static HoloPoly z1() { return monomial(1, 0); }
    static HoloPoly z2() { return monomial(0, 1); }

    const std::map<Key, cplx>& terms() const { return terms_; }
    void set(int i, int j, cplx c);
    cplx coeff(int i, int j) const;

    cplx operator()(const Point& z) const;
    // sum |c_ij| |z1|^i |z2|^j, the rounding scale of an evaluation
    double abs_eval(const Point& z) const;
    HoloPoly d1() const;
    HoloPoly d2() const;

    int degree() const;
    int degree_z1() const;
    int degree_z2() const;
    bool is_zero() const { return terms_.empty(); }

    HoloPoly operator+(const HoloPoly& o) const;
    HoloPoly operator-(const HoloPoly& o) const;
    HoloPoly operator*(const HoloPoly& o) const;
    HoloPoly operator*(cplx s) const;
    friend HoloPoly operator*(cplx s, const HoloPoly& p) { return p * s; }

    HoloFn fn() const;

    // Coefficients of z2^j as polynomials in z1: out[j][i] = c_ij.
    std::vector<UniPoly> by_z2() const;
    std::vector<UniPoly> by_z1() const;

private:
    std::map<Key, cplx> terms_;
};

// Coefficients of lambda -> f(base + lambda dir), exact binomial expansion.
UniPoly restrict_to_line(const HoloPoly& f, const Point& base, const Point& dir);

}  // namespace holodiv

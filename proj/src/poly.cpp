#include "holodiv/poly.hpp"

#include <algorithm>
#include <cmath>

namespace holodiv {

cplx horner(const UniPoly& p, cplx x) {
    cplx acc = 0.0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
    return acc;
}

UniPoly derivative(const UniPoly& p) {
    if (p.size() <= 1) return {};
    UniPoly d(p.size() - 1);
    for (std::size_t k = 1; k < p.size(); ++k) d[k - 1] = static_cast<double>(k) * p[k];
    return d;
}

UniPoly deflate(const UniPoly& p, const std::vector<cplx>& roots) {
    UniPoly q = p;
    for (cplx r : roots) {
        if (q.size() <= 1) return {cplx(0.0)};
        // synthetic division by (x - r)
        UniPoly out(q.size() - 1);
        cplx carry = q.back();
        for (std::size_t k = q.size() - 1; k-- > 0;) {
            out[k] = carry;
            carry = q[k] + carry * r;
        }
        q = std::move(out);
    }
    return q;
}

UniPoly from_roots(const std::vector<cplx>& roots) {
    UniPoly p{cplx(1.0)};
    for (cplx r : roots) {
        UniPoly next(p.size() + 1, cplx(0.0));
        for (std::size_t k = 0; k < p.size(); ++k) {
            next[k + 1] += p[k];
            next[k] -= r * p[k];
        }
        p = std::move(next);
    }
    return p;
}

void trim(UniPoly& p, double rel_tol) {
    double mx = 0.0;
    for (cplx c : p) mx = std::max(mx, std::abs(c));
    while (!p.empty() && std::abs(p.back()) <= rel_tol * mx) p.pop_back();
}

HoloPoly HoloPoly::constant(cplx c) { return monomial(0, 0, c); }

HoloPoly HoloPoly::monomial(int i, int j, cplx c) {
    HoloPoly p;
    p.set(i, j, c);
    return p;
}

void HoloPoly::set(int i, int j, cplx c) {
    if (i < 0 || j < 0) throw Error(ErrorCode::RangeError, "negative exponent");
    if (c == cplx(0.0))
        terms_.erase({i, j});
    else
        terms_[{i, j}] = c;
}

cplx HoloPoly::coeff(int i, int j) const {
    const auto it = terms_.find({i, j});
    return it == terms_.end() ? cplx(0.0) : it->second;
}

cplx HoloPoly::operator()(const Point& z) const {
    cplx acc = 0.0;
    for (const auto& [k, c] : terms_) acc += c * std::pow(z(0), k.first) * std::pow(z(1), k.second);
    return acc;
}

double HoloPoly::abs_eval(const Point& z) const {
    double acc = 0.0;
    const double a = std::abs(z(0));
    const double b = std::abs(z(1));
    for (const auto& [k, c] : terms_) acc += std::abs(c) * std::pow(a, k.first) * std::pow(b, k.second);
    return acc;
}

HoloPoly HoloPoly::d1() const {
    HoloPoly out;
    for (const auto& [k, c] : terms_)
        if (k.first > 0) out.set(k.first - 1, k.second, c * static_cast<double>(k.first));
    return out;
}

HoloPoly HoloPoly::d2() const {
    HoloPoly out;
    for (const auto& [k, c] : terms_)
        if (k.second > 0) out.set(k.first, k.second - 1, c * static_cast<double>(k.second));
    return out;
}

int HoloPoly::degree() const {
    int d = terms_.empty() ? -1 : 0;
    for (const auto& [k, c] : terms_) d = std::max(d, k.first + k.second);
    return d;
}

int HoloPoly::degree_z1() const {
    int d = terms_.empty() ? -1 : 0;
    for (const auto& [k, c] : terms_) d = std::max(d, k.first);
    return d;
}

int HoloPoly::degree_z2() const {
    int d = terms_.empty() ? -1 : 0;
    for (const auto& [k, c] : terms_) d = std::max(d, k.second);
    return d;
}

HoloPoly HoloPoly::operator+(const HoloPoly& o) const {
    HoloPoly out = *this;
    for (const auto& [k, c] : o.terms_) out.set(k.first, k.second, out.coeff(k.first, k.second) + c);
    return out;
}

HoloPoly HoloPoly::operator-(const HoloPoly& o) const { return *this + o * cplx(-1.0); }

HoloPoly HoloPoly::operator*(const HoloPoly& o) const {
    HoloPoly out;
    for (const auto& [a, ca] : terms_)
        for (const auto& [b, cb] : o.terms_) {
            const int i = a.first + b.first;
            const int j = a.second + b.second;
            out.set(i, j, out.coeff(i, j) + ca * cb);
        }
    return out;
}

HoloPoly HoloPoly::operator*(cplx s) const {
    HoloPoly out;
    for (const auto& [k, c] : terms_) out.set(k.first, k.second, c * s);
    return out;
}

HoloFn HoloPoly::fn() const {
    return [p = *this](const Point& z) { return p(z); };
}

std::vector<UniPoly> HoloPoly::by_z2() const {
    std::vector<UniPoly> out(std::max(0, degree_z2() + 1));
    for (const auto& [k, c] : terms_) {
        auto& row = out[k.second];
        if (row.size() <= static_cast<std::size_t>(k.first)) row.resize(k.first + 1, cplx(0.0));
        row[k.first] = c;
    }
    return out;
}

std::vector<UniPoly> HoloPoly::by_z1() const {
    std::vector<UniPoly> out(std::max(0, degree_z1() + 1));
    for (const auto& [k, c] : terms_) {
        auto& row = out[k.first];
        if (row.size() <= static_cast<std::size_t>(k.second)) row.resize(k.second + 1, cplx(0.0));
        row[k.second] = c;
    }
    return out;
}

namespace {

// coefficients of (b + lambda d)^n
UniPoly binomial_power(cplx b, cplx d, int n) {
    UniPoly out(n + 1);
    double binom = 1.0;
    for (int k = 0; k <= n; ++k) {
        out[k] = binom * std::pow(b, n - k) * std::pow(d, k);
        binom = binom * (n - k) / (k + 1);
    }
    return out;
}

}  // namespace

UniPoly restrict_to_line(const HoloPoly& f, const Point& base, const Point& dir) {
    const int deg = std::max(0, f.degree());
    UniPoly out(deg + 1, cplx(0.0));
    std::map<int, UniPoly> pow1;
    std::map<int, UniPoly> pow2;
    for (const auto& [k, c] : f.terms()) {
        auto& a = pow1.try_emplace(k.first, binomial_power(base(0), dir(0), k.first)).first->second;
        auto& b = pow2.try_emplace(k.second, binomial_power(base(1), dir(1), k.second)).first->second;
        for (std::size_t p = 0; p < a.size(); ++p)
            for (std::size_t q = 0; q < b.size(); ++q) out[p + q] += c * a[p] * b[q];
    }
    return out;
}

}  // namespace holodiv

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "parabifurc/errors.hpp"

namespace parabifurc {

using cplx = std::complex<double>;

/// Truncated bivariate Taylor expansion
///
///     F(z0 + u, w0 + v) = sum_{i <= kz, j <= kw} c(i, j) u^i v^j
///
/// with c(i, j) = d_z^i d_w^j F / (i! j!). Products and compositions are
/// exact truncated-series algebra.
class Jet2 {
  public:
    Jet2() : Jet2(0, 0) {}
    Jet2(int kz, int kw) : kz_(kz), kw_(kw), c_(static_cast<std::size_t>((kz + 1) * (kw + 1))) {
        if (kz < 0 || kw < 0) throw OrderError("negative jet order");
    }

    static Jet2 constant(cplx value, int kz, int kw) {
        Jet2 j(kz, kw);
        j(0, 0) = value;
        return j;
    }

    /// Jet of (u, v) -> z0 + u.
    static Jet2 identity_z(cplx z0, int kz, int kw) {
        Jet2 j(kz, kw);
        j(0, 0) = z0;
        if (kz >= 1) j(1, 0) = 1.0;
        return j;
    }

    /// Jet of (u, v) -> w0 + v.
    static Jet2 identity_w(cplx w0, int kz, int kw) {
        Jet2 j(kz, kw);
        j(0, 0) = w0;
        if (kw >= 1) j(0, 1) = 1.0;
        return j;
    }

    /// Univariate jet (kw = 0) from Taylor coefficients.
    static Jet2 from_coefficients(std::span<const cplx> coeffs) {
        Jet2 j(static_cast<int>(coeffs.size()) - 1, 0);
        std::copy(coeffs.begin(), coeffs.end(), j.c_.begin());
        return j;
    }

    int kz() const noexcept { return kz_; }
    int kw() const noexcept { return kw_; }

    cplx& operator()(int i, int j) { return c_[static_cast<std::size_t>(i * (kw_ + 1) + j)]; }
    const cplx& operator()(int i, int j) const {
        return c_[static_cast<std::size_t>(i * (kw_ + 1) + j)];
    }

    /// Coefficient or zero when (i, j) lies outside the stored orders.
    cplx at(int i, int j) const {
        if (i < 0 || j < 0 || i > kz_ || j > kw_) return {};
        return (*this)(i, j);
    }

    cplx value() const { return c_[0]; }

    /// d_z^i d_w^j F at the base point.
    cplx derivative(int i, int j) const { return at(i, j) * factorial(i) * factorial(j); }

    std::span<const cplx> coefficients() const { return c_; }

    Jet2 truncated(int kz, int kw) const {
        Jet2 r(kz, kw);
        for (int i = 0; i <= std::min(kz, kz_); ++i)
            for (int j = 0; j <= std::min(kw, kw_); ++j) r(i, j) = (*this)(i, j);
        return r;
    }

    /// Evaluates the truncated polynomial at offsets (u, v).
    cplx evaluate(cplx u, cplx v = 0.0) const {
        cplx acc = 0.0;
        for (int i = kz_; i >= 0; --i) {
            cplx row = 0.0;
            for (int j = kw_; j >= 0; --j) row = row * v + (*this)(i, j);
            acc = acc * u + row;
        }
        return acc;
    }

    Jet2& operator+=(const Jet2& o) {
        require_same_shape(o);
        for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
        return *this;
    }
    Jet2& operator-=(const Jet2& o) {
        require_same_shape(o);
        for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
        return *this;
    }
    Jet2& operator*=(cplx s) {
        for (auto& x : c_) x *= s;
        return *this;
    }

    friend Jet2 operator+(Jet2 a, const Jet2& b) { return a += b; }
    friend Jet2 operator-(Jet2 a, const Jet2& b) { return a -= b; }
    friend Jet2 operator*(Jet2 a, cplx s) { return a *= s; }
    friend Jet2 operator*(cplx s, Jet2 a) { return a *= s; }
    friend Jet2 operator-(Jet2 a) { return a *= -1.0; }

    friend Jet2 operator*(const Jet2& a, const Jet2& b) {
        a.require_same_shape(b);
        Jet2 r(a.kz_, a.kw_);
        for (int i1 = 0; i1 <= a.kz_; ++i1)
            for (int j1 = 0; j1 <= a.kw_; ++j1) {
                const cplx x = a(i1, j1);
                if (x == cplx{}) continue;
                for (int i2 = 0; i1 + i2 <= a.kz_; ++i2)
                    for (int j2 = 0; j1 + j2 <= a.kw_; ++j2) r(i1 + i2, j1 + j2) += x * b(i2, j2);
            }
        return r;
    }

    static double factorial(int n) {
        double f = 1.0;
        for (int k = 2; k <= n; ++k) f *= k;
        return f;
    }

  private:
    void require_same_shape(const Jet2& o) const {
        if (o.kz_ != kz_ || o.kw_ != kw_) throw OrderError("jet shape mismatch");
    }

    int kz_;
    int kw_;
    std::vector<cplx> c_;
};

/// Substitutes `inner` into `outer`: outer holds the Taylor coefficients of
/// F(z, w) at (inner.value(), w0), and the result is F(inner(u, v), w0 + v)
/// truncated to inner's orders. Requires outer.kz() >= inner.kz() + inner.kw().
inline Jet2 compose(const Jet2& outer, const Jet2& inner) {
    const int kz = inner.kz();
    const int kw = inner.kw();
    if (outer.kz() < kz + kw) throw OrderError("outer jet order too small for composition");
    Jet2 nil = inner;
    nil(0, 0) = 0.0;

    Jet2 result(kz, kw);
    Jet2 power = Jet2::constant(1.0, kz, kw);
    for (int i = 0; i <= kz + kw; ++i) {
        for (int j = 0; j <= std::min(outer.kw(), kw); ++j) {
            const cplx a = outer(i, j);
            if (a == cplx{}) continue;
            // power * v^j
            for (int p = 0; p <= kz; ++p)
                for (int q = 0; q + j <= kw; ++q) result(p, q + j) += a * power(p, q);
        }
        if (i < kz + kw) power = power * nil;
    }
    return result;
}

/// d/du of a univariate jet; the result has order kz - 1.
inline Jet2 derivative_z(const Jet2& f) {
    if (f.kz() == 0) return Jet2(0, f.kw());
    Jet2 r(f.kz() - 1, f.kw());
    for (int i = 0; i < f.kz(); ++i)
        for (int j = 0; j <= f.kw(); ++j) r(i, j) = f(i + 1, j) * static_cast<double>(i + 1);
    return r;
}

/// Antiderivative in u with zero constant term; the result has order kz + 1.
inline Jet2 integral_z(const Jet2& f) {
    Jet2 r(f.kz() + 1, f.kw());
    for (int i = 0; i <= f.kz(); ++i)
        for (int j = 0; j <= f.kw(); ++j) r(i + 1, j) = f(i, j) / static_cast<double>(i + 1);
    return r;
}

/// 1 / f for a univariate jet with f.value() != 0.
inline Jet2 reciprocal(const Jet2& f) {
    if (f.kw() != 0) throw OrderError("reciprocal expects a univariate jet");
    const cplx a0 = f.value();
    if (std::abs(a0) == 0.0) throw DomainError("reciprocal of a jet with zero value");
    Jet2 r(f.kz(), 0);
    r(0, 0) = 1.0 / a0;
    for (int n = 1; n <= f.kz(); ++n) {
        cplx s = 0.0;
        for (int k = 1; k <= n; ++k) s += f(k, 0) * r(n - k, 0);
        r(n, 0) = -s / a0;
    }
    return r;
}

/// Compositional inverse of a univariate jet f with f'(base) != 0.
/// `base` is the expansion point of f; the result is the Taylor expansion of
/// f^{-1} at f.value() and satisfies compose(result, f) = base + u.
inline Jet2 revert(const Jet2& f, cplx base) {
    if (f.kw() != 0) throw OrderError("revert expects a univariate jet");
    const int n = f.kz();
    if (n < 1 || std::abs(f(1, 0)) == 0.0) throw DomainError("revert needs a nonzero linear term");
    const cplx b1 = f(1, 0);
    Jet2 g(n, 0);
    g(0, 0) = base;
    g(1, 0) = 1.0 / b1;
    cplx b1pow = b1;
    for (int k = 2; k <= n; ++k) {
        b1pow *= b1;
        const Jet2 r = compose(g, f);
        g(k, 0) -= r(k, 0) / b1pow;
    }
    return g;
}

}  // namespace parabifurc

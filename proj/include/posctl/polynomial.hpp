#pragma once

// Real polynomials in ascending coefficient order, with complex root finding
// (Aberth-Ehrlich), Sturm sequences and the Routh-Hurwitz array.

#include <algorithm>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "error.hpp"
#include "linalg.hpp"

namespace posctl {

class Polynomial {
public:
    Polynomial() = default;
    Polynomial(std::initializer_list<double> c) : c_(c) { trim(); }
    explicit Polynomial(std::vector<double> c) : c_(std::move(c)) { trim(); }

    static Polynomial constant(double v) { return Polynomial(std::vector<double>{v}); }
    static Polynomial monomial(std::size_t k, double v = 1.0) {
        std::vector<double> c(k + 1, 0.0);
        c[k] = v;
        return Polynomial(std::move(c));
    }

    /// -1 for the zero polynomial.
    [[nodiscard]] int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
    [[nodiscard]] bool is_zero() const noexcept { return c_.empty(); }
    [[nodiscard]] const std::vector<double>& coeffs() const noexcept { return c_; }
    [[nodiscard]] double coeff(std::size_t k) const noexcept { return k < c_.size() ? c_[k] : 0.0; }
    [[nodiscard]] double leading() const noexcept { return c_.empty() ? 0.0 : c_.back(); }

    [[nodiscard]] double operator()(double x) const noexcept {
        double r = 0.0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it)
            r = r * x + *it;
        return r;
    }
    [[nodiscard]] Complex operator()(Complex x) const noexcept {
        Complex r = 0.0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it)
            r = r * x + *it;
        return r;
    }

    [[nodiscard]] Polynomial derivative() const {
        if (c_.size() <= 1)
            return {};
        std::vector<double> d(c_.size() - 1);
        for (std::size_t k = 1; k < c_.size(); ++k)
            d[k - 1] = static_cast<double>(k) * c_[k];
        return Polynomial(std::move(d));
    }

    /// p(-x)
    [[nodiscard]] Polynomial reflected() const {
        std::vector<double> c = c_;
        for (std::size_t k = 1; k < c.size(); k += 2)
            c[k] = -c[k];
        return Polynomial(std::move(c));
    }

    /// Even and odd parts: p(s) = E(s^2) + s O(s^2).
    [[nodiscard]] std::pair<Polynomial, Polynomial> even_odd() const {
        std::vector<double> e, o;
        for (std::size_t k = 0; k < c_.size(); ++k)
            (k % 2 == 0 ? e : o).push_back(c_[k]);
        return {Polynomial(std::move(e)), Polynomial(std::move(o))};
    }

    /// |p(i w)|^2 as a polynomial in t = w^2.
    [[nodiscard]] Polynomial magnitude_squared_on_axis() const {
        auto [e, o] = even_odd();
        const Polynomial er = e.reflected(), orf = o.reflected();
        return er * er + Polynomial::monomial(1) * orf * orf;
    }

    Polynomial& operator+=(const Polynomial& o) {
        if (o.c_.size() > c_.size())
            c_.resize(o.c_.size(), 0.0);
        for (std::size_t k = 0; k < o.c_.size(); ++k)
            c_[k] += o.c_[k];
        trim();
        return *this;
    }
    Polynomial& operator-=(const Polynomial& o) { return *this += -o; }
    Polynomial& operator*=(double s) {
        for (double& v : c_)
            v *= s;
        trim();
        return *this;
    }
    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator-(Polynomial a) { return a *= -1.0; }
    friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
    friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        if (a.is_zero() || b.is_zero())
            return {};
        std::vector<double> c(a.c_.size() + b.c_.size() - 1, 0.0);
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j)
                c[i + j] += a.c_[i] * b.c_[j];
        return Polynomial(std::move(c));
    }
    friend bool operator==(const Polynomial&, const Polynomial&) = default;

    /// Quotient and remainder of long division.
    [[nodiscard]] std::pair<Polynomial, Polynomial> divide(const Polynomial& d) const {
        if (d.is_zero())
            throw NumericalError("polynomial division by zero");
        if (degree() < d.degree())
            return {Polynomial{}, *this};
        std::vector<double> r = c_, q(c_.size() - d.c_.size() + 1, 0.0);
        const double lead = d.leading();
        for (std::size_t k = q.size(); k-- > 0;) {
            const double f = r[k + d.c_.size() - 1] / lead;
            q[k] = f;
            for (std::size_t j = 0; j < d.c_.size(); ++j)
                r[k + j] -= f * d.c_[j];
        }
        r.resize(d.c_.size() - 1);
        return {Polynomial(std::move(q)), Polynomial(std::move(r))};
    }

    /// Zeroes coefficients below rel * max|c| and trims.
    [[nodiscard]] Polynomial chopped(double rel) const {
        double m = 0.0;
        for (double v : c_)
            m = std::max(m, std::abs(v));
        std::vector<double> c = c_;
        for (double& v : c)
            if (std::abs(v) <= rel * m)
                v = 0.0;
        return Polynomial(std::move(c));
    }

    [[nodiscard]] double max_abs_coeff() const noexcept {
        double m = 0.0;
        for (double v : c_)
            m = std::max(m, std::abs(v));
        return m;
    }

private:
    void trim() {
        while (!c_.empty() && c_.back() == 0.0)
            c_.pop_back();
    }
    std::vector<double> c_;
};

/// All complex roots, by Aberth-Ehrlich simultaneous iteration.
[[nodiscard]] inline std::vector<Complex> roots(const Polynomial& p) {
    const int n = p.degree();
    if (n < 1)
        return {};
    std::vector<double> a(p.coeffs());
    const double lead = a.back();
    for (double& v : a)
        v /= lead;
    if (n == 1)
        return {Complex(-a[0], 0.0)};
    double radius = 0.0;
    for (int k = 0; k < n; ++k)
        radius = std::max(radius, std::pow(std::abs(a[static_cast<std::size_t>(k)]), 1.0 / (n - k)));
    radius = std::max(radius, 1e-3);
    const Polynomial monic(a);
    const Polynomial dmonic = monic.derivative();
    std::vector<Complex> z(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
        z[static_cast<std::size_t>(k)] =
            std::polar(radius, 2 * std::numbers::pi * (k + 0.25) / n + 0.4);
    for (int iter = 0; iter < 1000; ++iter) {
        double worst = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) {
            const Complex pv = monic(z[i]);
            if (pv == Complex(0.0))
                continue;
            const Complex ratio = pv / dmonic(z[i]);
            Complex sum = 0.0;
            for (std::size_t j = 0; j < z.size(); ++j)
                if (j != i)
                    sum += 1.0 / (z[i] - z[j]);
            const Complex w = ratio / (1.0 - ratio * sum);
            if (std::isfinite(w.real()) && std::isfinite(w.imag())) {
                z[i] -= w;
                worst = std::max(worst, std::abs(w) / std::max(1.0, std::abs(z[i])));
            }
        }
        if (worst < 1e-15)
            break;
    }
    for (Complex& r : z)
        if (std::abs(r.imag()) <= 1e-12 * std::max(1.0, std::abs(r)))
            r = Complex(r.real(), 0.0);
    std::sort(z.begin(), z.end(), [](Complex x, Complex y) {
        return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
    });
    return z;
}

/// Sturm sequence of p (p, p', -rem, ...), with relative chopping of noise.
class SturmSequence {
public:
    explicit SturmSequence(const Polynomial& p) {
        seq_.push_back(p);
        if (p.degree() < 1)
            return;
        seq_.push_back(p.derivative());
        const double scale = std::max(1.0, p.max_abs_coeff());
        while (seq_.back().degree() > 0) {
            Polynomial r = -seq_[seq_.size() - 2].divide(seq_.back()).second;
            r = r.chopped(1e-12);
            if (r.is_zero() || r.max_abs_coeff() <= 1e-13 * scale)
                break;
            seq_.push_back(r);
        }
    }

    /// Sign variations at x.
    [[nodiscard]] int variations(double x) const {
        int count = 0;
        double prev = 0.0;
        for (const Polynomial& q : seq_) {
            const double v = q(x);
            if (v == 0.0)
                continue;
            if (prev != 0.0 && (v > 0) != (prev > 0))
                ++count;
            prev = v;
        }
        return count;
    }

    [[nodiscard]] int variations_at_infinity() const {
        int count = 0;
        double prev = 0.0;
        for (const Polynomial& q : seq_) {
            const double v = q.leading();
            if (v == 0.0)
                continue;
            if (prev != 0.0 && (v > 0) != (prev > 0))
                ++count;
            prev = v;
        }
        return count;
    }

    /// Distinct real roots in (a, b].
    [[nodiscard]] int count(double a, double b) const { return variations(a) - variations(b); }

private:
    std::vector<Polynomial> seq_;
};

enum class HurwitzVerdict { stable, unstable, marginal };

/// Routh-Hurwitz test of a real polynomial. A vanishing pivot is resolved by
/// root location: roots within 1e-9 of the imaginary axis make it marginal.
[[nodiscard]] inline HurwitzVerdict routh_hurwitz(const Polynomial& p) {
    const int n = p.degree();
    if (n < 0)
        throw NumericalError("routh_hurwitz: zero polynomial");
    if (n == 0)
        return HurwitzVerdict::stable;
    const double sgn = p.leading() > 0 ? 1.0 : -1.0;
    // Descending coefficients.
    std::vector<double> d(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k)
        d[static_cast<std::size_t>(k)] = sgn * p.coeff(static_cast<std::size_t>(n - k));
    std::vector<double> r0, r1;
    for (std::size_t k = 0; k < d.size(); ++k)
        (k % 2 == 0 ? r0 : r1).push_back(d[k]);
    const double scale = std::max(1.0, p.max_abs_coeff() / std::abs(p.leading()));
    bool vanished = false;
    std::vector<double> first{r0[0]};
    while (!r1.empty()) {
        if (std::abs(r1[0]) <= 1e-9 * scale) {
            vanished = true;
            break;
        }
        first.push_back(r1[0]);
        std::vector<double> next;
        for (std::size_t k = 0; k + 1 < r0.size(); ++k) {
            const double b = k + 1 < r1.size() ? r1[k + 1] : 0.0;
            next.push_back((r1[0] * r0[k + 1] - r0[0] * b) / r1[0]);
        }
        r0 = std::move(r1);
        r1 = std::move(next);
    }
    if (!vanished) {
        for (double v : first)
            if (v <= 0.0)
                return HurwitzVerdict::unstable;
        return HurwitzVerdict::stable;
    }
    double worst = -std::numeric_limits<double>::infinity();
    for (Complex z : roots(p))
        worst = std::max(worst, z.real());
    if (worst > 1e-9)
        return HurwitzVerdict::unstable;
    return worst >= -1e-9 ? HurwitzVerdict::marginal : HurwitzVerdict::stable;
}

}  // namespace posctl

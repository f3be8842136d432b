#pragma once

// Characteristic quasipolynomials of single-delay linear DDEs:
//
//     Delta(s) = P(s) + exp(-s*tau) * Q(s),
//     P(s) = s^n + a[n-1] s^(n-1) + ... + a[0],
//     Q(s) = b[m] s^m + ... + b[0].
//
// Coefficients are stored in ascending order. The leading 1 of P is implicit.

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "delaylab/error.hpp"

namespace delaylab {

using cplx = std::complex<double>;

enum class DelayType { Retarded, Neutral };

/// Value returned by the evaluation routines: the quasipolynomial value and
/// the sum of term magnitudes, used as the denominator of relative residuals.
struct Evaluation {
    cplx value{};
    double scale{0.0};

    [[nodiscard]] double relative() const noexcept {
        return scale > 0.0 ? std::abs(value) / scale : std::abs(value);
    }
};

namespace detail {

inline double falling_factorial(int i, int k) noexcept {
    double r = 1.0;
    for (int j = 0; j < k; ++j) r *= static_cast<double>(i - j);
    return r;
}

inline double binomial(int n, int k) noexcept {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int j = 1; j <= k; ++j) r = r * static_cast<double>(n - k + j) / static_cast<double>(j);
    return r;
}

/// k-th derivative of sum_i c[i] s^i at s, plus the matching magnitude sum.
/// `leading_one` appends an implicit coefficient 1 at degree c.size().
template <typename R>
std::pair<std::complex<R>, R> poly_derivative(std::span<const double> c, bool leading_one, std::complex<R> s, int k) {
    const int deg = static_cast<int>(c.size()) - (leading_one ? 0 : 1);
    if (k > deg) return {{0, 0}, 0};
    const R as = std::abs(s);
    std::complex<R> acc{0, 0};
    R mag = 0;
    for (int i = deg; i >= k; --i) {
        const R ci = (leading_one && i == deg) ? R(1) : R(c[static_cast<std::size_t>(i)]);
        const R w = ci * static_cast<R>(falling_factorial(i, k));
        acc = acc * s + w;
        mag = mag * as + std::abs(w);
    }
    return {acc, mag};
}

/// Coefficients of p(s0 + w) in powers of w.
inline std::vector<double> taylor_shift(std::span<const double> c, double s0) {
    const std::size_t n = c.size();
    std::vector<double> out(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double sum = 0.0;
        for (std::size_t i = j; i < n; ++i)
            sum += c[i] * binomial(static_cast<int>(i), static_cast<int>(j)) *
                   std::pow(s0, static_cast<double>(i - j));
        out[j] = sum;
    }
    return out;
}

inline bool all_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace detail

struct Quasipolynomial {
    int n{1};
    int m{0};
    std::vector<double> a{0.0};
    std::vector<double> b{0.0};
    double tau{1.0};

    /// Throws Error(invalid_argument) when the structural invariants fail.
    void validate() const {
        if (n < 1) throw Error(Errc::invalid_argument, "n must be at least 1");
        if (m < 0 || m > n) throw Error(Errc::invalid_argument, "m must satisfy 0 <= m <= n");
        if (a.size() != static_cast<std::size_t>(n))
            throw Error(Errc::invalid_argument, "length(a) must equal n");
        if (b.size() != static_cast<std::size_t>(m + 1))
            throw Error(Errc::invalid_argument, "length(b) must equal m+1");
        if (!(tau > 0.0) || !std::isfinite(tau))
            throw Error(Errc::invalid_argument, "tau must be finite and positive");
        if (!detail::all_finite(a) || !detail::all_finite(b))
            throw Error(Errc::non_finite_argument, "non-finite coefficient");
    }

    [[nodiscard]] int degree() const noexcept { return n + m + 1; }

    [[nodiscard]] DelayType classify() const noexcept {
        return m < n ? DelayType::Retarded : DelayType::Neutral;
    }

    /// Highest derivative order accepted by evaluate_derivative.
    [[nodiscard]] int max_derivative_order() const noexcept { return n + m + 1 + 5; }

    friend bool operator==(const Quasipolynomial&, const Quasipolynomial&) = default;
};

inline int degree(const Quasipolynomial& qp) noexcept { return qp.degree(); }
inline DelayType classify(const Quasipolynomial& qp) noexcept { return qp.classify(); }

/// k-th derivative of Delta at s:
///   P^(k)(s) + exp(-s tau) * sum_j C(k,j) (-tau)^(k-j) Q^(j)(s).
/// Accumulated in extended precision: near multiple roots the two parts
/// cancel to many digits.
inline Evaluation evaluate_derivative(const Quasipolynomial& qp, cplx s, int k) {
    using R = long double;
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
        throw Error(Errc::non_finite_argument, "non-finite argument");
    if (k < 0) throw Error(Errc::invalid_argument, "derivative order must be non-negative");
    if (k > qp.max_derivative_order())
        throw Error(Errc::derivative_order_too_large, "derivative order too large");

    const std::complex<R> sl{s.real(), s.imag()};
    const auto [pv, pmag] = detail::poly_derivative<R>(qp.a, true, sl, k);
    const std::complex<R> e = std::exp(-sl * static_cast<R>(qp.tau));
    const R ae = std::abs(e);

    std::complex<R> delayed{0, 0};
    R delayed_mag = 0;
    R tpow = 1;  // tau^(k-j), walked from j = k downwards
    for (int j = k; j >= 0; --j) {
        if (j <= qp.m) {
            const auto [qv, qmag] = detail::poly_derivative<R>(qp.b, false, sl, j);
            const R coef = static_cast<R>(detail::binomial(k, j)) * tpow * (((k - j) % 2) ? R(-1) : R(1));
            delayed += coef * qv;
            delayed_mag += std::abs(coef) * qmag;
        }
        tpow *= static_cast<R>(qp.tau);
    }
    const std::complex<R> v = pv + e * delayed;
    return {cplx{static_cast<double>(v.real()), static_cast<double>(v.imag())},
            static_cast<double>(pmag + ae * delayed_mag)};
}

inline Evaluation evaluate(const Quasipolynomial& qp, cplx s) {
    return evaluate_derivative(qp, s, 0);
}

/// Change of variable z = tau (s - s0). The result has unit delay and is monic:
///   Delta~(z) = tau^n Delta(s0 + z / tau).
/// z is a root of multiplicity mu of the result iff s0 + z/tau is one of qp.
inline Quasipolynomial normalize(const Quasipolynomial& qp, double s0) {
    qp.validate();
    std::vector<double> p(qp.a);
    p.push_back(1.0);
    const std::vector<double> ps = detail::taylor_shift(p, s0);
    const std::vector<double> qs = detail::taylor_shift(qp.b, s0);

    const double ex = std::exp(-s0 * qp.tau);
    Quasipolynomial out;
    out.n = qp.n;
    out.m = qp.m;
    out.tau = 1.0;
    out.a.resize(static_cast<std::size_t>(qp.n));
    out.b.resize(static_cast<std::size_t>(qp.m + 1));
    for (int k = 0; k < qp.n; ++k)
        out.a[static_cast<std::size_t>(k)] =
            ps[static_cast<std::size_t>(k)] * std::pow(qp.tau, qp.n - k);
    for (int k = 0; k <= qp.m; ++k)
        out.b[static_cast<std::size_t>(k)] =
            ex * qs[static_cast<std::size_t>(k)] * std::pow(qp.tau, qp.n - k);
    return out;
}

/// |Delta(s)| = |Delta~(z)| * factor for s = s0 + z/tau.
inline double normalization_condition_factor(const Quasipolynomial& qp) {
    return std::pow(qp.tau, -qp.n);
}

}  // namespace delaylab

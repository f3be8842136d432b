#pragma once

// Output forms for a quasipolynomial with a root of maximal multiplicity
// M = n+m+1 at s0. With z = tau (s - s0) and Delta~ the normalized form,
//
//     Delta~(z) = z^M * integral_0^1 w(t) exp(-z t) dt,      w(t) = c t^m (1-t)^n
//               = z^M * c * B(m+1, n+1) * M(m+1, n+m+2, -z),
//
// where M(a, b, z) is Kummer's confluent hypergeometric function. Every form
// is checked numerically against direct evaluation before it is reported.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "delaylab/linalg.hpp"
#include "delaylab/quasipoly.hpp"

namespace delaylab {

struct TaylorRemainder {
    Quasipolynomial normalized;
    int multiplicity{0};
    /// r_k = Delta~^(M+k)(0) / (M+k)!
    std::vector<double> coeffs;
};

struct KummerParams {
    double a{0.0};
    double b{0.0};
    double c{0.0};

    friend bool operator==(const KummerParams&, const KummerParams&) = default;
};

struct FactorizedForm {
    double s0{0.0};
    int multiplicity{0};
    /// Ascending polynomial coefficients of w(t) on [0, 1].
    std::vector<double> weight_coeffs;
    bool beta_weight{false};
    std::optional<KummerParams> hyper;
    double validation_residual{0.0};
};

/// Probe points used to validate factorized forms.
inline const std::array<cplx, 8>& factorization_probes() {
    static const std::array<cplx, 8> probes{cplx{1, 0}, cplx{-1, 0}, cplx{2, 0},  cplx{-2, 0},
                                            cplx{0, 1}, cplx{0, -1}, cplx{1, 1}, cplx{-3, 0}};
    return probes;
}

namespace detail {

/// Taylor coefficient of z^j at 0 for a unit-delay quasipolynomial, with the
/// matching magnitude sum.
inline std::pair<double, double> unit_delay_taylor(const Quasipolynomial& q, int j) {
    double v = 0.0, mag = 0.0;
    if (j < q.n) {
        v += q.a[static_cast<std::size_t>(j)];
        mag += std::abs(q.a[static_cast<std::size_t>(j)]);
    } else if (j == q.n) {
        v += 1.0;
        mag += 1.0;
    }
    for (int i = 0; i <= std::min(j, q.m); ++i) {
        const double t = q.b[static_cast<std::size_t>(i)] * (((j - i) % 2) ? -1.0 : 1.0) / std::tgamma(j - i + 1.0);
        v += t;
        mag += std::abs(t);
    }
    return {v, mag};
}

template <typename F>
cplx gauss64(F&& f) {
    return boost::math::quadrature::gauss<double, 64>::integrate(std::forward<F>(f), 0.0, 1.0);
}

inline cplx weighted_laplace(const std::vector<double>& w, cplx z) {
    return gauss64([&](double t) {
        double p = 0.0;
        for (std::size_t k = w.size(); k-- > 0;) p = p * t + w[k];
        return p * std::exp(-z * t);
    });
}

inline double validate_integral(const Quasipolynomial& qn, int M, const std::vector<double>& w,
                                const std::vector<cplx>& probes) {
    double worst = 0.0;
    for (const cplx& z : probes) {
        const Evaluation e = evaluate(qn, z);
        const cplx rhs = std::pow(z, M) * weighted_laplace(w, z);
        worst = std::max(worst, std::abs(e.value - rhs) / e.scale);
    }
    return worst;
}

}  // namespace detail

inline constexpr int kMaxTaylorOrder = 170;

/// Remainder after dividing the normalized quasipolynomial by z^M.
inline TaylorRemainder deflate_normalized(const Quasipolynomial& qn, int M, int length = 16, double tol = 1e-8) {
    qn.validate();
    if (M < 1 || length < 1) throw Error(Errc::invalid_argument, "multiplicity and length must be positive");
    if (M + length > kMaxTaylorOrder) throw Error(Errc::order_exceeds_cap, "order exceeds cap");
    for (int k = 0; k < M; ++k) {
        const auto [v, mag] = detail::unit_delay_taylor(qn, k);
        if (std::abs(v) > tol * std::max(mag, 1e-300))
            throw Error(Errc::multiplicity_condition_violated, "multiplicity condition violated");
    }
    TaylorRemainder out;
    out.normalized = qn;
    out.multiplicity = M;
    for (int k = 0; k < length; ++k) out.coeffs.push_back(detail::unit_delay_taylor(qn, M + k).first);
    const auto [r0, mag0] = detail::unit_delay_taylor(qn, M);
    if (std::abs(r0) <= tol * mag0)
        throw Error(Errc::multiplicity_condition_violated,
                    "multiplicity condition violated: remainder vanishes at the origin");
    return out;
}

inline TaylorRemainder deflate(const Quasipolynomial& qp, double s0, int M, int length = 16) {
    return deflate_normalized(normalize(qp, s0), M, length);
}

/// Integral factorization of a maximal-multiplicity quasipolynomial.
inline FactorizedForm integral_form(const Quasipolynomial& qp, double s0) {
    const int n = qp.n, m = qp.m, M = qp.degree();
    const TaylorRemainder rem = deflate(qp, s0, M, std::max(M, 4));
    const std::vector<cplx> probes(factorization_probes().begin(), factorization_probes().end());

    FactorizedForm form;
    form.s0 = s0;
    form.multiplicity = M;

    // Beta-type weight c t^m (1-t)^n.
    const double c = rem.coeffs.front() / std::beta(m + 1.0, n + 1.0);
    std::vector<double> w(static_cast<std::size_t>(n + m + 1), 0.0);
    for (int k = 0; k <= n; ++k)
        w[static_cast<std::size_t>(m + k)] = c * detail::binomial(n, k) * ((k % 2) ? -1.0 : 1.0);
    double res = detail::validate_integral(rem.normalized, M, w, probes);
    if (res <= 1e-8) {
        form.weight_coeffs = std::move(w);
        form.beta_weight = true;
        form.hyper = KummerParams{m + 1.0, n + m + 2.0, c};
        form.validation_residual = res;
        return form;
    }

    // General weight of degree M-1 matching the first M remainder moments:
    //   r_k = (-1)^k / k! * sum_j w_j / (j + k + 1).
    Eigen::MatrixXd A(M, M);
    Eigen::VectorXd rhs(M);
    for (int k = 0; k < M; ++k) {
        for (int j = 0; j < M; ++j) A(k, j) = 1.0 / (j + k + 1.0);
        rhs(k) = rem.coeffs[static_cast<std::size_t>(k)] * std::tgamma(k + 1.0) * ((k % 2) ? -1.0 : 1.0);
    }
    const auto sol = detail::solve_equilibrated(A, rhs);
    if (!sol.x.empty()) {
        res = detail::validate_integral(rem.normalized, M, sol.x, probes);
        if (res <= 1e-8) {
            form.weight_coeffs = sol.x;
            form.validation_residual = res;
            return form;
        }
    }
    throw Error(Errc::factorization_not_representable, "factorization not representable");
}

/// Kummer's M(a, b, z) = sum_k (a)_k z^k / ((b)_k k!). For Re z < 0 the
/// transformation M(a, b, z) = e^z M(b-a, b, -z) avoids cancellation.
inline cplx kummer_M(double a, double b, cplx z) {
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw Error(Errc::non_finite_argument, "non-finite argument");
    if (!(a > 0.0) || !(b >= a)) throw Error(Errc::invalid_argument, "Kummer M requires a > 0 and b >= a");
    if (std::abs(z) > 50.0) throw Error(Errc::argument_outside_series_regime, "argument outside series regime");

    auto series = [](double p, double q, cplx x) {
        cplx sum{1.0, 0.0}, term{1.0, 0.0};
        for (int k = 0; k < 500; ++k) {
            term *= (p + k) / (q + k) * x / static_cast<double>(k + 1);
            sum += term;
            if (std::abs(term) < 1e-16 * std::abs(sum)) break;
        }
        return sum;
    };
    if (z.real() < 0.0) return std::exp(z) * series(b - a, b, -z);
    return series(a, b, z);
}

/// Hypergeometric factorization; needs the Beta-type integral weight.
inline FactorizedForm hypergeometric_form(const Quasipolynomial& qp, double s0) {
    FactorizedForm form = integral_form(qp, s0);
    if (!form.hyper) throw Error(Errc::hypergeometric_form_unavailable, "hypergeometric form unavailable");
    const Quasipolynomial qn = normalize(qp, s0);
    const int M = form.multiplicity;
    const double pref = form.hyper->c * std::beta(qp.m + 1.0, qp.n + 1.0);
    double worst = 0.0;
    for (const cplx& z : factorization_probes()) {
        const Evaluation e = evaluate(qn, z);
        const cplx rhs = std::pow(z, M) * pref * kummer_M(form.hyper->a, form.hyper->b, -z);
        worst = std::max(worst, std::abs(e.value - rhs) / e.scale);
    }
    if (worst > 1e-8) throw Error(Errc::hypergeometric_form_unavailable, "hypergeometric form unavailable");
    form.validation_residual = std::max(form.validation_residual, worst);
    return form;
}

/// Text rendering in the original variable s:
///   Delta(s) = (s - s0)^M * C * B(m+1, n+1) * M(m+1, n+m+2, -tau (s - s0)),  C = c tau^(M-n).
inline std::string render_factorized(const FactorizedForm& form, const Quasipolynomial& qp) {
    std::ostringstream os;
    os.precision(6);
    std::ostringstream shift;
    shift.precision(6);
    if (form.s0 == 0.0)
        shift << "s";
    else
        shift << "(s " << (form.s0 < 0.0 ? "+ " : "- ") << std::abs(form.s0) << ")";
    const int M = form.multiplicity;
    std::ostringstream scaled;
    scaled.precision(6);
    if (qp.tau == 1.0)
        scaled << shift.str();
    else
        scaled << qp.tau << " " << shift.str();
    if (form.hyper) {
        const double C = form.hyper->c * std::pow(qp.tau, M - qp.n);
        os << "Delta(s) = " << shift.str() << "^" << M << " * " << C << " * B(" << qp.m + 1 << ", " << qp.n + 1
           << ") * M(" << qp.m + 1 << ", " << qp.n + qp.m + 2 << ", -" << scaled.str() << ")";
    } else {
        os << "Delta(s) = tau^-" << qp.n << " z^" << M << " * int_0^1 w(t) exp(-z t) dt,  z = " << scaled.str()
           << ",  w(t) =";
        for (std::size_t k = 0; k < form.weight_coeffs.size(); ++k)
            os << (k ? " + " : " ") << form.weight_coeffs[k] << " t^" << k;
    }
    os.precision(3);
    os << "  [validation residual " << std::scientific << form.validation_residual << "]";
    return os.str();
}

}  // namespace delaylab

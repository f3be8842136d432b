#pragma once

// Partial pole placement by linear solves on the coefficients of Delta.
//
//  * Generic MID: a and b free, tau fixed. Imposes Delta^(k)(s0) = 0 for
//    k = 0..n+m, i.e. a root of maximal multiplicity n+m+1.
//  * Control-oriented MID: a fixed, b free. Imposes Delta^(k)(s0) = 0 for
//    k = 0..m; the next derivative F = Delta^(m+1)(s0) measures whether the
//    multiplicity reaches m+2.
//  * CRRID: a and b free. Imposes Delta(s_j) = 0 on n+m+1 distinct reals.
//
// In the MID modes the delayed unknowns are c_j = b_j exp(-s0 tau); b is
// recovered afterwards. This keeps the matrix entries polynomial in s0, tau.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <sstream>
#include <vector>

#include "delaylab/linalg.hpp"
#include "delaylab/quasipoly.hpp"

namespace delaylab {

enum class PlacementMode { GenericMID, ControlMID, CRRID };

struct RootTarget {
    double s0{0.0};
    int multiplicity{1};

    friend bool operator==(const RootTarget&, const RootTarget&) = default;
};

struct PlacementResult {
    Quasipolynomial qp;
    PlacementMode mode{PlacementMode::GenericMID};
    std::vector<RootTarget> targets;
    /// One relative residual per imposed condition.
    std::vector<double> residuals;
    double condition_estimate{0.0};
    /// Control-oriented mode only: F = Delta^(m+1)(s0) and its term scale.
    double admissibility_value{0.0};
    double admissibility_scale{0.0};

    [[nodiscard]] double max_residual() const {
        return residuals.empty() ? 0.0 : *std::max_element(residuals.begin(), residuals.end());
    }
    /// True when F vanishes relative to its scale, i.e. multiplicity >= m+2.
    [[nodiscard]] bool reaches_control_multiplicity(double tol = 1e-8) const {
        return std::abs(admissibility_value) <= tol * admissibility_scale;
    }
};

struct PlacementOptions {
    /// Solve for c_j = b_j exp(-s0 tau) instead of b_j.
    bool absorb_exponential{true};
    double condition_limit{1e12};
};

namespace detail {

/// d^k/ds^k [s^i] at s0.
inline double monomial_derivative(int i, int k, double s0) {
    if (k > i) return 0.0;
    return falling_factorial(i, k) * std::pow(s0, i - k);
}

/// d^k/ds^k [exp(-tau (s - s0)) s^i] at s0.
inline double shifted_delay_derivative(int i, int k, double s0, double tau) {
    double sum = 0.0;
    for (int j = 0; j <= std::min(k, i); ++j)
        sum += binomial(k, j) * std::pow(-tau, k - j) * monomial_derivative(i, j, s0);
    return sum;
}

[[noreturn]] inline void throw_degenerate(double s0, double tau, double cond) {
    std::ostringstream os;
    os << "degenerate placement system (s0=" << s0 << ", tau=" << tau << ", condition=" << cond << ")";
    throw Error(Errc::degenerate_placement_system, os.str());
}

inline void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) throw Error(Errc::non_finite_argument, std::string("non-finite ") + what);
}

}  // namespace detail

inline PlacementResult solve_generic_mid(int n, int m, double tau, double s0,
                                         const PlacementOptions& opt = {}) {
    if (n < 1 || m < 0 || m > n) throw Error(Errc::invalid_argument, "require 0 <= m <= n and n >= 1");
    detail::require_finite(s0, "s0");
    if (!(tau > 0.0) || !std::isfinite(tau)) throw Error(Errc::invalid_argument, "tau must be finite and positive");

    const int size = n + m + 1;
    const double ex = std::exp(-s0 * tau);
    Eigen::MatrixXd A(size, size);
    Eigen::VectorXd rhs(size);
    for (int k = 0; k < size; ++k) {
        for (int i = 0; i < n; ++i) A(k, i) = detail::monomial_derivative(i, k, s0);
        for (int i = 0; i <= m; ++i) {
            const double d = detail::shifted_delay_derivative(i, k, s0, tau);
            A(k, n + i) = opt.absorb_exponential ? d : d * ex;
        }
        rhs(k) = -detail::monomial_derivative(n, k, s0);
    }
    const auto sol = detail::solve_equilibrated(std::move(A), std::move(rhs));
    if (!(sol.condition <= opt.condition_limit)) detail::throw_degenerate(s0, tau, sol.condition);

    PlacementResult res;
    res.mode = PlacementMode::GenericMID;
    res.condition_estimate = sol.condition;
    res.qp.n = n;
    res.qp.m = m;
    res.qp.tau = tau;
    res.qp.a.assign(sol.x.begin(), sol.x.begin() + n);
    res.qp.b.assign(sol.x.begin() + n, sol.x.end());
    if (opt.absorb_exponential)
        for (double& bj : res.qp.b) bj /= ex;
    res.targets = {{s0, size}};
    for (int k = 0; k < size; ++k) res.residuals.push_back(evaluate_derivative(res.qp, s0, k).relative());
    return res;
}

inline PlacementResult solve_control_mid(std::span<const double> a, int m, double tau, double s0,
                                         const PlacementOptions& opt = {}) {
    const int n = static_cast<int>(a.size());
    if (n < 1 || m < 0 || m > n) throw Error(Errc::invalid_argument, "require 0 <= m <= n and length(a) >= 1");
    detail::require_finite(s0, "s0");
    if (!detail::all_finite(a)) throw Error(Errc::non_finite_argument, "non-finite coefficient");
    if (!(tau > 0.0) || !std::isfinite(tau)) throw Error(Errc::invalid_argument, "tau must be finite and positive");

    const int size = m + 1;
    const double ex = std::exp(-s0 * tau);
    Eigen::MatrixXd A(size, size);
    Eigen::VectorXd rhs(size);
    for (int k = 0; k < size; ++k) {
        for (int i = 0; i <= m; ++i) {
            const double d = detail::shifted_delay_derivative(i, k, s0, tau);
            A(k, i) = opt.absorb_exponential ? d : d * ex;
        }
        double pk = detail::monomial_derivative(n, k, s0);
        for (int i = 0; i < n; ++i) pk += a[static_cast<std::size_t>(i)] * detail::monomial_derivative(i, k, s0);
        rhs(k) = -pk;
    }
    const auto sol = detail::solve_equilibrated(std::move(A), std::move(rhs));
    if (!(sol.condition <= opt.condition_limit)) detail::throw_degenerate(s0, tau, sol.condition);

    PlacementResult res;
    res.mode = PlacementMode::ControlMID;
    res.condition_estimate = sol.condition;
    res.qp.n = n;
    res.qp.m = m;
    res.qp.tau = tau;
    res.qp.a.assign(a.begin(), a.end());
    res.qp.b = sol.x;
    if (opt.absorb_exponential)
        for (double& bj : res.qp.b) bj /= ex;
    res.targets = {{s0, m + 2}};
    for (int k = 0; k < size; ++k) res.residuals.push_back(evaluate_derivative(res.qp, s0, k).relative());

    // F from the c-form so it stays finite for any s0 tau.
    double f = detail::monomial_derivative(n, m + 1, s0);
    double fscale = std::abs(f);
    for (int i = 0; i < n; ++i) {
        const double t = a[static_cast<std::size_t>(i)] * detail::monomial_derivative(i, m + 1, s0);
        f += t;
        fscale += std::abs(t);
    }
    for (int i = 0; i <= m; ++i) {
        const double c = opt.absorb_exponential ? sol.x[static_cast<std::size_t>(i)]
                                                : sol.x[static_cast<std::size_t>(i)] * ex;
        const double t = c * detail::shifted_delay_derivative(i, m + 1, s0, tau);
        f += t;
        fscale += std::abs(t);
    }
    res.admissibility_value = f;
    res.admissibility_scale = fscale;
    return res;
}

inline PlacementResult solve_crrid(int n, int m, double tau, std::span<const double> roots,
                                   const PlacementOptions& opt = {}) {
    if (n < 1 || m < 0 || m > n) throw Error(Errc::invalid_argument, "require 0 <= m <= n and n >= 1");
    if (!(tau > 0.0) || !std::isfinite(tau)) throw Error(Errc::invalid_argument, "tau must be finite and positive");
    const int size = n + m + 1;
    if (static_cast<int>(roots.size()) != size)
        throw Error(Errc::invalid_argument, "CRRID needs exactly n+m+1 roots");
    if (!detail::all_finite(roots)) throw Error(Errc::non_finite_argument, "non-finite root");

    std::vector<double> r(roots.begin(), roots.end());
    std::sort(r.begin(), r.end(), std::greater<>());
    for (std::size_t j = 1; j < r.size(); ++j)
        if (std::abs(r[j - 1] - r[j]) <= 1e-12 * std::max(1.0, std::abs(r[j])))
            throw Error(Errc::roots_must_be_distinct, "roots must be distinct");

    Eigen::MatrixXd A(size, size);
    Eigen::VectorXd rhs(size);
    for (int j = 0; j < size; ++j) {
        const double s = r[static_cast<std::size_t>(j)];
        const double ex = std::exp(-s * tau);
        for (int i = 0; i < n; ++i) A(j, i) = std::pow(s, i);
        for (int i = 0; i <= m; ++i) A(j, n + i) = ex * std::pow(s, i);
        rhs(j) = -std::pow(s, n);
    }
    const auto sol = detail::solve_equilibrated(std::move(A), std::move(rhs));
    if (!(sol.condition <= opt.condition_limit)) detail::throw_degenerate(r.front(), tau, sol.condition);

    PlacementResult res;
    res.mode = PlacementMode::CRRID;
    res.condition_estimate = sol.condition;
    res.qp.n = n;
    res.qp.m = m;
    res.qp.tau = tau;
    res.qp.a.assign(sol.x.begin(), sol.x.begin() + n);
    res.qp.b.assign(sol.x.begin() + n, sol.x.end());
    for (double s : r) {
        res.targets.push_back({s, 1});
        res.residuals.push_back(evaluate(res.qp, s).relative());
    }
    return res;
}

}  // namespace delaylab

#pragma once

// Time-domain integration of
//
//     y^(n)(t) + sum_k a_k y^(k)(t) + sum_k b_k y^(k)(t - tau) = 0
//
// by the method of steps: classical RK4 on the companion system, delayed
// states read back from the computed trajectory with cubic Hermite
// interpolation (nodes carry both the state and its time derivative).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "delaylab/quasipoly.hpp"

namespace delaylab {

/// Initial function on [-tau, 0].
struct HistorySpec {
    enum class Kind { constant, polynomial, sampled };

    Kind kind{Kind::constant};
    /// constant: data[0]. polynomial: ascending coefficients in t.
    /// sampled: values at t = -tau + i * sample_step, i = 0..N-1, ending at 0.
    std::vector<double> data{0.0};
    double sample_step{0.0};

    static HistorySpec constant(double v) { return {Kind::constant, {v}, 0.0}; }
    static HistorySpec polynomial(std::vector<double> coeffs) { return {Kind::polynomial, std::move(coeffs), 0.0}; }
    static HistorySpec sampled(std::vector<double> samples, double step) {
        return {Kind::sampled, std::move(samples), step};
    }

    /// k-th derivative of the history at t (t <= 0).
    [[nodiscard]] double value(double t, int k) const {
        switch (kind) {
            case Kind::constant:
                return k == 0 ? data.at(0) : 0.0;
            case Kind::polynomial: {
                double acc = 0.0;
                for (std::size_t i = data.size(); i-- > static_cast<std::size_t>(k);) {
                    double ff = 1.0;
                    for (int j = 0; j < k; ++j) ff *= static_cast<double>(i) - j;
                    acc = acc * t + data[i] * ff;
                }
                return acc;
            }
            case Kind::sampled:
                return sampled_value(t, k);
        }
        return 0.0;
    }

    /// Scaled copy (the problem is linear in the history).
    [[nodiscard]] HistorySpec scaled(double factor) const {
        HistorySpec h = *this;
        for (double& v : h.data) v *= factor;
        return h;
    }

private:
    // Local cubic through the four nearest samples; derivatives of that cubic.
    [[nodiscard]] double sampled_value(double t, int k) const {
        const auto n = static_cast<long>(data.size());
        if (n < 4) throw Error(Errc::invalid_argument, "sampled history needs at least 4 samples");
        const double start = -sample_step * static_cast<double>(n - 1);
        const double u = (t - start) / sample_step;
        long i0 = static_cast<long>(std::floor(u)) - 1;
        i0 = std::clamp(i0, 0L, n - 4);
        // Lagrange basis in local coordinate x = u - i0 on nodes 0..3.
        const double x = u - static_cast<double>(i0);
        double coef[4] = {0, 0, 0, 0};  // monomial coefficients in x
        for (int j = 0; j < 4; ++j) {
            double poly[4] = {1, 0, 0, 0};
            double denom = 1.0;
            int deg = 0;
            for (int q = 0; q < 4; ++q) {
                if (q == j) continue;
                for (int d = deg + 1; d > 0; --d) poly[d] = poly[d - 1] - q * poly[d];
                poly[0] = -q * poly[0];
                ++deg;
                denom *= (j - q);
            }
            for (int d = 0; d < 4; ++d) coef[d] += data[static_cast<std::size_t>(i0 + j)] * poly[d] / denom;
        }
        if (k > 3) return 0.0;
        double acc = 0.0;
        for (int d = 3; d >= k; --d) {
            double ff = 1.0;
            for (int j = 0; j < k; ++j) ff *= d - j;
            acc = acc * x + coef[d] * ff;
        }
        return acc / std::pow(sample_step, k);
    }
};

struct SimulationResult {
    std::vector<double> t;
    std::vector<double> y;
    /// y, y', ..., y^(n-1) at the final time.
    std::vector<double> final_state;
    std::optional<double> decay_estimate;
};

/// Least-squares decay rate of y over [t1, t2]: the slope of log of the peak
/// envelope for oscillating signals, or of log|y| otherwise. With
/// `log_correction` a log(t) term is fitted as well, absorbing the
/// polynomial factor t^(mu-1) carried by a root of multiplicity mu.
inline double estimate_decay_rate(const SimulationResult& res, double t1, double t2, bool log_correction = true) {
    if (!(t2 > t1)) throw Error(Errc::invalid_argument, "window requires t1 < t2");
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < res.t.size(); ++i)
        if (res.t[i] >= t1 && res.t[i] <= t2) idx.push_back(i);
    if (idx.size() < 3) throw Error(Errc::signal_too_short, "signal too short");

    int sign_changes = 0;
    for (std::size_t k = 1; k < idx.size(); ++k)
        if ((res.y[idx[k - 1]] > 0.0) != (res.y[idx[k]] > 0.0)) ++sign_changes;

    std::vector<double> ts, ls;
    if (sign_changes >= 2) {
        for (std::size_t k = 1; k + 1 < idx.size(); ++k) {
            const double l = std::abs(res.y[idx[k - 1]]), c = std::abs(res.y[idx[k]]), r = std::abs(res.y[idx[k + 1]]);
            if (c > 0.0 && c >= l && c > r) {
                ts.push_back(res.t[idx[k]]);
                ls.push_back(std::log(c));
            }
        }
    }
    if (ts.size() < 3) {
        ts.clear();
        ls.clear();
        for (std::size_t i : idx)
            if (res.y[i] != 0.0) {
                ts.push_back(res.t[i]);
                ls.push_back(std::log(std::abs(res.y[i])));
            }
    }
    if (ts.size() < 3) throw Error(Errc::signal_too_short, "signal too short");

    const bool with_log = log_correction && ts.front() > 0.0 && ts.size() >= 4;
    const Eigen::Index cols = with_log ? 3 : 2;
    Eigen::MatrixXd A(static_cast<Eigen::Index>(ts.size()), cols);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(ts.size()));
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        A(r, 0) = 1.0;
        A(r, 1) = ts[i];
        if (with_log) A(r, 2) = std::log(ts[i]);
        rhs(r) = ls[i];
    }
    const Eigen::VectorXd coef = A.colPivHouseholderQr().solve(rhs);
    return coef(1);
}

struct SimulationOptions {
    /// Fit window for decay_estimate as fractions of T.
    double decay_window_begin{1.0 / 3.0};
    double decay_window_end{1.0};
};

inline SimulationResult simulate(const Quasipolynomial& qp, const HistorySpec& history, double T, double h,
                                 const SimulationOptions& opt = {}) {
    qp.validate();
    if (qp.classify() != DelayType::Retarded)
        throw Error(Errc::simulation_restricted_to_retarded, "simulation restricted to retarded type");
    if (!(T > 0.0) || !std::isfinite(T)) throw Error(Errc::invalid_argument, "T must be finite and positive");
    if (!(h > 0.0) || !std::isfinite(h)) throw Error(Errc::invalid_argument, "h must be finite and positive");
    if (h > qp.tau / 10.0 * (1.0 + 1e-12)) throw Error(Errc::step_too_large, "step too large: require h <= tau/10");
    if (history.kind == HistorySpec::Kind::sampled) {
        if (!(history.sample_step > 0.0) || history.sample_step > h * (1.0 + 1e-12))
            throw Error(Errc::invalid_argument, "sampled history needs a sample step <= h");
        if (history.sample_step * (static_cast<double>(history.data.size()) - 1.0) < qp.tau * (1.0 - 1e-9))
            throw Error(Errc::invalid_argument, "sampled history must cover [-tau, 0]");
    }

    const int n = qp.n;
    const auto steps = static_cast<std::size_t>(std::ceil(T / h - 1e-9));
    const double dt = T / static_cast<double>(steps);

    using State = Eigen::VectorXd;
    std::vector<State> xs;
    std::vector<State> dxs;
    xs.reserve(steps + 1);
    dxs.reserve(steps + 1);

    // k-th derivative of y at time s <= current time.
    auto delayed = [&](double s, int k) -> double {
        if (s <= 0.0) return history.value(s, k);
        const double u = s / dt;
        auto i = static_cast<std::size_t>(std::floor(u));
        if (i >= dxs.size() - 1) i = dxs.size() - 2;
        const double th = u - static_cast<double>(i);
        const double h00 = (1 + 2 * th) * (1 - th) * (1 - th);
        const double h10 = th * (1 - th) * (1 - th);
        const double h01 = th * th * (3 - 2 * th);
        const double h11 = th * th * (th - 1);
        const auto kk = static_cast<Eigen::Index>(k);
        return h00 * xs[i](kk) + h10 * dt * dxs[i](kk) + h01 * xs[i + 1](kk) + h11 * dt * dxs[i + 1](kk);
    };

    auto rhs = [&](double t, const State& x) {
        State d(n);
        for (int k = 0; k + 1 < n; ++k) d(k) = x(k + 1);
        double top = 0.0;
        for (int k = 0; k < n; ++k) top -= qp.a[static_cast<std::size_t>(k)] * x(k);
        for (int k = 0; k <= qp.m; ++k) top -= qp.b[static_cast<std::size_t>(k)] * delayed(t - qp.tau, k);
        d(n - 1) = top;
        return d;
    };

    State x0(n);
    for (int k = 0; k < n; ++k) x0(k) = history.value(0.0, k);
    xs.push_back(x0);

    SimulationResult res;
    res.t.reserve(steps + 1);
    res.y.reserve(steps + 1);
    res.t.push_back(0.0);
    res.y.push_back(x0(0));
    for (std::size_t i = 0; i < steps; ++i) {
        const double t = static_cast<double>(i) * dt;
        const State& x = xs.back();
        const State k1 = rhs(t, x);
        dxs.push_back(k1);
        const State k2 = rhs(t + 0.5 * dt, x + 0.5 * dt * k1);
        const State k3 = rhs(t + 0.5 * dt, x + 0.5 * dt * k2);
        const State k4 = rhs(t + dt, x + dt * k3);
        xs.push_back(x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
        res.t.push_back(static_cast<double>(i + 1) * dt);
        res.y.push_back(xs.back()(0));
    }
    res.final_state.assign(xs.back().data(), xs.back().data() + n);
    try {
        res.decay_estimate = estimate_decay_rate(res, opt.decay_window_begin * T, opt.decay_window_end * T);
    } catch (const Error&) {
        res.decay_estimate.reset();
    }
    return res;
}

}  // namespace delaylab

#pragma once

// Characteristic roots in a bounded window of the complex plane.
//
// Roots are located by intersecting the zero sets of Re Delta and Im Delta on
// a sampling grid, polished by Newton's method and clustered. The argument
// principle on the window boundary certifies that nothing was missed.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numbers>
#include <optional>
#include <vector>

#include "delaylab/quasipoly.hpp"

namespace delaylab {

struct SpectralWindow {
    double x_min{-1.0};
    double x_max{1.0};
    double y_max{1.0};

    void validate() const {
        if (!std::isfinite(x_min) || !std::isfinite(x_max) || !std::isfinite(y_max))
            throw Error(Errc::non_finite_argument, "non-finite window");
        if (!(x_min < x_max)) throw Error(Errc::invalid_argument, "window requires x_min < x_max");
        if (!(y_max > 0.0)) throw Error(Errc::invalid_argument, "window requires y_max > 0");
    }
    [[nodiscard]] bool contains(cplx z) const {
        return z.real() > x_min && z.real() < x_max && std::abs(z.imag()) < y_max;
    }

    friend bool operator==(const SpectralWindow&, const SpectralWindow&) = default;
};

struct RootEstimate {
    cplx value{};  // Im >= 0; the conjugate is implied
    int multiplicity{1};
    double residual{0.0};

    [[nodiscard]] bool is_real() const noexcept { return value.imag() == 0.0; }
    /// Roots counted with multiplicity and with the implied conjugate.
    [[nodiscard]] int weight() const noexcept { return is_real() ? multiplicity : 2 * multiplicity; }
};

struct Spectrum {
    SpectralWindow window;
    std::vector<RootEstimate> roots;  // sorted by decreasing real part
    std::optional<double> abscissa;
    int certified_count{0};
};

struct GridSize {
    int nx{400};
    int ny{400};
};

struct SpectrumOptions {
    /// Relative |Delta| below which a contour sample counts as hitting a root.
    double contour_safety{1e-16};
    double newton_tol{1e-12};
    int newton_max_iterations{50};
    /// Cluster radius is cluster_factor * (1 + |z|).
    double cluster_factor{1e-3};
    double nudge{1e-6};
};

namespace detail {

constexpr double kPi = std::numbers::pi;

struct ContourHit {};

/// Contour sample: Delta and its logarithmic derivative at z.
struct PhaseSample {
    cplx z;
    cplx f;
    double log_derivative;
};

inline PhaseSample phase_sample(const Quasipolynomial& qp, cplx z, double safety) {
    const Evaluation e = evaluate(qp, z);
    if (e.relative() < safety) throw ContourHit{};
    const cplx df = evaluate_derivative(qp, z, 1).value;
    return {z, e.value, std::abs(df / e.value)};
}

/// Accumulated argument change of Delta along a straight segment. A piece is
/// accepted once its phase step stays below pi/4 and its length times
/// |Delta'/Delta| at both ends is at most 1, so roots passing close to a long
/// piece force subdivision instead of aliasing the phase by 2 pi.
inline double phase_change(const Quasipolynomial& qp, const PhaseSample& p, const PhaseSample& q, double safety,
                           int depth) {
    const double d = std::arg(q.f / p.f);
    const double len = std::abs(q.z - p.z);
    if (std::abs(d) < kPi / 4.0 && len * std::max(p.log_derivative, q.log_derivative) <= 1.0) return d;
    if (depth <= 0) throw ContourHit{};
    const PhaseSample m = phase_sample(qp, 0.5 * (p.z + q.z), safety);
    return phase_change(qp, p, m, safety, depth - 1) + phase_change(qp, m, q, safety, depth - 1);
}

/// Winding number of Delta along the closed polygon through `vertices`.
inline int winding_polygon(const Quasipolynomial& qp, const std::vector<cplx>& vertices, double safety) {
    double total = 0.0;
    for (std::size_t v = 0; v < vertices.size(); ++v) {
        const cplx a = vertices[v];
        const cplx b = vertices[(v + 1) % vertices.size()];
        const double len = std::abs(b - a);
        const int segs = std::max(64, static_cast<int>(std::ceil(16.0 * len * std::max(1.0, qp.tau))));
        PhaseSample prev = phase_sample(qp, a, safety);
        for (int k = 1; k <= segs; ++k) {
            const PhaseSample cur = phase_sample(qp, a + (b - a) * (static_cast<double>(k) / segs), safety);
            total += phase_change(qp, prev, cur, safety, 50);
            prev = cur;
        }
    }
    return static_cast<int>(std::lround(total / (2.0 * kPi)));
}

inline std::vector<cplx> rectangle(const SpectralWindow& w) {
    return {{w.x_min, -w.y_max}, {w.x_max, -w.y_max}, {w.x_max, w.y_max}, {w.x_min, w.y_max}};
}

inline std::vector<cplx> circle(cplx c, double r, int points = 64) {
    std::vector<cplx> out;
    for (int k = 0; k < points; ++k) out.push_back(c + std::polar(r, 2.0 * kPi * k / points));
    return out;
}

struct NewtonResult {
    cplx z{};
    bool converged{false};
    double residual{0.0};
};

/// Newton's method on g / g' with g = Delta^(order), which keeps quadratic
/// convergence at multiple roots of g. Iterates until the step stalls;
/// `converged` reports whether the final relative residual is within tol.
/// Falls back to the plain Newton step where g'' is unavailable.
inline NewtonResult newton(const Quasipolynomial& qp, cplx z, int order, int max_iterations, double tol) {
    const bool modified = order + 2 <= qp.max_derivative_order();
    Evaluation f = evaluate_derivative(qp, z, order);
    for (int it = 0; it < max_iterations && f.value != cplx{0.0, 0.0}; ++it) {
        const cplx df = evaluate_derivative(qp, z, order + 1).value;
        cplx step;
        if (modified) {
            const cplx d2f = evaluate_derivative(qp, z, order + 2).value;
            const cplx denom = df * df - f.value * d2f;
            if (denom == cplx{0.0, 0.0}) break;
            step = f.value * df / denom;
        } else {
            if (df == cplx{0.0, 0.0}) break;
            step = f.value / df;
        }
        if (!std::isfinite(std::abs(step))) break;
        cplx zn = z - step;
        Evaluation fn = evaluate_derivative(qp, zn, order);
        for (int h = 0; h < 30 && !(std::abs(fn.value) <= std::abs(f.value)); ++h) {
            step *= 0.5;
            zn = z - step;
            fn = evaluate_derivative(qp, zn, order);
        }
        if (!(std::abs(fn.value) <= std::abs(f.value))) break;
        const bool stalled = std::abs(zn - z) <= 1e-15 * (1.0 + std::abs(z));
        z = zn;
        f = fn;
        if (stalled) break;
    }
    return {z, f.relative() <= tol, f.relative()};
}

inline SpectralWindow nudged(const SpectralWindow& w, double by) {
    return {w.x_min - by, w.x_max + by, w.y_max + by};
}

}  // namespace detail

/// Number of roots inside the window (with multiplicity) by the argument
/// principle. If the boundary passes through a root the window is enlarged
/// once by `opt.nudge`; `used_window` receives the window actually counted.
inline int count_roots(const Quasipolynomial& qp, const SpectralWindow& window, const SpectrumOptions& opt = {},
                       SpectralWindow* used_window = nullptr) {
    window.validate();
    SpectralWindow w = window;
    for (int attempt = 0; attempt < 2; ++attempt) {
        try {
            const int n = detail::winding_polygon(qp, detail::rectangle(w), opt.contour_safety);
            if (used_window) *used_window = w;
            return n;
        } catch (const detail::ContourHit&) {
            w = detail::nudged(w, opt.nudge);
        }
    }
    throw Error(Errc::contour_through_root, "contour through root");
}

/// Y such that every root with Re s >= x has |s| <= Y (hence |Im s| <= Y).
/// Largest positive solution r of r^n = sum |a_k| r^k + exp(-tau x) sum |b_k| r^k.
inline double imaginary_bound(const Quasipolynomial& qp, double x) {
    if (qp.classify() == DelayType::Neutral)
        throw Error(Errc::bound_unavailable_for_neutral, "bound unavailable for neutral type");
    if (!std::isfinite(x)) throw Error(Errc::non_finite_argument, "non-finite argument");
    const double ex = std::exp(-qp.tau * x);
    std::vector<double> c(static_cast<std::size_t>(qp.n), 0.0);
    for (int k = 0; k < qp.n; ++k) c[static_cast<std::size_t>(k)] = std::abs(qp.a[static_cast<std::size_t>(k)]);
    for (int k = 0; k <= qp.m; ++k) c[static_cast<std::size_t>(k)] += ex * std::abs(qp.b[static_cast<std::size_t>(k)]);
    double total = 0.0;
    for (double v : c) total += v;
    if (total == 0.0) return 0.0;
    // h(r) = 1 - sum c_k r^(k-n) increases monotonically in r.
    auto h = [&](double r) {
        double s = 1.0;
        for (int k = 0; k < qp.n; ++k) s -= c[static_cast<std::size_t>(k)] * std::pow(r, k - qp.n);
        return s;
    };
    double lo = 0.0;
    double hi = std::max(1.0, total) * (1.0 + 1e-12) + 1e-12;
    while (h(hi) <= 0.0) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (h(mid) > 0.0 ? hi : lo) = mid;
    }
    return hi;
}

namespace detail {

inline void check_neutral(const Quasipolynomial& qp, SpectralWindow& w) {
    if (qp.classify() != DelayType::Neutral) return;
    const double bn = std::abs(qp.b[static_cast<std::size_t>(qp.n)]);
    if (bn >= 1.0) throw Error(Errc::neutral_chain_unbounded, "neutral chain unbounded");
    if (bn == 0.0) return;
    // Essential chain sits near Re s = ln|b_n| / tau.
    const double chain = std::log(bn) / qp.tau;
    w.x_min = std::max(w.x_min, chain + 1e-2);
    if (!(w.x_min < w.x_max)) throw Error(Errc::invalid_argument, "window lies inside the neutral root chain");
}

/// Newton-refined roots seeded from grid cells where Re and Im of Delta both
/// change sign; upper half plane only.
inline std::vector<cplx> seed_roots(const Quasipolynomial& qp, const SpectralWindow& w, GridSize grid,
                                    const SpectrumOptions& opt) {
    const int nx = std::max(grid.nx, 2);
    const int ny = std::max(grid.ny, 2);
    const double dx = (w.x_max - w.x_min) / (nx - 1);
    const double dy = w.y_max / (ny - 1);
    // Rows j = -1 .. ny-1 so that real roots are interior to a cell row.
    const int rows = ny + 1;
    std::vector<cplx> f(static_cast<std::size_t>(nx) * rows);
    auto at = [&](int i, int r) -> cplx& { return f[static_cast<std::size_t>(r) * nx + i]; };
    for (int r = 0; r < rows; ++r)
        for (int i = 0; i < nx; ++i) at(i, r) = evaluate(qp, {w.x_min + i * dx, (r - 1) * dy}).value;

    std::vector<cplx> found;
    for (int r = 0; r + 1 < rows; ++r) {
        for (int i = 0; i + 1 < nx; ++i) {
            const cplx c[4] = {at(i, r), at(i + 1, r), at(i + 1, r + 1), at(i, r + 1)};
            double rmin = c[0].real(), rmax = rmin, imin = c[0].imag(), imax = imin;
            for (const cplx& v : c) {
                rmin = std::min(rmin, v.real());
                rmax = std::max(rmax, v.real());
                imin = std::min(imin, v.imag());
                imax = std::max(imax, v.imag());
            }
            if (!(rmin <= 0.0 && rmax >= 0.0 && imin <= 0.0 && imax >= 0.0)) continue;
            const cplx start{w.x_min + (i + 0.5) * dx, (r - 0.5) * dy};
            const NewtonResult nr = newton(qp, start, 0, opt.newton_max_iterations, opt.newton_tol);
            cplx z = nr.z;
            if (z.imag() < 0.0) z = std::conj(z);
            if (!w.contains(z)) continue;
            if (nr.residual > 1e-8) continue;
            found.push_back(z);
        }
    }
    return found;
}

/// Groups seeds whose distance is within factor * (1 + |z|) and assigns each
/// group the winding number of a circle enclosing it. A multiple root that
/// double rounding has split into a tight cluster is reported once, with the
/// cluster size as its multiplicity. Returns nothing if two circles overlap.
inline std::optional<std::vector<RootEstimate>> cluster_roots(const Quasipolynomial& qp, const std::vector<cplx>& found,
                                                              double factor, const SpectrumOptions& opt) {
    auto scale = [&](cplx z) { return factor * (1.0 + std::abs(z)); };
    // Single linkage via union-find.
    std::vector<std::size_t> parent(found.size());
    for (std::size_t i = 0; i < found.size(); ++i) parent[i] = i;
    auto root_of = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (std::size_t i = 0; i < found.size(); ++i)
        for (std::size_t j = i + 1; j < found.size(); ++j)
            if (std::abs(found[i] - found[j]) <= scale(found[i])) parent[root_of(i)] = root_of(j);
    std::map<std::size_t, std::vector<cplx>> groups;
    for (std::size_t i = 0; i < found.size(); ++i) groups[root_of(i)].push_back(found[i]);

    struct Disk {
        cplx center;
        double radius;
        bool on_axis;
    };
    std::vector<Disk> disks;
    for (const auto& [key, cl] : groups) {
        cplx center{0.0, 0.0};
        for (const cplx& z : cl) center += z;
        center /= static_cast<double>(cl.size());
        double spread = 0.0;
        for (const cplx& z : cl) spread = std::max(spread, std::abs(z - center));
        double radius = std::max(scale(center), 2.0 * spread);
        const bool on_axis = std::abs(center.imag()) <= radius;
        if (on_axis) {
            center = {center.real(), 0.0};
            for (const cplx& z : cl) radius = std::max(radius, 2.0 * std::abs(z - center));
        }
        disks.push_back({center, radius, on_axis});
    }
    for (std::size_t i = 0; i < disks.size(); ++i)
        for (std::size_t j = i + 1; j < disks.size(); ++j)
            if (std::abs(disks[i].center - disks[j].center) <= disks[i].radius + disks[j].radius) return std::nullopt;

    std::vector<RootEstimate> roots;
    std::size_t k = 0;
    for (const auto& [key, cl] : groups) {
        const Disk& d = disks[k++];
        int mult = 0;
        try {
            mult = winding_polygon(qp, circle(d.center, d.radius), opt.contour_safety);
        } catch (const ContourHit&) {
            mult = static_cast<int>(cl.size());
        }
        if (mult <= 0) continue;
        // A multiple root is a simple root of Delta^(mult-1).
        cplx value = d.center;
        const int order = mult - 1;
        if (order > 0 && order < qp.max_derivative_order()) {
            const NewtonResult nr = newton(qp, d.center, order, opt.newton_max_iterations, 1e-14);
            if (std::abs(nr.z - d.center) <= d.radius) value = nr.z;
        } else {
            value = cl.front();
        }
        if (d.on_axis) value = {value.real(), 0.0};
        RootEstimate re;
        re.value = value;
        re.multiplicity = mult;
        re.residual = evaluate(qp, value).relative();
        roots.push_back(re);
    }
    std::sort(roots.begin(), roots.end(), [](const RootEstimate& p, const RootEstimate& q) {
        return p.value.real() > q.value.real() ||
               (p.value.real() == q.value.real() && p.value.imag() < q.value.imag());
    });
    return roots;
}

}  // namespace detail

inline Spectrum compute_spectrum(const Quasipolynomial& qp, const SpectralWindow& window, GridSize grid = {},
                                 const SpectrumOptions& opt = {}) {
    qp.validate();
    window.validate();
    SpectralWindow w = window;
    detail::check_neutral(qp, w);

    SpectralWindow counted;
    const int total = count_roots(qp, w, opt, &counted);
    for (int attempt = 0; attempt < 2; ++attempt) {
        const GridSize g = attempt == 0 ? grid : GridSize{2 * grid.nx, 2 * grid.ny};
        const std::vector<cplx> seeds = detail::seed_roots(qp, counted, g, opt);
        // Wider clusters only when the base scale does not account for every root.
        for (double widen : {1.0, 4.0, 16.0}) {
            auto roots = detail::cluster_roots(qp, seeds, widen * opt.cluster_factor, opt);
            if (!roots) continue;
            int sum = 0;
            for (const auto& r : *roots) sum += r.weight();
            if (sum != total) continue;
            Spectrum sp;
            sp.window = counted;
            sp.roots = std::move(*roots);
            sp.certified_count = total;
            if (!sp.roots.empty()) sp.abscissa = sp.roots.front().value.real();
            return sp;
        }
    }
    throw Error(Errc::certification_failed, "certification failed");
}

/// Number of roots with Re s >= x (retarded type only).
inline int count_roots_right_of(const Quasipolynomial& qp, double x, const SpectrumOptions& opt = {},
                                SpectralWindow* used_window = nullptr) {
    const double bound = imaginary_bound(qp, x);
    const SpectralWindow w{x, bound + 1.0, bound * (1.0 + 1e-3) + 1e-3};
    if (!(w.x_min < w.x_max)) {
        if (used_window) *used_window = w;
        return 0;
    }
    return count_roots(qp, w, opt, used_window);
}

struct DominanceCertificate {
    bool dominant{false};
    SpectralWindow window;
    int winding{0};
};

/// True iff no root has Re s >= s0 + epsilon.
inline DominanceCertificate check_dominance(const Quasipolynomial& qp, double s0, double epsilon,
                                            const SpectrumOptions& opt = {}) {
    if (!(epsilon > 0.0)) throw Error(Errc::invalid_argument, "epsilon must be positive");
    DominanceCertificate cert;
    cert.winding = count_roots_right_of(qp, s0 + epsilon, opt, &cert.window);
    cert.dominant = cert.winding == 0;
    return cert;
}

struct SensitivityTrace {
    std::vector<double> taus;
    /// branches[i][j]: position of branch j at taus[i].
    std::vector<std::vector<cplx>> branches;
    std::vector<std::vector<bool>> converged;
    std::vector<std::vector<bool>> diverged;
    double step{0.0};
    int newton_iterations{0};
};

namespace detail {

/// Spreads branches that coincide (within `radius`) along the leading-order
/// splitting w^mu = -mu! Delta(c) / Delta^(mu)(c) around their common point.
inline void spread_coincident(const Quasipolynomial& qp, std::vector<cplx>& pts, double radius) {
    std::vector<bool> done(pts.size(), false);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (done[i]) continue;
        std::vector<std::size_t> group{i};
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            if (!done[j] && std::abs(pts[j] - pts[i]) <= radius) group.push_back(j);
        for (std::size_t j : group) done[j] = true;
        const int mu = static_cast<int>(group.size());
        if (mu < 2 || mu > qp.max_derivative_order()) continue;
        cplx c{0.0, 0.0};
        for (std::size_t j : group) c += pts[j];
        c /= static_cast<double>(mu);
        if (std::abs(c.imag()) <= radius) c = {c.real(), 0.0};
        const cplx f0 = evaluate(qp, c).value;
        const cplx fm = evaluate_derivative(qp, c, mu).value;
        if (fm == cplx{0.0, 0.0}) continue;
        double fact = 1.0;
        for (int k = 2; k <= mu; ++k) fact *= k;
        const cplx rhs = -fact * f0 / fm;
        const double r = std::pow(std::abs(rhs), 1.0 / mu);
        const double phi = std::arg(rhs);
        for (int k = 0; k < mu; ++k)
            pts[group[static_cast<std::size_t>(k)]] = c + std::polar(r, (phi + 2.0 * kPi * k) / mu);
    }
}

}  // namespace detail

/// Follows the m+2 roots born at s0 while tau sweeps [tau*(1-span), tau*(1+span)]
/// with b held fixed. Branches are seeded at tau* and warm-started outwards.
inline SensitivityTrace sensitivity_sweep(const Quasipolynomial& qp, double s0, double span, int steps,
                                          int newton_iterations) {
    qp.validate();
    if (!(span > 0.0 && span < 1.0)) throw Error(Errc::invalid_argument, "span must lie in (0, 1)");
    if (steps < 2) throw Error(Errc::invalid_argument, "steps must be at least 2");
    if (newton_iterations < 1) throw Error(Errc::invalid_argument, "newton_iterations must be positive");
    if (!std::isfinite(s0)) throw Error(Errc::non_finite_argument, "non-finite s0");

    const double tau_star = qp.tau;
    const int nb = qp.m + 2;
    SensitivityTrace tr;
    tr.newton_iterations = newton_iterations;
    tr.step = 2.0 * span * tau_star / (steps - 1);
    for (int i = 0; i < steps; ++i) tr.taus.push_back(tau_star * (1.0 - span) + i * tr.step);
    tr.branches.assign(static_cast<std::size_t>(steps), std::vector<cplx>(static_cast<std::size_t>(nb)));
    tr.converged.assign(static_cast<std::size_t>(steps), std::vector<bool>(static_cast<std::size_t>(nb), false));
    tr.diverged.assign(static_cast<std::size_t>(steps), std::vector<bool>(static_cast<std::size_t>(nb), false));

    int star = 0;
    for (int i = 1; i < steps; ++i)
        if (std::abs(tr.taus[static_cast<std::size_t>(i)] - tau_star) <
            std::abs(tr.taus[static_cast<std::size_t>(star)] - tau_star))
            star = i;

    const double escape = 10.0 * (1.0 + std::abs(s0));
    const double seed_radius = 1e-3 * (1.0 + std::abs(s0));

    auto polish = [&](int i, std::vector<cplx> start) {
        Quasipolynomial q = qp;
        q.tau = tr.taus[static_cast<std::size_t>(i)];
        detail::spread_coincident(q, start, seed_radius);
        for (int j = 0; j < nb; ++j) {
            const auto u = static_cast<std::size_t>(j);
            const auto nr = detail::newton(q, start[u], 0, newton_iterations, 1e-12);
            const bool escaped = std::abs(nr.z - s0) > escape || !std::isfinite(std::abs(nr.z));
            tr.diverged[static_cast<std::size_t>(i)][u] = escaped;
            tr.branches[static_cast<std::size_t>(i)][u] = escaped ? start[u] : nr.z;
            tr.converged[static_cast<std::size_t>(i)][u] = !escaped && nr.residual <= 1e-10;
        }
    };

    std::vector<cplx> seeds;
    for (int j = 0; j < nb; ++j) seeds.push_back(s0 + std::polar(seed_radius, 2.0 * detail::kPi * j / nb));
    {
        // Seeds are polished on tau* itself without spreading.
        Quasipolynomial q = qp;
        q.tau = tr.taus[static_cast<std::size_t>(star)];
        for (int j = 0; j < nb; ++j) {
            const auto u = static_cast<std::size_t>(j);
            const auto nr = detail::newton(q, seeds[u], 0, newton_iterations, 1e-12);
            const bool escaped = std::abs(nr.z - s0) > escape;
            tr.branches[static_cast<std::size_t>(star)][u] = escaped ? seeds[u] : nr.z;
            tr.diverged[static_cast<std::size_t>(star)][u] = escaped;
            tr.converged[static_cast<std::size_t>(star)][u] = !escaped && nr.residual <= 1e-10;
        }
    }
    for (int i = star + 1; i < steps; ++i) polish(i, tr.branches[static_cast<std::size_t>(i - 1)]);
    for (int i = star - 1; i >= 0; --i) polish(i, tr.branches[static_cast<std::size_t>(i + 1)]);
    return tr;
}

}  // namespace delaylab

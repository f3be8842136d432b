#pragma once

// Real zeros of a scalar function on an interval by sign bracketing on a
// uniform sample, bisection, and golden-section refinement of interior
// extrema (which catches tangential zeros and root pairs inside one cell).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace delaylab::detail {

struct ScalarSample {
    double value{0.0};
    double scale{1.0};
};

using ScalarFunction = std::function<ScalarSample(double)>;

struct RealZero {
    double x{0.0};
    bool tangential{false};  // sign does not change across the zero
};

struct RealZeroOptions {
    int samples{2048};
    int max_doublings{3};
    double tol{1e-10};  // |f| <= tol * scale
};

inline int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

/// Bisection down to adjacent doubles.
inline double bisect(const ScalarFunction& f, double lo, double hi, double flo) {
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const ScalarSample fm = f(mid);
        if (fm.value == 0.0) return mid;
        if (sign_of(fm.value) == sign_of(flo)) {
            lo = mid;
            flo = fm.value;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Locates the extremum of f on [lo, hi] in the direction that reduces |f|
/// (assuming f has sign `sgn` at the bracket ends).
inline double golden_toward_zero(const ScalarFunction& f, double lo, double hi, int sgn) {
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - g * (hi - lo);
    double x2 = lo + g * (hi - lo);
    double f1 = sgn * f(x1).value;
    double f2 = sgn * f(x2).value;
    for (int it = 0; it < 120 && (hi - lo) > 1e-15 * (1.0 + std::abs(lo)); ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = sgn * f(x1).value;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = sgn * f(x2).value;
        }
    }
    return 0.5 * (lo + hi);
}

inline std::vector<RealZero> scan_once(const ScalarFunction& f, double lo, double hi, int samples,
                                       double tol, bool& suspect_close) {
    std::vector<double> xs(static_cast<std::size_t>(samples));
    std::vector<ScalarSample> fs(xs.size());
    for (int i = 0; i < samples; ++i) {
        xs[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / (samples - 1);
        fs[static_cast<std::size_t>(i)] = f(xs[static_cast<std::size_t>(i)]);
    }

    std::vector<RealZero> out;
    std::vector<int> bracket_cells;
    for (int i = 0; i + 1 < samples; ++i) {
        const auto u = static_cast<std::size_t>(i);
        if (fs[u].value == 0.0) {
            out.push_back({xs[u], false});
            continue;
        }
        if (sign_of(fs[u].value) * sign_of(fs[u + 1].value) < 0) {
            out.push_back({bisect(f, xs[u], xs[u + 1], fs[u].value), false});
            bracket_cells.push_back(i);
        }
    }
    if (fs.back().value == 0.0) out.push_back({xs.back(), false});
    for (std::size_t k = 1; k < bracket_cells.size(); ++k)
        if (bracket_cells[k] - bracket_cells[k - 1] <= 1) suspect_close = true;

    // Interior extrema without a sign change in the neighbouring cells.
    for (int i = 1; i + 1 < samples; ++i) {
        const auto u = static_cast<std::size_t>(i);
        const double l = fs[u - 1].value, c = fs[u].value, r = fs[u + 1].value;
        const int sc = sign_of(c);
        if (sc == 0 || sign_of(l) != sc || sign_of(r) != sc) continue;
        // |f| has a local minimum at sample i.
        if (!(std::abs(c) <= std::abs(l) && std::abs(c) <= std::abs(r))) continue;
        const double xe = golden_toward_zero(f, xs[u - 1], xs[u + 1], sc);
        const ScalarSample fe = f(xe);
        if (sign_of(fe.value) == -sc) {
            out.push_back({bisect(f, xs[u - 1], xe, l), false});
            out.push_back({bisect(f, xe, xs[u + 1], fe.value), false});
            suspect_close = true;
        } else if (std::abs(fe.value) <= tol * fe.scale) {
            out.push_back({xe, true});
        }
    }
    std::sort(out.begin(), out.end(), [](const RealZero& p, const RealZero& q) { return p.x < q.x; });
    // Merge duplicates produced by adjacent cells sharing a zero sample.
    std::vector<RealZero> merged;
    const double dx = (hi - lo) / (samples - 1);
    for (const auto& z : out)
        if (merged.empty() || z.x - merged.back().x > 1e-3 * dx) merged.push_back(z);
    return merged;
}

/// Zeros of f on [lo, hi], ascending. The sample density doubles (up to
/// `max_doublings` times) when neighbouring zeros fall within two samples.
inline std::vector<RealZero> real_zeros(const ScalarFunction& f, double lo, double hi,
                                        const RealZeroOptions& opt = {}) {
    int samples = opt.samples;
    std::vector<RealZero> zeros;
    for (int pass = 0; pass <= opt.max_doublings; ++pass) {
        bool suspect_close = false;
        zeros = scan_once(f, lo, hi, samples, opt.tol, suspect_close);
        if (!suspect_close) break;
        samples = 2 * samples - 1;
    }
    return zeros;
}

}  // namespace delaylab::detail

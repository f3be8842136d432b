#pragma once

// The admissibility relation of the control-oriented MID mode:
//
//     F(s0, tau) = Delta^(m+1)(s0)   with b eliminated from Delta^(k)(s0) = 0, k <= m.
//
// F = 0 iff s0 can be made a root of multiplicity >= m+2 at delay tau. F is
// evaluated numerically (one small linear solve per point).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "delaylab/placement.hpp"
#include "delaylab/real_zeros.hpp"

namespace delaylab {

struct RelationValue {
    double value{0.0};
    double scale{0.0};
};

struct CurvePoint {
    double s0{0.0};
    double tau{0.0};

    friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

using Polyline = std::vector<CurvePoint>;

struct AdmissibilityGrid {
    double s0_min{-1.0};
    double tau_max{1.0};
    int ns0{0};
    int ntau{0};
    std::vector<double> s0;   // ns0 samples on [s0_min, 0]
    std::vector<double> tau;  // ntau samples on (0, tau_max]
    /// Row-major ns0 x ntau; NaN where the inner solve was degenerate.
    std::vector<double> values;
    std::vector<Polyline> curves;
    double curve_tol{1e-9};

    [[nodiscard]] double at(int i, int j) const {
        return values[static_cast<std::size_t>(i) * static_cast<std::size_t>(ntau) + static_cast<std::size_t>(j)];
    }
};

struct GridOptions {
    bool enforce_limits{true};
    int max_resolution{2000};
    double curve_tol{1e-9};
};

struct SearchOptions {
    /// Lower end of the s0 search; 0 selects -50 / tau.
    double s0_min{0.0};
    double tau_max{10.0};
    detail::RealZeroOptions zeros{};
};

inline RelationValue relation_value(std::span<const double> a, int m, double s0, double tau) {
    const PlacementResult r = solve_control_mid(a, m, tau, s0);
    return {r.admissibility_value, r.admissibility_scale};
}

namespace detail {

inline ScalarSample relation_sample(std::span<const double> a, int m, double s0, double tau) {
    try {
        const RelationValue v = relation_value(a, m, s0, tau);
        return {v.value, v.scale};
    } catch (const Error& e) {
        if (e.code() != Errc::degenerate_placement_system) throw;
        return {std::numeric_limits<double>::quiet_NaN(), 1.0};
    }
}

/// Zero of F on the segment p -> q (F(p), F(q) of opposite sign).
inline CurvePoint refine_on_segment(std::span<const double> a, int m, CurvePoint p, CurvePoint q, double fp) {
    auto along = [&](double t) {
        return relation_sample(a, m, p.s0 + t * (q.s0 - p.s0), p.tau + t * (q.tau - p.tau));
    };
    const double t = bisect(along, 0.0, 1.0, fp);
    return {p.s0 + t * (q.s0 - p.s0), p.tau + t * (q.tau - p.tau)};
}

}  // namespace detail

inline AdmissibilityGrid compute_grid(std::span<const double> a, int m, double s0_min, double tau_max, int ns0,
                                      int ntau, const GridOptions& opt = {}) {
    if (!(s0_min < 0.0) || !(tau_max > 0.0) || !std::isfinite(s0_min) || !std::isfinite(tau_max))
        throw Error(Errc::invalid_argument, "require s0_min < 0 < tau_max");
    if (ns0 < 2 || ntau < 2) throw Error(Errc::invalid_argument, "grid resolution must be at least 2");
    if (opt.enforce_limits && (ns0 > opt.max_resolution || ntau > opt.max_resolution))
        throw Error(Errc::grid_too_large, "grid too large");

    AdmissibilityGrid g;
    g.s0_min = s0_min;
    g.tau_max = tau_max;
    g.ns0 = ns0;
    g.ntau = ntau;
    g.curve_tol = opt.curve_tol;
    for (int i = 0; i < ns0; ++i) g.s0.push_back(s0_min + (0.0 - s0_min) * i / (ns0 - 1));
    for (int j = 0; j < ntau; ++j) g.tau.push_back(tau_max * (j + 1) / ntau);
    g.values.resize(static_cast<std::size_t>(ns0) * static_cast<std::size_t>(ntau));
    for (int i = 0; i < ns0; ++i)
        for (int j = 0; j < ntau; ++j)
            g.values[static_cast<std::size_t>(i) * ntau + j] =
                detail::relation_sample(a, m, g.s0[static_cast<std::size_t>(i)], g.tau[static_cast<std::size_t>(j)]).value;

    // Marching squares. Edge ids: horizontal edge (i,j)-(i+1,j) -> i*ntau+j,
    // vertical edge (i,j)-(i,j+1) -> ns0*ntau + i*ntau + j.
    const long hv_offset = static_cast<long>(ns0) * ntau;
    auto h_edge = [&](int i, int j) { return static_cast<long>(i) * ntau + j; };
    auto v_edge = [&](int i, int j) { return hv_offset + static_cast<long>(i) * ntau + j; };
    auto positive = [](double v) { return v >= 0.0; };

    std::map<long, CurvePoint> edge_point;
    auto crossing = [&](long id, int i0, int j0, int i1, int j1) -> const CurvePoint& {
        auto it = edge_point.find(id);
        if (it != edge_point.end()) return it->second;
        const CurvePoint p{g.s0[static_cast<std::size_t>(i0)], g.tau[static_cast<std::size_t>(j0)]};
        const CurvePoint q{g.s0[static_cast<std::size_t>(i1)], g.tau[static_cast<std::size_t>(j1)]};
        return edge_point.emplace(id, detail::refine_on_segment(a, m, p, q, g.at(i0, j0))).first->second;
    };

    std::vector<std::pair<long, long>> segments;
    for (int i = 0; i + 1 < ns0; ++i) {
        for (int j = 0; j + 1 < ntau; ++j) {
            const double c0 = g.at(i, j), c1 = g.at(i + 1, j), c2 = g.at(i + 1, j + 1), c3 = g.at(i, j + 1);
            if (std::isnan(c0) || std::isnan(c1) || std::isnan(c2) || std::isnan(c3)) continue;
            const bool p0 = positive(c0), p1 = positive(c1), p2 = positive(c2), p3 = positive(c3);
            std::vector<long> cut;  // bottom, right, top, left order
            const long bottom = h_edge(i, j), right = v_edge(i + 1, j), top = h_edge(i, j + 1), left = v_edge(i, j);
            if (p0 != p1) { crossing(bottom, i, j, i + 1, j); cut.push_back(bottom); }
            if (p1 != p2) { crossing(right, i + 1, j, i + 1, j + 1); cut.push_back(right); }
            if (p2 != p3) { crossing(top, i, j + 1, i + 1, j + 1); cut.push_back(top); }
            if (p3 != p0) { crossing(left, i, j, i, j + 1); cut.push_back(left); }
            if (cut.size() == 2) {
                segments.emplace_back(cut[0], cut[1]);
            } else if (cut.size() == 4) {
                const double sc = 0.5 * (g.s0[static_cast<std::size_t>(i)] + g.s0[static_cast<std::size_t>(i + 1)]);
                const double tc = 0.5 * (g.tau[static_cast<std::size_t>(j)] + g.tau[static_cast<std::size_t>(j + 1)]);
                const double center = detail::relation_sample(a, m, sc, tc).value;
                if (!std::isnan(center) && positive(center) == p0) {
                    segments.emplace_back(bottom, right);
                    segments.emplace_back(top, left);
                } else {
                    segments.emplace_back(bottom, left);
                    segments.emplace_back(right, top);
                }
            }
        }
    }

    // Chain segments sharing edge points into polylines.
    std::map<long, std::vector<std::size_t>> incident;
    for (std::size_t s = 0; s < segments.size(); ++s) {
        incident[segments[s].first].push_back(s);
        incident[segments[s].second].push_back(s);
    }
    std::vector<bool> used(segments.size(), false);
    auto walk = [&](long start) {
        Polyline line{edge_point.at(start)};
        long cur = start;
        for (;;) {
            std::size_t next = segments.size();
            for (std::size_t s : incident[cur])
                if (!used[s]) {
                    next = s;
                    break;
                }
            if (next == segments.size()) break;
            used[next] = true;
            cur = segments[next].first == cur ? segments[next].second : segments[next].first;
            line.push_back(edge_point.at(cur));
        }
        return line;
    };
    for (const auto& [edge, segs] : incident)
        if (segs.size() == 1 && !used[segs.front()]) g.curves.push_back(walk(edge));
    for (std::size_t s = 0; s < segments.size(); ++s)
        if (!used[s]) g.curves.push_back(walk(segments[s].first));
    return g;
}

/// Real s0 in [s0_min, 0] with F(s0, tau) = 0, rightmost first.
inline std::vector<double> solve_for_s0(std::span<const double> a, int m, double tau, const SearchOptions& opt = {}) {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw Error(Errc::invalid_argument, "tau must be finite and positive");
    const double lo = opt.s0_min < 0.0 ? opt.s0_min : -50.0 / tau;
    auto f = [&](double s0) { return detail::relation_sample(a, m, s0, tau); };
    std::vector<double> out;
    for (const auto& z : detail::real_zeros(f, lo, 0.0, opt.zeros)) out.push_back(z.x);
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

/// tau in (0, tau_max] with F(s0, tau) = 0, smallest first.
inline std::vector<double> solve_for_tau(std::span<const double> a, int m, double s0, const SearchOptions& opt = {}) {
    if (!std::isfinite(s0)) throw Error(Errc::non_finite_argument, "non-finite s0");
    if (!(opt.tau_max > 0.0)) throw Error(Errc::invalid_argument, "tau_max must be positive");
    auto f = [&](double tau) { return detail::relation_sample(a, m, s0, tau); };
    std::vector<double> out;
    for (const auto& z : detail::real_zeros(f, 1e-9 * opt.tau_max, opt.tau_max, opt.zeros))
        if (z.x > 0.0) out.push_back(z.x);
    return out;
}

struct MaxTauOptions {
    SearchOptions search{};
    int scan_points{200};
    double tol{1e-4};
};

/// Supremum of the delays for which some strictly negative s0 is admissible,
/// capped at the search box upper end.
inline double max_stabilizable_tau(std::span<const double> a, int m, const MaxTauOptions& opt = {}) {
    auto admissible = [&](double tau) {
        const auto s = solve_for_s0(a, m, tau, opt.search);
        return std::any_of(s.begin(), s.end(), [](double v) { return v < 0.0; });
    };
    const double top = opt.search.tau_max;
    int last_true = -1;
    for (int k = 1; k <= opt.scan_points; ++k)
        if (admissible(top * k / opt.scan_points)) last_true = k;
    if (last_true < 0) return 0.0;
    if (last_true == opt.scan_points) return top;
    double lo = top * last_true / opt.scan_points;
    double hi = top * (last_true + 1) / opt.scan_points;
    while (hi - lo > opt.tol) {
        const double mid = 0.5 * (lo + hi);
        (admissible(mid) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Which solution branches of the admissibility relation to report. The
/// preferred branch is the rightmost s0 at fixed tau, or the smallest tau at
/// fixed s0; `preferred` and its two aliases select it.
enum class BranchPolicy { preferred, all };

inline BranchPolicy parse_branch_policy(std::string_view s) {
    if (s == "rightmost" || s == "smallest" || s == "preferred") return BranchPolicy::preferred;
    if (s == "all") return BranchPolicy::all;
    throw Error(Errc::invalid_argument, "branch must be rightmost, smallest or all");
}

/// Control-oriented designs with exactly one of tau, s0 given; the other is
/// solved from F(s0, tau) = 0 and b from the linear system.
inline std::vector<PlacementResult> control_mid_designs(std::span<const double> a, int m, std::optional<double> tau,
                                                        std::optional<double> s0, BranchPolicy policy,
                                                        const SearchOptions& opt = {}) {
    if (tau.has_value() == s0.has_value()) throw Error(Errc::invalid_argument, "give exactly one of tau and s0");
    std::vector<PlacementResult> out;
    if (tau) {
        for (double v : solve_for_s0(a, m, *tau, opt)) {
            out.push_back(solve_control_mid(a, m, *tau, v));
            if (policy == BranchPolicy::preferred) break;
        }
    } else {
        for (double v : solve_for_tau(a, m, *s0, opt)) {
            out.push_back(solve_control_mid(a, m, v, *s0));
            if (policy == BranchPolicy::preferred) break;
        }
    }
    if (out.empty()) throw Error(Errc::no_admissible_solution, "no admissible solution in the search box");
    return out;
}

}  // namespace delaylab

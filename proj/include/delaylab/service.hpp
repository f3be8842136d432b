#pragma once

// Request handlers of the JSON API. Every endpoint is a pure function of the
// request body; the HTTP server and the command-line tool both route here.

#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <string_view>

#include "delaylab/json_io.hpp"
#include "delaylab/report.hpp"

namespace delaylab {

/// The "software limits": size caps on requests, on unless disabled by the
/// environment (DELAYLAB_LIMITS=off).
struct Limits {
    bool enabled{true};
    int max_order{12};
    int max_grid{2000};
    int max_steps{10000};
    double max_time_steps{1e7};

    static Limits from_environment() {
        Limits l;
        if (const char* v = std::getenv("DELAYLAB_LIMITS"); v && std::string_view(v) == "off") l.enabled = false;
        return l;
    }
};

struct Response {
    int status{200};
    std::string body;
    std::string content_type{"application/json"};
};

namespace api {

namespace detail {

using delaylab::detail::field;
using delaylab::detail::has;
using delaylab::detail::integer;
using delaylab::detail::number;
using delaylab::detail::numbers;
using delaylab::detail::text;

inline void cap(bool ok, const std::string& what) {
    if (!ok) throw Error(Errc::limit_exceeded, "limit exceeded: " + what);
}

inline void check_order(const Limits& lim, int n) {
    if (lim.enabled) cap(n <= lim.max_order, "n <= " + std::to_string(lim.max_order));
}

inline void check_grid(const Limits& lim, int a, int b) {
    if (lim.enabled)
        cap(a <= lim.max_grid && b <= lim.max_grid,
            "grid <= " + std::to_string(lim.max_grid) + "x" + std::to_string(lim.max_grid));
}

/// (a, m) from either explicit coefficients or an attached example.
inline std::pair<ExampleProblem, std::optional<ExampleSystem>> open_loop(const json& req) {
    if (has(req, "example")) {
        if (has(req, "a")) throw Error(Errc::invalid_argument, "give either a or example, not both");
        const ExampleSystem ex = example_from_json(field(req, "example"));
        return {example_to_problem(ex), ex};
    }
    return {{numbers(req, "a"), integer(req, "m")}, std::nullopt};
}

inline SearchOptions search_options(const json& req) {
    SearchOptions opt;
    if (has(req, "search_s0_min")) opt.s0_min = number(req, "search_s0_min");
    if (has(req, "search_tau_max")) opt.tau_max = number(req, "search_tau_max");
    return opt;
}

}  // namespace detail

inline json health() { return {{"status", "ok"}, {"version", kVersion}}; }

inline json examples() { return examples_catalog(); }

inline json generic_mid(const json& req, const Limits& lim) {
    const int n = detail::integer(req, "n");
    detail::check_order(lim, n);
    return to_json(solve_generic_mid(n, detail::integer(req, "m"), detail::number(req, "tau"), detail::number(req, "s0")));
}

inline json control_mid(const json& req, const Limits& lim) {
    const auto [pr, ex] = detail::open_loop(req);
    detail::check_order(lim, static_cast<int>(pr.a.size()));
    std::optional<double> tau, s0;
    if (detail::has(req, "tau")) tau = detail::number(req, "tau");
    if (detail::has(req, "s0")) s0 = detail::number(req, "s0");
    const BranchPolicy policy =
        detail::has(req, "branch") ? parse_branch_policy(detail::text(req, "branch")) : BranchPolicy::preferred;
    return control_designs_to_json(control_mid_designs(pr.a, pr.m, tau, s0, policy, detail::search_options(req)), ex);
}

inline json crrid(const json& req, const Limits& lim) {
    const int n = detail::integer(req, "n");
    detail::check_order(lim, n);
    const std::vector<double> roots = detail::numbers(req, "roots");
    return to_json(solve_crrid(n, detail::integer(req, "m"), detail::number(req, "tau"), roots));
}

inline json admissibility(const json& req, const Limits& lim) {
    const auto [pr, ex] = detail::open_loop(req);
    detail::check_order(lim, static_cast<int>(pr.a.size()));
    const int ns0 = detail::integer(req, "ns0"), ntau = detail::integer(req, "ntau");
    detail::check_grid(lim, ns0, ntau);
    GridOptions opt;
    opt.enforce_limits = lim.enabled;
    opt.max_resolution = lim.max_grid;
    return to_json(
        compute_grid(pr.a, pr.m, detail::number(req, "s0_min"), detail::number(req, "tau_max"), ns0, ntau, opt));
}

inline json spectrum(const json& req, const Limits& lim) {
    const Quasipolynomial qp = qp_from_json(detail::field(req, "qp"));
    detail::check_order(lim, qp.n);
    GridSize grid;
    if (detail::has(req, "grid")) {
        const json& g = detail::field(req, "grid");
        grid = {detail::integer(g, "nx"), detail::integer(g, "ny")};
        if (grid.nx < 2 || grid.ny < 2) throw Error(Errc::invalid_argument, "grid must be at least 2x2");
    }
    detail::check_grid(lim, grid.nx, grid.ny);
    return to_json(compute_spectrum(qp, window_from_json(detail::field(req, "window")), grid));
}

inline json sensitivity(const json& req, const Limits& lim) {
    const Quasipolynomial qp = qp_from_json(detail::field(req, "qp"));
    detail::check_order(lim, qp.n);
    const int steps = detail::integer(req, "steps");
    if (lim.enabled) detail::cap(steps <= lim.max_steps, "steps <= " + std::to_string(lim.max_steps));
    return to_json(sensitivity_sweep(qp, detail::number(req, "s0"), detail::number(req, "span"), steps,
                                     detail::integer(req, "iterations")));
}

inline json simulate(const json& req, const Limits& lim) {
    const Quasipolynomial qp = qp_from_json(detail::field(req, "qp"));
    detail::check_order(lim, qp.n);
    const double T = detail::number(req, "T"), h = detail::number(req, "h");
    if (lim.enabled && T > 0.0 && h > 0.0) detail::cap(T / h <= lim.max_time_steps, "T/h <= 1e7");
    return to_json(delaylab::simulate(qp, history_from_json(detail::field(req, "history")), T, h));
}

inline json factorization(const json& req, const Limits& lim) {
    const Quasipolynomial qp = qp_from_json(detail::field(req, "qp"));
    detail::check_order(lim, qp.n);
    const double s0 = detail::number(req, "s0");
    FactorizedForm form;
    try {
        form = hypergeometric_form(qp, s0);
    } catch (const Error& e) {
        if (e.code() != Errc::hypergeometric_form_unavailable) throw;
        form = integral_form(qp, s0);
    }
    return {{"form", to_json(form, qp)}};
}

/// Report inputs from response payloads keyed by section name.
inline ReportInputs report_inputs(const json& payloads) {
    ReportInputs in;
    if (!payloads.is_object()) delaylab::detail::malformed("payloads must be an object");
    for (auto it = payloads.begin(); it != payloads.end(); ++it) {
        const json& p = it.value();
        switch (parse_report_mode(it.key())) {
            case ReportMode::GenericMID:
                in.generic_mid = placement_from_json(p, PlacementMode::GenericMID);
                break;
            case ReportMode::ControlMID: {
                const json& sol = detail::has(p, "solutions") ? detail::field(p, "solutions").at(0) : p;
                in.control_mid = control_solution_from_json(sol);
                break;
            }
            case ReportMode::CRRID:
                in.crrid = placement_from_json(p, PlacementMode::CRRID);
                break;
            case ReportMode::Admissibility:
                in.admissibility = grid_from_json(p);
                break;
            case ReportMode::Spectrum:
                in.spectrum = spectrum_from_json(p);
                break;
            case ReportMode::Sensitivity:
                in.sensitivity = trace_from_json(p);
                break;
            case ReportMode::Simulation:
                in.simulation = simulation_from_json(p);
                break;
            case ReportMode::Factorization: {
                const json& f = detail::has(p, "form") ? detail::field(p, "form") : p;
                in.factorization = factorization_from_json(f);
                if (detail::has(f, "qp")) in.factorization_qp = qp_from_json(detail::field(f, "qp"));
                break;
            }
        }
    }
    return in;
}

inline Response report(const json& req) {
    std::set<ReportMode> selection;
    const json& sel = detail::field(req, "selection");
    if (!sel.is_array()) delaylab::detail::malformed("selection must be an array");
    for (const json& s : sel) {
        if (!s.is_string()) delaylab::detail::malformed("selection entries must be strings");
        selection.insert(parse_report_mode(s.get<std::string>()));
    }
    ReportInputs in = detail::has(req, "payloads") ? report_inputs(detail::field(req, "payloads")) : ReportInputs{};
    if (detail::has(req, "example")) in.example = example_from_json(detail::field(req, "example"));
    ReportMetadata md;
    if (detail::has(req, "title")) md.title = detail::text(req, "title");
    if (detail::has(req, "timestamp")) md.timestamp = detail::text(req, "timestamp");
    const std::string format = detail::has(req, "format") ? detail::text(req, "format") : "json";
    if (format != "json" && format != "html") throw Error(Errc::invalid_argument, "format must be html or json");
    const ReportDocument doc = build_report(selection, in, md);
    if (format == "html") return {200, render_html(doc), "text/html; charset=utf-8"};
    return {200, report_to_json(doc).dump(), "application/json"};
}

}  // namespace api

inline json error_body(std::string_view code, const std::string& message) {
    return {{"code", code}, {"message", message}};
}

inline int http_status(ErrorKind k) {
    switch (k) {
        case ErrorKind::validation: return 400;
        case ErrorKind::numeric: return 422;
        case ErrorKind::limit: return 413;
    }
    return 500;
}

/// Routes one request. Never throws.
inline Response handle(std::string_view method, std::string_view path, const std::string& body,
                       const Limits& limits = Limits::from_environment()) {
    using Handler = std::function<json(const json&, const Limits&)>;
    static const std::map<std::string, Handler, std::less<>> post{
        {"/api/v1/placement/generic-mid", api::generic_mid},
        {"/api/v1/placement/control-mid", api::control_mid},
        {"/api/v1/placement/crrid", api::crrid},
        {"/api/v1/admissibility", api::admissibility},
        {"/api/v1/spectrum", api::spectrum},
        {"/api/v1/sensitivity", api::sensitivity},
        {"/api/v1/simulate", api::simulate},
        {"/api/v1/factorization", api::factorization},
    };
    try {
        if (method == "GET" && path == "/api/v1/health") return {200, api::health().dump()};
        if (method == "GET" && path == "/api/v1/examples") return {200, api::examples().dump()};
        const bool is_report = path == "/api/v1/report";
        auto it = post.find(path);
        if (!is_report && it == post.end())
            return {404, error_body("not_found", "no such endpoint: " + std::string(path)).dump()};
        if (method != "POST") return {405, error_body("method_not_allowed", "use POST").dump()};
        json req;
        try {
            req = json::parse(body);
        } catch (const json::parse_error& e) {
            return {400, error_body("malformed_request", std::string("invalid JSON: ") + e.what()).dump()};
        }
        if (!req.is_object()) return {400, error_body("malformed_request", "request body must be an object").dump()};
        if (is_report) return api::report(req);
        return {200, it->second(req, limits).dump()};
    } catch (const Error& e) {
        return {http_status(e.kind()), error_body(errc_name(e.code()), e.what()).dump()};
    } catch (const json::exception& e) {
        return {400, error_body("malformed_request", e.what()).dump()};
    } catch (const std::exception& e) {
        return {500, error_body("internal_error", e.what()).dump()};
    }
}

}  // namespace delaylab

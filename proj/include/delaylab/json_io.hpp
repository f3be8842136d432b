#pragma once

// JSON payloads shared by the command-line tool and the HTTP service.
// Non-finite doubles never reach the output: optional values become null.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "delaylab/admissibility.hpp"
#include "delaylab/catalog.hpp"
#include "delaylab/dde_sim.hpp"
#include "delaylab/factorization.hpp"
#include "delaylab/placement.hpp"
#include "delaylab/spectrum.hpp"

namespace delaylab {

using json = nlohmann::json;

inline constexpr const char* kVersion = "1.0.0";

namespace detail {

[[noreturn]] inline void malformed(const std::string& what) { throw Error(Errc::malformed_request, what); }

inline const json& field(const json& j, const char* key) {
    if (!j.is_object()) malformed("expected a JSON object");
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) malformed(std::string("missing field '") + key + "'");
    return *it;
}

inline bool has(const json& j, const char* key) {
    return j.is_object() && j.contains(key) && !j.at(key).is_null();
}

inline double number(const json& j, const char* key) {
    const json& v = field(j, key);
    if (!v.is_number()) malformed(std::string("field '") + key + "' must be a number");
    return v.get<double>();
}

inline int integer(const json& j, const char* key) {
    const json& v = field(j, key);
    if (!v.is_number_integer()) malformed(std::string("field '") + key + "' must be an integer");
    const auto x = v.get<long long>();
    if (x < -1000000000LL || x > 1000000000LL) malformed(std::string("field '") + key + "' out of range");
    return static_cast<int>(x);
}

inline std::vector<double> numbers(const json& j, const char* key) {
    const json& v = field(j, key);
    if (!v.is_array()) malformed(std::string("field '") + key + "' must be an array of numbers");
    std::vector<double> out;
    for (const json& x : v) {
        if (!x.is_number()) malformed(std::string("field '") + key + "' must be an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

inline std::string text(const json& j, const char* key) {
    const json& v = field(j, key);
    if (!v.is_string()) malformed(std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
}

inline json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json optional_number(const std::optional<double>& v) {
    return v && std::isfinite(*v) ? json(*v) : json(nullptr);
}

}  // namespace detail

inline json to_json(const Quasipolynomial& qp) {
    return {{"n", qp.n}, {"m", qp.m}, {"a", qp.a}, {"b", qp.b}, {"tau", qp.tau}};
}

inline Quasipolynomial qp_from_json(const json& j) {
    Quasipolynomial qp;
    qp.n = detail::integer(j, "n");
    qp.m = detail::integer(j, "m");
    qp.a = detail::numbers(j, "a");
    qp.b = detail::numbers(j, "b");
    qp.tau = detail::number(j, "tau");
    qp.validate();
    return qp;
}

inline json to_json(cplx z) { return {{"re", z.real()}, {"im", z.imag()}}; }

inline cplx complex_from_json(const json& j) { return {detail::number(j, "re"), detail::number(j, "im")}; }

inline std::string_view mode_name(PlacementMode m) {
    switch (m) {
        case PlacementMode::GenericMID: return "generic-mid";
        case PlacementMode::ControlMID: return "control-mid";
        case PlacementMode::CRRID: return "crrid";
    }
    return "";
}

// ---- placement ----

inline json to_json(const PlacementResult& r) {
    json targets = json::array();
    for (const auto& t : r.targets) targets.push_back({{"s0", t.s0}, {"multiplicity", t.multiplicity}});
    json out{{"mode", mode_name(r.mode)},
             {"qp", to_json(r.qp)},
             {"targets", targets},
             {"residuals", r.residuals},
             {"condition", detail::finite_or_null(r.condition_estimate)}};
    return out;
}

inline json gains_to_json(const std::vector<GainEntry>& gains) {
    json out = json::array();
    for (const auto& g : gains) out.push_back({{"name", g.name}, {"value", g.value}, {"unit", g.unit}});
    return out;
}

inline std::vector<GainEntry> gains_from_json(const json& j) {
    if (!j.is_array()) detail::malformed("gains must be an array");
    std::vector<GainEntry> out;
    for (const json& g : j) out.push_back({detail::text(g, "name"), detail::number(g, "value"), detail::text(g, "unit")});
    return out;
}

/// One control-oriented solution: s0, tau, b plus the full quasipolynomial.
inline json control_solution_to_json(const PlacementResult& r, const std::optional<ExampleSystem>& ex) {
    json s{{"s0", r.targets.at(0).s0},
           {"tau", r.qp.tau},
           {"b", r.qp.b},
           {"multiplicity", r.targets.at(0).multiplicity},
           {"residuals", r.residuals},
           {"condition", detail::finite_or_null(r.condition_estimate)},
           {"admissibility_value", r.admissibility_value},
           {"qp", to_json(r.qp)}};
    if (ex) {
        try {
            s["gains"] = gains_to_json(recover_gains(*ex, r));
        } catch (const Error& e) {
            if (e.code() != Errc::delay_below_physical_minimum) throw;
            s["gains_error"] = {{"code", errc_name(e.code())}, {"message", e.what()}};
        }
    }
    return s;
}

inline json control_designs_to_json(const std::vector<PlacementResult>& rs, const std::optional<ExampleSystem>& ex) {
    json sols = json::array();
    for (const auto& r : rs) sols.push_back(control_solution_to_json(r, ex));
    json out{{"solutions", sols}};
    if (ex) out["example"] = example_name(ex->id);
    return out;
}

inline PlacementResult placement_from_json(const json& j, PlacementMode mode) {
    PlacementResult r;
    r.mode = mode;
    r.qp = qp_from_json(detail::field(j, "qp"));
    r.residuals = detail::numbers(j, "residuals");
    r.condition_estimate = detail::has(j, "condition") ? detail::number(j, "condition") : 0.0;
    if (detail::has(j, "targets"))
        for (const json& t : detail::field(j, "targets"))
            r.targets.push_back({detail::number(t, "s0"), detail::integer(t, "multiplicity")});
    return r;
}

inline PlacementResult control_solution_from_json(const json& s) {
    PlacementResult r;
    r.mode = PlacementMode::ControlMID;
    r.qp = qp_from_json(detail::field(s, "qp"));
    const int mult = detail::has(s, "multiplicity") ? detail::integer(s, "multiplicity") : r.qp.m + 2;
    r.targets = {{detail::number(s, "s0"), mult}};
    r.residuals = detail::numbers(s, "residuals");
    r.condition_estimate = detail::has(s, "condition") ? detail::number(s, "condition") : 0.0;
    r.admissibility_value = detail::has(s, "admissibility_value") ? detail::number(s, "admissibility_value") : 0.0;
    return r;
}

// ---- admissibility ----

inline json to_json(const AdmissibilityGrid& g) {
    json values = json::array();
    for (int i = 0; i < g.ns0; ++i) {
        json row = json::array();
        for (int j = 0; j < g.ntau; ++j) row.push_back(detail::finite_or_null(g.at(i, j)));
        values.push_back(std::move(row));
    }
    json curves = json::array();
    for (const auto& c : g.curves) {
        json line = json::array();
        for (const auto& p : c) line.push_back({{"s0", p.s0}, {"tau", p.tau}});
        curves.push_back(std::move(line));
    }
    return {{"s0_min", g.s0_min}, {"tau_max", g.tau_max}, {"ns0", g.ns0}, {"ntau", g.ntau}, {"s0", g.s0},
            {"tau", g.tau},       {"values", values},     {"curves", curves}};
}

inline AdmissibilityGrid grid_from_json(const json& j) {
    AdmissibilityGrid g;
    g.s0_min = detail::number(j, "s0_min");
    g.tau_max = detail::number(j, "tau_max");
    g.ns0 = detail::integer(j, "ns0");
    g.ntau = detail::integer(j, "ntau");
    g.s0 = detail::numbers(j, "s0");
    g.tau = detail::numbers(j, "tau");
    const json& values = detail::field(j, "values");
    if (!values.is_array() || values.size() != static_cast<std::size_t>(g.ns0) ||
        g.s0.size() != static_cast<std::size_t>(g.ns0) || g.tau.size() != static_cast<std::size_t>(g.ntau))
        detail::malformed("admissibility grid dimensions disagree");
    for (const json& row : values) {
        if (!row.is_array() || row.size() != static_cast<std::size_t>(g.ntau))
            detail::malformed("admissibility grid dimensions disagree");
        for (const json& v : row) g.values.push_back(v.is_number() ? v.get<double>() : std::nan(""));
    }
    for (const json& line : detail::field(j, "curves")) {
        Polyline p;
        for (const json& q : line) p.push_back({detail::number(q, "s0"), detail::number(q, "tau")});
        g.curves.push_back(std::move(p));
    }
    return g;
}

// ---- spectrum ----

inline json to_json(const SpectralWindow& w) { return {{"x_min", w.x_min}, {"x_max", w.x_max}, {"y_max", w.y_max}}; }

inline SpectralWindow window_from_json(const json& j) {
    SpectralWindow w{detail::number(j, "x_min"), detail::number(j, "x_max"), detail::number(j, "y_max")};
    w.validate();
    return w;
}

inline json to_json(const Spectrum& sp) {
    json roots = json::array();
    for (const auto& r : sp.roots)
        roots.push_back({{"re", r.value.real()},
                         {"im", r.value.imag()},
                         {"multiplicity", r.multiplicity},
                         {"residual", r.residual}});
    return {{"window", to_json(sp.window)},
            {"roots", roots},
            {"abscissa", detail::optional_number(sp.abscissa)},
            {"certified_count", sp.certified_count}};
}

inline Spectrum spectrum_from_json(const json& j) {
    Spectrum sp;
    sp.window = window_from_json(detail::field(j, "window"));
    for (const json& r : detail::field(j, "roots")) {
        RootEstimate e;
        e.value = {detail::number(r, "re"), detail::number(r, "im")};
        e.multiplicity = detail::integer(r, "multiplicity");
        e.residual = detail::number(r, "residual");
        sp.roots.push_back(e);
    }
    if (detail::has(j, "abscissa")) sp.abscissa = detail::number(j, "abscissa");
    sp.certified_count = detail::integer(j, "certified_count");
    return sp;
}

inline json to_json(const SensitivityTrace& tr) {
    json branches = json::array();
    for (std::size_t i = 0; i < tr.taus.size(); ++i) {
        json row = json::array();
        for (std::size_t k = 0; k < tr.branches[i].size(); ++k)
            row.push_back({{"re", tr.branches[i][k].real()},
                           {"im", tr.branches[i][k].imag()},
                           {"converged", static_cast<bool>(tr.converged[i][k])},
                           {"diverged", static_cast<bool>(tr.diverged[i][k])}});
        branches.push_back(std::move(row));
    }
    return {{"taus", tr.taus}, {"branches", branches}, {"step", tr.step}, {"iterations", tr.newton_iterations}};
}

inline SensitivityTrace trace_from_json(const json& j) {
    SensitivityTrace tr;
    tr.taus = detail::numbers(j, "taus");
    tr.step = detail::has(j, "step") ? detail::number(j, "step") : 0.0;
    tr.newton_iterations = detail::has(j, "iterations") ? detail::integer(j, "iterations") : 0;
    const json& b = detail::field(j, "branches");
    if (!b.is_array() || b.size() != tr.taus.size()) detail::malformed("branches must have one row per tau");
    for (const json& row : b) {
        std::vector<cplx> zs;
        std::vector<bool> conv, div;
        for (const json& e : row) {
            zs.emplace_back(detail::number(e, "re"), detail::number(e, "im"));
            conv.push_back(detail::field(e, "converged").get<bool>());
            div.push_back(detail::has(e, "diverged") && detail::field(e, "diverged").get<bool>());
        }
        tr.branches.push_back(std::move(zs));
        tr.converged.push_back(std::move(conv));
        tr.diverged.push_back(std::move(div));
    }
    return tr;
}

// ---- simulation ----

inline HistorySpec history_from_json(const json& j) {
    const std::string kind = detail::text(j, "kind");
    if (kind == "constant") return HistorySpec::constant(detail::number(j, "value"));
    if (kind == "polynomial") return HistorySpec::polynomial(detail::numbers(j, "coeffs"));
    if (kind == "sampled") return HistorySpec::sampled(detail::numbers(j, "samples"), detail::number(j, "step"));
    detail::malformed("history kind must be constant, polynomial or sampled");
}

inline json to_json(const SimulationResult& r) {
    return {{"t", r.t}, {"y", r.y}, {"final_state", r.final_state}, {"decay_estimate", detail::optional_number(r.decay_estimate)}};
}

inline SimulationResult simulation_from_json(const json& j) {
    SimulationResult r;
    r.t = detail::numbers(j, "t");
    r.y = detail::numbers(j, "y");
    if (r.t.size() != r.y.size()) detail::malformed("t and y must have equal length");
    if (detail::has(j, "final_state")) r.final_state = detail::numbers(j, "final_state");
    if (detail::has(j, "decay_estimate")) r.decay_estimate = detail::number(j, "decay_estimate");
    return r;
}

// ---- factorization ----

inline json to_json(const FactorizedForm& f, const Quasipolynomial& qp) {
    json hyper = nullptr;
    if (f.hyper) hyper = {{"a", f.hyper->a}, {"b", f.hyper->b}, {"c", f.hyper->c}};
    return {{"s0", f.s0},
            {"multiplicity", f.multiplicity},
            {"weight_coeffs", f.weight_coeffs},
            {"beta_weight", f.beta_weight},
            {"hyper", hyper},
            {"validation_residual", f.validation_residual},
            {"text", render_factorized(f, qp)},
            {"qp", to_json(qp)}};
}

inline FactorizedForm factorization_from_json(const json& j) {
    FactorizedForm f;
    f.s0 = detail::number(j, "s0");
    f.multiplicity = detail::integer(j, "multiplicity");
    f.weight_coeffs = detail::numbers(j, "weight_coeffs");
    f.beta_weight = detail::field(j, "beta_weight").get<bool>();
    if (detail::has(j, "hyper")) {
        const json& h = detail::field(j, "hyper");
        f.hyper = KummerParams{detail::number(h, "a"), detail::number(h, "b"), detail::number(h, "c")};
    }
    f.validation_residual = detail::number(j, "validation_residual");
    return f;
}

// ---- examples ----

inline ExampleSystem example_from_json(const json& j) {
    ExampleSystem ex = ExampleSystem::make(parse_example_id(detail::text(j, "id")));
    if (detail::has(j, "params")) {
        const json& p = detail::field(j, "params");
        if (!p.is_object()) detail::malformed("params must be an object");
        for (auto it = p.begin(); it != p.end(); ++it) {
            if (!it.value().is_number()) detail::malformed("parameter '" + it.key() + "' must be a number");
            ex.params[it.key()] = it.value().get<double>();
        }
    }
    ex.validate();
    return ex;
}

inline json to_json(const ExampleSystem& ex) {
    return {{"id", example_name(ex.id)}, {"params", ex.params}};
}

inline json examples_catalog() {
    json list = json::array();
    for (ExampleId id : {ExampleId::oscillator, ExampleId::pendulum, ExampleId::windtunnel}) {
        const ExampleSystem ex = ExampleSystem::make(id);
        const ExampleProblem pr = example_to_problem(ex);
        json params = json::array();
        for (const auto& p : example_parameters(id))
            params.push_back(
                {{"name", p.name}, {"default", p.default_value}, {"unit", p.unit}, {"description", p.description}});
        list.push_back({{"id", example_name(id)}, {"parameters", params}, {"a", pr.a}, {"m", pr.m}});
    }
    return {{"examples", list}};
}

}  // namespace delaylab

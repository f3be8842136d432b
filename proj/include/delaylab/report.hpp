#pragma once

// Design-session reports: a small document model (sections of text,
// key-value, table and figure blocks), built from computation results and
// rendered to JSON (lossless for the model) or a self-contained HTML page.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "delaylab/json_io.hpp"

namespace delaylab {

enum class ReportMode { GenericMID, ControlMID, CRRID, Admissibility, Spectrum, Sensitivity, Simulation, Factorization };

inline constexpr std::array<ReportMode, 8> kReportOrder{
    ReportMode::GenericMID, ReportMode::ControlMID,  ReportMode::CRRID,      ReportMode::Admissibility,
    ReportMode::Spectrum,   ReportMode::Sensitivity, ReportMode::Simulation, ReportMode::Factorization};

inline std::string_view report_mode_name(ReportMode m) {
    switch (m) {
        case ReportMode::GenericMID: return "GenericMID";
        case ReportMode::ControlMID: return "ControlMID";
        case ReportMode::CRRID: return "CRRID";
        case ReportMode::Admissibility: return "Admissibility";
        case ReportMode::Spectrum: return "Spectrum";
        case ReportMode::Sensitivity: return "Sensitivity";
        case ReportMode::Simulation: return "Simulation";
        case ReportMode::Factorization: return "Factorization";
    }
    return "";
}

inline ReportMode parse_report_mode(std::string_view s) {
    for (ReportMode m : kReportOrder)
        if (report_mode_name(m) == s) return m;
    throw Error(Errc::invalid_argument, "unknown report section '" + std::string(s) + "'");
}

// ---- document model ----

/// Decimal places used by the HTML renderer; `general` prints 6 significant digits.
enum class Precision { general = -1, gain = 2, coefficient = 4 };

struct TextBlock {
    std::string text;
    friend bool operator==(const TextBlock&, const TextBlock&) = default;
};

struct KeyValue {
    std::string key;
    std::variant<double, std::string> value;
    Precision precision{Precision::general};
    friend bool operator==(const KeyValue&, const KeyValue&) = default;
};

struct KeyValueBlock {
    std::vector<KeyValue> entries;
    friend bool operator==(const KeyValueBlock&, const KeyValueBlock&) = default;
};

using Cell = std::variant<double, std::string>;

struct TableBlock {
    std::string caption;
    std::vector<std::string> columns;
    std::vector<Precision> precision;  // per column
    std::vector<std::vector<Cell>> rows;
    friend bool operator==(const TableBlock&, const TableBlock&) = default;
};

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    friend bool operator==(const Series&, const Series&) = default;
};

struct FigureBlock {
    enum class Kind { scatter, line };
    std::string caption;
    Kind kind{Kind::line};
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    friend bool operator==(const FigureBlock&, const FigureBlock&) = default;
};

using Block = std::variant<TextBlock, KeyValueBlock, TableBlock, FigureBlock>;

struct Section {
    std::string title;
    std::vector<Block> blocks;
    friend bool operator==(const Section&, const Section&) = default;
};

struct ReportMetadata {
    std::string title{"Delay design report"};
    std::string timestamp;
    std::string version{kVersion};
    friend bool operator==(const ReportMetadata&, const ReportMetadata&) = default;
};

struct ReportDocument {
    ReportMetadata metadata;
    std::vector<Section> sections;
    friend bool operator==(const ReportDocument&, const ReportDocument&) = default;
};

// ---- inputs ----

struct ReportInputs {
    std::optional<PlacementResult> generic_mid;
    std::optional<PlacementResult> control_mid;
    std::optional<PlacementResult> crrid;
    std::optional<AdmissibilityGrid> admissibility;
    std::optional<Spectrum> spectrum;
    std::optional<SensitivityTrace> sensitivity;
    std::optional<SimulationResult> simulation;
    std::optional<FactorizedForm> factorization;
    /// Quasipolynomial the factorized form belongs to.
    std::optional<Quasipolynomial> factorization_qp;
    /// Attaches physical gains to the control-oriented section.
    std::optional<ExampleSystem> example;
};

inline std::string utc_timestamp_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

namespace detail {

/// Longer tables are cut in the HTML view; the JSON export keeps every row.
inline constexpr std::size_t kHtmlRowLimit = 200;

inline double round6(double v) {
    if (!std::isfinite(v) || v == 0.0) return v;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return std::strtod(buf, nullptr);
}

inline std::vector<double> round6(const std::vector<double>& v) {
    std::vector<double> out;
    out.reserve(v.size());
    for (double x : v) out.push_back(round6(x));
    return out;
}

inline void require_finite(double v) {
    if (!std::isfinite(v)) throw Error(Errc::non_finite_argument, "non-finite value in report");
}

inline KeyValue kv(std::string key, double v, Precision p = Precision::general) {
    require_finite(v);
    return {std::move(key), round6(v), p};
}

inline KeyValue kv(std::string key, std::string v) { return {std::move(key), std::move(v), Precision::general}; }

inline Cell cell(double v) {
    require_finite(v);
    return round6(v);
}

inline TableBlock coefficient_table(const std::string& caption, const Quasipolynomial& qp) {
    TableBlock t{caption, {"coefficient", "value"}, {Precision::general, Precision::coefficient}, {}};
    for (int k = 0; k < qp.n; ++k) t.rows.push_back({"a" + std::to_string(k), cell(qp.a[static_cast<std::size_t>(k)])});
    for (int k = 0; k <= qp.m; ++k) t.rows.push_back({"b" + std::to_string(k), cell(qp.b[static_cast<std::size_t>(k)])});
    return t;
}

inline TableBlock residual_table(const PlacementResult& r) {
    TableBlock t{"Relative residuals of the imposed conditions", {"condition", "residual"},
                 {Precision::general, Precision::general}, {}};
    for (std::size_t k = 0; k < r.residuals.size(); ++k) t.rows.push_back({std::to_string(k), cell(r.residuals[k])});
    return t;
}

inline Section placement_section(const std::string& title, const PlacementResult& r) {
    Section s{title, {}};
    KeyValueBlock kvb;
    kvb.entries.push_back(kv("n", static_cast<double>(r.qp.n)));
    kvb.entries.push_back(kv("m", static_cast<double>(r.qp.m)));
    kvb.entries.push_back(kv("tau", r.qp.tau, Precision::coefficient));
    for (std::size_t k = 0; k < r.targets.size(); ++k) {
        const std::string suffix = r.targets.size() > 1 ? std::to_string(k) : "";
        kvb.entries.push_back(kv("s0" + suffix, r.targets[k].s0, Precision::coefficient));
        kvb.entries.push_back(kv("multiplicity" + suffix, static_cast<double>(r.targets[k].multiplicity)));
    }
    if (std::isfinite(r.condition_estimate)) kvb.entries.push_back(kv("condition estimate", r.condition_estimate));
    s.blocks.emplace_back(std::move(kvb));
    s.blocks.emplace_back(coefficient_table("Coefficients", r.qp));
    s.blocks.emplace_back(residual_table(r));
    return s;
}

inline Section control_section(const PlacementResult& r, const std::optional<ExampleSystem>& ex) {
    Section s = placement_section("Control-oriented MID", r);
    if (std::isfinite(r.admissibility_value))
        std::get<KeyValueBlock>(s.blocks.front()).entries.push_back(kv("F(s0, tau)", r.admissibility_value));
    if (ex) {
        TableBlock g{"Physical gains (" + std::string(example_name(ex->id)) + ")", {"gain", "value", "unit"},
                     {Precision::general, Precision::gain, Precision::general}, {}};
        for (const auto& e : recover_gains(*ex, r)) g.rows.push_back({e.name, cell(e.value), e.unit});
        s.blocks.emplace_back(std::move(g));
    }
    return s;
}

inline Section admissibility_section(const AdmissibilityGrid& g) {
    Section s{"Admissibility", {}};
    KeyValueBlock kvb;
    kvb.entries.push_back(kv("s0 range min", g.s0_min));
    kvb.entries.push_back(kv("tau range max", g.tau_max));
    kvb.entries.push_back(kv("grid s0 points", static_cast<double>(g.ns0)));
    kvb.entries.push_back(kv("grid tau points", static_cast<double>(g.ntau)));
    kvb.entries.push_back(kv("zero curves", static_cast<double>(g.curves.size())));
    s.blocks.emplace_back(std::move(kvb));
    FigureBlock curves{"Zero set of F in the (s0, tau) plane", FigureBlock::Kind::line, "s0", "tau", {}};
    for (std::size_t c = 0; c < g.curves.size(); ++c) {
        Series se{"curve " + std::to_string(c), {}, {}};
        for (const auto& p : g.curves[c]) {
            se.x.push_back(round6(p.s0));
            se.y.push_back(round6(p.tau));
        }
        curves.series.push_back(std::move(se));
    }
    s.blocks.emplace_back(std::move(curves));
    // Sign map of F at grid points (degenerate points omitted).
    FigureBlock signs{"Sign of F on the grid", FigureBlock::Kind::scatter, "s0", "tau", {}};
    Series pos{"F >= 0", {}, {}}, neg{"F < 0", {}, {}};
    const int stride_s = std::max(1, g.ns0 / 60), stride_t = std::max(1, g.ntau / 60);
    for (int i = 0; i < g.ns0; i += stride_s)
        for (int j = 0; j < g.ntau; j += stride_t) {
            const double v = g.at(i, j);
            if (!std::isfinite(v)) continue;
            Series& dst = v >= 0.0 ? pos : neg;
            dst.x.push_back(round6(g.s0[static_cast<std::size_t>(i)]));
            dst.y.push_back(round6(g.tau[static_cast<std::size_t>(j)]));
        }
    signs.series = {std::move(pos), std::move(neg)};
    s.blocks.emplace_back(std::move(signs));
    TableBlock values{"F on the grid (degenerate points omitted)", {"s0", "tau", "F"},
                      {Precision::coefficient, Precision::coefficient, Precision::general}, {}};
    for (int i = 0; i < g.ns0; ++i)
        for (int j = 0; j < g.ntau; ++j) {
            const double v = g.at(i, j);
            if (!std::isfinite(v)) continue;
            values.rows.push_back({cell(g.s0[static_cast<std::size_t>(i)]), cell(g.tau[static_cast<std::size_t>(j)]), cell(v)});
        }
    s.blocks.emplace_back(std::move(values));
    return s;
}

inline Section spectrum_section(const Spectrum& sp) {
    Section s{"Spectrum", {}};
    KeyValueBlock kvb;
    kvb.entries.push_back(kv("window x_min", sp.window.x_min));
    kvb.entries.push_back(kv("window x_max", sp.window.x_max));
    kvb.entries.push_back(kv("window |Im| max", sp.window.y_max));
    kvb.entries.push_back(kv("certified count", static_cast<double>(sp.certified_count)));
    if (sp.abscissa) kvb.entries.push_back(kv("spectral abscissa", *sp.abscissa, Precision::coefficient));
    s.blocks.emplace_back(std::move(kvb));
    TableBlock t{"Roots (upper half plane; conjugates implied)", {"re", "im", "multiplicity", "residual"},
                 {Precision::coefficient, Precision::coefficient, Precision::general, Precision::general}, {}};
    FigureBlock f{"Characteristic roots", FigureBlock::Kind::scatter, "Re s", "Im s", {}};
    Series pts{"roots", {}, {}};
    for (const auto& r : sp.roots) {
        t.rows.push_back({cell(r.value.real()), cell(r.value.imag()), cell(r.multiplicity), cell(r.residual)});
        pts.x.push_back(round6(r.value.real()));
        pts.y.push_back(round6(r.value.imag()));
        if (r.value.imag() != 0.0) {
            pts.x.push_back(round6(r.value.real()));
            pts.y.push_back(round6(-r.value.imag()));
        }
    }
    s.blocks.emplace_back(std::move(t));
    f.series.push_back(std::move(pts));
    s.blocks.emplace_back(std::move(f));
    return s;
}

inline Section sensitivity_section(const SensitivityTrace& tr) {
    Section s{"Sensitivity", {}};
    KeyValueBlock kvb;
    if (!tr.taus.empty()) {
        kvb.entries.push_back(kv("tau from", tr.taus.front(), Precision::coefficient));
        kvb.entries.push_back(kv("tau to", tr.taus.back(), Precision::coefficient));
    }
    kvb.entries.push_back(kv("tau step", tr.step));
    kvb.entries.push_back(kv("Newton iterations", static_cast<double>(tr.newton_iterations)));
    s.blocks.emplace_back(std::move(kvb));
    TableBlock t{"Branch positions", {"tau", "branch", "re", "im", "converged"},
                 {Precision::coefficient, Precision::general, Precision::coefficient, Precision::coefficient,
                  Precision::general},
                 {}};
    FigureBlock f{"Root branches as tau varies", FigureBlock::Kind::scatter, "Re s", "Im s", {}};
    const std::size_t nb = tr.branches.empty() ? 0 : tr.branches.front().size();
    for (std::size_t j = 0; j < nb; ++j) {
        Series se{"branch " + std::to_string(j), {}, {}};
        for (std::size_t i = 0; i < tr.taus.size(); ++i) {
            const cplx z = tr.branches[i][j];
            se.x.push_back(round6(z.real()));
            se.y.push_back(round6(z.imag()));
        }
        f.series.push_back(std::move(se));
    }
    for (std::size_t i = 0; i < tr.taus.size(); ++i)
        for (std::size_t j = 0; j < tr.branches[i].size(); ++j)
            t.rows.push_back({cell(tr.taus[i]), cell(static_cast<double>(j)), cell(tr.branches[i][j].real()),
                              cell(tr.branches[i][j].imag()), tr.converged[i][j] ? "yes" : "no"});
    s.blocks.emplace_back(std::move(f));
    s.blocks.emplace_back(std::move(t));
    return s;
}

inline Section simulation_section(const SimulationResult& r) {
    Section s{"Simulation", {}};
    KeyValueBlock kvb;
    if (!r.t.empty()) kvb.entries.push_back(kv("final time", r.t.back()));
    kvb.entries.push_back(kv("samples", static_cast<double>(r.t.size())));
    if (r.decay_estimate) kvb.entries.push_back(kv("decay rate estimate", *r.decay_estimate, Precision::coefficient));
    for (std::size_t k = 0; k < r.final_state.size(); ++k)
        kvb.entries.push_back(kv("y^(" + std::to_string(k) + ") at final time", r.final_state[k]));
    s.blocks.emplace_back(std::move(kvb));
    for (double v : r.y) require_finite(v);
    s.blocks.emplace_back(FigureBlock{"Closed-loop response", FigureBlock::Kind::line, "t", "y",
                                      {Series{"y", round6(r.t), round6(r.y)}}});
    return s;
}

inline Section factorization_section(const FactorizedForm& f, const std::optional<Quasipolynomial>& qp) {
    Section s{"Factorization", {}};
    KeyValueBlock kvb;
    kvb.entries.push_back(kv("s0", f.s0, Precision::coefficient));
    kvb.entries.push_back(kv("multiplicity", static_cast<double>(f.multiplicity)));
    kvb.entries.push_back(kv("weight", f.beta_weight ? std::string("beta type") : std::string("general polynomial")));
    if (f.hyper) {
        kvb.entries.push_back(kv("Kummer a", f.hyper->a));
        kvb.entries.push_back(kv("Kummer b", f.hyper->b));
        kvb.entries.push_back(kv("weight constant c", f.hyper->c, Precision::coefficient));
    }
    kvb.entries.push_back(kv("validation residual", f.validation_residual));
    s.blocks.emplace_back(std::move(kvb));
    TableBlock w{"Weight w(t) coefficients", {"power", "coefficient"}, {Precision::general, Precision::coefficient}, {}};
    for (std::size_t k = 0; k < f.weight_coeffs.size(); ++k)
        w.rows.push_back({cell(static_cast<double>(k)), cell(f.weight_coeffs[k])});
    s.blocks.emplace_back(std::move(w));
    if (qp) s.blocks.emplace_back(TextBlock{render_factorized(f, *qp)});
    return s;
}

}  // namespace detail

/// One section per selected mode, in the fixed order of kReportOrder.
inline ReportDocument build_report(const std::set<ReportMode>& selection, const ReportInputs& in,
                                   ReportMetadata metadata = {}) {
    if (metadata.timestamp.empty()) metadata.timestamp = utc_timestamp_now();
    ReportDocument doc{std::move(metadata), {}};
    auto missing = [](ReportMode m) {
        return Error(Errc::selection_without_result,
                     "selection without result: " + std::string(report_mode_name(m)));
    };
    for (ReportMode m : kReportOrder) {
        if (!selection.count(m)) continue;
        switch (m) {
            case ReportMode::GenericMID:
                if (!in.generic_mid) throw missing(m);
                doc.sections.push_back(detail::placement_section("Generic MID", *in.generic_mid));
                break;
            case ReportMode::ControlMID:
                if (!in.control_mid) throw missing(m);
                doc.sections.push_back(detail::control_section(*in.control_mid, in.example));
                break;
            case ReportMode::CRRID:
                if (!in.crrid) throw missing(m);
                doc.sections.push_back(detail::placement_section("CRRID", *in.crrid));
                break;
            case ReportMode::Admissibility:
                if (!in.admissibility) throw missing(m);
                doc.sections.push_back(detail::admissibility_section(*in.admissibility));
                break;
            case ReportMode::Spectrum:
                if (!in.spectrum) throw missing(m);
                doc.sections.push_back(detail::spectrum_section(*in.spectrum));
                break;
            case ReportMode::Sensitivity:
                if (!in.sensitivity) throw missing(m);
                doc.sections.push_back(detail::sensitivity_section(*in.sensitivity));
                break;
            case ReportMode::Simulation:
                if (!in.simulation) throw missing(m);
                doc.sections.push_back(detail::simulation_section(*in.simulation));
                break;
            case ReportMode::Factorization:
                if (!in.factorization) throw missing(m);
                doc.sections.push_back(detail::factorization_section(*in.factorization, in.factorization_qp));
                break;
        }
    }
    return doc;
}

// ---- JSON ----

namespace detail {

inline std::string_view precision_name(Precision p) {
    switch (p) {
        case Precision::gain: return "gain";
        case Precision::coefficient: return "coefficient";
        case Precision::general: return "general";
    }
    return "general";
}

inline Precision parse_precision(const std::string& s) {
    if (s == "gain") return Precision::gain;
    if (s == "coefficient") return Precision::coefficient;
    if (s == "general") return Precision::general;
    malformed("unknown precision class '" + s + "'");
}

inline json cell_to_json(const Cell& c) {
    return std::holds_alternative<double>(c) ? json(std::get<double>(c)) : json(std::get<std::string>(c));
}

inline Cell cell_from_json(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return j.get<std::string>();
    malformed("table cells must be numbers or strings");
}

inline json block_to_json(const Block& b) {
    return std::visit(
        [](const auto& blk) -> json {
            using T = std::decay_t<decltype(blk)>;
            if constexpr (std::is_same_v<T, TextBlock>) {
                return {{"type", "text"}, {"text", blk.text}};
            } else if constexpr (std::is_same_v<T, KeyValueBlock>) {
                json e = json::array();
                for (const auto& kv : blk.entries)
                    e.push_back({{"key", kv.key}, {"value", cell_to_json(kv.value)}, {"precision", precision_name(kv.precision)}});
                return {{"type", "key_value"}, {"entries", e}};
            } else if constexpr (std::is_same_v<T, TableBlock>) {
                json prec = json::array();
                for (Precision p : blk.precision) prec.push_back(precision_name(p));
                json rows = json::array();
                for (const auto& r : blk.rows) {
                    json row = json::array();
                    for (const auto& c : r) row.push_back(cell_to_json(c));
                    rows.push_back(std::move(row));
                }
                return {{"type", "table"}, {"caption", blk.caption}, {"columns", blk.columns}, {"precision", prec}, {"rows", rows}};
            } else {
                json series = json::array();
                for (const auto& s : blk.series) series.push_back({{"name", s.name}, {"x", s.x}, {"y", s.y}});
                return {{"type", "figure"},
                        {"caption", blk.caption},
                        {"kind", blk.kind == FigureBlock::Kind::scatter ? "scatter" : "line"},
                        {"x_label", blk.x_label},
                        {"y_label", blk.y_label},
                        {"series", series}};
            }
        },
        b);
}

inline Block block_from_json(const json& j) {
    const std::string type = text(j, "type");
    if (type == "text") return TextBlock{text(j, "text")};
    if (type == "key_value") {
        KeyValueBlock b;
        for (const json& e : field(j, "entries"))
            b.entries.push_back({text(e, "key"), cell_from_json(field(e, "value")), parse_precision(text(e, "precision"))});
        return b;
    }
    if (type == "table") {
        TableBlock t;
        t.caption = text(j, "caption");
        for (const json& c : field(j, "columns")) t.columns.push_back(c.get<std::string>());
        for (const json& p : field(j, "precision")) t.precision.push_back(parse_precision(p.get<std::string>()));
        for (const json& r : field(j, "rows")) {
            std::vector<Cell> row;
            for (const json& c : r) row.push_back(cell_from_json(c));
            t.rows.push_back(std::move(row));
        }
        return t;
    }
    if (type == "figure") {
        FigureBlock f;
        f.caption = text(j, "caption");
        f.kind = text(j, "kind") == "scatter" ? FigureBlock::Kind::scatter : FigureBlock::Kind::line;
        f.x_label = text(j, "x_label");
        f.y_label = text(j, "y_label");
        for (const json& s : field(j, "series")) f.series.push_back({text(s, "name"), numbers(s, "x"), numbers(s, "y")});
        return f;
    }
    malformed("unknown block type '" + type + "'");
}

}  // namespace detail

inline json report_to_json(const ReportDocument& doc) {
    json sections = json::array();
    for (const auto& s : doc.sections) {
        json blocks = json::array();
        for (const auto& b : s.blocks) blocks.push_back(detail::block_to_json(b));
        sections.push_back({{"title", s.title}, {"blocks", blocks}});
    }
    return {{"metadata",
             {{"title", doc.metadata.title}, {"timestamp", doc.metadata.timestamp}, {"version", doc.metadata.version}}},
            {"sections", sections}};
}

inline std::string render_json(const ReportDocument& doc) { return report_to_json(doc).dump(2); }

inline ReportDocument report_from_json(const json& j) {
    ReportDocument doc;
    const json& md = detail::field(j, "metadata");
    doc.metadata = {detail::text(md, "title"), detail::text(md, "timestamp"), detail::text(md, "version")};
    for (const json& s : detail::field(j, "sections")) {
        Section sec{detail::text(s, "title"), {}};
        for (const json& b : detail::field(s, "blocks")) sec.blocks.push_back(detail::block_from_json(b));
        doc.sections.push_back(std::move(sec));
    }
    return doc;
}

inline ReportDocument parse_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(Errc::malformed_request, std::string("invalid JSON: ") + e.what());
    }
    return report_from_json(j);
}

// ---- HTML ----

namespace detail {

inline std::string escape_html(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

inline std::string format_number(double v, Precision p) {
    char buf[64];
    if (p == Precision::general)
        std::snprintf(buf, sizeof buf, "%.6g", v);
    else
        std::snprintf(buf, sizeof buf, "%.*f", static_cast<int>(p), v);
    std::string s = buf;
    if (s == "-0" || s.find_first_not_of("-0.") == std::string::npos) {
        if (!s.empty() && s[0] == '-') s.erase(0, 1);
    }
    return s;
}

inline std::string format_cell(const Cell& c, Precision p) {
    if (std::holds_alternative<std::string>(c)) return escape_html(std::get<std::string>(c));
    return format_number(std::get<double>(c), p);
}

inline std::string svg_figure(const FigureBlock& f) {
    constexpr double W = 480, H = 320, L = 56, R = 16, T = 16, B = 40;
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
    for (const auto& s : f.series)
        for (std::size_t k = 0; k < std::min(s.x.size(), s.y.size()); ++k) {
            xmin = std::min(xmin, s.x[k]);
            xmax = std::max(xmax, s.x[k]);
            ymin = std::min(ymin, s.y[k]);
            ymax = std::max(ymax, s.y[k]);
        }
    if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    if (xmax - xmin <= 0) xmin -= 1, xmax += 1;
    if (ymax - ymin <= 0) ymin -= 1, ymax += 1;
    auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
    auto py = [&](double y) { return H - B - (y - ymin) / (ymax - ymin) * (H - T - B); };
    static constexpr const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" height=\"%g\" viewBox=\"0 0 %g %g\">", W, H, W, H);
    out += buf;
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" stroke=\"#444\"/>", L, T, W - L - R,
                  H - T - B);
    out += buf;
    std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" font-size=\"11\">%.4g</text>", L, H - B + 14, xmin);
    out += buf;
    std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" font-size=\"11\" text-anchor=\"end\">%.4g</text>", W - R,
                  H - B + 14, xmax);
    out += buf;
    std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" font-size=\"11\" text-anchor=\"end\">%.4g</text>", L - 4,
                  H - B, ymin);
    out += buf;
    std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" font-size=\"11\" text-anchor=\"end\">%.4g</text>", L - 4,
                  T + 10, ymax);
    out += buf;
    out += "<text x=\"" + std::to_string(static_cast<int>((L + W - R) / 2)) + "\" y=\"" +
           std::to_string(static_cast<int>(H - 8)) + "\" font-size=\"12\" text-anchor=\"middle\">" +
           escape_html(f.x_label) + "</text>";
    out += "<text x=\"12\" y=\"" + std::to_string(static_cast<int>((T + H - B) / 2)) +
           "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 12 " +
           std::to_string(static_cast<int>((T + H - B) / 2)) + ")\">" + escape_html(f.y_label) + "</text>";
    for (std::size_t si = 0; si < f.series.size(); ++si) {
        const auto& s = f.series[si];
        const char* col = colors[si % 6];
        const std::size_t n = std::min(s.x.size(), s.y.size());
        if (f.kind == FigureBlock::Kind::line) {
            if (n == 0) continue;
            // Thin long series to at most ~2000 vertices.
            const std::size_t stride = std::max<std::size_t>(1, n / 2000);
            out += "<polyline fill=\"none\" stroke=\"";
            out += col;
            out += "\" stroke-width=\"1.2\" points=\"";
            for (std::size_t k = 0; k < n; k += stride) {
                std::snprintf(buf, sizeof buf, "%.1f,%.1f ", px(s.x[k]), py(s.y[k]));
                out += buf;
            }
            out += "\"/>";
        } else {
            for (std::size_t k = 0; k < n; ++k) {
                std::snprintf(buf, sizeof buf, "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"2.5\" fill=\"%s\"/>", px(s.x[k]),
                              py(s.y[k]), col);
                out += buf;
            }
        }
    }
    out += "</svg>";
    return out;
}

}  // namespace detail

/// Self-contained HTML page: inline styles, figures as inline SVG. Gains
/// print with 2 decimals, coefficients with 4, everything else with 6
/// significant digits.
inline std::string render_html(const ReportDocument& doc) {
    using detail::escape_html;
    std::string out;
    out += "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\"/>\n<title>";
    out += escape_html(doc.metadata.title);
    out += "</title>\n<style>\nbody{font-family:sans-serif;margin:2em;max-width:60em}\n"
           "table{border-collapse:collapse;margin:0.5em 0}\n"
           "td,th{border:1px solid #bbb;padding:2px 8px;text-align:right}\n"
           "th{background:#eee}\nfigure{margin:1em 0}\n</style>\n</head>\n<body>\n";
    out += "<h1>" + escape_html(doc.metadata.title) + "</h1>\n";
    out += "<p>Generated " + escape_html(doc.metadata.timestamp) + ", version " + escape_html(doc.metadata.version) +
           "</p>\n";
    for (const auto& sec : doc.sections) {
        out += "<section>\n<h2>" + escape_html(sec.title) + "</h2>\n";
        for (const auto& b : sec.blocks) {
            if (const auto* t = std::get_if<TextBlock>(&b)) {
                out += "<p><code>" + escape_html(t->text) + "</code></p>\n";
            } else if (const auto* kvb = std::get_if<KeyValueBlock>(&b)) {
                out += "<table>\n";
                for (const auto& e : kvb->entries)
                    out += "<tr><th>" + escape_html(e.key) + "</th><td>" + detail::format_cell(e.value, e.precision) +
                           "</td></tr>\n";
                out += "</table>\n";
            } else if (const auto* tb = std::get_if<TableBlock>(&b)) {
                out += "<table>\n<caption>" + escape_html(tb->caption) + "</caption>\n<tr>";
                for (const auto& c : tb->columns) out += "<th>" + escape_html(c) + "</th>";
                out += "</tr>\n";
                const std::size_t shown = std::min(tb->rows.size(), detail::kHtmlRowLimit);
                for (std::size_t r = 0; r < shown; ++r) {
                    const auto& row = tb->rows[r];
                    out += "<tr>";
                    for (std::size_t k = 0; k < row.size(); ++k) {
                        const Precision p = k < tb->precision.size() ? tb->precision[k] : Precision::general;
                        out += "<td>" + detail::format_cell(row[k], p) + "</td>";
                    }
                    out += "</tr>\n";
                }
                if (shown < tb->rows.size())
                    out += "<tr><td colspan=\"" + std::to_string(tb->columns.size()) + "\">" +
                           std::to_string(tb->rows.size() - shown) + " more rows in the JSON export</td></tr>\n";
                out += "</table>\n";
            } else if (const auto* fb = std::get_if<FigureBlock>(&b)) {
                out += "<figure>\n" + detail::svg_figure(*fb) + "\n<figcaption>" + escape_html(fb->caption) +
                       "</figcaption>\n</figure>\n";
            }
        }
        out += "</section>\n";
    }
    out += "</body>\n</html>\n";
    return out;
}

}  // namespace delaylab

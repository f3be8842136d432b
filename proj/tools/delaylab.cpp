// delaylab command-line tool. Each subcommand builds the same request body the
// HTTP service accepts and routes it through the same handler, so `--json`
// output is the service payload.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "delaylab/delaylab.hpp"
#include "delaylab/server.hpp"

using namespace delaylab;

namespace {

std::vector<double> parse_list(const std::string& s, const char* what) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw Error(Errc::invalid_argument, std::string("cannot parse ") + what + " list '" + s + "'");
        }
    }
    return out;
}

std::pair<int, int> parse_grid(const std::string& s) {
    const auto x = s.find('x');
    try {
        if (x == std::string::npos) {
            const int v = std::stoi(s);
            return {v, v};
        }
        return {std::stoi(s.substr(0, x)), std::stoi(s.substr(x + 1))};
    } catch (const std::exception&) {
        throw Error(Errc::invalid_argument, "grid must look like 200x200");
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::invalid_argument, "cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json parse_json_arg(const std::string& s) {
    const std::string text = !s.empty() && s[0] == '@' ? read_file(s.substr(1)) : s;
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(Errc::malformed_request, std::string("invalid JSON: ") + e.what());
    }
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error(Errc::invalid_argument, "cannot write " + path);
    out << text;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string list(const json& arr) {
    std::string s = "[";
    for (std::size_t k = 0; k < arr.size(); ++k) s += (k ? ", " : "") + num(arr[k].get<double>());
    return s + "]";
}

std::string csv_num(const json& v) {
    if (!v.is_number()) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
}

// ---- shared option groups ----

struct SystemArgs {
    std::string a;
    int m{-1};
    std::string example;
    double gravity{std::nan("")};
    std::vector<std::string> params;

    void add(CLI::App* sub) {
        sub->add_option("--a", a, "open-loop coefficients a0,...,a(n-1)");
        sub->add_option("--m", m, "degree of the delayed polynomial");
        sub->add_option("--example", example, "oscillator | pendulum | windtunnel");
        sub->add_option("--gravity", gravity, "pendulum gravity in m/s^2 (default 9.81)");
        sub->add_option("--param", params, "example parameter name=value (repeatable)");
    }

    /// Writes either "a"/"m" or "example" into the request.
    void fill(json& req) const {
        if (!example.empty()) {
            json ex{{"id", example}, {"params", json::object()}};
            if (!std::isnan(gravity)) ex["params"]["gravity"] = gravity;
            for (const auto& p : params) {
                const auto eq = p.find('=');
                if (eq == std::string::npos) throw Error(Errc::invalid_argument, "--param expects name=value");
                ex["params"][p.substr(0, eq)] = parse_list(p.substr(eq + 1), "parameter").at(0);
            }
            req["example"] = ex;
            return;
        }
        if (a.empty() || m < 0) throw Error(Errc::invalid_argument, "give --a and --m, or --example");
        req["a"] = parse_list(a, "a");
        req["m"] = m;
    }
};

struct QpArgs {
    std::string qp;
    std::string a;
    std::string b;
    double tau{std::nan("")};

    void add(CLI::App* sub) {
        sub->add_option("--qp", qp, "quasipolynomial as JSON (or @file)");
        sub->add_option("--a", a, "coefficients a0,...,a(n-1)");
        sub->add_option("--b", b, "coefficients b0,...,bm");
        sub->add_option("--tau", tau, "delay");
    }

    [[nodiscard]] json get() const {
        if (!qp.empty()) return parse_json_arg(qp);
        if (a.empty() || b.empty() || std::isnan(tau)) throw Error(Errc::invalid_argument, "give --qp, or --a, --b and --tau");
        const auto av = parse_list(a, "a");
        const auto bv = parse_list(b, "b");
        return {{"n", av.size()}, {"m", static_cast<int>(bv.size()) - 1}, {"a", av}, {"b", bv}, {"tau", tau}};
    }
};

struct Output {
    bool json_out{false};
    std::string out;

    void add(CLI::App* sub) {
        sub->add_flag("--json", json_out, "machine-readable output (service payload)");
        sub->add_option("--out", out, "write results to this file");
    }
};

// ---- human-readable printers ----

void print_placement(const json& p) {
    const json& qp = p.at("qp");
    std::cout << "mode       " << p.at("mode").get<std::string>() << "\n";
    for (const auto& t : p.at("targets"))
        std::cout << "target     s0 = " << num(t.at("s0").get<double>()) << ", multiplicity "
                  << t.at("multiplicity").get<int>() << "\n";
    std::cout << "tau        " << num(qp.at("tau").get<double>()) << "\n";
    std::cout << "a          " << list(qp.at("a")) << "\n";
    std::cout << "b          " << list(qp.at("b")) << "\n";
    std::cout << "residuals  " << list(p.at("residuals")) << "\n";
    if (p.at("condition").is_number()) std::cout << "condition  " << num(p.at("condition").get<double>()) << "\n";
}

void print_control(const json& p) {
    const auto& sols = p.at("solutions");
    for (std::size_t k = 0; k < sols.size(); ++k) {
        const json& s = sols[k];
        std::cout << "solution " << k << ": s0 = " << num(s.at("s0").get<double>())
                  << ", tau = " << num(s.at("tau").get<double>()) << ", multiplicity " << s.at("multiplicity").get<int>()
                  << "\n";
        std::cout << "  b = " << list(s.at("b")) << "\n";
        std::cout << "  residuals = " << list(s.at("residuals")) << "\n";
        if (s.contains("gains"))
            for (const auto& g : s.at("gains"))
                std::cout << "  " << g.at("name").get<std::string>() << " = " << num(g.at("value").get<double>()) << " "
                          << g.at("unit").get<std::string>() << "\n";
        if (s.contains("gains_error")) std::cout << "  gains: " << s.at("gains_error").at("message").get<std::string>() << "\n";
    }
}

// ---- subcommands ----

int run(int argc, char** argv) {
    CLI::App app{"Partial pole placement for linear time-delay systems"};
    app.require_subcommand(1);
    const Limits limits = Limits::from_environment();

    Output out;

    auto* examples = app.add_subcommand("examples", "list the worked examples and their parameters");
    out.add(examples);

    auto* generic = app.add_subcommand("generic-mid", "root of maximal multiplicity n+m+1 at s0");
    int g_n = 0, g_m = 0;
    double g_tau = 0, g_s0 = 0;
    generic->add_option("--n", g_n)->required();
    generic->add_option("--m", g_m)->required();
    generic->add_option("--tau", g_tau)->required();
    generic->add_option("--s0", g_s0)->required();
    out.add(generic);

    auto* control = app.add_subcommand("control-mid", "root of multiplicity m+2 with the open loop fixed");
    SystemArgs c_sys;
    c_sys.add(control);
    double c_tau = std::nan(""), c_s0 = std::nan("");
    std::string c_branch = "rightmost";
    control->add_option("--tau", c_tau, "delay (solve for s0)");
    control->add_option("--s0", c_s0, "root (solve for tau)");
    control->add_option("--branch", c_branch, "rightmost | smallest | all")->check(CLI::IsMember({"rightmost", "smallest", "all"}));
    out.add(control);

    auto* crrid = app.add_subcommand("crrid", "n+m+1 distinct real roots");
    int r_n = 0, r_m = 0;
    double r_tau = 0;
    std::string r_roots;
    crrid->add_option("--n", r_n)->required();
    crrid->add_option("--m", r_m)->required();
    crrid->add_option("--tau", r_tau)->required();
    crrid->add_option("--roots", r_roots, "comma-separated real roots")->required();
    out.add(crrid);

    auto* adm = app.add_subcommand("admissibility", "sample F(s0, tau) and extract its zero curves");
    SystemArgs a_sys;
    a_sys.add(adm);
    double a_s0_min = -4, a_tau_max = 2;
    std::string a_grid = "200x200";
    adm->add_option("--s0-min", a_s0_min);
    adm->add_option("--tau-max", a_tau_max);
    adm->add_option("--grid", a_grid, "NS0xNTAU");
    out.add(adm);

    auto* spec = app.add_subcommand("spectrum", "certified roots in a window");
    QpArgs s_qp;
    s_qp.add(spec);
    std::string s_window, s_grid;
    spec->add_option("--window", s_window, "x_min,x_max,y_max")->required();
    spec->add_option("--grid", s_grid, "NXxNY (default 400x400)");
    out.add(spec);

    auto* sens = app.add_subcommand("sensitivity", "follow the roots born at s0 as tau varies");
    QpArgs e_qp;
    e_qp.add(sens);
    double e_s0 = 0, e_span = 0.2;
    int e_steps = 41, e_iter = 20;
    sens->add_option("--s0", e_s0)->required();
    sens->add_option("--span", e_span, "relative tau span in (0, 1)");
    sens->add_option("--steps", e_steps);
    sens->add_option("--iterations", e_iter, "Newton iterations per step");
    out.add(sens);

    auto* sim = app.add_subcommand("simulate", "integrate the closed loop by the method of steps");
    QpArgs m_qp;
    m_qp.add(sim);
    std::string m_history = "constant:1";
    double m_T = 10, m_h = std::nan("");
    sim->add_option("--history", m_history, "constant:V | polynomial:c0,c1,...");
    sim->add_option("--T", m_T, "final time");
    sim->add_option("--step", m_h, "time step (default tau/20)");
    out.add(sim);

    auto* fact = app.add_subcommand("factorization", "integral / hypergeometric form of a maximal-multiplicity design");
    QpArgs f_qp;
    f_qp.add(fact);
    double f_s0 = 0;
    fact->add_option("--s0", f_s0)->required();
    out.add(fact);

    auto* rep = app.add_subcommand("report", "design report (HTML or JSON)");
    SystemArgs p_sys;
    p_sys.add(rep);
    double p_tau = std::nan(""), p_s0 = std::nan("");
    std::string p_sections = "ControlMID,Spectrum,Simulation", p_format = "html", p_request, p_title, p_timestamp;
    rep->add_option("--tau", p_tau);
    rep->add_option("--s0", p_s0);
    rep->add_option("--sections", p_sections, "comma-separated section names");
    rep->add_option("--format", p_format)->check(CLI::IsMember({"html", "json"}));
    rep->add_option("--request", p_request, "report request body as JSON (or @file); overrides the design flags");
    rep->add_option("--title", p_title);
    rep->add_option("--timestamp", p_timestamp, "fixed timestamp for reproducible output");
    rep->add_option("--out", out.out, "output file (default stdout)");

    auto* srv = app.add_subcommand("serve", "run the HTTP JSON API");
    std::string v_addr;
    srv->add_option("--addr", v_addr, "host:port (default $DELAYLAB_ADDR or 127.0.0.1:8080)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        std::cout << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    // Prints the payload (or hands it to `human`) and writes --out as JSON.
    auto emit = [&](const json& payload, auto&& human) {
        if (out.json_out)
            std::cout << payload.dump(2) << "\n";
        else
            human(payload);
        if (!out.out.empty()) write_text(out.out, payload.dump(2) + "\n");
    };
    auto emit_csv = [&](const json& payload, auto&& human, auto&& csv) {
        if (out.json_out)
            std::cout << payload.dump(2) << "\n";
        else
            human(payload);
        if (!out.out.empty()) {
            std::ofstream f(out.out);
            if (!f) throw Error(Errc::invalid_argument, "cannot write " + out.out);
            csv(payload, f);
        }
    };

    if (*examples) {
        emit(api::examples(), [](const json& p) {
            for (const auto& e : p.at("examples")) {
                std::cout << e.at("id").get<std::string>() << ": a = " << list(e.at("a")) << ", m = " << e.at("m").get<int>()
                          << "\n";
                for (const auto& q : e.at("parameters"))
                    std::cout << "    " << q.at("name").get<std::string>() << " = " << num(q.at("default").get<double>())
                              << " " << q.at("unit").get<std::string>() << "  (" << q.at("description").get<std::string>()
                              << ")\n";
            }
        });
    } else if (*generic) {
        emit(api::generic_mid({{"n", g_n}, {"m", g_m}, {"tau", g_tau}, {"s0", g_s0}}, limits), print_placement);
    } else if (*control) {
        json req{{"branch", c_branch}};
        c_sys.fill(req);
        if (!std::isnan(c_tau)) req["tau"] = c_tau;
        if (!std::isnan(c_s0)) req["s0"] = c_s0;
        emit(api::control_mid(req, limits), print_control);
    } else if (*crrid) {
        emit(api::crrid({{"n", r_n}, {"m", r_m}, {"tau", r_tau}, {"roots", parse_list(r_roots, "roots")}}, limits),
             print_placement);
    } else if (*adm) {
        const auto [ns0, ntau] = parse_grid(a_grid);
        json req{{"s0_min", a_s0_min}, {"tau_max", a_tau_max}, {"ns0", ns0}, {"ntau", ntau}};
        a_sys.fill(req);
        emit_csv(
            api::admissibility(req, limits),
            [](const json& p) {
                std::cout << "grid " << p.at("ns0").get<int>() << "x" << p.at("ntau").get<int>() << ", "
                          << p.at("curves").size() << " zero curve(s)\n";
                for (const auto& c : p.at("curves")) {
                    double top = 0, s_at = 0;
                    for (const auto& q : c)
                        if (q.at("tau").get<double>() > top) top = q.at("tau").get<double>(), s_at = q.at("s0").get<double>();
                    std::cout << "  curve with " << c.size() << " points, highest at (s0, tau) = (" << num(s_at) << ", "
                              << num(top) << ")\n";
                }
            },
            [](const json& p, std::ostream& f) {
                f << "s0,tau,F\n";
                const auto& s0 = p.at("s0");
                const auto& tau = p.at("tau");
                const auto& v = p.at("values");
                for (std::size_t i = 0; i < s0.size(); ++i)
                    for (std::size_t j = 0; j < tau.size(); ++j)
                        f << csv_num(s0[i]) << "," << csv_num(tau[j]) << "," << csv_num(v[i][j]) << "\n";
            });
    } else if (*spec) {
        const auto w = parse_list(s_window, "window");
        if (w.size() != 3) throw Error(Errc::invalid_argument, "window must be x_min,x_max,y_max");
        json req{{"qp", s_qp.get()}, {"window", {{"x_min", w[0]}, {"x_max", w[1]}, {"y_max", w[2]}}}};
        if (!s_grid.empty()) {
            const auto [nx, ny] = parse_grid(s_grid);
            req["grid"] = {{"nx", nx}, {"ny", ny}};
        }
        emit_csv(
            api::spectrum(req, limits),
            [](const json& p) {
                std::cout << "certified count " << p.at("certified_count").get<int>() << " (conjugates included)\n";
                if (p.at("abscissa").is_number()) std::cout << "abscissa " << num(p.at("abscissa").get<double>()) << "\n";
                for (const auto& r : p.at("roots"))
                    std::cout << "  " << num(r.at("re").get<double>()) << (r.at("im").get<double>() > 0 ? " +/- " : "  ")
                              << (r.at("im").get<double>() > 0 ? num(r.at("im").get<double>()) + "i" : "")
                              << "  multiplicity " << r.at("multiplicity").get<int>() << "  residual "
                              << num(r.at("residual").get<double>()) << "\n";
            },
            [](const json& p, std::ostream& f) {
                f << "re,im,multiplicity,residual\n";
                for (const auto& r : p.at("roots"))
                    f << csv_num(r.at("re")) << "," << csv_num(r.at("im")) << "," << r.at("multiplicity").get<int>() << ","
                      << csv_num(r.at("residual")) << "\n";
            });
    } else if (*sens) {
        json req{{"qp", e_qp.get()}, {"s0", e_s0}, {"span", e_span}, {"steps", e_steps}, {"iterations", e_iter}};
        emit_csv(
            api::sensitivity(req, limits),
            [](const json& p) {
                const auto& taus = p.at("taus");
                const std::size_t stride = std::max<std::size_t>(1, taus.size() / 10);
                for (std::size_t i = 0; i < taus.size(); i += stride) {
                    std::cout << "tau " << num(taus[i].get<double>()) << ":";
                    for (const auto& b : p.at("branches")[i])
                        std::cout << "  " << num(b.at("re").get<double>()) << (b.at("im").get<double>() < 0 ? "" : "+")
                                  << num(b.at("im").get<double>()) << "i" << (b.at("converged").get<bool>() ? "" : "*");
                    std::cout << "\n";
                }
            },
            [](const json& p, std::ostream& f) {
                f << "tau,branch_index,re,im,converged\n";
                const auto& taus = p.at("taus");
                for (std::size_t i = 0; i < taus.size(); ++i) {
                    const auto& row = p.at("branches")[i];
                    for (std::size_t j = 0; j < row.size(); ++j)
                        f << csv_num(taus[i]) << "," << j << "," << csv_num(row[j].at("re")) << ","
                          << csv_num(row[j].at("im")) << "," << (row[j].at("converged").get<bool>() ? 1 : 0) << "\n";
                }
            });
    } else if (*sim) {
        const json qp = m_qp.get();
        json history;
        const auto colon = m_history.find(':');
        const std::string kind = m_history.substr(0, colon);
        const std::string data = colon == std::string::npos ? "" : m_history.substr(colon + 1);
        if (kind == "constant")
            history = {{"kind", "constant"}, {"value", data.empty() ? 1.0 : parse_list(data, "history").at(0)}};
        else if (kind == "polynomial")
            history = {{"kind", "polynomial"}, {"coeffs", parse_list(data, "history")}};
        else
            throw Error(Errc::invalid_argument, "history must be constant:V or polynomial:c0,c1,...");
        const double h = std::isnan(m_h) ? qp.value("tau", 1.0) / 20.0 : m_h;
        emit_csv(
            api::simulate({{"qp", qp}, {"history", history}, {"T", m_T}, {"h", h}}, limits),
            [](const json& p) {
                std::cout << "steps " << p.at("t").size() - 1 << ", y(T) = " << num(p.at("y").back().get<double>()) << "\n";
                if (p.at("decay_estimate").is_number())
                    std::cout << "decay rate estimate " << num(p.at("decay_estimate").get<double>()) << "\n";
            },
            [](const json& p, std::ostream& f) {
                f << "t,y\n";
                for (std::size_t i = 0; i < p.at("t").size(); ++i) f << csv_num(p.at("t")[i]) << "," << csv_num(p.at("y")[i]) << "\n";
            });
    } else if (*fact) {
        emit(api::factorization({{"qp", f_qp.get()}, {"s0", f_s0}}, limits),
             [](const json& p) { std::cout << p.at("form").at("text").get<std::string>() << "\n"; });
    } else if (*rep) {
        json req;
        if (!p_request.empty()) {
            req = parse_json_arg(p_request);
        } else {
            json design{{"branch", "rightmost"}};
            p_sys.fill(design);
            if (!std::isnan(p_tau)) design["tau"] = p_tau;
            if (!std::isnan(p_s0)) design["s0"] = p_s0;
            const json control = api::control_mid(design, limits);
            const json& sol = control.at("solutions").at(0);
            const double s0 = sol.at("s0").get<double>(), tau = sol.at("tau").get<double>();
            const json qp = sol.at("qp");
            json payloads{{"ControlMID", control}};
            json selection = json::array();
            for (const auto& name : [&] {
                     std::vector<std::string> v;
                     std::stringstream ss(p_sections);
                     for (std::string s; std::getline(ss, s, ',');) v.push_back(s);
                     return v;
                 }()) {
                const ReportMode mode = parse_report_mode(name);
                selection.push_back(name);
                const double r = 1.0 + std::abs(s0);
                switch (mode) {
                    case ReportMode::Admissibility: {
                        json a_req{{"s0_min", std::min(2.0 * s0, -1.0)}, {"tau_max", 2.0 * tau}, {"ns0", 120}, {"ntau", 120}};
                        p_sys.fill(a_req);
                        payloads["Admissibility"] = api::admissibility(a_req, limits);
                        break;
                    }
                    case ReportMode::Spectrum:
                        payloads["Spectrum"] = api::spectrum(
                            {{"qp", qp}, {"window", {{"x_min", s0 - 3.0 * r}, {"x_max", 1.0}, {"y_max", 10.0 * r}}}}, limits);
                        break;
                    case ReportMode::Sensitivity:
                        payloads["Sensitivity"] =
                            api::sensitivity({{"qp", qp}, {"s0", s0}, {"span", 0.2}, {"steps", 41}, {"iterations", 20}}, limits);
                        break;
                    case ReportMode::Simulation: {
                        const double T = std::clamp(15.0 / std::max(std::abs(s0), 1e-3), 5.0, 60.0);
                        payloads["Simulation"] = api::simulate(
                            {{"qp", qp}, {"history", {{"kind", "constant"}, {"value", 0.1}}}, {"T", T}, {"h", std::min(tau / 20.0, T / 2000.0)}},
                            limits);
                        break;
                    }
                    default:
                        break;
                }
            }
            req = {{"selection", selection}, {"payloads", payloads}, {"format", p_format}};
            if (design.contains("example")) req["example"] = design["example"];
            if (!p_title.empty()) req["title"] = p_title;
            if (!p_timestamp.empty()) req["timestamp"] = p_timestamp;
        }
        if (!req.contains("format")) req["format"] = p_format;
        const Response r = api::report(req);
        if (out.out.empty())
            std::cout << r.body << (r.body.ends_with('\n') ? "" : "\n");
        else
            write_text(out.out, r.body);
    } else if (*srv) {
        serve(v_addr.empty() ? BindAddress::from_environment() : BindAddress::parse(v_addr), limits);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const Error& e) {
        std::cerr << "error [" << errc_name(e.code()) << "]: " << e.what() << "\n";
        return e.kind() == ErrorKind::numeric ? 3 : 2;
    } catch (const json::exception& e) {
        std::cerr << "error [malformed_request]: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

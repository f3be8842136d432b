// Writes one response body per endpoint case as <schema>__<case>.json.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "delaylab/delaylab.hpp"

using namespace delaylab;

namespace {

int failures = 0;

void save(const std::filesystem::path& dir, const std::string& name, const Response& r, int want_status) {
    if (r.status != want_status) {
        std::cerr << name << ": status " << r.status << " (want " << want_status << "): " << r.body << "\n";
        ++failures;
    }
    std::ofstream(dir / (name + ".json")) << r.body;
}

Response post(const std::string& path, const json& body) { return handle("POST", path, body.dump(), Limits{}); }

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: dump_samples DIR\n";
        return 2;
    }
    const std::filesystem::path dir = argv[1];
    std::filesystem::create_directories(dir);
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.path().extension() == ".json") std::filesystem::remove(e.path());

    const json osc_qp{{"n", 2}, {"m", 1}, {"a", {1.0, 0.0}}, {"b", {-2.0 / M_E, 0.0}}, {"tau", 1.0}};
    const json window{{"x_min", -8}, {"x_max", 1}, {"y_max", 20}};

    save(dir, "health__ok", handle("GET", "/api/v1/health", "", Limits{}), 200);
    save(dir, "examples__catalog", handle("GET", "/api/v1/examples", "", Limits{}), 200);
    save(dir, "placement__generic", post("/api/v1/placement/generic-mid", {{"n", 2}, {"m", 1}, {"tau", 1}, {"s0", 0}}), 200);
    save(dir, "placement__crrid", post("/api/v1/placement/crrid", {{"n", 1}, {"m", 0}, {"tau", 1}, {"roots", {-1, -2}}}), 200);
    save(dir, "control_mid__oscillator", post("/api/v1/placement/control-mid", {{"a", {1, 0}}, {"m", 1}, {"tau", 1}, {"branch", "all"}}), 200);
    const Response pend = post("/api/v1/placement/control-mid", {{"example", {{"id", "pendulum"}}}, {"s0", -5}});
    save(dir, "control_mid__pendulum", pend, 200);
    save(dir, "control_mid__windtunnel", post("/api/v1/placement/control-mid", {{"example", {{"id", "windtunnel"}}}, {"tau", 0.414}}), 200);
    const Response adm = post("/api/v1/admissibility", {{"a", {1, 0}}, {"m", 1}, {"s0_min", -4}, {"tau_max", 2}, {"ns0", 40}, {"ntau", 40}});
    save(dir, "admissibility__oscillator", adm, 200);
    const Response spec = post("/api/v1/spectrum", {{"qp", osc_qp}, {"window", window}});
    save(dir, "spectrum__oscillator", spec, 200);
    save(dir, "spectrum__empty", post("/api/v1/spectrum", {{"qp", osc_qp}, {"window", {{"x_min", 0}, {"x_max", 5}, {"y_max", 10}}}}), 200);
    const Response sens = post("/api/v1/sensitivity", {{"qp", osc_qp}, {"s0", -1}, {"span", 0.2}, {"steps", 11}, {"iterations", 20}});
    save(dir, "sensitivity__oscillator", sens, 200);
    const Response sim = post("/api/v1/simulate", {{"qp", osc_qp}, {"history", {{"kind", "constant"}, {"value", 0.1}}}, {"T", 10}, {"h", 0.05}});
    save(dir, "simulation__oscillator", sim, 200);
    save(dir, "simulation__polynomial", post("/api/v1/simulate", {{"qp", osc_qp}, {"history", {{"kind", "polynomial"}, {"coeffs", {0.1, 0.2}}}}, {"T", 5}, {"h", 0.05}}), 200);
    const json gq = json::parse(post("/api/v1/placement/generic-mid", {{"n", 1}, {"m", 0}, {"tau", 1}, {"s0", 0}}).body)["qp"];
    const Response fact = post("/api/v1/factorization", {{"qp", gq}, {"s0", 0}});
    save(dir, "factorization__hyper", fact, 200);
    const json gq2 = json::parse(post("/api/v1/placement/generic-mid", {{"n", 2}, {"m", 1}, {"tau", 1}, {"s0", -1}}).body)["qp"];
    save(dir, "factorization__generic", post("/api/v1/factorization", {{"qp", gq2}, {"s0", -1}}), 200);

    const json payloads{{"ControlMID", json::parse(pend.body)},   {"Admissibility", json::parse(adm.body)},
                        {"Spectrum", json::parse(spec.body)},     {"Sensitivity", json::parse(sens.body)},
                        {"Simulation", json::parse(sim.body)},    {"Factorization", json::parse(fact.body)}};
    json sel = json::array();
    for (const auto& [k, v] : payloads.items()) sel.push_back(k);
    save(dir, "report__full",
         post("/api/v1/report", {{"selection", sel}, {"payloads", payloads}, {"example", {{"id", "pendulum"}}}, {"timestamp", "2026-01-01T00:00:00Z"}}),
         200);
    save(dir, "report__empty", post("/api/v1/report", {{"selection", json::array()}}), 200);

    save(dir, "error__malformed", handle("POST", "/api/v1/spectrum", "{", Limits{}), 400);
    save(dir, "error__not_found", handle("GET", "/api/v1/none", "", Limits{}), 404);
    save(dir, "error__method", handle("GET", "/api/v1/spectrum", "", Limits{}), 405);
    save(dir, "error__limit", post("/api/v1/placement/generic-mid", {{"n", 13}, {"m", 0}, {"tau", 1}, {"s0", 0}}), 413);
    save(dir, "error__numeric", post("/api/v1/placement/control-mid", {{"a", {1, 0}}, {"m", 1}, {"tau", 2}}), 422);
    save(dir, "error__validation", post("/api/v1/placement/crrid", {{"n", 1}, {"m", 0}, {"tau", 1}, {"roots", {-1, -1}}}), 400);
    save(dir, "error__selection", post("/api/v1/report", {{"selection", {"Spectrum"}}}), 400);
    return failures == 0 ? 0 : 1;
}

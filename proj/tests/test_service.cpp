#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include "delaylab/delaylab.hpp"
#include "delaylab/server.hpp"

using namespace delaylab;

namespace {

const Limits kOn{};

Limits off() {
    Limits l;
    l.enabled = false;
    return l;
}

Response post(const std::string& path, const json& body, const Limits& lim = kOn) {
    return handle("POST", path, body.dump(), lim);
}

json designed_oscillator_qp() { return {{"n", 2}, {"m", 1}, {"a", {1.0, 0.0}}, {"b", {-2.0 / M_E, 0.0}}, {"tau", 1.0}}; }

std::string code_of(const Response& r) { return json::parse(r.body).at("code").get<std::string>(); }

}  // namespace

TEST(Service, Health) {
    const Response r = handle("GET", "/api/v1/health", "", kOn);
    EXPECT_EQ(r.status, 200);
    EXPECT_EQ(json::parse(r.body), (json{{"status", "ok"}, {"version", kVersion}}));
}

TEST(Service, ExamplesCatalog) {
    const json j = json::parse(handle("GET", "/api/v1/examples", "", kOn).body);
    ASSERT_EQ(j.at("examples").size(), 3u);
    EXPECT_EQ(j["examples"][1]["id"], "pendulum");
    EXPECT_EQ(j["examples"][1]["parameters"][2]["name"], "gravity");
    EXPECT_DOUBLE_EQ(j["examples"][1]["parameters"][2]["default"].get<double>(), 9.81);
}

TEST(Service, ControlMidOscillator) {
    const Response r = post("/api/v1/placement/control-mid", {{"a", {1, 0}}, {"m", 1}, {"tau", 1}, {"branch", "rightmost"}});
    ASSERT_EQ(r.status, 200) << r.body;
    const json s = json::parse(r.body).at("solutions").at(0);
    EXPECT_NEAR(s["s0"].get<double>(), -1.0, 1e-4);
    EXPECT_NEAR(s["b"][0].get<double>(), -0.73576, 1e-4);
    EXPECT_NEAR(s["b"][1].get<double>(), 0.0, 1e-4);
    EXPECT_EQ(json::parse(r.body)["solutions"].size(), 1u);
}

TEST(Service, ControlMidAllBranchesAndExample) {
    const json all = json::parse(
        post("/api/v1/placement/control-mid", {{"a", {1, 0}}, {"m", 1}, {"tau", 1}, {"branch", "all"}}).body);
    EXPECT_EQ(all["solutions"].size(), 2u);
    const Response r = post("/api/v1/placement/control-mid", {{"example", {{"id", "pendulum"}}}, {"s0", -5}});
    ASSERT_EQ(r.status, 200) << r.body;
    const json s = json::parse(r.body)["solutions"][0];
    EXPECT_NEAR(s["gains"][0]["value"].get<double>(), 192.16, 1.0);
    EXPECT_EQ(s["gains"][0]["name"], "K_p");
}

TEST(Service, SpectrumOfEmptyWindow) {
    const Response r =
        post("/api/v1/spectrum", {{"qp", designed_oscillator_qp()}, {"window", {{"x_min", 0}, {"x_max", 5}, {"y_max", 10}}}});
    ASSERT_EQ(r.status, 200) << r.body;
    const json j = json::parse(r.body);
    EXPECT_TRUE(j["roots"].empty());
    EXPECT_EQ(j["certified_count"], 0);
    EXPECT_TRUE(j["abscissa"].is_null());
}

TEST(Service, GenericMidAndCrrid) {
    const json g = json::parse(post("/api/v1/placement/generic-mid", {{"n", 2}, {"m", 1}, {"tau", 1}, {"s0", 0}}).body);
    EXPECT_NEAR(g["qp"]["a"][0].get<double>(), 6.0, 1e-10);
    EXPECT_EQ(g["residuals"].size(), 4u);
    const json c = json::parse(post("/api/v1/placement/crrid", {{"n", 1}, {"m", 0}, {"tau", 1}, {"roots", {-1, -2}}}).body);
    EXPECT_NEAR(c["qp"]["a"][0].get<double>(), 0.418023, 1e-6);
    EXPECT_NEAR(c["qp"]["b"][0].get<double>(), 0.214097, 1e-6);
}

TEST(Service, OtherEndpoints) {
    EXPECT_EQ(post("/api/v1/admissibility", {{"a", {1, 0}}, {"m", 1}, {"s0_min", -4}, {"tau_max", 2}, {"ns0", 20}, {"ntau", 20}}).status, 200);
    EXPECT_EQ(post("/api/v1/sensitivity", {{"qp", designed_oscillator_qp()}, {"s0", -1}, {"span", 0.2}, {"steps", 11}, {"iterations", 20}}).status, 200);
    const Response sim = post("/api/v1/simulate", {{"qp", designed_oscillator_qp()}, {"history", {{"kind", "constant"}, {"value", 0.1}}}, {"T", 30}, {"h", 0.05}});
    ASSERT_EQ(sim.status, 200);
    EXPECT_NEAR(json::parse(sim.body)["decay_estimate"].get<double>(), -1.0, 0.1);
    const json gq = json::parse(post("/api/v1/placement/generic-mid", {{"n", 1}, {"m", 0}, {"tau", 1}, {"s0", 0}}).body)["qp"];
    const Response f = post("/api/v1/factorization", {{"qp", gq}, {"s0", 0}});
    ASSERT_EQ(f.status, 200) << f.body;
    EXPECT_EQ(json::parse(f.body)["form"]["hyper"]["b"], 3.0);
}

TEST(Service, ReportFormats) {
    const json ctl = json::parse(post("/api/v1/placement/control-mid", {{"example", {{"id", "pendulum"}}}, {"s0", -5}}).body);
    const json req{{"selection", {"ControlMID"}}, {"payloads", {{"ControlMID", ctl}}}, {"example", {{"id", "pendulum"}}},
                   {"timestamp", "T"}, {"format", "html"}};
    const Response html = post("/api/v1/report", req);
    ASSERT_EQ(html.status, 200) << html.body;
    EXPECT_EQ(html.content_type, "text/html; charset=utf-8");
    EXPECT_NE(html.body.find("192.16"), std::string::npos);
    json jreq = req;
    jreq["format"] = "json";
    const Response js = post("/api/v1/report", jreq);
    EXPECT_EQ(js.content_type, "application/json");
    EXPECT_EQ(json::parse(js.body)["metadata"]["timestamp"], "T");
    jreq["selection"] = {"Spectrum"};
    const Response missing = post("/api/v1/report", jreq);
    EXPECT_EQ(missing.status, 400);
    EXPECT_EQ(code_of(missing), "selection_without_result");
}

TEST(Service, ValidationErrors) {
    const Response bad = handle("POST", "/api/v1/spectrum", "{not json", kOn);
    EXPECT_EQ(bad.status, 400);
    EXPECT_EQ(code_of(bad), "malformed_request");
    const Response missing = post("/api/v1/placement/generic-mid", {{"n", 2}});
    EXPECT_EQ(missing.status, 400);
    EXPECT_EQ(code_of(missing), "malformed_request");
    const Response wrong_type = post("/api/v1/placement/generic-mid", {{"n", "two"}, {"m", 1}, {"tau", 1}, {"s0", 0}});
    EXPECT_EQ(wrong_type.status, 400);
    const Response repeated = post("/api/v1/placement/crrid", {{"n", 1}, {"m", 0}, {"tau", 1}, {"roots", {-1, -1}}});
    EXPECT_EQ(repeated.status, 400);
    EXPECT_EQ(code_of(repeated), "roots_must_be_distinct");
    EXPECT_EQ(handle("POST", "/api/v1/health", "", kOn).status, 404);
    EXPECT_EQ(handle("GET", "/api/v1/spectrum", "", kOn).status, 405);
    EXPECT_EQ(handle("GET", "/nowhere", "", kOn).status, 404);
    EXPECT_EQ(handle("POST", "/api/v1/spectrum", "[1,2]", kOn).status, 400);
}

TEST(Service, NumericErrors) {
    const Response none = post("/api/v1/placement/control-mid", {{"a", {1, 0}}, {"m", 1}, {"tau", 2}});
    EXPECT_EQ(none.status, 422);
    EXPECT_EQ(code_of(none), "no_admissible_solution");
    const Response fact = post("/api/v1/factorization", {{"qp", designed_oscillator_qp()}, {"s0", -1}});
    EXPECT_EQ(fact.status, 422);
    EXPECT_EQ(code_of(fact), "multiplicity_condition_violated");
}

TEST(Service, CapsReturn413) {
    const json big_grid{{"a", {1, 0}}, {"m", 1}, {"s0_min", -4}, {"tau_max", 2}, {"ns0", 2001}, {"ntau", 2}};
    EXPECT_EQ(post("/api/v1/admissibility", big_grid).status, 413);
    EXPECT_EQ(code_of(post("/api/v1/admissibility", big_grid)), "limit_exceeded");
    EXPECT_EQ(post("/api/v1/admissibility", big_grid, off()).status, 200);

    EXPECT_EQ(post("/api/v1/placement/generic-mid", {{"n", 13}, {"m", 0}, {"tau", 1}, {"s0", 0}}).status, 413);
    EXPECT_EQ(post("/api/v1/sensitivity", {{"qp", designed_oscillator_qp()}, {"s0", -1}, {"span", 0.2}, {"steps", 10001}, {"iterations", 1}}).status, 413);
    EXPECT_EQ(post("/api/v1/simulate", {{"qp", designed_oscillator_qp()}, {"history", {{"kind", "constant"}, {"value", 1}}}, {"T", 2e5}, {"h", 0.01}}).status, 413);
    const json spec{{"qp", designed_oscillator_qp()}, {"window", {{"x_min", -1}, {"x_max", 1}, {"y_max", 1}}}, {"grid", {{"nx", 2001}, {"ny", 10}}}};
    EXPECT_EQ(post("/api/v1/spectrum", spec).status, 413);
}

TEST(Service, StatelessAcrossInterleaving) {
    const json a{{"a", {1, 0}}, {"m", 1}, {"tau", 1}};
    const json b{{"n", 2}, {"m", 1}, {"tau", 1}, {"s0", 0}};
    const std::string a1 = post("/api/v1/placement/control-mid", a).body;
    const std::string b1 = post("/api/v1/placement/generic-mid", b).body;
    (void)post("/api/v1/placement/control-mid", {{"a", {-5.886, 0}}, {"m", 1}, {"s0", -5}});
    EXPECT_EQ(post("/api/v1/placement/generic-mid", b).body, b1);
    EXPECT_EQ(post("/api/v1/placement/control-mid", a).body, a1);
}

TEST(Service, LimitsFromEnvironment) {
    ::setenv("DELAYLAB_LIMITS", "off", 1);
    EXPECT_FALSE(Limits::from_environment().enabled);
    ::setenv("DELAYLAB_LIMITS", "on", 1);
    EXPECT_TRUE(Limits::from_environment().enabled);
    ::unsetenv("DELAYLAB_LIMITS");
}

TEST(Server, BindAddressParsing) {
    EXPECT_EQ(BindAddress::parse("0.0.0.0:9000").host, "0.0.0.0");
    EXPECT_EQ(BindAddress::parse("0.0.0.0:9000").port, 9000);
    EXPECT_EQ(BindAddress::parse(":7000").host, "127.0.0.1");
    EXPECT_EQ(BindAddress::parse("7001").port, 7001);
    EXPECT_THROW((void)BindAddress::parse("host:port"), Error);
    EXPECT_THROW((void)BindAddress::parse("70000"), Error);
}

TEST(Server, ConcurrentIdenticalRequestsOverHttp) {
    httplib::Server srv;
    configure_server(srv, kOn);
    const int port = srv.bind_to_any_port("127.0.0.1");
    ASSERT_GT(port, 0);
    std::thread loop([&] { srv.listen_after_bind(); });
    srv.wait_until_ready();

    const std::string body =
        json{{"qp", designed_oscillator_qp()}, {"window", {{"x_min", -8}, {"x_max", 1}, {"y_max", 20}}}}.dump();
    constexpr int kClients = 16;
    std::vector<std::string> bodies(kClients);
    std::vector<int> status(kClients, 0);
    std::vector<std::thread> clients;
    for (int k = 0; k < kClients; ++k)
        clients.emplace_back([&, k] {
            httplib::Client cli("127.0.0.1", port);
            cli.set_read_timeout(60);
            if (auto res = cli.Post("/api/v1/spectrum", body, "application/json")) {
                status[k] = res->status;
                bodies[k] = res->body;
            }
        });
    for (auto& t : clients) t.join();

    httplib::Client cli("127.0.0.1", port);
    auto big = cli.Post("/api/v1/admissibility",
                        json{{"a", {1, 0}}, {"m", 1}, {"s0_min", -4}, {"tau_max", 2}, {"ns0", 3000}, {"ntau", 3000}}.dump(),
                        "application/json");
    auto health = cli.Get("/api/v1/health");
    auto options = cli.Options("/api/v1/spectrum");
    srv.stop();
    loop.join();

    for (int k = 0; k < kClients; ++k) {
        EXPECT_EQ(status[k], 200);
        EXPECT_EQ(bodies[k], bodies[0]);
    }
    EXPECT_EQ(bodies[0], post("/api/v1/spectrum", json::parse(body)).body);
    ASSERT_TRUE(big);
    EXPECT_EQ(big->status, 413);
    ASSERT_TRUE(health);
    EXPECT_EQ(health->get_header_value("Access-Control-Allow-Origin"), "*");
    ASSERT_TRUE(options);
    EXPECT_EQ(options->status, 204);
}

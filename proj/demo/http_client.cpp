// Starts the service in-process and calls it over HTTP.

#include <iostream>
#include <thread>

#include "delaylab/delaylab.hpp"
#include "delaylab/server.hpp"

using namespace delaylab;

int main() {
    httplib::Server srv;
    configure_server(srv, Limits{});
    const int port = srv.bind_to_any_port("127.0.0.1");
    std::thread loop([&] { srv.listen_after_bind(); });
    srv.wait_until_ready();

    httplib::Client cli("127.0.0.1", port);
    if (auto res = cli.Get("/api/v1/health")) std::cout << "health: " << res->body << "\n";

    const json req{{"example", {{"id", "pendulum"}}}, {"s0", -5.0}};
    if (auto res = cli.Post("/api/v1/placement/control-mid", req.dump(), "application/json")) {
        const json sol = json::parse(res->body)["solutions"][0];
        std::cout << "tau = " << sol["tau"] << "\n";
        for (const auto& g : sol["gains"]) std::cout << g["name"].get<std::string>() << " = " << g["value"] << "\n";
    }

    const json big{{"n", 20}, {"m", 0}, {"tau", 1.0}, {"s0", 0.0}};
    if (auto res = cli.Post("/api/v1/placement/generic-mid", big.dump(), "application/json"))
        std::cout << "oversized request: HTTP " << res->status << " " << res->body << "\n";

    srv.stop();
    loop.join();
}

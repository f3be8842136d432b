#pragma once

// HTTP front end for the JSON API (cpp-httplib, thread pool per connection).

#include <cstdlib>
#include <iostream>
#include <string>

#include <httplib.h>

#include "delaylab/service.hpp"

namespace delaylab {

struct BindAddress {
    std::string host{"127.0.0.1"};
    int port{8080};

    /// "host:port", ":port" or "port".
    static BindAddress parse(const std::string& s) {
        BindAddress b;
        const auto colon = s.rfind(':');
        std::string port = s;
        if (colon != std::string::npos) {
            if (colon > 0) b.host = s.substr(0, colon);
            port = s.substr(colon + 1);
        }
        try {
            std::size_t used = 0;
            b.port = std::stoi(port, &used);
            if (used != port.size() || b.port < 0 || b.port > 65535) throw std::out_of_range("port");
        } catch (const std::exception&) {
            throw Error(Errc::invalid_argument, "invalid bind address '" + s + "'");
        }
        return b;
    }

    static BindAddress from_environment() {
        if (const char* v = std::getenv("DELAYLAB_ADDR"); v && *v) return parse(v);
        return {};
    }
};

inline void configure_server(httplib::Server& srv, const Limits& limits) {
    srv.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                             {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                             {"Access-Control-Allow-Headers", "Content-Type"}});
    srv.set_payload_max_length(64u << 20);
    auto route = [limits](const httplib::Request& req, httplib::Response& res) {
        const Response r = handle(req.method, req.path, req.body, limits);
        res.status = r.status;
        res.set_content(r.body, r.content_type);
    };
    srv.Get(".*", route);
    srv.Post(".*", route);
    srv.Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
}

/// Blocks until the server stops.
inline void serve(const BindAddress& addr, const Limits& limits = Limits::from_environment()) {
    httplib::Server srv;
    configure_server(srv, limits);
    std::cerr << "delaylab service listening on " << addr.host << ":" << addr.port
              << (limits.enabled ? "" : " (limits off)") << "\n";
    if (!srv.listen(addr.host, addr.port))
        throw Error(Errc::invalid_argument, "cannot bind " + addr.host + ":" + std::to_string(addr.port));
}

}  // namespace delaylab

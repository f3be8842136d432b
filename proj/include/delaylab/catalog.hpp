#pragma once

// Worked examples: physical parameters, the coefficients a of the open-loop
// part they induce, and the maps between the placed b and physical gains.

#include <cmath>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "delaylab/placement.hpp"

namespace delaylab {

enum class ExampleId { oscillator, pendulum, windtunnel };

inline std::string_view example_name(ExampleId id) {
    switch (id) {
        case ExampleId::oscillator: return "oscillator";
        case ExampleId::pendulum: return "pendulum";
        case ExampleId::windtunnel: return "windtunnel";
    }
    return "";
}

inline ExampleId parse_example_id(std::string_view s) {
    if (s == "oscillator") return ExampleId::oscillator;
    if (s == "pendulum") return ExampleId::pendulum;
    if (s == "windtunnel") return ExampleId::windtunnel;
    throw Error(Errc::invalid_argument, "unknown example '" + std::string(s) + "'");
}

struct ParameterInfo {
    std::string name;
    double default_value{0.0};
    std::string unit;
    std::string description;
};

inline std::vector<ParameterInfo> example_parameters(ExampleId id) {
    switch (id) {
        case ExampleId::oscillator:
            return {};
        case ExampleId::pendulum:
            return {{"mass", 10.0, "kg", "pendulum mass"},
                    {"length", 10.0, "m", "pendulum length"},
                    {"gravity", 9.81, "m/s^2", "gravitational acceleration"}};
        case ExampleId::windtunnel:
            return {{"kappa", 1.964, "s", "Mach number time constant"},
                    {"k", -0.67036, "1/rad", "guide vane gain"},
                    {"tau0", 0.33, "s", "transport delay"},
                    {"zeta", 0.4368, "", "guide vane damping ratio"},
                    {"omega", 3.292, "rad/s", "guide vane natural frequency"}};
    }
    return {};
}

struct ExampleSystem {
    ExampleId id{ExampleId::oscillator};
    std::map<std::string, double> params;

    static ExampleSystem make(ExampleId id) {
        ExampleSystem ex{id, {}};
        for (const auto& p : example_parameters(id)) ex.params[p.name] = p.default_value;
        return ex;
    }

    [[nodiscard]] double param(const std::string& name) const {
        auto it = params.find(name);
        if (it == params.end()) throw Error(Errc::invalid_argument, "missing parameter '" + name + "'");
        return it->second;
    }

    /// Pendulum moment of inertia m l^2 / 12.
    [[nodiscard]] double inertia() const { return param("mass") * param("length") * param("length") / 12.0; }

    void validate() const {
        for (const auto& [k, v] : params) {
            if (!std::isfinite(v)) throw Error(Errc::non_finite_argument, "non-finite parameter '" + k + "'");
            bool known = false;
            for (const auto& p : example_parameters(id)) known = known || p.name == k;
            if (!known) throw Error(Errc::invalid_argument, "unknown parameter '" + k + "'");
        }
        auto positive = [&](const char* name) {
            if (!(param(name) > 0.0)) throw Error(Errc::invalid_argument, std::string(name) + " must be positive");
        };
        switch (id) {
            case ExampleId::oscillator:
                break;
            case ExampleId::pendulum:
                positive("mass");
                positive("length");
                positive("gravity");
                break;
            case ExampleId::windtunnel:
                positive("kappa");
                positive("omega");
                if (param("k") == 0.0) throw Error(Errc::invalid_argument, "k must be nonzero");
                if (param("tau0") < 0.0) throw Error(Errc::invalid_argument, "tau0 must be non-negative");
                if (param("zeta") < 0.0) throw Error(Errc::invalid_argument, "zeta must be non-negative");
                break;
        }
    }
};

struct ExampleProblem {
    std::vector<double> a;
    int m{0};
};

inline ExampleProblem example_to_problem(const ExampleSystem& ex) {
    ex.validate();
    switch (ex.id) {
        case ExampleId::oscillator:
            return {{1.0, 0.0}, 1};
        case ExampleId::pendulum: {
            const double a0 = -ex.param("mass") * ex.param("gravity") * ex.param("length") / (2.0 * ex.inertia());
            return {{a0, 0.0}, 1};
        }
        case ExampleId::windtunnel: {
            const double kappa = ex.param("kappa"), zeta = ex.param("zeta"), omega = ex.param("omega");
            return {{omega * omega / kappa, omega * omega + 2.0 * zeta * omega / kappa, 2.0 * zeta * omega + 1.0 / kappa},
                    2};
        }
    }
    return {};
}

struct GainEntry {
    std::string name;
    double value{0.0};
    std::string unit;

    friend bool operator==(const GainEntry&, const GainEntry&) = default;
};

/// Physical gains for placed coefficients b at delay tau.
inline std::vector<GainEntry> recover_gains(const ExampleSystem& ex, std::span<const double> b, double tau) {
    ex.validate();
    const ExampleProblem pr = example_to_problem(ex);
    if (b.size() != static_cast<std::size_t>(pr.m + 1))
        throw Error(Errc::invalid_argument, "b does not match the example's delayed order");
    switch (ex.id) {
        case ExampleId::oscillator:
            return {{"beta", b[0], ""}, {"alpha", b[1], ""}};
        case ExampleId::pendulum: {
            const double f = 2.0 * ex.inertia() / ex.param("length");
            return {{"K_p", b[0] * f, "N/rad"}, {"K_d", b[1] * f, "N s/rad"}};
        }
        case ExampleId::windtunnel: {
            const double kappa = ex.param("kappa"), k = ex.param("k"), tau0 = ex.param("tau0");
            if (tau < tau0) throw Error(Errc::delay_below_physical_minimum, "delay below physical minimum tau0");
            const double alpha1 = b[2];
            const double alpha0 = b[1] - b[2] / kappa;
            const double beta = (b[0] * kappa - alpha0) / k;
            return {{"alpha1", alpha1, ""}, {"alpha0", alpha0, ""}, {"beta", beta, ""}, {"tau1", tau - tau0, "s"}};
        }
    }
    return {};
}

inline std::vector<GainEntry> recover_gains(const ExampleSystem& ex, const PlacementResult& placement) {
    return recover_gains(ex, placement.qp.b, placement.qp.tau);
}

/// Inverse of recover_gains: b from the physical gains.
inline std::vector<double> gains_to_coefficients(const ExampleSystem& ex, const std::vector<GainEntry>& gains) {
    ex.validate();
    auto get = [&](const std::string& name) {
        for (const auto& g : gains)
            if (g.name == name) return g.value;
        throw Error(Errc::invalid_argument, "missing gain '" + name + "'");
    };
    switch (ex.id) {
        case ExampleId::oscillator:
            return {get("beta"), get("alpha")};
        case ExampleId::pendulum: {
            const double f = ex.param("length") / (2.0 * ex.inertia());
            return {get("K_p") * f, get("K_d") * f};
        }
        case ExampleId::windtunnel: {
            const double kappa = ex.param("kappa"), k = ex.param("k");
            const double alpha1 = get("alpha1"), alpha0 = get("alpha0"), beta = get("beta");
            return {(alpha0 + beta * k) / kappa, alpha0 + alpha1 / kappa, alpha1};
        }
    }
    return {};
}

}  // namespace delaylab

// Delayed PD stabilization of the inverted pendulum with a prescribed decay rate.

#include <cstdio>

#include "delaylab/delaylab.hpp"

using namespace delaylab;

int main() {
    const ExampleSystem ex = ExampleSystem::make(ExampleId::pendulum);
    const ExampleProblem p = example_to_problem(ex);
    for (double s0 : {-3.0, -5.0, -7.0}) {
        const auto designs = control_mid_designs(p.a, p.m, std::nullopt, s0, BranchPolicy::preferred);
        if (designs.empty()) {
            std::printf("s0 = %.1f: not admissible\n", s0);
            continue;
        }
        const PlacementResult& r = designs[0];
        std::printf("s0 = %.1f: tau = %.4f, b = [%.4f, %.4f]", s0, r.qp.tau, r.qp.b[0], r.qp.b[1]);
        for (const auto& g : recover_gains(ex, r)) std::printf(", %s = %.2f %s", g.name.c_str(), g.value, g.unit.c_str());
        std::printf("\n");
    }
}

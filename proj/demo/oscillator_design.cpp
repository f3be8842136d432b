// Delayed-feedback design for the harmonic oscillator y'' + y = u(t - tau).

#include <cstdio>

#include "delaylab/delaylab.hpp"

using namespace delaylab;

int main() {
    const std::vector<double> a{1.0, 0.0};
    const PlacementResult r = control_mid_designs(a, 1, 1.0, std::nullopt, BranchPolicy::preferred).at(0);
    std::printf("s0 = %.6f with multiplicity %d\n", r.targets[0].s0, r.targets[0].multiplicity);
    std::printf("b0 = %.6f, b1 = %.6f\n", r.qp.b[0], r.qp.b[1]);

    const DominanceCertificate cert = check_dominance(r.qp, r.targets[0].s0, 1e-3);
    std::printf("dominant: %s\n", cert.dominant ? "yes" : "no");

    const Spectrum sp = compute_spectrum(r.qp, {-8.0, 1.0, 20.0});
    for (const auto& root : sp.roots)
        std::printf("  root %.5f %+.5fi  x%d\n", root.value.real(), root.value.imag(), root.multiplicity);

    std::printf("largest stabilizable delay: %.5f\n", max_stabilizable_tau(a, 1));

    const SimulationResult sim = simulate(r.qp, HistorySpec::constant(0.1), 30.0, 0.05);
    std::printf("decay rate from simulation: %.4f\n", estimate_decay_rate(sim, 10.0, 25.0));
}

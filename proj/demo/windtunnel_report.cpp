// Mach-number regulation in a wind tunnel: design at a fixed decay rate and
// write an HTML report.

#include <fstream>
#include <iostream>

#include "delaylab/delaylab.hpp"

using namespace delaylab;

int main(int argc, char** argv) {
    const std::string out = argc > 1 ? argv[1] : "windtunnel_report.html";
    const ExampleSystem ex = ExampleSystem::make(ExampleId::windtunnel);
    const ExampleProblem p = example_to_problem(ex);
    const double s0 = -2.94675;

    ReportInputs in;
    in.example = ex;
    const auto designs = control_mid_designs(p.a, p.m, std::nullopt, s0, BranchPolicy::all);
    for (const auto& d : designs)
        if (!in.control_mid || std::abs(d.qp.tau - 0.414) < std::abs(in.control_mid->qp.tau - 0.414)) in.control_mid = d;
    const Quasipolynomial& qp = in.control_mid->qp;
    in.spectrum = compute_spectrum(qp, {-12.0, 1.0, 60.0});
    in.simulation = simulate(qp, HistorySpec::constant(0.1), 8.0, qp.tau / 20.0);
    in.admissibility = compute_grid(p.a, p.m, -6.0, 1.0, 120, 120);

    const ReportDocument doc = build_report(
        {ReportMode::ControlMID, ReportMode::Admissibility, ReportMode::Spectrum, ReportMode::Simulation}, in);
    std::ofstream(out) << render_html(doc);
    std::cout << "tau = " << qp.tau << ", report written to " << out << "\n";
}

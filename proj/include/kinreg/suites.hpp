#pragma once

#include "kinreg/config.hpp"
#include "kinreg/report.hpp"

namespace kinreg {

// Verdicts and CSV artifacts of one suite. Tables carry no timings, so
// they are byte-identical across runs with the same config.
struct SuiteResult {
    std::vector<Verdict> verdicts;
    std::vector<Table> tables;
    std::vector<Phase> timings;
    nlohmann::ordered_json convergence = nlohmann::ordered_json::object();

    void append(SuiteResult other);
};

SuiteResult verify_collision(const RunConfig& cfg);
SuiteResult verify_geometry(const RunConfig& cfg);
SuiteResult verify_flux_forms(const RunConfig& cfg);

// Throws ConvergenceError when the Picard iteration does not converge.
TransportSolution solve_config(const RunConfig& cfg);

// Convergence data, exact-solution errors for constant T, the decomposition
// identity at random probes, and the wallflux / field / residuals tables.
SuiteResult solve_report(const RunConfig& cfg, const TransportSolution& sol);

// wallflux, velocities, field and residuals.
std::vector<Table> solution_tables(const TransportSolution& sol);

SuiteResult probe_regularity(const RunConfig& cfg, const TransportSolution& sol);

// max |f_a - f_b| / max |f_a| over the nodes of a, with b evaluated by
// interpolation at those nodes.
double field_difference(const TransportSolution& a, const TransportSolution& b);

Table residual_table(const std::vector<double>& history, const std::vector<int>& flux_iterations = {});

}  // namespace kinreg

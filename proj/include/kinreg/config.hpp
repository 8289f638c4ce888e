#pragma once

#include "kinreg/regularity.hpp"

#include <map>
#include <string>

namespace kinreg {

struct DomainConfig {
    std::string name = "sphere";  // sphere | ellipsoid
    double radius = 1.0;
    Vec3 axes = Vec3(1.0, 1.5, 2.0);
    bool operator==(const DomainConfig&) const = default;
};

struct GridConfig {
    int volume_nodes = 600;
    int n_radial = 12;
    int n_angular = 26;
    int mesh_polar = 12;
    int mesh_azimuth = 24;
    double zeta_max = 6.0;
    double grazing_cutoff = 1e-3;
    bool operator==(const GridConfig&) const = default;
};

struct SolverConfig {
    double tol = 1e-6;
    int max_iters = 400;
    double anchor = 0.0;
    double flux_tol = 1e-10;
    int flux_max_iters = 500;
    int n_probes = 100;
    bool operator==(const SolverConfig&) const = default;
};

struct ProbeConfig {
    int ladder_rungs = 8;
    double ladder_start = 0.2;
    double epsilon = 0.05;
    double epsilon_prime = 0.05;
    double exponent_slack = 0.2;
    double h_exponent_slack = 0.15;
    double ratio_slack = 10.0;
    int n_points = 4;
    int n_pairs = 10;
    double pair_min = 1e-3;
    double pair_max = 0.3;
    bool operator==(const ProbeConfig&) const = default;
};

struct RunConfig {
    DomainConfig domain;
    KineticModel model;
    GridConfig grid;
    BoundaryTemperature temperature = BoundaryTemperature::constant(0.05);
    SolverConfig solver;
    ProbeConfig probe;
    std::string out_dir = "out";
    unsigned seed = 1;
    int jobs = 1;

    std::shared_ptr<const ConvexDomain> make_domain() const;
    VelocityGridSpec grid_spec() const;
    PicardOptions picard_options() const;
    RegularityOptions regularity_options() const;
};

bool operator==(const RunConfig& a, const RunConfig& b);

// Sectioned key = value text. '#' and ';' start comments. Unknown sections or
// keys, malformed lines and invalid values raise ConfigError with the line.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& cfg);

// KINREG_<SECTION>_<KEY> overrides, e.g. KINREG_SOLVER_TOL=1e-8.
void apply_env_overrides(RunConfig& cfg, const std::map<std::string, std::string>& env);
std::map<std::string, std::string> process_environment();

// Throws ConfigError; `lines` maps "section.key" to its source line.
void validate_config(const RunConfig& cfg, const std::map<std::string, int>& lines = {});

}  // namespace kinreg

#include "kinreg/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

extern char** environ;

namespace kinreg {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

struct BadValue {
    std::string what;
};

double to_double(const std::string& v) {
    double x = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size()) throw BadValue{"expected a number, got '" + v + "'"};
    return x;
}

long to_long(const std::string& v) {
    long x = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size()) throw BadValue{"expected an integer, got '" + v + "'"};
    return x;
}

int to_int(const std::string& v) {
    const long x = to_long(v);
    if (x < INT32_MIN || x > INT32_MAX) throw BadValue{"integer out of range: " + v};
    return static_cast<int>(x);
}

Vec3 to_vec3(const std::string& v) {
    Vec3 out;
    std::stringstream ss(v);
    std::string part;
    int i = 0;
    while (std::getline(ss, part, ',')) {
        if (i == 3) throw BadValue{"expected three comma-separated numbers, got '" + v + "'"};
        out[i++] = to_double(trim(part));
    }
    if (i != 3) throw BadValue{"expected three comma-separated numbers, got '" + v + "'"};
    return out;
}

std::string fmt(double x) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

std::string fmt(const Vec3& v) { return fmt(v.x()) + ", " + fmt(v.y()) + ", " + fmt(v.z()); }

struct Field {
    std::string section, key;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

#define KR_DOUBLE(sec, name, member)                                                      \
    Field { sec, name, [](RunConfig& c, const std::string& v) { c.member = to_double(v); }, \
            [](const RunConfig& c) { return fmt(c.member); } }
#define KR_INT(sec, name, member)                                                      \
    Field { sec, name, [](RunConfig& c, const std::string& v) { c.member = to_int(v); }, \
            [](const RunConfig& c) { return std::to_string(c.member); } }
#define KR_VEC(sec, name, member)                                                      \
    Field { sec, name, [](RunConfig& c, const std::string& v) { c.member = to_vec3(v); }, \
            [](const RunConfig& c) { return fmt(c.member); } }

const std::vector<Field>& fields() {
    static const std::vector<Field> f = {
        {"domain", "name", [](RunConfig& c, const std::string& v) { c.domain.name = v; },
         [](const RunConfig& c) { return c.domain.name; }},
        KR_DOUBLE("domain", "radius", domain.radius),
        KR_VEC("domain", "axes", domain.axes),

        KR_DOUBLE("model", "gamma", model.gamma),
        KR_DOUBLE("model", "beta0", model.beta0),
        KR_DOUBLE("model", "c1", model.c1),
        KR_DOUBLE("model", "c2", model.c2),
        KR_DOUBLE("model", "nu_scale", model.nu_scale),

        KR_INT("grid", "volume_nodes", grid.volume_nodes),
        KR_INT("grid", "n_radial", grid.n_radial),
        KR_INT("grid", "n_angular", grid.n_angular),
        KR_INT("grid", "mesh_polar", grid.mesh_polar),
        KR_INT("grid", "mesh_azimuth", grid.mesh_azimuth),
        KR_DOUBLE("grid", "zeta_max", grid.zeta_max),
        KR_DOUBLE("grid", "grazing_cutoff", grid.grazing_cutoff),

        {"temperature", "kind",
         [](RunConfig& c, const std::string& v) {
             try {
                 c.temperature.kind = temperature_kind(v);
             } catch (const ArgumentError& e) {
                 throw BadValue{e.what()};
             }
         },
         [](const RunConfig& c) { return to_string(c.temperature.kind); }},
        KR_DOUBLE("temperature", "t0", temperature.t0),
        KR_VEC("temperature", "slope", temperature.slope),
        KR_DOUBLE("temperature", "amplitude", temperature.amplitude),
        KR_VEC("temperature", "center", temperature.center),
        KR_DOUBLE("temperature", "width", temperature.width),

        KR_DOUBLE("solver", "tol", solver.tol),
        KR_INT("solver", "max_iters", solver.max_iters),
        KR_DOUBLE("solver", "anchor", solver.anchor),
        KR_DOUBLE("solver", "flux_tol", solver.flux_tol),
        KR_INT("solver", "flux_max_iters", solver.flux_max_iters),
        KR_INT("solver", "n_probes", solver.n_probes),

        KR_INT("probe", "ladder_rungs", probe.ladder_rungs),
        KR_DOUBLE("probe", "ladder_start", probe.ladder_start),
        KR_DOUBLE("probe", "epsilon", probe.epsilon),
        KR_DOUBLE("probe", "epsilon_prime", probe.epsilon_prime),
        KR_DOUBLE("probe", "exponent_slack", probe.exponent_slack),
        KR_DOUBLE("probe", "h_exponent_slack", probe.h_exponent_slack),
        KR_DOUBLE("probe", "ratio_slack", probe.ratio_slack),
        KR_INT("probe", "n_points", probe.n_points),
        KR_INT("probe", "n_pairs", probe.n_pairs),
        KR_DOUBLE("probe", "pair_min", probe.pair_min),
        KR_DOUBLE("probe", "pair_max", probe.pair_max),

        {"run", "out_dir", [](RunConfig& c, const std::string& v) { c.out_dir = v; },
         [](const RunConfig& c) { return c.out_dir; }},
        {"run", "seed",
         [](RunConfig& c, const std::string& v) {
             const long s = to_long(v);
             if (s < 0 || s > static_cast<long>(UINT32_MAX)) throw BadValue{"seed out of range: " + v};
             c.seed = static_cast<unsigned>(s);
         },
         [](const RunConfig& c) { return std::to_string(c.seed); }},
        KR_INT("run", "jobs", jobs),
    };
    return f;
}

#undef KR_DOUBLE
#undef KR_INT
#undef KR_VEC

const Field* find_field(const std::string& section, const std::string& key) {
    for (const auto& f : fields())
        if (f.section == section && f.key == key) return &f;
    return nullptr;
}

bool known_section(const std::string& s) {
    for (const auto& f : fields())
        if (f.section == s) return true;
    return false;
}

std::string upper(std::string s) {
    for (auto& ch : s) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    return s;
}

}  // namespace

bool operator==(const RunConfig& a, const RunConfig& b) {
    for (const auto& f : fields())
        if (f.get(a) != f.get(b)) return false;
    return true;
}

std::shared_ptr<const ConvexDomain> RunConfig::make_domain() const {
    if (domain.name == "sphere") return std::make_shared<const Sphere>(domain.radius);
    if (domain.name == "ellipsoid") return std::make_shared<const Ellipsoid>(domain.axes.x(), domain.axes.y(), domain.axes.z());
    throw ConfigError(0, "unknown domain '" + domain.name + "'");
}

VelocityGridSpec RunConfig::grid_spec() const {
    VelocityGridSpec s;
    s.n_radial = grid.n_radial;
    s.n_angular = grid.n_angular;
    s.zeta_max = grid.zeta_max;
    s.grazing_cutoff = grid.grazing_cutoff;
    return s;
}

PicardOptions RunConfig::picard_options() const {
    PicardOptions o;
    o.tol = solver.tol;
    o.max_iters = solver.max_iters;
    o.anchor = solver.anchor;
    o.flux.tol = solver.flux_tol;
    o.flux.max_iters = solver.flux_max_iters;
    o.flux.anchor = solver.anchor;
    o.n_probes = solver.n_probes;
    o.seed = seed;
    return o;
}

RegularityOptions RunConfig::regularity_options() const {
    RegularityOptions o;
    o.epsilon = probe.epsilon;
    o.epsilon_prime = probe.epsilon_prime;
    o.exponent_slack = probe.exponent_slack;
    o.h_exponent_slack = probe.h_exponent_slack;
    o.ratio_slack = probe.ratio_slack;
    o.n_points = probe.n_points;
    o.n_pairs = probe.n_pairs;
    o.pair_min = probe.pair_min;
    o.pair_max = probe.pair_max;
    o.seed = seed;
    return o;
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::map<std::string, int> lines;
    std::istringstream in(text);
    std::string raw, section;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto c = raw.find_first_of("#;");
        const std::string line = trim(c == std::string::npos ? raw : raw.substr(0, c));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(lineno, "malformed section header '" + line + "'");
            section = trim(line.substr(1, line.size() - 2));
            if (!known_section(section)) throw ConfigError(lineno, "unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(lineno, "expected 'key = value', got '" + line + "'");
        if (section.empty()) throw ConfigError(lineno, "key outside of any section");
        const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        const Field* f = find_field(section, key);
        if (!f) throw ConfigError(lineno, "unknown key '" + key + "' in [" + section + "]");
        const std::string id = section + "." + key;
        if (lines.count(id)) throw ConfigError(lineno, "duplicate key '" + key + "' (first on line " + std::to_string(lines[id]) + ")");
        try {
            f->set(cfg, value);
        } catch (const BadValue& e) {
            throw ConfigError(lineno, key + ": " + e.what);
        }
        lines[id] = lineno;
    }
    validate_config(cfg, lines);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(0, "cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& cfg) {
    std::string out, section;
    for (const auto& f : fields()) {
        if (f.section != section) {
            if (!section.empty()) out += "\n";
            section = f.section;
            out += "[" + section + "]\n";
        }
        out += f.key + " = " + f.get(cfg) + "\n";
    }
    return out;
}

void apply_env_overrides(RunConfig& cfg, const std::map<std::string, std::string>& env) {
    for (const auto& f : fields()) {
        const std::string name = "KINREG_" + upper(f.section) + "_" + upper(f.key);
        const auto it = env.find(name);
        if (it == env.end()) continue;
        try {
            f.set(cfg, trim(it->second));
        } catch (const BadValue& e) {
            throw ConfigError(0, name + ": " + e.what);
        }
    }
    validate_config(cfg);
}

std::map<std::string, std::string> process_environment() {
    std::map<std::string, std::string> env;
    for (char** e = environ; e && *e; ++e) {
        const std::string kv(*e);
        const auto eq = kv.find('=');
        if (eq != std::string::npos && kv.rfind("KINREG_", 0) == 0) env[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    return env;
}

void validate_config(const RunConfig& c, const std::map<std::string, int>& lines) {
    auto fail = [&](const std::string& id, const std::string& msg) {
        const auto it = lines.find(id);
        throw ConfigError(it == lines.end() ? 0 : it->second, id + ": " + msg);
    };
    if (c.domain.name != "sphere" && c.domain.name != "ellipsoid") fail("domain.name", "must be sphere or ellipsoid");
    if (!(c.domain.radius > 0)) fail("domain.radius", "must be positive");
    if (!(c.domain.axes.minCoeff() > 0)) fail("domain.axes", "must be positive");

    if (c.model.gamma != 1.0) fail("model.gamma", "only gamma = 1 (hard spheres) is supported");
    if (!(c.model.beta0 > 0)) fail("model.beta0", "must be positive");
    if (!(c.model.c1 > 0)) fail("model.c1", "must be positive");
    if (!(c.model.c2 > 0)) fail("model.c2", "must be positive");
    if (!(c.model.nu_scale >= 0)) fail("model.nu_scale", "must be non-negative");

    if (c.grid.volume_nodes < 20) fail("grid.volume_nodes", "must be at least 20");
    if (c.grid.n_radial < 4 || c.grid.n_radial > 64) fail("grid.n_radial", "must be in [4, 64]");
    if (!lebedev_supported(c.grid.n_angular)) fail("grid.n_angular", "must be one of 6, 14, 26, 50");
    if (c.grid.mesh_polar < 2) fail("grid.mesh_polar", "must be at least 2");
    if (c.grid.mesh_azimuth < 3) fail("grid.mesh_azimuth", "must be at least 3");
    if (!(c.grid.zeta_max > 0)) fail("grid.zeta_max", "must be positive");
    if (!(c.grid.grazing_cutoff > 0)) fail("grid.grazing_cutoff", "must be positive");

    if (!std::isfinite(c.temperature.t0)) fail("temperature.t0", "must be finite");
    if (!c.temperature.slope.allFinite()) fail("temperature.slope", "must be finite");
    if (!std::isfinite(c.temperature.amplitude)) fail("temperature.amplitude", "must be finite");
    if (!c.temperature.center.allFinite()) fail("temperature.center", "must be finite");
    if (!(c.temperature.width > 0)) fail("temperature.width", "must be positive");

    if (!(c.solver.tol > 0)) fail("solver.tol", "must be positive");
    if (c.solver.max_iters < 1) fail("solver.max_iters", "must be at least 1");
    if (!(c.solver.flux_tol > 0)) fail("solver.flux_tol", "must be positive");
    if (c.solver.flux_max_iters < 1) fail("solver.flux_max_iters", "must be at least 1");
    if (c.solver.n_probes < 0) fail("solver.n_probes", "must be non-negative");

    if (c.probe.ladder_rungs < 2) fail("probe.ladder_rungs", "must be at least 2");
    if (!(c.probe.ladder_start > 0)) fail("probe.ladder_start", "must be positive");
    if (!(c.probe.epsilon > 0 && c.probe.epsilon < 1.0 / 6.0)) fail("probe.epsilon", "must lie in (0, 1/6)");
    if (!(c.probe.epsilon_prime > 0 && c.probe.epsilon_prime < 1.0 / 6.0))
        fail("probe.epsilon_prime", "must lie in (0, 1/6)");
    if (!(c.probe.exponent_slack >= 0)) fail("probe.exponent_slack", "must be non-negative");
    if (!(c.probe.h_exponent_slack >= 0)) fail("probe.h_exponent_slack", "must be non-negative");
    if (!(c.probe.ratio_slack >= 1)) fail("probe.ratio_slack", "must be at least 1");
    if (c.probe.n_points < 1) fail("probe.n_points", "must be at least 1");
    if (c.probe.n_pairs < 2) fail("probe.n_pairs", "must be at least 2");
    if (!(c.probe.pair_min > 0 && c.probe.pair_max > c.probe.pair_min)) fail("probe.pair_max", "need 0 < pair_min < pair_max");

    if (c.out_dir.empty()) fail("run.out_dir", "must not be empty");
    if (c.jobs < 1) fail("run.jobs", "must be at least 1");
}

}  // namespace kinreg

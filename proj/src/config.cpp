#include "sdkg/config.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "sdkg/errors.hpp"
#include "sdkg/estimates.hpp"

namespace sdkg {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& key, const std::string& v) {
    char* end = nullptr;
    errno = 0;
    const double x = std::strtod(v.c_str(), &end);
    if (v.empty() || *end != '\0' || errno == ERANGE) throw InvalidInput(key + ": expected a real number, got '" + v + "'");
    return x;
}

long long parse_int(const std::string& key, const std::string& v) {
    char* end = nullptr;
    errno = 0;
    const long long x = std::strtoll(v.c_str(), &end, 10);
    if (v.empty() || *end != '\0' || errno == ERANGE) throw InvalidInput(key + ": expected an integer, got '" + v + "'");
    return x;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    char* end = nullptr;
    errno = 0;
    const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
    if (v.empty() || v[0] == '-' || *end != '\0' || errno == ERANGE)
        throw InvalidInput(key + ": expected a nonnegative integer, got '" + v + "'");
    return x;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw InvalidInput(key + ": expected true or false, got '" + v + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
    return out;
}

struct Field {
    std::string key;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, const std::string&)> set;
};

Field real(const std::string& key, double RunConfig::*m) {
    return {key, [m](const RunConfig& c) { return fmt_double(c.*m); },
            [m, key](RunConfig& c, const std::string& v) { c.*m = parse_double(key, v); }};
}

Field integer(const std::string& key, int RunConfig::*m) {
    return {key, [m](const RunConfig& c) { return std::to_string(c.*m); },
            [m, key](RunConfig& c, const std::string& v) {
                const long long x = parse_int(key, v);
                if (x < -2147483647LL || x > 2147483647LL) throw InvalidInput(key + ": integer out of range");
                c.*m = static_cast<int>(x);
            }};
}

Field u64(const std::string& key, std::uint64_t RunConfig::*m) {
    return {key, [m](const RunConfig& c) { return std::to_string(c.*m); },
            [m, key](RunConfig& c, const std::string& v) { c.*m = parse_u64(key, v); }};
}

Field flag(const std::string& key, bool RunConfig::*m) {
    return {key, [m](const RunConfig& c) { return std::string(c.*m ? "true" : "false"); },
            [m, key](RunConfig& c, const std::string& v) { c.*m = parse_bool(key, v); }};
}

Field text(const std::string& key, std::string RunConfig::*m) {
    return {key, [m](const RunConfig& c) { return c.*m; }, [m](RunConfig& c, const std::string& v) { c.*m = v; }};
}

void kernel_fields(std::vector<Field>& f, const std::string& p, KernelConfig RunConfig::*k) {
    f.push_back({p + "_type", [k](const RunConfig& c) { return (c.*k).type; },
                 [k](RunConfig& c, const std::string& v) { (c.*k).type = v; }});
    auto num = [&](const std::string& name, double KernelConfig::*m) {
        const std::string key = p + "_" + name;
        f.push_back({key, [k, m](const RunConfig& c) { return fmt_double((c.*k).*m); },
                     [k, m, key](RunConfig& c, const std::string& v) { (c.*k).*m = parse_double(key, v); }});
    };
    num("width", &KernelConfig::width);
    num("cutoff", &KernelConfig::cutoff);
    num("amplitude", &KernelConfig::amplitude);
    f.push_back({p + "_file", [k](const RunConfig& c) { return (c.*k).file; },
                 [k](RunConfig& c, const std::string& v) { (c.*k).file = v; }});
    num("sigma", &KernelConfig::sigma);
}

const std::vector<Field>& fields() {
    static const std::vector<Field> table = [] {
        std::vector<Field> f;
        f.push_back(text("command", &RunConfig::command));
        f.push_back(integer("n_modes", &RunConfig::n_modes));
        f.push_back(real("domain_length", &RunConfig::domain_length));
        f.push_back(real("dt", &RunConfig::dt));
        f.push_back(real("horizon", &RunConfig::horizon));
        f.push_back(real("subinterval_length", &RunConfig::subinterval_length));
        f.push_back(real("truncation_R", &RunConfig::truncation_R));
        f.push_back(real("picard_tol", &RunConfig::picard_tol));
        f.push_back(integer("picard_max_iters", &RunConfig::picard_max_iters));
        f.push_back(integer("n_basis", &RunConfig::n_basis));
        f.push_back(real("dirac_mass", &RunConfig::dirac_mass));
        f.push_back(real("kg_mass", &RunConfig::kg_mass));
        f.push_back(real("s", &RunConfig::s));
        f.push_back(real("r", &RunConfig::r));
        f.push_back(real("b", &RunConfig::b));
        f.push_back(real("mu", &RunConfig::mu));
        f.push_back(u64("seed", &RunConfig::seed));
        f.push_back(flag("nonlinear", &RunConfig::nonlinear));
        f.push_back(flag("kg_active", &RunConfig::kg_active));
        f.push_back(flag("drop_ito_drift", &RunConfig::drop_ito_drift));
        kernel_fields(f, "kernel1", &RunConfig::kernel1);
        kernel_fields(f, "kernel2", &RunConfig::kernel2);
        f.push_back(text("initial_data", &RunConfig::initial_data));
        f.push_back(real("init_center", &RunConfig::init_center));
        f.push_back(real("init_width", &RunConfig::init_width));
        f.push_back(real("init_xi_shift", &RunConfig::init_xi_shift));
        f.push_back(real("init_amplitude", &RunConfig::init_amplitude));
        f.push_back(real("init_phi_amplitude", &RunConfig::init_phi_amplitude));
        f.push_back(integer("init_mode", &RunConfig::init_mode));
        f.push_back(text("init_file", &RunConfig::init_file));
        f.push_back(real("init_band_limit", &RunConfig::init_band_limit));
        f.push_back(text("output_path", &RunConfig::output_path));
        f.push_back(text("output_format", &RunConfig::output_format));
        f.push_back(integer("n_trajectories", &RunConfig::n_trajectories));
        f.push_back(u64("base_seed", &RunConfig::base_seed));
        f.push_back({"r_ladder",
                     [](const RunConfig& c) {
                         std::string s;
                         for (size_t i = 0; i < c.r_ladder.size(); ++i) s += (i ? "," : "") + fmt_double(c.r_ladder[i]);
                         return s;
                     },
                     [](RunConfig& c, const std::string& v) { c.r_ladder = parse_list("r_ladder", v); }});
        f.push_back(text("probe_estimate", &RunConfig::probe_estimate));
        f.push_back(integer("probe_trials", &RunConfig::probe_trials));
        f.push_back(u64("probe_seed", &RunConfig::probe_seed));
        f.push_back(integer("ito_trajectories", &RunConfig::ito_trajectories));
        f.push_back(integer("ito_halvings", &RunConfig::ito_halvings));
        f.push_back(integer("charge_levels", &RunConfig::charge_levels));
        return f;
    }();
    return table;
}

void one_of(const std::string& key, const std::string& v, std::initializer_list<const char*> allowed) {
    std::string list;
    for (const char* a : allowed) {
        if (v == a) return;
        list += (list.empty() ? "" : ", ") + std::string(a);
    }
    throw InvalidInput(key + " must be one of " + list + ", got '" + v + "'");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidInput("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const Field* field = nullptr;
        for (const auto& f : fields())
            if (f.key == key) field = &f;
        if (!field) throw InvalidInput("unknown key '" + key + "'");
        if (!seen.insert(key).second) throw InvalidInput(key + ": duplicate key");
        field->set(cfg, value);
    }
    validate(cfg);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& cfg) {
    std::string out;
    for (const auto& f : fields()) out += f.key + " = " + f.get(cfg) + "\n";
    return out;
}

bool operator==(const RunConfig& a, const RunConfig& b) { return serialize_config(a) == serialize_config(b); }

void validate(const RunConfig& cfg) {
    one_of("command", cfg.command,
           {"simulate", "ensemble", "probe-bilinear", "check-norms", "check-ito", "check-charge"});
    one_of("output_format", cfg.output_format, {"csv", "jsonl"});
    one_of("initial_data", cfg.initial_data, {"gaussian-wavepacket", "single-mode", "file", "zero"});
    one_of("kernel1_type", cfg.kernel1.type, {"zero", "gaussian", "sinc", "file"});
    one_of("kernel2_type", cfg.kernel2.type, {"zero", "gaussian", "sinc", "file"});
    if (cfg.n_modes < 4 || cfg.n_modes % 2 != 0) throw InvalidInput("n_modes must be even and at least 4");
    if (!(cfg.domain_length > 0.0)) throw InvalidInput("domain_length must be positive");
    if (cfg.mu != 0.0 && !(cfg.mu >= 1.0)) throw InvalidInput("mu must be 0 (off) or at least 1");
    if (!(cfg.s > -0.25)) throw InvalidInput("s must exceed -1/4");
    if (!(cfg.r > 0.0)) throw InvalidInput("r must be positive");
    if (cfg.n_trajectories < 1) throw InvalidInput("n_trajectories must be positive");
    if (cfg.r_ladder.empty()) throw InvalidInput("r_ladder must list at least one value");
    for (double R : cfg.r_ladder)
        if (!(R > 0.0)) throw InvalidInput("r_ladder entries must be positive");
    if (cfg.probe_trials < 1) throw InvalidInput("probe_trials must be positive");
    if (cfg.ito_trajectories < 1) throw InvalidInput("ito_trajectories must be positive");
    if (cfg.ito_halvings < 1) throw InvalidInput("ito_halvings must be positive");
    if (cfg.charge_levels < 2) throw InvalidInput("charge_levels must be at least 2");
    if (cfg.init_mode <= -cfg.n_modes / 2 || cfg.init_mode >= cfg.n_modes / 2)
        throw InvalidInput("init_mode must lie strictly inside (-n_modes/2, n_modes/2)");
    if (cfg.initial_data == "gaussian-wavepacket" && !(cfg.init_width > 0.0))
        throw InvalidInput("init_width must be positive");
    if (cfg.initial_data == "file" && cfg.init_file.empty()) throw InvalidInput("init_file must be set");
    parse_estimate(cfg.probe_estimate);
    for (const auto* k : {&cfg.kernel1, &cfg.kernel2}) {
        const std::string p = k == &cfg.kernel1 ? "kernel1" : "kernel2";
        if (k->type == "gaussian" && !(k->width > 0.0)) throw InvalidInput(p + "_width must be positive");
        if (k->type == "sinc" && !(k->cutoff > 0.0)) throw InvalidInput(p + "_cutoff must be positive");
        if (k->type == "file" && k->file.empty()) throw InvalidInput(p + "_file must be set");
        if (!(k->sigma > 0.0)) throw InvalidInput(p + "_sigma must be positive");
    }
    solver_config(cfg).validate();
}

NoiseKernel build_kernel(const KernelConfig& k, const GridSpec& grid) {
    if (k.type == "gaussian") return NoiseKernel::gaussian(grid, k.width, k.amplitude);
    if (k.type == "sinc") return NoiseKernel::sinc(grid, k.cutoff, k.amplitude);
    if (k.type == "file") return NoiseKernel::from_file(grid, k.file, k.sigma);
    return NoiseKernel::zero(grid);
}

SolverConfig solver_config(const RunConfig& c) {
    SolverConfig s(GridSpec(c.n_modes, c.domain_length));
    s.dt = c.dt;
    s.horizon = c.horizon;
    s.subinterval_length = c.subinterval_length;
    s.truncation_R = c.truncation_R;
    s.picard_tol = c.picard_tol;
    s.picard_max_iters = c.picard_max_iters;
    s.kernel1 = build_kernel(c.kernel1, s.grid);
    s.kernel2 = build_kernel(c.kernel2, s.grid);
    s.n_basis = c.n_basis;
    s.dirac_mass = c.dirac_mass;
    s.kg_mass = c.kg_mass;
    s.s = c.s;
    s.r = c.r;
    s.b = c.b;
    if (c.mu != 0.0) s.mu = c.mu;
    s.seed = c.seed;
    s.nonlinear = c.nonlinear;
    s.kg_active = c.kg_active;
    s.drop_ito_drift = c.drop_ito_drift;
    return s;
}

SplitState initial_state(const RunConfig& c) {
    const GridSpec g(c.n_modes, c.domain_length);
    SplitState u(g);
    if (c.initial_data == "gaussian-wavepacket")
        u = gaussian_wavepacket(g, c.init_center, c.init_width, c.init_xi_shift, c.init_amplitude,
                                c.init_phi_amplitude, c.dirac_mass, c.init_band_limit);
    else if (c.initial_data == "single-mode")
        u = single_mode(g, c.init_mode, c.init_amplitude, c.init_phi_amplitude, c.dirac_mass);
    else if (c.initial_data == "file")
        u = initial_from_file(g, c.init_file, c.dirac_mass);
    u.dirac_mass = c.dirac_mass;
    u.s_index = c.s;
    u.r_index = c.r;
    return u;
}

}  // namespace sdkg

#include "dhflow/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include "dhflow/errors.hpp"
#include "dhflow/io.hpp"

namespace dhflow {

namespace {

struct Key {
    const char* name;  // section.key
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

[[noreturn]] void bad(const std::string& key, const std::string& what) {
    throw ConfigError(key + ": " + what);
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    const std::string s = trim(v);
    double out = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty()) bad(key, "expected a number, got '" + v + "'");
    return out;
}

long long to_int(const std::string& key, const std::string& v) {
    const std::string s = trim(v);
    long long out = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty()) bad(key, "expected an integer, got '" + v + "'");
    return out;
}

int to_small_int(const std::string& key, const std::string& v) {
    const long long x = to_int(key, v);
    if (x < -1000000000LL || x > 1000000000LL) bad(key, "integer out of range");
    return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
    const std::string s = trim(v);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    bad(key, "expected true or false, got '" + v + "'");
}

std::vector<std::string> split(const std::string& v) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : v) {
        if (c == ' ' || c == ',' || c == '\t') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::vector<double> to_doubles(const std::string& key, const std::string& v) {
    std::vector<double> out;
    for (const auto& t : split(v)) out.push_back(to_double(key, t));
    return out;
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + format_double(v[i]);
    return s;
}

std::string num(double v) { return format_double(v); }

Preset to_preset(const std::string& key, const std::string& v) {
    for (Preset p : {Preset::Single, Preset::DecoupledSweep, Preset::Degree1Blowup, Preset::Convergence,
                     Preset::EpsilonSweep, Preset::Identities})
        if (trim(v) == preset_name(p)) return p;
    bad(key, "unknown preset '" + v + "'");
}

std::string one_of(const std::string& key, const std::string& v, std::initializer_list<const char*> allowed) {
    const std::string s = trim(v);
    for (const char* a : allowed)
        if (s == a) return s;
    bad(key, "unsupported value '" + v + "'");
}

#define DOUBLE_KEY(NAME, FIELD) \
    Key{NAME, [](RunConfig& c, const std::string& v) { c.FIELD = to_double(NAME, v); }, \
        [](const RunConfig& c) { return num(c.FIELD); }}
#define INT_KEY(NAME, FIELD) \
    Key{NAME, [](RunConfig& c, const std::string& v) { c.FIELD = to_small_int(NAME, v); }, \
        [](const RunConfig& c) { return std::to_string(c.FIELD); }}

const std::vector<Key>& keys() {
    static const std::vector<Key> table = {
        Key{"run.preset", [](RunConfig& c, const std::string& v) { c.preset = to_preset("run.preset", v); },
            [](const RunConfig& c) { return std::string(preset_name(c.preset)); }},
        Key{"run.seed",
            [](RunConfig& c, const std::string& v) {
                const long long s = to_int("run.seed", v);
                if (s < 0) bad("run.seed", "seed must be >= 0");
                c.seed = static_cast<std::uint64_t>(s);
            },
            [](const RunConfig& c) { return std::to_string(c.seed); }},
        Key{"output.dir", [](RunConfig& c, const std::string& v) { c.out_dir = trim(v); },
            [](const RunConfig& c) { return c.out_dir.string(); }},

        DOUBLE_KEY("grid.Lx", Lx),
        DOUBLE_KEY("grid.Ly", Ly),
        INT_KEY("grid.Nx", Nx),
        INT_KEY("grid.Ny", Ny),
        INT_KEY("grid.delta1", spin.delta1),
        INT_KEY("grid.delta2", spin.delta2),

        Key{"target.kind",
            [](RunConfig& c, const std::string& v) {
                c.target = one_of("target.kind", v, {"sphere", "flat_torus"}) == "sphere" ? TargetKind::Sphere
                                                                                        : TargetKind::FlatTorus;
            },
            [](const RunConfig& c) { return std::string(c.target == TargetKind::Sphere ? "sphere" : "flat_torus"); }},
        INT_KEY("target.q", q),

        DOUBLE_KEY("flow.eps", eps),
        DOUBLE_KEY("flow.T_end", T_end),
        DOUBLE_KEY("flow.dt", step.dt),
        DOUBLE_KEY("flow.cfl_safety", step.cfl_safety),
        DOUBLE_KEY("flow.min_dt", step.min_dt),
        DOUBLE_KEY("flow.max_dt", step.max_dt),
        INT_KEY("flow.max_retries", step.max_retries),
        Key{"flow.coupling",
            [](RunConfig& c, const std::string& v) {
                c.coupling = one_of("flow.coupling", v, {"gauss_seidel", "lagged"}) == "lagged"
                                 ? CouplingOrder::Lagged
                                 : CouplingOrder::GaussSeidel;
            },
            [](const RunConfig& c) {
                return std::string(c.coupling == CouplingOrder::Lagged ? "lagged" : "gauss_seidel");
            }},

        Key{"initial.map",
            [](RunConfig& c, const std::string& v) {
                c.initial.map = one_of("initial.map", v, {"constant", "geodesic", "smooth", "bubble"});
            },
            [](const RunConfig& c) { return c.initial.map; }},
        DOUBLE_KEY("initial.map_amplitude", initial.map_amplitude),
        INT_KEY("initial.map_modes", initial.map_modes),
        INT_KEY("initial.geodesic_k", initial.geodesic_k),
        DOUBLE_KEY("initial.bubble_lambda", initial.bubble_lambda),
        DOUBLE_KEY("initial.bubble_rho", initial.bubble_rho),
        INT_KEY("initial.bubble_turns", initial.bubble_turns),
        DOUBLE_KEY("initial.bubble_x", initial.bubble_x),
        DOUBLE_KEY("initial.bubble_y", initial.bubble_y),
        Key{"initial.spinor",
            [](RunConfig& c, const std::string& v) {
                c.initial.spinor = one_of("initial.spinor", v, {"zero", "smooth", "mode"});
            },
            [](const RunConfig& c) { return c.initial.spinor; }},
        DOUBLE_KEY("initial.spinor_amplitude", initial.spinor_amplitude),
        INT_KEY("initial.spinor_modes", initial.spinor_modes),
        INT_KEY("initial.mode_n1", initial.mode_n1),
        INT_KEY("initial.mode_n2", initial.mode_n2),
        INT_KEY("initial.mode_sign", initial.mode_sign),

        INT_KEY("monitor.cadence", monitor.cadence),
        DOUBLE_KEY("monitor.delta1", monitor.delta1),
        Key{"monitor.radii",
            [](RunConfig& c, const std::string& v) { c.monitor.radii = to_doubles("monitor.radii", v); },
            [](const RunConfig& c) { return join(c.monitor.radii); }},
        DOUBLE_KEY("monitor.stop_psi_ratio", monitor.stop_psi_ratio),
        Key{"monitor.scan_local_F",
            [](RunConfig& c, const std::string& v) { c.monitor.scan_local_F = to_bool("monitor.scan_local_F", v); },
            [](const RunConfig& c) { return std::string(c.monitor.scan_local_F ? "true" : "false"); }},
        Key{"monitor.detect_events",
            [](RunConfig& c, const std::string& v) { c.monitor.detect_events = to_bool("monitor.detect_events", v); },
            [](const RunConfig& c) { return std::string(c.monitor.detect_events ? "true" : "false"); }},

        Key{"sweep.eps_factors",
            [](RunConfig& c, const std::string& v) { c.sweep.eps_factors = to_doubles("sweep.eps_factors", v); },
            [](const RunConfig& c) { return join(c.sweep.eps_factors); }},
        Key{"sweep.spins",
            [](RunConfig& c, const std::string& v) {
                c.sweep.spins.clear();
                for (const auto& t : split(v)) {
                    if (t.size() != 3 || t[1] != ':' || (t[0] != '0' && t[0] != '1') || (t[2] != '0' && t[2] != '1'))
                        bad("sweep.spins", "expected entries like 1:0, got '" + t + "'");
                    c.sweep.spins.emplace_back(t[0] - '0', t[2] - '0');
                }
            },
            [](const RunConfig& c) {
                std::string s;
                for (std::size_t i = 0; i < c.sweep.spins.size(); ++i)
                    s += (i ? " " : "") + std::to_string(c.sweep.spins[i].first) + ":" +
                         std::to_string(c.sweep.spins[i].second);
                return s;
            }},
        INT_KEY("sweep.halvings", sweep.halvings),

        Key{"identities.resolutions",
            [](RunConfig& c, const std::string& v) {
                c.identities.resolutions.clear();
                for (const auto& t : split(v))
                    c.identities.resolutions.push_back(to_small_int("identities.resolutions", t));
            },
            [](const RunConfig& c) {
                std::string s;
                for (std::size_t i = 0; i < c.identities.resolutions.size(); ++i)
                    s += (i ? " " : "") + std::to_string(c.identities.resolutions[i]);
                return s;
            }},
        INT_KEY("identities.sobolev_samples", identities.sobolev_samples),
    };
    return table;
}

#undef DOUBLE_KEY
#undef INT_KEY

void validate(RunConfig& c) {
    if (!(c.eps > 0.0)) bad("flow.eps", "eps must be > 0");
    if (!(c.T_end > 0.0)) bad("flow.T_end", "T_end must be > 0");
    if (!(c.Lx > 0.0)) bad("grid.Lx", "must be > 0");
    if (!(c.Ly > 0.0)) bad("grid.Ly", "must be > 0");
    if (c.Nx < 8 || c.Nx % 2 != 0) bad("grid.Nx", "must be even and >= 8");
    if (c.Ny < 8 || c.Ny % 2 != 0) bad("grid.Ny", "must be even and >= 8");
    if (c.spin.delta1 != 0 && c.spin.delta1 != 1) bad("grid.delta1", "must be 0 or 1");
    if (c.spin.delta2 != 0 && c.spin.delta2 != 1) bad("grid.delta2", "must be 0 or 1");
    if (c.target == TargetKind::Sphere && c.q < 2) bad("target.q", "sphere needs q >= 2");
    if (c.q < 1 || c.q > 64) bad("target.q", "must lie in [1, 64]");
    validate(c.step);
    validate(c.monitor, c.grid());
    if (c.initial.map_modes < 0) bad("initial.map_modes", "must be >= 0");
    if (c.initial.spinor_modes < 0) bad("initial.spinor_modes", "must be >= 0");
    if (c.initial.mode_sign != 1 && c.initial.mode_sign != -1) bad("initial.mode_sign", "must be 1 or -1");
    if (c.initial.map == "bubble" && (c.target != TargetKind::Sphere || c.q != 3))
        bad("initial.map", "bubble requires target.kind = sphere and q = 3");
    if (!(c.initial.bubble_lambda > 0.0)) bad("initial.bubble_lambda", "must be > 0");
    if (!(c.initial.bubble_rho > 0.0)) bad("initial.bubble_rho", "must be > 0");
    if (c.initial.bubble_turns < 1 || c.initial.bubble_turns % 2 == 0)
        bad("initial.bubble_turns", "must be odd and >= 1");
    for (double f : c.sweep.eps_factors)
        if (!(f > 0.0)) bad("sweep.eps_factors", "entries must be > 0");
    if (c.sweep.halvings < 0 || c.sweep.halvings > 30) bad("sweep.halvings", "must lie in [0, 30]");
    for (int n : c.identities.resolutions)
        if (n < 8 || n % 2 != 0) bad("identities.resolutions", "entries must be even and >= 8");
    if (c.identities.sobolev_samples < 1) bad("identities.sobolev_samples", "must be >= 1");
}

}  // namespace

const char* preset_name(Preset p) {
    switch (p) {
        case Preset::Single: return "single";
        case Preset::DecoupledSweep: return "decoupled_sweep";
        case Preset::Degree1Blowup: return "degree1_blowup";
        case Preset::Convergence: return "convergence";
        case Preset::EpsilonSweep: return "epsilon_sweep";
        case Preset::Identities: return "identities";
    }
    return "single";
}

RunConfig preset_config(Preset p) {
    RunConfig c;
    c.preset = p;
    switch (p) {
        case Preset::Single:
            break;
        case Preset::DecoupledSweep:
            c.target = TargetKind::FlatTorus;
            c.q = 1;
            c.T_end = 40.0;
            c.initial.map = "constant";
            c.initial.spinor = "smooth";
            c.initial.spinor_amplitude = 0.1;
            c.monitor.cadence = 20;
            c.monitor.detect_events = false;
            c.monitor.stop_psi_ratio = 10.0;
            break;
        case Preset::Degree1Blowup:
            c.Nx = c.Ny = 128;
            c.eps = 1.0;
            c.T_end = 0.3;
            c.initial.map = "bubble";
            c.initial.bubble_lambda = 1.5;
            c.initial.bubble_rho = 3.0;
            c.initial.bubble_turns = 3;
            c.initial.spinor = "zero";
            c.monitor.delta1 = 8.5;
            c.monitor.cadence = 20;
            break;
        case Preset::Convergence:
            c.eps = 2.0;
            c.T_end = 12.0;
            c.initial.map_amplitude = 0.2;
            c.initial.spinor_amplitude = 0.05;
            c.monitor.delta1 = 4.0;
            c.monitor.cadence = 50;
            break;
        case Preset::EpsilonSweep:
            c.target = TargetKind::FlatTorus;
            c.q = 1;
            c.spin = {1, 0};
            c.T_end = 4.0;
            c.initial.map = "constant";
            c.initial.spinor = "mode";
            c.initial.mode_sign = -1;
            c.monitor.detect_events = false;
            c.monitor.cadence = 50;
            break;
        case Preset::Identities:
            c.spin = {1, 0};
            break;
    }
    return c;
}

GridSpec RunConfig::grid() const { return make_grid(Lx, Ly, Nx, Ny, spin); }

Target RunConfig::target_manifold() const {
    return target == TargetKind::Sphere ? Target::sphere(q) : Target::flat_torus(q);
}

RunConfig parse_config_string(const std::string& text) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("malformed config: " + e.message() + " (line " + std::to_string(e.line()) + ")");
    }
    RunConfig c;
    if (const auto p = tree.get_optional<std::string>("run.preset")) c = preset_config(to_preset("run.preset", *p));
    for (const auto& [section, body] : tree) {
        if (!body.data().empty()) throw ConfigError("unknown key '" + section + "' (keys must be inside a section)");
        const auto& table = keys();
        const std::string prefix = section + ".";
        if (std::none_of(table.begin(), table.end(),
                         [&](const Key& k) { return std::string(k.name).rfind(prefix, 0) == 0; }))
            throw ConfigError("unknown section '" + section + "'");
        for (const auto& [name, value] : body) {
            const std::string full = section + "." + name;
            const auto it = std::find_if(table.begin(), table.end(), [&](const Key& k) { return full == k.name; });
            if (it == table.end()) throw ConfigError("unknown key '" + full + "'");
            it->set(c, value.data());
        }
    }
    validate(c);
    return c;
}

RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config_string(ss.str());
}

std::string echo_config(const RunConfig& c) {
    std::string out, section;
    for (const auto& k : keys()) {
        const std::string name = k.name;
        const auto dot = name.find('.');
        const std::string sec = name.substr(0, dot);
        if (sec != section) {
            out += (out.empty() ? "[" : "\n[") + sec + "]\n";
            section = sec;
        }
        out += name.substr(dot + 1) + " = " + k.get(c) + "\n";
    }
    return out;
}

}  // namespace dhflow

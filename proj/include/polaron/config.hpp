// config.hpp - run configuration: key table, INI parsing, validation and overrides
#pragma once

#include "polaron/flows.hpp"
#include "polaron/fock.hpp"
#include "polaron/initial_data.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace polaron {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct KeySpec {
    std::string section;
    std::string key;
    std::string type;
    std::string fallback;
    std::string help;

    std::string name() const { return section + "." + key; }
};

// Every accepted key. config/schema.txt documents the same table and a unit
// test keeps the two in sync.
inline const std::vector<KeySpec>& schema() {
    static const std::vector<KeySpec> table{
        {"grid", "dim", "int", "3", "spatial dimension, 1..3"},
        {"grid", "points", "int", "32", "points per axis, even, at least 4"},
        {"grid", "length", "real", "16", "side of the periodic box"},

        {"form_factors", "ir", "real", "0.5", "infrared cutoff, > 0"},
        {"form_factors", "uv", "real", "inf", "ultraviolet cutoff, >= ir; inf for none"},

        {"evolution", "flow", "choice:free|landau_pekar|dressed", "landau_pekar", "flow to integrate"},
        {"evolution", "scheme", "choice:strang|rk4", "strang", "step scheme; the dressed flow always uses rk4"},
        {"evolution", "dt", "real", "0.001", "time step, > 0"},
        {"evolution", "t_final", "real", "1", "horizon, a whole number of steps"},
        {"evolution", "record_every", "int", "10", "diagnostics stride in steps, >= 1"},
        {"evolution", "levels", "int", "3", "dt halvings for convergence and conjugation, >= 2"},

        {"scenario", "name", "choice:trajectory|convergence|conjugation|identity|picard|correspondence|dressed_operator|form_bound",
         "trajectory", "what to run"},
        {"scenario", "seed", "uint", "1", "seed for random initial data and samples"},
        {"scenario", "samples", "int", "100", "random states for identity and form_bound"},
        {"scenario", "u_profile", "choice:gaussian|random|zero", "gaussian", "initial electron field"},
        {"scenario", "u_center", "vec3", "center", "packet center, or center for the box middle"},
        {"scenario", "u_width", "real", "1.5", "packet width"},
        {"scenario", "u_momentum", "vec3", "0.5,0,0", "packet momentum"},
        {"scenario", "u_mass", "real", "0.25", "||u||^2 of the initial electron field"},
        {"scenario", "alpha_profile", "choice:gaussian|shell|random|zero", "gaussian", "initial phonon field"},
        {"scenario", "alpha_center", "vec3", "0.3,0.2,0", "center of the phonon Gaussian in k"},
        {"scenario", "alpha_width", "real", "1", "width of the phonon Gaussian or shell"},
        {"scenario", "alpha_amplitude", "real", "0.5", "peak value; L2 norm for the random profile"},
        {"scenario", "alpha_radius", "real", "1", "shell radius"},
        {"scenario", "random_width", "real", "2", "spectral width of random fields in mode units"},
        {"scenario", "mass_tolerance", "real", "1e-8", "trajectory verdict on relative mass drift"},

        {"fock", "dim", "int", "1", "dimension of the mode lattice; modes lie on the first axis"},
        {"fock", "length", "real", "1.5707963267948966", "box side for the mode lattice"},
        {"fock", "particle_modes", "ilist", "-2,-1,0,1,2", "particle momenta in units of 2 pi / length"},
        {"fock", "phonon_modes", "ilist", "-1,1", "phonon momenta in units of 2 pi / length"},
        {"fock", "particle_max", "int", "6", "particle occupancy cutoff"},
        {"fock", "phonon_max", "int", "6", "phonon occupancy cutoff"},
        {"fock", "eps", "real", "0.0625", "semiclassical parameter for dressed_operator and form_bound"},
        {"fock", "ir", "real", "2", "infrared cutoff of the mode model"},
        {"fock", "eps_list", "rlist", "0.5,0.25,0.125", "semiclassical parameters for correspondence"},
        {"fock", "times", "rlist", "0,0.25,0.5", "comparison times for correspondence"},
        {"fock", "amplitude_re", "rlist", "", "initial amplitudes, particles then phonons; empty for 0.15 e^{0.7 i j}"},
        {"fock", "amplitude_im", "rlist", "", "imaginary parts, same length as amplitude_re"},
        {"fock", "classical_dt", "real", "0.0001", "step of the classical mode flow"},
        {"fock", "slope", "real", "0.9", "form_bound slope a"},
        {"fock", "sector", "int", "2", "particle number for form_bound sampling"},
    };
    return table;
}

inline const KeySpec* find_key(const std::string& section, const std::string& key) {
    for (const auto& k : schema())
        if (k.section == section && k.key == key) return &k;
    return nullptr;
}

struct GridSettings {
    int dim = 3;
    int points = 32;
    double length = 16.0;
};

struct FormFactorSettings {
    double ir = 0.5;
    double uv = no_cutoff;
};

struct EvolutionSettings {
    Flow flow = Flow::landau_pekar;
    Scheme scheme = Scheme::strang_split;
    double dt = 1e-3;
    double t_final = 1.0;
    int record_every = 10;
    int levels = 3;
};

struct ScenarioSettings {
    std::string name = "trajectory";
    std::uint64_t seed = 1;
    int samples = 100;
    std::string u_profile = "gaussian";
    std::optional<Vec3> u_center;  // empty: box center
    double u_width = 1.5;
    Vec3 u_momentum{0.5, 0.0, 0.0};
    double u_mass = 0.25;
    std::string alpha_profile = "gaussian";
    Vec3 alpha_center{0.3, 0.2, 0.0};
    double alpha_width = 1.0;
    double alpha_amplitude = 0.5;
    double alpha_radius = 1.0;
    double random_width = 2.0;
    double mass_tolerance = 1e-8;
};

struct FockSettings {
    fock::FockModel model;
    std::vector<double> eps_list;
    std::vector<double> times;
    fock::Vector amplitudes;
    double classical_dt = 1e-4;
    double slope = 0.9;
    int sector = 2;
};

struct RunConfig {
    GridSettings grid;
    FormFactorSettings form_factors;
    EvolutionSettings evolution;
    ScenarioSettings scenario;
    FockSettings fock;
    // Resolved textual values, schema order, defaults filled in.
    std::vector<std::pair<std::string, std::string>> entries;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

inline std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    if (trim(s).empty()) return out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(trim(item));
    return out;
}

inline double to_real(const std::string& name, const std::string& v) {
    if (v == "inf") return no_cutoff;
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != v.size()) throw ConfigError(name + ": expected a number, got '" + v + "'");
    return x;
}

inline long long to_int(const std::string& name, const std::string& v) {
    std::size_t used = 0;
    long long x = 0;
    try {
        x = std::stoll(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != v.size()) throw ConfigError(name + ": expected an integer, got '" + v + "'");
    return x;
}

inline std::vector<double> to_reals(const std::string& name, const std::string& v) {
    std::vector<double> out;
    for (const auto& s : split(v)) out.push_back(to_real(name, s));
    return out;
}

inline std::vector<int> to_ints(const std::string& name, const std::string& v) {
    std::vector<int> out;
    for (const auto& s : split(v)) out.push_back(static_cast<int>(to_int(name, s)));
    return out;
}

inline Vec3 to_vec3(const std::string& name, const std::string& v) {
    const auto xs = to_reals(name, v);
    if (xs.size() != 3) throw ConfigError(name + ": expected three comma-separated numbers");
    return {xs[0], xs[1], xs[2]};
}

// type "choice:a|b|c"
inline void check_choice(const KeySpec& spec, const std::string& v) {
    std::stringstream in(spec.type.substr(spec.type.find(':') + 1));
    std::string option;
    while (std::getline(in, option, '|'))
        if (option == v) return;
    throw ConfigError(spec.name() + ": '" + v + "' is not one of " + spec.type.substr(7));
}

inline void require(bool ok, const std::string& name, const std::string& what) {
    if (!ok) throw ConfigError(name + ": " + what);
}

}  // namespace detail

// Raw section.key -> text map; unknown keys and keys outside a section are
// rejected by name.
inline std::map<std::string, std::string> read_entries(std::istream& in) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("config syntax: " + e.message() + " at line " + std::to_string(e.line()));
    }
    std::map<std::string, std::string> out;
    for (const auto& [section, body] : tree) {
        if (body.empty()) throw ConfigError("unknown key '" + section + "' outside a section");
        for (const auto& [key, value] : body) {
            const KeySpec* spec = find_key(section, key);
            if (!spec) throw ConfigError("unknown key '" + section + "." + key + "'");
            out[spec->name()] = detail::trim(value.data());
        }
    }
    return out;
}

// "section.key=value"
inline void apply_override(std::map<std::string, std::string>& entries, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not section.key=value");
    const std::string name = detail::trim(assignment.substr(0, eq));
    const auto dot = name.find('.');
    if (dot == std::string::npos || !find_key(name.substr(0, dot), name.substr(dot + 1)))
        throw ConfigError("unknown key '" + name + "'");
    entries[name] = detail::trim(assignment.substr(eq + 1));
}

inline RunConfig resolve(const std::map<std::string, std::string>& given) {
    using namespace detail;
    RunConfig c;
    std::map<std::string, std::string> v;
    for (const auto& spec : schema()) {
        const auto it = given.find(spec.name());
        v[spec.name()] = it == given.end() ? spec.fallback : it->second;
        c.entries.emplace_back(spec.name(), v[spec.name()]);
        if (spec.type.starts_with("choice:")) check_choice(spec, v[spec.name()]);
    }
    auto real = [&](const std::string& n) { return to_real(n, v[n]); };
    auto integer = [&](const std::string& n) { return static_cast<int>(to_int(n, v[n])); };

    c.grid.dim = integer("grid.dim");
    c.grid.points = integer("grid.points");
    c.grid.length = real("grid.length");
    require(c.grid.dim >= 1 && c.grid.dim <= 3, "grid.dim", "must be 1, 2 or 3");
    require(c.grid.points >= 4 && c.grid.points % 2 == 0, "grid.points", "must be even and at least 4");
    require(c.grid.length > 0.0, "grid.length", "must be positive");

    c.form_factors.ir = real("form_factors.ir");
    c.form_factors.uv = real("form_factors.uv");
    require(c.form_factors.ir > 0.0, "form_factors.ir", "must be positive");
    require(c.form_factors.uv >= c.form_factors.ir, "form_factors.uv", "must not be below form_factors.ir");

    const std::string flow = v["evolution.flow"];
    c.evolution.flow = flow == "free" ? Flow::free : flow == "dressed" ? Flow::dressed : Flow::landau_pekar;
    c.evolution.scheme = v["evolution.scheme"] == "rk4" ? Scheme::rk4_gradient : Scheme::strang_split;
    if (c.evolution.flow == Flow::dressed) c.evolution.scheme = Scheme::rk4_gradient;
    c.evolution.dt = real("evolution.dt");
    c.evolution.t_final = real("evolution.t_final");
    c.evolution.record_every = integer("evolution.record_every");
    c.evolution.levels = integer("evolution.levels");
    require(c.evolution.dt > 0.0, "evolution.dt", "must be positive");
    require(c.evolution.t_final >= 0.0, "evolution.t_final", "must be nonnegative");
    require(c.evolution.record_every >= 1, "evolution.record_every", "must be at least 1");
    require(c.evolution.levels >= 2, "evolution.levels", "must be at least 2");
    try {
        step_count({c.evolution.dt, c.evolution.t_final, c.evolution.scheme, c.evolution.record_every, false});
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("evolution.t_final: ") + e.what());
    }

    auto& s = c.scenario;
    s.name = v["scenario.name"];
    const long long seed = to_int("scenario.seed", v["scenario.seed"]);
    require(seed >= 0, "scenario.seed", "must be nonnegative");
    s.seed = static_cast<std::uint64_t>(seed);
    s.samples = integer("scenario.samples");
    require(s.samples >= 1, "scenario.samples", "must be at least 1");
    s.u_profile = v["scenario.u_profile"];
    if (v["scenario.u_center"] != "center") s.u_center = to_vec3("scenario.u_center", v["scenario.u_center"]);
    s.u_width = real("scenario.u_width");
    s.u_momentum = to_vec3("scenario.u_momentum", v["scenario.u_momentum"]);
    s.u_mass = real("scenario.u_mass");
    s.alpha_profile = v["scenario.alpha_profile"];
    s.alpha_center = to_vec3("scenario.alpha_center", v["scenario.alpha_center"]);
    s.alpha_width = real("scenario.alpha_width");
    s.alpha_amplitude = real("scenario.alpha_amplitude");
    s.alpha_radius = real("scenario.alpha_radius");
    s.random_width = real("scenario.random_width");
    s.mass_tolerance = real("scenario.mass_tolerance");
    require(s.u_width > 0.0, "scenario.u_width", "must be positive");
    require(s.u_mass >= 0.0, "scenario.u_mass", "must be nonnegative");
    require(s.alpha_width > 0.0, "scenario.alpha_width", "must be positive");
    require(s.random_width > 0.0, "scenario.random_width", "must be positive");

    auto& f = c.fock;
    auto& m = f.model;
    m.dim = integer("fock.dim");
    m.length = real("fock.length");
    require(m.dim >= 1 && m.dim <= 3, "fock.dim", "must be 1, 2 or 3");
    require(m.length > 0.0, "fock.length", "must be positive");
    for (int p : to_ints("fock.particle_modes", v["fock.particle_modes"])) m.particle_modes.push_back({p, 0, 0});
    for (int q : to_ints("fock.phonon_modes", v["fock.phonon_modes"])) m.phonon_modes.push_back({q, 0, 0});
    require(!m.particle_modes.empty(), "fock.particle_modes", "needs at least one mode");
    m.particle_max = integer("fock.particle_max");
    m.phonon_max = integer("fock.phonon_max");
    require(m.particle_max >= 0 && m.phonon_max >= 0, "fock.particle_max", "cutoffs must be nonnegative");
    m.eps = real("fock.eps");
    require(m.eps > 0.0, "fock.eps", "must be positive");
    m.profile = {m.dim, real("fock.ir"), no_cutoff};
    require(m.profile.ir > 0.0, "fock.ir", "must be positive");
    f.eps_list = to_reals("fock.eps_list", v["fock.eps_list"]);
    f.times = to_reals("fock.times", v["fock.times"]);
    for (double e : f.eps_list) require(e > 0.0, "fock.eps_list", "entries must be positive");
    for (double t : f.times) require(t >= 0.0, "fock.times", "entries must be nonnegative");
    const auto re = to_reals("fock.amplitude_re", v["fock.amplitude_re"]);
    const auto im = to_reals("fock.amplitude_im", v["fock.amplitude_im"]);
    const int modes = m.mode_count();
    f.amplitudes = fock::Vector(modes);
    if (re.empty() && im.empty()) {
        for (int j = 0; j < modes; ++j) f.amplitudes(j) = 0.15 * std::exp(cplx(0.0, 0.7 * j));
    } else {
        require(static_cast<int>(re.size()) == modes, "fock.amplitude_re", "needs one entry per mode");
        require(im.empty() || im.size() == re.size(), "fock.amplitude_im", "must match fock.amplitude_re");
        for (int j = 0; j < modes; ++j) f.amplitudes(j) = {re[j], im.empty() ? 0.0 : im[j]};
    }
    f.classical_dt = real("fock.classical_dt");
    f.slope = real("fock.slope");
    f.sector = integer("fock.sector");
    require(f.classical_dt > 0.0, "fock.classical_dt", "must be positive");
    require(f.slope > 0.0, "fock.slope", "must be positive");
    require(f.sector >= 0 && f.sector <= m.particle_max, "fock.sector", "must lie in 0..particle_max");
    return c;
}

inline RunConfig parse_config(std::istream& in, const std::vector<std::string>& overrides = {}) {
    auto entries = read_entries(in);
    for (const auto& o : overrides) apply_override(entries, o);
    return resolve(entries);
}

inline RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {}) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    return parse_config(in, overrides);
}

}  // namespace polaron

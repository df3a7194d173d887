#include "polaron/runner.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <sstream>

using namespace polaron;

namespace {

RunConfig parse(const std::string& text, const std::vector<std::string>& overrides = {}) {
    std::istringstream in(text);
    return parse_config(in, overrides);
}

std::string error_of(const std::string& text) {
    try {
        parse(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

struct Emitted {
    std::string csv, summary;
};

Emitted emit(const RunConfig& c) {
    const RunOutput out = run_scenario(c);
    std::ostringstream csv;
    if (out.trajectory) write_trajectory_csv(csv, *out.trajectory);
    return {csv.str(), summary_json(c, out).dump(2)};
}

const char* small_run = R"(
[grid]
dim = 3
points = 8
length = 8
[evolution]
dt = 0.01
t_final = 0.05
record_every = 1
[scenario]
u_profile = random
alpha_profile = random
seed = 4
)";

}  // namespace

TEST(Config, SchemaFileMatchesKeyTable) {
    std::ifstream in(std::string(POLARON_SOURCE_DIR) + "/config/schema.txt");
    ASSERT_TRUE(in);
    std::set<std::string> documented;
    std::string line, section;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (line[0] == '[') {
            section = line.substr(1, line.find(']') - 1);
            continue;
        }
        std::istringstream fields(line);
        std::string key, type, fallback;
        fields >> key >> type >> fallback;
        const KeySpec* spec = find_key(section, key);
        ASSERT_NE(spec, nullptr) << section << "." << key;
        EXPECT_EQ(spec->type, type) << key;
        EXPECT_EQ(spec->fallback.empty() ? "-" : spec->fallback, fallback) << key;
        documented.insert(section + "." + key);
    }
    EXPECT_EQ(documented.size(), schema().size());
}

TEST(Config, DefaultsResolve) {
    const RunConfig c = parse("");
    EXPECT_EQ(c.grid.points, 32);
    EXPECT_EQ(c.form_factors.uv, no_cutoff);
    EXPECT_EQ(c.evolution.flow, Flow::landau_pekar);
    EXPECT_EQ(c.scenario.name, "trajectory");
    EXPECT_FALSE(c.scenario.u_center.has_value());
    EXPECT_EQ(c.fock.model.particle_count(), 5);
    EXPECT_EQ(c.fock.amplitudes.size(), 7);
    EXPECT_EQ(c.entries.size(), schema().size());
}

TEST(Config, ParsesValues) {
    const RunConfig c = parse(R"(
; comment
[grid]
dim = 2
points = 16
[evolution]
flow = dressed
scheme = strang
[scenario]
u_center = 1, 2, 3
[fock]
phonon_modes = -2,-1,1,2
amplitude_re = 1,2,3,4,5,6,7,8,9
)");
    EXPECT_EQ(c.grid.dim, 2);
    EXPECT_EQ(c.evolution.scheme, Scheme::rk4_gradient);
    EXPECT_EQ(c.scenario.u_center->at(2), 3.0);
    EXPECT_EQ(c.fock.model.phonon_modes[3][0], 2);
    EXPECT_EQ(c.fock.amplitudes(8), cplx(9.0, 0.0));
}

TEST(Config, UnknownKeyIsNamed) {
    EXPECT_NE(error_of("[grid]\nspacing = 1\n").find("grid.spacing"), std::string::npos);
    EXPECT_NE(error_of("[solver]\nx = 1\n").find("solver.x"), std::string::npos);
    EXPECT_NE(error_of("orphan = 1\n").find("orphan"), std::string::npos);
}

TEST(Config, FieldLevelMessages) {
    EXPECT_NE(error_of("[grid]\npoints = many\n").find("grid.points"), std::string::npos);
    EXPECT_NE(error_of("[grid]\npoints = 7\n").find("grid.points"), std::string::npos);
    EXPECT_NE(error_of("[evolution]\nflow = sideways\n").find("evolution.flow"), std::string::npos);
    EXPECT_NE(error_of("[evolution]\ndt = 0.3\n").find("evolution.t_final"), std::string::npos);
    EXPECT_NE(error_of("[form_factors]\nir = 2\nuv = 1\n").find("form_factors.uv"), std::string::npos);
    EXPECT_NE(error_of("[scenario]\nu_momentum = 1,2\n").find("scenario.u_momentum"), std::string::npos);
    EXPECT_NE(error_of("[fock]\namplitude_re = 1,2\n").find("fock.amplitude_re"), std::string::npos);
    EXPECT_NE(error_of("[fock]\nparticle_modes = 0.5\n").find("fock.particle_modes"), std::string::npos);
    EXPECT_NE(error_of("[grid]\ndim = 1\ndim = 2\n").find("syntax"), std::string::npos);
}

TEST(Config, Overrides) {
    const RunConfig c = parse("[scenario]\nseed = 3\n", {"scenario.seed=9", "grid.points=8"});
    EXPECT_EQ(c.scenario.seed, 9u);
    EXPECT_EQ(c.grid.points, 8);
    EXPECT_THROW(parse("", {"grid.spacing=1"}), ConfigError);
    EXPECT_THROW(parse("", {"grid.points"}), ConfigError);
}

TEST(Runner, MinimalRunIsZeroAndPasses) {
    std::ifstream in(std::string(POLARON_SOURCE_DIR) + "/config/minimal.cfg");
    const RunConfig c = parse_config(in);
    const RunOutput out = run_scenario(c);
    ASSERT_TRUE(out.trajectory);
    EXPECT_TRUE(out.passed());
    EXPECT_EQ(out.trajectory->samples.size(), 11u);
    for (const auto& s : out.trajectory->samples) {
        EXPECT_EQ(s.row.mass, 0.0);
        EXPECT_EQ(s.row.energy.total, 0.0);
        EXPECT_EQ(s.row.dressed_energy.total, 0.0);
        EXPECT_EQ(s.row.max_abs_u, 0.0);
    }
    std::ostringstream csv;
    write_trajectory_csv(csv, *out.trajectory);
    std::istringstream lines(csv.str());
    std::string line;
    std::getline(lines, line);
    EXPECT_EQ(line, "# polaron-trajectory/1");
    std::getline(lines, line);
    EXPECT_EQ(line.substr(0, 7), "t,mass,");
    std::getline(lines, line);
    EXPECT_EQ(line, "0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0");
}

TEST(Runner, SeventeenDigits) {
    EXPECT_EQ(exact(0.1), "0.10000000000000001");
    EXPECT_EQ(std::stod(exact(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Runner, Deterministic) {
    const RunConfig c = parse(small_run);
    const Emitted a = emit(c);
    const Emitted b = emit(c);
    EXPECT_EQ(a.csv, b.csv);
    EXPECT_EQ(a.summary, b.summary);
    const Emitted other = emit(parse(small_run, {"scenario.seed=5"}));
    EXPECT_NE(a.csv, other.csv);
}

TEST(Runner, SummaryLayout) {
    const RunConfig c = parse(small_run);
    const Json s = summary_json(c, run_scenario(c));
    EXPECT_EQ(s["format"], summary_format);
    EXPECT_EQ(s["config"]["grid"]["points"], "8");
    EXPECT_EQ(s["verdicts"][0]["check"], "mass_drift");
    EXPECT_EQ(s["status"], "pass");
    EXPECT_TRUE(s["results"].contains("strichartz"));
}

TEST(Runner, IdentityScenario) {
    const RunConfig c = parse(std::string(small_run) + "name = identity\nsamples = 5\nrandom_width = 1\n",
                              {"grid.points=16", "grid.length=12"});
    const RunOutput out = run_scenario(c);
    for (const auto& v : out.verdicts) EXPECT_TRUE(v.pass) << v.check << " " << v.value;
    EXPECT_EQ(out.verdicts.size(), 3u);
    EXPECT_FALSE(out.trajectory);
}

TEST(Runner, DressedOperatorScenario) {
    const RunOutput out = run_scenario(parse("[scenario]\nname = dressed_operator\n"));
    ASSERT_EQ(out.verdicts.size(), 1u);
    EXPECT_TRUE(out.verdicts[0].pass) << out.verdicts[0].value;
}

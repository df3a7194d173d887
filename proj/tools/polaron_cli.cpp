// polaron_cli - run configured scenarios and write trajectory, summary and verdict files
//
//   polaron_cli run <config> --out DIR [--seed N] [--scenario NAME] [-v]
//   polaron_cli sweep <config> --out DIR --vary section.key=a,b,c [--vary ...] [--jobs N]
//
// Exit status: 0 every verdict passed, 1 some check failed, 2 usage or config error.

#include "polaron/runner.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

namespace fs = std::filesystem;
using namespace polaron;

namespace {

constexpr int exit_pass = 0;
constexpr int exit_fail = 1;
constexpr int exit_usage = 2;

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << text;
}

// Writes summary.json, verdicts.json, trajectory.csv and any scenario tables.
bool run_one(const RunConfig& cfg, const fs::path& out_dir, spdlog::logger& log) {
    fs::create_directories(out_dir);
    log.info("scenario {} -> {}", cfg.scenario.name, out_dir.string());
    const RunOutput out = run_scenario(cfg, [&](const std::string& msg) { log.debug("{}", msg); });
    if (out.trajectory) {
        std::ostringstream csv;
        write_trajectory_csv(csv, *out.trajectory);
        write_text(out_dir / "trajectory.csv", csv.str());
    }
    for (const auto& t : out.tables) {
        std::ostringstream csv;
        write_table_csv(csv, t);
        write_text(out_dir / t.file, csv.str());
    }
    write_text(out_dir / "summary.json", summary_json(cfg, out).dump(2) + "\n");
    write_text(out_dir / "verdicts.json", verdicts_json(out).dump(2) + "\n");
    for (const auto& v : out.verdicts)
        log.info("{:<32} {}  value {}  ({})", v.check, v.pass ? "PASS" : "FAIL", exact(v.value), v.rule);
    if (out.aborted) log.warn("aborted at step {} (t = {})", out.aborted->step, exact(out.aborted->t));
    return out.passed();
}

struct Sweep {
    std::vector<std::string> keys;
    std::vector<std::vector<std::string>> values;

    // Cartesian product of the varied values, first key slowest.
    std::vector<std::vector<std::string>> assignments() const {
        std::vector<std::vector<std::string>> out{{}};
        for (std::size_t k = 0; k < keys.size(); ++k) {
            std::vector<std::vector<std::string>> next;
            for (const auto& partial : out)
                for (const auto& v : values[k]) {
                    auto a = partial;
                    a.push_back(keys[k] + "=" + v);
                    next.push_back(std::move(a));
                }
            out = std::move(next);
        }
        return out;
    }
};

Sweep parse_vary(const std::vector<std::string>& specs) {
    Sweep s;
    for (const auto& spec : specs) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos) throw ConfigError("--vary '" + spec + "' is not section.key=a,b,...");
        s.keys.push_back(spec.substr(0, eq));
        s.values.push_back(detail::split(spec.substr(eq + 1)));
        if (s.values.back().empty()) throw ConfigError("--vary '" + spec + "' has no values");
    }
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Landau-Pekar and dressed polaron dynamics: scenario runner"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> scenario;
    int verbosity = 0;
    std::vector<std::string> vary;
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());

    auto common = [&](CLI::App* sub) {
        sub->add_option("config", config_path, "configuration file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out,-o", out_dir, "output directory")->required();
        sub->add_option("--seed", seed, "override scenario.seed");
        sub->add_option("--scenario", scenario, "override scenario.name");
        sub->add_flag("-v,--verbose", verbosity, "more output; repeat for debug detail");
    };
    CLI::App* run = app.add_subcommand("run", "run one configuration");
    common(run);
    CLI::App* sweep = app.add_subcommand("sweep", "run a parameter grid concurrently");
    common(sweep);
    sweep->add_option("--vary", vary, "section.key=a,b,c; repeatable")->required();
    sweep->add_option("--jobs,-j", jobs, "concurrent runs")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_pass : exit_usage;
    }

    auto log = spdlog::stderr_color_mt("polaron");
    log->set_pattern("%^%l%$ %v");
    log->set_level(verbosity >= 2 ? spdlog::level::debug : verbosity == 1 ? spdlog::level::info : spdlog::level::warn);

    std::vector<std::string> overrides;
    if (seed) overrides.push_back("scenario.seed=" + std::to_string(*seed));
    if (scenario) overrides.push_back("scenario.name=" + *scenario);

    try {
        if (*run) {
            const RunConfig cfg = load_config(config_path, overrides);
            return run_one(cfg, out_dir, *log) ? exit_pass : exit_fail;
        }

        const Sweep plan = parse_vary(vary);
        const auto cases = plan.assignments();
        std::vector<RunConfig> configs;
        for (const auto& a : cases) {
            auto o = overrides;
            o.insert(o.end(), a.begin(), a.end());
            configs.push_back(load_config(config_path, o));
        }
        std::vector<int> status(configs.size(), exit_pass);
        std::atomic<std::size_t> next{0};
        std::mutex err_mutex;
        auto worker = [&] {
            for (std::size_t i = next++; i < configs.size(); i = next++) {
                try {
                    status[i] = run_one(configs[i], fs::path(out_dir) / ("run_" + std::to_string(i)), *log)
                                    ? exit_pass
                                    : exit_fail;
                } catch (const std::exception& e) {
                    const std::lock_guard lock(err_mutex);
                    log->error("run {}: {}", i, e.what());
                    status[i] = exit_usage;
                }
            }
        };
        std::vector<std::thread> pool;
        for (unsigned j = 0; j < std::min<std::size_t>(jobs, configs.size()); ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();

        Json index = Json::array();
        for (std::size_t i = 0; i < cases.size(); ++i)
            index.push_back({{"run", "run_" + std::to_string(i)},
                             {"overrides", cases[i]},
                             {"status", status[i] == exit_pass ? "pass" : status[i] == exit_fail ? "fail" : "error"}});
        fs::create_directories(out_dir);
        write_text(fs::path(out_dir) / "sweep.json", Json{{"format", summary_format}, {"runs", index}}.dump(2) + "\n");
        return *std::max_element(status.begin(), status.end());
    } catch (const ConfigError& e) {
        log->error("{}", e.what());
        std::cerr << "config error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        log->error("{}", e.what());
        return exit_usage;
    }
}

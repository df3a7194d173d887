// runner.hpp - scenario orchestration and bit-stable result emission
#pragma once

#include "polaron/config.hpp"
#include "polaron/dressing.hpp"
#include "polaron/picard.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <functional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

namespace polaron {

using Json = nlohmann::ordered_json;

inline constexpr const char* summary_format = "polaron-summary/1";
inline constexpr const char* trajectory_format = "polaron-trajectory/1";
inline constexpr const char* table_format = "polaron-table/1";

struct Verdict {
    std::string check;
    bool pass = false;
    double value = 0.0;
    std::string rule;
};

struct Table {
    std::string file;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct RunOutput {
    Json results = Json::object();
    std::vector<Verdict> verdicts;
    std::optional<Trajectory> trajectory;
    std::vector<Table> tables;
    std::optional<BlowUp> aborted;

    bool passed() const {
        return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
    }
};

using Progress = std::function<void(const std::string&)>;

// %.17g round-trips every double.
inline std::string exact(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline PhasePoint initial_state(const Grid& g, const ScenarioSettings& s, std::mt19937_64& rng) {
    PhasePoint z = PhasePoint::zero(g);
    if (s.u_profile == "gaussian") {
        const double c = 0.5 * g.length();
        const Vec3 center = s.u_center.value_or(Vec3{c, c, c});
        z.u = with_mass(g, gaussian_packet(g, center, s.u_width, s.u_momentum, 1.0), s.u_mass);
    } else if (s.u_profile == "random") {
        z.u = random_smooth(g, rng, s.random_width, std::sqrt(s.u_mass), 0.0).u;
    }
    if (s.alpha_profile == "gaussian") {
        z.alpha = phonon_gaussian(g, s.alpha_center, s.alpha_width, s.alpha_amplitude);
    } else if (s.alpha_profile == "shell") {
        z.alpha = phonon_shell(g, s.alpha_radius, s.alpha_width, s.alpha_amplitude);
    } else if (s.alpha_profile == "random") {
        z.alpha = random_smooth(g, rng, s.random_width, 0.0, s.alpha_amplitude).alpha;
    }
    return z;
}

namespace detail {

inline Json as_json(const std::vector<double>& v) {
    Json out = Json::array();
    for (double x : v) out.push_back(x);
    return out;
}

inline Json order_json(const OrderEstimate& e) {
    return {{"ratios", as_json(e.ratios)}, {"orders", as_json(e.orders)}, {"monotone", e.monotone}};
}

inline EvolutionConfig evolution_config(const EvolutionSettings& s, double dt) {
    return {dt, s.t_final, s.scheme, s.record_every, false};
}

inline void add(RunOutput& out, std::string check, bool pass, double value, std::string rule) {
    out.verdicts.push_back({std::move(check), pass, value, std::move(rule)});
}

inline Json strichartz_json(const Grid& g, const Trajectory& tr) {
    std::vector<double> times, l2;
    std::vector<std::array<double, 3>> norms;
    for (const auto& s : tr.samples) {
        times.push_back(s.t);
        l2.push_back(std::sqrt(s.row.mass));
        norms.push_back(s.row.lq);
    }
    const auto r = strichartz_report(g.dim(), times, norms, l2);
    if (!r) return nullptr;
    Json pairs = Json::array();
    for (int j = 0; j < 3; ++j)
        pairs.push_back({{"p", r->pairs[j].p}, {"q", r->pairs[j].q}, {"norm", r->norms[j]}});
    return {{"pairs", pairs}, {"sup_l2", r->sup_l2}, {"interpolation_residual", r->interpolation_residual}};
}

inline void run_trajectory(const RunConfig& c, const Grid& g, const FormFactors& ff, const PhasePoint& z0,
                           RunOutput& out) {
    const Trajectory tr = evolve(g, ff, z0, evolution_config(c.evolution, c.evolution.dt), c.evolution.flow);
    const double mass = relative_drift(tr.column([](const DiagnosticsRow& r) { return r.mass; }));
    const double energy = relative_drift(tr.column([](const DiagnosticsRow& r) { return r.energy.total; }));
    const double dressed = relative_drift(tr.column([](const DiagnosticsRow& r) { return r.dressed_energy.total; }));
    out.results["mass_drift"] = mass;
    out.results["energy_drift"] = energy;
    out.results["dressed_energy_drift"] = dressed;
    out.results["strichartz"] = strichartz_json(g, tr);
    add(out, "mass_drift", mass <= c.scenario.mass_tolerance, mass, "<= scenario.mass_tolerance");
    out.trajectory = tr;
}

inline void run_convergence(const RunConfig& c, const Grid& g, const FormFactors& ff, const PhasePoint& z0,
                            RunOutput& out, const Progress& progress) {
    for (Flow flow : {Flow::landau_pekar, Flow::dressed}) {
        const bool dressed = flow == Flow::dressed;
        std::vector<double> drifts;
        for (int j = 0; j < c.evolution.levels; ++j) {
            EvolutionConfig cfg = evolution_config(c.evolution, c.evolution.dt / (1 << j));
            cfg.record_every = 1;
            if (dressed) cfg.scheme = Scheme::rk4_gradient;
            const Trajectory tr = evolve(g, ff, z0, cfg, flow);
            drifts.push_back(relative_drift(tr.column([&](const DiagnosticsRow& r) {
                return dressed ? r.dressed_energy.total : r.energy.total;
            })));
            if (progress) progress(std::string(dressed ? "dressed" : "landau_pekar") + " level " + std::to_string(j) +
                                   " drift " + exact(drifts.back()));
            if (j == 0 && flow == c.evolution.flow) out.trajectory = tr;
        }
        const OrderEstimate e = convergence_order(drifts);
        const std::string name = dressed ? "dressed" : "landau_pekar";
        out.results[name] = {{"drifts", as_json(drifts)}, {"order", order_json(e)}};
        const double r = e.ratios.back();
        add(out, name + "_energy_drift_ratio", r >= 3.0 && r <= 5.0, r, "in [3, 5]");
    }
}

inline void run_conjugation(const RunConfig& c, const Grid& g, const FormFactors& ff, const PhasePoint& z0,
                            RunOutput& out, const Progress& progress) {
    std::vector<double> finals;
    Json curves = Json::array();
    Table table{"conjugation.csv", {"dt", "t", "distance"}, {}};
    for (int j = 0; j < c.evolution.levels; ++j) {
        const double dt = c.evolution.dt / (1 << j);
        const auto curve = verify_conjugation(g, ff, z0, evolution_config(c.evolution, dt));
        Json pts = Json::array();
        for (const auto& p : curve) {
            pts.push_back({p.t, p.distance});
            table.rows.push_back({dt, p.t, p.distance});
        }
        curves.push_back({{"dt", dt}, {"curve", pts}});
        finals.push_back(curve.back().distance);
        if (progress) progress("conjugation dt " + exact(dt) + " distance " + exact(finals.back()));
    }
    const OrderEstimate e = convergence_order(finals);
    out.results["curves"] = curves;
    out.results["final_distances"] = as_json(finals);
    out.results["order"] = order_json(e);
    add(out, "conjugation_order", e.last() >= 1.7 && e.last() <= 2.3, e.last(), "in [1.7, 2.3]");
    out.tables.push_back(std::move(table));
    out.trajectory = lp_evolve(g, ff, z0, evolution_config(c.evolution, c.evolution.dt));
}

inline void run_identity(const RunConfig& c, const Grid& g, const FormFactors& ff, std::mt19937_64& rng,
                         RunOutput& out) {
    double identity = 0.0, phase = 0.0, inverse = 0.0;
    const auto& s = c.scenario;
    for (int i = 0; i < s.samples; ++i) {
        const PhasePoint z = random_smooth(g, rng, s.random_width, std::sqrt(std::max(s.u_mass, 1e-300)),
                                           s.alpha_amplitude);
        identity = std::max(identity, dressed_identity_residual(g, ff, z));
        phase = std::max(phase, self_induced_phase_residual(g, ff, z.u));
        const PhasePoint back = dressing_apply(g, ff, dressing_apply(g, ff, z, -1.0), 1.0);
        inverse = std::max(inverse, distance(g, back, z) / (1.0 + norm(g, z)));
    }
    out.results["samples"] = s.samples;
    out.results["dressed_identity_residual"] = identity;
    out.results["self_induced_phase_residual"] = phase;
    out.results["inverse_residual"] = inverse;
    add(out, "dressed_identity", identity < 1e-9, identity, "< 1e-9");
    add(out, "self_induced_phase", phase < 1e-10, phase, "< 1e-10");
    add(out, "dressing_inverse", inverse < 1e-10, inverse, "< 1e-10");
}

// Longest run of ratios at or below the bound.
inline int contracting_run(const std::vector<double>& ratios, double bound) {
    int best = 0, cur = 0;
    for (double r : ratios) {
        cur = r <= bound ? cur + 1 : 0;
        best = std::max(best, cur);
    }
    return best;
}

inline void run_picard(const RunConfig& c, const Grid& g, const FormFactors& ff, const PhasePoint& z0,
                       RunOutput& out, const Progress& progress) {
    const double horizon = contracting_horizon(g, ff, z0, c.evolution.t_final, c.evolution.dt);
    if (progress) progress("contracting horizon " + exact(horizon));
    const PicardResult r = picard_solve(g, ff, z0, horizon, c.evolution.dt);
    const auto steps = static_cast<std::int64_t>(r.path.nodes.size()) - 1;
    const PhasePoint strang = propagate(g, ff, z0, r.path.step, steps, Flow::landau_pekar, Scheme::strang_split);
    const double gap = distance(g, strang, r.path.nodes.back());
    const int run = contracting_run(r.ratios, 0.5);
    out.results["horizon"] = horizon;
    out.results["step"] = r.path.step;
    out.results["iterations"] = r.iterations;
    out.results["converged"] = r.converged;
    out.results["differences"] = as_json(r.differences);
    out.results["ratios"] = as_json(r.ratios);
    out.results["strang_endpoint_distance"] = gap;
    add(out, "picard_converged", r.converged, r.iterations, "converged");
    add(out, "picard_contracting_run", run >= 5, run, ">= 5 successive ratios <= 0.5");
    add(out, "picard_matches_strang", gap < 1e-6, gap, "< 1e-6");
}

inline void run_correspondence(const RunConfig& c, RunOutput& out) {
    std::vector<double> eps = c.fock.eps_list;
    std::sort(eps.begin(), eps.end(), std::greater<>());
    const auto table = fock::correspondence_experiment(c.fock.model, eps, c.fock.amplitudes, c.fock.times,
                                                       c.fock.classical_dt);
    Json rows = Json::array();
    Table csv{"correspondence.csv", {"eps", "t", "error"}, {}};
    std::vector<double> last;
    for (const auto& row : table) {
        rows.push_back({{"eps", row.eps}, {"times", as_json(row.times)}, {"errors", as_json(row.errors)}});
        for (std::size_t i = 0; i < row.times.size(); ++i) csv.rows.push_back({row.eps, row.times[i], row.errors[i]});
        last.push_back(row.errors.empty() ? 0.0 : row.errors.back());
    }
    bool monotone = true;
    for (std::size_t i = 1; i < last.size(); ++i) monotone = monotone && last[i] <= 1.1 * last[i - 1];
    out.results["table"] = rows;
    add(out, "correspondence_monotone", monotone, last.empty() ? 0.0 : last.back(),
        "final-time error decreases with eps, 10% slack");
    out.tables.push_back(std::move(csv));
}

inline void run_dressed_operator(const RunConfig& c, RunOutput& out) {
    const fock::DressedOperatorReport r = fock::dressed_operator_check(c.fock.model);
    out.results["max_difference"] = r.max_difference;
    out.results["dressing_size"] = r.dressing_size;
    out.results["unitarity_defect"] = r.max_unitarity_defect;
    out.results["blocks"] = r.blocks;
    out.results["largest_block"] = r.largest_block;
    add(out, "conjugated_hamiltonian", r.max_difference < 1e-6, r.max_difference, "< 1e-6");
}

inline void run_form_bound(const RunConfig& c, RunOutput& out) {
    const fock::FormBoundReport r = fock::form_bound_check(c.fock.model, c.fock.sector, c.scenario.samples, c.fock.slope,
                                                c.scenario.seed);
    out.results["slope"] = r.a;
    out.results["constant"] = r.c;
    out.results["worst_ratio"] = r.worst_ratio;
    out.results["samples"] = r.samples;
    add(out, "form_bound", std::isfinite(r.c) && r.worst_ratio <= r.a + 1e-12 && r.a <= 0.9, r.c,
        "slope <= 0.9 with finite constant");
}

}  // namespace detail

inline RunOutput run_scenario(const RunConfig& c, const Progress& progress = {}) {
    RunOutput out;
    const std::string& name = c.scenario.name;
    if (name == "correspondence") {
        detail::run_correspondence(c, out);
        return out;
    }
    if (name == "dressed_operator") {
        detail::run_dressed_operator(c, out);
        return out;
    }
    if (name == "form_bound") {
        detail::run_form_bound(c, out);
        return out;
    }
    const Grid g(c.grid.dim, c.grid.points, c.grid.length);
    const FormFactors ff = build_form_factors(g, c.form_factors.ir, c.form_factors.uv);
    std::mt19937_64 rng(c.scenario.seed);
    try {
        if (name == "identity") {
            detail::run_identity(c, g, ff, rng, out);
            return out;
        }
        const PhasePoint z0 = initial_state(g, c.scenario, rng);
        out.results["initial"] = {{"mass", z0.u.abs2().sum() * g.dx()},
                                  {"energy", h_undressed(g, ff, z0).total},
                                  {"dressed_energy", h_dressed(g, ff, z0).total}};
        if (name == "trajectory") detail::run_trajectory(c, g, ff, z0, out);
        else if (name == "convergence") detail::run_convergence(c, g, ff, z0, out, progress);
        else if (name == "conjugation") detail::run_conjugation(c, g, ff, z0, out, progress);
        else if (name == "picard") detail::run_picard(c, g, ff, z0, out, progress);
    } catch (const BlowUp& e) {
        out.aborted = e;
        detail::add(out, "no_blowup", false, e.t, "field stays finite and bounded");
    } catch (const NonContraction& e) {
        detail::add(out, "picard_contracting_run", false, e.ratio, "Duhamel iteration contracts");
    }
    return out;
}

inline Json summary_json(const RunConfig& c, const RunOutput& out) {
    Json cfg = Json::object();
    for (const auto& [name, value] : c.entries) {
        const auto dot = name.find('.');
        cfg[name.substr(0, dot)][name.substr(dot + 1)] = value;
    }
    Json verdicts = Json::array();
    for (const auto& v : out.verdicts)
        verdicts.push_back({{"check", v.check}, {"pass", v.pass}, {"value", v.value}, {"rule", v.rule}});
    Json s = {{"format", summary_format}, {"scenario", c.scenario.name}, {"config", cfg}, {"results", out.results}};
    if (out.aborted)
        s["aborted"] = {{"step", out.aborted->step}, {"t", out.aborted->t}, {"message", out.aborted->what()}};
    s["verdicts"] = verdicts;
    s["status"] = out.passed() ? "pass" : "fail";
    return s;
}

inline Json verdicts_json(const RunOutput& out) {
    Json v = Json::object();
    for (const auto& x : out.verdicts) v[x.check] = x.pass;
    return {{"format", summary_format}, {"status", out.passed() ? "pass" : "fail"}, {"checks", v}};
}

inline const std::vector<std::string>& trajectory_columns() {
    static const std::vector<std::string> cols{
        "t", "mass", "energy", "kinetic", "phonon", "coupling", "dressed_energy", "ir_coupling", "pair",
        "field_square", "drift", "h1_norm", "max_abs_u", "lq_1", "lq_2", "lq_3"};
    return cols;
}

inline void write_row(std::ostream& os, const std::vector<double>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << exact(row[i]);
    os << '\n';
}

inline void write_header(std::ostream& os, const char* format, const std::vector<std::string>& cols) {
    os << "# " << format << '\n';
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << '\n';
}

inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
    write_header(os, trajectory_format, trajectory_columns());
    for (const auto& s : tr.samples) {
        const auto& r = s.row;
        write_row(os, {s.t, r.mass, r.energy.total, r.energy.kinetic, r.energy.phonon,
                       r.energy.value(term::coupling), r.dressed_energy.total,
                       r.dressed_energy.value(term::ir_coupling), r.dressed_energy.value(term::pair),
                       r.dressed_energy.value(term::field_square), r.dressed_energy.value(term::drift), r.h1_norm,
                       r.max_abs_u, r.lq[0], r.lq[1], r.lq[2]});
    }
}

inline void write_table_csv(std::ostream& os, const Table& t) {
    write_header(os, table_format, t.columns);
    for (const auto& r : t.rows) write_row(os, r);
}

}  // namespace polaron

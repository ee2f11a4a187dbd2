// Copyright 2026 The dcs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Configuration, dispatch and serialization for the `dcs` command-line tool.
// Every command writes <out>/<command>.json holding its summary, the fully
// resolved configuration and the list of CSV files written next to it.

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dcs/cluster.hpp"
#include "dcs/errors.hpp"
#include "dcs/experiments.hpp"
#include "dcs/lindblad.hpp"
#include "dcs/meanfield.hpp"
#include "dcs/observables.hpp"
#include "dcs/solver.hpp"
#include "json.hpp"

namespace dcs::cli {

using json = nlohmann::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNumerical = 2;

inline const std::vector<std::string> &commands() {
    static const std::vector<std::string> names{"cluster", "steady",  "spectrum", "evolve",
                                                "meanfield", "sweep", "scaling"};
    return names;
}

struct RunConfig {
    std::string command;
    std::string graph = "chain:4";
    double h_g = 1.0;
    double gamma_g = 1.0;
    double g_sign = 1.0;
    std::string jumps = "projection";
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    int jobs = 1;
    // evolve and meanfield
    double t_final = 20.0;
    double dt = 0.0;  // 0 selects the integrator default
    std::string method = "rk4";
    std::string init = "plus";
    int samples = 200;
    std::vector<double> s0;  // empty: perturb every fixed-point branch
    // sweep and scaling
    double gamma_min = 0.1;
    double gamma_max = 1000.0;
    int points_per_decade = 31;
    std::vector<double> gammas;  // explicit grid, overrides the log grid
    bool compute_gap = true;
    std::vector<int> n_values{2, 3, 4};
    double epsilon = 1e-3;
    double eta = kWitnessEta;
    std::string gamma_policy = "common";
    double weak_gamma = 1.0;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(RunConfig, command, graph, h_g, gamma_g, g_sign,
                                                jumps, out_dir, seed, jobs, t_final, dt, method,
                                                init, samples, s0, gamma_min, gamma_max,
                                                points_per_decade, gammas, compute_gap, n_values,
                                                epsilon, eta, gamma_policy, weak_gamma)

inline bool is_dense_command(const std::string &c) {
    return c == "steady" || c == "spectrum" || c == "evolve" || c == "sweep";
}

/// Throws InvalidArgument on the first inconsistency.
inline void validate(const RunConfig &c) {
    const auto &names = commands();
    if (std::find(names.begin(), names.end(), c.command) == names.end()) {
        throw InvalidArgument("unknown or missing command '" + c.command + "'");
    }
    const GraphSpec g = graph_from_preset(c.graph);
    if (is_dense_command(c.command)) require_dense_size(g.n_qubits());
    jump_kind_from_string(c.jumps);
    if (!std::isfinite(c.h_g)) throw InvalidArgument("h_g must be finite");
    if (!(c.gamma_g >= 0.0) || !std::isfinite(c.gamma_g)) throw InvalidArgument("gamma_g must be finite and >= 0");
    if (c.g_sign != 1.0 && c.g_sign != -1.0) throw InvalidArgument("g_sign must be +1 or -1");
    if (c.jobs < 1) throw InvalidArgument("jobs must be >= 1");
    if (!(c.t_final > 0.0)) throw InvalidArgument("t_final must be > 0");
    if (!(c.dt >= 0.0)) throw InvalidArgument("dt must be >= 0 (0 selects the default)");
    if (c.method != "rk4" && c.method != "expm") throw InvalidArgument("method must be rk4 or expm");
    if (c.init != "plus" && c.init != "zero" && c.init != "random") {
        throw InvalidArgument("init must be plus, zero or random");
    }
    if (c.samples < 1) throw InvalidArgument("samples must be >= 1");
    if (!c.s0.empty() && c.s0.size() != 3) throw InvalidArgument("s0 needs exactly three values jx,jy,jz");
    if (!(c.gamma_min > 0.0) || !(c.gamma_max >= c.gamma_min)) {
        throw InvalidArgument("need 0 < gamma_min <= gamma_max");
    }
    if (c.points_per_decade < 1) throw InvalidArgument("points_per_decade must be >= 1");
    if (!(c.epsilon > 0.0) || !(c.epsilon < 1.0)) throw InvalidArgument("epsilon must lie in (0, 1)");
    if (!std::isfinite(c.eta)) throw InvalidArgument("eta must be finite");
    gap_policy_from_string(c.gamma_policy);
    if (!(c.weak_gamma > 0.0)) throw InvalidArgument("weak_gamma must be > 0");
    if (c.command == "scaling") {
        if (c.n_values.size() < 2) throw InvalidArgument("scaling needs at least two n_values");
        for (int n : c.n_values) {
            if (n < 2) throw InvalidArgument("n_values must be >= 2");
            require_dense_size(n);
        }
    }
}

/// Reads a JSON config file. Unknown keys are rejected so typos do not pass silently.
inline RunConfig load_config_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open config file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error &e) {
        throw InvalidArgument("config file '" + path + "' is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw InvalidArgument("config file must hold a JSON object");
    const json known = RunConfig{};
    for (const auto &item : j.items()) {
        if (!known.contains(item.key())) throw InvalidArgument("unknown config key '" + item.key() + "'");
    }
    try {
        return j.get<RunConfig>();
    } catch (const json::exception &e) {
        throw InvalidArgument("config file '" + path + "': " + e.what());
    }
}

struct ParseOutcome {
    RunConfig config;
    bool exit_now = false;  // help was requested or parsing failed
    int exit_code = kExitOk;
};

/// Flags override values from --config, which override built-in defaults.
/// The output directory defaults to $DCS_OUT_DIR when set.
inline ParseOutcome parse_args(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Dissipative preparation of cluster states", "dcs"};
    app.option_defaults()->always_capture_default();
    RunConfig flags;
    std::vector<std::pair<CLI::Option *, std::function<void(RunConfig &)>>> bound;
    auto bind = [&](const std::string &name, auto RunConfig::*field, const std::string &help) {
        CLI::Option *opt = app.add_option(name, flags.*field, help);
        bound.emplace_back(opt, [&flags, field](RunConfig &dst) { dst.*field = flags.*field; });
        return opt;
    };

    bind("command", &RunConfig::command, "one of cluster, steady, spectrum, evolve, meanfield, sweep, scaling");
    std::string config_path;
    app.add_option("--config", config_path, "JSON config file; flags override its values");
    bind("--graph", &RunConfig::graph, "graph preset: chain:N or square:RxC");
    bind("--h-g", &RunConfig::h_g, "transverse field over coupling, h/|g|");
    bind("--gamma-g", &RunConfig::gamma_g, "dissipation over coupling, gamma/|g|");
    bind("--g-sign", &RunConfig::g_sign, "sign of the ZZ coupling (+1 or -1)");
    bind("--jumps", &RunConfig::jumps, "jump operators: projection or stabilizer");
    bind("--out", &RunConfig::out_dir, "output directory");
    bind("--seed", &RunConfig::seed, "seed for randomized initial states");
    bind("--jobs", &RunConfig::jobs, "worker threads for sweeps");
    bind("--t-final", &RunConfig::t_final, "final time for evolve and meanfield");
    bind("--dt", &RunConfig::dt, "integrator step (0 selects the default)");
    bind("--method", &RunConfig::method, "evolve propagator: rk4 or expm");
    bind("--init", &RunConfig::init, "evolve initial state: plus, zero or random");
    bind("--samples", &RunConfig::samples, "number of output intervals for evolve");
    bind("--s0", &RunConfig::s0, "mean-field initial state jx,jy,jz")->delimiter(',')->expected(3);
    bind("--gamma-min", &RunConfig::gamma_min, "log grid lower end");
    bind("--gamma-max", &RunConfig::gamma_max, "log grid upper end");
    bind("--points-per-decade", &RunConfig::points_per_decade, "log grid density");
    bind("--gammas", &RunConfig::gammas, "explicit gamma_g grid, comma separated")->delimiter(',');
    bind("--n-values", &RunConfig::n_values, "chain lengths for scaling, comma separated")->delimiter(',');
    bind("--epsilon", &RunConfig::epsilon, "saturation tolerance");
    bind("--eta", &RunConfig::eta, "witness offset");
    bind("--gamma-policy", &RunConfig::gamma_policy, "strong-gap gamma: common or per_n");
    bind("--weak-gamma", &RunConfig::weak_gamma, "gamma_g for the weak-dissipation gap");
    bool no_gap = false;
    CLI::Option *no_gap_opt = app.add_flag("--no-gap", no_gap, "skip the eigendecomposition (steady, sweep)");

    ParseOutcome outcome;
    std::vector<const char *> argv{"dcs"};
    for (const auto &a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError &e) {
        outcome.exit_now = true;
        outcome.exit_code = app.exit(e, out, err) == 0 ? kExitOk : kExitConfig;
        return outcome;
    }

    RunConfig cfg;
    if (const char *env = std::getenv("DCS_OUT_DIR"); env != nullptr && *env != '\0') cfg.out_dir = env;
    if (!config_path.empty()) cfg = load_config_file(config_path);
    for (auto &[opt, apply_flag] : bound) {
        if (opt->count() > 0) apply_flag(cfg);
    }
    if (no_gap_opt->count() > 0) cfg.compute_gap = !no_gap;
    outcome.config = cfg;
    return outcome;
}

namespace detail {

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string csv_field(const std::string &s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"') q += '"';
        q += ch;
    }
    return q + "\"";
}

/// Comma separated, "." decimal, LF line endings, header row first.
class CsvWriter {
   public:
    CsvWriter(const std::filesystem::path &path, const std::vector<std::string> &header)
        : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
        if (!out_) throw InvalidArgument("cannot write '" + path.string() + "'");
        row(header);
    }

    void row(const std::vector<std::string> &fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i > 0) out_ << ',';
            out_ << csv_field(fields[i]);
        }
        out_ << '\n';
    }

    const std::filesystem::path &path() const { return path_; }

   private:
    std::filesystem::path path_;
    std::ofstream out_;
};

inline std::string bits(std::size_t index, int n) {
    std::string s(static_cast<std::size_t>(n), '0');
    for (int k = 0; k < n; ++k) {
        if ((index >> (n - 1 - k)) & 1U) s[static_cast<std::size_t>(k)] = '1';
    }
    return s;
}

inline json amplitudes(const StateVector &v, int n) {
    json list = json::array();
    for (Eigen::Index x = 0; x < v.size(); ++x) {
        if (std::abs(v(x)) > 1e-12) {
            list.push_back({{"index", x},
                            {"bits", bits(static_cast<std::size_t>(x), n)},
                            {"re", v(x).real() + 0.0},
                            {"im", v(x).imag() + 0.0}});
        }
    }
    return list;
}

inline json spins(const SpinTriple &s) { return {{"jx", s.jx}, {"jy", s.jy}, {"jz", s.jz}}; }

inline json fit_json(const FitResult &f) {
    return {{"model", to_string(f.model)}, {"coefficients", f.coefficients}, {"r_squared", f.r_squared}};
}

inline bool is_chain(const GraphSpec &g) { return g.edges() == GraphSpec::chain(g.n_qubits()).edges(); }

inline Superoperator build_liouvillian(const RunConfig &c, const GraphSpec &g) {
    const ModelParams p = ModelParams::dimensionless(c.h_g, c.gamma_g, c.g_sign);
    return liouvillian(hamiltonian(g, p), make_jumps(g, jump_kind_from_string(c.jumps)), p.gamma);
}

inline StateVector initial_state(const RunConfig &c, int n) {
    if (c.init == "plus") return plus_state(n);
    if (c.init == "zero") return basis_state(n, 0);
    std::mt19937_64 rng(c.seed);
    std::normal_distribution<double> normal;
    StateVector v(static_cast<Eigen::Index>(hilbert_dim(n)));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cplx(normal(rng), normal(rng));
    return normalize(std::move(v));
}

}  // namespace detail

inline json cmd_cluster(const RunConfig &c, const std::filesystem::path &) {
    const GraphSpec g = graph_from_preset(c.graph);
    const int n = g.n_qubits();
    const StateVector state = cluster_state(g);
    json s;
    s["n_qubits"] = n;
    s["edges"] = g.edges();
    s["amplitudes"] = detail::amplitudes(state, n);
    if (detail::is_chain(g) && n >= 2) {
        // Local Hadamards on both ends give the sparse form of a chain.
        s["amplitudes_hadamard_ends"] = detail::amplitudes(apply_hadamard(apply_hadamard(state, 0), n - 1), n);
    }
    json checks = json::array();
    for (const auto &st : stabilizers(g)) {
        const StateVector sv = pauli_to_dense(st) * state;
        checks.push_back({{"stabilizer", st.str()},
                          {"expectation", state.dot(sv).real()},
                          {"eigen_residual", (sv - state).cwiseAbs().maxCoeff()}});
    }
    s["stabilizers"] = checks;
    return s;
}

inline json cmd_steady(const RunConfig &c, const std::filesystem::path &) {
    const GraphSpec g = graph_from_preset(c.graph);
    const Superoperator l = detail::build_liouvillian(c, g);
    const StateVector target = cluster_state(g);
    json s;
    DensityMatrix rho;
    if (c.compute_gap) {
        const SpectrumResult spectrum = full_spectrum(l);
        rho = spectrum.steady_state;
        s["gap"] = spectrum.gap;
        s["kernel_dim"] = spectrum.kernel_dim;
        s["kernel_tol"] = spectrum.kernel_tol;
        s["lambda0"] = {spectrum.lambda0.real(), spectrum.lambda0.imag()};
    } else {
        rho = steady_state(l);
        s["gap"] = nullptr;
    }
    const DensityCheck check = check_density_matrix(rho);
    s["fidelity"] = fidelity(rho, target);
    s["witness"] = witness_expectation(rho, target, c.eta);
    s["residual"] = steady_state_residual(l, rho);
    s["min_eigenvalue"] = check.min_eigenvalue;
    s["spins"] = detail::spins(spin_expectations(rho));
    return s;
}

inline json cmd_spectrum(const RunConfig &c, const std::filesystem::path &dir) {
    const GraphSpec g = graph_from_preset(c.graph);
    const std::vector<cplx> values = liouvillian_eigenvalues(detail::build_liouvillian(c, g));
    detail::CsvWriter csv(dir / "spectrum.csv", {"re", "im"});
    for (const cplx &v : values) csv.row({detail::format_double(v.real()), detail::format_double(v.imag())});
    const double tol = kernel_tolerance(values);
    json s;
    s["count"] = values.size();
    s["kernel_tol"] = tol;
    s["kernel_dim"] = std::count_if(values.begin(), values.end(), [&](cplx v) { return std::abs(v) <= tol; });
    s["gap"] = gap_from_sorted(values, tol);
    s["outputs"] = {csv.path().filename().string()};
    return s;
}

inline json cmd_evolve(const RunConfig &c, const std::filesystem::path &dir) {
    const GraphSpec g = graph_from_preset(c.graph);
    const Superoperator l = detail::build_liouvillian(c, g);
    const StateVector target = cluster_state(g);
    const DensityMatrix rho0 = projector(detail::initial_state(c, g.n_qubits()));
    const double sample_dt = c.t_final / c.samples;

    Trajectory traj;
    json s;
    if (c.method == "rk4") {
        const double dt = c.dt > 0.0 ? c.dt : default_rk4_dt(c.gamma_g);
        const int every = std::max(1, static_cast<int>(std::llround(sample_dt / dt)));
        traj = evolve_rk4(rho0, l, c.t_final, dt, every);
        s["dt"] = dt;
    } else {
        const Propagator prop(l);
        const PropagatorInfo &info = prop.info();
        for (int k = 0; k <= c.samples; ++k) {
            const double t = (k == c.samples) ? c.t_final : k * sample_dt;
            traj.times.push_back(t);
            traj.states.push_back(prop.apply(rho0, t));
        }
        s["used_fallback"] = info.used_fallback;
        s["condition"] = info.condition;
    }
    detail::CsvWriter csv(dir / "trajectory.csv", {"t", "jx", "jy", "jz", "fidelity", "witness"});
    json last;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const SpinTriple sp = spin_expectations(traj.states[i]);
        const double f = fidelity(traj.states[i], target);
        const double w = witness_expectation(traj.states[i], target, c.eta);
        csv.row({detail::format_double(traj.times[i]), detail::format_double(sp.jx),
                 detail::format_double(sp.jy), detail::format_double(sp.jz), detail::format_double(f),
                 detail::format_double(w)});
        last = {{"t", traj.times[i]}, {"spins", detail::spins(sp)}, {"fidelity", f}, {"witness", w}};
    }
    s["final"] = last;
    s["outputs"] = {csv.path().filename().string()};
    return s;
}

inline json cmd_meanfield(const RunConfig &c, const std::filesystem::path &dir) {
    const ModelParams p = ModelParams::dimensionless(c.h_g, c.gamma_g, c.g_sign);
    const auto fps = fixed_points(p);
    const double dt = c.dt > 0.0 ? c.dt : default_meanfield_dt(c.h_g, c.gamma_g);

    detail::CsvWriter table(dir / "fixed_points.csv", {"label", "jx", "jy", "jz", "stability"});
    json fp_json = json::array();
    for (const auto &fp : fps) {
        table.row({to_string(fp.label), detail::format_double(fp.state.jx), detail::format_double(fp.state.jy),
                   detail::format_double(fp.state.jz), to_string(fp.stability)});
        fp_json.push_back({{"label", to_string(fp.label)},
                           {"state", {fp.state.jx, fp.state.jy, fp.state.jz}},
                           {"stability", to_string(fp.stability)}});
    }

    std::vector<std::pair<std::string, MeanFieldState>> starts;
    if (!c.s0.empty()) {
        starts.emplace_back("s0", MeanFieldState{c.s0[0], c.s0[1], c.s0[2]});
    } else {
        std::mt19937_64 rng(c.seed);
        std::uniform_real_distribution<double> kick(-0.01, 0.01);
        for (const auto &fp : fps) {
            MeanFieldState s0 = fp.state;
            s0.jx += kick(rng);
            s0.jy += kick(rng);
            s0.jz += kick(rng);
            starts.emplace_back(to_string(fp.label), s0);
        }
    }

    const auto steps = static_cast<long long>(std::ceil(c.t_final / dt - 1e-9));
    const int every = static_cast<int>(std::max<long long>(1, steps / c.samples));
    detail::CsvWriter csv(dir / "meanfield.csv", {"run", "t", "jx", "jy", "jz"});
    json runs = json::array();
    for (const auto &[name, s0] : starts) {
        const auto traj = mean_field_evolve(s0, p, c.t_final, dt, every);
        for (std::size_t i = 0; i < traj.times.size(); ++i) {
            const auto &st = traj.states[i];
            csv.row({name, detail::format_double(traj.times[i]), detail::format_double(st.jx),
                     detail::format_double(st.jy), detail::format_double(st.jz)});
        }
        const auto &fin = traj.states.back();
        runs.push_back({{"run", name}, {"s0", {s0.jx, s0.jy, s0.jz}}, {"final", {fin.jx, fin.jy, fin.jz}}});
    }
    json s;
    s["dt"] = dt;
    s["fixed_points"] = fp_json;
    s["runs"] = runs;
    s["outputs"] = {table.path().filename().string(), csv.path().filename().string()};
    return s;
}

inline json saturation_json(const SweepResult &sweep, double epsilon,
                            const std::function<double(double)> &refine = {}) {
    try {
        const auto sat = detect_gamma_sat(sweep, epsilon, refine);
        return {{"gamma_sat", sat.gamma_sat},
                {"f_sat", sat.fidelity},
                {"threshold", sat.threshold},
                {"max_fidelity", sat.max_fidelity},
                {"epsilon", sat.epsilon}};
    } catch (const std::exception &e) {
        return {{"error", e.what()}, {"epsilon", epsilon}};
    }
}

inline json cmd_sweep(const RunConfig &c, const std::filesystem::path &dir) {
    const GraphSpec g = graph_from_preset(c.graph);
    SweepOptions opts;
    opts.g_sign = c.g_sign;
    opts.jumps = jump_kind_from_string(c.jumps);
    opts.compute_gap = c.compute_gap;
    opts.eta = c.eta;
    opts.jobs = c.jobs;
    const auto grid = c.gammas.empty() ? log_grid(c.gamma_min, c.gamma_max, c.points_per_decade) : c.gammas;
    const SteadyStateModel model(g, c.h_g, opts);
    const SweepResult r = gamma_sweep(model, grid, opts);

    detail::CsvWriter csv(dir / "sweep.csv", {"gamma_g", "fidelity", "witness", "gap", "status"});
    std::size_t failures = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (!r.ok(i)) ++failures;
        csv.row({detail::format_double(r.axis_values[i]), detail::format_double(r.fidelity[i]),
                 detail::format_double(r.witness[i]), detail::format_double(r.gap[i]), r.status[i]});
    }
    json s;
    s["n_qubits"] = r.n_qubits;
    s["points"] = r.size();
    s["failures"] = failures;
    s["saturation"] = saturation_json(r, c.epsilon, [&model](double gamma) {
        return model.evaluate(gamma, false).fidelity;
    });
    s["outputs"] = {csv.path().filename().string()};
    return s;
}

inline json cmd_scaling(const RunConfig &c, const std::filesystem::path &dir) {
    ScalingOptions opts;
    opts.gamma_min = c.gamma_min;
    opts.gamma_max = c.gamma_max;
    opts.points_per_decade = c.points_per_decade;
    opts.epsilon = c.epsilon;
    opts.weak_gamma = c.weak_gamma;
    opts.g_sign = c.g_sign;
    opts.jobs = c.jobs;
    const ScalingResult r = size_scaling_study(c.n_values, c.h_g, c.gamma_policy, opts);

    detail::CsvWriter rows(dir / "scaling.csv",
                           {"n", "gamma_sat", "f_sat", "gap_weak", "gamma_strong", "gap_strong"});
    json row_json = json::array();
    for (const auto &row : r.rows) {
        rows.row({std::to_string(row.n_qubits), detail::format_double(row.gamma_sat),
                  detail::format_double(row.f_sat), detail::format_double(row.gap_weak),
                  detail::format_double(row.gamma_strong), detail::format_double(row.gap_strong)});
        row_json.push_back({{"n", row.n_qubits},
                            {"gamma_sat", row.gamma_sat},
                            {"f_sat", row.f_sat},
                            {"gap_weak", row.gap_weak},
                            {"gamma_strong", row.gamma_strong},
                            {"gap_strong", row.gap_strong}});
    }
    detail::CsvWriter sweeps(dir / "scaling_sweeps.csv", {"n", "gamma_g", "fidelity", "witness", "status"});
    for (const auto &sw : r.sweeps) {
        for (std::size_t i = 0; i < sw.size(); ++i) {
            sweeps.row({std::to_string(sw.n_qubits), detail::format_double(sw.axis_values[i]),
                        detail::format_double(sw.fidelity[i]), detail::format_double(sw.witness[i]), sw.status[i]});
        }
    }
    json s;
    s["rows"] = row_json;
    s["fits"] = {{"gamma_sat_linear", detail::fit_json(r.gamma_sat_fit)},
                 {"f_sat_offset_inverse", detail::fit_json(r.f_sat_fit)},
                 {"gap_weak_power_law", detail::fit_json(r.gap_weak_fit)},
                 {"gap_strong_power_law", detail::fit_json(r.gap_strong_fit)}};
    s["outputs"] = {rows.path().filename().string(), sweeps.path().filename().string()};
    return s;
}

/// Validates, runs one command, writes <out>/<command>.json and echoes it to `out`.
inline json execute(const RunConfig &c, std::ostream &out) {
    validate(c);
    const std::filesystem::path dir(c.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw InvalidArgument("cannot create output directory '" + c.out_dir + "'");
    }
    json s;
    if (c.command == "cluster") s = cmd_cluster(c, dir);
    if (c.command == "steady") s = cmd_steady(c, dir);
    if (c.command == "spectrum") s = cmd_spectrum(c, dir);
    if (c.command == "evolve") s = cmd_evolve(c, dir);
    if (c.command == "meanfield") s = cmd_meanfield(c, dir);
    if (c.command == "sweep") s = cmd_sweep(c, dir);
    if (c.command == "scaling") s = cmd_scaling(c, dir);

    json doc;
    doc["command"] = c.command;
    doc["summary"] = s;
    doc["config"] = c;
    const std::filesystem::path path = dir / (c.command + ".json");
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw InvalidArgument("cannot write '" + path.string() + "'");
    f << doc.dump(2) << '\n';
    out << doc.dump(2) << '\n';
    return doc;
}

/// Whole tool: parse, run, map failures to exit codes (1 config, 2 numerical).
inline int run(const std::vector<std::string> &args, std::ostream &out = std::cout,
               std::ostream &err = std::cerr) {
    try {
        const ParseOutcome parsed = parse_args(args, out, err);
        if (parsed.exit_now) return parsed.exit_code;
        execute(parsed.config, out);
        return kExitOk;
    } catch (const NumericalError &e) {
        err << "numerical error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const InvalidArgument &e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
}

}  // namespace dcs::cli

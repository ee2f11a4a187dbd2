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

// Dissipation sweeps, saturation detection, least-squares fits and the
// system-size scaling study built from them.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "dcs/cluster.hpp"
#include "dcs/errors.hpp"
#include "dcs/lindblad.hpp"
#include "dcs/observables.hpp"
#include "dcs/solver.hpp"

namespace dcs {

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. Each index is handled
/// exactly once; callers write results into slot i so ordering is by index
/// regardless of scheduling. fn must not throw.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn &&fn) {
    const auto workers = static_cast<std::size_t>(std::max(1, jobs));
    if (workers == 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(workers, n); ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) fn(i);
        });
    }
}

/// lo * 10^(k / points_per_decade) for k = 0 .. K, ending exactly at hi.
inline std::vector<double> log_grid(double lo, double hi, int points_per_decade) {
    if (!(lo > 0.0) || !(hi >= lo) || points_per_decade < 1) {
        throw InvalidArgument("log_grid: need 0 < lo <= hi and points_per_decade >= 1");
    }
    const double decades = std::log10(hi / lo);
    const auto k_max = static_cast<int>(std::llround(decades * points_per_decade));
    std::vector<double> grid;
    for (int k = 0; k <= k_max; ++k) {
        grid.push_back(lo * std::pow(10.0, static_cast<double>(k) / points_per_decade));
    }
    grid.back() = hi;
    if (k_max == 0) grid = {lo};
    return grid;
}

/// Rough memory for the dense superoperator work at N qubits (three 4^N x 4^N
/// complex matrices live at once during a sweep).
inline double dense_memory_gib(int n_qubits) {
    const double d2 = std::pow(4.0, n_qubits);
    return 3.0 * d2 * d2 * 16.0 / (1024.0 * 1024.0 * 1024.0);
}

inline constexpr int kMaxDenseQubits = 7;

inline void require_dense_size(int n_qubits) {
    if (n_qubits > kMaxDenseQubits) {
        throw InvalidArgument("N=" + std::to_string(n_qubits) + " exceeds the dense-solver guard (" +
                              std::to_string(kMaxDenseQubits) + "); it would need about " +
                              std::to_string(dense_memory_gib(n_qubits)) + " GiB");
    }
}

struct SweepOptions {
    double g_sign = 1.0;
    JumpKind jumps = JumpKind::kProjection;
    bool compute_gap = true;  // full eigendecomposition per point; off uses the LU steady state
    double eta = kWitnessEta;
    int jobs = 1;
};

struct SweepResult {
    std::string axis_name = "gamma_g";
    std::vector<double> axis_values;
    std::vector<double> fidelity;  // NaN where the point failed
    std::vector<double> witness;
    std::vector<double> gap;  // NaN when failed or not computed
    std::vector<std::string> status;  // "ok" or the failure reason
    int n_qubits = 0;
    ModelParams params;  // h and g used; gamma varies along the axis
    JumpKind jumps = JumpKind::kProjection;
    double eta = kWitnessEta;

    std::size_t size() const { return axis_values.size(); }
    bool ok(std::size_t i) const { return status[i] == "ok"; }
};

/// Fidelity / witness / gap of the steady state at a single dissipation strength.
struct SteadyPoint {
    double fidelity = 0.0;
    double witness = 0.0;
    double gap = std::numeric_limits<double>::quiet_NaN();
    double residual = 0.0;
    int kernel_dim = 0;
};

/// Evaluates steady states along the gamma axis for one graph and field. The
/// Hamiltonian and dissipator are assembled once.
class SteadyStateModel {
   public:
    SteadyStateModel(const GraphSpec &graph, double h_g, const SweepOptions &opts)
        : graph_(graph), opts_(opts), target_(cluster_state(graph)) {
        require_dense_size(graph.n_qubits());
        params_ = ModelParams::dimensionless(h_g, 0.0, opts.g_sign);
        parts_ = liouvillian_parts(hamiltonian(graph, params_), make_jumps(graph, opts.jumps));
    }

    SteadyPoint evaluate(double gamma_g, bool with_gap) const {
        const Superoperator l = parts_.assemble(gamma_g * std::abs(params_.g));
        SteadyPoint pt;
        DensityMatrix rho;
        if (with_gap) {
            const SpectrumResult spectrum = full_spectrum(l);
            rho = spectrum.steady_state;
            pt.gap = spectrum.gap;
            pt.kernel_dim = spectrum.kernel_dim;
            pt.residual = spectrum.residual;
        } else {
            rho = steady_state(l);
            pt.residual = steady_state_residual(l, rho);
        }
        pt.fidelity = fidelity(rho, target_);
        pt.witness = witness_expectation(rho, target_, opts_.eta);
        return pt;
    }

    double gap(double gamma_g) const {
        return liouvillian_gap(parts_.assemble(gamma_g * std::abs(params_.g)));
    }

    const ModelParams &params() const { return params_; }
    const StateVector &target() const { return target_; }
    const GraphSpec &graph() const { return graph_; }
    const SweepOptions &options() const { return opts_; }

   private:
    GraphSpec graph_;
    SweepOptions opts_;
    StateVector target_;
    ModelParams params_;
    LiouvillianParts parts_;
};

inline SweepResult gamma_sweep(const SteadyStateModel &model, const std::vector<double> &gammas,
                               const SweepOptions &opts = {}) {
    for (std::size_t i = 0; i < gammas.size(); ++i) {
        if (!(gammas[i] >= 0.0) || !std::isfinite(gammas[i])) {
            throw InvalidArgument("gamma_sweep: gammas must be finite and >= 0");
        }
        if (i > 0 && !(gammas[i] >= gammas[i - 1])) {
            throw InvalidArgument("gamma_sweep: gammas must be sorted ascending");
        }
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    SweepResult r;
    r.axis_values = gammas;
    r.fidelity.assign(gammas.size(), nan);
    r.witness.assign(gammas.size(), nan);
    r.gap.assign(gammas.size(), nan);
    r.status.assign(gammas.size(), "ok");
    r.n_qubits = model.graph().n_qubits();
    r.params = model.params();
    r.jumps = model.options().jumps;
    r.eta = model.options().eta;
    parallel_for(gammas.size(), opts.jobs, [&](std::size_t i) {
        try {
            const SteadyPoint pt = model.evaluate(gammas[i], opts.compute_gap);
            r.fidelity[i] = pt.fidelity;
            r.witness[i] = pt.witness;
            r.gap[i] = pt.gap;
        } catch (const std::exception &e) {
            r.status[i] = e.what();
        }
    });
    return r;
}

inline SweepResult gamma_sweep(const GraphSpec &graph, double h_g, const std::vector<double> &gammas,
                               const SweepOptions &opts = {}) {
    return gamma_sweep(SteadyStateModel(graph, h_g, opts), gammas, opts);
}

struct SaturationResult {
    double gamma_sat = 0.0;
    double fidelity = 0.0;   // at gamma_sat
    double threshold = 0.0;  // (1 - epsilon) * max fidelity
    double max_fidelity = 0.0;
    double epsilon = 0.0;
};

/// Smallest axis value whose fidelity reaches (1 - epsilon) of the sweep
/// maximum. At least two grid points must reach that threshold. If `refine` is given, one bisection step between the crossing grid
/// point and its left neighbour tightens the estimate (geometric midpoint when
/// both are positive).
inline SaturationResult detect_gamma_sat(const SweepResult &sweep, double epsilon = 1e-3,
                                         const std::function<double(double)> &refine = {}) {
    if (!(epsilon > 0.0) || !(epsilon < 1.0)) {
        throw InvalidArgument("detect_gamma_sat: epsilon must lie in (0, 1)");
    }
    std::vector<std::pair<double, double>> pts;  // (axis, fidelity) of valid points
    for (std::size_t i = 0; i < sweep.size(); ++i) {
        if (sweep.ok(i) && std::isfinite(sweep.fidelity[i])) {
            pts.emplace_back(sweep.axis_values[i], sweep.fidelity[i]);
        }
    }
    if (pts.empty()) {
        throw InvalidArgument("detect_gamma_sat: no valid fidelity values");
    }
    SaturationResult out;
    out.epsilon = epsilon;
    std::size_t imax = 0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (pts[i].second > pts[imax].second) imax = i;
    }
    out.max_fidelity = pts[imax].second;
    out.threshold = (1.0 - epsilon) * out.max_fidelity;

    std::size_t i = 0;
    while (pts[i].second < out.threshold) ++i;
    // No plateau: only the final grid point reaches the threshold, so the
    // curve is still climbing where the sweep stops.
    if (pts.size() >= 2 && i == pts.size() - 1) {
        throw NumericalError("sweep range too small: fidelity still rising at the last grid point");
    }
    out.gamma_sat = pts[i].first;
    out.fidelity = pts[i].second;
    if (i > 0 && refine) {
        const double lo = pts[i - 1].first;
        const double hi = pts[i].first;
        const double mid = (lo > 0.0) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
        const double f_mid = refine(mid);
        if (f_mid >= out.threshold) {
            out.gamma_sat = mid;
            out.fidelity = f_mid;
        }
    }
    return out;
}

enum class FitModel { kLinear, kPowerLaw, kOffsetInverse };

inline std::string to_string(FitModel m) {
    switch (m) {
        case FitModel::kLinear:
            return "linear";
        case FitModel::kPowerLaw:
            return "power_law";
        case FitModel::kOffsetInverse:
            return "offset_inverse";
    }
    return "unknown";
}

struct FitResult {
    FitModel model = FitModel::kLinear;
    std::vector<double> coefficients;
    double r_squared = 0.0;
};

namespace detail {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

// Points are sorted before accumulation so the result does not depend on input order.
inline LineFit least_squares_line(std::vector<double> x, std::vector<double> y) {
    if (x.size() != y.size()) throw InvalidArgument("fit: x and y lengths differ");
    if (x.size() < 2) throw InvalidArgument("fit: need at least 2 points");
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw InvalidArgument("fit: non-finite data");
        pts.emplace_back(x[i], y[i]);
    }
    std::sort(pts.begin(), pts.end());
    const auto n = static_cast<double>(pts.size());
    double mx = 0.0, my = 0.0;
    for (auto [a, b] : pts) {
        mx += a;
        my += b;
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (auto [a, b] : pts) {
        sxx += (a - mx) * (a - mx);
        sxy += (a - mx) * (b - my);
        syy += (b - my) * (b - my);
    }
    if (sxx <= 1e-300 * std::max(1.0, mx * mx)) {
        throw InvalidArgument("fit: degenerate x (all values equal)");
    }
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss_res = 0.0;
    for (auto [a, b] : pts) {
        const double r = b - (f.intercept + f.slope * a);
        ss_res += r * r;
    }
    f.r_squared = (syy > 0.0) ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    return f;
}

}  // namespace detail

/// y = slope * x + intercept; coefficients (slope, intercept).
inline FitResult fit_linear(const std::vector<double> &x, const std::vector<double> &y) {
    const auto f = detail::least_squares_line(x, y);
    return {FitModel::kLinear, {f.slope, f.intercept}, f.r_squared};
}

/// log10 y = beta log10 x + log10 A; coefficients (beta, log10 A).
inline FitResult fit_power_law(const std::vector<double> &x, const std::vector<double> &y) {
    if (x.size() != y.size()) throw InvalidArgument("fit_power_law: x and y lengths differ");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
            throw InvalidArgument("fit_power_law: data must be strictly positive");
        }
        lx.push_back(std::log10(x[i]));
        ly.push_back(std::log10(y[i]));
    }
    const auto f = detail::least_squares_line(lx, ly);
    return {FitModel::kPowerLaw, {f.slope, f.intercept}, f.r_squared};
}

/// f = F0 + c / n; coefficients (F0, c).
inline FitResult fit_offset_inverse(const std::vector<double> &n, const std::vector<double> &f) {
    if (n.size() != f.size()) throw InvalidArgument("fit_offset_inverse: lengths differ");
    if (n.size() < 2) throw InvalidArgument("fit_offset_inverse: need at least 2 points");
    std::vector<double> inv;
    for (double v : n) {
        if (!(v > 0.0)) throw InvalidArgument("fit_offset_inverse: n must be > 0");
        inv.push_back(1.0 / v);
    }
    const auto line = detail::least_squares_line(inv, f);
    return {FitModel::kOffsetInverse, {line.intercept, line.slope}, line.r_squared};
}

enum class GapPolicy {
    kCommon,  // strong-dissipation gap at one shared gamma = max_N gamma_sat(N)
    kPerN,    // strong-dissipation gap at each N's own gamma_sat
};

inline GapPolicy gap_policy_from_string(const std::string &s) {
    if (s == "common") return GapPolicy::kCommon;
    if (s == "per_n") return GapPolicy::kPerN;
    throw InvalidArgument("unknown gamma policy '" + s + "' (expected common or per_n)");
}

inline std::string to_string(GapPolicy p) { return p == GapPolicy::kCommon ? "common" : "per_n"; }

struct ScalingOptions {
    double gamma_min = 0.1;
    double gamma_max = 1000.0;
    int points_per_decade = 31;
    double epsilon = 1e-3;
    double weak_gamma = 1.0;
    double g_sign = 1.0;
    int jobs = 1;
};

struct ScalingRow {
    int n_qubits = 0;
    double gamma_sat = 0.0;
    double f_sat = 0.0;
    double gap_weak = 0.0;
    double gamma_strong = 0.0;
    double gap_strong = 0.0;
};

struct ScalingResult {
    std::vector<ScalingRow> rows;
    std::vector<SweepResult> sweeps;
    FitResult gamma_sat_fit;  // linear in N
    FitResult f_sat_fit;      // F0 + c / N
    FitResult gap_weak_fit;   // power law in N
    FitResult gap_strong_fit;
    GapPolicy policy = GapPolicy::kCommon;
    ScalingOptions options;
    double h_g = 1.0;
};

/// Saturation strength, saturated fidelity and weak/strong gaps versus chain length.
inline ScalingResult size_scaling_study(const std::vector<int> &n_values, double h_g,
                                        const std::string &gamma_policy,
                                        const ScalingOptions &opts = {}) {
    if (n_values.size() < 2) throw InvalidArgument("size_scaling_study: need at least two sizes");
    for (int n : n_values) {
        if (n < 2) throw InvalidArgument("size_scaling_study: sizes must be >= 2");
        require_dense_size(n);
    }
    ScalingResult out;
    out.policy = gap_policy_from_string(gamma_policy);
    out.options = opts;
    out.h_g = h_g;
    const auto grid = log_grid(opts.gamma_min, opts.gamma_max, opts.points_per_decade);

    SweepOptions sweep_opts;
    sweep_opts.g_sign = opts.g_sign;
    sweep_opts.compute_gap = false;
    sweep_opts.jobs = opts.jobs;

    for (int n : n_values) {
        const SteadyStateModel model(GraphSpec::chain(n), h_g, sweep_opts);
        out.sweeps.push_back(gamma_sweep(model, grid, sweep_opts));
        const auto sat = detect_gamma_sat(out.sweeps.back(), opts.epsilon,
                                          [&model](double g) { return model.evaluate(g, false).fidelity; });
        ScalingRow row;
        row.n_qubits = n;
        row.gamma_sat = sat.gamma_sat;
        row.f_sat = sat.fidelity;
        row.gap_weak = model.gap(opts.weak_gamma);
        if (out.policy == GapPolicy::kPerN) {
            row.gamma_strong = sat.gamma_sat;
            row.gap_strong = model.gap(sat.gamma_sat);
        }
        out.rows.push_back(row);
    }
    if (out.policy == GapPolicy::kCommon) {
        double common = 0.0;
        for (const auto &row : out.rows) common = std::max(common, row.gamma_sat);
        for (auto &row : out.rows) {
            const SteadyStateModel model(GraphSpec::chain(row.n_qubits), h_g, sweep_opts);
            row.gamma_strong = common;
            row.gap_strong = model.gap(common);
        }
    }
    std::vector<double> ns, gs, fs, gw, gst;
    for (const auto &row : out.rows) {
        ns.push_back(row.n_qubits);
        gs.push_back(row.gamma_sat);
        fs.push_back(row.f_sat);
        gw.push_back(row.gap_weak);
        gst.push_back(row.gap_strong);
    }
    out.gamma_sat_fit = fit_linear(ns, gs);
    out.f_sat_fit = fit_offset_inverse(ns, fs);
    out.gap_weak_fit = fit_power_law(ns, gw);
    out.gap_strong_fit = fit_power_law(ns, gst);
    return out;
}

}  // namespace dcs

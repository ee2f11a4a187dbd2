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

// Spectral analysis of a dense Liouvillian and time evolution of density
// matrices. Two propagators are provided: a fixed-step RK4 integrator and the
// exact exponential through the eigendecomposition; each is the other's check.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "dcs/errors.hpp"
#include "dcs/lindblad.hpp"
#include "dcs/linalg.hpp"
#include "dcs/operators.hpp"

namespace dcs {

using DensityMatrix = DenseOperator;

struct DensityCheck {
    double hermiticity = 0.0;  // max |rho - rho^dag|
    double trace_error = 0.0;  // |Tr rho - 1|
    double min_eigenvalue = 0.0;

    bool ok(double herm_tol = 1e-10, double trace_tol = 1e-10, double eig_tol = -1e-8) const {
        return hermiticity <= herm_tol && trace_error <= trace_tol && min_eigenvalue >= eig_tol;
    }
};

inline DensityCheck check_density_matrix(const DensityMatrix &rho) {
    DensityCheck c;
    c.hermiticity = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    c.trace_error = std::abs(rho.trace() - 1.0);
    const DenseOperator herm = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<DenseOperator> es(herm, Eigen::EigenvaluesOnly);
    c.min_eigenvalue = es.eigenvalues().minCoeff();
    return c;
}

/// Ordering used for every reported spectrum: descending Re, then descending |Im|.
/// Ties in |Im| put the positive imaginary part first so the order is total.
inline bool spectrum_before(cplx a, cplx b) {
    if (a.real() != b.real()) return a.real() > b.real();
    if (std::abs(a.imag()) != std::abs(b.imag())) return std::abs(a.imag()) > std::abs(b.imag());
    return a.imag() > b.imag();
}

inline void sort_spectrum(std::vector<cplx> &values) {
    std::stable_sort(values.begin(), values.end(), spectrum_before);
}

/// |lambda| <= 1e-8 * max(1, spectral radius) counts as zero.
inline double kernel_tolerance(const std::vector<cplx> &values) {
    double radius = 0.0;
    for (auto v : values) radius = std::max(radius, std::abs(v));
    return 1e-8 * std::max(1.0, radius);
}

/// Delta = |Re lambda_1| - |Re lambda_0| for a sorted spectrum, where lambda_1
/// is the first eigenvalue farther than `tol` from lambda_0.
inline double gap_from_sorted(const std::vector<cplx> &sorted, double tol) {
    if (sorted.empty()) {
        throw InvalidArgument("empty spectrum");
    }
    const cplx l0 = sorted.front();
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (std::abs(sorted[i] - l0) > tol) {
            return std::max(0.0, std::abs(sorted[i].real()) - std::abs(l0.real()));
        }
    }
    return 0.0;  // entire spectrum degenerate with lambda_0
}

struct SpectrumResult {
    std::vector<cplx> eigenvalues;  // sorted, see sort_spectrum
    DensityMatrix steady_state;
    double gap = 0.0;
    int kernel_dim = 0;
    double kernel_tol = 0.0;
    cplx lambda0{0.0, 0.0};
    double anti_hermitian_norm = 0.0;  // of the unit-trace kernel vector before projection
    double residual = 0.0;             // max |L vec(rho_s)|
};

/// Eigenvalues only, sorted. Cheaper than full_spectrum when no steady state
/// is needed (about 3x at 4^N = 4096).
inline std::vector<cplx> liouvillian_eigenvalues(const Superoperator &l) {
    const auto dec = linalg::eig(l, false);
    std::vector<cplx> values(dec.values.data(), dec.values.data() + dec.values.size());
    sort_spectrum(values);
    return values;
}

inline double liouvillian_gap(const SpectrumResult &spectrum) { return spectrum.gap; }

inline double liouvillian_gap(const Superoperator &l) {
    const auto values = liouvillian_eigenvalues(l);
    return gap_from_sorted(values, kernel_tolerance(values));
}

/// Dense eigendecomposition, steady state from the kernel, gap and kernel dimension.
inline SpectrumResult full_spectrum(const Superoperator &l) {
    const Eigen::Index d2 = l.rows();
    const int d = static_cast<int>(std::llround(std::sqrt(static_cast<double>(d2))));
    if (l.cols() != d2 || static_cast<Eigen::Index>(d) * d != d2) {
        throw InvalidArgument("full_spectrum: superoperator must be square with dimension d^2");
    }
    const auto dec = linalg::eig(l, true);

    SpectrumResult out;
    std::vector<Eigen::Index> order(static_cast<std::size_t>(d2));
    for (Eigen::Index i = 0; i < d2; ++i) order[static_cast<std::size_t>(i)] = i;
    out.eigenvalues.assign(dec.values.data(), dec.values.data() + d2);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return spectrum_before(dec.values(a), dec.values(b));
    });
    for (std::size_t i = 0; i < order.size(); ++i) {
        out.eigenvalues[i] = dec.values(order[i]);
    }
    out.kernel_tol = kernel_tolerance(out.eigenvalues);
    // Without dissipation purely imaginary eigenvalues tie with zero on Re, so
    // lambda_0 is the first kernel eigenvalue in sorted order, not the first overall.
    double closest = std::numeric_limits<double>::infinity();
    bool found = false;
    for (auto v : out.eigenvalues) {
        closest = std::min(closest, std::abs(v));
        if (std::abs(v) <= out.kernel_tol) {
            if (!found) out.lambda0 = v;
            found = true;
            ++out.kernel_dim;
        }
    }
    if (!found) {
        throw NumericalError("no steady state found (smallest |eigenvalue| " + std::to_string(closest) + ")");
    }
    out.gap = gap_from_sorted(out.eigenvalues, out.kernel_tol);

    // With a degenerate kernel, pick the kernel eigenvector with the largest trace.
    Eigen::Index best = -1;
    double best_trace = -1.0;
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (std::abs(out.eigenvalues[i]) > out.kernel_tol) continue;
        const auto col = dec.vectors.col(order[i]);
        cplx tr = 0.0;
        for (int k = 0; k < d; ++k) tr += col(static_cast<Eigen::Index>(k) * d + k);
        if (std::abs(tr) > best_trace) {
            best_trace = std::abs(tr);
            best = order[i];
        }
    }
    DenseOperator rho = unvec(dec.vectors.col(best));
    const cplx tr = rho.trace();
    if (std::abs(tr) <= 1e-12) {
        throw NumericalError("traceless kernel vector (kernel_dim=" +
                             std::to_string(out.kernel_dim) + ")");
    }
    rho /= tr;
    out.anti_hermitian_norm = (0.5 * (rho - rho.adjoint())).norm();
    out.steady_state = 0.5 * (rho + rho.adjoint());
    out.steady_state /= out.steady_state.trace();
    out.residual = (l * vec(out.steady_state)).cwiseAbs().maxCoeff();
    return out;
}

/// Steady state from the linear system L vec(rho) = 0 with one row replaced by
/// the trace condition. Requires a one-dimensional kernel; much cheaper than a
/// full eigendecomposition.
inline DensityMatrix steady_state(const Superoperator &l) {
    const Eigen::Index d2 = l.rows();
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(d2))));
    if (l.cols() != d2 || d * d != d2) {
        throw InvalidArgument("steady_state: superoperator must be square with dimension d^2");
    }
    Superoperator a = l;
    a.row(0).setZero();
    for (Eigen::Index k = 0; k < d; ++k) a(0, k * d + k) = 1.0;
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(d2);
    b(0) = 1.0;
    DenseOperator rho = unvec(linalg::solve(std::move(a), std::move(b)));
    rho = 0.5 * (rho + rho.adjoint());
    const cplx tr = rho.trace();
    if (std::abs(tr) <= 1e-12) {
        throw NumericalError("steady_state: traceless solution");
    }
    return rho / tr;
}

inline double steady_state_residual(const Superoperator &l, const DensityMatrix &rho) {
    return (l * vec(rho)).cwiseAbs().maxCoeff();
}

struct Trajectory {
    std::vector<double> times;
    std::vector<DensityMatrix> states;
};

/// Default RK4 step for a given gamma_g; the dissipative term sets the stiffness.
inline double default_rk4_dt(double gamma_g) { return 0.01 / std::max(1.0, gamma_g); }

/// Classical RK4 on vec(rho)' = L vec(rho). Samples t = 0, every `sample_every`
/// steps, and t_final. The last step is shortened to land on t_final exactly.
inline Trajectory evolve_rk4(const DensityMatrix &rho0, const Superoperator &l, double t_final,
                             double dt, int sample_every = 1) {
    if (!(dt > 0.0)) throw InvalidArgument("evolve_rk4: dt must be > 0");
    if (!(t_final >= 0.0)) throw InvalidArgument("evolve_rk4: t_final must be >= 0");
    if (sample_every < 1) throw InvalidArgument("evolve_rk4: sample_every must be >= 1");
    if (l.rows() != rho0.size()) throw InvalidArgument("evolve_rk4: dimension mismatch");

    const Eigen::Index d = rho0.rows();
    auto trace_of = [d](const Eigen::VectorXcd &v) {
        cplx tr = 0.0;
        for (Eigen::Index k = 0; k < d; ++k) tr += v(k * d + k);
        return tr;
    };

    Trajectory traj;
    Eigen::VectorXcd v = vec(rho0);
    const cplx tr0 = trace_of(v);
    traj.times.push_back(0.0);
    traj.states.push_back(rho0);

    const auto steps = static_cast<long long>(std::ceil(t_final / dt - 1e-9));
    Eigen::VectorXcd k1, k2, k3, k4;
    double t = 0.0;
    for (long long s = 1; s <= steps; ++s) {
        const double h = (s == steps) ? t_final - t : dt;
        k1.noalias() = l * v;
        k2.noalias() = l * (v + 0.5 * h * k1);
        k3.noalias() = l * (v + 0.5 * h * k2);
        k4.noalias() = l * (v + h * k3);
        v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t = (s == steps) ? t_final : static_cast<double>(s) * dt;
        if (std::abs(trace_of(v) - tr0) > 1e-6 || !v.allFinite()) {
            throw NumericalError("integration unstable, reduce dt (t=" + std::to_string(t) + ")");
        }
        if (s % sample_every == 0 || s == steps) {
            traj.times.push_back(t);
            traj.states.push_back(unvec(v));
        }
    }
    return traj;
}

struct PropagatorInfo {
    bool used_fallback = false;
    double condition = 0.0;  // 1-norm condition estimate of the eigenvector matrix
};

/// exp(L t) applied to vectorized density matrices. The eigendecomposition is
/// computed once; if the eigenvector matrix is ill-conditioned (L close to
/// defective) every call falls back to scaling-and-squaring on L t.
class Propagator {
   public:
    static constexpr double kConditionLimit = 1e12;

    explicit Propagator(const Superoperator &l) : l_(l) {
        const auto dec = linalg::eig(l, true);
        values_ = dec.values;
        vectors_ = dec.vectors;
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(vectors_);
        inverse_ = lu.inverse();
        const double norm_v = vectors_.cwiseAbs().colwise().sum().maxCoeff();
        const double norm_inv = inverse_.cwiseAbs().colwise().sum().maxCoeff();
        info_.condition = norm_v * norm_inv;
        if (!std::isfinite(info_.condition) || info_.condition > kConditionLimit) {
            info_.used_fallback = true;
            std::clog << "warning: Liouvillian eigenvectors ill-conditioned (cond ~ "
                      << info_.condition << "); using scaling-and-squaring\n";
        }
    }

    DensityMatrix apply(const DensityMatrix &rho0, double t) const {
        if (!(t >= 0.0)) throw InvalidArgument("evolve_expm: t must be >= 0");
        if (rho0.size() != l_.rows()) throw InvalidArgument("evolve_expm: dimension mismatch");
        if (t == 0.0) return rho0;
        const Eigen::VectorXcd v0 = vec(rho0);
        if (info_.used_fallback) {
            const Superoperator lt = l_ * t;
            const Superoperator e = lt.exp();
            return unvec(e * v0);
        }
        Eigen::VectorXcd coeff = inverse_ * v0;
        for (Eigen::Index i = 0; i < coeff.size(); ++i) coeff(i) *= std::exp(values_(i) * t);
        return unvec(vectors_ * coeff);
    }

    const PropagatorInfo &info() const { return info_; }

   private:
    Superoperator l_;
    Eigen::VectorXcd values_;
    Eigen::MatrixXcd vectors_;
    Eigen::MatrixXcd inverse_;
    PropagatorInfo info_;
};

inline DensityMatrix evolve_expm(const DensityMatrix &rho0, const Superoperator &l, double t,
                                 PropagatorInfo *info = nullptr) {
    if (!(t >= 0.0)) throw InvalidArgument("evolve_expm: t must be >= 0");
    if (t == 0.0) return rho0;
    Propagator prop(l);
    if (info) *info = prop.info();
    return prop.apply(rho0, t);
}

}  // namespace dcs

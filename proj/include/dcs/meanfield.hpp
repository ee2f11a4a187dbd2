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

// Mean-field dynamics of the site-averaged spin (Jx, Jy, Jz) for the
// dissipative Ising chain, and its closed-form fixed points:
//
//   Jx' = -4g Jy Jz - gamma Jx
//   Jy' =  4g Jx Jz - 2h Jz - gamma Jy
//   Jz' = -2h Jy    - gamma Jz
//
// Fixed-point branches (a = h/g, b = gamma/g):
//   s1 = (+-1, 0, 0)                                   gamma = 0
//   s2 = (a/2, 0, +-sqrt(1 - a^2/4))                   gamma = 0, |a| < 2
//   s3 = (0, 0, 0)                                     gamma > 0, stable iff gamma > 2|h|
//   s4 = sqrt(4a^2-b^2)/(8a) (sqrt(4a^2-b^2), +-b, -+2a)  gamma > 0, b^2 < 4a^2

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dcs/errors.hpp"
#include "dcs/lindblad.hpp"

namespace dcs {

struct MeanFieldState {
    double jx = 0.0;
    double jy = 0.0;
    double jz = 0.0;

    Eigen::Vector3d vector() const { return {jx, jy, jz}; }
    static MeanFieldState from(const Eigen::Vector3d &v) { return {v(0), v(1), v(2)}; }
};

inline MeanFieldState mean_field_rhs(const MeanFieldState &s, const ModelParams &p) {
    return {
        -4.0 * p.g * s.jy * s.jz - p.gamma * s.jx,
        4.0 * p.g * s.jx * s.jz - 2.0 * p.h * s.jz - p.gamma * s.jy,
        -2.0 * p.h * s.jy - p.gamma * s.jz,
    };
}

inline Eigen::Matrix3d mean_field_jacobian(const MeanFieldState &s, const ModelParams &p) {
    Eigen::Matrix3d j;
    j << -p.gamma, -4.0 * p.g * s.jz, -4.0 * p.g * s.jy,  //
        4.0 * p.g * s.jz, -p.gamma, 4.0 * p.g * s.jx - 2.0 * p.h,  //
        0.0, -2.0 * p.h, -p.gamma;
    return j;
}

enum class FixedPointLabel { kS1Plus, kS1Minus, kS2Plus, kS2Minus, kS3, kS4Plus, kS4Minus };

inline std::string to_string(FixedPointLabel l) {
    switch (l) {
        case FixedPointLabel::kS1Plus:
            return "s1_plus";
        case FixedPointLabel::kS1Minus:
            return "s1_minus";
        case FixedPointLabel::kS2Plus:
            return "s2_plus";
        case FixedPointLabel::kS2Minus:
            return "s2_minus";
        case FixedPointLabel::kS3:
            return "s3";
        case FixedPointLabel::kS4Plus:
            return "s4_plus";
        case FixedPointLabel::kS4Minus:
            return "s4_minus";
    }
    return "unknown";
}

enum class Stability { kStable, kUnstable, kMarginal };

inline std::string to_string(Stability s) {
    switch (s) {
        case Stability::kStable:
            return "stable";
        case Stability::kUnstable:
            return "unstable";
        case Stability::kMarginal:
            return "marginal";
    }
    return "unknown";
}

/// Linear stability from the Jacobian spectrum, with a +-1e-9 dead band on
/// the real parts reported as marginal.
inline Stability classify_stability(const MeanFieldState &s, const ModelParams &p) {
    constexpr double kBand = 1e-9;
    const Eigen::Vector3cd ev = mean_field_jacobian(s, p).eigenvalues();
    const double max_re = ev.real().maxCoeff();
    if (max_re < -kBand) return Stability::kStable;
    if (max_re > kBand) return Stability::kUnstable;
    return Stability::kMarginal;
}

struct FixedPoint {
    FixedPointLabel label;
    MeanFieldState state;
    Stability stability = Stability::kMarginal;

    bool stable() const { return stability == Stability::kStable; }
};

/// Closed-form fixed points applicable at p. The origin is an equilibrium for
/// every gamma > 0 and is always reported there, with its stability.
inline std::vector<FixedPoint> fixed_points(const ModelParams &p) {
    if (p.g == 0.0) {
        throw InvalidArgument("fixed_points: g must be nonzero");
    }
    p.validate();
    const double a = p.h / p.g;
    const double b = p.gamma / p.g;
    std::vector<FixedPoint> out;
    auto add = [&](FixedPointLabel label, MeanFieldState s) {
        out.push_back({label, s, classify_stability(s, p)});
    };
    if (p.gamma == 0.0) {
        add(FixedPointLabel::kS1Plus, {1.0, 0.0, 0.0});
        add(FixedPointLabel::kS1Minus, {-1.0, 0.0, 0.0});
        if (std::abs(a) < 2.0) {
            const double z = std::sqrt(1.0 - 0.25 * a * a);
            add(FixedPointLabel::kS2Plus, {0.5 * a, 0.0, z});
            add(FixedPointLabel::kS2Minus, {0.5 * a, 0.0, -z});
        }
        return out;
    }
    add(FixedPointLabel::kS3, {0.0, 0.0, 0.0});
    const double disc = 4.0 * a * a - b * b;
    if (a != 0.0 && disc > 0.0) {
        const double r = std::sqrt(disc);
        const double pre = r / (8.0 * a);
        add(FixedPointLabel::kS4Plus, {pre * r, pre * b, -pre * 2.0 * a});
        add(FixedPointLabel::kS4Minus, {pre * r, -pre * b, pre * 2.0 * a});
    }
    return out;
}

struct MeanFieldTrajectory {
    std::vector<double> times;
    std::vector<MeanFieldState> states;
};

inline double default_meanfield_dt(double h_g, double gamma_g) {
    return 0.005 / std::max({1.0, gamma_g, std::abs(h_g)});
}

/// RK4 integration of mean_field_rhs. Throws if |s| exceeds 10.
inline MeanFieldTrajectory mean_field_evolve(const MeanFieldState &s0, const ModelParams &p,
                                             double t_final, double dt, int sample_every = 1) {
    if (!(dt > 0.0)) throw InvalidArgument("mean_field_evolve: dt must be > 0");
    if (!(t_final >= 0.0)) throw InvalidArgument("mean_field_evolve: t_final must be >= 0");
    if (sample_every < 1) throw InvalidArgument("mean_field_evolve: sample_every must be >= 1");

    auto f = [&p](const Eigen::Vector3d &v) {
        return mean_field_rhs(MeanFieldState::from(v), p).vector();
    };
    MeanFieldTrajectory traj;
    Eigen::Vector3d v = s0.vector();
    traj.times.push_back(0.0);
    traj.states.push_back(s0);
    const auto steps = static_cast<long long>(std::ceil(t_final / dt - 1e-9));
    double t = 0.0;
    for (long long s = 1; s <= steps; ++s) {
        const double h = (s == steps) ? t_final - t : dt;
        const Eigen::Vector3d k1 = f(v);
        const Eigen::Vector3d k2 = f(v + 0.5 * h * k1);
        const Eigen::Vector3d k3 = f(v + 0.5 * h * k2);
        const Eigen::Vector3d k4 = f(v + h * k3);
        v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t = (s == steps) ? t_final : static_cast<double>(s) * dt;
        if (!v.allFinite() || v.norm() > 10.0) {
            throw NumericalError("mean-field blow-up at t=" + std::to_string(t));
        }
        if (s % sample_every == 0 || s == steps) {
            traj.times.push_back(t);
            traj.states.push_back(MeanFieldState::from(v));
        }
    }
    return traj;
}

}  // namespace dcs

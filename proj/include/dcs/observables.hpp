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

#pragma once

#include <cmath>
#include <string>

#include "dcs/errors.hpp"
#include "dcs/operators.hpp"
#include "dcs/solver.hpp"

namespace dcs {

/// Site-averaged Pauli expectations (1/N) sum_k <sigma^alpha_k>.
struct SpinTriple {
    double jx = 0.0;
    double jy = 0.0;
    double jz = 0.0;
};

/// Default witness offset: the largest overlap of a biseparable state with a
/// linear cluster state.
inline constexpr double kWitnessEta = 0.5;

inline void require_matching_dims(const DensityMatrix &rho, const StateVector &target) {
    if (rho.rows() != rho.cols() || rho.rows() != target.size()) {
        throw InvalidArgument("density matrix (" + std::to_string(rho.rows()) +
                              ") and target state (" + std::to_string(target.size()) +
                              ") dimensions differ");
    }
}

/// <C|rho|C> / Tr(rho). The trace is kept in the denominator so unnormalized
/// kernel vectors score correctly.
inline double fidelity(const DensityMatrix &rho, const StateVector &target) {
    require_matching_dims(rho, target);
    const cplx tr = rho.trace();
    if (std::abs(tr) <= 1e-12) {
        throw InvalidArgument("fidelity: density matrix has vanishing trace");
    }
    const cplx f = target.dot(rho * target) / tr;
    if (std::abs(f.imag()) > 1e-10) {
        throw NumericalError("fidelity: imaginary part " + std::to_string(f.imag()) +
                             " (density matrix not Hermitian?)");
    }
    return f.real();
}

/// Tr(W rho) with W = eta I - |C><C|; negative values certify multipartite
/// entanglement. The identity acts on the full 2^N space.
inline double witness_expectation(const DensityMatrix &rho, const StateVector &target,
                                  double eta = kWitnessEta) {
    require_matching_dims(rho, target);
    const cplx w = eta * rho.trace() - target.dot(rho * target);
    return w.real();
}

inline SpinTriple spin_expectations(const DensityMatrix &rho) {
    const int n = qubits_for_dim(static_cast<std::size_t>(rho.rows()));
    if (n < 1 || rho.rows() != rho.cols()) {
        throw InvalidArgument("spin_expectations: dimension is not 2^N");
    }
    // Diagonal and single-bit-flip elements are all that Pauli expectations need.
    double sx = 0.0, sy = 0.0, sz = 0.0;
    const auto dim = rho.rows();
    for (int k = 0; k < n; ++k) {
        const Eigen::Index bit = Eigen::Index{1} << (n - 1 - k);
        for (Eigen::Index x = 0; x < dim; ++x) {
            const bool one = (x & bit) != 0;
            sz += (one ? -1.0 : 1.0) * rho(x, x).real();
            // Tr(rho P) = sum_x rho(x, x^b) <x^b|P|x>; Y|0> = i|1>, Y|1> = -i|0>.
            const cplx off = rho(x, x ^ bit);
            sx += off.real();
            sy += (off * (one ? -kI : kI)).real();
        }
    }
    return {sx / n, sy / n, sz / n};
}

}  // namespace dcs

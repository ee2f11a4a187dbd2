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

// Ising Hamiltonian, engineered jump operators and the dense Liouvillian.
//
// Vectorization is column-stacking throughout: vec(A X B) = (B^T (x) A) vec(X).
// Because Eigen stores matrices column-major, vec() of a d x d matrix is just
// its storage reinterpreted as a d^2 vector.

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "dcs/cluster.hpp"
#include "dcs/errors.hpp"
#include "dcs/operators.hpp"

namespace dcs {

using Superoperator = Eigen::MatrixXcd;

/// H = g sum_{edges} Z_j Z_k + h sum_k X_k, dissipation rate gamma (all in
/// energy units).
struct ModelParams {
    double g = 1.0;
    double h = 1.0;
    double gamma = 0.0;

    /// Parameters with |g| = 1 so that h_g and gamma_g are the native knobs.
    /// `g_sign` only flips the sign of the ZZ coupling.
    static ModelParams dimensionless(double h_g, double gamma_g, double g_sign = 1.0) {
        ModelParams p{g_sign < 0 ? -1.0 : 1.0, h_g, gamma_g};
        p.validate();
        return p;
    }

    /// Ratios are taken against |g| so that gamma_g stays a non-negative rate.
    double h_g() const {
        require_coupling();
        return h / std::abs(g);
    }
    double gamma_g() const {
        require_coupling();
        return gamma / std::abs(g);
    }

    void validate() const {
        if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
            throw InvalidArgument("dissipation rate gamma must be finite and >= 0");
        }
        if (!std::isfinite(g) || !std::isfinite(h)) {
            throw InvalidArgument("g and h must be finite");
        }
    }

   private:
    void require_coupling() const {
        if (g == 0.0) {
            throw InvalidArgument("dimensionless ratios need g != 0");
        }
    }
};

inline DenseOperator hamiltonian(const GraphSpec &graph, const ModelParams &p) {
    const int n = graph.n_qubits();
    const auto dim = static_cast<Eigen::Index>(hilbert_dim(n));
    DenseOperator h = DenseOperator::Zero(dim, dim);
    for (auto [j, k] : graph.edges()) {
        h += p.g * pauli_to_dense(PauliString(n, {{j, Pauli::Z}, {k, Pauli::Z}}));
    }
    for (int k = 0; k < n; ++k) {
        h += p.h * pauli_to_dense(PauliString(n, {{k, Pauli::X}}));
    }
    return h;
}

/// L_m = |C><phi_m| for every phi_m of orthogonal_basis(graph), same order.
inline std::vector<DenseOperator> projection_jumps(const GraphSpec &graph) {
    const OrthogonalBasis basis = orthogonal_basis(graph);
    std::vector<DenseOperator> jumps;
    jumps.reserve(basis.states.size());
    for (const auto &phi : basis.states) {
        jumps.emplace_back(basis.target * phi.adjoint());
    }
    return jumps;
}

/// L_m = (I - S_m) / 2, one per stabilizer generator. These annihilate the
/// cluster state but do not make it the unique steady state.
inline std::vector<DenseOperator> stabilizer_jumps(const GraphSpec &graph) {
    const auto dim = static_cast<Eigen::Index>(hilbert_dim(graph.n_qubits()));
    std::vector<DenseOperator> jumps;
    for (const auto &s : stabilizers(graph)) {
        jumps.emplace_back(0.5 * (DenseOperator::Identity(dim, dim) - pauli_to_dense(s)));
    }
    return jumps;
}

enum class JumpKind { kProjection, kStabilizer };

inline std::string to_string(JumpKind kind) {
    return kind == JumpKind::kProjection ? "projection" : "stabilizer";
}

inline JumpKind jump_kind_from_string(const std::string &s) {
    if (s == "projection") return JumpKind::kProjection;
    if (s == "stabilizer") return JumpKind::kStabilizer;
    throw InvalidArgument("unknown jump kind '" + s + "' (expected projection or stabilizer)");
}

inline std::vector<DenseOperator> make_jumps(const GraphSpec &graph, JumpKind kind) {
    return kind == JumpKind::kProjection ? projection_jumps(graph) : stabilizer_jumps(graph);
}

/// The two gamma-independent pieces of the Liouvillian; L = unitary + gamma * dissipator.
/// Sweeps over gamma assemble these once.
struct LiouvillianParts {
    Superoperator unitary;
    Superoperator dissipator;

    Superoperator assemble(double gamma) const {
        if (!(gamma >= 0.0)) {
            throw InvalidArgument("gamma must be >= 0");
        }
        return unitary + gamma * dissipator;
    }
};

inline LiouvillianParts liouvillian_parts(const DenseOperator &h,
                                          const std::vector<DenseOperator> &jumps) {
    const Eigen::Index d = h.rows();
    if (h.cols() != d) {
        throw InvalidArgument("Hamiltonian is not square");
    }
    for (const auto &l : jumps) {
        if (l.rows() != d || l.cols() != d) {
            throw InvalidArgument("jump operator dimension " + std::to_string(l.rows()) + "x" +
                                  std::to_string(l.cols()) + " does not match Hamiltonian " +
                                  std::to_string(d));
        }
    }
    const DenseOperator id = DenseOperator::Identity(d, d);
    LiouvillianParts parts;
    parts.unitary = -kI * (kron(id, h) - kron(h.transpose(), id));

    DenseOperator decay = DenseOperator::Zero(d, d);  // sum_m L_m^dag L_m
    parts.dissipator = Superoperator::Zero(d * d, d * d);
    for (const auto &l : jumps) {
        decay.noalias() += l.adjoint() * l;
        // (L^*) (x) L, accumulated block-wise without a temporary.
        const DenseOperator lc = l.conjugate();
        for (Eigen::Index i = 0; i < d; ++i) {
            for (Eigen::Index j = 0; j < d; ++j) {
                const cplx c = lc(i, j);
                if (c != cplx{0.0, 0.0}) {
                    parts.dissipator.block(i * d, j * d, d, d) += c * l;
                }
            }
        }
    }
    parts.dissipator -= 0.5 * kron(id, decay);
    parts.dissipator -= 0.5 * kron(decay.transpose(), id);
    return parts;
}

/// -i(I (x) H - H^T (x) I) + gamma sum_m [L_m^* (x) L_m - 1/2 I (x) L_m^dag L_m
///                                        - 1/2 (L_m^dag L_m)^T (x) I]
inline Superoperator liouvillian(const DenseOperator &h, const std::vector<DenseOperator> &jumps,
                                 double gamma) {
    if (!(gamma >= 0.0)) {
        throw InvalidArgument("gamma must be >= 0");
    }
    return liouvillian_parts(h, jumps).assemble(gamma);
}

/// Column-stacking vectorization.
inline Eigen::VectorXcd vec(const DenseOperator &m) {
    return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size());
}

inline DenseOperator unvec(const Eigen::VectorXcd &v) {
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
    if (d * d != v.size()) {
        throw InvalidArgument("unvec: vector length is not a perfect square");
    }
    return Eigen::Map<const DenseOperator>(v.data(), d, d);
}

/// L[rho] as a matrix.
inline DenseOperator apply_superoperator(const Superoperator &l, const DenseOperator &rho) {
    if (l.rows() != rho.size()) {
        throw InvalidArgument("apply_superoperator: superoperator does not match density matrix");
    }
    return unvec(l * vec(rho));
}

}  // namespace dcs

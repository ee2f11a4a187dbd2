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

// Graph (cluster) states, their stabilizer generators, and an orthonormal
// basis of the complement of the cluster state.

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "dcs/errors.hpp"
#include "dcs/operators.hpp"

namespace dcs {

/// Undirected simple graph on n_qubits vertices. Vertices are qubits, edges
/// are CZ gates during preparation and ZZ couplings in the Hamiltonian.
class GraphSpec {
   public:
    using Edge = std::pair<int, int>;

    GraphSpec() = default;

    /// Edges are stored as (min, max) in insertion order.
    GraphSpec(int n_qubits, const std::vector<Edge> &edges) : n_qubits_(n_qubits) {
        if (n_qubits < 1) {
            throw InvalidArgument("graph needs at least one vertex");
        }
        for (auto [j, k] : edges) {
            if (j < 0 || k < 0 || j >= n_qubits || k >= n_qubits) {
                throw InvalidArgument("edge (" + std::to_string(j) + "," + std::to_string(k) +
                                      ") has an endpoint outside [0, " +
                                      std::to_string(n_qubits) + ")");
            }
            if (j == k) {
                throw InvalidArgument("self-loop on vertex " + std::to_string(j));
            }
            const Edge e{std::min(j, k), std::max(j, k)};
            if (std::find(edges_.begin(), edges_.end(), e) != edges_.end()) {
                throw InvalidArgument("duplicate edge (" + std::to_string(e.first) + "," +
                                      std::to_string(e.second) + ")");
            }
            edges_.push_back(e);
        }
    }

    /// Open chain 0-1-...-(n-1).
    static GraphSpec chain(int n) {
        std::vector<Edge> edges;
        for (int k = 0; k + 1 < n; ++k) {
            edges.emplace_back(k, k + 1);
        }
        return GraphSpec(n, edges);
    }

    /// rows x cols square lattice, vertex index r*cols + c, open boundaries.
    /// square_lattice(2, 2) has edges (0,1), (0,2), (1,3), (2,3).
    static GraphSpec square_lattice(int rows, int cols) {
        if (rows < 1 || cols < 1) {
            throw InvalidArgument("lattice dimensions must be positive");
        }
        std::vector<Edge> edges;
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) {
                const int v = r * cols + c;
                if (c + 1 < cols) edges.emplace_back(v, v + 1);
                if (r + 1 < rows) edges.emplace_back(v, v + cols);
            }
        }
        return GraphSpec(rows * cols, edges);
    }

    int n_qubits() const { return n_qubits_; }
    const std::vector<Edge> &edges() const { return edges_; }

    std::vector<int> neighbors(int vertex) const {
        std::vector<int> out;
        for (auto [j, k] : edges_) {
            if (j == vertex) out.push_back(k);
            if (k == vertex) out.push_back(j);
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    bool connected() const {
        std::vector<int> seen(n_qubits_, 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            for (int w : neighbors(v)) {
                if (!seen[w]) {
                    seen[w] = 1;
                    stack.push_back(w);
                }
            }
        }
        return std::all_of(seen.begin(), seen.end(), [](int s) { return s != 0; });
    }

   private:
    int n_qubits_ = 1;
    std::vector<Edge> edges_;
};

/// Parses "chain:N", "square:RxC" (or "square:2x2").
inline GraphSpec graph_from_preset(const std::string &preset) {
    const auto colon = preset.find(':');
    if (colon == std::string::npos) {
        throw InvalidArgument("graph preset '" + preset + "' must look like chain:N or square:RxC");
    }
    const std::string kind = preset.substr(0, colon);
    const std::string arg = preset.substr(colon + 1);
    auto parse_int = [&](const std::string &s) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(s, &used);
        } catch (const std::exception &) {
            used = 0;
        }
        if (used == 0 || used != s.size()) {
            throw InvalidArgument("bad integer '" + s + "' in graph preset '" + preset + "'");
        }
        return v;
    };
    if (kind == "chain") {
        return GraphSpec::chain(parse_int(arg));
    }
    if (kind == "square") {
        const auto x = arg.find('x');
        if (x == std::string::npos) {
            throw InvalidArgument("square preset needs RxC, got '" + arg + "'");
        }
        return GraphSpec::square_lattice(parse_int(arg.substr(0, x)), parse_int(arg.substr(x + 1)));
    }
    throw InvalidArgument("unknown graph preset kind '" + kind + "'");
}

/// |+>^n: every amplitude 2^{-n/2}.
inline StateVector plus_state(int n) {
    if (n < 1) {
        throw InvalidArgument("plus_state: n must be >= 1");
    }
    const std::size_t dim = hilbert_dim(n);
    return StateVector::Constant(static_cast<Eigen::Index>(dim),
                                 cplx(1.0 / std::sqrt(static_cast<double>(dim)), 0.0));
}

/// Controlled-Z between sites j and k: flips the sign of every amplitude whose
/// bits j and k are both 1.
inline StateVector apply_cz(StateVector s, int j, int k) {
    const int n = qubits_for_dim(static_cast<std::size_t>(s.size()));
    if (n < 1) {
        throw InvalidArgument("apply_cz: state dimension is not a power of two");
    }
    if (j < 0 || k < 0 || j >= n || k >= n) {
        throw InvalidArgument("apply_cz: qubit index out of range");
    }
    if (j == k) {
        throw InvalidArgument("apply_cz: control and target coincide");
    }
    const std::size_t mask = (std::size_t{1} << (n - 1 - j)) | (std::size_t{1} << (n - 1 - k));
    for (Eigen::Index x = 0; x < s.size(); ++x) {
        if ((static_cast<std::size_t>(x) & mask) == mask) {
            s(x) = -s(x);
        }
    }
    return s;
}

/// Hadamard on one site.
inline StateVector apply_hadamard(const StateVector &s, int site) {
    const int n = qubits_for_dim(static_cast<std::size_t>(s.size()));
    if (n < 1 || site < 0 || site >= n) {
        throw InvalidArgument("apply_hadamard: qubit index out of range");
    }
    const auto bit = Eigen::Index{1} << (n - 1 - site);
    const double r = 1.0 / std::sqrt(2.0);
    StateVector out(s.size());
    for (Eigen::Index x = 0; x < s.size(); ++x) {
        if ((x & bit) == 0) {
            out(x) = r * (s(x) + s(x | bit));
            out(x | bit) = r * (s(x) - s(x | bit));
        }
    }
    return out;
}

/// Product of CZ over all edges applied to |+>^n.
inline StateVector cluster_state(const GraphSpec &g) {
    StateVector s = plus_state(g.n_qubits());
    for (auto [j, k] : g.edges()) {
        s = apply_cz(std::move(s), j, k);
    }
    return s;
}

/// One generator per vertex j: X_j times Z on every neighbour of j.
inline std::vector<PauliString> stabilizers(const GraphSpec &g) {
    std::vector<PauliString> out;
    out.reserve(static_cast<std::size_t>(g.n_qubits()));
    for (int j = 0; j < g.n_qubits(); ++j) {
        std::map<int, Pauli> letters{{j, Pauli::X}};
        for (int k : g.neighbors(j)) {
            letters[k] = Pauli::Z;
        }
        out.emplace_back(g.n_qubits(), std::move(letters));
    }
    return out;
}

/// Orthonormal basis {phi_m} of the complement of the cluster state.
struct OrthogonalBasis {
    std::vector<StateVector> states;  // 2^N - 1 entries
    StateVector target;               // the cluster state
};

/// Z-string basis: phi_s = prod_m Z_m^{s_m} |C>, s = 1 .. 2^N - 1 in ascending
/// integer order (site m at bit N-1-m of s, as for basis indices). The states
/// are exactly orthonormal; a modified Gram-Schmidt pass cleans up rounding.
inline OrthogonalBasis orthogonal_basis(const GraphSpec &g) {
    const int n = g.n_qubits();
    const std::size_t dim = hilbert_dim(n);
    OrthogonalBasis basis;
    basis.target = cluster_state(g);
    basis.states.reserve(dim - 1);
    for (std::size_t s = 1; s < dim; ++s) {
        StateVector v = basis.target;
        for (std::size_t x = 0; x < dim; ++x) {
            if (std::popcount(x & s) % 2 == 1) {
                v(static_cast<Eigen::Index>(x)) = -v(static_cast<Eigen::Index>(x));
            }
        }
        v -= basis.target.dot(v) * basis.target;
        for (const auto &prev : basis.states) {
            v -= prev.dot(v) * prev;
        }
        basis.states.push_back(normalize(std::move(v)));
    }
    return basis;
}

}  // namespace dcs

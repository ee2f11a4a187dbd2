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

// Pauli strings and dense operators on an N-qubit register.
//
// Ordering convention: site 0 is the leftmost Kronecker factor, so the basis
// index x reads as the bitstring x_0 x_1 ... x_{N-1} with x_0 the most
// significant bit. Site k therefore lives at bit position N-1-k of x.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>

#include <Eigen/Dense>

#include "dcs/errors.hpp"

namespace dcs {

using cplx = std::complex<double>;
using DenseOperator = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

inline constexpr cplx kI{0.0, 1.0};

/// Largest register the dense code paths accept for Hilbert-space objects.
inline constexpr int kMaxQubits = 14;

inline std::size_t hilbert_dim(int n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxQubits) {
        throw InvalidArgument("qubit count " + std::to_string(n_qubits) + " outside [1, " +
                              std::to_string(kMaxQubits) + "]");
    }
    return std::size_t{1} << n_qubits;
}

/// Number of qubits for a Hilbert-space dimension, or -1 if dim is not 2^N.
inline int qubits_for_dim(std::size_t dim) {
    if (dim == 0 || (dim & (dim - 1)) != 0) {
        return -1;
    }
    int n = 0;
    while ((std::size_t{1} << n) < dim) {
        ++n;
    }
    return n;
}

/// Bit of basis index x belonging to site k in an n-qubit register.
inline int site_bit(std::size_t x, int site, int n_qubits) {
    return static_cast<int>((x >> (n_qubits - 1 - site)) & 1U);
}

enum class Pauli : std::uint8_t { I, X, Y, Z };

inline char pauli_char(Pauli p) {
    switch (p) {
        case Pauli::I:
            return 'I';
        case Pauli::X:
            return 'X';
        case Pauli::Y:
            return 'Y';
        case Pauli::Z:
            return 'Z';
    }
    return '?';
}

/// Single-qubit Pauli matrix.
inline Eigen::Matrix2cd pauli_matrix(Pauli p) {
    Eigen::Matrix2cd m;
    switch (p) {
        case Pauli::I:
            m << 1, 0, 0, 1;
            break;
        case Pauli::X:
            m << 0, 1, 1, 0;
            break;
        case Pauli::Y:
            m << 0, -kI, kI, 0;
            break;
        case Pauli::Z:
            m << 1, 0, 0, -1;
            break;
    }
    return m;
}

/// A tensor product of Pauli letters with a unit-modulus phase. Sites absent
/// from `letters` carry the identity.
struct PauliString {
    int n_qubits = 1;
    std::map<int, Pauli> letters;
    cplx phase{1.0, 0.0};

    PauliString() = default;
    PauliString(int n, std::map<int, Pauli> l, cplx ph = {1.0, 0.0})
        : n_qubits(n), letters(std::move(l)), phase(ph) {}

    Pauli at(int site) const {
        auto it = letters.find(site);
        return it == letters.end() ? Pauli::I : it->second;
    }

    /// Throws InvalidArgument if a site is out of range or the phase is not unit modulus.
    void validate() const {
        if (n_qubits < 1) {
            throw InvalidArgument("PauliString: n_qubits must be positive");
        }
        for (const auto &[site, letter] : letters) {
            if (site < 0 || site >= n_qubits) {
                throw InvalidArgument("PauliString: site " + std::to_string(site) +
                                      " out of range for " + std::to_string(n_qubits) +
                                      " qubits");
            }
        }
        if (std::abs(std::abs(phase) - 1.0) > 1e-12) {
            throw InvalidArgument("PauliString: phase must have unit modulus");
        }
    }

    /// e.g. "+X0 Z1"
    std::string str() const {
        std::string s;
        if (phase == cplx{1, 0}) {
            s = "+";
        } else if (phase == cplx{-1, 0}) {
            s = "-";
        } else if (phase == kI) {
            s = "+i";
        } else if (phase == -kI) {
            s = "-i";
        } else {
            s = "(" + std::to_string(phase.real()) + "," + std::to_string(phase.imag()) + ")";
        }
        bool first = true;
        for (const auto &[site, letter] : letters) {
            if (letter == Pauli::I) {
                continue;
            }
            if (!first) {
                s += ' ';
            }
            s += pauli_char(letter);
            s += std::to_string(site);
            first = false;
        }
        if (first) {
            s += 'I';
        }
        return s;
    }
};

namespace detail {

// Product of two single-qubit Paulis: a*b = phase * result.
inline std::pair<cplx, Pauli> multiply_letters(Pauli a, Pauli b) {
    if (a == Pauli::I) {
        return {1.0, b};
    }
    if (b == Pauli::I || a == b) {
        return {1.0, a == b ? Pauli::I : a};
    }
    const int ia = static_cast<int>(a);
    const int ib = static_cast<int>(b);
    const auto third = static_cast<Pauli>(6 - ia - ib);
    // Cyclic order X -> Y -> Z gives +i.
    const bool cyclic = (ib - ia + 3) % 3 == 1;
    return {cyclic ? kI : -kI, third};
}

}  // namespace detail

/// Site-wise product of two Pauli strings on the same register.
inline PauliString operator*(const PauliString &a, const PauliString &b) {
    if (a.n_qubits != b.n_qubits) {
        throw InvalidArgument("PauliString product: register sizes differ");
    }
    PauliString out;
    out.n_qubits = a.n_qubits;
    out.phase = a.phase * b.phase;
    for (int site = 0; site < a.n_qubits; ++site) {
        auto [ph, letter] = detail::multiply_letters(a.at(site), b.at(site));
        out.phase *= ph;
        if (letter != Pauli::I) {
            out.letters[site] = letter;
        }
    }
    return out;
}

/// Dense 2^N x 2^N matrix of a Pauli string.
inline DenseOperator pauli_to_dense(const PauliString &p) {
    p.validate();
    const std::size_t dim = hilbert_dim(p.n_qubits);
    // A Pauli string maps |x> to (phase factor) |x ^ flip>.
    std::size_t flip = 0;
    for (const auto &[site, letter] : p.letters) {
        if (letter == Pauli::X || letter == Pauli::Y) {
            flip |= std::size_t{1} << (p.n_qubits - 1 - site);
        }
    }
    DenseOperator m = DenseOperator::Zero(dim, dim);
    for (std::size_t x = 0; x < dim; ++x) {
        cplx amp = p.phase;
        for (const auto &[site, letter] : p.letters) {
            const int bit = site_bit(x, site, p.n_qubits);
            switch (letter) {
                case Pauli::Z:
                    if (bit) amp = -amp;
                    break;
                case Pauli::Y:  // Y|0> = i|1>, Y|1> = -i|0>
                    amp *= bit ? -kI : kI;
                    break;
                default:
                    break;
            }
        }
        m(static_cast<Eigen::Index>(x ^ flip), static_cast<Eigen::Index>(x)) = amp;
    }
    return m;
}

/// Kronecker product, a on the left (more significant) factor.
inline DenseOperator kron(const DenseOperator &a, const DenseOperator &b) {
    DenseOperator out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

inline DenseOperator dagger(const DenseOperator &a) { return a.adjoint(); }

/// Computational basis state |x> of an n-qubit register.
inline StateVector basis_state(int n_qubits, std::size_t index) {
    const std::size_t dim = hilbert_dim(n_qubits);
    if (index >= dim) {
        throw InvalidArgument("basis index out of range");
    }
    StateVector v = StateVector::Zero(dim);
    v(static_cast<Eigen::Index>(index)) = 1.0;
    return v;
}

inline StateVector normalize(StateVector v) {
    const double norm = v.norm();
    if (norm <= 0.0) {
        throw InvalidArgument("cannot normalize the zero vector");
    }
    return v / norm;
}

/// |v><v|
inline DenseOperator projector(const StateVector &v) { return v * v.adjoint(); }

}  // namespace dcs

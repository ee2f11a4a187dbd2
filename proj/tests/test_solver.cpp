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

#include "dcs/solver.hpp"

#include <algorithm>
#include <random>

#include "dcs/cluster.hpp"
#include "dcs/lindblad.hpp"
#include "dcs/observables.hpp"
#include "gtest/gtest.h"
#include "test_util.hpp"

using namespace dcs;
using dcs::testing::max_abs;

namespace {

Superoperator chain_liouvillian(int n, double h_g, double gamma_g,
                                JumpKind kind = JumpKind::kProjection) {
    const GraphSpec g = GraphSpec::chain(n);
    return liouvillian(hamiltonian(g, ModelParams::dimensionless(h_g, gamma_g)), make_jumps(g, kind),
                       gamma_g);
}

}  // namespace

TEST(FullSpectrum, StrongDissipationTwoQubits) {
    const auto spectrum = full_spectrum(chain_liouvillian(2, 1.0, 100.0));
    EXPECT_EQ(spectrum.eigenvalues.size(), 16U);
    EXPECT_EQ(spectrum.kernel_dim, 1);
    EXPECT_GE(fidelity(spectrum.steady_state, cluster_state(GraphSpec::chain(2))), 0.99);
    EXPECT_LE(spectrum.residual, 1e-8);
    EXPECT_TRUE(check_density_matrix(spectrum.steady_state).ok());
}

TEST(FullSpectrum, UniqueClusterSteadyStateWithoutHamiltonian) {
    for (int n = 2; n <= 4; ++n) {
        const GraphSpec g = GraphSpec::chain(n);
        const auto dim = Eigen::Index{1} << n;
        const auto spectrum =
            full_spectrum(liouvillian(DenseOperator::Zero(dim, dim), projection_jumps(g), 1.0));
        EXPECT_EQ(spectrum.kernel_dim, 1) << n;
        const StateVector c = cluster_state(g);
        EXPECT_LT(max_abs(spectrum.steady_state - projector(c)), 1e-8) << n;
        for (const auto &phi : orthogonal_basis(g).states) {
            EXPECT_LT(std::abs(phi.dot(spectrum.steady_state * phi)), 1e-10);
        }
    }
}

TEST(FullSpectrum, StabilizerJumpsHaveDegenerateKernel) {
    const GraphSpec g = GraphSpec::chain(3);
    const auto spectrum =
        full_spectrum(liouvillian(DenseOperator::Zero(8, 8), stabilizer_jumps(g), 1.0));
    EXPECT_GT(spectrum.kernel_dim, 1);
}

TEST(FullSpectrum, SortedDescendingRealPart) {
    const auto spectrum = full_spectrum(chain_liouvillian(3, 1.0, 3.0));
    ASSERT_EQ(spectrum.eigenvalues.size(), 64U);
    for (std::size_t i = 1; i < spectrum.eigenvalues.size(); ++i) {
        EXPECT_GE(spectrum.eigenvalues[i - 1].real(), spectrum.eigenvalues[i].real());
    }
}

TEST(FullSpectrum, UnitaryOnlyHasDegenerateKernel) {
    // Purely imaginary eigenvalues tie with zero on Re; the kernel must still be found.
    const auto spectrum = full_spectrum(chain_liouvillian(3, 1.0, 0.0));
    EXPECT_GT(spectrum.kernel_dim, 1);
    EXPECT_LE(std::abs(spectrum.lambda0), spectrum.kernel_tol);
    EXPECT_EQ(spectrum.gap, 0.0);
    EXPECT_LE(spectrum.residual, 1e-8);
}

TEST(FullSpectrum, NoSteadyStateThrows) {
    const Superoperator growth = Superoperator::Identity(4, 4);
    EXPECT_THROW(full_spectrum(growth), NumericalError);
}

TEST(FullSpectrum, LinearSolveAgrees) {
    for (double gamma : {0.3, 5.0, 80.0}) {
        const Superoperator l = chain_liouvillian(3, 1.0, gamma);
        const auto spectrum = full_spectrum(l);
        const DensityMatrix rho = steady_state(l);
        EXPECT_LT(max_abs(rho - spectrum.steady_state), 1e-9) << gamma;
        EXPECT_LT(steady_state_residual(l, rho), 1e-8);
    }
}

TEST(LiouvillianGap, ProjectionJumpsWithoutHamiltonian) {
    // Oracle: the dissipator written in the operator basis |a><b|, a, b in
    // {C, phi_1, phi_2, phi_3}, by explicit products, then diagonalized with
    // Eigen's own solver. Coherences |C><phi| decay at gamma/2, everything in
    // the complement at gamma.
    const GraphSpec g = GraphSpec::chain(2);
    const auto basis = orthogonal_basis(g);
    std::vector<StateVector> b{basis.target};
    b.insert(b.end(), basis.states.begin(), basis.states.end());
    const auto jumps = projection_jumps(g);
    const double gamma = 1.0;
    Eigen::MatrixXcd m(16, 16);
    for (int c = 0; c < 4; ++c) {
        for (int d = 0; d < 4; ++d) {
            const DenseOperator x = b[c] * b[d].adjoint();
            DenseOperator y = DenseOperator::Zero(4, 4);
            for (const auto &l : jumps) {
                const DenseOperator ldl = l.adjoint() * l;
                y += gamma * (l * x * l.adjoint() - 0.5 * (ldl * x + x * ldl));
            }
            for (int a = 0; a < 4; ++a)
                for (int e = 0; e < 4; ++e) m(a * 4 + e, c * 4 + d) = b[a].dot(y * b[e]);
        }
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> oracle(m);
    std::vector<cplx> expected(oracle.eigenvalues().data(), oracle.eigenvalues().data() + 16);
    sort_spectrum(expected);
    EXPECT_EQ(std::count_if(expected.begin(), expected.end(),
                            [](cplx v) { return std::abs(v + 0.5) < 1e-12; }),
              6);
    EXPECT_EQ(std::count_if(expected.begin(), expected.end(),
                            [](cplx v) { return std::abs(v + 1.0) < 1e-12; }),
              9);

    const auto spectrum = full_spectrum(liouvillian(DenseOperator::Zero(4, 4), jumps, gamma));
    for (std::size_t i = 0; i < 16; ++i) EXPECT_LT(std::abs(spectrum.eigenvalues[i] - expected[i]), 1e-10);
    EXPECT_NEAR(liouvillian_gap(spectrum), 0.5, 1e-10);
}

TEST(LiouvillianGap, NonNegativeAndGrowingWithDissipation) {
    double previous = 0.0;
    for (double gamma : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 30.0, 100.0}) {
        const double gap = liouvillian_gap(chain_liouvillian(3, 1.0, gamma));
        EXPECT_GE(gap, 0.0);
        EXPECT_GT(gap, previous) << gamma;
        previous = gap;
    }
}

TEST(LiouvillianGap, SkipsDegenerateKernel) {
    std::vector<cplx> sorted{{0, 0}, {1e-12, 0}, {-0.5, 2}, {-0.5, -2}};
    EXPECT_NEAR(gap_from_sorted(sorted, 1e-8), 0.5, 1e-15);
}

TEST(EvolveRk4, NoDynamicsIsConstant) {
    std::mt19937_64 rng(31);
    const DensityMatrix rho0 = dcs::testing::random_density(4, rng);
    const auto traj = evolve_rk4(rho0, Superoperator::Zero(16, 16), 1.0, 0.1);
    ASSERT_EQ(traj.states.size(), 11U);
    EXPECT_DOUBLE_EQ(traj.times.back(), 1.0);
    for (const auto &rho : traj.states) EXPECT_EQ(max_abs(rho - rho0), 0.0);
}

TEST(EvolveRk4, PreservesTraceAndPositivity) {
    std::mt19937_64 rng(32);
    const Superoperator l = chain_liouvillian(3, 1.0, 5.0);
    const DensityMatrix rho0 = dcs::testing::random_density(8, rng);
    const auto traj = evolve_rk4(rho0, l, 3.0, default_rk4_dt(5.0), 50);
    for (const auto &rho : traj.states) {
        EXPECT_NEAR(std::abs(rho.trace() - 1.0), 0.0, 1e-9);
        EXPECT_GE(check_density_matrix(rho).min_eigenvalue, -1e-7);
    }
}

TEST(EvolveRk4, MatchesPropagator) {
    std::mt19937_64 rng(33);
    const Superoperator l = chain_liouvillian(3, 1.0, 2.0);
    const DensityMatrix rho0 = dcs::testing::random_density(8, rng);
    const auto traj = evolve_rk4(rho0, l, 2.0, default_rk4_dt(2.0));
    EXPECT_LT(max_abs(traj.states.back() - evolve_expm(rho0, l, 2.0)), 1e-6);
}

TEST(EvolveRk4, LandsOnFinalTime) {
    const auto traj = evolve_rk4(DensityMatrix::Identity(2, 2) / 2.0, Superoperator::Zero(4, 4), 0.25, 0.1);
    EXPECT_DOUBLE_EQ(traj.times.back(), 0.25);
    EXPECT_EQ(traj.times.size(), 4U);
}

TEST(EvolveRk4, UnstableStepThrows) {
    const Superoperator l = chain_liouvillian(2, 1.0, 100.0);
    const DensityMatrix rho0 = basis_state(2, 0) * basis_state(2, 0).adjoint();
    EXPECT_THROW(evolve_rk4(rho0, l, 5.0, 0.5), NumericalError);
    EXPECT_THROW(evolve_rk4(rho0, l, 1.0, 0.0), InvalidArgument);
}

TEST(EvolveExpm, ZeroTimeIsIdentity) {
    std::mt19937_64 rng(34);
    const DensityMatrix rho0 = dcs::testing::random_density(4, rng);
    EXPECT_EQ(max_abs(evolve_expm(rho0, chain_liouvillian(2, 1.0, 1.0), 0.0) - rho0), 0.0);
}

TEST(EvolveExpm, SemigroupProperty) {
    std::mt19937_64 rng(35);
    const Superoperator l = chain_liouvillian(3, 1.0, 4.0);
    const Propagator prop(l);
    const DensityMatrix rho0 = dcs::testing::random_density(8, rng);
    EXPECT_LT(max_abs(prop.apply(rho0, 1.7) - prop.apply(prop.apply(rho0, 0.6), 1.1)), 1e-8);
}

TEST(EvolveExpm, ConvergesToSteadyState) {
    const GraphSpec g = GraphSpec::chain(3);
    const Superoperator l = chain_liouvillian(3, 1.0, 50.0);
    const auto spectrum = full_spectrum(l);
    const StateVector c = cluster_state(g);
    const DensityMatrix rho0 = basis_state(3, 0) * basis_state(3, 0).adjoint();
    const DensityMatrix late = evolve_expm(rho0, l, 50.0 / spectrum.gap);
    EXPECT_NEAR(fidelity(late, c), fidelity(spectrum.steady_state, c), 1e-3);
}

TEST(EvolveExpm, DefectiveGeneratorFallsBack) {
    // A Jordan block: eigendecomposition is useless, exp(Lt) = I + L t.
    Superoperator l = Superoperator::Zero(4, 4);
    l(0, 1) = 1.0;
    const DensityMatrix rho0 = DensityMatrix::Identity(2, 2);
    PropagatorInfo info;
    const DensityMatrix out = evolve_expm(rho0, l, 0.5, &info);
    EXPECT_TRUE(info.used_fallback);
    const Eigen::VectorXcd expected = vec(rho0) + 0.5 * (l * vec(rho0));
    EXPECT_LT((vec(out) - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Convergence, IndependentOfInitialState) {
    const int n = 4;
    const Superoperator l = chain_liouvillian(n, 1.0, 5.0);
    const double gap = liouvillian_gap(l);
    const Propagator prop(l);
    const StateVector plus = plus_state(n);
    const StateVector zero = basis_state(n, 0);
    for (double t : {10.0 / gap, 20.0 / gap}) {
        const SpinTriple a = spin_expectations(prop.apply(projector(plus), t));
        const SpinTriple b = spin_expectations(prop.apply(projector(zero), t));
        EXPECT_NEAR(a.jx, b.jx, 0.02);
        EXPECT_NEAR(a.jy, b.jy, 0.02);
        EXPECT_NEAR(a.jz, b.jz, 0.02);
    }
}

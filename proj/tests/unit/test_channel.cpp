// Copyright 2026 The qcap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include "qcap/capacity.hpp"
#include "qcap/channel.hpp"

using namespace qcap;

namespace {

ComplexMatrix mat2(Complex a, Complex b, Complex c, Complex d) {
  ComplexMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

// Choi matrix of an arbitrary linear map given as a callable, output first.
template <typename F>
ComplexMatrix choi_of(Eigen::Index d, F&& f) {
  ComplexMatrix c = ComplexMatrix::Zero(d * d, d * d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index k = 0; k < d; ++k) {
      const ComplexMatrix e = matrix_unit(d, j, k);
      c += Eigen::kroneckerProduct(f(e), e).eval();
    }
  }
  return c;
}

std::vector<QuantumChannel> sample_channels() {
  std::vector<QuantumChannel> out = {identity_channel(3), werner_holevo(3), werner_holevo(4),
                                     depolarizing(2, 0.3), random_channel(3, 3, 1), random_channel(4, 2, 2)};
  const FiniteAbelianGroup g = make_group({2, 2});
  out.push_back(weyl_channel(g, PhaseSpaceDistribution::random(g, 5)));
  return out;
}

}  // namespace

TEST(ChannelFromKraus, Constructors) {
  const QuantumChannel id = channel_from_kraus({ComplexMatrix::Identity(2, 2)});
  EXPECT_EQ(id.kraus_count(), 1u);
  EXPECT_NO_THROW(channel_from_kraus({mat2(0, 1, 1, 0)}));
  const double h = std::sqrt(0.5);
  const QuantumChannel deph = channel_from_kraus({h * mat2(1, 0, 0, 1), h * mat2(1, 0, 0, -1)});
  EXPECT_LE(deph.completeness_residual(), 1e-15);
  try {
    channel_from_kraus({0.9 * ComplexMatrix::Identity(2, 2)});
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("residual"), std::string::npos);
  }
  EXPECT_THROW(channel_from_kraus({ComplexMatrix::Identity(2, 2), ComplexMatrix::Zero(3, 3)}), ValidationError);
  EXPECT_THROW(channel_from_kraus({}), ValidationError);
}

TEST(Apply, Examples) {
  const DensityMatrix s = random_density_matrix(3, 2, 4);
  EXPECT_LE((apply(identity_channel(3), s).matrix() - s.matrix()).norm(), 1e-15);
  const FiniteAbelianGroup g = make_group({3});
  const QuantumChannel dep = weyl_channel(g, PhaseSpaceDistribution::uniform(g));
  EXPECT_LE((apply(dep, s).matrix() - ComplexMatrix::Identity(3, 3) / 3.0).norm(), 1e-12);
  ComplexMatrix expected = ComplexMatrix::Zero(3, 3);
  expected(1, 1) = expected(2, 2) = 0.5;
  EXPECT_LE((apply(werner_holevo(3), DensityMatrix::basis_projector(3, 0)).matrix() - expected).norm(), 1e-15);
  EXPECT_THROW(apply(identity_channel(2), s), ValidationError);
}

TEST(Apply, TracePreservationAndCompletePositivity) {
  for (const QuantumChannel& ch : sample_channels()) {
    for (std::uint64_t s = 0; s < 5; ++s) {
      const DensityMatrix rho = random_density_matrix(ch.dim(), 1 + s % ch.dim(), s);
      EXPECT_NEAR(apply_operator(ch, rho.matrix()).trace().real(), 1.0, 1e-10);
    }
    EXPECT_GE(choi(ch).eigensystem().values(0), -1e-10);
  }
}

TEST(Choi, ConventionsAndRoundTrip) {
  const ChoiMatrix cid = choi(identity_channel(3));
  EXPECT_NEAR(cid.matrix().trace().real(), 3.0, 1e-14);
  EXPECT_EQ(numerical_rank(cid.matrix()), 1);

  const FiniteAbelianGroup g = make_group({2});
  const ChoiMatrix cdep = choi(weyl_channel(g, PhaseSpaceDistribution::uniform(g)));
  // Phi(E_jk) = delta_jk I/2, so C = I/2 (x) I.
  EXPECT_LE((cdep.matrix() - ComplexMatrix::Identity(4, 4) / 2.0).norm(), 1e-14);

  const QuantumChannel ch = random_channel(3, 3, 17);
  const QuantumChannel back = kraus_from_choi(choi(ch));
  for (std::uint64_t s = 0; s < 20; ++s) {
    const DensityMatrix rho = random_density_matrix(3, 1 + s % 3, 200 + s);
    EXPECT_LE((apply(ch, rho).matrix() - apply(back, rho).matrix()).norm(), 1e-10);
  }
}

TEST(Choi, Errors) {
  ComplexMatrix notpsd = choi(identity_channel(2)).matrix();
  notpsd(0, 0) -= 0.5;
  notpsd(3, 3) += 0.5;
  EXPECT_THROW(ChoiMatrix(2, notpsd), ValidationError);
  EXPECT_THROW(ChoiMatrix(2, 2.0 * choi(identity_channel(2)).matrix()), ValidationError);
}

TEST(WernerHolevo, KrausAgreesWithFormulaViaChoi) {
  for (Eigen::Index d = 2; d <= 5; ++d) {
    const ComplexMatrix expected = choi_of(d, [](const ComplexMatrix& x) { return werner_holevo_formula(x); });
    EXPECT_LE((choi(werner_holevo(d)).matrix() - expected).norm(), 1e-12) << d;
  }
  EXPECT_THROW(werner_holevo(1), ValidationError);
}

TEST(WernerHolevo, Examples) {
  EXPECT_LE((apply(werner_holevo(2), DensityMatrix::basis_projector(2, 0)).matrix() -
             DensityMatrix::basis_projector(2, 1).matrix()).norm(), 1e-15);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const RealVector ev = hermitian_eigenvalues(apply(werner_holevo(3), random_pure_state(3, s).projector()).matrix());
    EXPECT_NEAR(ev(0), 0.0, 1e-12);
    EXPECT_NEAR(ev(1), 0.5, 1e-12);
    EXPECT_NEAR(ev(2), 0.5, 1e-12);
  }
  const DensityMatrix mm = DensityMatrix::maximally_mixed(3);
  EXPECT_LE((apply(werner_holevo(3), mm).matrix() - mm.matrix()).norm(), 1e-15);
  EXPECT_EQ(werner_holevo(3).kraus_count(), 3u);
}

TEST(Complementary, Examples) {
  const QuantumChannel e = complementary(identity_channel(3));
  EXPECT_EQ(e.out_dim(), 1);
  EXPECT_NEAR(von_neumann_entropy(apply(e, random_density_matrix(3, 3, 1))), 0.0, 1e-14);

  const DensityMatrix env = apply(complementary(werner_holevo(3)), DensityMatrix::maximally_mixed(3));
  EXPECT_LE((env.matrix() - ComplexMatrix::Identity(3, 3) / 3.0).norm(), 1e-14);
  EXPECT_LE((env.matrix() - environment_state(werner_holevo(3), DensityMatrix::maximally_mixed(3)).matrix()).norm(),
            1e-14);

  for (const QuantumChannel& ch : sample_channels()) {
    for (std::uint64_t s = 0; s < 5; ++s) {
      const DensityMatrix psi = random_pure_state(ch.dim(), s).projector();
      EXPECT_NEAR(von_neumann_entropy(apply(complementary(ch), psi)), von_neumann_entropy(apply(ch, psi)), 1e-9);
    }
  }
}

TEST(WeylChannel, Examples) {
  const FiniteAbelianGroup g = make_group({2});
  const QuantumChannel id = weyl_channel(g, PhaseSpaceDistribution::point_mass(g));
  EXPECT_EQ(id.kraus_count(), 1u);
  const DensityMatrix s = random_density_matrix(2, 2, 8);
  EXPECT_LE((apply(id, s).matrix() - s.matrix()).norm(), 1e-15);

  RealVector p = RealVector::Zero(4);
  p(0) = 0.5;
  p(2) = 0.5;  // (x, y) = (1, 0)
  const QuantumChannel two = weyl_channel(g, PhaseSpaceDistribution(g, p));
  const ComplexMatrix w = weyl_conjugator(g, {1}, {0});
  const ComplexMatrix expected = 0.5 * s.matrix() + 0.5 * w.adjoint() * s.matrix() * w;
  EXPECT_LE((apply(two, s).matrix() - expected).norm(), 1e-15);
  // (x, y) = (1, 0) maps to the clock operator: dephasing.
  EXPECT_NEAR(std::abs(apply(two, s).matrix()(0, 1)), 0.0, 1e-15);
}

TEST(WeylChannel, StructureTheoremForward) {
  for (const auto& orders : std::vector<std::vector<int>>{{2}, {3}, {4}, {2, 2}}) {
    const FiniteAbelianGroup g(orders);
    const std::vector<ComplexMatrix> ws = weyl_representation(g);
    for (std::uint64_t s = 0; s < 10; ++s) {
      const PhaseSpaceDistribution p = PhaseSpaceDistribution::random(g, s);
      const QuantumChannel ch = weyl_channel(g, p);
      EXPECT_LE(is_covariant(ch, ws, ws, 1e-10).max_residual, 1e-10);
      const ChannelCharacteristic cc = channel_characteristic(ch, g);
      EXPECT_LE(cc.residual, 1e-12);
      EXPECT_LE((cc.phi.values() - characteristic_from_distribution(p).values()).cwiseAbs().maxCoeff(), 1e-12);
      EXPECT_TRUE(is_bistochastic(ch).verdict);
    }
  }
}

TEST(WeylChannel, StructureTheoremConverse) {
  for (const auto& orders : std::vector<std::vector<int>>{{2}, {3}, {4}, {2, 2}}) {
    const FiniteAbelianGroup g(orders);
    for (std::uint64_t s = 0; s < 10; ++s) {
      // |phi|^2 of a characteristic function is positive definite.
      const ComplexVector base = characteristic_from_distribution(PhaseSpaceDistribution::random(g, s)).values();
      const CharacteristicFunction phi(g, base.cwiseAbs2().cast<Complex>());
      const QuantumChannel ch = weyl_channel(g, distribution_from_characteristic(phi));
      for (int i = 0; i < g.phase_space_size(); ++i) {
        const ComplexMatrix w = weyl_operator(g, point_at(g, i));
        EXPECT_LE((apply_operator(ch, w) - phi.values()(i) * w).norm(), 1e-10);
      }
    }
  }
}

TEST(ChannelCharacteristic, IdentityAndNonCovariant) {
  const FiniteAbelianGroup g = make_group({2});
  const ChannelCharacteristic id = channel_characteristic(identity_channel(2), g);
  EXPECT_LE((id.phi.values() - ComplexVector::Ones(4)).norm(), 1e-15);
  EXPECT_LE(id.residual, 1e-15);
  // Amplitude damping with gamma = 0.5.
  const double gamma = 0.5;
  const QuantumChannel ad = channel_from_kraus({mat2(1, 0, 0, std::sqrt(1 - gamma)), mat2(0, std::sqrt(gamma), 0, 0)});
  EXPECT_GT(channel_characteristic(ad, g).residual, 0.1);
}

TEST(Depolarizing, Examples) {
  const DensityMatrix s = random_density_matrix(2, 2, 1);
  EXPECT_LE((apply(depolarizing(2, 0.0), s).matrix() - s.matrix()).norm(), 1e-12);
  EXPECT_LE((apply(depolarizing(2, 1.0), s).matrix() - ComplexMatrix::Identity(2, 2) / 2.0).norm(), 1e-12);
  const ComplexMatrix out = apply(depolarizing(2, 0.5), DensityMatrix::basis_projector(2, 0)).matrix();
  EXPECT_LE((out - mat2(0.75, 0, 0, 0.25)).norm(), 1e-12);
  for (double p : {0.1, 0.37, 0.9}) {
    const DensityMatrix r = random_density_matrix(3, 2, 9);
    const ComplexMatrix expected = (1 - p) * r.matrix() + p * ComplexMatrix::Identity(3, 3) / 3.0;
    EXPECT_LE((apply(depolarizing(3, p), r).matrix() - expected).norm(), 1e-12);
  }
  EXPECT_THROW(depolarizing(2, 1.5), ValidationError);
  EXPECT_THROW(depolarizing(2, -0.1), ValidationError);
}

TEST(Covariance, IdentityAndWernerHolevo) {
  std::vector<ComplexMatrix> us, os;
  for (std::uint64_t s = 0; s < 20; ++s) {
    us.push_back(random_unitary(3, s));
    os.push_back(random_unitary(3, 100 + s, true));
  }
  const CovarianceReport id = is_covariant(identity_channel(3), us, 1e-10);
  EXPECT_TRUE(id.verdict);
  EXPECT_LE(id.max_residual, 1e-14);
  EXPECT_EQ(id.samples_tested, 20u);

  EXPECT_TRUE(is_covariant(werner_holevo(3), os, 1e-10).verdict);
  EXPECT_TRUE(is_covariant(werner_holevo(3), us, conjugate_representation(us), 1e-10).verdict);
  // Generic unitaries break the plain form.
  EXPECT_FALSE(is_covariant(werner_holevo(3), us, 1e-10).verdict);

  EXPECT_THROW(is_covariant(identity_channel(3), {2.0 * ComplexMatrix::Identity(3, 3)}, 1e-10), ValidationError);
}

TEST(Bistochastic, Examples) {
  const FiniteAbelianGroup g = make_group({3});
  EXPECT_TRUE(is_bistochastic(weyl_channel(g, PhaseSpaceDistribution::random(g, 1))).verdict);
  EXPECT_TRUE(is_bistochastic(werner_holevo(4)).verdict);
  const QuantumChannel reset = channel_from_kraus({mat2(1, 0, 0, 0), mat2(0, 1, 0, 0)});
  const BistochasticReport r = is_bistochastic(reset);
  EXPECT_FALSE(r.verdict);
  EXPECT_NEAR(r.residual, std::sqrt(2.0), 1e-14);  // ||2|0><0| - I||_F
}

TEST(Tensor, Factorization) {
  const QuantumChannel a = random_channel(2, 3, 1);
  const QuantumChannel b = random_channel(3, 2, 2);
  const QuantumChannel ab = tensor(a, b);
  EXPECT_EQ(ab.kraus_count(), 6u);
  EXPECT_EQ(ab.dim(), 6);
  EXPECT_EQ(tensor(identity_channel(2), identity_channel(2)).kraus()[0], ComplexMatrix::Identity(4, 4));
  for (std::uint64_t s = 0; s < 5; ++s) {
    const DensityMatrix sa = random_density_matrix(2, 2, s), sb = random_density_matrix(3, 2, s + 9);
    const ComplexMatrix lhs = apply(ab, tensor(sa, sb)).matrix();
    const ComplexMatrix rhs = Eigen::kroneckerProduct(apply(a, sa).matrix(), apply(b, sb).matrix()).eval();
    EXPECT_LE((lhs - rhs).norm(), 1e-10);
  }
}

TEST(Dilation, PointMassSingleSampleAndDeterminism) {
  const FiniteAbelianGroup g = make_group({3});
  const ComplexMatrix x = random_density_matrix(3, 3, 1).matrix();
  EXPECT_LE(dilation_sample(g, PhaseSpaceDistribution::point_mass(g, 4), x, 50, 1).frobenius_error, 1e-15);

  const PhaseSpaceDistribution p = PhaseSpaceDistribution::random(g, 2);
  const DilationEstimate one = dilation_sample(g, p, x, 1, 3);
  bool matched = false;
  for (int i = 0; i < 9; ++i) {
    const ComplexMatrix w = weyl_conjugator(g, g.tuple_at(i / 3), g.tuple_at(i % 3));
    if ((one.estimate - w.adjoint() * x * w).norm() == 0.0) matched = true;
  }
  EXPECT_TRUE(matched);
  EXPECT_EQ(dilation_sample(g, p, x, 1000, 5).estimate, dilation_sample(g, p, x, 1000, 5).estimate);
}

TEST(Dilation, ExhaustiveMatchesApplyAndErrorShrinks) {
  const FiniteAbelianGroup g = make_group({2, 2});
  const PhaseSpaceDistribution p = PhaseSpaceDistribution::random(g, 6);
  const DensityMatrix x = random_density_matrix(4, 3, 6);
  EXPECT_LE((dilation_exhaustive(g, p, x.matrix()) - apply(weyl_channel(g, p), x).matrix()).norm(), 1e-12);
  const double small = dilation_sample(g, p, x.matrix(), 100, 1).frobenius_error;
  const double large = dilation_sample(g, p, x.matrix(), 100000, 1).frobenius_error;
  EXPECT_LT(large, small);
  EXPECT_LT(large, 5.0 / std::sqrt(1e5));
}

TEST(TensorOperator, Identity) {
  const TensorOperatorReport r = tensor_operator_matrix(identity_channel(3), random_unitary(3, 1), 1e-10);
  EXPECT_EQ(r.d.rows(), 1);
  EXPECT_NEAR(std::abs(r.d(0, 0) - 1.0), 0.0, 1e-12);
  EXPECT_LE(r.residual, 1e-12);
  EXPECT_TRUE(r.verdict);
}

TEST(TensorOperator, WeylChannelGivesDiagonalPhases) {
  const FiniteAbelianGroup g = make_group({3});
  RealVector p(9);
  p << 0.02, 0.04, 0.06, 0.08, 0.10, 0.12, 0.14, 0.20, 0.24;
  const QuantumChannel ch = weyl_channel(g, PhaseSpaceDistribution(g, p));
  for (int i = 1; i < 9; ++i) {
    const TensorOperatorReport r = tensor_operator_matrix(ch, weyl_operator(g, point_at(g, i)), 1e-10);
    EXPECT_FALSE(r.degenerate_choi);
    EXPECT_LE(r.residual, 1e-10);
    const ComplexMatrix off = r.d - ComplexMatrix(r.d.diagonal().asDiagonal());
    EXPECT_LE(off.norm(), 1e-10);
    for (Eigen::Index k = 0; k < r.d.rows(); ++k) EXPECT_NEAR(std::abs(r.d(k, k)), 1.0, 1e-10);
  }
}

TEST(TensorOperator, WernerHolevoOrthogonalAndConjugatePairs) {
  const QuantumChannel wh = werner_holevo(3);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const ComplexMatrix o = random_unitary(3, s, true);
    const TensorOperatorReport r = tensor_operator_matrix(wh, o, 1e-8);
    EXPECT_TRUE(r.degenerate_choi);
    EXPECT_LE(r.residual, 1e-9);
    EXPECT_LE(r.unitarity_residual, 1e-8);
    const ComplexMatrix u = random_unitary(3, 50 + s);
    const TensorOperatorReport c = tensor_operator_matrix(wh, u, u.conjugate(), 1e-8);
    EXPECT_LE(c.residual, 1e-9);
    EXPECT_LE(c.unitarity_residual, 1e-8);
  }
}

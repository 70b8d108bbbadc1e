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

#pragma once

#include <unsupported/Eigen/KroneckerProduct>

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "qcap/spectral.hpp"
#include "qcap/weyl.hpp"

namespace qcap {

/// Completely positive trace-preserving map S -> sum_k L_k S L_k^dag.
///
/// Kraus operators are out_dim x in_dim. Every public constructor produces a
/// square channel except complementary(), whose output is the environment.
class QuantumChannel {
 public:
  static constexpr double kCompletenessTol = 1e-8;

  explicit QuantumChannel(std::vector<ComplexMatrix> kraus) : kraus_(std::move(kraus)) {
    if (kraus_.empty()) detail::fail("QuantumChannel: Kraus list is empty");
    const Eigen::Index rows = kraus_.front().rows();
    const Eigen::Index cols = kraus_.front().cols();
    if (rows == 0 || cols == 0) detail::fail("QuantumChannel: empty Kraus operator");
    ComplexMatrix sum = ComplexMatrix::Zero(cols, cols);
    for (std::size_t k = 0; k < kraus_.size(); ++k) {
      const ComplexMatrix& l = kraus_[k];
      if (l.rows() != rows || l.cols() != cols) {
        detail::fail("QuantumChannel: Kraus operator ", k, " is ", l.rows(), "x", l.cols(),
                     ", expected ", rows, "x", cols);
      }
      if (!detail::all_finite(l)) detail::fail("QuantumChannel: Kraus operator ", k, " has a non-finite entry");
      sum.noalias() += l.adjoint() * l;
    }
    completeness_residual_ = (sum - ComplexMatrix::Identity(cols, cols)).norm();
    if (completeness_residual_ > kCompletenessTol) {
      detail::fail("QuantumChannel: completeness residual ||sum L^dag L - I||_F = ",
                   completeness_residual_, " exceeds ", kCompletenessTol);
    }
  }

  Eigen::Index in_dim() const { return kraus_.front().cols(); }
  Eigen::Index out_dim() const { return kraus_.front().rows(); }
  /// Dimension of a square channel.
  Eigen::Index dim() const { return in_dim(); }
  std::size_t kraus_count() const { return kraus_.size(); }
  const std::vector<ComplexMatrix>& kraus() const { return kraus_; }
  double completeness_residual() const { return completeness_residual_; }

 private:
  std::vector<ComplexMatrix> kraus_;
  double completeness_residual_ = 0.0;
};

inline QuantumChannel channel_from_kraus(std::vector<ComplexMatrix> kraus) {
  for (std::size_t k = 0; k < kraus.size(); ++k) {
    if (kraus[k].rows() != kraus[k].cols()) {
      detail::fail("channel_from_kraus: Kraus operator ", k, " is not square (", kraus[k].rows(),
                   "x", kraus[k].cols(), ")");
    }
  }
  return QuantumChannel(std::move(kraus));
}

inline QuantumChannel identity_channel(Eigen::Index d) {
  if (d < 1) detail::fail("identity_channel: d must be >= 1");
  return channel_from_kraus({ComplexMatrix::Identity(d, d)});
}

/// Phi[X] for an arbitrary operator X.
inline ComplexMatrix apply_operator(const QuantumChannel& ch, const ComplexMatrix& x) {
  if (x.rows() != ch.in_dim() || x.cols() != ch.in_dim()) {
    detail::fail("apply: operator is ", x.rows(), "x", x.cols(), ", channel input dimension is ",
                 ch.in_dim());
  }
  ComplexMatrix out = ComplexMatrix::Zero(ch.out_dim(), ch.out_dim());
  for (const ComplexMatrix& l : ch.kraus()) out.noalias() += l * x * l.adjoint();
  return out;
}

/// Heisenberg-picture dual: Phi^*[Y] = sum_k L_k^dag Y L_k.
inline ComplexMatrix apply_adjoint(const QuantumChannel& ch, const ComplexMatrix& y) {
  if (y.rows() != ch.out_dim() || y.cols() != ch.out_dim()) {
    detail::fail("apply_adjoint: operator is ", y.rows(), "x", y.cols(),
                 ", channel output dimension is ", ch.out_dim());
  }
  ComplexMatrix out = ComplexMatrix::Zero(ch.in_dim(), ch.in_dim());
  for (const ComplexMatrix& l : ch.kraus()) out.noalias() += l.adjoint() * y * l;
  return out;
}

namespace detail {

// Absorbs the round-off of a Kraus sum so the output meets the 1e-12
// Hermiticity bound of DensityMatrix and has unit trace.
inline DensityMatrix as_state(ComplexMatrix m) {
  m = 0.5 * (m + m.adjoint()).eval();
  const double tr = m.trace().real();
  if (std::abs(tr - 1.0) <= DensityMatrix::kTraceTol) m /= tr;
  return DensityMatrix(m);
}

}  // namespace detail

inline DensityMatrix apply(const QuantumChannel& ch, const DensityMatrix& s) {
  if (s.dim() != ch.in_dim()) {
    detail::fail("apply: state dimension ", s.dim(), " does not match channel input dimension ",
                 ch.in_dim());
  }
  return detail::as_state(apply_operator(ch, s.matrix()));
}

/// Matrix unit |j><k| of size d.
inline ComplexMatrix matrix_unit(Eigen::Index d, Eigen::Index j, Eigen::Index k) {
  ComplexMatrix e = ComplexMatrix::Zero(d, d);
  e(j, k) = 1.0;
  return e;
}

/// Choi matrix C = sum_{jk} Phi[|j><k|] (x) |j><k|, output factor first,
/// unnormalised (Tr C = d).
class ChoiMatrix {
 public:
  static constexpr double kTol = 1e-10;

  ChoiMatrix(Eigen::Index dim, ComplexMatrix matrix) : dim_(dim), matrix_(std::move(matrix)) {
    if (dim_ < 1) detail::fail("ChoiMatrix: dimension must be >= 1");
    if (matrix_.rows() != dim_ * dim_ || matrix_.cols() != dim_ * dim_) {
      detail::fail("ChoiMatrix: expected ", dim_ * dim_, "x", dim_ * dim_, " matrix, got ",
                   matrix_.rows(), "x", matrix_.cols());
    }
    if (!detail::all_finite(matrix_)) detail::fail("ChoiMatrix: non-finite entry");
    const double herm = hermiticity_residual(matrix_);
    if (herm > kTol) detail::fail("ChoiMatrix: max|C - C^dag| = ", herm, " exceeds ", kTol);
    matrix_ = 0.5 * (matrix_ + matrix_.adjoint()).eval();
    const Eigensystem es = hermitian_eigensystem(matrix_);
    if (es.values(0) < -kTol) {
      detail::fail("ChoiMatrix: not positive semidefinite, minimum eigenvalue ", es.values(0));
    }
    const double tp = (partial_trace_output() - ComplexMatrix::Identity(dim_, dim_)).norm();
    if (tp > kTol) {
      detail::fail("ChoiMatrix: trace-preservation violated, ||Tr_out C - I||_F = ", tp);
    }
    eigen_ = es;
  }

  Eigen::Index dim() const { return dim_; }
  const ComplexMatrix& matrix() const { return matrix_; }
  const Eigensystem& eigensystem() const { return eigen_; }

  ComplexMatrix partial_trace_output() const {
    ComplexMatrix r = ComplexMatrix::Zero(dim_, dim_);
    for (Eigen::Index a = 0; a < dim_; ++a) r += matrix_.block(a * dim_, a * dim_, dim_, dim_);
    return r;
  }

 private:
  Eigen::Index dim_;
  ComplexMatrix matrix_;
  Eigensystem eigen_;
};

inline ChoiMatrix choi(const QuantumChannel& ch) {
  if (ch.in_dim() != ch.out_dim()) detail::fail("choi: channel must be square");
  const Eigen::Index d = ch.dim();
  ComplexMatrix c = ComplexMatrix::Zero(d * d, d * d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index k = 0; k < d; ++k) {
      c += Eigen::kroneckerProduct(apply_operator(ch, matrix_unit(d, j, k)), matrix_unit(d, j, k))
               .eval();
    }
  }
  return ChoiMatrix(d, c);
}

struct CanonicalKraus {
  QuantumChannel channel;
  /// Choi eigenvalues kept, ascending; eigenvalue i belongs to Kraus i.
  std::vector<double> weights;
};

/// Kraus operators from the Choi eigenvectors scaled by sqrt(eigenvalue),
/// dropping eigenvalues below cutoff. The result is orthogonal in the
/// trace inner product.
inline CanonicalKraus canonical_kraus(const ChoiMatrix& c, double cutoff = 1e-12) {
  const Eigen::Index d = c.dim();
  const Eigensystem& es = c.eigensystem();
  std::vector<ComplexMatrix> kraus;
  std::vector<double> weights;
  for (Eigen::Index i = 0; i < es.values.size(); ++i) {
    const double lambda = es.values(i);
    if (lambda < cutoff) continue;
    ComplexMatrix l(d, d);
    for (Eigen::Index a = 0; a < d; ++a) {
      for (Eigen::Index j = 0; j < d; ++j) l(a, j) = std::sqrt(lambda) * es.vectors(a * d + j, i);
    }
    kraus.push_back(std::move(l));
    weights.push_back(lambda);
  }
  if (kraus.empty()) detail::fail("kraus_from_choi: every eigenvalue is below the cutoff ", cutoff);
  return {QuantumChannel(std::move(kraus)), std::move(weights)};
}

inline QuantumChannel kraus_from_choi(const ChoiMatrix& c, double cutoff = 1e-12) {
  return canonical_kraus(c, cutoff).channel;
}

/// Channel to the environment: (Phi_E[S])_{jk} = Tr(L_j S L_k^dag).
inline QuantumChannel complementary(const QuantumChannel& ch) {
  const Eigen::Index r = static_cast<Eigen::Index>(ch.kraus_count());
  const Eigen::Index out = ch.out_dim();
  std::vector<ComplexMatrix> env;
  env.reserve(out);
  // K_m = sum_j |j><m| L_j, so row j of K_m is row m of L_j.
  for (Eigen::Index m = 0; m < out; ++m) {
    ComplexMatrix k(r, ch.in_dim());
    for (Eigen::Index j = 0; j < r; ++j) k.row(j) = ch.kraus()[j].row(m);
    env.push_back(std::move(k));
  }
  return QuantumChannel(std::move(env));
}

/// Environment state [Tr(L_j S L_k^dag)]_{jk}.
inline DensityMatrix environment_state(const QuantumChannel& ch, const DensityMatrix& s) {
  if (s.dim() != ch.in_dim()) detail::fail("environment_state: dimension mismatch");
  const Eigen::Index r = static_cast<Eigen::Index>(ch.kraus_count());
  ComplexMatrix e(r, r);
  std::vector<ComplexMatrix> ls;
  ls.reserve(r);
  for (const ComplexMatrix& l : ch.kraus()) ls.push_back(l * s.matrix());
  for (Eigen::Index j = 0; j < r; ++j) {
    for (Eigen::Index k = 0; k < r; ++k) {
      e(j, k) = (ls[j] * ch.kraus()[k].adjoint()).trace();
    }
  }
  return detail::as_state(e);
}

/// The Weyl operator attached to the dual point (x, y): W_{J(x,y)} with
/// J(x, y) = (y, -x). This orientation of J makes the channel below satisfy
/// Phi[W_z] = phi(z) W_z for phi = characteristic_from_distribution(p),
/// without conjugating the character.
inline ComplexMatrix weyl_conjugator(const FiniteAbelianGroup& g, const Tuple& x, const Tuple& y) {
  Tuple minus_x(x);
  for (auto& v : minus_x) v = -v;
  return weyl_operator(g, make_point(g, y, minus_x));
}

/// Phi[X] = sum_{x,y} p_{x,y} W_{J(x,y)}^dag X W_{J(x,y)}.
inline QuantumChannel weyl_channel(const FiniteAbelianGroup& g, const PhaseSpaceDistribution& p) {
  if (!(p.group() == g)) detail::fail("weyl_channel: distribution is over a different group");
  const int d = g.total_dim();
  std::vector<ComplexMatrix> kraus;
  for (int xi = 0; xi < d; ++xi) {
    for (int yi = 0; yi < d; ++yi) {
      const double w = p.probs()(xi * d + yi);
      if (w <= 0.0) continue;
      kraus.push_back(std::sqrt(w) * weyl_conjugator(g, g.tuple_at(xi), g.tuple_at(yi)).adjoint());
    }
  }
  return channel_from_kraus(std::move(kraus));
}

struct ChannelCharacteristic {
  CharacteristicFunction phi;
  /// max_z ||Phi[W_z] - phi(z) W_z||_F, plus |Tr Phi[I]/d - 1|.
  double residual;
};

inline ChannelCharacteristic channel_characteristic(const QuantumChannel& ch,
                                                    const FiniteAbelianGroup& g) {
  if (ch.in_dim() != g.total_dim() || ch.out_dim() != g.total_dim()) {
    detail::fail("channel_characteristic: channel dimension ", ch.in_dim(),
                 " does not match group dimension ", g.total_dim());
  }
  const double d = g.total_dim();
  ComplexVector phi(g.phase_space_size());
  double residual = 0.0;
  for (int i = 0; i < g.phase_space_size(); ++i) {
    const ComplexMatrix w = weyl_operator(g, point_at(g, i));
    const ComplexMatrix out = apply_operator(ch, w);
    phi(i) = (w.adjoint() * out).trace() / d;
    residual = std::max(residual, (out - phi(i) * w).norm());
  }
  residual = std::max(residual, std::abs(phi(0) - Complex(1.0)));
  phi(0) = 1.0;
  return {CharacteristicFunction(g, phi), residual};
}

/// Phi[X] = (Tr(X) I - X^T) / (d - 1).
inline ComplexMatrix werner_holevo_formula(const ComplexMatrix& x) {
  require_square(x, "werner_holevo_formula");
  const Eigen::Index d = x.rows();
  if (d < 2) detail::fail("werner_holevo: d must be >= 2");
  return (x.trace() * ComplexMatrix::Identity(d, d) - x.transpose()) / double(d - 1);
}

/// Werner-Holevo channel with antisymmetric Kraus operators
/// (|j><k| - |k><j|) / sqrt(d - 1), j < k. The Kraus list is checked against
/// the closed form on every matrix unit.
inline QuantumChannel werner_holevo(Eigen::Index d) {
  if (d < 2) detail::fail("werner_holevo: d must be >= 2, got ", d);
  const double scale = 1.0 / std::sqrt(double(d - 1));
  std::vector<ComplexMatrix> kraus;
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index k = j + 1; k < d; ++k) {
      kraus.push_back(scale * (matrix_unit(d, j, k) - matrix_unit(d, k, j)));
    }
  }
  QuantumChannel ch = channel_from_kraus(std::move(kraus));
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index k = 0; k < d; ++k) {
      const ComplexMatrix e = matrix_unit(d, j, k);
      const double r = (apply_operator(ch, e) - werner_holevo_formula(e)).norm();
      if (r > 1e-12) detail::fail("werner_holevo: Kraus list disagrees with formula by ", r);
    }
  }
  return ch;
}

/// Depolarizing channel (1-p) S + p I/d, realised as a Weyl channel on Z_d.
inline QuantumChannel depolarizing(Eigen::Index d, double p) {
  if (d < 2) detail::fail("depolarizing: d must be >= 2, got ", d);
  if (!(p >= 0.0 && p <= 1.0)) detail::fail("depolarizing: p = ", p, " outside [0, 1]");
  const FiniteAbelianGroup g({static_cast<int>(d)});
  const double n = g.phase_space_size();
  RealVector probs = RealVector::Constant(g.phase_space_size(), p / n);
  probs(0) = (1.0 - p) + p / n;
  probs /= probs.sum();
  return weyl_channel(g, PhaseSpaceDistribution(g, probs));
}

/// Random channel with `count` Kraus operators: a Haar-like isometry
/// V = G (G^dag G)^{-1/2} from a (count d) x d Gaussian G, cut into blocks.
inline QuantumChannel random_channel(Eigen::Index d, Eigen::Index count, std::uint64_t seed) {
  if (d < 1 || count < 1) detail::fail("random_channel: d and count must be >= 1");
  std::mt19937_64 rng(seed);
  const ComplexMatrix g = detail::gaussian_matrix(count * d, d, rng);
  const ComplexMatrix inv_sqrt = hermitian_function(g.adjoint() * g, [](double l) {
    return 1.0 / std::sqrt(l);
  });
  const ComplexMatrix v = g * inv_sqrt;
  std::vector<ComplexMatrix> kraus;
  for (Eigen::Index k = 0; k < count; ++k) kraus.push_back(v.block(k * d, 0, d, d));
  return channel_from_kraus(std::move(kraus));
}

inline double unitarity_residual(const ComplexMatrix& u) {
  return (u.adjoint() * u - ComplexMatrix::Identity(u.cols(), u.cols())).norm();
}

struct CovarianceReport {
  double max_residual = 0.0;
  std::size_t samples_tested = 0;
  std::vector<double> per_element_residuals;
  double tolerance = 0.0;
  bool verdict = false;
};

/// Checks Phi[V1 S V1^dag] = V2 Phi[S] V2^dag at each supplied element over
/// the d^2 matrix units. Pass the same list twice for ordinary covariance.
inline CovarianceReport is_covariant(const QuantumChannel& ch,
                                     const std::vector<ComplexMatrix>& in_rep,
                                     const std::vector<ComplexMatrix>& out_rep, double tol) {
  if (in_rep.size() != out_rep.size()) {
    detail::fail("is_covariant: representation lists have lengths ", in_rep.size(), " and ",
                 out_rep.size());
  }
  const Eigen::Index din = ch.in_dim();
  const Eigen::Index dout = ch.out_dim();
  CovarianceReport rep;
  rep.tolerance = tol;
  std::vector<ComplexMatrix> images;
  for (Eigen::Index j = 0; j < din; ++j) {
    for (Eigen::Index k = 0; k < din; ++k) images.push_back(apply_operator(ch, matrix_unit(din, j, k)));
  }
  for (std::size_t g = 0; g < in_rep.size(); ++g) {
    const ComplexMatrix& v1 = in_rep[g];
    const ComplexMatrix& v2 = out_rep[g];
    if (v1.rows() != din || v1.cols() != din || v2.rows() != dout || v2.cols() != dout) {
      detail::fail("is_covariant: representation element ", g, " has the wrong size");
    }
    if (unitarity_residual(v1) > 1e-10 || unitarity_residual(v2) > 1e-10) {
      detail::fail("is_covariant: representation element ", g, " is not unitary (residual ",
                   std::max(unitarity_residual(v1), unitarity_residual(v2)), ")");
    }
    double worst = 0.0;
    for (Eigen::Index j = 0; j < din; ++j) {
      for (Eigen::Index k = 0; k < din; ++k) {
        const ComplexMatrix e = matrix_unit(din, j, k);
        const ComplexMatrix lhs = apply_operator(ch, v1 * e * v1.adjoint());
        const ComplexMatrix rhs = v2 * images[j * din + k] * v2.adjoint();
        worst = std::max(worst, (lhs - rhs).norm());
      }
    }
    rep.per_element_residuals.push_back(worst);
    rep.max_residual = std::max(rep.max_residual, worst);
  }
  rep.samples_tested = in_rep.size();
  rep.verdict = rep.max_residual <= tol;
  return rep;
}

inline CovarianceReport is_covariant(const QuantumChannel& ch, const std::vector<ComplexMatrix>& rep,
                                     double tol) {
  return is_covariant(ch, rep, rep, tol);
}

/// All Weyl operators of the group, in phase-space index order.
inline std::vector<ComplexMatrix> weyl_representation(const FiniteAbelianGroup& g) {
  std::vector<ComplexMatrix> ws;
  for (int i = 0; i < g.phase_space_size(); ++i) ws.push_back(weyl_operator(g, point_at(g, i)));
  return ws;
}

inline std::vector<ComplexMatrix> conjugate_representation(const std::vector<ComplexMatrix>& rep) {
  std::vector<ComplexMatrix> out;
  out.reserve(rep.size());
  for (const ComplexMatrix& u : rep) out.push_back(u.conjugate());
  return out;
}

struct BistochasticReport {
  bool verdict;
  double residual;
};

inline BistochasticReport is_bistochastic(const QuantumChannel& ch, double tol = 1e-10) {
  if (ch.in_dim() != ch.out_dim()) detail::fail("is_bistochastic: channel must be square");
  const Eigen::Index d = ch.dim();
  const double r = (apply_operator(ch, ComplexMatrix::Identity(d, d)) -
                    ComplexMatrix::Identity(d, d)).norm();
  return {r <= tol, r};
}

/// Phi (x) Psi with Kraus operators A_j (x) B_k (j major).
inline QuantumChannel tensor(const QuantumChannel& a, const QuantumChannel& b) {
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(a.kraus_count() * b.kraus_count());
  for (const ComplexMatrix& ka : a.kraus()) {
    for (const ComplexMatrix& kb : b.kraus()) kraus.push_back(Eigen::kroneckerProduct(ka, kb).eval());
  }
  return QuantumChannel(std::move(kraus));
}

inline DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix(Eigen::kroneckerProduct(a.matrix(), b.matrix()).eval());
}

struct DilationEstimate {
  ComplexMatrix estimate;
  double frobenius_error = 0.0;
  std::size_t samples = 0;
};

namespace detail {

inline std::vector<ComplexMatrix> dilation_terms(const FiniteAbelianGroup& g,
                                                 const PhaseSpaceDistribution& p,
                                                 const ComplexMatrix& x) {
  const int d = g.total_dim();
  std::vector<ComplexMatrix> terms(g.phase_space_size());
  for (int i = 0; i < g.phase_space_size(); ++i) {
    if (p.probs()(i) <= 0.0) continue;
    const ComplexMatrix w = weyl_conjugator(g, g.tuple_at(i / d), g.tuple_at(i % d));
    terms[i] = w.adjoint() * x * w;
  }
  return terms;
}

inline void check_dilation_input(const FiniteAbelianGroup& g, const PhaseSpaceDistribution& p,
                                 const ComplexMatrix& x) {
  if (!(p.group() == g)) detail::fail("dilation_sample: distribution is over a different group");
  if (x.rows() != g.total_dim() || x.cols() != g.total_dim()) {
    detail::fail("dilation_sample: operator is ", x.rows(), "x", x.cols(), ", expected dimension ",
                 g.total_dim());
  }
}

}  // namespace detail

/// Exact average E[W_{J zeta}^dag X W_{J zeta}] by enumerating the dual
/// phase space.
inline ComplexMatrix dilation_exhaustive(const FiniteAbelianGroup& g,
                                         const PhaseSpaceDistribution& p, const ComplexMatrix& x) {
  detail::check_dilation_input(g, p, x);
  const std::vector<ComplexMatrix> terms = detail::dilation_terms(g, p, x);
  ComplexMatrix acc = ComplexMatrix::Zero(x.rows(), x.cols());
  for (int i = 0; i < g.phase_space_size(); ++i) {
    if (p.probs()(i) > 0.0) acc += p.probs()(i) * terms[i];
  }
  return acc;
}

inline constexpr int kDilationStreams = 8;

/// Monte Carlo simulation of the stochastic unitary evolution
/// X -> W_{J zeta}^dag X W_{J zeta}, zeta ~ p. The n draws are split over
/// kDilationStreams seeded streams; stream partial sums are combined
/// pairwise in stream order.
inline DilationEstimate dilation_sample(const FiniteAbelianGroup& g,
                                        const PhaseSpaceDistribution& p, const ComplexMatrix& x,
                                        std::size_t n, std::uint64_t seed) {
  detail::check_dilation_input(g, p, x);
  if (n < 1) detail::fail("dilation_sample: n must be >= 1");
  const std::vector<ComplexMatrix> terms = detail::dilation_terms(g, p, x);
  const std::vector<double> weights(p.probs().data(), p.probs().data() + p.probs().size());

  std::vector<ComplexMatrix> partial;
  for (int s = 0; s < kDilationStreams; ++s) {
    const std::size_t count = n / kDilationStreams + (static_cast<std::size_t>(s) < n % kDilationStreams);
    std::mt19937_64 rng(detail::mix_seed(seed, s));
    std::discrete_distribution<int> draw(weights.begin(), weights.end());
    std::vector<std::size_t> tally(weights.size(), 0);
    for (std::size_t i = 0; i < count; ++i) ++tally[draw(rng)];
    ComplexMatrix acc = ComplexMatrix::Zero(x.rows(), x.cols());
    for (std::size_t i = 0; i < tally.size(); ++i) {
      if (tally[i] > 0) acc += double(tally[i]) * terms[i];
    }
    partial.push_back(std::move(acc));
  }
  while (partial.size() > 1) {
    std::vector<ComplexMatrix> next;
    for (std::size_t i = 0; i + 1 < partial.size(); i += 2) next.push_back(partial[i] + partial[i + 1]);
    if (partial.size() % 2 == 1) next.push_back(partial.back());
    partial = std::move(next);
  }
  DilationEstimate out;
  out.estimate = partial.front() / double(n);
  out.frobenius_error = (out.estimate - apply_operator(weyl_channel(g, p), x)).norm();
  out.samples = n;
  return out;
}

struct TensorOperatorReport {
  /// D(k, j) is the coefficient of canonical Kraus L_k in V_out L_j V_in^dag.
  ComplexMatrix d;
  double residual = 0.0;
  double unitarity_residual = 0.0;
  bool degenerate_choi = false;
  double min_choi_gap = 0.0;
  bool verdict = false;
};

inline constexpr double kChoiGapTol = 1e-8;

/// Expresses the conjugated canonical Kraus operators V_out L_j V_in^dag in
/// the canonical Kraus basis. verdict means residual <= tol and D unitary
/// within tol.
inline TensorOperatorReport tensor_operator_matrix(const QuantumChannel& ch, const ComplexMatrix& v_in,
                                                   const ComplexMatrix& v_out, double tol) {
  if (unitarity_residual(v_in) > 1e-10 || unitarity_residual(v_out) > 1e-10) {
    detail::fail("tensor_operator_matrix: V is not unitary");
  }
  const CanonicalKraus ck = canonical_kraus(choi(ch));
  const std::vector<ComplexMatrix>& ls = ck.channel.kraus();
  const Eigen::Index r = static_cast<Eigen::Index>(ls.size());
  TensorOperatorReport rep;
  rep.min_choi_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < ck.weights.size(); ++i) {
    rep.min_choi_gap = std::min(rep.min_choi_gap, ck.weights[i] - ck.weights[i - 1]);
  }
  rep.degenerate_choi = rep.min_choi_gap < kChoiGapTol;
  rep.d = ComplexMatrix::Zero(r, r);
  for (Eigen::Index j = 0; j < r; ++j) {
    const ComplexMatrix t = v_out * ls[j] * v_in.adjoint();
    ComplexMatrix fit = ComplexMatrix::Zero(t.rows(), t.cols());
    for (Eigen::Index k = 0; k < r; ++k) {
      rep.d(k, j) = (ls[k].adjoint() * t).trace() / (ls[k].adjoint() * ls[k]).trace().real();
      fit += rep.d(k, j) * ls[k];
    }
    rep.residual = std::max(rep.residual, (t - fit).norm());
  }
  rep.unitarity_residual = unitarity_residual(rep.d);
  rep.verdict = rep.residual <= tol && rep.unitarity_residual <= tol;
  return rep;
}

inline TensorOperatorReport tensor_operator_matrix(const QuantumChannel& ch, const ComplexMatrix& v,
                                                   double tol) {
  return tensor_operator_matrix(ch, v, v, tol);
}

}  // namespace qcap

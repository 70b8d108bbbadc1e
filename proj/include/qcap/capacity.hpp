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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qcap/channel.hpp"
#include "qcap/spectral.hpp"
#include "qcap/weyl.hpp"

namespace qcap {

/// Probabilities pi_j with states S_j.
class Ensemble {
 public:
  static constexpr double kSumTol = 1e-12;

  Ensemble(std::vector<double> probs, std::vector<DensityMatrix> states)
      : probs_(std::move(probs)), states_(std::move(states)) {
    if (probs_.empty()) detail::fail("Ensemble: empty");
    if (probs_.size() != states_.size()) {
      detail::fail("Ensemble: ", probs_.size(), " probabilities for ", states_.size(), " states");
    }
    double s = 0.0;
    for (std::size_t j = 0; j < probs_.size(); ++j) {
      if (!(probs_[j] >= 0.0)) detail::fail("Ensemble: probability ", probs_[j], " at ", j, " is negative");
      if (states_[j].dim() != states_.front().dim()) detail::fail("Ensemble: state dimensions differ");
      s += probs_[j];
    }
    if (std::abs(s - 1.0) > kSumTol) detail::fail("Ensemble: probabilities sum to ", s);
  }

  std::size_t size() const { return probs_.size(); }
  Eigen::Index dim() const { return states_.front().dim(); }
  const std::vector<double>& probs() const { return probs_; }
  const std::vector<DensityMatrix>& states() const { return states_; }

  ComplexMatrix average() const {
    ComplexMatrix acc = ComplexMatrix::Zero(dim(), dim());
    for (std::size_t j = 0; j < size(); ++j) acc += probs_[j] * states_[j].matrix();
    return acc;
  }

 private:
  std::vector<double> probs_;
  std::vector<DensityMatrix> states_;
};

struct OptimizerOptions {
  int restarts = 50;
  std::uint64_t seed = 0;
  double tol = 1e-8;
  int max_iterations = 500;
  EntropyBase base = EntropyBase::Two;
};

struct OptimizationResult {
  double value = 0.0;
  /// Optimal state; `pure` is set when the search ran over pure states.
  ComplexMatrix argument;
  std::optional<ComplexVector> pure;
  int restarts_used = 0;
  int best_restart = 0;
  bool converged = false;
  double gradient_norm = 0.0;
  int iterations = 0;
  std::vector<double> restart_values;
};

struct InequalityReport {
  double left = 0.0;
  double right = 0.0;
  double slack = 0.0;
  double tolerance = 0.0;
  bool holds = false;
  std::string context;
};

inline InequalityReport make_inequality(double left, double right, double tol, std::string context) {
  InequalityReport r;
  r.left = left;
  r.right = right;
  r.slack = right - left;
  r.tolerance = tol;
  r.holds = r.slack >= -tol;
  r.context = std::move(context);
  return r;
}

// ---------------------------------------------------------------------------
// Entropic quantities.

/// H(S, Phi): entropy of the environment's final state.
inline double entropy_exchange(const QuantumChannel& ch, const DensityMatrix& s,
                               EntropyBase base = EntropyBase::Two) {
  return von_neumann_entropy(environment_state(ch, s), base);
}

/// chi = H(sum pi_j Phi[S_j]) - sum pi_j H(Phi[S_j]).
inline double holevo_quantity(const QuantumChannel& ch, const Ensemble& e,
                              EntropyBase base = EntropyBase::Two) {
  if (e.dim() != ch.in_dim()) detail::fail("holevo_quantity: ensemble dimension mismatch");
  ComplexMatrix avg = ComplexMatrix::Zero(ch.out_dim(), ch.out_dim());
  double mean_entropy = 0.0;
  for (std::size_t j = 0; j < e.size(); ++j) {
    const DensityMatrix out = apply(ch, e.states()[j]);
    avg += e.probs()[j] * out.matrix();
    mean_entropy += e.probs()[j] * von_neumann_entropy(out, base);
  }
  return von_neumann_entropy(detail::as_state(avg), base) - mean_entropy;
}

/// H(S) + H(Phi[S]) - H(S, Phi).
inline double mutual_information(const QuantumChannel& ch, const DensityMatrix& s,
                                 EntropyBase base = EntropyBase::Two) {
  return von_neumann_entropy(s, base) + von_neumann_entropy(apply(ch, s), base) -
         entropy_exchange(ch, s, base);
}

inline double log_dim(Eigen::Index d, EntropyBase base) { return log_in(double(d), base); }

// ---------------------------------------------------------------------------
// Gradients. Eigenvalues are floored at kGradientFloor inside log only.

inline constexpr double kGradientFloor = 1e-14;

namespace detail {

inline ComplexMatrix floored_log(const ComplexMatrix& m) {
  return hermitian_function(m, [](double l) { return std::log(std::max(l, kGradientFloor)); });
}

inline double real_dot(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a.array().conjugate() * b.array()).sum().real();
}

}  // namespace detail

inline double output_entropy(const QuantumChannel& ch, const ComplexVector& psi,
                             EntropyBase base = EntropyBase::Two) {
  return von_neumann_entropy(detail::as_state(apply_operator(ch, psi * psi.adjoint())), base);
}

/// Riemannian gradient of psi -> H(Phi[|psi><psi|]) on the unit sphere of
/// C^d viewed as R^{2d}, with the real inner product Re<a, b>.
inline ComplexVector output_entropy_gradient(const QuantumChannel& ch, const ComplexVector& psi,
                                             EntropyBase base = EntropyBase::Two) {
  const ComplexMatrix rho = apply_operator(ch, psi * psi.adjoint());
  const ComplexMatrix a = apply_adjoint(ch, detail::floored_log(0.5 * (rho + rho.adjoint())));
  ComplexVector g = -2.0 * nats_to(base) * (a * psi);
  g -= psi.dot(g).real() * psi;
  return g;
}

/// Gradient of A -> I(AA^dag / Tr AA^dag) at a point with ||A||_F = 1.
inline ComplexMatrix mutual_information_gradient(const QuantumChannel& ch, const ComplexMatrix& a,
                                                 EntropyBase base = EntropyBase::Two) {
  const double t = a.squaredNorm();
  const ComplexMatrix s = a * a.adjoint() / t;
  const DensityMatrix sd = detail::as_state(s);
  const QuantumChannel env = complementary(ch);
  ComplexMatrix gamma = -detail::floored_log(sd.matrix());
  gamma -= apply_adjoint(ch, detail::floored_log(apply(ch, sd).matrix()));
  gamma += apply_adjoint(env, detail::floored_log(environment_state(ch, sd).matrix()));
  gamma = 0.5 * (gamma + gamma.adjoint()).eval();
  const double shift = (gamma * sd.matrix()).trace().real();
  gamma -= shift * ComplexMatrix::Identity(gamma.rows(), gamma.cols());
  return (2.0 / t) * nats_to(base) * gamma * a;
}

namespace detail {

struct LocalRun {
  double value;
  ComplexMatrix point;  // normalised: unit vector or unit-Frobenius A
  double gradient_norm;
  bool converged;
  int iterations;
};

// Gradient descent (sign = +1) or ascent (sign = -1) on the unit sphere of
// the Frobenius norm. Step: Barzilai-Borwein trial step, Armijo backtracking,
// retraction by renormalisation.
template <typename Objective, typename Gradient>
LocalRun sphere_descent(ComplexMatrix x, Objective&& f, Gradient&& grad, double sign,
                        const OptimizerOptions& opts) {
  constexpr double kArmijo = 1e-4;
  x /= x.norm();
  double fx = sign * f(x);
  ComplexMatrix g = sign * grad(x);
  ComplexMatrix prev_x, prev_g;
  double step = 1.0;
  int it = 0;
  bool converged = g.norm() <= opts.tol;
  for (; it < opts.max_iterations && !converged; ++it) {
    if (it > 0) {
      const ComplexMatrix s = x - prev_x;
      const ComplexMatrix y = g - prev_g;
      const double sy = std::abs(real_dot(s, y));
      if (sy > 0.0) step = std::clamp(s.squaredNorm() / sy, 1e-8, 1e4);
    }
    const double g2 = g.squaredNorm();
    bool accepted = false;
    ComplexMatrix trial;
    double ft = 0.0;
    for (int k = 0; k < 60; ++k) {
      trial = x - step * g;
      trial /= trial.norm();
      ft = sign * f(trial);
      if (ft <= fx - kArmijo * step * g2) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    prev_x = x;
    prev_g = g;
    x = trial;
    fx = ft;
    g = sign * grad(x);
    converged = g.norm() <= opts.tol;
  }
  return {sign * fx, x, g.norm(), converged, it};
}

// Lowest value wins; ties within 1e-12 go to the lowest restart index.
inline bool better(double candidate, double incumbent, double sign) {
  return sign * candidate < sign * incumbent - 1e-12;
}

}  // namespace detail

/// Multi-start minimisation of H(Phi[|psi><psi|]) over pure states. Pure
/// inputs suffice because entropy is concave. `starts` are tried before the
/// random restarts and count towards restarts_used.
inline OptimizationResult min_output_entropy(const QuantumChannel& ch, const OptimizerOptions& opts,
                                             const std::vector<ComplexVector>& starts = {}) {
  if (opts.restarts < 1) detail::fail("min_output_entropy: restarts must be >= 1");
  const Eigen::Index d = ch.in_dim();
  auto f = [&](const ComplexMatrix& x) { return output_entropy(ch, x.col(0), opts.base); };
  auto grad = [&](const ComplexMatrix& x) {
    return ComplexMatrix(output_entropy_gradient(ch, x.col(0), opts.base));
  };
  OptimizationResult best;
  bool have = false;
  const int total = static_cast<int>(starts.size()) + opts.restarts;
  for (int r = 0; r < total; ++r) {
    ComplexMatrix x0 = (r < static_cast<int>(starts.size()))
                           ? ComplexMatrix(starts[r])
                           : ComplexMatrix(random_pure_state(d, detail::mix_seed(opts.seed, r)).amplitudes());
    const detail::LocalRun run = detail::sphere_descent(x0, f, grad, 1.0, opts);
    best.restart_values.push_back(run.value);
    if (!have || detail::better(run.value, best.value, 1.0)) {
      have = true;
      best.value = run.value;
      best.pure = ComplexVector(run.point.col(0));
      best.argument = run.point.col(0) * run.point.col(0).adjoint();
      best.best_restart = r;
      best.converged = run.converged;
      best.gradient_norm = run.gradient_norm;
      best.iterations = run.iterations;
    }
  }
  best.restarts_used = total;
  return best;
}

/// Uniform Weyl orbit {d^-2, W_z S0 W_z^dag}.
inline Ensemble orbit_ensemble(const FiniteAbelianGroup& g, const DensityMatrix& s0) {
  if (s0.dim() != g.total_dim()) {
    detail::fail("orbit_ensemble: state dimension ", s0.dim(), " does not match group dimension ",
                 g.total_dim());
  }
  const int n = g.phase_space_size();
  std::vector<double> probs(n, 1.0 / n);
  std::vector<DensityMatrix> states;
  states.reserve(n);
  for (int i = 0; i < n; ++i) {
    const ComplexMatrix w = weyl_operator(g, point_at(g, i));
    states.push_back(detail::as_state(w * s0.matrix() * w.adjoint()));
  }
  return {probs, states};
}

inline constexpr double kCertificateTol = 1e-6;

struct OneShotCapacity {
  /// log d - Hmin.
  double candidate = 0.0;
  /// Holevo quantity of the Weyl orbit of the entropy minimiser.
  double orbit_chi = 0.0;
  double gap = 0.0;
  bool certified = false;
  /// Equal to candidate when certified.
  std::optional<double> value;
  OptimizationResult min_entropy;
};

/// One-shot classical capacity for a channel covariant under an irreducible
/// representation: log d - min H(Phi[S]), certified by evaluating chi on the
/// orbit ensemble at the minimiser.
inline OneShotCapacity one_shot_capacity_covariant(const QuantumChannel& ch,
                                                   const FiniteAbelianGroup& g,
                                                   const OptimizerOptions& opts) {
  if (ch.in_dim() != g.total_dim() || ch.out_dim() != g.total_dim()) {
    detail::fail("one_shot_capacity_covariant: channel dimension ", ch.in_dim(),
                 " does not match group dimension ", g.total_dim());
  }
  OneShotCapacity out;
  out.min_entropy = min_output_entropy(ch, opts);
  out.candidate = log_dim(ch.dim(), opts.base) - out.min_entropy.value;
  const DensityMatrix s0 = detail::as_state(out.min_entropy.argument);
  out.orbit_chi = holevo_quantity(ch, orbit_ensemble(g, s0), opts.base);
  out.gap = std::abs(out.orbit_chi - out.candidate);
  out.certified = out.gap <= kCertificateTol;
  if (out.certified) out.value = out.candidate;
  return out;
}

/// Entanglement-assisted capacity max_S I(S, Phi).
///
/// With assume_covariant the maximiser is taken to be I/d (valid for
/// irreducibly covariant channels); the caller is responsible for that
/// assertion. Otherwise multi-start ascent over S = AA^dag / Tr AA^dag.
inline OptimizationResult ea_capacity(const QuantumChannel& ch, const OptimizerOptions& opts,
                                      bool assume_covariant) {
  if (opts.restarts < 1) detail::fail("ea_capacity: restarts must be >= 1");
  if (ch.in_dim() != ch.out_dim()) detail::fail("ea_capacity: channel must be square");
  const Eigen::Index d = ch.dim();
  auto f = [&](const ComplexMatrix& a) {
    return mutual_information(ch, detail::as_state(a * a.adjoint() / a.squaredNorm()), opts.base);
  };
  auto grad = [&](const ComplexMatrix& a) { return mutual_information_gradient(ch, a, opts.base); };

  OptimizationResult best;
  if (assume_covariant) {
    const ComplexMatrix a = ComplexMatrix::Identity(d, d) / std::sqrt(double(d));
    best.value = f(a);
    best.argument = ComplexMatrix::Identity(d, d) / double(d);
    best.gradient_norm = grad(a).norm();
    best.converged = best.gradient_norm <= opts.tol;
    best.restarts_used = 0;
    best.restart_values = {best.value};
    return best;
  }
  bool have = false;
  for (int r = 0; r < opts.restarts; ++r) {
    std::mt19937_64 rng(detail::mix_seed(opts.seed, r));
    const ComplexMatrix a0 = detail::gaussian_matrix(d, d, rng);
    const detail::LocalRun run = detail::sphere_descent(a0, f, grad, -1.0, opts);
    best.restart_values.push_back(run.value);
    if (!have || detail::better(run.value, best.value, -1.0)) {
      have = true;
      best.value = run.value;
      best.argument = run.point * run.point.adjoint();
      best.best_restart = r;
      best.converged = run.converged;
      best.gradient_norm = run.gradient_norm;
      best.iterations = run.iterations;
    }
  }
  best.restarts_used = opts.restarts;
  return best;
}

// ---------------------------------------------------------------------------
// Pure-state decompositions and the entropy-exchange inequality.

/// Decomposition S = sum_j |v_j><v_j| with v_j = sum_i U_{ji} sqrt(l_i) e_i,
/// where (l_i, e_i) are the eigenpairs of S above 1e-12 and U has at least
/// rank(S) rows and orthonormal first rank(S) columns.
inline Ensemble decomposition_from_unitary(const DensityMatrix& s, const ComplexMatrix& u) {
  const Eigensystem es = hermitian_eigensystem(s.matrix());
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < es.values.size(); ++i) {
    if (es.values(i) > 1e-12) support.push_back(i);
  }
  const Eigen::Index r = static_cast<Eigen::Index>(support.size());
  if (u.rows() < r || u.cols() < r) {
    detail::fail("decomposition_from_unitary: unitary of size ", u.rows(), " is smaller than rank ", r);
  }
  std::vector<double> probs;
  std::vector<DensityMatrix> states;
  double total = 0.0;
  for (Eigen::Index j = 0; j < u.rows(); ++j) {
    ComplexVector v = ComplexVector::Zero(s.dim());
    for (Eigen::Index c = 0; c < r; ++c) {
      v += u(j, c) * std::sqrt(es.values(support[c])) * es.vectors.col(support[c]);
    }
    const double w = v.squaredNorm();
    if (w < 1e-15) continue;
    probs.push_back(w);
    states.push_back(PureState::normalized(v).projector());
    total += w;
  }
  for (double& p : probs) p /= total;
  return {probs, states};
}

/// k random pure-state decompositions of S; decomposition sizes range over
/// [rank, 2 rank] (exactly 1 for pure S).
inline std::vector<Ensemble> pure_decompositions(const DensityMatrix& s, int k, std::uint64_t seed) {
  if (k < 1) detail::fail("pure_decompositions: count must be >= 1");
  const Eigen::Index r = numerical_rank(s.matrix(), 1e-12);
  std::mt19937_64 rng(seed);
  std::vector<Ensemble> out;
  for (int i = 0; i < k; ++i) {
    const Eigen::Index m = r == 1 ? 1 : r + static_cast<Eigen::Index>(rng() % (r + 1));
    out.push_back(decomposition_from_unitary(s, random_unitary(m, detail::mix_seed(seed, i))));
  }
  return out;
}

inline constexpr double kInequalityTol = 1e-9;

/// H(S, Phi) >= sum_j p_j H(Phi[S_j]) for each pure decomposition of S.
inline std::vector<InequalityReport> check_eex(const QuantumChannel& ch, const DensityMatrix& s,
                                               const std::vector<Ensemble>& decompositions,
                                               EntropyBase base = EntropyBase::Two) {
  const double right = entropy_exchange(ch, s, base);
  std::vector<InequalityReport> out;
  for (std::size_t i = 0; i < decompositions.size(); ++i) {
    const Ensemble& e = decompositions[i];
    const double mismatch = (e.average() - s.matrix()).norm();
    if (mismatch > 1e-8) {
      detail::fail("check_eex: decomposition ", i, " averages to a state at distance ", mismatch,
                   " from S");
    }
    double left = 0.0;
    for (std::size_t j = 0; j < e.size(); ++j) {
      left += e.probs()[j] * von_neumann_entropy(apply(ch, e.states()[j]), base);
    }
    out.push_back(make_inequality(left, right, kInequalityTol,
                                  detail::concat("decomposition ", i, " with ", e.size(), " pure states")));
  }
  return out;
}

struct EaBoundReport {
  InequalityReport inequality;
  /// The one-shot capacity was not certified, so no conclusion is drawn.
  bool inconclusive = false;
  /// "shortcut:weyl", "shortcut:conjugate-weyl" or "optimizer".
  std::string ea_route;
  OptimizationResult ea;
  OneShotCapacity one_shot;
};

inline constexpr double kEaBoundTol = 1e-6;

/// C_ea(Phi) <= log d + C1(Phi). The maximally mixed shortcut for C_ea is used
/// only after a passing covariance check under the Weyl representation
/// (directly or in the conjugate-representation form).
inline EaBoundReport check_ea_bound(const QuantumChannel& ch, const FiniteAbelianGroup& g,
                                    const OptimizerOptions& opts) {
  EaBoundReport rep;
  const std::vector<ComplexMatrix> ws = weyl_representation(g);
  rep.one_shot = one_shot_capacity_covariant(ch, g, opts);
  if (is_covariant(ch, ws, ws, 1e-10).verdict) {
    rep.ea_route = "shortcut:weyl";
    rep.ea = ea_capacity(ch, opts, true);
  } else if (is_covariant(ch, ws, conjugate_representation(ws), 1e-10).verdict) {
    rep.ea_route = "shortcut:conjugate-weyl";
    rep.ea = ea_capacity(ch, opts, true);
  } else {
    rep.ea_route = "optimizer";
    rep.ea = ea_capacity(ch, opts, false);
  }
  const double right = log_dim(ch.dim(), opts.base) + rep.one_shot.candidate;
  rep.inequality = make_inequality(rep.ea.value, right, kEaBoundTol,
                                   "C_ea via " + rep.ea_route + ", one-shot via Weyl orbit");
  rep.inconclusive = !rep.one_shot.certified;
  return rep;
}

struct MultiplicativityReport {
  double hmin_single = 0.0;
  double hmin_product = 0.0;
  double entangled_point = 0.0;
  /// 2 Hmin(Phi) - Hmin(Phi (x) Phi).
  double gap = 0.0;
  double tolerance = 1e-6;
  bool invariant_holds = false;
  OptimizationResult single;
  OptimizationResult product;
};

/// Desk-scale probe of minimal output entropy additivity for Phi (x) Phi.
/// The product search is seeded with psi_min (x) psi_min, so the reported
/// Hmin(Phi (x) Phi) never exceeds 2 Hmin(Phi) beyond round-off.
inline MultiplicativityReport multiplicativity_probe(const QuantumChannel& ch,
                                                     const OptimizerOptions& opts) {
  if (ch.in_dim() != ch.out_dim()) detail::fail("multiplicativity_probe: channel must be square");
  const Eigen::Index d = ch.dim();
  if (d > 4) detail::fail("multiplicativity_probe: dimension ", d, " exceeds the supported maximum 4");
  MultiplicativityReport rep;
  rep.single = min_output_entropy(ch, opts);
  rep.hmin_single = rep.single.value;
  const QuantumChannel both = tensor(ch, ch);
  const ComplexVector seed_state = Eigen::kroneckerProduct(*rep.single.pure, *rep.single.pure).eval();
  OptimizerOptions popts = opts;
  popts.seed = detail::mix_seed(opts.seed, 0x5eed);
  rep.product = min_output_entropy(both, popts, {seed_state});
  rep.hmin_product = rep.product.value;

  ComplexVector omega = ComplexVector::Zero(d * d);
  for (Eigen::Index j = 0; j < d; ++j) omega(j * d + j) = 1.0 / std::sqrt(double(d));
  rep.entangled_point = output_entropy(both, omega, opts.base);
  rep.gap = 2.0 * rep.hmin_single - rep.hmin_product;
  rep.invariant_holds = rep.hmin_product <= 2.0 * rep.hmin_single + rep.tolerance;
  return rep;
}

}  // namespace qcap

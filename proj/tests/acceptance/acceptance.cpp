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

// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "qcap/capacity.hpp"

using namespace qcap;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const std::vector<std::vector<int>> kGroups = {{2}, {3}, {4}, {5}, {2, 2}, {2, 3}};
const std::vector<std::vector<int>> kSmallGroups = {{2}, {3}, {4}, {2, 2}};
const double kLog3 = std::log2(3.0);

double h2(double p) { return -p * std::log2(p) - (1 - p) * std::log2(1 - p); }

// exp(2 pi i sum_j a_j b_j / d_j), evaluated directly.
Complex character(const FiniteAbelianGroup& g, const std::vector<int>& a, const std::vector<int>& b) {
  double angle = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    angle += 2.0 * std::numbers::pi * double((a[j] * b[j]) % g.orders()[j]) / g.orders()[j];
  }
  return std::polar(1.0, angle);
}

// phi(z) = sum_{x,y} exp i(<x,alpha> + <beta,y>) p(x,y), evaluated directly.
ComplexVector characteristic_oracle(const FiniteAbelianGroup& g, const RealVector& p) {
  const int n = g.phase_space_size();
  const int d = g.total_dim();
  ComplexVector phi = ComplexVector::Zero(n);
  for (int zi = 0; zi < n; ++zi) {
    const PhaseSpacePoint z = point_at(g, zi);
    for (int xi = 0; xi < d; ++xi) {
      for (int yi = 0; yi < d; ++yi) {
        phi(zi) += character(g, g.tuple_at(xi), z.alpha) * character(g, z.beta, g.tuple_at(yi)) * p(xi * d + yi);
      }
    }
  }
  return phi;
}

OptimizerOptions options(int restarts, std::uint64_t seed) {
  OptimizerOptions o;
  o.restarts = restarts;
  o.seed = seed;
  return o;
}

Outcome ac1() {
  double ccr = 0, conj = 0, unit = 0, orth = 0;
  for (const auto& orders : kGroups) {
    const FiniteAbelianGroup g(orders);
    const int n = g.phase_space_size(), d = g.total_dim();
    std::vector<ComplexMatrix> w;
    for (int i = 0; i < n; ++i) w.push_back(weyl_operator(g, point_at(g, i)));
    for (int a = 0; a < n; ++a) {
      const PhaseSpacePoint za = point_at(g, a);
      unit = std::max(unit, (w[a].adjoint() * w[a] - ComplexMatrix::Identity(d, d)).norm());
      for (int b = 0; b < n; ++b) {
        const PhaseSpacePoint zb = point_at(g, b);
        const ComplexMatrix sum = weyl_operator(g, add(g, za, zb));
        ccr = std::max(ccr, (w[a] * w[b] - character(g, za.beta, zb.alpha) * sum).norm());
        const Complex phase = character(g, zb.beta, za.alpha) / character(g, za.beta, zb.alpha);
        conj = std::max(conj, (w[a].adjoint() * w[b] * w[a] - phase * w[b]).norm());
      }
    }
    for (std::uint64_t s = 0; s < 20; ++s) {
      const ComplexMatrix rho = random_density_matrix(d, d, 1000 + s).matrix();
      ComplexMatrix avg = ComplexMatrix::Zero(d, d);
      for (const ComplexMatrix& m : w) avg += m * rho * m.adjoint();
      orth = std::max(orth, (avg / double(n) - ComplexMatrix::Identity(d, d) / double(d)).norm());
    }
  }
  const double worst = std::max({ccr, conj, unit, orth});
  return {worst <= 1e-12, fmt("ccr %.1e, conjugation %.1e, unitarity %.1e, orthogonality %.1e (tol 1e-12)", ccr,
                              conj, unit, orth)};
}

Outcome ac2() {
  double round_trip = 0;
  int rejected = 0, candidates = 0, disagreements = 0;
  for (const auto& orders : kGroups) {
    const FiniteAbelianGroup g(orders);
    const int n = g.phase_space_size();
    std::mt19937_64 rng(17);
    for (std::uint64_t t = 0; t < 100; ++t) {
      const PhaseSpaceDistribution p = PhaseSpaceDistribution::random(g, 500 + t);
      const ComplexVector phi = characteristic_oracle(g, p.probs());
      const PhaseSpaceDistribution back = distribution_from_characteristic(CharacteristicFunction(g, phi));
      round_trip = std::max(round_trip, (back.probs() - p.probs()).cwiseAbs().maxCoeff());

      const int k = 1 + int(rng() % (n - 1));
      ComplexVector bad;
      if (t % 2 == 0) {
        RealVector q = p.probs();
        q(0) += q(k) + 0.05;
        q(k) = -0.05;
        bad = characteristic_oracle(g, q);
      } else {
        bad = phi;
        bad(k) += Complex(0.0, 0.3);
      }
      const PositiveDefiniteReport r = is_positive_definite(CharacteristicFunction(g, bad));
      ++candidates;
      if (!r.positive && r.witness != PositiveDefiniteReport::Witness::None) ++rejected;
      if (r.coefficient_test != r.gram_test) ++disagreements;
    }
  }
  return {round_trip <= 1e-12 && rejected == candidates && disagreements == 0,
          fmt("round trip %.1e (tol 1e-12), rejected %d/%d with witnesses, coefficient/Gram disagreements %d",
              round_trip, rejected, candidates, disagreements)};
}

Outcome ac3() {
  double prop = 0, cov = 0, converse = 0;
  for (const auto& orders : kSmallGroups) {
    const FiniteAbelianGroup g(orders);
    const int n = g.phase_space_size();
    const std::vector<ComplexMatrix> ws = weyl_representation(g);
    for (std::uint64_t t = 0; t < 50; ++t) {
      const PhaseSpaceDistribution p = PhaseSpaceDistribution::random(g, 2000 + t);
      const QuantumChannel ch = weyl_channel(g, p);
      const ComplexVector phi = characteristic_oracle(g, p.probs());
      for (int i = 0; i < n; ++i) prop = std::max(prop, (apply_operator(ch, ws[i]) - phi(i) * ws[i]).norm());
      cov = std::max(cov, is_covariant(ch, ws, ws, 1e-10).max_residual);

      const ComplexVector other = characteristic_oracle(g, PhaseSpaceDistribution::random(g, 3000 + t).probs());
      const CharacteristicFunction pd(g, phi.cwiseProduct(other));
      const QuantumChannel built = weyl_channel(g, distribution_from_characteristic(pd));
      for (int i = 0; i < n; ++i) {
        converse = std::max(converse, (apply_operator(built, ws[i]) - pd.values()(i) * ws[i]).norm());
      }
    }
  }
  return {std::max({prop, cov, converse}) <= 1e-10,
          fmt("proportionality %.1e, covariance %.1e, converse %.1e (tol 1e-10)", prop, cov, converse)};
}

Outcome ac4() {
  const QuantumChannel wh = werner_holevo(3);
  const OptimizationResult hmin = min_output_entropy(wh, options(10, 1));
  double spread = 0;
  for (std::uint64_t s = 0; s < 100000; ++s) {
    spread = std::max(spread, std::abs(output_entropy(wh, random_pure_state(3, s).amplitudes()) - 1.0));
  }
  const OneShotCapacity c1 = one_shot_capacity_covariant(wh, make_group({3}), options(10, 2));
  const double shortcut = ea_capacity(wh, options(1, 3), true).value;
  const double general = ea_capacity(wh, options(10, 3), false).value;
  const bool ok = std::abs(hmin.value - 1.0) <= 1e-6 && spread <= 1e-9 && c1.certified &&
                  std::abs(*c1.value - (kLog3 - 1)) <= 1e-6 && c1.gap <= 1e-6 &&
                  std::abs(general - kLog3) <= 1e-4 && std::abs(general - shortcut) <= 1e-4;
  return {ok, fmt("Hmin %.9f (1 +- 1e-6), pure-input spread %.1e (1e-9), C1 %.9f gap %.1e, C_ea %.9f vs I/3 %.9f",
                  hmin.value, spread, c1.candidate, c1.gap, general, shortcut)};
}

Outcome ac5() {
  const QuantumChannel dep = depolarizing(2, 0.5);
  const double hmin = min_output_entropy(dep, options(10, 4)).value;
  const OneShotCapacity c1 = one_shot_capacity_covariant(dep, make_group({2}), options(10, 5));
  const bool ok = std::abs(hmin - h2(0.25)) <= 1e-6 && c1.certified && std::abs(*c1.value - (1 - h2(0.25))) <= 1e-6;
  return {ok, fmt("Hmin %.9f (expected %.9f), C1 %.9f (expected %.9f), certified %s", hmin, h2(0.25), c1.candidate,
                  1 - h2(0.25), c1.certified ? "yes" : "no")};
}

Outcome ac6() {
  int triples = 0;
  double min_slack = 1e300, pure_slack = 0;
  std::mt19937_64 rng(2026);
  for (int t = 0; t < 200; ++t) {
    const Eigen::Index d = 2 + Eigen::Index(rng() % 3);
    const Eigen::Index kc = 1 + Eigen::Index(rng() % 4);
    const Eigen::Index rank = 2 + Eigen::Index(rng() % (d - 1));
    const QuantumChannel ch = random_channel(d, kc, rng());
    const DensityMatrix s = random_density_matrix(d, rank, rng());
    const double right = von_neumann_entropy(DensityMatrix(environment_state(ch, s).matrix()));
    for (const Ensemble& e : pure_decompositions(s, 5, rng())) {
      double left = 0;
      for (std::size_t j = 0; j < e.size(); ++j) left += e.probs()[j] * von_neumann_entropy(apply(ch, e.states()[j]));
      min_slack = std::min(min_slack, right - left);
      ++triples;
    }
    const DensityMatrix psi = random_pure_state(d, rng()).projector();
    pure_slack = std::max(pure_slack, std::abs(entropy_exchange(ch, psi) - von_neumann_entropy(apply(ch, psi))));
  }
  return {triples >= 200 && min_slack >= -1e-9 && pure_slack <= 1e-9,
          fmt("%d triples, min slack %.2e (>= -1e-9), pure |slack| %.1e (<= 1e-9)", triples, min_slack, pure_slack)};
}

Outcome ac7() {
  bool ok = true;
  double id_dev = 0, dep_dev = 0, worst_random = 1e300;
  for (int d : {2, 3, 4}) {
    const double s = check_ea_bound(identity_channel(d), make_group({d}), options(5, 6)).inequality.slack;
    id_dev = std::max(id_dev, std::abs(s));
    const double t = check_ea_bound(depolarizing(d, 1.0), make_group({d}), options(5, 7)).inequality.slack;
    dep_dev = std::max(dep_dev, std::abs(t - std::log2(double(d))));
  }
  const EaBoundReport wh = check_ea_bound(werner_holevo(3), make_group({3}), options(10, 8));
  ok = id_dev <= 1e-9 && dep_dev <= 1e-9 && std::abs(wh.inequality.slack - (kLog3 - 1)) <= 1e-3 && !wh.inconclusive;
  int inconclusive = 0;
  for (int d : {2, 3}) {
    const FiniteAbelianGroup g = make_group({d});
    for (std::uint64_t t = 0; t < 20; ++t) {
      const EaBoundReport r =
          check_ea_bound(weyl_channel(g, PhaseSpaceDistribution::random(g, 4000 + t)), g, options(10, t));
      worst_random = std::min(worst_random, r.inequality.slack);
      if (r.inconclusive) ++inconclusive;
    }
  }
  ok = ok && worst_random >= -1e-6 && inconclusive == 0;
  return {ok, fmt("identity |slack| %.1e, depolarizing |slack - log d| %.1e, WH slack %.6f (0.585 +- 1e-3), "
                  "random Weyl min slack %.3e over 40 (inconclusive %d)",
                  id_dev, dep_dev, wh.inequality.slack, worst_random, inconclusive)};
}

Outcome ac8() {
  const FiniteAbelianGroup g = make_group({3});
  const PhaseSpaceDistribution p = PhaseSpaceDistribution::random(g, 77);
  const ComplexMatrix x = random_density_matrix(3, 3, 78).matrix();
  const std::size_t n = 100000;
  const double bound = 5.0 / std::sqrt(double(n));
  int below = 0;
  double worst = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const double e = dilation_sample(g, p, x, n, 9000 + s).frobenius_error;
    worst = std::max(worst, e);
    if (e < bound) ++below;
  }
  const double exhaustive = (dilation_exhaustive(g, p, x) - apply_operator(weyl_channel(g, p), x)).norm();
  return {below >= 19 && exhaustive <= 1e-12,
          fmt("%d/20 runs below %.2e (worst %.2e), exhaustive residual %.1e (tol 1e-12)", below, bound, worst,
              exhaustive)};
}

Outcome ac9() {
  const QuantumChannel wh = werner_holevo(3);
  std::vector<ComplexMatrix> os, us;
  for (std::uint64_t s = 0; s < 20; ++s) {
    os.push_back(random_unitary(3, 100 + s, true));
    us.push_back(random_unitary(3, 200 + s));
  }
  const CovarianceReport plain = is_covariant(wh, os, os, 1e-10);
  const CovarianceReport conj = is_covariant(wh, us, conjugate_representation(us), 1e-10);
  double d_res = 0;
  for (std::size_t i = 0; i < 20; ++i) {
    const TensorOperatorReport a = tensor_operator_matrix(wh, os[i], os[i], 1e-8);
    const TensorOperatorReport b = tensor_operator_matrix(wh, us[i], us[i].conjugate(), 1e-8);
    d_res = std::max({d_res, a.residual, a.unitarity_residual, b.residual, b.unitarity_residual});
  }
  return {plain.verdict && conj.verdict && plain.max_residual <= 1e-10 && conj.max_residual <= 1e-10 && d_res <= 1e-8,
          fmt("orthogonal %.1e, conjugate %.1e (tol 1e-10), D residual %.1e (tol 1e-8)", plain.max_residual,
              conj.max_residual, d_res)};
}

// Error of the analytic gradient against a full central-difference gradient
// over every real coordinate, relative to max(|analytic|, 1).
double gradient_error(const ComplexMatrix& x, const ComplexMatrix& analytic,
                      const std::function<double(const ComplexMatrix&)>& f) {
  const double h = 1e-5;
  ComplexMatrix fd = ComplexMatrix::Zero(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    for (Complex unit : {Complex(1, 0), Complex(0, 1)}) {
      ComplexMatrix plus = x, minus = x;
      plus(i) += h * unit;
      minus(i) -= h * unit;
      fd(i) += unit * (f(plus) - f(minus)) / (2 * h);
    }
  }
  return (fd - analytic).norm() / std::max(analytic.norm(), 1.0);
}

Outcome ac10() {
  const std::vector<QuantumChannel> channels = {random_channel(2, 2, 1), random_channel(3, 3, 2),
                                                random_channel(4, 2, 3), depolarizing(2, 0.5), werner_holevo(3)};
  double worst_h = 0, worst_i = 0;
  int points = 0;
  for (std::uint64_t t = 0; t < 50; ++t) {
    const QuantumChannel& ch = channels[t % channels.size()];
    const Eigen::Index d = ch.dim();
    const ComplexVector psi = random_pure_state(d, 700 + t).amplitudes();
    worst_h = std::max(worst_h, gradient_error(psi, output_entropy_gradient(ch, psi), [&](const ComplexMatrix& v) {
                         return output_entropy(ch, ComplexVector(v.col(0) / v.norm()));
                       }));
    std::mt19937_64 rng(800 + t);
    ComplexMatrix a = detail::gaussian_matrix(d, d, rng);
    a /= a.norm();
    worst_i = std::max(worst_i, gradient_error(a, mutual_information_gradient(ch, a), [&](const ComplexMatrix& m) {
                         return mutual_information(ch, DensityMatrix(m * m.adjoint() / m.squaredNorm()));
                       }));
    ++points;
  }
  return {worst_h <= 1e-5 && worst_i <= 1e-5,
          fmt("%d points: output-entropy gradient %.1e, mutual-information gradient %.1e (tol 1e-5)", points, worst_h,
              worst_i)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* id;
    const char* name;
    double limit_s;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"AC1", "Weyl algebra", 5, ac1},
      {"AC2", "Fourier/Bochner", 5, ac2},
      {"AC3", "Weyl channel structure", 30, ac3},
      {"AC4", "Werner-Holevo d=3", 60, ac4},
      {"AC5", "depolarizing d=2 p=0.5", 10, ac5},
      {"AC6", "entropy-exchange inequality", 60, ac6},
      {"AC7", "C_ea <= log d + C1", 120, ac7},
      {"AC8", "dilation Monte Carlo", 30, ac8},
      {"AC9", "covariance and tensor operators", 10, ac9},
      {"AC10", "gradient check", 10, ac10},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool pass = o.pass && secs < c.limit_s;
    if (!pass) ++failures;
    std::printf("%-4s %s  %s: %s; %.2f s (limit %.0f s)\n", c.id, pass ? "PASS" : "FAIL", c.name, o.detail.c_str(),
                secs, c.limit_s);
  }
  std::printf("%d/%zu criteria passed\n", int(std::size(criteria)) - failures, std::size(criteria));
  return failures == 0 ? 0 : 1;
}

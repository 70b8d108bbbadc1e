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

// Phase space of a finite abelian group H = Z_{d_1} + ... + Z_{d_s}.
//
// Conventions (all checked against explicit matrices in the tests):
//   * omega_d = exp(2 pi i / d); per factor U_a |k> = |k + a mod d>,
//     V_b |k> = omega_d^{b k} |k>; W_z = U_alpha V_beta for z = (alpha, beta).
//   * Composite groups use Kronecker products in the declared factor order,
//     so basis and tuple indices are lexicographic with the first factor most
//     significant.
//   * The dual group is identified with H component-wise and paired by
//     <b, a> = 2 pi sum_j b_j a_j / d_j (mod 2 pi).
//   * A phase-space point z = (alpha, beta) has dense index
//     index(alpha) * d + index(beta); a dual point (x, y) likewise.
//
// With these conventions
//   W_z W_z'          = exp(i <beta, alpha'>) W_{z+z'}
//   W_z^dag W_z' W_z  = exp(i (<beta', alpha> - <beta, alpha'>)) W_z'.

#pragma once

#include <unsupported/Eigen/KroneckerProduct>

#include <cstdint>
#include <numbers>
#include <numeric>
#include <optional>
#include <vector>

#include "qcap/spectral.hpp"

namespace qcap {

using Tuple = std::vector<int>;

class FiniteAbelianGroup {
 public:
  explicit FiniteAbelianGroup(std::vector<int> orders) : orders_(std::move(orders)) {
    if (orders_.empty()) detail::fail("make_group: order list is empty");
    total_ = 1;
    for (std::size_t j = 0; j < orders_.size(); ++j) {
      if (orders_[j] < 2) {
        detail::fail("make_group: cyclic order ", orders_[j], " at position ", j,
                     " is below 2");
      }
      total_ *= orders_[j];
      lcm_ = std::lcm(lcm_, static_cast<std::int64_t>(orders_[j]));
    }
  }

  const std::vector<int>& orders() const { return orders_; }
  std::size_t factors() const { return orders_.size(); }
  /// d = prod d_j, the Hilbert-space dimension.
  int total_dim() const { return total_; }
  /// |G| = d^2 phase-space points.
  int phase_space_size() const { return total_ * total_; }
  std::int64_t exponent() const { return lcm_; }

  void check_tuple(const Tuple& t, const char* what) const {
    if (t.size() != orders_.size()) {
      detail::fail(what, ": tuple has ", t.size(), " components, group has ",
                   orders_.size(), " factors");
    }
  }

  Tuple reduce(Tuple t) const {
    check_tuple(t, "reduce");
    for (std::size_t j = 0; j < t.size(); ++j) {
      t[j] %= orders_[j];
      if (t[j] < 0) t[j] += orders_[j];
    }
    return t;
  }

  int tuple_index(const Tuple& t) const {
    check_tuple(t, "tuple_index");
    int idx = 0;
    for (std::size_t j = 0; j < t.size(); ++j) idx = idx * orders_[j] + t[j];
    return idx;
  }

  Tuple tuple_at(int index) const {
    if (index < 0 || index >= total_) detail::fail("tuple_at: index ", index, " out of range");
    Tuple t(orders_.size());
    for (std::size_t j = orders_.size(); j-- > 0;) {
      t[j] = index % orders_[j];
      index /= orders_[j];
    }
    return t;
  }

  bool operator==(const FiniteAbelianGroup& o) const { return orders_ == o.orders_; }

 private:
  std::vector<int> orders_;
  int total_ = 1;
  std::int64_t lcm_ = 1;
};

inline FiniteAbelianGroup make_group(std::vector<int> orders) {
  return FiniteAbelianGroup(std::move(orders));
}

/// z = (alpha, beta) in H + H^.
struct PhaseSpacePoint {
  Tuple alpha;
  Tuple beta;

  bool operator==(const PhaseSpacePoint&) const = default;
};

inline PhaseSpacePoint make_point(const FiniteAbelianGroup& g, Tuple alpha, Tuple beta) {
  return {g.reduce(std::move(alpha)), g.reduce(std::move(beta))};
}

inline PhaseSpacePoint zero_point(const FiniteAbelianGroup& g) {
  return {Tuple(g.factors(), 0), Tuple(g.factors(), 0)};
}

inline int point_index(const FiniteAbelianGroup& g, const PhaseSpacePoint& z) {
  return g.tuple_index(g.reduce(z.alpha)) * g.total_dim() + g.tuple_index(g.reduce(z.beta));
}

inline PhaseSpacePoint point_at(const FiniteAbelianGroup& g, int index) {
  if (index < 0 || index >= g.phase_space_size()) {
    detail::fail("point_at: index ", index, " out of range");
  }
  return {g.tuple_at(index / g.total_dim()), g.tuple_at(index % g.total_dim())};
}

/// Every phase-space point, in dense index order.
inline std::vector<PhaseSpacePoint> all_points(const FiniteAbelianGroup& g) {
  std::vector<PhaseSpacePoint> pts;
  pts.reserve(g.phase_space_size());
  for (int i = 0; i < g.phase_space_size(); ++i) pts.push_back(point_at(g, i));
  return pts;
}

inline PhaseSpacePoint add(const FiniteAbelianGroup& g, const PhaseSpacePoint& a,
                           const PhaseSpacePoint& b) {
  g.check_tuple(a.alpha, "add");
  g.check_tuple(b.alpha, "add");
  Tuple al(g.factors()), be(g.factors());
  for (std::size_t j = 0; j < g.factors(); ++j) {
    al[j] = a.alpha[j] + b.alpha[j];
    be[j] = a.beta[j] + b.beta[j];
  }
  return make_point(g, al, be);
}

inline PhaseSpacePoint negate(const FiniteAbelianGroup& g, const PhaseSpacePoint& a) {
  Tuple al(a.alpha), be(a.beta);
  for (auto& v : al) v = -v;
  for (auto& v : be) v = -v;
  return make_point(g, al, be);
}

namespace detail {

// Pairing numerator: <b, a> = 2 pi * n / exponent with n in [0, exponent).
inline std::int64_t pairing_numerator(const FiniteAbelianGroup& g, const Tuple& b,
                                      const Tuple& a) {
  g.check_tuple(b, "duality_pairing");
  g.check_tuple(a, "duality_pairing");
  const std::int64_t e = g.exponent();
  std::int64_t n = 0;
  for (std::size_t j = 0; j < g.factors(); ++j) {
    const std::int64_t dj = g.orders()[j];
    std::int64_t prod = (static_cast<std::int64_t>(b[j]) * a[j]) % dj;
    if (prod < 0) prod += dj;
    n = (n + prod * (e / dj)) % e;
  }
  return n;
}

inline double angle_from_numerator(std::int64_t n, std::int64_t e) {
  n %= e;
  if (n < 0) n += e;
  return 2.0 * std::numbers::pi * static_cast<double>(n) / static_cast<double>(e);
}

inline Complex unit_phase(std::int64_t n, std::int64_t e) {
  return std::polar(1.0, angle_from_numerator(n, e));
}

// Character of G evaluated at z for the dual point (x, y):
// exp i(<x, alpha> + <beta, y>), returned as a numerator over the exponent.
inline std::int64_t character_numerator(const FiniteAbelianGroup& g, const PhaseSpacePoint& z,
                                        const Tuple& x, const Tuple& y) {
  return pairing_numerator(g, x, z.alpha) + pairing_numerator(g, z.beta, y);
}

}  // namespace detail

/// <beta, alpha> in [0, 2 pi).
inline double duality_pairing(const FiniteAbelianGroup& g, const Tuple& beta,
                              const Tuple& alpha) {
  return detail::angle_from_numerator(detail::pairing_numerator(g, beta, alpha), g.exponent());
}

/// W_z = U_alpha V_beta as a d x d unitary.
inline ComplexMatrix weyl_operator(const FiniteAbelianGroup& g, const PhaseSpacePoint& z) {
  const PhaseSpacePoint r = make_point(g, z.alpha, z.beta);
  ComplexMatrix w = ComplexMatrix::Identity(1, 1);
  for (std::size_t j = 0; j < g.factors(); ++j) {
    const int d = g.orders()[j];
    ComplexMatrix f = ComplexMatrix::Zero(d, d);
    for (int k = 0; k < d; ++k) {
      // (U_a V_b)|k> = omega^{b k} |k + a>.
      f((k + r.alpha[j]) % d, k) = detail::unit_phase(static_cast<std::int64_t>(r.beta[j]) * k, d);
    }
    ComplexMatrix next = Eigen::kroneckerProduct(w, f).eval();
    w = std::move(next);
  }
  return w;
}

/// theta with W_z W_z' = e^{i theta} W_{z+z'}; theta = <beta, alpha'>.
inline double composition_phase(const FiniteAbelianGroup& g, const PhaseSpacePoint& z,
                                const PhaseSpacePoint& zp) {
  return duality_pairing(g, z.beta, zp.alpha);
}

/// theta with W_z^dag W_z' W_z = e^{i theta} W_z'.
inline double conjugation_phase(const FiniteAbelianGroup& g, const PhaseSpacePoint& z,
                                const PhaseSpacePoint& zp) {
  const std::int64_t n = detail::pairing_numerator(g, zp.beta, z.alpha) -
                         detail::pairing_numerator(g, z.beta, zp.alpha);
  return detail::angle_from_numerator(n, g.exponent());
}

/// Probability distribution {p_{x,y}} on the dual phase space, dense in
/// lexicographic (x, y) order.
class PhaseSpaceDistribution {
 public:
  static constexpr double kSumTol = 1e-12;

  PhaseSpaceDistribution(FiniteAbelianGroup group, RealVector probs)
      : group_(std::move(group)), probs_(std::move(probs)) {
    if (probs_.size() != group_.phase_space_size()) {
      detail::fail("PhaseSpaceDistribution: expected ", group_.phase_space_size(),
                   " probabilities, got ", probs_.size());
    }
    for (Eigen::Index i = 0; i < probs_.size(); ++i) {
      if (!std::isfinite(probs_(i)) || probs_(i) < 0.0) {
        detail::fail("PhaseSpaceDistribution: probability ", probs_(i), " at index ", i,
                     " is negative or non-finite");
      }
    }
    const double s = probs_.sum();
    if (std::abs(s - 1.0) > kSumTol) {
      detail::fail("PhaseSpaceDistribution: probabilities sum to ", s,
                   ", not 1 within ", kSumTol);
    }
  }

  static PhaseSpaceDistribution point_mass(const FiniteAbelianGroup& g, int index = 0) {
    RealVector p = RealVector::Zero(g.phase_space_size());
    p(index) = 1.0;
    return {g, p};
  }

  static PhaseSpaceDistribution uniform(const FiniteAbelianGroup& g) {
    return {g, RealVector::Constant(g.phase_space_size(), 1.0 / g.phase_space_size())};
  }

  /// Dirichlet(1,...,1) sample: normalised i.i.d. exponentials.
  static PhaseSpaceDistribution random(const FiniteAbelianGroup& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> ex(1.0);
    RealVector p(g.phase_space_size());
    for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = ex(rng);
    p /= p.sum();
    return {g, p};
  }

  const FiniteAbelianGroup& group() const { return group_; }
  const RealVector& probs() const { return probs_; }
  double at(const Tuple& x, const Tuple& y) const {
    return probs_(group_.tuple_index(group_.reduce(x)) * group_.total_dim() +
                  group_.tuple_index(group_.reduce(y)));
  }

 private:
  FiniteAbelianGroup group_;
  RealVector probs_;
};

/// Function phi on G, dense in phase-space point order. Only phi(0) = 1 is
/// enforced; boundedness follows from positive definiteness and is reported
/// by is_positive_definite.
class CharacteristicFunction {
 public:
  static constexpr double kOriginTol = 1e-12;

  CharacteristicFunction(FiniteAbelianGroup group, ComplexVector values)
      : group_(std::move(group)), values_(std::move(values)) {
    if (values_.size() != group_.phase_space_size()) {
      detail::fail("CharacteristicFunction: expected ", group_.phase_space_size(),
                   " values, got ", values_.size());
    }
    if (std::abs(values_(0) - Complex(1.0)) > kOriginTol) {
      detail::fail("CharacteristicFunction: phi(0) = ", values_(0).real(), "+",
                   values_(0).imag(), "i, expected 1");
    }
  }

  const FiniteAbelianGroup& group() const { return group_; }
  const ComplexVector& values() const { return values_; }
  Complex at(const PhaseSpacePoint& z) const { return values_(point_index(group_, z)); }

 private:
  FiniteAbelianGroup group_;
  ComplexVector values_;
};

/// phi(z) = sum_{x,y} exp i(<x, alpha> + <beta, y>) p_{x,y}.
inline ComplexVector fourier_transform(const FiniteAbelianGroup& g, const RealVector& p) {
  const int n = g.phase_space_size();
  const int d = g.total_dim();
  ComplexVector phi = ComplexVector::Zero(n);
  std::vector<Tuple> tuples;
  for (int i = 0; i < d; ++i) tuples.push_back(g.tuple_at(i));
  for (int zi = 0; zi < n; ++zi) {
    const PhaseSpacePoint z = point_at(g, zi);
    Complex acc = 0.0;
    for (int xi = 0; xi < d; ++xi) {
      for (int yi = 0; yi < d; ++yi) {
        const double w = p(xi * d + yi);
        if (w == 0.0) continue;
        acc += w * detail::unit_phase(detail::character_numerator(g, z, tuples[xi], tuples[yi]),
                                      g.exponent());
      }
    }
    phi(zi) = acc;
  }
  return phi;
}

/// Inverse transform: |G|^{-1} sum_z exp(-i(<x, alpha> + <beta, y>)) phi(z).
inline ComplexVector inverse_fourier_transform(const FiniteAbelianGroup& g,
                                               const ComplexVector& phi) {
  const int n = g.phase_space_size();
  const int d = g.total_dim();
  ComplexVector p = ComplexVector::Zero(n);
  const std::vector<PhaseSpacePoint> pts = all_points(g);
  for (int xi = 0; xi < d; ++xi) {
    const Tuple x = g.tuple_at(xi);
    for (int yi = 0; yi < d; ++yi) {
      const Tuple y = g.tuple_at(yi);
      Complex acc = 0.0;
      for (int zi = 0; zi < n; ++zi) {
        acc += phi(zi) * detail::unit_phase(-detail::character_numerator(g, pts[zi], x, y),
                                            g.exponent());
      }
      p(xi * d + yi) = acc / double(n);
    }
  }
  return p;
}

inline CharacteristicFunction characteristic_from_distribution(const PhaseSpaceDistribution& p) {
  ComplexVector phi = fourier_transform(p.group(), p.probs());
  // phi(0) = sum p, which is 1 up to the distribution's own tolerance.
  phi(0) = 1.0;
  return {p.group(), phi};
}

/// Raised when an inverse transform has a coefficient below -1e-10.
class NotPositiveDefinite : public ValidationError {
 public:
  NotPositiveDefinite(PhaseSpacePoint point, int index, double value)
      : ValidationError(detail::concat("not positive definite: coefficient ", value,
                                       " at dual point index ", index)),
        point_(std::move(point)),
        value_(value) {}

  const PhaseSpacePoint& point() const { return point_; }
  double value() const { return value_; }

 private:
  PhaseSpacePoint point_;
  double value_;
};

inline constexpr double kFourierTol = 1e-10;

inline PhaseSpaceDistribution distribution_from_characteristic(const CharacteristicFunction& phi) {
  const FiniteAbelianGroup& g = phi.group();
  const ComplexVector c = inverse_fourier_transform(g, phi.values());
  RealVector p(c.size());
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    if (std::abs(c(i).imag()) > kFourierTol) {
      detail::fail("distribution_from_characteristic: inconsistent phi, imaginary residue ",
                   c(i).imag(), " at dual point index ", i);
    }
    if (c(i).real() < -kFourierTol) {
      // Dual points (x, y) share the tuple layout of phase-space points.
      throw NotPositiveDefinite(point_at(g, static_cast<int>(i)), static_cast<int>(i), c(i).real());
    }
    p(i) = std::max(c(i).real(), 0.0);
  }
  p /= p.sum();
  return {g, p};
}

struct PositiveDefiniteReport {
  enum class Witness { None, Coefficient, GramEigenvector, Hermiticity };

  bool positive = false;
  bool coefficient_test = false;
  bool gram_test = false;
  double min_coefficient = 0.0;
  double max_imaginary_residue = 0.0;
  /// Minimum eigenvalue of |G|^{-1} [phi(z_j - z_k)].
  double min_gram_eigenvalue = 0.0;
  double max_modulus = 0.0;
  Witness witness = Witness::None;
  std::optional<PhaseSpacePoint> witness_point;
  double witness_value = 0.0;
  ComplexVector witness_vector;
};

/// Bochner test for finite abelian groups, run two ways: the inverse Fourier
/// coefficients must be >= -tol, and the normalised Gram matrix
/// |G|^{-1} [phi(z_j - z_k)] must be Hermitian with spectrum >= -tol. The
/// normalisation makes both thresholds refer to the same numbers, since the
/// Gram eigenvalues are exactly |G| times the coefficients.
inline PositiveDefiniteReport is_positive_definite(const CharacteristicFunction& phi,
                                                   double tol = kFourierTol) {
  const FiniteAbelianGroup& g = phi.group();
  const int n = g.phase_space_size();
  PositiveDefiniteReport rep;
  rep.max_modulus = phi.values().cwiseAbs().maxCoeff();

  const ComplexVector c = inverse_fourier_transform(g, phi.values());
  rep.min_coefficient = c.real().minCoeff();
  rep.max_imaginary_residue = c.imag().cwiseAbs().maxCoeff();
  Eigen::Index arg = 0;
  c.real().minCoeff(&arg);
  rep.coefficient_test = rep.min_coefficient >= -tol && rep.max_imaginary_residue <= tol;

  const std::vector<PhaseSpacePoint> pts = all_points(g);
  ComplexMatrix gram(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      gram(j, k) = phi.values()(point_index(g, add(g, pts[j], negate(g, pts[k])))) / double(n);
    }
  }
  const double herm = hermiticity_residual(gram);
  if (herm > tol) {
    rep.gram_test = false;
    rep.min_gram_eigenvalue = std::numeric_limits<double>::quiet_NaN();
  } else {
    const Eigensystem es = hermitian_eigensystem(gram);
    rep.min_gram_eigenvalue = es.values(0);
    rep.gram_test = es.values(0) >= -tol;
    if (!rep.gram_test) rep.witness_vector = es.vectors.col(0);
  }

  rep.positive = rep.coefficient_test && rep.gram_test;
  if (!rep.positive) {
    if (rep.max_imaginary_residue > tol) {
      Eigen::Index im = 0;
      c.imag().cwiseAbs().maxCoeff(&im);
      rep.witness = PositiveDefiniteReport::Witness::Hermiticity;
      rep.witness_point = point_at(g, static_cast<int>(im));
      rep.witness_value = c(im).imag();
    } else if (rep.min_coefficient < -tol) {
      rep.witness = PositiveDefiniteReport::Witness::Coefficient;
      rep.witness_point = point_at(g, static_cast<int>(arg));
      rep.witness_value = rep.min_coefficient;
    } else {
      rep.witness = PositiveDefiniteReport::Witness::GramEigenvector;
      rep.witness_value = rep.min_gram_eigenvalue;
    }
  }
  return rep;
}

}  // namespace qcap

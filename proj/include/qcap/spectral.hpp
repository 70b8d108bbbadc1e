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

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

namespace qcap {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Raised whenever an input violates a documented precondition or invariant.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

template <typename... Args>
std::string concat(Args&&... args) {
  std::ostringstream os;
  os.precision(17);
  (os << ... << std::forward<Args>(args));
  return os.str();
}

template <typename... Args>
[[noreturn]] void fail(Args&&... args) {
  throw ValidationError(concat(std::forward<Args>(args)...));
}

inline double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool all_finite(const ComplexMatrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const Complex v = m.data()[i];
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  }
  return true;
}

// SplitMix64 finaliser; used to derive independent sub-seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline ComplexMatrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols,
                                     std::mt19937_64& rng, bool real = false) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix m(rows, cols);
  // Column-major fill order is part of the determinism contract.
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double re = normal(rng);
      const double im = real ? 0.0 : normal(rng);
      m(r, c) = Complex(re, im);
    }
  }
  return m;
}

}  // namespace detail

/// Logarithm base used for every entropy and capacity figure.
enum class EntropyBase { Two, E };

inline double log_in(double x, EntropyBase base) {
  return base == EntropyBase::Two ? std::log2(x) : std::log(x);
}

inline const char* base_name(EntropyBase base) {
  return base == EntropyBase::Two ? "2" : "e";
}

/// Scale that converts a natural-log quantity into the requested base.
inline double nats_to(EntropyBase base) {
  return base == EntropyBase::Two ? 1.0 / std::log(2.0) : 1.0;
}

inline void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    detail::fail(what, ": matrix must be square, got ", m.rows(), "x",
                 m.cols());
  }
}

inline double hermiticity_residual(const ComplexMatrix& m) {
  return detail::max_abs(m - m.adjoint());
}

struct Eigensystem {
  RealVector values;     // ascending
  ComplexMatrix vectors;  // orthonormal columns, vectors.col(i) <-> values(i)
};

/// Eigen-decomposition of a Hermitian matrix. The Hermiticity tolerance is
/// 1e-10 relative to max(1, max|M_ij|).
inline Eigensystem hermitian_eigensystem(const ComplexMatrix& m) {
  require_square(m, "hermitian_eigensystem");
  if (!detail::all_finite(m)) {
    detail::fail("hermitian_eigensystem: non-finite entry");
  }
  const double scale = std::max(1.0, detail::max_abs(m));
  const double herm = hermiticity_residual(m);
  if (herm > 1e-10 * scale) {
    detail::fail("hermitian_eigensystem: max|M - M^dag| = ", herm,
                 " exceeds bound 1e-10*", scale);
  }
  const ComplexMatrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    detail::fail("hermitian_eigensystem: eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

inline RealVector hermitian_eigenvalues(const ComplexMatrix& m) {
  return hermitian_eigensystem(m).values;
}

/// Applies f to the spectrum of a Hermitian matrix: V f(Lambda) V^dag.
template <typename F>
ComplexMatrix hermitian_function(const ComplexMatrix& m, F&& f) {
  const Eigensystem es = hermitian_eigensystem(m);
  RealVector fv(es.values.size());
  for (Eigen::Index i = 0; i < fv.size(); ++i) fv(i) = f(es.values(i));
  return es.vectors * fv.asDiagonal() * es.vectors.adjoint();
}

/// A d x d Hermitian, positive semidefinite, unit-trace matrix.
///
/// The stored matrix is exactly Hermitian (the input is symmetrised after
/// the 1e-12 check).
class DensityMatrix {
 public:
  static constexpr double kHermitianTol = 1e-12;
  static constexpr double kEigenTol = 1e-10;
  static constexpr double kTraceTol = 1e-10;

  explicit DensityMatrix(const ComplexMatrix& m) {
    require_square(m, "DensityMatrix");
    if (m.rows() == 0) detail::fail("DensityMatrix: dimension must be >= 1");
    if (!detail::all_finite(m)) detail::fail("DensityMatrix: non-finite entry");
    const double herm = hermiticity_residual(m);
    if (herm > kHermitianTol) {
      detail::fail("DensityMatrix: max|S - S^dag| = ", herm,
                   " exceeds bound ", kHermitianTol);
    }
    matrix_ = 0.5 * (m + m.adjoint());
    const double tr = matrix_.trace().real();
    if (std::abs(tr - 1.0) > kTraceTol) {
      detail::fail("DensityMatrix: trace = ", tr, " differs from 1 by more than ",
                   kTraceTol);
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(matrix_,
                                                        Eigen::EigenvaluesOnly);
    const double lo = solver.eigenvalues()(0);
    if (lo < -kEigenTol) {
      detail::fail("DensityMatrix: eigenvalue ", lo, " below bound -",
                   kEigenTol);
    }
  }

  static DensityMatrix maximally_mixed(Eigen::Index d) {
    if (d < 1) detail::fail("maximally_mixed: d must be >= 1");
    return DensityMatrix(ComplexMatrix::Identity(d, d) / double(d));
  }

  static DensityMatrix basis_projector(Eigen::Index d, Eigen::Index k) {
    if (k < 0 || k >= d) detail::fail("basis_projector: index ", k, " out of range");
    ComplexMatrix m = ComplexMatrix::Zero(d, d);
    m(k, k) = 1.0;
    return DensityMatrix(m);
  }

  Eigen::Index dim() const { return matrix_.rows(); }
  const ComplexMatrix& matrix() const { return matrix_; }

 private:
  ComplexMatrix matrix_;
};

/// Unit vector in C^d.
class PureState {
 public:
  static constexpr double kNormTol = 1e-12;

  explicit PureState(ComplexVector amplitudes)
      : amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() == 0) detail::fail("PureState: dimension must be >= 1");
    const double n2 = amplitudes_.squaredNorm();
    if (std::abs(n2 - 1.0) > kNormTol) {
      detail::fail("PureState: squared norm ", n2, " differs from 1 by more than ",
                   kNormTol);
    }
  }

  static PureState normalized(const ComplexVector& v) {
    const double n = v.norm();
    if (!(n > 0.0)) detail::fail("PureState: cannot normalize the zero vector");
    return PureState(v / n);
  }

  Eigen::Index dim() const { return amplitudes_.size(); }
  const ComplexVector& amplitudes() const { return amplitudes_; }

  DensityMatrix projector() const {
    return DensityMatrix(amplitudes_ * amplitudes_.adjoint());
  }

 private:
  ComplexVector amplitudes_;
};

/// Entropy of a spectrum with 0 log 0 = 0. Values in [-1e-10, 0) count as 0.
inline double entropy_of_spectrum(const RealVector& eigenvalues,
                                  EntropyBase base = EntropyBase::Two) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    const double l = eigenvalues(i);
    if (l < -DensityMatrix::kEigenTol) {
      detail::fail("entropy: eigenvalue ", l, " below bound -",
                   DensityMatrix::kEigenTol);
    }
    if (l > 0.0) h -= l * log_in(l, base);
  }
  return std::max(h, 0.0);
}

/// H(S) = -Tr S log S.
inline double von_neumann_entropy(const DensityMatrix& s,
                                  EntropyBase base = EntropyBase::Two) {
  return entropy_of_spectrum(hermitian_eigenvalues(s.matrix()), base);
}

/// Haar-random pure state: normalised vector of i.i.d. complex Gaussians.
inline PureState random_pure_state(Eigen::Index d, std::uint64_t seed) {
  if (d < 1) detail::fail("random_pure_state: d must be >= 1, got ", d);
  std::mt19937_64 rng(seed);
  ComplexMatrix g = detail::gaussian_matrix(d, 1, rng);
  return PureState::normalized(g.col(0));
}

/// Haar-random unitary (or real orthogonal) via QR of a Gaussian matrix with
/// the phases of diag(R) absorbed into Q.
inline ComplexMatrix random_unitary(Eigen::Index d, std::uint64_t seed,
                                    bool real_orthogonal = false) {
  if (d < 1) detail::fail("random_unitary: d must be >= 1, got ", d);
  std::mt19937_64 rng(seed);
  const ComplexMatrix g = detail::gaussian_matrix(d, d, rng, real_orthogonal);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(d, d);
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < d; ++j) {
    const double a = std::abs(r(j, j));
    const Complex phase = a > 0.0 ? r(j, j) / a : Complex(1.0);
    q.col(j) *= phase;
  }
  if (real_orthogonal) q = q.real().cast<Complex>();
  return q;
}

/// S = A A^dag / Tr(A A^dag) with A a d x rank complex Gaussian matrix.
inline DensityMatrix random_density_matrix(Eigen::Index d, Eigen::Index rank,
                                           std::uint64_t seed) {
  if (d < 1) detail::fail("random_density_matrix: d must be >= 1, got ", d);
  if (rank < 1 || rank > d) {
    detail::fail("random_density_matrix: rank ", rank, " outside [1, ", d, "]");
  }
  std::mt19937_64 rng(seed);
  const ComplexMatrix a = detail::gaussian_matrix(d, rank, rng);
  ComplexMatrix s = a * a.adjoint();
  s /= s.trace().real();
  return DensityMatrix(s);
}

/// Numerical rank of a Hermitian PSD matrix (eigenvalues above threshold).
inline Eigen::Index numerical_rank(const ComplexMatrix& m,
                                   double threshold = 1e-10) {
  const RealVector ev = hermitian_eigenvalues(m);
  return (ev.array() > threshold).count();
}

}  // namespace qcap

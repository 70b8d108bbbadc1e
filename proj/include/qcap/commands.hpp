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

// Command implementations behind the `qcap` tool. Each command returns the
// full report document and the process exit status, so the commands can be
// exercised in-process.

#pragma once

#include <chrono>
#include <optional>
#include <string>

#include "qcap/capacity.hpp"
#include "qcap/io.hpp"

#ifndef QCAP_VERSION
#define QCAP_VERSION "0.0.0"
#endif

namespace qcap::cli {

using io::json;

enum ExitStatus : int {
  kSuccess = 0,
  kValidationError = 2,
  kVerificationFailure = 3,
  kUncertified = 4,
};

struct CommandResult {
  json report;
  int exit_code = kSuccess;
};

struct CommonOptions {
  std::uint64_t seed = 0;
  EntropyBase base = EntropyBase::Two;
};

inline EntropyBase parse_base(const std::string& s) {
  if (s == "2") return EntropyBase::Two;
  if (s == "e") return EntropyBase::E;
  throw ValidationError("base: expected 2 or e, got \"" + s + "\"");
}

namespace detail {

using Clock = std::chrono::steady_clock;

inline json make_report(const std::string& command, const json& arguments, const std::string& digest,
                        const CommonOptions& common) {
  return json{{"toolVersion", QCAP_VERSION},
              {"command", command},
              {"arguments", arguments},
              {"inputDigest", digest},
              {"seed", common.seed},
              {"entropyBase", base_name(common.base)},
              {"results", json::object()},
              {"residuals", json::object()}};
}

inline void stamp_time(json& report, Clock::time_point start) {
  report["timings"] = {{"elapsedSeconds", std::chrono::duration<double>(Clock::now() - start).count()}};
}

inline json optimization_json(const OptimizationResult& r, double tol) {
  json values = json::array();
  for (double v : r.restart_values) values.push_back(v);
  return json{{"value", r.value},
              {"converged", r.converged},
              {"gradientNorm", r.gradient_norm},
              {"gradientTolerance", tol},
              {"restartsUsed", r.restarts_used},
              {"bestRestart", r.best_restart},
              {"iterations", r.iterations},
              {"restartValues", values},
              {"argument", io::to_json(r.argument)}};
}

inline json inequality_json(const InequalityReport& r) {
  return json{{"left", r.left},     {"right", r.right},      {"slack", r.slack},
              {"tolerance", r.tolerance}, {"holds", r.holds}, {"context", r.context}};
}

inline FiniteAbelianGroup resolve_group(const std::optional<std::vector<int>>& flag, const io::ParsedSpec& spec) {
  if (flag) {
    FiniteAbelianGroup g(*flag);
    if (g.total_dim() != spec.channel.dim()) {
      throw ValidationError(qcap::detail::concat("group: total order ", g.total_dim(),
                                                 " does not equal channel dimension ", spec.channel.dim()));
    }
    return g;
  }
  if (spec.group) return *spec.group;
  return FiniteAbelianGroup({static_cast<int>(spec.channel.dim())});
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline CommandResult cmd_describe(const io::ParsedSpec& spec, const std::optional<std::vector<int>>& group) {
  const auto start = detail::Clock::now();
  const QuantumChannel& ch = spec.channel;
  json args = {{"kind", spec.kind}};
  if (group) args["group"] = *group;
  CommandResult out{detail::make_report("describe", args, io::digest(spec.document), {}), kSuccess};
  json& res = out.report["results"];

  res["dim"] = ch.dim();
  res["krausCount"] = ch.kraus_count();
  const BistochasticReport bi = is_bistochastic(ch, 1e-10);
  res["bistochastic"] = {{"verdict", bi.verdict}, {"residual", bi.residual}, {"tolerance", 1e-10}};
  const ChoiMatrix c = choi(ch);
  const RealVector& ev = c.eigensystem().values;
  res["choiSpectrum"] = {{"min", ev.minCoeff()},
                         {"max", ev.maxCoeff()},
                         {"rank", (ev.array() > 1e-12).count()},
                         {"rankThreshold", 1e-12},
                         {"eigenvalues", io::to_json(ev)}};
  out.report["residuals"]["completeness"] = io::tolerance_value(ch.completeness_residual(),
                                                                QuantumChannel::kCompletenessTol);

  std::optional<FiniteAbelianGroup> g;
  if (group) {
    g = detail::resolve_group(group, spec);
  } else if (spec.group) {
    g = spec.group;
  }
  if (g) {
    const ChannelCharacteristic cc = channel_characteristic(ch, *g);
    const std::vector<ComplexMatrix> ws = weyl_representation(*g);
    const CovarianceReport cov = is_covariant(ch, ws, ws, 1e-10);
    res["weylCovariance"] = {{"group", g->orders()},
                             {"characteristicResidual", cc.residual},
                             {"covarianceResidual", cov.max_residual},
                             {"tolerance", 1e-10},
                             {"covariant", cov.verdict && cc.residual <= 1e-10}};
  }
  detail::stamp_time(out.report, start);
  return out;
}

struct CapacityOptions {
  std::string mode = "one-shot";  // or "ea"
  OptimizerOptions optimizer;
  std::optional<std::vector<int>> group;
  bool assume_covariant = false;
};

inline CommandResult cmd_capacity(const io::ParsedSpec& spec, const CapacityOptions& opts) {
  const auto start = detail::Clock::now();
  const QuantumChannel& ch = spec.channel;
  const CommonOptions common{opts.optimizer.seed, opts.optimizer.base};
  json args = {{"mode", opts.mode},
               {"restarts", opts.optimizer.restarts},
               {"tol", opts.optimizer.tol},
               {"maxIterations", opts.optimizer.max_iterations},
               {"assumeCovariant", opts.assume_covariant},
               {"kind", spec.kind}};
  if (opts.group) args["group"] = *opts.group;
  CommandResult out{detail::make_report("capacity", args, io::digest(spec.document), common), kSuccess};
  json& res = out.report["results"];

  if (opts.mode == "one-shot") {
    const FiniteAbelianGroup g = detail::resolve_group(opts.group, spec);
    const OneShotCapacity c = one_shot_capacity_covariant(ch, g, opts.optimizer);
    res["group"] = g.orders();
    res["certified"] = c.certified;
    res["candidate"] = c.candidate;
    res["orbitChi"] = c.orbit_chi;
    res["certificateGap"] = io::tolerance_value(c.gap, kCertificateTol);
    res["capacity"] = c.value ? json(io::tolerance_value(*c.value, kCertificateTol)) : json(nullptr);
    res["minOutputEntropy"] = detail::optimization_json(c.min_entropy, opts.optimizer.tol);
    if (!c.certified) {
      res["flag"] = "achievability not certified";
      out.exit_code = kUncertified;
    }
  } else if (opts.mode == "ea") {
    const OptimizationResult r = ea_capacity(ch, opts.optimizer, opts.assume_covariant);
    res["route"] = opts.assume_covariant ? "shortcut:maximally-mixed" : "optimizer";
    res["capacity"] = io::tolerance_value(r.value, opts.assume_covariant ? 1e-9 : 1e-4);
    res["optimizer"] = detail::optimization_json(r, opts.optimizer.tol);
  } else {
    throw ValidationError("capacity: mode must be one-shot or ea, got \"" + opts.mode + "\"");
  }
  detail::stamp_time(out.report, start);
  return out;
}

inline CommandResult cmd_probe_multiplicativity(const io::ParsedSpec& spec, const OptimizerOptions& opts) {
  const auto start = detail::Clock::now();
  if (spec.channel.dim() > 4) {
    throw ValidationError(qcap::detail::concat("probe-multiplicativity: dimension ", spec.channel.dim(),
                                               " is above the supported maximum 4"));
  }
  json args = {{"restarts", opts.restarts}, {"tol", opts.tol}, {"kind", spec.kind}};
  CommandResult out{detail::make_report("probe-multiplicativity", args, io::digest(spec.document),
                                        {opts.seed, opts.base}),
                    kSuccess};
  const MultiplicativityReport m = multiplicativity_probe(spec.channel, opts);
  json& res = out.report["results"];
  res["hminSingle"] = m.hmin_single;
  res["hminProduct"] = m.hmin_product;
  res["twiceHminSingle"] = 2.0 * m.hmin_single;
  res["entangledDataPoint"] = m.entangled_point;
  res["gap"] = m.gap;
  res["invariant"] = {{"statement", "Hmin(product) <= 2 Hmin(single) + tolerance"},
                      {"holds", m.invariant_holds},
                      {"tolerance", m.tolerance}};
  res["single"] = detail::optimization_json(m.single, opts.tol);
  res["product"] = detail::optimization_json(m.product, opts.tol);
  if (!m.invariant_holds) out.exit_code = kVerificationFailure;
  detail::stamp_time(out.report, start);
  return out;
}

// ---------------------------------------------------------------------------
// Verification suites.

struct VerifyOptions {
  std::string suite;
  std::vector<int> group = {2};
  int trials = 200;
  std::uint64_t seed = 0;
  std::size_t n = 100000;
  int seeds = 20;
  EntropyBase base = EntropyBase::Two;
};

struct WeylSuiteResult {
  double ccr = 0.0;
  double conjugation = 0.0;
  double unitarity = 0.0;
  double orthogonality = 0.0;
  double fourier_round_trip = 0.0;
  int rejected = 0;
  int candidates = 0;
  int bochner_disagreements = 0;
  double covariance = 0.0;
  double proportionality = 0.0;
  double converse = 0.0;
};

inline constexpr double kAlgebraTol = 1e-12;
inline constexpr double kStructureTol = 1e-10;

/// Phase-space identities, Fourier/Bochner checks and the Weyl-covariance
/// structure theorem on one group.
inline WeylSuiteResult run_weyl_suite(const FiniteAbelianGroup& g, int trials, std::uint64_t seed) {
  WeylSuiteResult r;
  const int d = g.total_dim();
  const int n = g.phase_space_size();
  const std::vector<PhaseSpacePoint> pts = all_points(g);
  const std::vector<ComplexMatrix> ws = weyl_representation(g);
  for (int a = 0; a < n; ++a) {
    r.unitarity = std::max(r.unitarity, unitarity_residual(ws[a]));
    for (int b = 0; b < n; ++b) {
      const int sum = point_index(g, add(g, pts[a], pts[b]));
      const Complex ph = std::polar(1.0, composition_phase(g, pts[a], pts[b]));
      r.ccr = std::max(r.ccr, (ws[a] * ws[b] - ph * ws[sum]).norm());
      const Complex cj = std::polar(1.0, conjugation_phase(g, pts[a], pts[b]));
      r.conjugation = std::max(r.conjugation, (ws[a].adjoint() * ws[b] * ws[a] - cj * ws[b]).norm());
    }
  }
  for (int t = 0; t < 20; ++t) {
    const DensityMatrix s = random_density_matrix(d, d, qcap::detail::mix_seed(seed, 100 + t));
    ComplexMatrix avg = ComplexMatrix::Zero(d, d);
    for (const ComplexMatrix& w : ws) avg += w * s.matrix() * w.adjoint();
    avg /= double(n);
    r.orthogonality = std::max(r.orthogonality, (avg - ComplexMatrix::Identity(d, d) / double(d)).norm());
  }
  std::mt19937_64 rng(qcap::detail::mix_seed(seed, 7));
  for (int t = 0; t < trials; ++t) {
    const PhaseSpaceDistribution p = PhaseSpaceDistribution::random(g, qcap::detail::mix_seed(seed, 1000 + t));
    const PhaseSpaceDistribution back = distribution_from_characteristic(characteristic_from_distribution(p));
    r.fourier_round_trip = std::max(r.fourier_round_trip, (back.probs() - p.probs()).cwiseAbs().maxCoeff());

    // Even trials: transform of a signed measure with one mass at -0.05.
    // Odd trials: an imaginary bump at z != 0, breaking phi(-z) = conj phi(z).
    const int k = 1 + static_cast<int>(rng() % (n - 1));
    ComplexVector bad_values;
    if (t % 2 == 0) {
      RealVector q = p.probs();
      q(0) += q(k) + 0.05;
      q(k) = -0.05;
      bad_values = fourier_transform(g, q);
    } else {
      bad_values = characteristic_from_distribution(p).values();
      bad_values(k) += Complex(0.0, 0.3);
    }
    bad_values(0) = 1.0;
    const CharacteristicFunction bad(g, bad_values);
    const PositiveDefiniteReport pd = is_positive_definite(bad);
    ++r.candidates;
    if (!pd.positive && pd.witness != PositiveDefiniteReport::Witness::None) ++r.rejected;
    if (pd.coefficient_test != pd.gram_test) ++r.bochner_disagreements;
    const PositiveDefiniteReport good = is_positive_definite(characteristic_from_distribution(p));
    if (good.coefficient_test != good.gram_test || !good.positive) ++r.bochner_disagreements;
  }
  if (d <= 4) {
    for (int t = 0; t < std::min(trials, 50); ++t) {
      const PhaseSpaceDistribution p = PhaseSpaceDistribution::random(g, qcap::detail::mix_seed(seed, 5000 + t));
      const QuantumChannel ch = weyl_channel(g, p);
      r.covariance = std::max(r.covariance, is_covariant(ch, ws, ws, kStructureTol).max_residual);
      const CharacteristicFunction expected = characteristic_from_distribution(p);
      const ChannelCharacteristic cc = channel_characteristic(ch, g);
      r.proportionality = std::max({r.proportionality, cc.residual,
                                    (cc.phi.values() - expected.values()).cwiseAbs().maxCoeff()});
      // Converse: phi = phi_1 * phi_2 is positive definite (Schur product).
      const PhaseSpaceDistribution p2 = PhaseSpaceDistribution::random(g, qcap::detail::mix_seed(seed, 9000 + t));
      const ComplexVector prod = expected.values().cwiseProduct(characteristic_from_distribution(p2).values());
      const CharacteristicFunction phi(g, prod);
      const QuantumChannel built = weyl_channel(g, distribution_from_characteristic(phi));
      for (int i = 0; i < n; ++i) {
        r.converse = std::max(r.converse, (apply_operator(built, ws[i]) - phi.values()(i) * ws[i]).norm());
      }
    }
  }
  return r;
}

struct InequalitySuiteResult {
  int triples = 0;
  double min_slack = std::numeric_limits<double>::infinity();
  double max_pure_abs_slack = 0.0;
  json worst;
};

/// Entropy-exchange inequality over random (channel, state, decomposition)
/// triples with d <= 4, <= 4 Kraus operators, rank >= 2 states and five
/// decompositions each; plus a pure-input check per trial.
inline InequalitySuiteResult run_inequality_suite(int trials, std::uint64_t seed, EntropyBase base) {
  InequalitySuiteResult r;
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(qcap::detail::mix_seed(seed, t));
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng() % 3);
    const Eigen::Index kc = 1 + static_cast<Eigen::Index>(rng() % 4);
    const Eigen::Index rank = 2 + static_cast<Eigen::Index>(rng() % (d - 1));
    const QuantumChannel ch = random_channel(d, kc, rng());
    const DensityMatrix s = random_density_matrix(d, rank, rng());
    const std::uint64_t dseed = rng();
    const std::vector<InequalityReport> reps = check_eex(ch, s, pure_decompositions(s, 5, dseed), base);
    for (std::size_t i = 0; i < reps.size(); ++i) {
      ++r.triples;
      if (reps[i].slack < r.min_slack) {
        r.min_slack = reps[i].slack;
        r.worst = {{"trial", t},      {"dim", d},     {"krausCount", kc}, {"rank", rank},
                   {"decomposition", i}, {"seed", seed}, {"slack", reps[i].slack}};
      }
    }
    const DensityMatrix pure = random_pure_state(d, rng()).projector();
    for (const InequalityReport& rep : check_eex(ch, pure, pure_decompositions(pure, 1, dseed), base)) {
      r.max_pure_abs_slack = std::max(r.max_pure_abs_slack, std::abs(rep.slack));
    }
  }
  return r;
}

struct DilationSuiteResult {
  std::vector<double> errors;
  double bound = 0.0;
  int below = 0;
  double exhaustive = 0.0;
};

/// Random Weyl channel and random density matrix X on the group; Monte Carlo
/// error for each of `seeds` seeds against 5 / sqrt(n).
inline DilationSuiteResult run_dilation_suite(const FiniteAbelianGroup& g, std::size_t n, int seeds,
                                              std::uint64_t seed) {
  DilationSuiteResult r;
  const PhaseSpaceDistribution p = PhaseSpaceDistribution::random(g, qcap::detail::mix_seed(seed, 1));
  const DensityMatrix x = random_density_matrix(g.total_dim(), g.total_dim(), qcap::detail::mix_seed(seed, 2));
  r.bound = 5.0 / std::sqrt(double(n));
  for (int s = 0; s < seeds; ++s) {
    const DilationEstimate e = dilation_sample(g, p, x.matrix(), n, qcap::detail::mix_seed(seed, 100 + s));
    r.errors.push_back(e.frobenius_error);
    if (e.frobenius_error < r.bound) ++r.below;
  }
  r.exhaustive = (dilation_exhaustive(g, p, x.matrix()) - apply(weyl_channel(g, p), x).matrix()).norm();
  return r;
}

inline CommandResult cmd_verify(const VerifyOptions& opts) {
  const auto start = detail::Clock::now();
  json args = {{"suite", opts.suite}};
  if (opts.suite == "weyl") {
    args["group"] = opts.group;
    args["trials"] = opts.trials;
  } else if (opts.suite == "inequalities") {
    args["trials"] = opts.trials;
  } else if (opts.suite == "dilation") {
    args["group"] = opts.group;
    args["n"] = opts.n;
    args["seeds"] = opts.seeds;
  } else {
    throw ValidationError("verify: suite must be weyl, inequalities or dilation, got \"" + opts.suite + "\"");
  }
  CommandResult out{detail::make_report("verify", args, io::digest(args), {opts.seed, opts.base}), kSuccess};
  json& res = out.report["results"];
  bool pass = true;

  if (opts.suite == "weyl") {
    const FiniteAbelianGroup g(opts.group);
    const WeylSuiteResult w = run_weyl_suite(g, opts.trials, opts.seed);
    auto check = [&](const char* name, double v, double tol) {
      res[name] = {{"maxResidual", v}, {"tolerance", tol}, {"pass", v <= tol}};
      pass = pass && v <= tol;
    };
    check("ccr", w.ccr, kAlgebraTol);
    check("conjugation", w.conjugation, kAlgebraTol);
    check("unitarity", w.unitarity, kAlgebraTol);
    check("orthogonality", w.orthogonality, kAlgebraTol);
    check("fourierRoundTrip", w.fourier_round_trip, kAlgebraTol);
    res["bochner"] = {{"candidates", w.candidates},
                      {"rejected", w.rejected},
                      {"testDisagreements", w.bochner_disagreements},
                      {"pass", w.rejected == w.candidates && w.bochner_disagreements == 0}};
    pass = pass && w.rejected == w.candidates && w.bochner_disagreements == 0;
    if (g.total_dim() <= 4) {
      check("structureCovariance", w.covariance, kStructureTol);
      check("structureProportionality", w.proportionality, kStructureTol);
      check("structureConverse", w.converse, kStructureTol);
    } else {
      res["structureTheorem"] = "skipped: total dimension above 4";
    }
  } else if (opts.suite == "inequalities") {
    const InequalitySuiteResult q = run_inequality_suite(opts.trials, opts.seed, opts.base);
    const bool ok = q.min_slack >= -kInequalityTol && q.max_pure_abs_slack <= kInequalityTol;
    res["triples"] = q.triples;
    res["minSlack"] = io::tolerance_value(q.min_slack, kInequalityTol);
    res["maxPureAbsSlack"] = io::tolerance_value(q.max_pure_abs_slack, kInequalityTol);
    res["worst"] = q.worst;
    res["pass"] = ok;
    pass = ok;
  } else {
    const FiniteAbelianGroup g(opts.group);
    const DilationSuiteResult dsr = run_dilation_suite(g, opts.n, opts.seeds, opts.seed);
    const int needed = (95 * opts.seeds + 99) / 100;
    const bool ok = dsr.below >= needed && dsr.exhaustive <= kAlgebraTol;
    res["errors"] = dsr.errors;
    res["bound"] = dsr.bound;
    res["belowBound"] = dsr.below;
    res["required"] = needed;
    res["exhaustiveResidual"] = io::tolerance_value(dsr.exhaustive, kAlgebraTol);
    res["pass"] = ok;
    pass = ok;
  }
  res["verdict"] = pass ? "pass" : "violation";
  if (!pass) out.exit_code = kVerificationFailure;
  detail::stamp_time(out.report, start);
  return out;
}

}  // namespace qcap::cli

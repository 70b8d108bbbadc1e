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

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "qcap/commands.hpp"

namespace {

using qcap::cli::CommandResult;

std::optional<std::vector<int>> group_flag(const std::string& text) {
  if (text.empty()) return std::nullopt;
  return qcap::io::parse_orders(text);
}

int emit(const CommandResult& result, const std::string& out_path) {
  const std::string text = result.report.dump(2) + "\n";
  std::cout << text;
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
      std::cerr << "qcap: cannot write \"" << out_path << "\"\n";
      return qcap::cli::kValidationError;
    }
    out << text;
  }
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Capacities and covariance checks for finite-dimensional quantum channels"};
  app.require_subcommand(1);
  app.set_version_flag("--version", QCAP_VERSION);

  std::string out_path;
  std::string spec_path;
  std::string group_text;
  std::string base_text = "2";
  std::uint64_t seed = 0;
  int restarts = 50;
  double tol = 1e-8;
  int max_iterations = 500;

  auto add_optimizer_flags = [&](CLI::App* sub) {
    sub->add_option("--restarts", restarts, "Optimizer restarts")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "Random seed");
    sub->add_option("--tol", tol, "Gradient-norm tolerance");
    sub->add_option("--max-iterations", max_iterations, "Iterations per restart")->check(CLI::PositiveNumber);
    sub->add_option("--base", base_text, "Entropy base: 2 or e");
  };

  CLI::App* describe = app.add_subcommand("describe", "Summarise a channel spec");
  describe->add_option("spec", spec_path, "Channel spec (JSON)")->required();
  describe->add_option("--group", group_text, "Cyclic orders, e.g. 2,3");
  describe->add_option("--out", out_path, "Also write the report to this file");

  qcap::cli::CapacityOptions cap;
  CLI::App* capacity = app.add_subcommand("capacity", "One-shot or entanglement-assisted capacity");
  capacity->add_option("spec", spec_path, "Channel spec (JSON)")->required();
  capacity->add_option("--mode", cap.mode, "one-shot or ea")->check(CLI::IsMember({"one-shot", "ea"}));
  capacity->add_option("--group", group_text, "Cyclic orders for the covariance group, e.g. 2,3");
  capacity->add_flag("--assume-covariant", cap.assume_covariant,
                     "Evaluate C_ea at the maximally mixed state (caller asserts covariance)");
  capacity->add_option("--out", out_path, "Also write the report to this file");
  add_optimizer_flags(capacity);

  qcap::cli::VerifyOptions ver;
  CLI::App* verify = app.add_subcommand("verify", "Run a verification suite");
  verify->add_option("suite", ver.suite, "weyl, inequalities or dilation")
      ->required()
      ->check(CLI::IsMember({"weyl", "inequalities", "dilation"}));
  verify->add_option("--group", group_text, "Cyclic orders, e.g. 2,3");
  verify->add_option("--trials", ver.trials, "Randomised trials")->check(CLI::PositiveNumber);
  verify->add_option("--seed", seed, "Random seed");
  verify->add_option("--n", ver.n, "Monte Carlo samples per seed")->check(CLI::PositiveNumber);
  verify->add_option("--seeds", ver.seeds, "Monte Carlo repetitions")->check(CLI::PositiveNumber);
  verify->add_option("--base", base_text, "Entropy base: 2 or e");
  verify->add_option("--out", out_path, "Also write the report to this file");

  CLI::App* probe = app.add_subcommand("probe-multiplicativity", "Minimal output entropy of the channel squared");
  probe->add_option("spec", spec_path, "Channel spec (JSON)")->required();
  probe->add_option("--out", out_path, "Also write the report to this file");
  add_optimizer_flags(probe);

  CLI11_PARSE(app, argc, argv);

  try {
    qcap::OptimizerOptions opt;
    opt.restarts = restarts;
    opt.seed = seed;
    opt.tol = tol;
    opt.max_iterations = max_iterations;
    opt.base = qcap::cli::parse_base(base_text);

    if (describe->parsed()) {
      return emit(qcap::cli::cmd_describe(qcap::io::load_spec(spec_path), group_flag(group_text)), out_path);
    }
    if (capacity->parsed()) {
      cap.optimizer = opt;
      cap.group = group_flag(group_text);
      return emit(qcap::cli::cmd_capacity(qcap::io::load_spec(spec_path), cap), out_path);
    }
    if (verify->parsed()) {
      ver.seed = seed;
      ver.base = opt.base;
      if (auto g = group_flag(group_text)) ver.group = *g;
      return emit(qcap::cli::cmd_verify(ver), out_path);
    }
    if (probe->parsed()) {
      return emit(qcap::cli::cmd_probe_multiplicativity(qcap::io::load_spec(spec_path), opt), out_path);
    }
  } catch (const qcap::ValidationError& e) {
    std::cerr << "qcap: " << e.what() << "\n";
    return qcap::cli::kValidationError;
  } catch (const std::exception& e) {
    std::cerr << "qcap: " << e.what() << "\n";
    return qcap::cli::kValidationError;
  }
  return qcap::cli::kValidationError;
}

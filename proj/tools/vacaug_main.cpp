// Copyright 2026 The vacaug Authors
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

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "vacaug/errors.hpp"
#include "vacaug/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitProtocol = 3;

// Discards output unless --verbose.
struct NullBuffer : std::streambuf {
  int overflow(int c) override { return c; }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vacuum pump-down augmentation and model robustness harness"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  bool verbose = false;
  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "seed for the selected stage");
  app.add_option("--out", out_dir, "output directory");
  app.add_flag("--verbose", verbose, "progress on stderr");

  auto* synth = app.add_subcommand("synth", "write a synthetic ground-truth corpus");
  std::optional<long long> events;
  std::optional<std::size_t> archetypes;
  std::optional<double> noise, p0_mean, p0_std, t_mean, t_std, volume;
  synth->add_option("--events", events, "number of events");
  synth->add_option("--archetypes", archetypes, "distinct speed shapes");
  synth->add_option("--noise", noise, "relative pressure noise, < 0.1");
  synth->add_option("--p0-mean", p0_mean, "initial pressure mean, mbar");
  synth->add_option("--p0-std", p0_std, "initial pressure std, mbar");
  synth->add_option("--t-mean", t_mean, "pump-down time mean, s");
  synth->add_option("--t-std", t_std, "pump-down time std, s");
  synth->add_option("--volume", volume, "chamber volume, m^3");

  auto* decompose = app.add_subcommand("decompose", "fit P0/T distributions and the speed dictionary");
  std::string gt_dir;
  std::optional<std::size_t> resolution;
  std::optional<double> epsilon;
  decompose->add_option("--gt", gt_dir, "ground-truth directory");
  decompose->add_option("--resolution", resolution, "dictionary resolution");
  decompose->add_option("--epsilon", epsilon, "stopping residual");

  auto* augment = app.add_subcommand("augment", "generate augmented samples");
  std::optional<std::size_t> m;
  augment->add_option("--m", m, "number of samples");

  auto* test = app.add_subcommand("test", "train models and run the robustness oracles");
  std::string eval_dir;
  test->add_option("--gt", gt_dir, "ground-truth directory");
  test->add_option("--eval", eval_dir, "second furnace for transfer metrics");

  auto* report = app.add_subcommand("report", "print a report.json summary");
  std::string report_path;
  report->add_option("--report", report_path, "report.json (default <out>/report.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  NullBuffer null_buffer;
  std::ostream quiet(&null_buffer);
  std::ostream& log = verbose ? std::clog : quiet;

  try {
    vacaug::RunConfig config = config_path.empty() ? vacaug::RunConfig{} : vacaug::load_config(config_path);
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (!gt_dir.empty()) config.gt_dir = gt_dir;
    if (!eval_dir.empty()) config.eval_dir = eval_dir;
    if (resolution) config.resolution = *resolution;
    if (epsilon) config.epsilon = *epsilon;
    if (m) config.m = *m;

    if (*synth) {
      auto spec = config.synth;
      spec.chamber = config.chamber;
      if (events) {
        if (*events <= 0) throw vacaug::ConfigError("--events must be positive");
        spec.n_events = static_cast<std::size_t>(*events);
      }
      if (archetypes) spec.speed_archetypes = *archetypes;
      if (noise) spec.noise_rel = *noise;
      if (p0_mean) spec.p0_mean = *p0_mean;
      if (p0_std) spec.p0_std = *p0_std;
      if (t_mean) spec.t_mean = *t_mean;
      if (t_std) spec.t_std = *t_std;
      if (volume) spec.chamber.volume_m3 = *volume;
      if (seed) spec.seed = *seed;
      spec.validate();
      vacaug::pipeline::synth(spec, config.out_dir, log);
    } else if (*decompose) {
      vacaug::pipeline::decompose(config, log);
    } else if (*augment) {
      if (seed) config.augment_seed = *seed;
      vacaug::pipeline::augment(config, log);
    } else if (*test) {
      if (seed) {
        config.split_seed = *seed;
        config.train_seed = *seed;
      }
      const auto r = vacaug::pipeline::test(config, log);
      vacaug::print_report(to_json(r), std::cout);
    } else if (*report) {
      const std::filesystem::path path =
          report_path.empty() ? config.out_dir / "report.json" : std::filesystem::path(report_path);
      vacaug::print_report(vacaug::read_json(path), std::cout);
    }
  } catch (const vacaug::ProtocolError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitProtocol;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitOk;
}

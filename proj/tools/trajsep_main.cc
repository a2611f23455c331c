/*
Copyright 2026 The trajsep Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS-IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

// trajsep command-line tool: gen | run | eval | metrics.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "trajsep/dataset.h"
#include "trajsep/metrics.h"
#include "trajsep/pipeline.h"
#include "trajsep/report.h"
#include "trajsep/wav.h"

namespace fs = std::filesystem;
using namespace trajsep;

namespace {

// One machine-parsable line: "error: <code>: <message>".
int Fail(std::string_view code, std::string message) {
  for (char& c : message) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  std::fprintf(stderr, "error: %.*s: %s\n", static_cast<int>(code.size()), code.data(),
               message.c_str());
  return 1;
}

std::string CommandLine(int argc, char** argv) {
  std::string out;
  for (int i = 0; i < argc; ++i) out += (i ? " " : "") + std::string(argv[i]);
  return out;
}

struct GenArgs {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> scenes;
  int jobs = 1;
};

int RunGen(const GenArgs& a) {
  DatasetConfig cfg;
  if (!a.config.empty()) cfg = DatasetConfigFromJsonText(ReadTextFile(a.config));
  if (a.seed) cfg.master_seed = *a.seed;
  if (a.scenes) cfg.num_scenes = *a.scenes;
  const DatasetManifest m = GenerateDataset(cfg, a.out, a.jobs);
  int failed = 0;
  for (const ManifestEntry& e : m.entries) {
    if (!e.ok()) {
      ++failed;
      std::fprintf(stderr, "warning: %s failed: %s\n", e.id.c_str(), e.error.c_str());
    }
  }
  std::printf("wrote %zu scenes to %s (%d failed)\n", m.entries.size(), a.out.c_str(), failed);
  if (failed > 0) {
    return Fail(ErrorCodeName(ErrorCode::kIo),
                std::to_string(failed) + " of " + std::to_string(m.entries.size()) +
                    " entries failed; see manifest.json");
  }
  return 0;
}

struct RunArgs {
  std::string dataset;
  std::string out;
  std::string config;
  std::string components;
  std::optional<int> rounds;
  std::optional<int> c_max;
  std::optional<double> threshold;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
};

RunSettings LoadRunSettings(const RunArgs& a) {
  RunSettings s;
  if (!a.config.empty()) s = RunSettingsFromJsonText(ReadTextFile(a.config));
  if (!a.components.empty()) s.components = ParseComponentNames(a.components);
  if (a.rounds) s.pipeline.rounds = *a.rounds;
  if (a.c_max) s.pipeline.c_max = *a.c_max;
  if (a.threshold) s.pipeline.count_threshold = *a.threshold;
  if (a.seed) s.oracle.seed = *a.seed;
  ValidatePipelineConfig(s.pipeline);
  CheckComponentNames(s.components);
  return s;
}

int RunRun(const RunArgs& a, const std::string& command) {
  const RunSettings s = LoadRunSettings(a);
  const DatasetManifest m = ReadManifest(a.dataset);
  Provenance prov;
  prov.config_hash = Fnv1aHex(RunSettingsToJsonText(s));
  prov.seed = s.oracle.seed;
  prov.components = s.components;
  prov.command = command;
  fs::create_directories(a.out);
  WriteTextFile(fs::path(a.out) / "run_config.json", RunSettingsToJsonText(s));
  PipelineConfig pipeline = s.pipeline;
  pipeline.parallelism = std::max(pipeline.parallelism, a.jobs);
  int done = 0;
  for (const ManifestEntry& e : m.entries) {
    if (!e.ok()) continue;
    LoadedEntry entry = LoadEntry(e, a.dataset);
    auto gt = std::make_shared<const Groundtruth>(
        MakeGroundtruth(entry.mixture, entry.images, entry.trajectories, pipeline.grid));
    OracleOptions oracle = s.oracle;
    oracle.seed = DeriveSeed(s.oracle.seed, e.seed);
    const ComponentSet set = MakeComponents(s.components, gt, oracle, s.tracking);
    PipelineResult r;
    try {
      r = RunFullPipeline(entry.mixture, set, pipeline);
    } catch (const Error& err) {
      throw Error(err.code(), e.id + ": " + err.what());
    }
    WritePipelineResult(fs::path(a.out) / e.id, r, prov);
    std::printf("%s: %d sources\n", e.id.c_str(), r.estimated_count);
    ++done;
  }
  std::printf("processed %d entries into %s\n", done, a.out.c_str());
  return 0;
}

struct EvalArgs {
  std::string dataset;
  std::string run;
  std::string report;
  std::size_t sdr_filter_len = kDefaultSdrFilterLength;
};

int RunEval(const EvalArgs& a, const std::string& command) {
  const DatasetManifest m = ReadManifest(a.dataset);
  Provenance prov;
  prov.command = command;
  const fs::path run_config = fs::path(a.run) / "run_config.json";
  FrameGrid grid;
  if (fs::exists(run_config)) {
    const std::string text = ReadTextFile(run_config);
    const RunSettings s = RunSettingsFromJsonText(text);
    prov.config_hash = Fnv1aHex(RunSettingsToJsonText(s));
    prov.seed = s.oracle.seed;
    prov.components = s.components;
    grid = s.pipeline.grid;
  }
  EvalOptions options;
  options.sdr_filter_len = a.sdr_filter_len;
  std::vector<ScoredScene> scored;
  for (const ManifestEntry& e : m.entries) {
    if (!e.ok()) continue;
    const fs::path dir = fs::path(a.run) / e.id;
    const PipelineResult r = ReadPipelineResult(dir);
    LoadedEntry entry = LoadEntry(e, a.dataset);
    const Groundtruth gt =
        MakeGroundtruth(entry.mixture, entry.images, entry.trajectories, grid);
    ScoredScene s{e.id, e.t60, EvaluatePipeline(r, gt, entry.mixture, options)};
    WriteTextFile(dir / "eval.json", EvalReportToJsonText(s.report, prov));
    std::printf("%s (T60 %.2f s)\n%s", e.id.c_str(), e.t60, EvalReportTable(s.report).c_str());
    scored.push_back(std::move(s));
  }
  const std::vector<AggregateRow> rows = AggregateByT60(scored);
  std::printf("\n%s", AggregateTable(rows).c_str());
  const fs::path report = a.report.empty() ? fs::path(a.run) / "aggregate.json" : fs::path(a.report);
  WriteTextFile(report, AggregateToJsonText(rows, scored, prov));
  return 0;
}

struct MetricsArgs {
  std::string est;
  std::string ref;
  int channel = 0;
  std::size_t sdr_filter_len = kDefaultSdrFilterLength;
  std::string report;
};

int RunMetrics(const MetricsArgs& a) {
  const MonoSignal est = ReadMono(a.est, a.channel);
  const MonoSignal ref = ReadMono(a.ref, a.channel);
  if (est.size() != ref.size()) {
    throw Error(ErrorCode::kShapeMismatch, "estimate has " + std::to_string(est.size()) +
                                               " samples, reference has " +
                                               std::to_string(ref.size()));
  }
  const double snr = SnrDb(est, ref);
  const double si = SiSnrDb(est, ref);
  const double sdr = SdrDb(est, ref, std::min(a.sdr_filter_len, ref.size()));
  char line[256];
  std::snprintf(line, sizeof(line),
                "{\"snr_db\": %.6f, \"si_snr_db\": %.6f, \"sdr_db\": %.6f, \"samples\": %zu}\n",
                snr, si, sdr, ref.size());
  std::fputs(line, stdout);
  if (!a.report.empty()) WriteTextFile(a.report, line);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trajectory-guided separation and tracking of moving sound sources"};
  app.require_subcommand(1);
  const std::string command = CommandLine(argc, argv);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a simulated dataset");
  gen_cmd->add_option("--config", gen.config, "Dataset config JSON");
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();
  gen_cmd->add_option("--seed", gen.seed, "Master seed (overrides the config)");
  gen_cmd->add_option("--scenes", gen.scenes, "Number of scenes (overrides the config)");
  gen_cmd->add_option("--jobs", gen.jobs, "Parallel workers")->check(CLI::PositiveNumber);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run the pipeline on every dataset entry");
  run_cmd->add_option("--dataset", run.dataset, "Dataset directory")->required();
  run_cmd->add_option("--out", run.out, "Output directory")->required();
  run_cmd->add_option("--config", run.config, "Run config JSON");
  run_cmd->add_option("--components", run.components,
                      "oracle | classical | role=name,... (roles: envelope, tracker, "
                      "extractor, refiner)");
  run_cmd->add_option("--rounds", run.rounds, "Mutual-facilitation rounds");
  run_cmd->add_option("--c-max", run.c_max, "Maximum number of sources");
  run_cmd->add_option("--threshold", run.threshold, "Source-count envelope threshold");
  run_cmd->add_option("--seed", run.seed, "Oracle corruption seed");
  run_cmd->add_option("--jobs", run.jobs, "Concurrent sources")->check(CLI::PositiveNumber);

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Score run outputs against the dataset");
  eval_cmd->add_option("--dataset", eval.dataset, "Dataset directory")->required();
  eval_cmd->add_option("--run", eval.run, "Run output directory")->required();
  eval_cmd->add_option("--report", eval.report, "Aggregate report path");
  eval_cmd->add_option("--sdr-filter-len", eval.sdr_filter_len, "SDR distortion filter taps");

  MetricsArgs metrics;
  auto* metrics_cmd = app.add_subcommand("metrics", "SNR, SI-SNR and SDR between two files");
  metrics_cmd->add_option("estimate", metrics.est, "Estimate WAVE file")->required();
  metrics_cmd->add_option("reference", metrics.ref, "Reference WAVE file")->required();
  metrics_cmd->add_option("--channel", metrics.channel, "Channel to compare");
  metrics_cmd->add_option("--sdr-filter-len", metrics.sdr_filter_len,
                          "SDR distortion filter taps");
  metrics_cmd->add_option("--report", metrics.report, "Also write the JSON line here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    Fail(ErrorCodeName(ErrorCode::kInvalidArgument), e.what());
    return 2;
  }

  try {
    if (*gen_cmd) return RunGen(gen);
    if (*run_cmd) return RunRun(run, command);
    if (*eval_cmd) return RunEval(eval, command);
    if (*metrics_cmd) return RunMetrics(metrics);
  } catch (const Error& e) {
    return Fail(ErrorCodeName(e.code()), e.what());
  } catch (const std::exception& e) {
    return Fail("internal", e.what());
  }
  return 0;
}

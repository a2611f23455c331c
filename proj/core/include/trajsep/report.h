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

#ifndef TRAJSEP_REPORT_H_
#define TRAJSEP_REPORT_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trajsep/estimators.h"
#include "trajsep/pipeline.h"

namespace trajsep {

inline constexpr std::string_view kVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

// Everything a `run` needs besides the dataset.
struct RunSettings {
  PipelineConfig pipeline;
  ComponentNames components;
  OracleOptions oracle;
  PseudoIntensityOptions tracking;
  EvalOptions eval;
};

std::string RunSettingsToJsonText(const RunSettings& settings);
// Missing keys keep their defaults; unknown keys are rejected.
RunSettings RunSettingsFromJsonText(std::string_view text);

struct Provenance {
  std::string config_hash;
  std::uint64_t seed = 0;
  ComponentNames components;
  std::string version{kVersion};
  std::string command;
};

// Writes est<k>.wav, sep<k>.wav, traj<k>_round<r>.txt and result.json.
void WritePipelineResult(const std::filesystem::path& dir, const PipelineResult& result,
                         const Provenance& provenance);
// Restores estimates, trajectory histories, counts and component names.
PipelineResult ReadPipelineResult(const std::filesystem::path& dir);

std::string EvalReportToJsonText(const EvalReport& report, const Provenance& provenance);

// Plain-text table of one report.
std::string EvalReportTable(const EvalReport& report);

struct T60Bucket {
  double lo = 0.0;
  double hi = 0.0;
  std::string label;
};

// [0.2, 0.4), [0.4, 0.6), [0.6, 0.8), [0.8, 1.0]
const std::vector<T60Bucket>& T60Buckets();

// Index into T60Buckets(), or nullopt outside every bucket (e.g. anechoic).
std::optional<std::size_t> T60BucketIndex(double t60);

struct AggregateRow {
  std::string label;
  int scenes = 0;
  int pairs = 0;
  double snr_db = 0.0;
  double si_snr_db = 0.0;
  double sdr_db = 0.0;
  double si_snr_improvement_db = 0.0;
  double ewrmsae_deg = 0.0;
  double count_accuracy = 0.0;
};

struct ScoredScene {
  std::string id;
  double t60 = 0.0;
  EvalReport report;
};

// Means per metric for each T60 bucket, an "other" row for scenes outside
// the buckets when present, and an "all" row. Empty buckets are kept.
std::vector<AggregateRow> AggregateByT60(const std::vector<ScoredScene>& scenes);

std::string AggregateTable(const std::vector<AggregateRow>& rows);
std::string AggregateToJsonText(const std::vector<AggregateRow>& rows,
                                const std::vector<ScoredScene>& scenes,
                                const Provenance& provenance);

}  // namespace trajsep

#endif  // TRAJSEP_REPORT_H_

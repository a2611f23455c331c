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

#ifndef TRAJSEP_DATASET_H_
#define TRAJSEP_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "trajsep/acoustics.h"
#include "trajsep/estimators.h"
#include "trajsep/scene.h"

namespace trajsep {

inline constexpr int kManifestFormatVersion = 1;

// Source audio for "synth:<kind>:<seed>" descriptors (kinds "noise" and
// "bursty") or a float WAVE path. Files are truncated or zero padded to n.
MonoSignal LoadSourceAudio(const std::string& audio, std::size_t n,
                           double sample_rate = kDefaultSampleRate);

struct RenderOptions {
  int max_order_cap = 10;
  BlockConfig block;
  // Scale each source image to a channel-0 peak of 1 before mixing, so no
  // source sits below the activity threshold of the count rule by accident.
  bool equalize_peaks = true;
};

struct RenderedScene {
  Mixture mix;
  std::vector<Trajectory> trajectories;  // groundtruth DOA per source
};

// scene-gen + acoustics: validates, renders every source along its path, and
// mixes with sensor noise seeded from spec.seed.
RenderedScene RenderScene(const SceneSpec& spec, const RenderOptions& options = {});

struct DatasetConfig {
  SamplingRanges ranges;
  int num_scenes = 20;
  std::uint64_t master_seed = 1;
  RenderOptions render;
  FrameGrid grid;
};

std::string DatasetConfigToJsonText(const DatasetConfig& cfg);
DatasetConfig DatasetConfigFromJsonText(std::string_view text);

// Paths are relative to the dataset directory.
struct ManifestEntry {
  std::string id;
  std::uint64_t seed = 0;
  std::string status = "ok";  // "ok" or "failed"
  std::string error;          // set when failed
  double t60 = 0.0;
  int num_sources = 0;
  std::size_t num_samples = 0;
  std::string scene;
  std::string mixture;
  std::vector<std::string> images;        // clean channel-0 images
  std::vector<std::string> foa_images;    // clean 4-channel images
  std::vector<std::string> trajectories;  // "x y z" rows, one per sample
  std::vector<std::string> envelopes;     // frame envelopes of normalized images

  bool ok() const { return status == "ok"; }
};

struct DatasetManifest {
  int format_version = kManifestFormatVersion;
  std::uint64_t master_seed = 0;
  std::string config_hash;
  std::vector<ManifestEntry> entries;
};

std::string ManifestToJsonText(const DatasetManifest& manifest);
DatasetManifest ManifestFromJsonText(std::string_view text);

DatasetManifest ReadManifest(const std::filesystem::path& dataset_dir);

// Renders cfg.num_scenes scenes into |out_dir| with up to |parallelism|
// workers and writes manifest.json last. Output is bitwise independent of
// |parallelism|. A failing entry is recorded with status "failed".
DatasetManifest GenerateDataset(const DatasetConfig& cfg,
                                const std::filesystem::path& out_dir, int parallelism = 1);

// Returns one message per problem: missing files, length or channel
// mismatches between an entry's files, and duplicate seeds. Failed entries
// are only checked for seed uniqueness.
std::vector<std::string> ValidateManifest(const DatasetManifest& manifest,
                                          const std::filesystem::path& dataset_dir);

struct LoadedEntry {
  FoaSignal mixture;
  std::vector<FoaSignal> images;
  std::vector<Trajectory> trajectories;
};

LoadedEntry LoadEntry(const ManifestEntry& entry, const std::filesystem::path& dataset_dir);

// 64-bit FNV-1a of |text|, as 16 hex digits.
std::string Fnv1aHex(std::string_view text);

}  // namespace trajsep

#endif  // TRAJSEP_DATASET_H_

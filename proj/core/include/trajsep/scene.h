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

#ifndef TRAJSEP_SCENE_H_
#define TRAJSEP_SCENE_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "trajsep/common.h"
#include "trajsep/signal.h"

namespace trajsep {

// Upper bound on sources per scene; uPIT enumeration is exhaustive up to 8.
inline constexpr int kMaxSources = 8;

struct RoomSpec {
  Vec3 dims;          // meters, room spans [0, dims] on each axis
  double t60 = 0.5;   // seconds; 0 denotes an anechoic room
  Vec3 array_center;  // meters
};

// Moving-source path: p(n) = p0 + (n/N)(pN - p0) + amp * sin(omega * n).
struct TrajectorySpec {
  Vec3 p0;
  Vec3 pN;
  Vec3 omega;  // radians per sample
  Vec3 amp;    // meters
  std::size_t n_samples = 0;
};

struct SourceSpec {
  TrajectorySpec trajectory;
  // Either a WAVE path or a synthetic descriptor "synth:<kind>:<seed>".
  std::string audio;
};

struct SceneSpec {
  RoomSpec room;
  std::vector<SourceSpec> sources;
  double noise_snr_db = 25.0;  // +inf disables sensor noise
  std::uint64_t seed = 0;
  double sample_rate = kDefaultSampleRate;
};

struct SamplingRanges {
  Vec3 room_min{3.0, 3.0, 3.0};
  Vec3 room_max{10.0, 10.0, 6.0};
  double t60_min = 0.2;
  double t60_max = 1.0;
  double snr_min_db = 20.0;
  double snr_max_db = 30.0;
  int num_sources_min = 2;
  int num_sources_max = 2;
  std::size_t n_samples = 160000;
  double sample_rate = kDefaultSampleRate;
  double wall_margin = 0.1;          // endpoints keep this distance to walls
  double array_margin = 0.5;         // array center distance to walls
  double min_source_distance = 0.3;  // anywhere along the path
  double max_periods = 2.0;          // oscillation periods per axis
  std::string audio_kind = "bursty";
  int max_attempts = 100;
};

struct Violation {
  std::string field;
  std::string message;
};

// Position at any sample index n (including n == N).
Vec3 PositionAt(const TrajectorySpec& spec, double n);

// Evaluates the path for n in [0, n_samples). Throws kValidation naming the
// first sample index that leaves the room.
PositionPath SampleTrajectory(const TrajectorySpec& spec, const RoomSpec& room);

// Unit directions from the array center to each path position.
Trajectory DirectionsFromArray(const PositionPath& path, const Vec3& center);

// Returns every violated invariant; an empty list means the scene is valid.
std::vector<Violation> ValidateScene(const SceneSpec& spec,
                                     int max_sources = kMaxSources);

// Deterministic rejection sampler. Throws kInfeasible after
// ranges.max_attempts failed attempts.
SceneSpec SampleScene(std::uint64_t seed, const SamplingRanges& ranges);

std::string SceneToJsonText(const SceneSpec& spec);
SceneSpec SceneFromJsonText(std::string_view text);

std::string SamplingRangesToJsonText(const SamplingRanges& ranges);
SamplingRanges SamplingRangesFromJsonText(std::string_view text);

}  // namespace trajsep

#endif  // TRAJSEP_SCENE_H_

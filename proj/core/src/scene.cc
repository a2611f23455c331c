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

#include "trajsep/scene.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "json_util.h"

namespace trajsep {
namespace {

constexpr const char* kAxisNames[3] = {"x", "y", "z"};

bool InsideRoom(const Vec3& p, const Vec3& dims, double margin) {
  for (int a = 0; a < 3; ++a) {
    if (!(p[a] > margin && p[a] < dims[a] - margin)) return false;
  }
  return true;
}

double Periods(const TrajectorySpec& t, int axis) {
  return std::abs(t.omega[axis]) * static_cast<double>(t.n_samples) /
         (2.0 * kPi);
}

void ValidateSource(const SceneSpec& spec, std::size_t index,
                    std::vector<Violation>& out) {
  const RoomSpec& room = spec.room;
  const TrajectorySpec& t = spec.sources[index].trajectory;
  const std::string prefix = "sources[" + std::to_string(index) + "]";
  const double kEndpointMargin = 0.1;

  if (t.n_samples == 0) {
    out.push_back({prefix + ".trajectory.n_samples", "must be > 0"});
    return;
  }
  for (int a = 0; a < 3; ++a) {
    const std::string axis = kAxisNames[a];
    if (!(t.p0[a] >= kEndpointMargin &&
          t.p0[a] <= room.dims[a] - kEndpointMargin)) {
      out.push_back({prefix + ".trajectory.p0." + axis,
                     "source " + std::to_string(index) + " p0 outside room on " +
                         axis + " axis (margin 0.1 m)"});
    }
    if (!(t.pN[a] >= kEndpointMargin &&
          t.pN[a] <= room.dims[a] - kEndpointMargin)) {
      out.push_back({prefix + ".trajectory.pN." + axis,
                     "source " + std::to_string(index) + " pN outside room on " +
                         axis + " axis (margin 0.1 m)"});
    }
    if (Periods(t, a) > 2.0 + 1e-9) {
      std::ostringstream msg;
      msg << "source " << index << " oscillates " << Periods(t, a)
          << " periods on " << axis << " axis; must be <= 2";
      out.push_back({prefix + ".trajectory.omega." + axis, msg.str()});
    }
    if (!(t.amp[a] >= 0.0) || !std::isfinite(t.amp[a])) {
      out.push_back({prefix + ".trajectory.amp." + axis, "must be finite and >= 0"});
    }
  }
  if (!out.empty() && out.back().field.starts_with(prefix)) return;

  const double kMinArrayDistance = 0.3;
  for (std::size_t n = 0; n < t.n_samples; ++n) {
    const Vec3 p = PositionAt(t, static_cast<double>(n));
    if (!InsideRoom(p, room.dims, 0.0)) {
      out.push_back({prefix + ".trajectory",
                     "source " + std::to_string(index) +
                         " path leaves the room at sample " + std::to_string(n)});
      return;
    }
    if (Norm(p - room.array_center) < kMinArrayDistance) {
      out.push_back({prefix + ".trajectory",
                     "source " + std::to_string(index) +
                         " comes closer than 0.3 m to the array at sample " +
                         std::to_string(n)});
      return;
    }
  }
}

double Uniform(std::mt19937_64& rng, double lo, double hi) {
  if (hi <= lo) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

TrajectorySpec SampleTrajectorySpec(std::mt19937_64& rng, const RoomSpec& room,
                                    const SamplingRanges& r) {
  TrajectorySpec t;
  t.n_samples = r.n_samples;
  for (int a = 0; a < 3; ++a) {
    t.p0[a] = Uniform(rng, r.wall_margin, room.dims[a] - r.wall_margin);
    t.pN[a] = Uniform(rng, r.wall_margin, room.dims[a] - r.wall_margin);
  }
  for (int a = 0; a < 3; ++a) {
    // The baseline is linear, so its wall clearance is smallest at an endpoint.
    const double clearance =
        std::min({t.p0[a], t.pN[a], room.dims[a] - t.p0[a], room.dims[a] - t.pN[a]});
    t.amp[a] = Uniform(rng, 0.0, 0.5 * clearance);
    const double periods = Uniform(rng, 0.0, std::min(r.max_periods, 2.0));
    t.omega[a] = 2.0 * kPi * periods / static_cast<double>(r.n_samples);
  }
  return t;
}

}  // namespace

Vec3 PositionAt(const TrajectorySpec& spec, double n) {
  const double frac = n / static_cast<double>(spec.n_samples);
  Vec3 p;
  for (int a = 0; a < 3; ++a) {
    p[a] = spec.p0[a] + frac * (spec.pN[a] - spec.p0[a]) +
           spec.amp[a] * std::sin(spec.omega[a] * n);
  }
  return p;
}

PositionPath SampleTrajectory(const TrajectorySpec& spec, const RoomSpec& room) {
  PositionPath path;
  path.positions.resize(spec.n_samples);
  for (std::size_t n = 0; n < spec.n_samples; ++n) {
    const Vec3 p = PositionAt(spec, static_cast<double>(n));
    if (!InsideRoom(p, room.dims, 0.0)) {
      throw Error(ErrorCode::kValidation,
                  "trajectory leaves the room at sample " + std::to_string(n));
    }
    path.positions[n] = p;
  }
  return path;
}

Trajectory DirectionsFromArray(const PositionPath& path, const Vec3& center) {
  Trajectory traj;
  traj.dirs.reserve(path.positions.size());
  for (const Vec3& p : path.positions) traj.dirs.push_back(Normalized(p - center));
  return traj;
}

std::vector<Violation> ValidateScene(const SceneSpec& spec, int max_sources) {
  std::vector<Violation> out;
  const RoomSpec& room = spec.room;
  bool room_ok = true;
  for (int a = 0; a < 3; ++a) {
    if (!(room.dims[a] > 0.0) || !std::isfinite(room.dims[a])) {
      out.push_back({std::string("room.dims.") + kAxisNames[a], "must be > 0"});
      room_ok = false;
    }
  }
  if (!(room.t60 == 0.0 || (room.t60 >= 0.2 && room.t60 <= 1.0))) {
    out.push_back({"room.t60", "must be 0 (anechoic) or within [0.2, 1.0] s"});
  }
  if (room_ok && !InsideRoom(room.array_center, room.dims, 0.0)) {
    out.push_back({"room.array_center", "must lie strictly inside the room"});
    room_ok = false;
  }
  const int count = static_cast<int>(spec.sources.size());
  if (count < 1 || count > max_sources) {
    out.push_back({"sources", "source count " + std::to_string(count) +
                                  " outside [1, " + std::to_string(max_sources) +
                                  "]"});
  }
  if (std::isnan(spec.noise_snr_db) || spec.noise_snr_db == -INFINITY) {
    out.push_back({"noise_snr_db", "must be a number or +inf"});
  }
  if (!(spec.sample_rate > 0.0)) {
    out.push_back({"sample_rate", "must be > 0"});
  }
  if (room_ok) {
    for (std::size_t i = 0; i < spec.sources.size(); ++i) {
      ValidateSource(spec, i, out);
      if (spec.sources[i].audio.empty()) {
        out.push_back({"sources[" + std::to_string(i) + "].audio",
                       "missing audio reference"});
      }
    }
  }
  return out;
}

SceneSpec SampleScene(std::uint64_t seed, const SamplingRanges& ranges) {
  if (ranges.num_sources_min < 1 || ranges.num_sources_max < ranges.num_sources_min ||
      ranges.num_sources_max > kMaxSources || ranges.n_samples == 0) {
    throw Error(ErrorCode::kInvalidArgument, "invalid sampling ranges");
  }
  for (int attempt = 0; attempt < ranges.max_attempts; ++attempt) {
    std::mt19937_64 rng(DeriveSeed(seed, static_cast<std::uint64_t>(attempt)));
    SceneSpec scene;
    scene.seed = seed;
    scene.sample_rate = ranges.sample_rate;
    for (int a = 0; a < 3; ++a) {
      scene.room.dims[a] = Uniform(rng, ranges.room_min[a], ranges.room_max[a]);
    }
    scene.room.t60 = Uniform(rng, ranges.t60_min, ranges.t60_max);
    for (int a = 0; a < 3; ++a) {
      const double margin = std::min(ranges.array_margin, 0.25 * scene.room.dims[a]);
      scene.room.array_center[a] =
          Uniform(rng, margin, scene.room.dims[a] - margin);
    }
    scene.noise_snr_db = Uniform(rng, ranges.snr_min_db, ranges.snr_max_db);
    const int count = std::uniform_int_distribution<int>(
        ranges.num_sources_min, ranges.num_sources_max)(rng);
    const std::uint64_t attempt_seed = rng();
    for (int c = 0; c < count; ++c) {
      const std::uint64_t source_seed =
          DeriveSeed(attempt_seed, static_cast<std::uint64_t>(c) + 1);
      std::mt19937_64 source_rng(source_seed);
      SourceSpec source;
      source.trajectory = SampleTrajectorySpec(source_rng, scene.room, ranges);
      source.audio = "synth:" + ranges.audio_kind + ":" +
                     std::to_string(DeriveSeed(source_seed, 0xA0D10));
      scene.sources.push_back(std::move(source));
    }
    bool distance_ok = true;
    for (const SourceSpec& s : scene.sources) {
      for (std::size_t n = 0; n < s.trajectory.n_samples && distance_ok; ++n) {
        const Vec3 p = PositionAt(s.trajectory, static_cast<double>(n));
        distance_ok = Norm(p - scene.room.array_center) >= ranges.min_source_distance;
      }
    }
    if (distance_ok && ValidateScene(scene).empty()) return scene;
  }
  throw Error(ErrorCode::kInfeasible,
              "no feasible scene after " + std::to_string(ranges.max_attempts) +
                  " attempts (seed " + std::to_string(seed) + ")");
}

std::string SceneToJsonText(const SceneSpec& spec) {
  nlohmann::json j;
  j["room"] = {{"dims", spec.room.dims},
               {"t60", spec.room.t60},
               {"array_center", spec.room.array_center}};
  nlohmann::json sources = nlohmann::json::array();
  for (const SourceSpec& s : spec.sources) {
    const TrajectorySpec& t = s.trajectory;
    sources.push_back({{"trajectory",
                        {{"p0", t.p0},
                         {"pN", t.pN},
                         {"omega", t.omega},
                         {"amp", t.amp},
                         {"n_samples", t.n_samples}}},
                       {"audio", s.audio}});
  }
  j["sources"] = std::move(sources);
  j["noise_snr_db"] = json_util::FromDouble(spec.noise_snr_db);
  j["seed"] = spec.seed;
  j["sample_rate"] = spec.sample_rate;
  return j.dump(2) + "\n";
}

SceneSpec SceneFromJsonText(std::string_view text) {
  using json_util::Require;
  const nlohmann::json j = json_util::Parse(text);
  SceneSpec spec;
  try {
    const nlohmann::json& room = j.at("room");
    spec.room.dims = Require<Vec3>(room, "dims");
    spec.room.t60 = Require<double>(room, "t60");
    spec.room.array_center = Require<Vec3>(room, "array_center");
    for (const nlohmann::json& s : j.at("sources")) {
      SourceSpec source;
      const nlohmann::json& t = s.at("trajectory");
      source.trajectory.p0 = Require<Vec3>(t, "p0");
      source.trajectory.pN = Require<Vec3>(t, "pN");
      source.trajectory.omega = Require<Vec3>(t, "omega");
      source.trajectory.amp = Require<Vec3>(t, "amp");
      source.trajectory.n_samples = Require<std::size_t>(t, "n_samples");
      source.audio = Require<std::string>(s, "audio");
      spec.sources.push_back(std::move(source));
    }
    spec.noise_snr_db = json_util::ToDouble(j.at("noise_snr_db"));
    spec.seed = Require<std::uint64_t>(j, "seed");
    spec.sample_rate = Require<double>(j, "sample_rate");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kMalformed, std::string("bad scene file: ") + e.what());
  }
  return spec;
}

std::string SamplingRangesToJsonText(const SamplingRanges& r) {
  nlohmann::json j = {{"room_min", r.room_min},
                      {"room_max", r.room_max},
                      {"t60_min", r.t60_min},
                      {"t60_max", r.t60_max},
                      {"snr_min_db", r.snr_min_db},
                      {"snr_max_db", r.snr_max_db},
                      {"num_sources_min", r.num_sources_min},
                      {"num_sources_max", r.num_sources_max},
                      {"n_samples", r.n_samples},
                      {"sample_rate", r.sample_rate},
                      {"wall_margin", r.wall_margin},
                      {"array_margin", r.array_margin},
                      {"min_source_distance", r.min_source_distance},
                      {"max_periods", r.max_periods},
                      {"audio_kind", r.audio_kind},
                      {"max_attempts", r.max_attempts}};
  return j.dump(2) + "\n";
}

SamplingRanges SamplingRangesFromJsonText(std::string_view text) {
  using json_util::Optional;
  const nlohmann::json j = json_util::Parse(text);
  SamplingRanges d;
  SamplingRanges r;
  r.room_min = Optional(j, "room_min", d.room_min);
  r.room_max = Optional(j, "room_max", d.room_max);
  r.t60_min = Optional(j, "t60_min", d.t60_min);
  r.t60_max = Optional(j, "t60_max", d.t60_max);
  r.snr_min_db = Optional(j, "snr_min_db", d.snr_min_db);
  r.snr_max_db = Optional(j, "snr_max_db", d.snr_max_db);
  r.num_sources_min = Optional(j, "num_sources_min", d.num_sources_min);
  r.num_sources_max = Optional(j, "num_sources_max", d.num_sources_max);
  r.n_samples = Optional(j, "n_samples", d.n_samples);
  r.sample_rate = Optional(j, "sample_rate", d.sample_rate);
  r.wall_margin = Optional(j, "wall_margin", d.wall_margin);
  r.array_margin = Optional(j, "array_margin", d.array_margin);
  r.min_source_distance = Optional(j, "min_source_distance", d.min_source_distance);
  r.max_periods = Optional(j, "max_periods", d.max_periods);
  r.audio_kind = Optional(j, "audio_kind", d.audio_kind);
  r.max_attempts = Optional(j, "max_attempts", d.max_attempts);
  return r;
}

}  // namespace trajsep

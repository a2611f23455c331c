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

#include "trajsep/dataset.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>

#include "json_util.h"
#include "trajsep/envelope.h"
#include "trajsep/parallel.h"
#include "trajsep/wav.h"

namespace trajsep {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr double kSynthRms = 0.1;
constexpr std::uint64_t kNoiseStream = 0x6E6F697365;

MonoSignal WhiteNoise(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, kSynthRms);
  MonoSignal out(n);
  for (double& v : out) v = gauss(rng);
  return out;
}

// Gated noise: alternating bursts and pauses with 10 ms raised-cosine ramps,
// so envelopes of different sources overlap only part of the time.
MonoSignal BurstyNoise(std::size_t n, double fs, std::mt19937_64& rng) {
  MonoSignal out = WhiteNoise(n, rng);
  std::uniform_real_distribution<double> on_len(0.15, 0.6);
  std::uniform_real_distribution<double> off_len(0.1, 0.5);
  std::uniform_real_distribution<double> level(0.5, 1.0);
  const std::size_t ramp = std::max<std::size_t>(1, static_cast<std::size_t>(0.01 * fs));
  std::vector<double> gate(n, 0.0);
  bool on = std::bernoulli_distribution(0.5)(rng);
  std::size_t pos = 0;
  while (pos < n) {
    std::size_t len =
        std::max<std::size_t>(1, static_cast<std::size_t>((on ? on_len(rng) : off_len(rng)) * fs));
    // A leading gap never covers more than half the signal, so every source
    // is audible even in short clips.
    if (pos == 0 && !on) len = std::min(len, n / 2);
    const std::size_t end = std::min(n, pos + len);
    if (on) {
      const double g = level(rng);
      for (std::size_t i = pos; i < end; ++i) {
        const std::size_t edge = std::min(i - pos, end - 1 - i);
        const double w =
            edge >= ramp ? 1.0 : 0.5 - 0.5 * std::cos(kPi * static_cast<double>(edge) / ramp);
        gate[i] = g * w;
      }
    }
    pos = end;
    on = !on;
  }
  for (std::size_t i = 0; i < n; ++i) out[i] *= gate[i];
  return out;
}

json EntryToJson(const ManifestEntry& e) {
  json j;
  j["id"] = e.id;
  j["seed"] = e.seed;
  j["status"] = e.status;
  if (!e.error.empty()) j["error"] = e.error;
  j["t60"] = e.t60;
  j["num_sources"] = e.num_sources;
  j["num_samples"] = e.num_samples;
  j["scene"] = e.scene;
  j["mixture"] = e.mixture;
  j["images"] = e.images;
  j["foa_images"] = e.foa_images;
  j["trajectories"] = e.trajectories;
  j["envelopes"] = e.envelopes;
  return j;
}

ManifestEntry EntryFromJson(const json& j) {
  using json_util::Optional;
  using json_util::Require;
  ManifestEntry e;
  e.id = Require<std::string>(j, "id");
  e.seed = Require<std::uint64_t>(j, "seed");
  e.status = Require<std::string>(j, "status");
  e.error = Optional<std::string>(j, "error", "");
  e.t60 = Require<double>(j, "t60");
  e.num_sources = Require<int>(j, "num_sources");
  e.num_samples = Require<std::size_t>(j, "num_samples");
  e.scene = Require<std::string>(j, "scene");
  e.mixture = Require<std::string>(j, "mixture");
  e.images = Require<std::vector<std::string>>(j, "images");
  e.foa_images = Require<std::vector<std::string>>(j, "foa_images");
  e.trajectories = Require<std::vector<std::string>>(j, "trajectories");
  e.envelopes = Require<std::vector<std::string>>(j, "envelopes");
  return e;
}

ManifestEntry RenderEntry(const DatasetConfig& cfg, std::size_t index, const fs::path& out_dir) {
  ManifestEntry e;
  char id[32];
  std::snprintf(id, sizeof(id), "scene_%04zu", index);
  e.id = id;
  e.seed = DeriveSeed(cfg.master_seed, index);
  const std::string dir = e.id + "/";
  try {
    const SceneSpec spec = SampleScene(e.seed, cfg.ranges);
    e.t60 = spec.room.t60;
    e.num_sources = static_cast<int>(spec.sources.size());
    e.num_samples = spec.sources.front().trajectory.n_samples;
    e.scene = dir + "scene.json";
    e.mixture = dir + "mixture.wav";
    for (int k = 0; k < e.num_sources; ++k) {
      const std::string s = std::to_string(k);
      e.images.push_back(dir + "src" + s + "_ch0.wav");
      e.foa_images.push_back(dir + "src" + s + "_foa.wav");
      e.trajectories.push_back(dir + "traj" + s + ".txt");
      e.envelopes.push_back(dir + "env" + s + ".txt");
    }

    RenderedScene scene = RenderScene(spec, cfg.render);
    const Groundtruth gt =
        MakeGroundtruth(scene.mix.mixture, scene.mix.images, scene.trajectories, cfg.grid);

    fs::create_directories(out_dir / e.id);
    WriteTextFile(out_dir / e.scene, SceneToJsonText(spec));
    WriteFoa(out_dir / e.mixture, scene.mix.mixture);
    for (int k = 0; k < e.num_sources; ++k) {
      const auto ks = static_cast<std::size_t>(k);
      const FoaSignal& img = scene.mix.images[ks];
      WriteMono(out_dir / e.images[ks], img.Channel(kW), img.sample_rate());
      WriteFoa(out_dir / e.foa_images[ks], img);
      WriteVectorsText(out_dir / e.trajectories[ks], scene.trajectories[ks].dirs);
      WriteEnvelopeText(out_dir / e.envelopes[ks], gt.frame_envelopes[ks]);
    }
  } catch (const std::exception& ex) {
    e.status = "failed";
    e.error = ex.what();
  }
  return e;
}

void Expect(std::vector<std::string>& problems, bool ok, const std::string& message) {
  if (!ok) problems.push_back(message);
}

}  // namespace

MonoSignal LoadSourceAudio(const std::string& audio, std::size_t n, double sample_rate) {
  if (audio.rfind("synth:", 0) == 0) {
    const auto colon = audio.find(':', 6);
    if (colon == std::string::npos) {
      throw Error(ErrorCode::kMalformed, "synthetic audio needs 'synth:<kind>:<seed>': " + audio);
    }
    const std::string kind = audio.substr(6, colon - 6);
    std::uint64_t seed = 0;
    try {
      seed = std::stoull(audio.substr(colon + 1));
    } catch (const std::exception&) {
      throw Error(ErrorCode::kMalformed, "bad seed in audio descriptor: " + audio);
    }
    std::mt19937_64 rng(seed);
    if (kind == "noise") return WhiteNoise(n, rng);
    if (kind == "bursty") return BurstyNoise(n, sample_rate, rng);
    throw Error(ErrorCode::kNotFound, "unknown synthetic audio kind '" + kind + "'");
  }
  double fs = 0.0;
  MonoSignal out = ReadMono(audio, 0, &fs);
  if (fs != sample_rate) {
    throw Error(ErrorCode::kUnsupported, audio + ": sample rate " + std::to_string(fs) +
                                             " does not match " + std::to_string(sample_rate));
  }
  out.resize(n, 0.0);
  return out;
}

RenderedScene RenderScene(const SceneSpec& spec, const RenderOptions& options) {
  const std::vector<Violation> violations = ValidateScene(spec);
  if (!violations.empty()) {
    throw Error(ErrorCode::kValidation,
                violations.front().field + ": " + violations.front().message);
  }
  const int order = DefaultMaxOrder(spec.room, options.max_order_cap);
  std::vector<FoaSignal> images;
  RenderedScene out;
  for (const SourceSpec& src : spec.sources) {
    const std::size_t n = src.trajectory.n_samples;
    const MonoSignal audio = LoadSourceAudio(src.audio, n, spec.sample_rate);
    const PositionPath path = SampleTrajectory(src.trajectory, spec.room);
    images.push_back(RenderMovingSource(audio, path, spec.room, order, options.block,
                                        spec.sample_rate));
    if (options.equalize_peaks) {
      double peak = 0.0;
      for (std::size_t i = 0; i < images.back().num_frames(); ++i) {
        peak = std::max(peak, std::fabs(images.back().at(i, kW)));
      }
      if (peak > 0.0) images.back() *= 1.0 / peak;
    }
    out.trajectories.push_back(DirectionsFromArray(path, spec.room.array_center));
  }
  out.mix = MixScene(std::move(images), spec.noise_snr_db, DeriveSeed(spec.seed, kNoiseStream));
  return out;
}

std::string DatasetConfigToJsonText(const DatasetConfig& cfg) {
  json j;
  j["ranges"] = json_util::Parse(SamplingRangesToJsonText(cfg.ranges));
  j["num_scenes"] = cfg.num_scenes;
  j["master_seed"] = cfg.master_seed;
  j["max_order_cap"] = cfg.render.max_order_cap;
  j["block"] = cfg.render.block.block;
  j["block_hop"] = cfg.render.block.hop;
  j["equalize_peaks"] = cfg.render.equalize_peaks;
  j["win"] = cfg.grid.win;
  j["hop"] = cfg.grid.hop;
  return j.dump(2) + "\n";
}

DatasetConfig DatasetConfigFromJsonText(std::string_view text) {
  using json_util::Optional;
  const json j = json_util::Parse(text);
  if (!j.is_object()) throw Error(ErrorCode::kMalformed, "dataset config must be an object");
  DatasetConfig cfg;
  if (j.contains("ranges")) cfg.ranges = SamplingRangesFromJsonText(j.at("ranges").dump());
  cfg.num_scenes = Optional<int>(j, "num_scenes", cfg.num_scenes);
  cfg.master_seed = Optional<std::uint64_t>(j, "master_seed", cfg.master_seed);
  cfg.render.max_order_cap = Optional<int>(j, "max_order_cap", cfg.render.max_order_cap);
  cfg.render.block.block = Optional<std::size_t>(j, "block", cfg.render.block.block);
  cfg.render.block.hop = Optional<std::size_t>(j, "block_hop", cfg.render.block.hop);
  cfg.render.equalize_peaks = Optional<bool>(j, "equalize_peaks", cfg.render.equalize_peaks);
  cfg.grid.win = Optional<std::size_t>(j, "win", cfg.grid.win);
  cfg.grid.hop = Optional<std::size_t>(j, "hop", cfg.grid.hop);
  if (cfg.num_scenes < 0) throw Error(ErrorCode::kInvalidArgument, "num_scenes must be >= 0");
  return cfg;
}

std::string ManifestToJsonText(const DatasetManifest& m) {
  json j;
  j["format_version"] = m.format_version;
  j["master_seed"] = m.master_seed;
  j["config_hash"] = m.config_hash;
  j["entries"] = json::array();
  for (const ManifestEntry& e : m.entries) j["entries"].push_back(EntryToJson(e));
  return j.dump(2) + "\n";
}

DatasetManifest ManifestFromJsonText(std::string_view text) {
  using json_util::Require;
  const json j = json_util::Parse(text);
  DatasetManifest m;
  m.format_version = Require<int>(j, "format_version");
  if (m.format_version != kManifestFormatVersion) {
    throw Error(ErrorCode::kUnsupported,
                "manifest format version " + std::to_string(m.format_version));
  }
  m.master_seed = Require<std::uint64_t>(j, "master_seed");
  m.config_hash = Require<std::string>(j, "config_hash");
  const json& entries = j.at("entries");
  if (!entries.is_array()) throw Error(ErrorCode::kMalformed, "'entries' must be an array");
  for (const json& e : entries) m.entries.push_back(EntryFromJson(e));
  return m;
}

DatasetManifest ReadManifest(const fs::path& dataset_dir) {
  return ManifestFromJsonText(ReadTextFile(dataset_dir / "manifest.json"));
}

DatasetManifest GenerateDataset(const DatasetConfig& cfg, const fs::path& out_dir,
                                int parallelism) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + out_dir.string() + ": " + ec.message());
  DatasetManifest m;
  m.master_seed = cfg.master_seed;
  m.config_hash = Fnv1aHex(DatasetConfigToJsonText(cfg));
  m.entries.resize(static_cast<std::size_t>(cfg.num_scenes));
  ParallelFor(m.entries.size(), parallelism,
              [&](std::size_t i) { m.entries[i] = RenderEntry(cfg, i, out_dir); });
  WriteTextFile(out_dir / "manifest.json", ManifestToJsonText(m));
  return m;
}

std::vector<std::string> ValidateManifest(const DatasetManifest& m, const fs::path& dir) {
  std::vector<std::string> problems;
  std::set<std::uint64_t> seeds;
  for (const ManifestEntry& e : m.entries) {
    Expect(problems, seeds.insert(e.seed).second,
           e.id + ": duplicate seed " + std::to_string(e.seed));
    if (!e.ok()) continue;
    const auto k = static_cast<std::size_t>(e.num_sources);
    if (e.images.size() != k || e.foa_images.size() != k || e.trajectories.size() != k ||
        e.envelopes.size() != k) {
      problems.push_back(e.id + ": per-source file lists do not match num_sources");
      continue;
    }
    std::vector<fs::path> files = {e.scene, e.mixture};
    for (const auto* list : {&e.images, &e.foa_images, &e.trajectories, &e.envelopes}) {
      files.insert(files.end(), list->begin(), list->end());
    }
    bool present = true;
    for (const fs::path& f : files) {
      if (!fs::exists(dir / f)) {
        problems.push_back(e.id + ": missing file " + f.string());
        present = false;
      }
    }
    if (!present) continue;
    try {
      const WaveFile mix = ReadWave(dir / e.mixture);
      Expect(problems, mix.channels == FoaSignal::kNumChannels,
             e.id + ": mixture has " + std::to_string(mix.channels) + " channels");
      const std::size_t n = mix.num_frames();
      Expect(problems, n == e.num_samples,
             e.id + ": mixture has " + std::to_string(n) + " samples, manifest says " +
                 std::to_string(e.num_samples));
      for (std::size_t s = 0; s < k; ++s) {
        const WaveFile img = ReadWave(dir / e.images[s]);
        Expect(problems, img.channels == 1 && img.num_frames() == n,
               e.id + ": image " + e.images[s] + " does not match the mixture shape");
        const WaveFile foa = ReadWave(dir / e.foa_images[s]);
        Expect(problems, foa.channels == FoaSignal::kNumChannels && foa.num_frames() == n,
               e.id + ": image " + e.foa_images[s] + " does not match the mixture shape");
        const std::size_t rows = ReadVectorsText(dir / e.trajectories[s]).size();
        Expect(problems, rows == n,
               e.id + ": trajectory " + e.trajectories[s] + " has " + std::to_string(rows) +
                   " rows but the mixture has " + std::to_string(n) + " samples");
        const FrameEnvelope env = ReadEnvelopeText(dir / e.envelopes[s]);
        Expect(problems, env.values.size() == FrameCount(n, env.grid),
               e.id + ": envelope " + e.envelopes[s] + " has the wrong frame count");
      }
    } catch (const std::exception& ex) {
      problems.push_back(e.id + ": " + ex.what());
    }
  }
  return problems;
}

LoadedEntry LoadEntry(const ManifestEntry& e, const fs::path& dir) {
  if (!e.ok()) throw Error(ErrorCode::kInvalidArgument, e.id + " failed to generate: " + e.error);
  LoadedEntry out;
  out.mixture = ReadFoa(dir / e.mixture);
  for (std::size_t s = 0; s < e.foa_images.size(); ++s) {
    out.images.push_back(ReadFoa(dir / e.foa_images[s]));
    Trajectory t;
    t.dirs = ReadVectorsText(dir / e.trajectories[s]);
    if (t.dirs.size() != out.mixture.num_frames()) {
      throw Error(ErrorCode::kShapeMismatch, e.id + ": trajectory length mismatches mixture");
    }
    out.trajectories.push_back(std::move(t));
  }
  return out;
}

std::string Fnv1aHex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace trajsep

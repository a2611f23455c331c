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

#include "trajsep/pipeline.h"

#include <chrono>
#include <string>

#include "trajsep/parallel.h"
#include "trajsep/trajectory.h"

namespace trajsep {
namespace {

using Clock = std::chrono::steady_clock;

double SecondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Re-raises |e| with a location |label| prefixed, keeping its code.
[[noreturn]] void Relabel(const std::string& label) {
  try {
    throw;
  } catch (const Error& e) {
    throw Error(e.code(), label + ": " + e.what());
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, label + ": " + e.what());
  }
}

void CheckTrajectory(const Trajectory& traj, std::size_t n, const std::string& who) {
  if (traj.dirs.size() != n) {
    throw Error(ErrorCode::kShapeMismatch, who + " returned " +
                                               std::to_string(traj.dirs.size()) +
                                               " rows, expected " + std::to_string(n));
  }
  CheckUnitRows(traj.dirs);
}

}  // namespace

void ValidatePipelineConfig(const PipelineConfig& cfg) {
  if (cfg.rounds < 1) throw Error(ErrorCode::kInvalidArgument, "rounds must be >= 1");
  if (cfg.c_max < 1 || cfg.c_max > static_cast<int>(kMaxAssignmentSize)) {
    throw Error(ErrorCode::kInvalidArgument, "c_max must be in [1, 8]");
  }
  if (cfg.grid.win == 0 || cfg.grid.hop == 0) {
    throw Error(ErrorCode::kInvalidArgument, "frame window and hop must be > 0");
  }
}

InitialTracking RunInitialTracking(const FoaSignal& mixture,
                                   const EnvelopeEstimator& envelope,
                                   const Tracker& tracker, const PipelineConfig& cfg) {
  ValidatePipelineConfig(cfg);
  const std::size_t n = mixture.num_frames();
  const std::vector<FrameEnvelope> envs = envelope.Estimate(mixture, cfg.c_max, cfg.grid);
  if (envs.size() != static_cast<std::size_t>(cfg.c_max)) {
    throw Error(ErrorCode::kShapeMismatch, "envelope estimator " + envelope.name() +
                                               " returned " + std::to_string(envs.size()) +
                                               " channels, expected c_max");
  }
  for (const FrameEnvelope& e : envs) {
    for (double v : e.values) {
      if (!(v >= 0.0)) {
        throw Error(ErrorCode::kValidation, "envelope estimator returned a negative value");
      }
    }
  }
  InitialTracking out;
  out.count = EstimateSourceCount(envs, cfg.count_threshold);
  if (out.count.count == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "no active sources: estimated count 0 of c_max " +
                    std::to_string(cfg.c_max));
  }
  for (int c = 0; c < cfg.c_max; ++c) {
    if (out.count.active[static_cast<std::size_t>(c)]) out.channels.push_back(c);
  }
  const std::size_t slots = out.channels.size();
  out.envelopes.resize(slots);
  out.trajectories.resize(slots);
  out.intensity.resize(slots);
  ParallelFor(slots, cfg.parallelism, [&](std::size_t s) {
    const std::size_t c = static_cast<std::size_t>(out.channels[s]);
    out.envelopes[s] = InterpolateToSamples(envs[c], n, mixture.sample_rate());
    out.trajectories[s] = tracker.Track(mixture, out.envelopes[s], nullptr);
    CheckTrajectory(out.trajectories[s], n, "tracker " + tracker.name());
    out.intensity[s] = MakeIntensityTrajectory(out.envelopes[s], out.trajectories[s]);
  });
  return out;
}

Facilitation RunMutualFacilitation(const FoaSignal& mixture, const SampleEnvelope& envelope,
                                   const Trajectory& initial, const Extractor& extractor,
                                   const Tracker& tracker, const PipelineConfig& cfg) {
  ValidatePipelineConfig(cfg);
  const std::size_t n = mixture.num_frames();
  Facilitation out;
  out.trajectory_history.push_back(initial);
  out.envelope_history.push_back(envelope);
  out.intensity_history.push_back(MakeIntensityTrajectory(envelope, initial));
  for (int round = 1; round <= cfg.rounds; ++round) {
    try {
      const FramedIntensityTrajectory fit =
          FrameIntensityTrajectory(out.intensity_history.back(), cfg.grid);
      out.separated = extractor.Extract(mixture, fit);
      if (out.separated.num_frames() != n) {
        throw Error(ErrorCode::kShapeMismatch,
                    "extractor " + extractor.name() + " changed the signal length");
      }
      SampleEnvelope env = envelope;
      if (cfg.refresh_envelope) {
        env = InterpolateToSamples(ExtractEnvelope(out.separated.Channel(kW), cfg.grid), n,
                                   mixture.sample_rate());
      }
      Trajectory refined = tracker.Track(mixture, env, &out.separated);
      CheckTrajectory(refined, n, "tracker " + tracker.name());
      out.intensity_history.push_back(MakeIntensityTrajectory(env, refined));
      out.trajectory_history.push_back(std::move(refined));
      out.envelope_history.push_back(std::move(env));
    } catch (...) {
      Relabel("round " + std::to_string(round));
    }
  }
  return out;
}

PipelineResult RunFullPipeline(const FoaSignal& mixture, const ComponentSet& components,
                               const PipelineConfig& cfg) {
  ValidatePipelineConfig(cfg);
  if (!components.envelope || !components.tracker || !components.extractor ||
      !components.refiner) {
    throw Error(ErrorCode::kInvalidArgument, "all four pipeline components are required");
  }
  CheckFinite(mixture);

  PipelineResult result;
  result.rounds = cfg.rounds;
  result.components = {components.envelope->name(), components.tracker->name(),
                       components.extractor->name(), components.refiner->name()};
  result.normalization = NormalizationGain(mixture);
  FoaSignal normalized = mixture;
  normalized *= result.normalization;

  auto start = Clock::now();
  InitialTracking init;
  try {
    init = RunInitialTracking(normalized, *components.envelope, *components.tracker, cfg);
  } catch (...) {
    Relabel("stage 1 (initial tracking)");
  }
  result.timings.push_back({"initial_tracking", SecondsSince(start)});
  result.estimated_count = init.count.count;
  result.active = init.count.active;

  const std::size_t slots = init.channels.size();
  std::vector<Facilitation> stage2(slots);
  start = Clock::now();
  ParallelFor(slots, cfg.parallelism, [&](std::size_t s) {
    try {
      stage2[s] = RunMutualFacilitation(normalized, init.envelopes[s], init.trajectories[s],
                                        *components.extractor, *components.tracker, cfg);
    } catch (...) {
      Relabel("stage 2 (mutual facilitation), source " + std::to_string(s));
    }
  });
  result.timings.push_back({"mutual_facilitation", SecondsSince(start)});

  result.sources.resize(slots);
  start = Clock::now();
  const double inverse = 1.0 / result.normalization;
  ParallelFor(slots, cfg.parallelism, [&](std::size_t s) {
    try {
      Facilitation& f = stage2[s];
      const FramedIntensityTrajectory fit =
          FrameIntensityTrajectory(f.intensity_history.back(), cfg.grid);
      MonoSignal mono = components.refiner->Refine(normalized, f.separated, fit);
      if (mono.size() != normalized.num_frames()) {
        throw Error(ErrorCode::kShapeMismatch,
                    "refiner " + components.refiner->name() + " returned " +
                        std::to_string(mono.size()) + " samples");
      }
      for (double& v : mono) v *= inverse;
      SourceResult& r = result.sources[s];
      r.channel = init.channels[s];
      r.estimate = std::move(mono);
      r.separated = std::move(f.separated);
      r.separated *= inverse;
      r.trajectory = f.trajectory_history.back();
      r.trajectory_history = std::move(f.trajectory_history);
      r.intensity_history = std::move(f.intensity_history);
      r.envelope_history = std::move(f.envelope_history);
    } catch (...) {
      Relabel("stage 3 (refinement extraction), source " + std::to_string(s));
    }
  });
  result.timings.push_back({"refinement_extraction", SecondsSince(start)});
  return result;
}

EvalReport EvaluatePipeline(const PipelineResult& result, const Groundtruth& gt,
                            const FoaSignal& mixture, const EvalOptions& options) {
  EvalReport report;
  report.true_count = gt.num_sources();
  report.estimated_count = result.estimated_count;
  report.sdr_filter_len = options.sdr_filter_len;

  const std::size_t k = result.sources.size();
  const std::size_t c = gt.images.size();
  const std::size_t size = std::max(k, c);
  std::vector<MonoSignal> targets(c);
  for (std::size_t j = 0; j < c; ++j) targets[j] = gt.images[j].Channel(kW);

  // Padded rows/columns cost nothing, so they absorb surplus estimates or
  // targets without influencing the real pairs.
  std::vector<double> cost(size * size, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      cost[i * size + j] = -SnrDb(result.sources[i].estimate, targets[j]);
    }
  }
  const Assignment assignment = UpitAssign(cost, size);

  const MonoSignal mix_w = mixture.Channel(kW);
  report.permutation.assign(k, -1);
  for (std::size_t i = 0; i < k; ++i) {
    const int j = assignment.perm[i];
    if (j >= static_cast<int>(c)) continue;
    report.permutation[i] = j;
    const SourceResult& src = result.sources[i];
    const MonoSignal& trg = targets[static_cast<std::size_t>(j)];
    const Trajectory& truth = gt.trajectories[static_cast<std::size_t>(j)];
    const auto& weight = gt.sample_envelopes[static_cast<std::size_t>(j)].values;
    SourceMetrics m;
    m.estimate = static_cast<int>(i);
    m.target = j;
    m.snr_db = SnrDb(src.estimate, trg);
    const bool silent = PeakAbs(src.estimate) == 0.0;
    m.si_snr_db = silent ? -kDbCap : SiSnrDb(src.estimate, trg);
    m.sdr_db = silent ? -kDbCap
                      : SdrDb(src.estimate, trg, std::min(options.sdr_filter_len, trg.size()));
    m.ewrmsae_deg = EwrmsaeDeg(src.trajectory.dirs, truth.dirs, weight);
    for (const Trajectory& h : src.trajectory_history) {
      m.ewrmsae_history_deg.push_back(EwrmsaeDeg(h.dirs, truth.dirs, weight));
    }
    m.mixture_snr_db = SnrDb(mix_w, trg);
    m.mixture_si_snr_db = SiSnrDb(mix_w, trg);
    report.per_source.push_back(std::move(m));
  }
  return report;
}

}  // namespace trajsep

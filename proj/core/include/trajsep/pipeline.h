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

#ifndef TRAJSEP_PIPELINE_H_
#define TRAJSEP_PIPELINE_H_

#include <string>
#include <vector>

#include "trajsep/envelope.h"
#include "trajsep/estimators.h"
#include "trajsep/metrics.h"
#include "trajsep/signal.h"

namespace trajsep {

struct PipelineConfig {
  int rounds = 2;
  int c_max = 2;
  double count_threshold = kCountThreshold;
  FrameGrid grid;
  // Recompute the envelope from each round's separated signal. Off keeps the
  // initial estimate fixed through every round.
  bool refresh_envelope = false;
  int parallelism = 1;  // concurrent sources
};

void ValidatePipelineConfig(const PipelineConfig& cfg);

// Stage 1 output. Vectors are indexed by active source slot.
struct InitialTracking {
  SourceCount count;
  std::vector<int> channels;  // envelope channel of each slot
  std::vector<SampleEnvelope> envelopes;
  std::vector<Trajectory> trajectories;
  std::vector<IntensityTrajectory> intensity;
};

// Estimates c_max envelopes, keeps channels passing the count rule, and
// tracks each one on (mixture, envelope). |mixture| should already be peak
// normalized. Throws kInvalidArgument when no channel is active.
InitialTracking RunInitialTracking(const FoaSignal& mixture,
                                   const EnvelopeEstimator& envelope,
                                   const Tracker& tracker, const PipelineConfig& cfg);

// Stage 2 output for one source. Histories have rounds + 1 entries; entry 0
// is the initial trajectory.
struct Facilitation {
  FoaSignal separated;
  std::vector<Trajectory> trajectory_history;
  std::vector<IntensityTrajectory> intensity_history;
  std::vector<SampleEnvelope> envelope_history;
};

// Alternates extraction with the previous round's intensity trajectory and
// tracking on (mixture, envelope, separated) for cfg.rounds rounds.
Facilitation RunMutualFacilitation(const FoaSignal& mixture, const SampleEnvelope& envelope,
                                   const Trajectory& initial, const Extractor& extractor,
                                   const Tracker& tracker, const PipelineConfig& cfg);

struct SourceResult {
  int channel = 0;       // envelope channel this slot came from
  MonoSignal estimate;   // reference-channel estimate at the mixture's scale
  FoaSignal separated;   // last multichannel separation, mixture scale
  Trajectory trajectory; // refined trajectory
  std::vector<Trajectory> trajectory_history;
  std::vector<IntensityTrajectory> intensity_history;
  std::vector<SampleEnvelope> envelope_history;
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct PipelineResult {
  std::vector<SourceResult> sources;
  int estimated_count = 0;
  std::vector<bool> active;
  double normalization = 1.0;
  ComponentNames components;
  std::vector<StageTiming> timings;
  int rounds = 0;
};

// Stage 1 -> stage 2 -> refinement extraction on the W reference channel.
PipelineResult RunFullPipeline(const FoaSignal& mixture, const ComponentSet& components,
                               const PipelineConfig& cfg);

struct SourceMetrics {
  int estimate = -1;
  int target = -1;
  double snr_db = 0.0;
  double si_snr_db = 0.0;
  double sdr_db = 0.0;
  double ewrmsae_deg = 0.0;
  std::vector<double> ewrmsae_history_deg;  // one per stage-2 history entry
  double mixture_snr_db = 0.0;              // unprocessed W vs target
  double mixture_si_snr_db = 0.0;
};

struct EvalReport {
  std::vector<SourceMetrics> per_source;  // one per assigned (estimate, target)
  std::vector<int> permutation;           // estimate -> target, -1 if unmatched
  int true_count = 0;
  int estimated_count = 0;
  double db_cap = kDbCap;
  std::size_t sdr_filter_len = kDefaultSdrFilterLength;
};

struct EvalOptions {
  std::size_t sdr_filter_len = kDefaultSdrFilterLength;
};

// Scores |result| against |gt| under the assignment minimizing total
// negative SNR between estimates and groundtruth W images.
EvalReport EvaluatePipeline(const PipelineResult& result, const Groundtruth& gt,
                            const FoaSignal& mixture, const EvalOptions& options = {});

}  // namespace trajsep

#endif  // TRAJSEP_PIPELINE_H_

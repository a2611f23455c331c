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

#ifndef TRAJSEP_ESTIMATORS_H_
#define TRAJSEP_ESTIMATORS_H_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "trajsep/signal.h"

namespace trajsep {

// Component contracts. Implementations are stateless after construction and
// may be called concurrently on distinct inputs.

class EnvelopeEstimator {
 public:
  virtual ~EnvelopeEstimator() = default;
  virtual std::string name() const = 0;
  // Returns exactly c_max nonnegative frame envelopes on |grid|.
  virtual std::vector<FrameEnvelope> Estimate(const FoaSignal& mixture, int c_max,
                                              const FrameGrid& grid) const = 0;
};

class Tracker {
 public:
  virtual ~Tracker() = default;
  virtual std::string name() const = 0;
  // |separated| is null during initial tracking. Output rows are unit norm.
  virtual Trajectory Track(const FoaSignal& mixture, const SampleEnvelope& env,
                           const FoaSignal* separated) const = 0;
};

class Extractor {
 public:
  virtual ~Extractor() = default;
  virtual std::string name() const = 0;
  // Multichannel estimate of the source the trajectory points at; same shape
  // as |mixture|.
  virtual FoaSignal Extract(const FoaSignal& mixture,
                            const FramedIntensityTrajectory& fit) const = 0;
};

class RefinementExtractor {
 public:
  virtual ~RefinementExtractor() = default;
  virtual std::string name() const = 0;
  // Reference-channel (W) estimate of length mixture.num_frames().
  virtual MonoSignal Refine(const FoaSignal& mixture, const FoaSignal& separated,
                            const FramedIntensityTrajectory& fit) const = 0;
};

// ---------------------------------------------------------------------------
// Classical implementations.

struct PseudoIntensityOptions {
  FrameGrid grid;
  std::size_t smoothing = 5;       // moving-average length in frames
  double confidence_floor = 1e-3;  // frames with a lower envelope are inherited
  // Exponent on the envelope-to-signal peak ratio that weights each frame;
  // larger values trust only frames the tracked source dominates.
  double selectivity = 4.0;
};

// Broadband acoustic-intensity DOA: per STFT frame, sum over bins of
// Re(conj(W) * [X, Y, Z]).
std::vector<Vec3> FrameIntensityVectors(const FoaSignal& signal, const FrameGrid& grid);

// Tracker contract via envelope-weighted pseudo-intensity vectors of the
// separated signal when available, else of the mixture.
Trajectory PseudoIntensityTrack(const FoaSignal& signal, const SampleEnvelope& env,
                                const PseudoIntensityOptions& options = {});

struct SteeredExtraction {
  FoaSignal signal;
  std::vector<std::size_t> passthrough_frames;  // zero-norm steering frames
};

// Per-frame first-order cardioid steered along the trajectory direction,
// gain-limited toward the frame's intensity magnitude, crossfaded between
// frame anchors and re-encoded to FOA at the steering direction.
SteeredExtraction SteeredExtract(const FoaSignal& mixture,
                                 const FramedIntensityTrajectory& fit);

class PseudoIntensityTracker : public Tracker {
 public:
  explicit PseudoIntensityTracker(PseudoIntensityOptions options = {})
      : options_(options) {}
  std::string name() const override { return "pseudo-intensity"; }
  Trajectory Track(const FoaSignal& mixture, const SampleEnvelope& env,
                   const FoaSignal* separated) const override;

 private:
  PseudoIntensityOptions options_;
};

class SteeredExtractor : public Extractor {
 public:
  std::string name() const override { return "steered"; }
  FoaSignal Extract(const FoaSignal& mixture,
                    const FramedIntensityTrajectory& fit) const override;
};

// Steers the cardioid over the mixture with the refined trajectory and caps
// each frame's magnitude by the separated signal's frame peak.
class SteeredRefinementExtractor : public RefinementExtractor {
 public:
  std::string name() const override { return "steered"; }
  MonoSignal Refine(const FoaSignal& mixture, const FoaSignal& separated,
                    const FramedIntensityTrajectory& fit) const override;
};

// ---------------------------------------------------------------------------
// Groundtruth and oracle implementations.

// Reference data for one scene. Signal-domain fields keep the mixture's
// scale; envelope-domain fields are computed on the peak-normalized scale
// (mixture channel-0 peak = 1) that the pipeline feeds its components.
struct Groundtruth {
  std::vector<FoaSignal> images;
  std::vector<Trajectory> trajectories;
  double normalization = 1.0;  // gain that peak-normalizes the mixture
  FrameGrid grid;
  std::vector<FrameEnvelope> frame_envelopes;    // of normalized images, W
  std::vector<SampleEnvelope> sample_envelopes;  // interpolated
  FrameEnvelope mixture_envelope;                // of the normalized mixture

  int num_sources() const { return static_cast<int>(images.size()); }
};

// 1 / (channel-0 peak); throws for a silent mixture.
double NormalizationGain(const FoaSignal& mixture);

Groundtruth MakeGroundtruth(const FoaSignal& mixture, std::vector<FoaSignal> images,
                            std::vector<Trajectory> trajectories,
                            const FrameGrid& grid = {});

struct OracleOptions {
  double envelope_sigma = 0.0;  // additive Gaussian envelope noise (clamped >= 0)
  double jitter_deg = 0.0;      // tracker angular error per sample
  // Jitter multiplier applied when the tracker receives a separated signal.
  double separated_jitter_factor = 1.0;
  double leakage = 0.0;  // residual-mixture fraction added by extractors
  std::uint64_t seed = 0;
};

// Index of the source whose groundtruth best matches |env| (cosine
// similarity of sample envelopes).
int MatchSourceByEnvelope(const Groundtruth& gt, const SampleEnvelope& env);

// Index of the source whose framed groundtruth envelope best matches the
// magnitudes of |fit|.
int MatchSourceByIntensity(const Groundtruth& gt, const FramedIntensityTrajectory& fit);

// Rotates each row of |traj| by exactly |angle_deg| about a random axis
// perpendicular to it.
Trajectory JitterTrajectory(const Trajectory& traj, double angle_deg,
                            std::uint64_t seed);

class OracleEnvelopeEstimator : public EnvelopeEstimator {
 public:
  OracleEnvelopeEstimator(std::shared_ptr<const Groundtruth> gt, OracleOptions options)
      : gt_(std::move(gt)), options_(options) {}
  std::string name() const override { return "oracle"; }
  std::vector<FrameEnvelope> Estimate(const FoaSignal& mixture, int c_max,
                                      const FrameGrid& grid) const override;

 private:
  std::shared_ptr<const Groundtruth> gt_;
  OracleOptions options_;
};

class OracleTracker : public Tracker {
 public:
  OracleTracker(std::shared_ptr<const Groundtruth> gt, OracleOptions options)
      : gt_(std::move(gt)), options_(options) {}
  std::string name() const override { return "oracle"; }
  Trajectory Track(const FoaSignal& mixture, const SampleEnvelope& env,
                   const FoaSignal* separated) const override;

 private:
  std::shared_ptr<const Groundtruth> gt_;
  OracleOptions options_;
};

class OracleExtractor : public Extractor {
 public:
  OracleExtractor(std::shared_ptr<const Groundtruth> gt, OracleOptions options)
      : gt_(std::move(gt)), options_(options) {}
  std::string name() const override { return "oracle"; }
  FoaSignal Extract(const FoaSignal& mixture,
                    const FramedIntensityTrajectory& fit) const override;

 private:
  std::shared_ptr<const Groundtruth> gt_;
  OracleOptions options_;
};

class OracleRefinementExtractor : public RefinementExtractor {
 public:
  OracleRefinementExtractor(std::shared_ptr<const Groundtruth> gt, OracleOptions options)
      : gt_(std::move(gt)), options_(options) {}
  std::string name() const override { return "oracle"; }
  MonoSignal Refine(const FoaSignal& mixture, const FoaSignal& separated,
                    const FramedIntensityTrajectory& fit) const override;

 private:
  std::shared_ptr<const Groundtruth> gt_;
  OracleOptions options_;
};

// ---------------------------------------------------------------------------
// Name-based component selection.

struct ComponentNames {
  std::string envelope = "oracle";
  std::string tracker = "pseudo-intensity";
  std::string extractor = "steered";
  std::string refiner = "steered";
};

struct ComponentSet {
  std::shared_ptr<const EnvelopeEstimator> envelope;
  std::shared_ptr<const Tracker> tracker;
  std::shared_ptr<const Extractor> extractor;
  std::shared_ptr<const RefinementExtractor> refiner;
};

// Registered names: envelope {oracle}; tracker {pseudo-intensity, oracle};
// extractor {steered, oracle}; refiner {steered, oracle}. Oracle components
// need |gt|. Unknown names throw kNotFound naming the component.
ComponentSet MakeComponents(const ComponentNames& names,
                            std::shared_ptr<const Groundtruth> gt = nullptr,
                            const OracleOptions& oracle = {},
                            const PseudoIntensityOptions& tracking = {});

// Throws kNotFound for the first name not registered for its role.
void CheckComponentNames(const ComponentNames& names);

// "oracle" selects the oracle for every role, "classical" (or empty) the
// defaults, otherwise "role=name,..." overrides individual roles.
ComponentNames ParseComponentNames(const std::string& spec);

}  // namespace trajsep

#endif  // TRAJSEP_ESTIMATORS_H_

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

#include "trajsep/estimators.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "support/oracles.h"
#include "support/scenes.h"
#include "trajsep/envelope.h"
#include "trajsep/metrics.h"
#include "trajsep/trajectory.h"

namespace trajsep {
namespace {

using testing::Build;
using testing::BuiltScene;
using testing::Horizontal;
using testing::StaticPath;
using testing::TestRoom;

constexpr std::size_t kN = 16000;
constexpr double kNoNoise = std::numeric_limits<double>::infinity();

FoaSignal Normalized(const BuiltScene& b) {
  FoaSignal m = b.rendered.mix.mixture;
  m *= b.gt->normalization;
  return m;
}

FoaSignal NormalizedImage(const BuiltScene& b, int c) {
  FoaSignal m = b.gt->images[static_cast<std::size_t>(c)];
  m *= b.gt->normalization;
  return m;
}

SceneSpec StaticScene(const std::vector<Vec3>& positions, double t60, std::uint64_t seed,
                      const std::string& kind = "noise") {
  SceneSpec s;
  s.room = TestRoom(t60);
  s.seed = seed;
  s.noise_snr_db = kNoNoise;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    s.sources.push_back({StaticPath(positions[i], kN),
                         "synth:" + kind + ":" + std::to_string(seed * 10 + i)});
  }
  return s;
}

FramedIntensityTrajectory TrueFit(const BuiltScene& b, int c) {
  const auto i = static_cast<std::size_t>(c);
  return FrameIntensityTrajectory(
      MakeIntensityTrajectory(b.gt->sample_envelopes[i], b.gt->trajectories[i]), b.gt->grid);
}

double MedianErrorDeg(const Trajectory& est, const Trajectory& trg) {
  std::vector<double> err;
  for (std::size_t n = 0; n < est.dirs.size(); ++n) {
    err.push_back(AngularErrorDeg(est.dirs[n], trg.dirs[n]));
  }
  std::nth_element(err.begin(), err.begin() + err.size() / 2, err.end());
  return err[err.size() / 2];
}

class ContractTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    scene_ = new BuiltScene(Build(testing::TwoSourceScene(3, 120.0, 0.3, kN)));
  }
  static void TearDownTestSuite() { delete scene_; }
  static BuiltScene* scene_;
};
BuiltScene* ContractTest::scene_ = nullptr;

TEST_F(ContractTest, EveryImplementationKeepsShapes) {
  const BuiltScene& b = *scene_;
  const FoaSignal mix = Normalized(b);
  OracleOptions noisy;
  noisy.envelope_sigma = 0.05;
  noisy.jitter_deg = 15.0;
  noisy.leakage = 0.2;
  noisy.seed = 4;
  for (const OracleOptions& opt : {OracleOptions{}, noisy}) {
    for (const char* spec : {"oracle", "classical"}) {
      const ComponentSet cs = MakeComponents(ParseComponentNames(spec), b.gt, opt);
      const auto envs = cs.envelope->Estimate(mix, 3, b.gt->grid);
      ASSERT_EQ(envs.size(), 3u);
      for (const FrameEnvelope& e : envs) {
        ASSERT_EQ(e.values.size(), FrameCount(kN, b.gt->grid));
        for (double v : e.values) ASSERT_GE(v, 0.0);
      }
      const SampleEnvelope env = InterpolateToSamples(envs[0], kN, mix.sample_rate());
      for (const FoaSignal* sep : {static_cast<const FoaSignal*>(nullptr), &mix}) {
        const Trajectory t = cs.tracker->Track(mix, env, sep);
        ASSERT_EQ(t.dirs.size(), kN);
        for (const Vec3& d : t.dirs) ASSERT_NEAR(Norm(d), 1.0, 1e-9) << cs.tracker->name();
      }
      const auto fit = FrameIntensityTrajectory(
          MakeIntensityTrajectory(env, cs.tracker->Track(mix, env, nullptr)), b.gt->grid);
      const FoaSignal x = cs.extractor->Extract(mix, fit);
      EXPECT_EQ(x.num_frames(), kN);
      const MonoSignal r = cs.refiner->Refine(mix, x, fit);
      EXPECT_EQ(r.size(), kN);
      for (double v : r) ASSERT_TRUE(std::isfinite(v));
    }
  }
}

TEST_F(ContractTest, ExactOracles) {
  const BuiltScene& b = *scene_;
  const FoaSignal mix = Normalized(b);
  const ComponentSet cs = MakeComponents(ParseComponentNames("oracle"), b.gt);
  const auto envs = cs.envelope->Estimate(mix, 2, b.gt->grid);
  for (int c = 0; c < 2; ++c) {
    const auto i = static_cast<std::size_t>(c);
    EXPECT_EQ(envs[i].values, b.gt->frame_envelopes[i].values);
    const Trajectory t = cs.tracker->Track(mix, b.gt->sample_envelopes[i], nullptr);
    EXPECT_EQ(t.dirs, b.gt->trajectories[i].dirs);
    EXPECT_NEAR(EwrmsaeDeg(t.dirs, b.gt->trajectories[i].dirs, b.gt->sample_envelopes[i].values),
                0.0, 1e-6);
    const FoaSignal x = cs.extractor->Extract(mix, TrueFit(b, c));
    const FoaSignal img = NormalizedImage(b, c);
    EXPECT_EQ(x, img);
    EXPECT_EQ(SiSnrDb(x.Channel(kW), img.Channel(kW)), kDbCap);
  }
}

TEST_F(ContractTest, JitterMatchesRequestedAngle) {
  const BuiltScene& b = *scene_;
  const FoaSignal mix = Normalized(b);
  OracleOptions opt;
  opt.jitter_deg = 10.0;
  opt.seed = 17;
  const ComponentSet cs = MakeComponents(ParseComponentNames("oracle"), b.gt, opt);
  const Trajectory t = cs.tracker->Track(mix, b.gt->sample_envelopes[1], nullptr);
  EXPECT_NEAR(EwrmsaeDeg(t.dirs, b.gt->trajectories[1].dirs, b.gt->sample_envelopes[1].values),
              10.0, 1e-6);
  opt.separated_jitter_factor = 0.5;
  const ComponentSet half = MakeComponents(ParseComponentNames("oracle"), b.gt, opt);
  const Trajectory t2 = half.tracker->Track(mix, b.gt->sample_envelopes[1], &mix);
  EXPECT_NEAR(EwrmsaeDeg(t2.dirs, b.gt->trajectories[1].dirs, b.gt->sample_envelopes[1].values),
              5.0, 1e-6);
}

TEST(JitterTest, RotatesEveryRowByExactAngle) {
  std::mt19937_64 rng(5);
  Trajectory t;
  for (int i = 0; i < 500; ++i) t.dirs.push_back(oracle::RandomUnit(rng));
  const Trajectory j = JitterTrajectory(t, 7.5, 3);
  for (std::size_t i = 0; i < t.dirs.size(); ++i) {
    EXPECT_NEAR(static_cast<double>(oracle::AngleDegRef(j.dirs[i], t.dirs[i])), 7.5, 1e-9);
  }
  EXPECT_EQ(j.dirs, JitterTrajectory(t, 7.5, 3).dirs);
}

TEST(OracleTest, MissingGroundtruthThrows) {
  EXPECT_THROW(MakeComponents(ParseComponentNames("oracle"), nullptr), Error);
  // The default envelope estimator is groundtruth-backed too.
  EXPECT_THROW(MakeComponents(ParseComponentNames("classical")), Error);
}

TEST(PseudoIntensityTest, StaticAnechoicSourceWithinFiveDegrees) {
  const Vec3 c = TestRoom(0.0).array_center;
  for (double az : {0.0, 75.0, 200.0, 310.0}) {
    const BuiltScene b = Build(StaticScene({Horizontal(az, 1.5, c, 0.4)}, 0.0, 1));
    const Trajectory t = PseudoIntensityTrack(Normalized(b), b.gt->sample_envelopes[0]);
    EXPECT_LE(MedianErrorDeg(t, b.gt->trajectories[0]), 5.0) << "azimuth " << az;
    for (const Vec3& d : t.dirs) ASSERT_NEAR(Norm(d), 1.0, 1e-9);
  }
}

TEST(PseudoIntensityTest, PlusXAxis) {
  const Vec3 c = TestRoom(0.0).array_center;
  const BuiltScene b = Build(StaticScene({c + Vec3{2.0, 0, 0}}, 0.0, 2));
  const auto v = FrameIntensityVectors(Normalized(b), b.gt->grid);
  Vec3 mean;
  for (const Vec3& x : v) mean += x;
  const Vec3 u = trajsep::Normalized(mean);
  EXPECT_NEAR(u.x, 1.0, 1e-6);
  EXPECT_NEAR(u.y, 0.0, 1e-3);
  EXPECT_NEAR(u.z, 0.0, 1e-3);
}

TEST(PseudoIntensityTest, MedianErrorGrowsWithReverberation) {
  const Vec3 c = TestRoom(0.0).array_center;
  const std::vector<Vec3> positions = {Horizontal(30.0, 1.8, c, 0.3),
                                       Horizontal(140.0, 2.2, c, -0.5),
                                       Horizontal(250.0, 1.2, c, 0.8)};
  double prev = -1.0;
  for (double t60 : {0.0, 0.3, 0.6, 0.9}) {
    std::vector<double> errors;
    for (std::size_t k = 0; k < positions.size(); ++k) {
      const BuiltScene b = Build(StaticScene({positions[k]}, t60, 10 + k));
      const Trajectory t = PseudoIntensityTrack(Normalized(b), b.gt->sample_envelopes[0]);
      for (std::size_t n = 0; n < kN; ++n) {
        errors.push_back(AngularErrorDeg(t.dirs[n], b.gt->trajectories[0].dirs[n]));
      }
    }
    std::nth_element(errors.begin(), errors.begin() + errors.size() / 2, errors.end());
    const double median = errors[errors.size() / 2];
    EXPECT_GE(median, prev) << "T60 " << t60;
    prev = median;
  }
}

TEST(PseudoIntensityTest, SilenceThrows) {
  FoaSignal silent(4000, kDefaultSampleRate);
  SampleEnvelope env;
  env.values.assign(4000, 0.0);
  EXPECT_THROW(PseudoIntensityTrack(silent, env), Error);
}

TEST(SteeredExtractTest, SingleSourceAboveTenDb) {
  const Vec3 c = TestRoom(0.0).array_center;
  const BuiltScene b = Build(StaticScene({Horizontal(60.0, 1.5, c)}, 0.0, 3, "bursty"));
  const FoaSignal x = SteeredExtract(Normalized(b), TrueFit(b, 0)).signal;
  EXPECT_GE(SiSnrDb(x.Channel(kW), NormalizedImage(b, 0).Channel(kW)), 10.0);
}

TEST(SteeredExtractTest, OppositeSourcesGainSixDb) {
  const Vec3 c = TestRoom(0.0).array_center;
  const BuiltScene b = Build(StaticScene(
      {Horizontal(20.0, 1.5, c), Horizontal(200.0, 1.6, c)}, 0.0, 4, "bursty"));
  const FoaSignal mix = Normalized(b);
  for (int k = 0; k < 2; ++k) {
    const MonoSignal target = NormalizedImage(b, k).Channel(kW);
    const FoaSignal x = SteeredExtract(mix, TrueFit(b, k)).signal;
    const double gain = SiSnrDb(x.Channel(kW), target) - SiSnrDb(mix.Channel(kW), target);
    EXPECT_GE(gain, 6.0) << "source " << k;
  }
}

TEST(SteeredExtractTest, ZeroMagnitudeGivesSilence) {
  const Vec3 c = TestRoom(0.0).array_center;
  const BuiltScene b = Build(StaticScene({Horizontal(60.0, 1.5, c)}, 0.0, 5));
  FramedIntensityTrajectory fit = TrueFit(b, 0);
  for (Vec3& v : fit.vecs) v = Vec3{};
  const SteeredExtraction x = SteeredExtract(Normalized(b), fit);
  EXPECT_EQ(x.passthrough_frames.size(), fit.vecs.size());
  for (double v : x.signal.interleaved()) ASSERT_EQ(v, 0.0);
}

TEST(SteeredExtractTest, GridMismatchThrows) {
  const Vec3 c = TestRoom(0.0).array_center;
  const BuiltScene b = Build(StaticScene({Horizontal(60.0, 1.5, c)}, 0.0, 6));
  FramedIntensityTrajectory fit = TrueFit(b, 0);
  fit.vecs.pop_back();
  EXPECT_THROW(SteeredExtract(Normalized(b), fit), Error);
}

TEST(ComponentNamesTest, Parse) {
  const ComponentNames d = ParseComponentNames("");
  EXPECT_EQ(d.tracker, "pseudo-intensity");
  EXPECT_EQ(d.extractor, "steered");
  EXPECT_EQ(ParseComponentNames("classical").refiner, "steered");
  const ComponentNames o = ParseComponentNames("oracle");
  EXPECT_EQ(o.envelope, "oracle");
  EXPECT_EQ(o.tracker, "oracle");
  EXPECT_EQ(o.extractor, "oracle");
  EXPECT_EQ(o.refiner, "oracle");
  const ComponentNames m = ParseComponentNames("tracker=oracle,refiner=oracle");
  EXPECT_EQ(m.tracker, "oracle");
  EXPECT_EQ(m.extractor, "steered");
  EXPECT_EQ(m.refiner, "oracle");
}

TEST(ComponentNamesTest, UnknownNamesThrowNotFound) {
  ComponentNames n;
  n.extractor = "mystery";
  try {
    CheckComponentNames(n);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotFound);
    EXPECT_NE(std::string(e.what()).find("mystery"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("extractor"), std::string::npos);
  }
  EXPECT_THROW(ParseComponentNames("colour=blue"), Error);
}

}  // namespace
}  // namespace trajsep

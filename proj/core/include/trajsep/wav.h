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

#ifndef TRAJSEP_WAV_H_
#define TRAJSEP_WAV_H_

#include <filesystem>
#include <string>
#include <vector>

#include "trajsep/signal.h"

namespace trajsep {

// 32-bit IEEE-float RIFF/WAVE payload, frame-interleaved.
struct WaveFile {
  int channels = 1;
  double sample_rate = kDefaultSampleRate;
  std::vector<float> samples;

  std::size_t num_frames() const {
    return channels > 0 ? samples.size() / static_cast<std::size_t>(channels) : 0;
  }
  friend bool operator==(const WaveFile&, const WaveFile&) = default;
};

// Throws kInvalidArgument on non-finite samples and kIo on write failure.
void WriteWave(const std::filesystem::path& path, const WaveFile& wave);

// Accepts format tag 3 (IEEE float, 32-bit) and WAVE_FORMAT_EXTENSIBLE with a
// float subformat. Throws kUnsupported naming any other tag, kMalformed for a
// broken container and kNotFound / kIo for file errors.
WaveFile ReadWave(const std::filesystem::path& path);

// Serializes to / parses from an in-memory RIFF image.
std::vector<char> EncodeWave(const WaveFile& wave);
WaveFile DecodeWave(const std::vector<char>& bytes);

void WriteFoa(const std::filesystem::path& path, const FoaSignal& signal);
FoaSignal ReadFoa(const std::filesystem::path& path);

void WriteMono(const std::filesystem::path& path, std::span<const double> signal,
               double sample_rate = kDefaultSampleRate);
// Reads channel |channel| of any float WAVE file.
MonoSignal ReadMono(const std::filesystem::path& path, int channel = 0,
                    double* sample_rate = nullptr);

// Trajectories as text, one "x y z" row per sample.
void WriteVectorsText(const std::filesystem::path& path, std::span<const Vec3> rows);
std::vector<Vec3> ReadVectorsText(const std::filesystem::path& path);

// Envelopes as text: a "# win <w> hop <h>" header then one value per line.
void WriteEnvelopeText(const std::filesystem::path& path, const FrameEnvelope& env);
FrameEnvelope ReadEnvelopeText(const std::filesystem::path& path);

std::string ReadTextFile(const std::filesystem::path& path);
void WriteTextFile(const std::filesystem::path& path, const std::string& text);

}  // namespace trajsep

#endif  // TRAJSEP_WAV_H_

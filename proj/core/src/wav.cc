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

#include "trajsep/wav.h"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace trajsep {
namespace {

constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

void PutU16(std::vector<char>& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>(v >> 8));
}

void PutU32(std::vector<char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

// Shortest text that parses back to the same double.
void AppendDouble(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

void PutTag(std::vector<char>& out, const char* tag) { out.insert(out.end(), tag, tag + 4); }

class Reader {
 public:
  explicit Reader(const std::vector<char>& bytes) : bytes_(bytes) {}

  bool Has(std::size_t n) const { return pos_ + n <= bytes_.size(); }
  std::size_t pos() const { return pos_; }
  void Seek(std::size_t pos) { pos_ = pos; }

  std::uint16_t U16() {
    Need(2);
    const auto* p = reinterpret_cast<const unsigned char*>(&bytes_[pos_]);
    pos_ += 2;
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
  }
  std::uint32_t U32() {
    Need(4);
    const auto* p = reinterpret_cast<const unsigned char*>(&bytes_[pos_]);
    pos_ += 4;
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) |
           (static_cast<std::uint32_t>(p[3]) << 24);
  }
  std::string Tag() {
    Need(4);
    std::string t(&bytes_[pos_], 4);
    pos_ += 4;
    return t;
  }

 private:
  void Need(std::size_t n) const {
    if (!Has(n)) throw Error(ErrorCode::kMalformed, "truncated WAVE container");
  }
  const std::vector<char>& bytes_;
  std::size_t pos_ = 0;
};

std::vector<char> ReadBytes(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) {
    throw Error(ErrorCode::kNotFound, "no such file: " + path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return std::vector<char>(std::istreambuf_iterator<char>(in), {});
}

void WriteBytes(const std::filesystem::path& path, const char* data, std::size_t size) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  out.write(data, static_cast<std::streamsize>(size));
  out.close();
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

}  // namespace

std::vector<char> EncodeWave(const WaveFile& wave) {
  if (wave.channels < 1 || wave.channels > 0xFFFF) {
    throw Error(ErrorCode::kInvalidArgument, "channel count must be in [1, 65535]");
  }
  if (wave.samples.size() % static_cast<std::size_t>(wave.channels) != 0) {
    throw Error(ErrorCode::kShapeMismatch, "sample count is not a multiple of channels");
  }
  for (float v : wave.samples) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidArgument, "refusing to write a non-finite sample");
    }
  }
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(wave.samples.size() * 4);
  const std::uint32_t rate = static_cast<std::uint32_t>(std::lround(wave.sample_rate));
  const std::uint16_t block_align = static_cast<std::uint16_t>(wave.channels * 4);
  std::vector<char> out;
  out.reserve(44 + data_bytes);
  PutTag(out, "RIFF");
  PutU32(out, 36 + data_bytes);
  PutTag(out, "WAVE");
  PutTag(out, "fmt ");
  PutU32(out, 16);
  PutU16(out, kFormatFloat);
  PutU16(out, static_cast<std::uint16_t>(wave.channels));
  PutU32(out, rate);
  PutU32(out, rate * block_align);
  PutU16(out, block_align);
  PutU16(out, 32);
  PutTag(out, "data");
  PutU32(out, data_bytes);
  for (float v : wave.samples) PutU32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

WaveFile DecodeWave(const std::vector<char>& bytes) {
  Reader r(bytes);
  if (r.Tag() != "RIFF") throw Error(ErrorCode::kMalformed, "missing RIFF header");
  r.U32();
  if (r.Tag() != "WAVE") throw Error(ErrorCode::kMalformed, "missing WAVE form type");
  bool have_fmt = false;
  WaveFile wave;
  while (r.Has(8)) {
    const std::string tag = r.Tag();
    const std::uint32_t size = r.U32();
    const std::size_t body = r.pos();
    if (!r.Has(size)) throw Error(ErrorCode::kMalformed, "chunk '" + tag + "' overruns file");
    if (tag == "fmt ") {
      if (size < 16) throw Error(ErrorCode::kMalformed, "fmt chunk too short");
      std::uint16_t format = r.U16();
      const std::uint16_t channels = r.U16();
      const std::uint32_t rate = r.U32();
      r.U32();
      r.U16();
      const std::uint16_t bits = r.U16();
      if (format == kFormatExtensible && size >= 40) {
        r.U16();  // cbSize
        r.U16();  // valid bits
        r.U32();  // channel mask
        format = r.U16();  // first two bytes of the subformat GUID
      }
      if (format != kFormatFloat) {
        throw Error(ErrorCode::kUnsupported,
                    "unsupported WAVE format tag " + std::to_string(format) +
                        (format == 1 ? " (PCM)" : "") + "; expected 3 (IEEE float)");
      }
      if (bits != 32) {
        throw Error(ErrorCode::kUnsupported,
                    "unsupported float width " + std::to_string(bits) + " bits");
      }
      if (channels == 0) throw Error(ErrorCode::kMalformed, "zero channels");
      wave.channels = channels;
      wave.sample_rate = rate;
      have_fmt = true;
    } else if (tag == "data") {
      if (!have_fmt) throw Error(ErrorCode::kMalformed, "data chunk before fmt chunk");
      if (size % (4u * static_cast<std::uint32_t>(wave.channels)) != 0) {
        throw Error(ErrorCode::kMalformed, "data chunk is not whole frames");
      }
      wave.samples.resize(size / 4);
      for (float& v : wave.samples) v = std::bit_cast<float>(r.U32());
      return wave;
    }
    r.Seek(body + size + (size & 1));
  }
  throw Error(ErrorCode::kMalformed, have_fmt ? "missing data chunk" : "missing fmt chunk");
}

void WriteWave(const std::filesystem::path& path, const WaveFile& wave) {
  const std::vector<char> bytes = EncodeWave(wave);
  WriteBytes(path, bytes.data(), bytes.size());
}

WaveFile ReadWave(const std::filesystem::path& path) {
  try {
    return DecodeWave(ReadBytes(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kNotFound) throw;
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void WriteFoa(const std::filesystem::path& path, const FoaSignal& signal) {
  WaveFile wave;
  wave.channels = FoaSignal::kNumChannels;
  wave.sample_rate = signal.sample_rate();
  wave.samples.assign(signal.interleaved().begin(), signal.interleaved().end());
  WriteWave(path, wave);
}

FoaSignal ReadFoa(const std::filesystem::path& path) {
  const WaveFile wave = ReadWave(path);
  if (wave.channels != FoaSignal::kNumChannels) {
    throw Error(ErrorCode::kShapeMismatch, path.string() + ": expected 4 channels, found " +
                                               std::to_string(wave.channels));
  }
  FoaSignal out(wave.num_frames(), wave.sample_rate);
  auto dst = out.interleaved();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = wave.samples[i];
  return out;
}

void WriteMono(const std::filesystem::path& path, std::span<const double> signal,
               double sample_rate) {
  WaveFile wave;
  wave.channels = 1;
  wave.sample_rate = sample_rate;
  wave.samples.assign(signal.begin(), signal.end());
  WriteWave(path, wave);
}

MonoSignal ReadMono(const std::filesystem::path& path, int channel, double* sample_rate) {
  const WaveFile wave = ReadWave(path);
  if (channel < 0 || channel >= wave.channels) {
    throw Error(ErrorCode::kInvalidArgument, path.string() + ": no channel " +
                                                 std::to_string(channel));
  }
  if (sample_rate) *sample_rate = wave.sample_rate;
  MonoSignal out(wave.num_frames());
  for (std::size_t n = 0; n < out.size(); ++n) {
    out[n] = wave.samples[n * static_cast<std::size_t>(wave.channels) +
                          static_cast<std::size_t>(channel)];
  }
  return out;
}

void WriteVectorsText(const std::filesystem::path& path, std::span<const Vec3> rows) {
  std::string out;
  out.reserve(rows.size() * 40);
  for (const Vec3& v : rows) {
    AppendDouble(out, v.x);
    out += ' ';
    AppendDouble(out, v.y);
    out += ' ';
    AppendDouble(out, v.z);
    out += '\n';
  }
  WriteTextFile(path, out);
}

std::vector<Vec3> ReadVectorsText(const std::filesystem::path& path) {
  std::istringstream in(ReadTextFile(path));
  std::vector<Vec3> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    Vec3 v;
    if (!(ls >> v.x >> v.y >> v.z)) {
      throw Error(ErrorCode::kMalformed,
                  path.string() + ":" + std::to_string(lineno) + ": expected 'x y z'");
    }
    rows.push_back(v);
  }
  return rows;
}

void WriteEnvelopeText(const std::filesystem::path& path, const FrameEnvelope& env) {
  std::string out = "# win " + std::to_string(env.grid.win) + " hop " +
                    std::to_string(env.grid.hop) + "\n";
  for (double v : env.values) {
    AppendDouble(out, v);
    out += '\n';
  }
  WriteTextFile(path, out);
}

FrameEnvelope ReadEnvelopeText(const std::filesystem::path& path) {
  std::istringstream in(ReadTextFile(path));
  FrameEnvelope env;
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kMalformed, path.string() + ": empty");
  std::istringstream header(line);
  std::string hash, win, hop;
  if (!(header >> hash >> win >> env.grid.win >> hop >> env.grid.hop) || hash != "#") {
    throw Error(ErrorCode::kMalformed, path.string() + ": bad envelope header");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    env.values.push_back(std::stod(line));
  }
  return env;
}

std::string ReadTextFile(const std::filesystem::path& path) {
  const std::vector<char> bytes = ReadBytes(path);
  return std::string(bytes.begin(), bytes.end());
}

void WriteTextFile(const std::filesystem::path& path, const std::string& text) {
  WriteBytes(path, text.data(), text.size());
}

}  // namespace trajsep

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

#include "trajsep/report.h"

#include <cstdio>
#include <set>
#include <sstream>

#include "json_util.h"
#include "trajsep/wav.h"

namespace trajsep {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

void RejectUnknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorCode::kMalformed, where + " must be an object");
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) {
      throw Error(ErrorCode::kMalformed, "unknown key '" + item.key() + "' in " + where);
    }
  }
}

json NamesToJson(const ComponentNames& n) {
  return {{"envelope", n.envelope},
          {"tracker", n.tracker},
          {"extractor", n.extractor},
          {"refiner", n.refiner}};
}

ComponentNames NamesFromJson(const json& j) {
  using json_util::Optional;
  RejectUnknown(j, {"envelope", "tracker", "extractor", "refiner"}, "components");
  ComponentNames n;
  n.envelope = Optional<std::string>(j, "envelope", n.envelope);
  n.tracker = Optional<std::string>(j, "tracker", n.tracker);
  n.extractor = Optional<std::string>(j, "extractor", n.extractor);
  n.refiner = Optional<std::string>(j, "refiner", n.refiner);
  return n;
}

json ProvenanceToJson(const Provenance& p) {
  return {{"config_hash", p.config_hash},
          {"seed", p.seed},
          {"components", NamesToJson(p.components)},
          {"version", p.version},
          {"command", p.command}};
}

std::string Fixed(double v, int width = 9, int precision = 2) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%*.*f", width, precision, v);
  return buf;
}

std::string Pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

double Mean(double sum, int n) { return n > 0 ? sum / n : 0.0; }

}  // namespace

std::string RunSettingsToJsonText(const RunSettings& s) {
  json j;
  j["rounds"] = s.pipeline.rounds;
  j["c_max"] = s.pipeline.c_max;
  j["count_threshold"] = s.pipeline.count_threshold;
  j["win"] = s.pipeline.grid.win;
  j["hop"] = s.pipeline.grid.hop;
  j["refresh_envelope"] = s.pipeline.refresh_envelope;
  j["parallelism"] = s.pipeline.parallelism;
  j["components"] = NamesToJson(s.components);
  j["oracle"] = {{"envelope_sigma", s.oracle.envelope_sigma},
                 {"jitter_deg", s.oracle.jitter_deg},
                 {"separated_jitter_factor", s.oracle.separated_jitter_factor},
                 {"leakage", s.oracle.leakage},
                 {"seed", s.oracle.seed}};
  j["tracking"] = {{"smoothing", s.tracking.smoothing},
                   {"confidence_floor", s.tracking.confidence_floor},
                   {"selectivity", s.tracking.selectivity}};
  j["sdr_filter_len"] = s.eval.sdr_filter_len;
  return j.dump(2) + "\n";
}

RunSettings RunSettingsFromJsonText(std::string_view text) {
  using json_util::Optional;
  const json j = json_util::Parse(text);
  RejectUnknown(j,
                {"rounds", "c_max", "count_threshold", "win", "hop", "refresh_envelope",
                 "parallelism", "components", "oracle", "tracking", "sdr_filter_len"},
                "run config");
  RunSettings s;
  PipelineConfig& p = s.pipeline;
  p.rounds = Optional<int>(j, "rounds", p.rounds);
  p.c_max = Optional<int>(j, "c_max", p.c_max);
  p.count_threshold = Optional<double>(j, "count_threshold", p.count_threshold);
  p.grid.win = Optional<std::size_t>(j, "win", p.grid.win);
  p.grid.hop = Optional<std::size_t>(j, "hop", p.grid.hop);
  p.refresh_envelope = Optional<bool>(j, "refresh_envelope", p.refresh_envelope);
  p.parallelism = Optional<int>(j, "parallelism", p.parallelism);
  if (j.contains("components")) s.components = NamesFromJson(j.at("components"));
  if (j.contains("oracle")) {
    const json& o = j.at("oracle");
    RejectUnknown(o, {"envelope_sigma", "jitter_deg", "separated_jitter_factor", "leakage", "seed"},
                  "oracle");
    s.oracle.envelope_sigma = Optional<double>(o, "envelope_sigma", s.oracle.envelope_sigma);
    s.oracle.jitter_deg = Optional<double>(o, "jitter_deg", s.oracle.jitter_deg);
    s.oracle.separated_jitter_factor =
        Optional<double>(o, "separated_jitter_factor", s.oracle.separated_jitter_factor);
    s.oracle.leakage = Optional<double>(o, "leakage", s.oracle.leakage);
    s.oracle.seed = Optional<std::uint64_t>(o, "seed", s.oracle.seed);
  }
  if (j.contains("tracking")) {
    const json& t = j.at("tracking");
    RejectUnknown(t, {"smoothing", "confidence_floor", "selectivity"}, "tracking");
    s.tracking.smoothing = Optional<std::size_t>(t, "smoothing", s.tracking.smoothing);
    s.tracking.confidence_floor =
        Optional<double>(t, "confidence_floor", s.tracking.confidence_floor);
    s.tracking.selectivity = Optional<double>(t, "selectivity", s.tracking.selectivity);
  }
  s.tracking.grid = p.grid;
  s.eval.sdr_filter_len = Optional<std::size_t>(j, "sdr_filter_len", s.eval.sdr_filter_len);
  ValidatePipelineConfig(p);
  return s;
}

void WritePipelineResult(const fs::path& dir, const PipelineResult& r, const Provenance& prov) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["provenance"] = ProvenanceToJson(prov);
  j["estimated_count"] = r.estimated_count;
  j["active"] = r.active;
  j["normalization"] = r.normalization;
  j["rounds"] = r.rounds;
  j["components"] = NamesToJson(r.components);
  j["timings"] = json::array();
  for (const StageTiming& t : r.timings) {
    j["timings"].push_back({{"stage", t.stage}, {"seconds", t.seconds}});
  }
  j["sources"] = json::array();
  for (std::size_t s = 0; s < r.sources.size(); ++s) {
    const SourceResult& src = r.sources[s];
    const std::string k = std::to_string(s);
    json js;
    js["channel"] = src.channel;
    js["estimate"] = "est" + k + ".wav";
    js["separated"] = "sep" + k + ".wav";
    WriteMono(dir / ("est" + k + ".wav"), src.estimate, src.separated.sample_rate());
    WriteFoa(dir / ("sep" + k + ".wav"), src.separated);
    js["trajectory_history"] = json::array();
    for (std::size_t round = 0; round < src.trajectory_history.size(); ++round) {
      const std::string name = "traj" + k + "_round" + std::to_string(round) + ".txt";
      WriteVectorsText(dir / name, src.trajectory_history[round].dirs);
      js["trajectory_history"].push_back(name);
    }
    j["sources"].push_back(std::move(js));
  }
  WriteTextFile(dir / "result.json", j.dump(2) + "\n");
}

PipelineResult ReadPipelineResult(const fs::path& dir) {
  using json_util::Require;
  const json j = json_util::Parse(ReadTextFile(dir / "result.json"));
  PipelineResult r;
  r.estimated_count = Require<int>(j, "estimated_count");
  r.active = Require<std::vector<bool>>(j, "active");
  r.normalization = Require<double>(j, "normalization");
  r.rounds = Require<int>(j, "rounds");
  r.components = NamesFromJson(j.at("components"));
  for (const json& t : j.at("timings")) {
    r.timings.push_back({Require<std::string>(t, "stage"), Require<double>(t, "seconds")});
  }
  for (const json& js : j.at("sources")) {
    SourceResult src;
    src.channel = Require<int>(js, "channel");
    src.estimate = ReadMono(dir / Require<std::string>(js, "estimate"));
    src.separated = ReadFoa(dir / Require<std::string>(js, "separated"));
    for (const auto& name : Require<std::vector<std::string>>(js, "trajectory_history")) {
      Trajectory t;
      t.dirs = ReadVectorsText(dir / name);
      src.trajectory_history.push_back(std::move(t));
    }
    if (src.trajectory_history.empty()) {
      throw Error(ErrorCode::kMalformed, "source without a trajectory history");
    }
    src.trajectory = src.trajectory_history.back();
    r.sources.push_back(std::move(src));
  }
  return r;
}

std::string EvalReportToJsonText(const EvalReport& report, const Provenance& prov) {
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["provenance"] = ProvenanceToJson(prov);
  j["true_count"] = report.true_count;
  j["estimated_count"] = report.estimated_count;
  j["count_correct"] = report.true_count == report.estimated_count;
  j["db_cap"] = report.db_cap;
  j["sdr_filter_len"] = report.sdr_filter_len;
  j["permutation"] = report.permutation;
  j["per_source"] = json::array();
  for (const SourceMetrics& m : report.per_source) {
    j["per_source"].push_back({{"estimate", m.estimate},
                               {"target", m.target},
                               {"snr_db", m.snr_db},
                               {"si_snr_db", m.si_snr_db},
                               {"sdr_db", m.sdr_db},
                               {"ewrmsae_deg", m.ewrmsae_deg},
                               {"ewrmsae_history_deg", m.ewrmsae_history_deg},
                               {"mixture_snr_db", m.mixture_snr_db},
                               {"mixture_si_snr_db", m.mixture_si_snr_db},
                               {"si_snr_improvement_db", m.si_snr_db - m.mixture_si_snr_db}});
  }
  return j.dump(2) + "\n";
}

std::string EvalReportTable(const EvalReport& report) {
  std::ostringstream out;
  out << "sources: true " << report.true_count << ", estimated " << report.estimated_count
      << "\n";
  out << " est trg   SNR(dB) SI-SNR(dB)   SDR(dB)  dSI-SNR  EWRMSAE(deg)  history\n";
  for (const SourceMetrics& m : report.per_source) {
    char head[32];
    std::snprintf(head, sizeof(head), "%4d%4d", m.estimate, m.target);
    out << head << Fixed(m.snr_db, 10) << Fixed(m.si_snr_db, 11) << Fixed(m.sdr_db, 10)
        << Fixed(m.si_snr_db - m.mixture_si_snr_db, 9) << Fixed(m.ewrmsae_deg, 14) << "  ";
    for (std::size_t i = 0; i < m.ewrmsae_history_deg.size(); ++i) {
      out << (i ? " -> " : "") << Fixed(m.ewrmsae_history_deg[i], 0, 2);
    }
    out << "\n";
  }
  return out.str();
}

const std::vector<T60Bucket>& T60Buckets() {
  static const std::vector<T60Bucket> buckets = {{0.2, 0.4, "0.2-0.4"},
                                                 {0.4, 0.6, "0.4-0.6"},
                                                 {0.6, 0.8, "0.6-0.8"},
                                                 {0.8, 1.0, "0.8-1.0"}};
  return buckets;
}

std::optional<std::size_t> T60BucketIndex(double t60) {
  const auto& b = T60Buckets();
  for (std::size_t i = 0; i < b.size(); ++i) {
    const bool last = i + 1 == b.size();
    if (t60 >= b[i].lo && (t60 < b[i].hi || (last && t60 <= b[i].hi))) return i;
  }
  return std::nullopt;
}

std::vector<AggregateRow> AggregateByT60(const std::vector<ScoredScene>& scenes) {
  const auto& buckets = T60Buckets();
  struct Acc {
    AggregateRow row;
    int correct = 0;
  };
  std::vector<Acc> acc(buckets.size() + 2);
  for (std::size_t i = 0; i < buckets.size(); ++i) acc[i].row.label = buckets[i].label;
  const std::size_t other = buckets.size();
  const std::size_t all = buckets.size() + 1;
  acc[other].row.label = "other";
  acc[all].row.label = "all";
  for (const ScoredScene& s : scenes) {
    const std::size_t b = T60BucketIndex(s.t60).value_or(other);
    for (Acc* a : {&acc[b], &acc[all]}) {
      a->row.scenes += 1;
      a->correct += s.report.true_count == s.report.estimated_count;
      for (const SourceMetrics& m : s.report.per_source) {
        a->row.pairs += 1;
        a->row.snr_db += m.snr_db;
        a->row.si_snr_db += m.si_snr_db;
        a->row.sdr_db += m.sdr_db;
        a->row.si_snr_improvement_db += m.si_snr_db - m.mixture_si_snr_db;
        a->row.ewrmsae_deg += m.ewrmsae_deg;
      }
    }
  }
  std::vector<AggregateRow> rows;
  for (std::size_t i = 0; i < acc.size(); ++i) {
    if (i == other && acc[i].row.scenes == 0) continue;
    AggregateRow r = acc[i].row;
    r.snr_db = Mean(r.snr_db, r.pairs);
    r.si_snr_db = Mean(r.si_snr_db, r.pairs);
    r.sdr_db = Mean(r.sdr_db, r.pairs);
    r.si_snr_improvement_db = Mean(r.si_snr_improvement_db, r.pairs);
    r.ewrmsae_deg = Mean(r.ewrmsae_deg, r.pairs);
    r.count_accuracy = Mean(acc[i].correct, r.scenes);
    rows.push_back(r);
  }
  return rows;
}

std::string AggregateTable(const std::vector<AggregateRow>& rows) {
  std::ostringstream out;
  out << "T60(s)   scenes pairs   SNR(dB) SI-SNR(dB)   SDR(dB)  dSI-SNR  EWRMSAE(deg)  count\n";
  for (const AggregateRow& r : rows) {
    char counts[32];
    std::snprintf(counts, sizeof(counts), "%7d%6d", r.scenes, r.pairs);
    out << Pad(r.label, 8) << counts << Fixed(r.snr_db, 10) << Fixed(r.si_snr_db, 11)
        << Fixed(r.sdr_db, 10) << Fixed(r.si_snr_improvement_db, 9) << Fixed(r.ewrmsae_deg, 14)
        << Fixed(r.count_accuracy, 7) << "\n";
  }
  return out.str();
}

std::string AggregateToJsonText(const std::vector<AggregateRow>& rows,
                                const std::vector<ScoredScene>& scenes, const Provenance& prov) {
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["provenance"] = ProvenanceToJson(prov);
  j["buckets"] = json::array();
  for (const AggregateRow& r : rows) {
    j["buckets"].push_back({{"label", r.label},
                            {"scenes", r.scenes},
                            {"pairs", r.pairs},
                            {"snr_db", r.snr_db},
                            {"si_snr_db", r.si_snr_db},
                            {"sdr_db", r.sdr_db},
                            {"si_snr_improvement_db", r.si_snr_improvement_db},
                            {"ewrmsae_deg", r.ewrmsae_deg},
                            {"count_accuracy", r.count_accuracy}});
  }
  j["scenes"] = json::array();
  for (const ScoredScene& s : scenes) {
    j["scenes"].push_back({{"id", s.id}, {"t60", s.t60},
                           {"true_count", s.report.true_count},
                           {"estimated_count", s.report.estimated_count}});
  }
  return j.dump(2) + "\n";
}

}  // namespace trajsep

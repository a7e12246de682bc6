// adi/corpus.cc

// Copyright 2026  ADI Toolkit Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "adi/corpus.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace adi {

namespace {

const char* const kDialectNames[kNumDialects] = {"EGY", "GLF", "LAV", "MSA",
                                                 "NOR"};

[[noreturn]] void LoadError(const std::string& path, size_t line_no,
                            const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + what);
}

}  // namespace

const char* DialectName(Dialect d) { return kDialectNames[static_cast<int>(d)]; }

Dialect ParseDialect(const std::string& s) {
  for (int i = 0; i < kNumDialects; ++i) {
    if (s == kDialectNames[i]) return static_cast<Dialect>(i);
  }
  if (s == "LEV") return Dialect::kLav;  // accepted input alias
  throw std::runtime_error("unknown dialect symbol: " + s);
}

const char* SplitTagName(SplitTag t) {
  switch (t) {
    case SplitTag::kTrain: return "train";
    case SplitTag::kDev: return "dev";
    case SplitTag::kTest: return "test";
  }
  return "?";
}

void EmbeddingSet::Append(EmbeddingRecord rec) {
  if (dim_ < 0) {
    dim_ = static_cast<int>(rec.vector.size());
  } else if (static_cast<int>(rec.vector.size()) != dim_) {
    throw std::runtime_error("embedding dimension mismatch for utt '" +
                             rec.utt_id + "': got " +
                             std::to_string(rec.vector.size()) + ", expected " +
                             std::to_string(dim_));
  }
  if (rec.duration_s < 0.0) {
    throw std::runtime_error("negative duration for utt '" + rec.utt_id + "'");
  }
  for (double v : rec.vector) {
    if (!std::isfinite(v)) {
      throw std::runtime_error("non-finite component in utt '" + rec.utt_id +
                               "'");
    }
  }
  if (!index_.emplace(rec.utt_id, records_.size()).second) {
    throw std::runtime_error("duplicate utt_id: " + rec.utt_id);
  }
  records_.push_back(std::move(rec));
}

const EmbeddingRecord* EmbeddingSet::Find(const std::string& utt_id) const {
  auto it = index_.find(utt_id);
  return it == index_.end() ? nullptr : &records_[it->second];
}

void TranscriptSet::Append(TranscriptRecord rec) {
  for (const auto& t : rec.tokens) {
    if (t.empty()) {
      throw std::runtime_error("empty token in utt '" + rec.utt_id + "'");
    }
  }
  if (!index_.emplace(rec.utt_id, records_.size()).second) {
    throw std::runtime_error("duplicate utt_id: " + rec.utt_id);
  }
  records_.push_back(std::move(rec));
}

const TranscriptRecord* TranscriptSet::Find(const std::string& utt_id) const {
  auto it = index_.find(utt_id);
  return it == index_.end() ? nullptr : &records_[it->second];
}

void LabeledDataset::Validate() const {
  for (const auto& [utt, label] : labels) {
    (void)label;
    bool in_emb = embeddings && embeddings->Find(utt) != nullptr;
    bool in_trn = transcripts && transcripts->Find(utt) != nullptr;
    if (!in_emb && !in_trn) {
      throw std::runtime_error("labeled utt '" + utt +
                               "' has neither embedding nor transcript");
    }
  }
}

int64_t ManifestStats::TotalUtterances() const {
  return std::accumulate(utterances.begin(), utterances.end(), int64_t{0});
}
double ManifestStats::TotalDurationH() const {
  return std::accumulate(duration_h.begin(), duration_h.end(), 0.0);
}
double ManifestStats::TotalWordsK() const {
  return std::accumulate(words_k.begin(), words_k.end(), 0.0);
}

EmbeddingSet LoadEmbeddings(const std::string& path) {
  EmbeddingSet set;
  auto lines = ReadLines(path);
  for (size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto fields = SplitWhitespace(lines[i]);
    if (fields.size() < 3) LoadError(path, i + 1, "too few fields");
    EmbeddingRecord rec;
    rec.utt_id = fields[0];
    int64_t dim = 0;
    if (!ParseInt(fields[1], &dim) || dim < 0) {
      LoadError(path, i + 1, "bad dimension field '" + fields[1] + "'");
    }
    if (static_cast<int64_t>(fields.size()) != dim + 3) {
      LoadError(path, i + 1,
                "expected " + std::to_string(dim) + " values plus dur=");
    }
    rec.vector.resize(dim);
    for (int64_t d = 0; d < dim; ++d) {
      if (!ParseDouble(fields[2 + d], &rec.vector[d])) {
        LoadError(path, i + 1, "non-numeric field '" + fields[2 + d] + "'");
      }
    }
    const std::string& last = fields.back();
    if (last.rfind("dur=", 0) != 0 ||
        !ParseDouble(std::string_view(last).substr(4), &rec.duration_s)) {
      LoadError(path, i + 1, "missing or bad dur= field");
    }
    if (set.dim() >= 0 && static_cast<int>(dim) != set.dim()) {
      LoadError(path, i + 1,
                "dimension mismatch: got " + std::to_string(dim) +
                    ", expected " + std::to_string(set.dim()));
    }
    try {
      set.Append(std::move(rec));
    } catch (const std::exception& e) {
      LoadError(path, i + 1, e.what());
    }
  }
  return set;
}

void SaveEmbeddings(const EmbeddingSet& set, const std::string& path) {
  std::ostringstream out;
  for (const auto& rec : set.records()) {
    out << rec.utt_id << ' ' << rec.vector.size();
    for (double v : rec.vector) out << ' ' << FormatDouble(v);
    out << " dur=" << FormatDouble(rec.duration_s) << '\n';
  }
  WriteFileString(path, out.str());
}

LabelMap LoadLabels(const std::string& path) {
  LabelMap labels;
  auto lines = ReadLines(path);
  for (size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto fields = SplitChar(lines[i], '\t');
    if (fields.size() != 2 || fields[0].empty()) {
      LoadError(path, i + 1, "expected utt_id<TAB>DIALECT");
    }
    Dialect d;
    try {
      d = ParseDialect(fields[1]);
    } catch (const std::exception& e) {
      LoadError(path, i + 1, e.what());
    }
    if (!labels.emplace(fields[0], d).second) {
      LoadError(path, i + 1, "duplicate utt_id: " + fields[0]);
    }
  }
  return labels;
}

void SaveLabels(const LabelMap& labels, const std::string& path) {
  std::ostringstream out;
  for (const auto& [utt, d] : labels) out << utt << '\t' << DialectName(d) << '\n';
  WriteFileString(path, out.str());
}

TranscriptSet LoadTranscripts(const std::string& path) {
  TranscriptSet set;
  auto lines = ReadLines(path);
  for (size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    TranscriptRecord rec;
    auto tab = lines[i].find('\t');
    rec.utt_id = lines[i].substr(0, tab);
    if (rec.utt_id.empty()) LoadError(path, i + 1, "empty utt_id");
    if (tab != std::string::npos) {
      rec.tokens = SplitWhitespace(std::string_view(lines[i]).substr(tab + 1));
    }
    try {
      set.Append(std::move(rec));
    } catch (const std::exception& e) {
      LoadError(path, i + 1, e.what());
    }
  }
  return set;
}

void SaveTranscripts(const TranscriptSet& set, const std::string& path) {
  std::ostringstream out;
  for (const auto& rec : set.records()) {
    out << rec.utt_id << '\t';
    for (size_t i = 0; i < rec.tokens.size(); ++i) {
      if (i) out << ' ';
      out << rec.tokens[i];
    }
    out << '\n';
  }
  WriteFileString(path, out.str());
}

namespace {

// Subset of a dataset restricted to the given utterance ids.
LabeledDataset Restrict(const LabeledDataset& ds,
                        const std::vector<std::string>& utts) {
  LabeledDataset out;
  out.split_tag = ds.split_tag;
  if (ds.embeddings) out.embeddings.emplace();
  if (ds.transcripts) out.transcripts.emplace();
  std::vector<std::string> sorted(utts);
  std::sort(sorted.begin(), sorted.end());
  for (const auto& utt : sorted) {
    out.labels.emplace(utt, ds.labels.at(utt));
    if (ds.embeddings) {
      if (const auto* rec = ds.embeddings->Find(utt)) out.embeddings->Append(*rec);
    }
    if (ds.transcripts) {
      if (const auto* rec = ds.transcripts->Find(utt)) out.transcripts->Append(*rec);
    }
  }
  return out;
}

}  // namespace

std::vector<LabeledDataset> SplitDataset(const LabeledDataset& ds,
                                         const std::vector<double>& fractions,
                                         uint64_t seed) {
  if (fractions.empty()) throw std::invalid_argument("no fractions given");
  double sum = 0.0;
  for (double f : fractions) {
    if (f <= 0.0) throw std::invalid_argument("fractions must be positive");
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("fractions must sum to 1");
  }
  const size_t parts = fractions.size();

  // Group utterances by class, in sorted id order for determinism.
  std::vector<std::vector<std::string>> by_class(kNumDialects);
  for (const auto& [utt, d] : ds.labels) {
    by_class[static_cast<int>(d)].push_back(utt);
  }
  if (parts > 1) {
    for (int c = 0; c < kNumDialects; ++c) {
      if (by_class[c].empty()) {
        throw std::runtime_error(std::string("class ") +
                                 kDialectNames[c] +
                                 " is empty but a nonzero fraction was given");
      }
    }
  }

  std::vector<std::vector<std::string>> part_utts(parts);
  for (int c = 0; c < kNumDialects; ++c) {
    auto& utts = by_class[c];
    if (utts.empty()) continue;
    Rng rng(DeriveSeed(seed, static_cast<uint64_t>(c)));
    rng.Shuffle(&utts);

    // Largest-remainder apportionment of n_c over the parts.
    const size_t n = utts.size();
    std::vector<size_t> take(parts);
    std::vector<std::pair<double, size_t>> rem(parts);
    size_t assigned = 0;
    for (size_t p = 0; p < parts; ++p) {
      double exact = fractions[p] * static_cast<double>(n);
      take[p] = static_cast<size_t>(std::floor(exact));
      rem[p] = {exact - std::floor(exact), p};
      assigned += take[p];
    }
    std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) {
      return a.first > b.first;
    });
    for (size_t k = 0; assigned < n; ++k, ++assigned) take[rem[k % parts].second]++;

    size_t pos = 0;
    for (size_t p = 0; p < parts; ++p) {
      for (size_t k = 0; k < take[p]; ++k) part_utts[p].push_back(utts[pos++]);
    }
  }

  std::vector<LabeledDataset> out;
  out.reserve(parts);
  for (size_t p = 0; p < parts; ++p) out.push_back(Restrict(ds, part_utts[p]));
  return out;
}

LabeledDataset MergeDatasets(const LabeledDataset& a, const LabeledDataset& b) {
  LabeledDataset out = a;
  for (const auto& [utt, d] : b.labels) {
    if (!out.labels.emplace(utt, d).second) {
      throw std::runtime_error("duplicate utt_id in merge: " + utt);
    }
  }
  if (b.embeddings) {
    if (!out.embeddings) out.embeddings.emplace();
    for (const auto& rec : b.embeddings->records()) out.embeddings->Append(rec);
  }
  if (b.transcripts) {
    if (!out.transcripts) out.transcripts.emplace();
    for (const auto& rec : b.transcripts->records()) out.transcripts->Append(rec);
  }
  return out;
}

ManifestStats ComputeManifestStats(const LabeledDataset& ds) {
  ManifestStats stats;
  for (const auto& [utt, d] : ds.labels) {
    int c = static_cast<int>(d);
    stats.utterances[c]++;
    if (ds.embeddings) {
      if (const auto* rec = ds.embeddings->Find(utt)) {
        stats.duration_h[c] += rec->duration_s / 3600.0;
      }
    }
    if (ds.transcripts) {
      if (const auto* rec = ds.transcripts->Find(utt)) {
        stats.words_k[c] += static_cast<double>(rec->tokens.size()) / 1000.0;
      }
    }
  }
  return stats;
}

Manifest LoadManifest(const std::string& path) {
  Manifest man;
  std::map<std::string, ManifestStats> totals;
  auto lines = ReadLines(path);
  for (size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty() || lines[i][0] == '#') continue;
    auto f = SplitChar(lines[i], '\t');
    if (f.size() != 5) {
      LoadError(path, i + 1, "expected split<TAB>dialect<TAB>U<TAB>D<TAB>W");
    }
    int64_t utts = 0;
    double dur = 0.0, words = 0.0;
    if (!ParseInt(f[2], &utts) || !ParseDouble(f[3], &dur) ||
        !ParseDouble(f[4], &words)) {
      LoadError(path, i + 1, "non-numeric count field");
    }
    if (f[1] == "TOTAL") {
      auto& t = totals[f[0]];
      t.utterances[0] = utts;
      t.duration_h[0] = dur;
      t.words_k[0] = words;
      continue;
    }
    Dialect d;
    try {
      d = ParseDialect(f[1]);
    } catch (const std::exception& e) {
      LoadError(path, i + 1, e.what());
    }
    auto& s = man.per_split[f[0]];
    int c = static_cast<int>(d);
    s.utterances[c] = utts;
    s.duration_h[c] = dur;
    s.words_k[c] = words;
  }
  // TOTAL rows must agree with per-class sums.
  for (const auto& [split, t] : totals) {
    auto it = man.per_split.find(split);
    if (it == man.per_split.end()) {
      throw std::runtime_error(path + ": TOTAL row for unknown split " + split);
    }
    const auto& s = it->second;
    if (s.TotalUtterances() != t.utterances[0]) {
      throw std::runtime_error(
          path + ": " + split + " utterance total " +
          std::to_string(t.utterances[0]) + " != per-class sum " +
          std::to_string(s.TotalUtterances()));
    }
    if (std::abs(s.TotalDurationH() - t.duration_h[0]) > 0.05 ||
        std::abs(s.TotalWordsK() - t.words_k[0]) > 0.05) {
      throw std::runtime_error(path + ": " + split +
                               " duration/word totals disagree with rows");
    }
  }
  return man;
}

std::vector<std::string> ValidateAgainstManifest(const ManifestStats& got,
                                                 const ManifestStats& expected) {
  std::vector<std::string> problems;
  for (int c = 0; c < kNumDialects; ++c) {
    if (got.utterances[c] != expected.utterances[c]) {
      problems.push_back(std::string(kDialectNames[c]) + ": got " +
                         std::to_string(got.utterances[c]) + " utterances, expected " +
                         std::to_string(expected.utterances[c]));
    }
  }
  return problems;
}

LabeledDataset SynthGenerate(const SyntheticSpec& spec, uint64_t seed) {
  if (spec.dim <= 0) throw std::invalid_argument("synth: dim must be positive");
  if (static_cast<int>(spec.counts.size()) != kNumDialects) {
    throw std::invalid_argument("synth: counts must list all classes");
  }
  for (int n : spec.counts) {
    if (n <= 0) throw std::invalid_argument("synth: counts must be positive");
  }
  if (!spec.means.empty() &&
      static_cast<int>(spec.means.size()) != kNumDialects) {
    throw std::invalid_argument("synth: means must list all classes");
  }
  if (spec.means.empty() && spec.dim < kNumDialects) {
    throw std::invalid_argument("synth: dim must be >= class count for "
                                "auto-placed means");
  }
  if (spec.vocab_size < kNumDialects || spec.tokens_per_utt < 0) {
    throw std::invalid_argument("synth: bad transcript parameters");
  }

  std::vector<std::vector<double>> means = spec.means;
  if (means.empty()) {
    // Pairwise distance between any two class means is exactly `separation`.
    means.assign(kNumDialects, std::vector<double>(spec.dim, 0.0));
    double s = spec.separation / std::sqrt(2.0);
    for (int c = 0; c < kNumDialects; ++c) means[c][c] = s;
  }
  std::vector<double> stddev = spec.stddev;
  if (stddev.empty()) stddev.assign(kNumDialects, 1.0);

  LabeledDataset ds;
  ds.embeddings.emplace();
  if (spec.emit_transcripts) ds.transcripts.emplace();

  // Per-class token weights: class c boosts its own slice of the inventory.
  const int slice = spec.vocab_size / kNumDialects;

  for (int c = 0; c < kNumDialects; ++c) {
    Rng rng(DeriveSeed(seed, 1000 + static_cast<uint64_t>(c)));
    std::vector<double> cum;
    if (spec.emit_transcripts) {
      std::vector<double> w(spec.vocab_size, 1.0);
      for (int t = c * slice; t < (c + 1) * slice; ++t) w[t] = spec.token_boost;
      cum.resize(w.size());
      double acc = 0.0;
      for (size_t t = 0; t < w.size(); ++t) {
        acc += w[t];
        cum[t] = acc;
      }
      for (auto& v : cum) v /= acc;
    }

    for (int i = 0; i < spec.counts[c]; ++i) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "-%06d", i);
      std::string utt = spec.id_prefix + "-" + DialectName(static_cast<Dialect>(c)) + buf;

      EmbeddingRecord rec;
      rec.utt_id = utt;
      rec.vector.resize(spec.dim);
      for (int d = 0; d < spec.dim; ++d) {
        rec.vector[d] = means[c][d] + stddev[c] * rng.RandGauss();
      }
      rec.duration_s = spec.duration_min_s +
                       (spec.duration_max_s - spec.duration_min_s) * rng.RandUniform();
      ds.embeddings->Append(std::move(rec));

      if (spec.emit_transcripts) {
        TranscriptRecord tr;
        tr.utt_id = utt;
        tr.tokens.reserve(spec.tokens_per_utt);
        for (int t = 0; t < spec.tokens_per_utt; ++t) {
          double u = rng.RandUniform();
          size_t k = std::lower_bound(cum.begin(), cum.end(), u) - cum.begin();
          if (k >= cum.size()) k = cum.size() - 1;
          char tok[16];
          std::snprintf(tok, sizeof(tok), "w%03zu", k);
          tr.tokens.emplace_back(tok);
        }
        ds.transcripts->Append(std::move(tr));
      }
      ds.labels.emplace(utt, static_cast<Dialect>(c));
    }
  }
  ds.Validate();
  return ds;
}

}  // namespace adi

// adi/corpus.h

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

#ifndef ADI_CORPUS_H_
#define ADI_CORPUS_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adi/common.h"

namespace adi {

// The five dialect classes. Ordinal values are load-bearing: class score
// vectors, confusion matrices and model mean rows are all indexed by them.
enum class Dialect : int { kEgy = 0, kGlf = 1, kLav = 2, kMsa = 3, kNor = 4 };

constexpr int kNumDialects = 5;

const char* DialectName(Dialect d);
// Accepts the LEV alias for LAV. Throws on unknown symbols.
Dialect ParseDialect(const std::string& s);

struct EmbeddingRecord {
  std::string utt_id;
  std::vector<double> vector;
  double duration_s = 0.0;

  bool operator==(const EmbeddingRecord&) const = default;
};

// Fixed-dimension embedding collection. Dimension is set by the first
// appended record and enforced afterwards.
class EmbeddingSet {
 public:
  void Append(EmbeddingRecord rec);

  int dim() const { return dim_; }  // -1 while empty
  bool empty() const { return records_.empty(); }
  size_t size() const { return records_.size(); }
  const std::vector<EmbeddingRecord>& records() const { return records_; }
  const EmbeddingRecord* Find(const std::string& utt_id) const;

  bool operator==(const EmbeddingSet&) const = default;

 private:
  int dim_ = -1;
  std::vector<EmbeddingRecord> records_;
  std::map<std::string, size_t> index_;
};

struct TranscriptRecord {
  std::string utt_id;
  std::vector<std::string> tokens;  // may be empty (silence / ASR failure)

  bool operator==(const TranscriptRecord&) const = default;
};

class TranscriptSet {
 public:
  void Append(TranscriptRecord rec);

  bool empty() const { return records_.empty(); }
  size_t size() const { return records_.size(); }
  const std::vector<TranscriptRecord>& records() const { return records_; }
  const TranscriptRecord* Find(const std::string& utt_id) const;

  bool operator==(const TranscriptSet&) const = default;

 private:
  std::vector<TranscriptRecord> records_;
  std::map<std::string, size_t> index_;
};

using LabelMap = std::map<std::string, Dialect>;

enum class SplitTag { kTrain, kDev, kTest };
const char* SplitTagName(SplitTag t);

// Aligned records plus labels. Every labeled utterance must appear in at
// least one of the embedding/transcript sets.
struct LabeledDataset {
  std::optional<EmbeddingSet> embeddings;
  std::optional<TranscriptSet> transcripts;
  LabelMap labels;
  SplitTag split_tag = SplitTag::kTrain;

  void Validate() const;  // throws on duplicate/missing utterances
  size_t size() const { return labels.size(); }
};

struct ManifestStats {
  // Indexed by dialect ordinal.
  std::vector<int64_t> utterances = std::vector<int64_t>(kNumDialects, 0);
  std::vector<double> duration_h = std::vector<double>(kNumDialects, 0.0);
  std::vector<double> words_k = std::vector<double>(kNumDialects, 0.0);

  int64_t TotalUtterances() const;
  double TotalDurationH() const;
  double TotalWordsK() const;
};

// ---- file I/O ----
// Embeddings: one record per line, "utt_id <D> v1 ... vD dur=<seconds>".
EmbeddingSet LoadEmbeddings(const std::string& path);
void SaveEmbeddings(const EmbeddingSet& set, const std::string& path);

// Labels: TSV "utt_id<TAB>DIALECT".
LabelMap LoadLabels(const std::string& path);
void SaveLabels(const LabelMap& labels, const std::string& path);

// Transcripts: TSV "utt_id<TAB>tok1 tok2 ...". A line without a tab is an
// utterance with an empty token sequence.
TranscriptSet LoadTranscripts(const std::string& path);
void SaveTranscripts(const TranscriptSet& set, const std::string& path);

// ---- splitting ----
// Per-class stratified partition. Fractions must be positive and sum to 1
// within 1e-9. Deterministic for a fixed seed; parts are disjoint and
// exhaustive, per-class sizes assigned by largest remainder.
std::vector<LabeledDataset> SplitDataset(const LabeledDataset& ds,
                                         const std::vector<double>& fractions,
                                         uint64_t seed);

// Merges datasets; duplicate utterance ids raise an error.
LabeledDataset MergeDatasets(const LabeledDataset& a, const LabeledDataset& b);

// ---- manifest ----
ManifestStats ComputeManifestStats(const LabeledDataset& ds);

// Expected-count manifest, TSV rows "split<TAB>dialect<TAB>utts<TAB>dur_h
// <TAB>words_k" plus per-split TOTAL rows. Throws if malformed or if any
// TOTAL row disagrees with the per-class sum.
struct Manifest {
  std::map<std::string, ManifestStats> per_split;  // keys: train/dev/test
};
Manifest LoadManifest(const std::string& path);

// Checks dataset counts against one split of an expected manifest.
// Returns a list of human-readable mismatch descriptions (empty = valid).
std::vector<std::string> ValidateAgainstManifest(const ManifestStats& got,
                                                 const ManifestStats& expected);

// ---- synthetic corpus ----
// Gaussian class clusters for embeddings plus per-class token unigram
// distributions for transcripts. Used as the test substrate everywhere.
struct SyntheticSpec {
  int dim = 20;
  // Per-class sample count; size kNumDialects.
  std::vector<int> counts = std::vector<int>(kNumDialects, 100);
  // Explicit class means (kNumDialects x dim). When empty, means are placed
  // at (separation / sqrt(2)) * e_k so every pair of classes is exactly
  // `separation` apart.
  std::vector<std::vector<double>> means;
  double separation = 4.0;
  // Per-class isotropic standard deviation scale; size kNumDialects or
  // empty for all-ones.
  std::vector<double> stddev;
  double duration_min_s = 1.0;
  double duration_max_s = 30.0;

  // Transcript generation: class k boosts its own slice of the token
  // inventory by `token_boost`, all other tokens have weight 1.
  int vocab_size = 50;
  int tokens_per_utt = 20;
  double token_boost = 5.0;
  bool emit_transcripts = true;

  std::string id_prefix = "syn";
};

LabeledDataset SynthGenerate(const SyntheticSpec& spec, uint64_t seed);

}  // namespace adi

#endif  // ADI_CORPUS_H_

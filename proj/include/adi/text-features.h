// adi/text-features.h

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

#ifndef ADI_TEXT_FEATURES_H_
#define ADI_TEXT_FEATURES_H_

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace adi {

// Sentence-start marker used by bigram models, and the separator joining
// the two words of a bigram feature key. The separator is a control byte so
// joined keys cannot collide with whitespace-delimited tokens.
inline constexpr const char* kSentenceStart = "<s>";
inline constexpr char kBigramSep = '\x1f';

// Pre-processing combination, decoded from a 3-bit id:
// bit2 = stop-word removal, bit1 = stemming, bit0 = bigram features.
struct PreprocCombo {
  int combo_id = 0;

  bool stopword() const { return (combo_id >> 2) & 1; }
  bool stemming() const { return (combo_id >> 1) & 1; }
  bool bigram() const { return combo_id & 1; }
};

PreprocCombo MakeCombo(int combo_id);  // throws unless 0 <= id <= 7

using StopList = std::set<std::string>;

StopList LoadStopList(const std::string& path);  // one token per line

// Order-preserving stop-word filter.
std::vector<std::string> RemoveStopwords(const std::vector<std::string>& tokens,
                                         const StopList& stoplist);

// Longest-match suffix stripper. Suffixes are stripped repeatedly until no
// table entry matches, so stemming is idempotent. A strip is applied only
// when at least kMinStemLen code points remain.
class Stemmer {
 public:
  static constexpr int kMinStemLen = 3;

  explicit Stemmer(std::vector<std::string> suffixes);
  static Stemmer FromFile(const std::string& path);  // one suffix per line

  std::string Stem(const std::string& token) const;

 private:
  std::vector<std::string> suffixes_;  // longest first
};

// UTF-8 code point count (malformed bytes count as one point each).
size_t Utf8Length(std::string_view s);

// N-gram counts of one token sequence. order 1: token counts. order 2:
// adjacent pairs joined by kBigramSep, with kSentenceStart opening the
// first pair.
std::map<std::string, int64_t> CountNgrams(const std::vector<std::string>& tokens,
                                           int order);

// Count model over a training corpus, scoring sequences with add-alpha
// smoothing. With alpha = 0 an unseen event makes the sequence log
// probability -inf (returned, not thrown).
struct NGramModel {
  int order = 1;                              // 1 or 2
  std::map<std::string, int64_t> counts;      // order-n grams
  std::map<std::string, int64_t> context_counts;  // unigrams (+ start marker)
  int64_t total_unigrams = 0;
  int64_t vocab_size = 0;  // distinct word types in training
  double alpha = 0.0;
};

NGramModel TrainNgramModel(const std::vector<std::vector<std::string>>& corpus,
                           int order, double alpha);

double SequenceLogProb(const NGramModel& model,
                       const std::vector<std::string>& tokens);

// Feature-to-column mapping with document frequencies.
struct Vocab {
  bool bigram = false;  // whether bigram features are included
  std::map<std::string, int32_t> index;     // feature -> dense column
  std::vector<int64_t> doc_freq;            // by column
  int64_t num_docs = 0;

  int32_t size() const { return static_cast<int32_t>(index.size()); }
};

struct SparseEntry {
  int32_t index;
  double value;
  bool operator==(const SparseEntry&) const = default;
};

// Strictly increasing indices, no stored zeros.
struct SparseVector {
  std::vector<SparseEntry> entries;

  double Dot(const SparseVector& other) const;
  double NormSq() const;
  bool operator==(const SparseVector&) const = default;
};

enum class FeatureScheme { kBin, kTf, kTfidf };

const char* FeatureSchemeName(FeatureScheme s);
FeatureScheme ParseFeatureScheme(const std::string& s);

// Builds the vocabulary over pre-processed documents: unigrams (and bigrams
// when combo.bigram) with document frequency >= min_df, indexed in
// lexicographic feature order.
Vocab BuildVocab(const std::vector<std::vector<std::string>>& docs,
                 const PreprocCombo& combo, int min_df = 1);

// idf(f) = ln((1 + N) / (1 + df(f))) + 1.
double Idf(const Vocab& vocab, int32_t column);

// Vectorizes a pre-processed document. Out-of-vocabulary features are
// dropped.
SparseVector Vectorize(const std::vector<std::string>& tokens,
                       const Vocab& vocab, FeatureScheme scheme);

// Full per-document pipeline: stop-word removal and stemming per combo,
// then vectorization against the vocab.
class TextPipeline {
 public:
  TextPipeline(PreprocCombo combo, StopList stoplist, Stemmer stemmer)
      : combo_(combo), stoplist_(std::move(stoplist)), stemmer_(std::move(stemmer)) {}

  std::vector<std::string> Preprocess(const std::vector<std::string>& tokens) const;

  const PreprocCombo& combo() const { return combo_; }

 private:
  PreprocCombo combo_;
  StopList stoplist_;
  Stemmer stemmer_;
};

// Sparse text row "utt_id index:value ...".
std::string FormatSparseRow(const std::string& utt_id, const SparseVector& v);

}  // namespace adi

#endif  // ADI_TEXT_FEATURES_H_

// adi/text-features.cc

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

#include "adi/text-features.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "adi/common.h"

namespace adi {

PreprocCombo MakeCombo(int combo_id) {
  if (combo_id < 0 || combo_id > 7) {
    throw std::invalid_argument("combo_id must be in [0, 7], got " +
                                std::to_string(combo_id));
  }
  return PreprocCombo{combo_id};
}

StopList LoadStopList(const std::string& path) {
  StopList list;
  for (const auto& line : ReadLines(path)) {
    auto toks = SplitWhitespace(line);
    for (auto& t : toks) list.insert(std::move(t));
  }
  return list;
}

std::vector<std::string> RemoveStopwords(const std::vector<std::string>& tokens,
                                         const StopList& stoplist) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (!stoplist.count(t)) out.push_back(t);
  }
  return out;
}

size_t Utf8Length(std::string_view s) {
  size_t n = 0;
  for (unsigned char c : s) {
    if ((c & 0xC0) != 0x80) ++n;  // count non-continuation bytes
  }
  return n;
}

Stemmer::Stemmer(std::vector<std::string> suffixes)
    : suffixes_(std::move(suffixes)) {
  // Longest first, then lexicographic so ties are deterministic.
  std::sort(suffixes_.begin(), suffixes_.end(),
            [](const std::string& a, const std::string& b) {
              if (a.size() != b.size()) return a.size() > b.size();
              return a < b;
            });
  suffixes_.erase(std::unique(suffixes_.begin(), suffixes_.end()),
                  suffixes_.end());
}

Stemmer Stemmer::FromFile(const std::string& path) {
  std::vector<std::string> suffixes;
  for (const auto& line : ReadLines(path)) {
    auto toks = SplitWhitespace(line);
    for (auto& t : toks) suffixes.push_back(std::move(t));
  }
  return Stemmer(std::move(suffixes));
}

std::string Stemmer::Stem(const std::string& token) const {
  std::string cur = token;
  bool stripped = true;
  while (stripped) {
    stripped = false;
    for (const auto& suf : suffixes_) {
      if (suf.empty() || suf.size() >= cur.size()) continue;
      if (cur.compare(cur.size() - suf.size(), suf.size(), suf) != 0) continue;
      std::string candidate = cur.substr(0, cur.size() - suf.size());
      if (Utf8Length(candidate) < kMinStemLen) continue;
      cur = std::move(candidate);
      stripped = true;
      break;  // restart from the longest suffix
    }
  }
  return cur;
}

std::map<std::string, int64_t> CountNgrams(const std::vector<std::string>& tokens,
                                           int order) {
  if (order != 1 && order != 2) {
    throw std::invalid_argument("ngram order must be 1 or 2");
  }
  std::map<std::string, int64_t> counts;
  if (order == 1) {
    for (const auto& t : tokens) counts[t]++;
  } else {
    std::string prev = kSentenceStart;
    for (const auto& t : tokens) {
      counts[prev + kBigramSep + t]++;
      prev = t;
    }
  }
  return counts;
}

NGramModel TrainNgramModel(const std::vector<std::vector<std::string>>& corpus,
                           int order, double alpha) {
  if (alpha < 0.0) throw std::invalid_argument("alpha must be >= 0");
  NGramModel model;
  model.order = order;
  model.alpha = alpha;
  for (const auto& sent : corpus) {
    for (const auto& [gram, c] : CountNgrams(sent, order)) {
      model.counts[gram] += c;
    }
    for (const auto& t : sent) {
      model.context_counts[t]++;
      model.total_unigrams++;
    }
    if (order == 2 && !sent.empty()) model.context_counts[kSentenceStart]++;
  }
  // Word types exclude the start marker.
  model.vocab_size = static_cast<int64_t>(model.context_counts.size()) -
                     (model.context_counts.count(kSentenceStart) ? 1 : 0);
  return model;
}

double SequenceLogProb(const NGramModel& model,
                       const std::vector<std::string>& tokens) {
  const double neg_inf = -std::numeric_limits<double>::infinity();
  double logprob = 0.0;
  const double aV = model.alpha * static_cast<double>(model.vocab_size);

  auto count_of = [](const std::map<std::string, int64_t>& m,
                     const std::string& k) -> int64_t {
    auto it = m.find(k);
    return it == m.end() ? 0 : it->second;
  };

  if (model.order == 1) {
    for (const auto& t : tokens) {
      double num = static_cast<double>(count_of(model.counts, t)) + model.alpha;
      double den = static_cast<double>(model.total_unigrams) + aV;
      if (num <= 0.0 || den <= 0.0) return neg_inf;
      logprob += std::log(num / den);
    }
  } else {
    std::string prev = kSentenceStart;
    for (const auto& t : tokens) {
      double num = static_cast<double>(
                       count_of(model.counts, prev + kBigramSep + t)) +
                   model.alpha;
      double den = static_cast<double>(count_of(model.context_counts, prev)) + aV;
      if (num <= 0.0 || den <= 0.0) return neg_inf;
      logprob += std::log(num / den);
      prev = t;
    }
  }
  return logprob;
}

const char* FeatureSchemeName(FeatureScheme s) {
  switch (s) {
    case FeatureScheme::kBin: return "BIN";
    case FeatureScheme::kTf: return "TF";
    case FeatureScheme::kTfidf: return "TFIDF";
  }
  return "?";
}

FeatureScheme ParseFeatureScheme(const std::string& s) {
  if (s == "BIN" || s == "bin") return FeatureScheme::kBin;
  if (s == "TF" || s == "tf") return FeatureScheme::kTf;
  if (s == "TFIDF" || s == "tfidf" || s == "TF-IDF") return FeatureScheme::kTfidf;
  throw std::invalid_argument("unknown feature scheme: " + s);
}

namespace {

// Unigram counts plus bigram counts when requested.
std::map<std::string, int64_t> DocFeatureCounts(
    const std::vector<std::string>& tokens, bool bigram) {
  auto counts = CountNgrams(tokens, 1);
  if (bigram) {
    for (const auto& [gram, c] : CountNgrams(tokens, 2)) counts[gram] += c;
  }
  return counts;
}

}  // namespace

Vocab BuildVocab(const std::vector<std::vector<std::string>>& docs,
                 const PreprocCombo& combo, int min_df) {
  if (min_df < 1) throw std::invalid_argument("min_df must be >= 1");
  std::map<std::string, int64_t> df;
  for (const auto& doc : docs) {
    for (const auto& [feat, c] : DocFeatureCounts(doc, combo.bigram())) {
      (void)c;
      df[feat]++;
    }
  }
  Vocab vocab;
  vocab.bigram = combo.bigram();
  vocab.num_docs = static_cast<int64_t>(docs.size());
  // std::map iteration is already lexicographic.
  for (const auto& [feat, d] : df) {
    if (d < min_df) continue;
    int32_t col = static_cast<int32_t>(vocab.index.size());
    vocab.index.emplace(feat, col);
    vocab.doc_freq.push_back(d);
  }
  return vocab;
}

double Idf(const Vocab& vocab, int32_t column) {
  return std::log(static_cast<double>(1 + vocab.num_docs) /
                  static_cast<double>(1 + vocab.doc_freq[column])) +
         1.0;
}

SparseVector Vectorize(const std::vector<std::string>& tokens,
                       const Vocab& vocab, FeatureScheme scheme) {
  SparseVector out;
  std::map<int32_t, double> vals;
  for (const auto& [feat, count] : DocFeatureCounts(tokens, vocab.bigram)) {
    auto it = vocab.index.find(feat);
    if (it == vocab.index.end()) continue;
    switch (scheme) {
      case FeatureScheme::kBin:
        vals[it->second] = 1.0;
        break;
      case FeatureScheme::kTf:
        vals[it->second] = static_cast<double>(count);
        break;
      case FeatureScheme::kTfidf:
        vals[it->second] = static_cast<double>(count) * Idf(vocab, it->second);
        break;
    }
  }
  out.entries.reserve(vals.size());
  for (const auto& [idx, v] : vals) {
    if (v != 0.0) out.entries.push_back({idx, v});
  }
  return out;
}

double SparseVector::Dot(const SparseVector& other) const {
  double sum = 0.0;
  size_t i = 0, j = 0;
  while (i < entries.size() && j < other.entries.size()) {
    if (entries[i].index < other.entries[j].index) {
      ++i;
    } else if (entries[i].index > other.entries[j].index) {
      ++j;
    } else {
      sum += entries[i].value * other.entries[j].value;
      ++i;
      ++j;
    }
  }
  return sum;
}

double SparseVector::NormSq() const {
  double sum = 0.0;
  for (const auto& e : entries) sum += e.value * e.value;
  return sum;
}

std::vector<std::string> TextPipeline::Preprocess(
    const std::vector<std::string>& tokens) const {
  std::vector<std::string> out = tokens;
  if (combo_.stopword()) out = RemoveStopwords(out, stoplist_);
  if (combo_.stemming()) {
    for (auto& t : out) t = stemmer_.Stem(t);
  }
  return out;
}

std::string FormatSparseRow(const std::string& utt_id, const SparseVector& v) {
  std::ostringstream out;
  out << utt_id;
  for (const auto& e : v.entries) {
    out << ' ' << e.index << ':' << FormatDouble(e.value);
  }
  return out.str();
}

}  // namespace adi

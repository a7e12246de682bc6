// adi/eval.h

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

#ifndef ADI_EVAL_H_
#define ADI_EVAL_H_

#include <string>
#include <vector>

#include "adi/corpus.h"

namespace adi {

// Rows = reference, columns = hypothesis.
struct ConfusionMatrix {
  std::vector<std::vector<int64_t>> counts;

  ConfusionMatrix()
      : counts(kNumDialects, std::vector<int64_t>(kNumDialects, 0)) {}

  int64_t Total() const;
  void Add(Dialect ref, Dialect hyp) {
    counts[static_cast<int>(ref)][static_cast<int>(hyp)]++;
  }
};

ConfusionMatrix Confusion(const std::vector<Dialect>& preds,
                          const std::vector<Dialect>& labels);

enum class Averaging { kMacro, kMicro };

// Percentages. Macro RCL/PRC are unweighted means of per-class recall and
// precision; a class never hypothesized contributes precision 0 and is
// counted in `zero_hyp_classes`.
struct Metrics {
  double acc = 0.0;
  double rcl = 0.0;
  double prc = 0.0;
  int zero_hyp_classes = 0;
};

Metrics ComputeMetrics(const ConfusionMatrix& cm,
                       Averaging avg = Averaging::kMacro);

// One named row per system, columns ACC RCL PRC.
struct MetricsRow {
  std::string name;
  Metrics metrics;
};

enum class ReportFormat { kTsv, kMarkdown };

std::string Report(const std::vector<MetricsRow>& rows, ReportFormat format);

}  // namespace adi

#endif  // ADI_EVAL_H_

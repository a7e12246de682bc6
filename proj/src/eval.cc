// adi/eval.cc

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

#include "adi/eval.h"

#include <cstdio>
#include <sstream>

namespace adi {

int64_t ConfusionMatrix::Total() const {
  int64_t total = 0;
  for (const auto& row : counts)
    for (int64_t v : row) total += v;
  return total;
}

ConfusionMatrix Confusion(const std::vector<Dialect>& preds,
                          const std::vector<Dialect>& labels) {
  if (preds.size() != labels.size()) {
    throw std::invalid_argument("prediction/label count mismatch");
  }
  ConfusionMatrix cm;
  for (size_t i = 0; i < preds.size(); ++i) cm.Add(labels[i], preds[i]);
  return cm;
}

Metrics ComputeMetrics(const ConfusionMatrix& cm, Averaging avg) {
  Metrics m;
  int64_t total = cm.Total();
  if (total == 0) return m;

  int64_t diag = 0;
  for (int c = 0; c < kNumDialects; ++c) diag += cm.counts[c][c];
  m.acc = 100.0 * static_cast<double>(diag) / static_cast<double>(total);

  if (avg == Averaging::kMicro) {
    // Single-label multiclass: micro recall == micro precision == accuracy.
    m.rcl = m.acc;
    m.prc = m.acc;
    return m;
  }

  double rcl_sum = 0.0, prc_sum = 0.0;
  for (int c = 0; c < kNumDialects; ++c) {
    int64_t row = 0, col = 0;
    for (int k = 0; k < kNumDialects; ++k) {
      row += cm.counts[c][k];
      col += cm.counts[k][c];
    }
    if (row > 0) {
      rcl_sum += static_cast<double>(cm.counts[c][c]) / static_cast<double>(row);
    }
    if (col > 0) {
      prc_sum += static_cast<double>(cm.counts[c][c]) / static_cast<double>(col);
    } else {
      m.zero_hyp_classes++;
    }
  }
  m.rcl = 100.0 * rcl_sum / kNumDialects;
  m.prc = 100.0 * prc_sum / kNumDialects;
  return m;
}

namespace {
std::string Fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}
}  // namespace

std::string Report(const std::vector<MetricsRow>& rows, ReportFormat format) {
  std::ostringstream out;
  if (format == ReportFormat::kTsv) {
    out << "system\tACC\tRCL\tPRC\n";
    for (const auto& r : rows) {
      out << r.name << '\t' << Fmt2(r.metrics.acc) << '\t' << Fmt2(r.metrics.rcl)
          << '\t' << Fmt2(r.metrics.prc) << '\n';
    }
  } else {
    out << "| System | ACC | RCL | PRC |\n";
    out << "|---|---|---|---|\n";
    for (const auto& r : rows) {
      out << "| " << r.name << " | " << Fmt2(r.metrics.acc) << " | "
          << Fmt2(r.metrics.rcl) << " | " << Fmt2(r.metrics.prc) << " |\n";
    }
  }
  return out.str();
}

}  // namespace adi

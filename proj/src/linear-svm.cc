// adi/linear-svm.cc

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

#include "adi/linear-svm.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "adi/common.h"

namespace adi {

namespace {

// Dual coordinate descent for one binary L2-regularized L1-loss problem:
//   min_alpha 0.5 alpha^T Q alpha - e^T alpha,  0 <= alpha_i <= C,
// with Q_ij = y_i y_j x_i.x_j over bias-augmented inputs. Convergence is
// declared on the primal-dual gap.
struct BinaryResult {
  std::vector<double> w;
  int iters = 0;
  double gap = 0.0;
};

BinaryResult SolveBinary(const std::vector<SparseVector>& X,
                         const std::vector<int8_t>& y, int aug_dim, double C,
                         int max_iter, double tol, Rng* rng) {
  const size_t n = X.size();
  const int bias_col = aug_dim - 1;
  BinaryResult res;
  res.w.assign(aug_dim, 0.0);
  std::vector<double> alpha(n, 0.0);
  std::vector<double> qd(n);  // diag(Q) = ||x_i||^2 + 1 (bias feature)
  for (size_t i = 0; i < n; ++i) qd[i] = X[i].NormSq() + 1.0;

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});

  auto dot_w = [&](const SparseVector& x) {
    double s = res.w[bias_col];
    for (const auto& e : x.entries) s += res.w[e.index] * e.value;
    return s;
  };

  for (int iter = 1; iter <= max_iter; ++iter) {
    rng->Shuffle(&order);
    for (size_t s = 0; s < n; ++s) {
      size_t i = order[s];
      double g = y[i] * dot_w(X[i]) - 1.0;  // gradient of the dual coordinate
      double pg = g;
      if (alpha[i] <= 0.0 && g >= 0.0) continue;
      if (alpha[i] >= C && g <= 0.0) continue;
      if (std::abs(pg) > 1e-12) {
        double old = alpha[i];
        alpha[i] = std::min(std::max(old - g / qd[i], 0.0), C);
        double d = (alpha[i] - old) * y[i];
        if (d != 0.0) {
          for (const auto& e : X[i].entries) res.w[e.index] += d * e.value;
          res.w[bias_col] += d;
        }
      }
    }

    // Primal-dual gap on the current iterate.
    double wnorm2 = 0.0;
    for (double v : res.w) wnorm2 += v * v;
    double hinge = 0.0, alpha_sum = 0.0;
    for (size_t i = 0; i < n; ++i) {
      hinge += std::max(0.0, 1.0 - y[i] * dot_w(X[i]));
      alpha_sum += alpha[i];
    }
    res.gap = wnorm2 + C * hinge - alpha_sum;
    res.iters = iter;
    if (res.gap <= tol) break;
  }
  return res;
}

}  // namespace

SvmModel TrainSvm(const std::vector<SparseVector>& X, const std::vector<int>& y,
                  int num_classes, int dim, const SvmTrainOptions& options) {
  if (X.empty() || X.size() != y.size()) {
    throw std::invalid_argument("TrainSvm: need equal, nonzero sample counts");
  }
  if (options.C <= 0.0) throw std::invalid_argument("TrainSvm: C must be > 0");
  if (num_classes < 2) throw std::invalid_argument("TrainSvm: need >= 2 classes");

  std::vector<int64_t> class_count(num_classes, 0);
  for (size_t i = 0; i < X.size(); ++i) {
    if (y[i] < 0 || y[i] >= num_classes) {
      throw std::invalid_argument("TrainSvm: label out of range");
    }
    class_count[y[i]]++;
    for (const auto& e : X[i].entries) {
      if (e.index < 0 || e.index >= dim) {
        throw std::invalid_argument("TrainSvm: feature index out of range");
      }
      if (!std::isfinite(e.value)) {
        throw std::invalid_argument("TrainSvm: non-finite feature value");
      }
    }
  }
  for (int k = 0; k < num_classes; ++k) {
    if (class_count[k] == 0) {
      throw std::invalid_argument("TrainSvm: class " + std::to_string(k) +
                                  " absent from training labels");
    }
  }

  SvmModel model;
  model.num_classes = num_classes;
  model.dim = dim;
  model.options = options;
  model.weights.resize(num_classes);
  model.iters.resize(num_classes);
  model.gaps.resize(num_classes);

  for (int k = 0; k < num_classes; ++k) {
    std::vector<int8_t> yk(X.size());
    for (size_t i = 0; i < X.size(); ++i) yk[i] = (y[i] == k) ? 1 : -1;
    Rng rng(DeriveSeed(options.seed, static_cast<uint64_t>(k)));
    BinaryResult res = SolveBinary(X, yk, dim + 1, options.C, options.max_iter,
                                   options.tol, &rng);
    model.weights[k] = std::move(res.w);
    model.iters[k] = res.iters;
    model.gaps[k] = res.gap;
  }
  return model;
}

std::vector<double> SvmScores(const SvmModel& model, const SparseVector& x) {
  std::vector<double> scores(model.num_classes);
  for (int k = 0; k < model.num_classes; ++k) {
    const auto& w = model.weights[k];
    double s = w[model.dim];  // bias
    for (const auto& e : x.entries) {
      if (e.index < model.dim) s += w[e.index] * e.value;
    }
    scores[k] = s;
  }
  return scores;
}

int SvmPredict(const SvmModel& model, const SparseVector& x) {
  auto scores = SvmScores(model, x);
  return static_cast<int>(std::max_element(scores.begin(), scores.end()) -
                          scores.begin());
}

std::string SerializeSvmModel(const SvmModel& model) {
  std::ostringstream out;
  out << "ADI_SVM_MODEL v1\n";
  out << "classes " << model.num_classes << " dim " << model.dim << " C "
      << FormatDouble(model.options.C) << " tol "
      << FormatDouble(model.options.tol) << " max_iter "
      << model.options.max_iter << " seed " << model.options.seed << "\n";
  for (int k = 0; k < model.num_classes; ++k) {
    const auto& w = model.weights[k];
    int nnz = 0;
    for (int j = 0; j < model.dim; ++j) {
      if (w[j] != 0.0) ++nnz;
    }
    out << "class " << k << " bias " << FormatDouble(w[model.dim]) << " nnz "
        << nnz << "\n";
    bool first = true;
    for (int j = 0; j < model.dim; ++j) {
      if (w[j] == 0.0) continue;
      if (!first) out << ' ';
      out << j << ':' << FormatDouble(w[j]);
      first = false;
    }
    out << "\n";
  }
  return out.str();
}

SvmModel DeserializeSvmModel(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "ADI_SVM_MODEL v1") {
    throw std::runtime_error("bad SVM model header");
  }
  if (!std::getline(in, line)) throw std::runtime_error("truncated SVM model");
  auto f = SplitWhitespace(line);
  if (f.size() != 12 || f[0] != "classes" || f[2] != "dim") {
    throw std::runtime_error("bad SVM model metadata line");
  }
  SvmModel model;
  int64_t v = 0;
  ParseInt(f[1], &v);
  model.num_classes = static_cast<int>(v);
  ParseInt(f[3], &v);
  model.dim = static_cast<int>(v);
  ParseDouble(f[5], &model.options.C);
  ParseDouble(f[7], &model.options.tol);
  ParseInt(f[9], &v);
  model.options.max_iter = static_cast<int>(v);
  ParseInt(f[11], &v);
  model.options.seed = static_cast<uint64_t>(v);

  model.weights.assign(model.num_classes,
                       std::vector<double>(model.dim + 1, 0.0));
  for (int k = 0; k < model.num_classes; ++k) {
    if (!std::getline(in, line)) throw std::runtime_error("truncated SVM model");
    auto h = SplitWhitespace(line);
    if (h.size() != 6 || h[0] != "class") {
      throw std::runtime_error("bad SVM class header: " + line);
    }
    ParseDouble(h[3], &model.weights[k][model.dim]);
    if (!std::getline(in, line)) throw std::runtime_error("truncated SVM model");
    for (const auto& tok : SplitWhitespace(line)) {
      auto colon = tok.find(':');
      int64_t idx = 0;
      double val = 0.0;
      if (colon == std::string::npos ||
          !ParseInt(std::string_view(tok).substr(0, colon), &idx) ||
          !ParseDouble(std::string_view(tok).substr(colon + 1), &val) ||
          idx < 0 || idx >= model.dim) {
        throw std::runtime_error("bad SVM weight entry: " + tok);
      }
      model.weights[k][idx] = val;
    }
  }
  return model;
}

void SaveSvmModel(const SvmModel& model, const std::string& path) {
  WriteFileString(path, SerializeSvmModel(model));
}

SvmModel LoadSvmModel(const std::string& path) {
  return DeserializeSvmModel(ReadFileString(path));
}

}  // namespace adi

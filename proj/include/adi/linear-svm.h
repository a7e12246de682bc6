// adi/linear-svm.h

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

#ifndef ADI_LINEAR_SVM_H_
#define ADI_LINEAR_SVM_H_

#include <cstdint>
#include <string>
#include <vector>

#include "adi/text-features.h"

namespace adi {

struct SvmTrainOptions {
  double C = 1.0;
  int max_iter = 1000;   // full coordinate sweeps per class problem
  double tol = 1e-4;     // primal-dual gap stopping threshold
  uint64_t seed = 0;
};

// One-vs-rest linear SVM. Weight rows carry the bias as a trailing
// augmented component (constant feature 1), so w has dim+1 entries.
struct SvmModel {
  int num_classes = 0;
  int dim = 0;
  std::vector<std::vector<double>> weights;  // num_classes x (dim + 1)
  SvmTrainOptions options;
  std::vector<int> iters;        // sweeps used per class problem
  std::vector<double> gaps;      // final duality gap per class problem

  double Bias(int k) const { return weights[k][dim]; }
};

// L2-regularized L1-loss SVM solved by dual coordinate descent, one binary
// problem per class. Deterministic for a fixed seed. Every class in
// [0, num_classes) must occur in y.
SvmModel TrainSvm(const std::vector<SparseVector>& X, const std::vector<int>& y,
                  int num_classes, int dim, const SvmTrainOptions& options);

// Per-class decision values w_k . x + b_k.
std::vector<double> SvmScores(const SvmModel& model, const SparseVector& x);

// Argmax with lowest-index tie-break.
int SvmPredict(const SvmModel& model, const SparseVector& x);

void SaveSvmModel(const SvmModel& model, const std::string& path);
SvmModel LoadSvmModel(const std::string& path);
std::string SerializeSvmModel(const SvmModel& model);
SvmModel DeserializeSvmModel(const std::string& text);

}  // namespace adi

#endif  // ADI_LINEAR_SVM_H_

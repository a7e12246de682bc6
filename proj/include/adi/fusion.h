// adi/fusion.h

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

#ifndef ADI_FUSION_H_
#define ADI_FUSION_H_

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "adi/corpus.h"
#include "adi/eval.h"

namespace adi {

// Per-system, per-utterance class scores.
struct ScoreSet {
  std::string system_id;
  std::string kind;  // log-likelihood | decision-value | log-probability
  std::map<std::string, std::vector<double>> rows;  // utt -> K scores

  void Add(const std::string& utt_id, std::vector<double> scores);
};

// TSV "utt_id s1 .. sK" with an optional "#system <id> <kind>" comment.
ScoreSet LoadScoreFile(const std::string& path);
void SaveScoreFile(const ScoreSet& set, const std::string& path);

// Fused score = sum_s alpha_s * score_s + beta. One scalar per system.
struct FusionModel {
  std::vector<std::string> system_ids;  // order-significant
  std::vector<double> alpha;
  Eigen::VectorXd beta;  // length K
};

struct FusionTrainOptions {
  double l2 = 1e-3;
  int max_iter = 2000;
  double tol = 1e-6;  // stop when the gradient inf-norm drops below this
};

struct FusionTrainResult {
  FusionModel model;
  double final_objective = 0.0;
  double final_grad_norm = 0.0;
  int iterations = 0;
};

// Multiclass cross-entropy over softmax of the fused scores with an L2
// penalty on alpha, minimized by gradient descent with Armijo line search
// from the fixed start alpha = 1/S, beta = 0. All systems must cover
// exactly the labeled utterance set.
FusionTrainResult TrainFusion(const std::vector<ScoreSet>& systems,
                              const LabelMap& labels,
                              const FusionTrainOptions& options = {});

// Identity model for a single system (alpha = 1, beta = 0).
FusionModel IdentityFusion(const std::string& system_id, int num_classes);

Eigen::VectorXd Fuse(const FusionModel& model,
                     const std::vector<std::vector<double>>& per_system_rows);

// Fused predictions for every utterance covered by all systems.
std::map<std::string, Dialect> FusePredict(const FusionModel& model,
                                           const std::vector<ScoreSet>& systems);

struct FoldMetrics {
  std::vector<Metrics> per_fold;
  Metrics mean;
};

// Stratified k-fold: fusion trained on k-1 folds, evaluated on the held-out
// fold. Deterministic per seed.
FoldMetrics KfoldEval(const std::vector<ScoreSet>& systems, const LabelMap& labels,
                      int folds, uint64_t seed,
                      const FusionTrainOptions& options = {});

// Stratified fold assignment, utt -> fold index.
std::map<std::string, int> StratifiedFolds(const LabelMap& labels, int folds,
                                           uint64_t seed);

enum class SweepProtocol { kFusionSplit, kKfold };

struct SweepOptions {
  SweepProtocol protocol = SweepProtocol::kFusionSplit;
  double train_fraction = 1.0 / 3.0;  // fusion-split protocol
  int folds = 10;                     // k-fold protocol
  uint64_t seed = 0;
  FusionTrainOptions fusion;
};

struct SweepEntry {
  std::vector<int> subset;  // indices into the system list
  std::string name;         // ids joined with '+'
  Metrics metrics;
};

// Evaluates every non-empty subset (2^S - 1) under the protocol; sorted by
// accuracy descending, ties by subset size ascending then lexicographic
// index order.
std::vector<SweepEntry> SweepCombinations(const std::vector<ScoreSet>& systems,
                                          const LabelMap& labels,
                                          const SweepOptions& options);

std::string FormatSweepReport(const std::vector<SweepEntry>& entries);

void SaveFusionModel(const FusionModel& model, const std::string& path);
FusionModel LoadFusionModel(const std::string& path);

}  // namespace adi

#endif  // ADI_FUSION_H_

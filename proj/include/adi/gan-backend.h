// adi/gan-backend.h

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

#ifndef ADI_GAN_BACKEND_H_
#define ADI_GAN_BACKEND_H_

#include <Eigen/Dense>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "adi/corpus.h"
#include "adi/neural.h"

namespace adi {

// Semi-supervised GAN classifier over embedding-plus-duration inputs. The
// discriminator emits K real-class logits; the generated class K+1 keeps an
// implicit logit pinned at 0, which removes the softmax over-
// parameterization while still modeling K+1 classes.
struct GanConfig {
  int num_classes = kNumDialects;
  int noise_dim = 100;
  std::vector<int> gen_hidden = {500, 500};
  std::vector<int> disc_hidden = {1024, 1024, 1024};
  double dropout = 0.5;
  int epochs = 40;
  int batch = 100;
  uint64_t seed = 0;
  AdamConfig adam{2e-4, 0.5, 0.999, 1e-8};
};

struct GanModel {
  Mlp discriminator;
  Mlp generator;
  // Standardization of the assembled input (embedding + duration column),
  // estimated from the labeled+unlabeled training pool.
  Eigen::VectorXd input_mean;
  Eigen::VectorXd input_scale;
  int num_classes = kNumDialects;
};

struct GanEpochLog {
  int epoch = 0;
  double sup_loss = 0.0;
  double unsup_loss = 0.0;
  double gen_loss = 0.0;
  double dev_accuracy = std::numeric_limits<double>::quiet_NaN();
};

// ---- loss kernels (exposed for oracles and tests) ----

// (K+1)-vector softmax([l_1..l_K, 0]).
Eigen::VectorXd ClassProbs(const Eigen::VectorXd& logits);

// -log of the renormalized real-class probability, one sample.
double SupLoss(const Eigen::VectorXd& logits, int y);

// Mean over rows: real batch contributes -log(1 - p(K+1)), generated batch
// contributes -log p(K+1). Stable at logits of +-50.
double UnsupLoss(const Eigen::MatrixXd& real_logits,
                 const Eigen::MatrixXd& fake_logits);

// Feature matching: squared distance of batch-mean hidden activations.
double GenFeatureMatchingLoss(const Eigen::MatrixXd& real_h,
                              const Eigen::MatrixXd& fake_h);

// Batch discriminator loss sup+unsup with logit gradients, used by training
// and by the finite-difference harness.
struct DiscriminatorLoss {
  double sup = 0.0;
  double unsup = 0.0;
  Eigen::MatrixXd dlogits_labeled;
  Eigen::MatrixXd dlogits_real;
  Eigen::MatrixXd dlogits_fake;
};
DiscriminatorLoss ComputeDiscriminatorLoss(const Eigen::MatrixXd& labeled_logits,
                                           const std::vector<int>& y,
                                           const Eigen::MatrixXd& real_logits,
                                           const Eigen::MatrixXd& fake_logits);

// ---- input assembly ----

// Appends the duration column as log(1 + seconds).
Eigen::VectorXd GanInputVector(const EmbeddingRecord& rec);

// Rows in the records' order.
Eigen::MatrixXd GanInputMatrix(const EmbeddingSet& set);

// ---- training / inference ----

struct GanTrainResult {
  GanModel model;
  std::vector<GanEpochLog> log;
};

// Alternating updates: the discriminator minimizes sup+unsup loss, the
// generator minimizes feature matching on the last hidden layer. The
// unlabeled pool may be empty. Deterministic for a fixed config seed.
// Throws on non-finite loss naming the epoch and batch.
GanTrainResult TrainGan(const EmbeddingSet& labeled, const LabelMap& labels,
                        const EmbeddingSet& unlabeled, const GanConfig& config,
                        const EmbeddingSet* dev = nullptr,
                        const LabelMap* dev_labels = nullptr);

// K-vector of log p(y|x, y < K+1).
Eigen::VectorXd GanScores(const GanModel& model, const EmbeddingRecord& rec);

// Argmax over real classes, lowest-index tie-break.
Dialect GanPredict(const GanModel& model, const EmbeddingRecord& rec);

std::string FormatGanLog(const std::vector<GanEpochLog>& log);

void SaveGanModel(const GanModel& model, const std::string& path);
GanModel LoadGanModel(const std::string& path);

}  // namespace adi

#endif  // ADI_GAN_BACKEND_H_

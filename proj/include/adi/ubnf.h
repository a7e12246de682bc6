// adi/ubnf.h

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

#ifndef ADI_UBNF_H_
#define ADI_UBNF_H_

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "adi/neural.h"

namespace adi {

// Per-utterance frame features (MFCC/SDC supplied externally or synthetic).
struct FrameMatrix {
  std::string utt_id;
  Eigen::MatrixXd frames;  // T x F
};

// Text format per utterance: header "utt_id T F" then T rows of F values.
// A file holds any number of consecutive blocks.
std::vector<FrameMatrix> LoadFrameMatrices(const std::string& path);
void SaveFrameMatrices(const std::vector<FrameMatrix>& mats,
                       const std::string& path);

// Shifted delta blocks over the first n_static dims, appended to the
// static frame: delta_i(t) = c(t+iP+d) - c(t+iP-d), i = 0..k-1, with
// clamped frame indices at the edges. Output is T x (F + n_static*k).
// Requires T > d + (k-1)*P.
Eigen::MatrixXd ComputeSdc(const Eigen::MatrixXd& frames, int n_static, int d,
                           int P, int k);

// Stacks +-radius context frames (clamped), T x F(2*radius+1).
Eigen::MatrixXd SpliceFrames(const Eigen::MatrixXd& frames, int radius);

// Diagonal-covariance mixture model.
struct GmmModel {
  Eigen::VectorXd weights;    // N, sums to 1
  Eigen::MatrixXd means;      // N x F
  Eigen::MatrixXd variances;  // N x F, floored

  int num_mixtures() const { return static_cast<int>(weights.size()); }
  int dim() const { return static_cast<int>(means.cols()); }
};

struct GmmTrainOptions {
  int iterations = 20;
  uint64_t seed = 0;
  double var_floor_frac = 1e-4;  // of the global per-dim variance
};

struct GmmTrainResult {
  GmmModel model;
  std::vector<double> loglik;       // total data log-likelihood per iteration
  std::vector<std::string> events;  // e.g. empty-mixture reseeds
};

// k-means++ seeded diagonal EM. Requires >= 10*N samples. Deterministic
// per seed. Empty mixtures are re-seeded from the highest-variance mixture
// and the event logged.
GmmTrainResult FitGmmEm(const Eigen::MatrixXd& frames, int num_mixtures,
                        const GmmTrainOptions& options);

// Total log-likelihood of the frames under the model.
double GmmLogLik(const GmmModel& model, const Eigen::MatrixXd& frames);

// Rows sum to 1.
Eigen::MatrixXd FramePosteriors(const GmmModel& model,
                                const Eigen::MatrixXd& frames);

// Argmax posterior per frame, lowest-index tie-break.
std::vector<int> FrameLabels(const GmmModel& model,
                             const Eigen::MatrixXd& frames);

void SaveGmmModel(const GmmModel& model, const std::string& path);
GmmModel LoadGmmModel(const std::string& path);

// Frame classifier with a narrow linear-width tap. Layer sizes run
// input -> hidden... -> bottleneck -> mixtures; the bottleneck is the last
// hidden layer and its pre-activation values are the extracted features.
struct BottleneckNet {
  Mlp net;
  int bottleneck_layer = 0;

  int bottleneck_width() const { return net.sizes[bottleneck_layer + 1]; }
};

struct BottleneckTrainConfig {
  std::vector<int> hidden = {256, 256, 40};  // last entry = bottleneck width
  int epochs = 10;
  int batch = 128;
  AdamConfig adam{1e-3, 0.9, 0.999, 1e-8};
  uint64_t seed = 0;
};

struct BottleneckTrainResult {
  BottleneckNet net;
  double train_accuracy = 0.0;  // frame-level, on the training frames
  std::vector<double> epoch_loss;
};

BottleneckTrainResult TrainBottleneck(const Eigen::MatrixXd& frames,
                                      const std::vector<int>& labels,
                                      int num_classes,
                                      const BottleneckTrainConfig& config);

// T x bottleneck_width pre-activation tap, dropout off.
Eigen::MatrixXd ExtractUbnf(const BottleneckNet& net,
                            const Eigen::MatrixXd& frames);

// Frame mean; empty input is an error.
Eigen::VectorXd PoolUtterance(const Eigen::MatrixXd& ubnf_frames);

void SaveBottleneckNet(const BottleneckNet& net, const std::string& path);
BottleneckNet LoadBottleneckNet(const std::string& path);

}  // namespace adi

#endif  // ADI_UBNF_H_

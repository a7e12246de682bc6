// adi/neural.h

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

#ifndef ADI_NEURAL_H_
#define ADI_NEURAL_H_

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "adi/common.h"

namespace adi {

// Feed-forward network: ReLU hidden layers, linear output. Inputs and
// activations are row-major batches (rows = samples). Hidden layers may
// carry inverted dropout: training scales kept units by 1/(1-rate), eval
// applies nothing.
struct Mlp {
  std::vector<int> sizes;              // widths, length = layers + 1
  std::vector<Eigen::MatrixXd> W;      // fan_in x fan_out per layer
  std::vector<Eigen::VectorXd> b;
  std::vector<double> dropout;         // per hidden layer, length layers - 1

  int num_layers() const { return static_cast<int>(W.size()); }
  int input_dim() const { return sizes.front(); }
  int output_dim() const { return sizes.back(); }
  int64_t NumParams() const;
};

// He-uniform initialized network, biases zero. Deterministic per seed.
Mlp MakeMlp(const std::vector<int>& sizes, const std::vector<double>& dropout,
            uint64_t seed);

struct ForwardResult {
  Eigen::MatrixXd input;
  std::vector<Eigen::MatrixXd> pre;    // pre-activation per layer
  std::vector<Eigen::MatrixXd> post;   // what the next layer consumed
  std::vector<Eigen::MatrixXd> masks;  // 0/1 dropout masks (train mode only)

  const Eigen::MatrixXd& output() const { return post.back(); }
};

// train_mode draws Bernoulli masks from rng (or uses fixed_masks when
// given, one 0/1 matrix per hidden layer). Eval mode ignores dropout.
ForwardResult Forward(const Mlp& mlp, const Eigen::MatrixXd& x, bool train_mode,
                      Rng* rng = nullptr,
                      const std::vector<Eigen::MatrixXd>* fixed_masks = nullptr);

struct Gradients {
  std::vector<Eigen::MatrixXd> dW;
  std::vector<Eigen::VectorXd> db;
};

Gradients ZeroGradients(const Mlp& mlp);
void AccumulateGradients(Gradients* into, const Gradients& g);

// Reverse-mode gradients for the realized forward graph. `grad` is the
// loss gradient at post[from_layer] (the default -1 means the output
// layer). Layers above from_layer get zero gradients. When grad_input is
// non-null it receives the gradient at the network input.
Gradients Backward(const Mlp& mlp, const ForwardResult& fwd,
                   const Eigen::MatrixXd& grad, int from_layer = -1,
                   Eigen::MatrixXd* grad_input = nullptr);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamConfig config;
  std::vector<Eigen::MatrixXd> mW, vW;
  std::vector<Eigen::VectorXd> mb, vb;
  int64_t step = 0;
};

AdamState MakeAdamState(const Mlp& mlp, const AdamConfig& config);

// Standard bias-corrected update, in place.
void AdamStep(Mlp* mlp, const Gradients& grads, AdamState* state);

// Central finite differences on >= num_coords randomly chosen parameter
// coordinates. `loss` must be a pure function of the parameters (freeze
// dropout masks inside the closure). Returns the max relative error
// |g_fd - g_an| / max(|g_fd| + |g_an|, 1e-8).
double GradCheck(Mlp* mlp, const std::function<double(const Mlp&)>& loss,
                 const Gradients& analytic, int num_coords = 50,
                 double eps = 1e-5, uint64_t seed = 0);

// ---- shared loss kernels ----
double LogSumExp(const Eigen::VectorXd& v);
Eigen::VectorXd LogSoftmax(const Eigen::VectorXd& logits);

// Mean cross-entropy of row-wise softmax against integer labels. When
// dlogits is non-null it receives d(mean loss)/dlogits.
double SoftmaxCrossEntropy(const Eigen::MatrixXd& logits,
                           const std::vector<int>& y,
                           Eigen::MatrixXd* dlogits = nullptr);

// ---- generic minibatch softmax classifier trainer ----
struct SoftmaxTrainConfig {
  int epochs = 20;
  int batch = 128;
  AdamConfig adam;
  uint64_t seed = 0;
};

struct SoftmaxTrainStats {
  std::vector<double> epoch_loss;
  double train_accuracy = 0.0;
};

SoftmaxTrainStats TrainSoftmaxClassifier(Mlp* mlp, const Eigen::MatrixXd& X,
                                         const std::vector<int>& y,
                                         const SoftmaxTrainConfig& config);

// Row-wise argmax prediction from logits, lowest index on ties.
std::vector<int> PredictRows(const Mlp& mlp, const Eigen::MatrixXd& X);

void SaveMlp(const Mlp& mlp, const std::string& path);
Mlp LoadMlp(const std::string& path);
void WriteMlp(std::ostream& out, const Mlp& mlp);
Mlp ReadMlp(std::istream& in);

}  // namespace adi

#endif  // ADI_NEURAL_H_

// adi/neural.cc

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

#include "adi/neural.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "adi/matrix-io.h"

namespace adi {

int64_t Mlp::NumParams() const {
  int64_t n = 0;
  for (int l = 0; l < num_layers(); ++l) n += W[l].size() + b[l].size();
  return n;
}

Mlp MakeMlp(const std::vector<int>& sizes, const std::vector<double>& dropout,
            uint64_t seed) {
  if (sizes.size() < 2) throw std::invalid_argument("MakeMlp: need >= 2 sizes");
  for (int s : sizes) {
    if (s <= 0) throw std::invalid_argument("MakeMlp: sizes must be positive");
  }
  const int layers = static_cast<int>(sizes.size()) - 1;
  if (!dropout.empty() && static_cast<int>(dropout.size()) != layers - 1) {
    throw std::invalid_argument("MakeMlp: need one dropout rate per hidden layer");
  }
  for (double r : dropout) {
    if (r < 0.0 || r >= 1.0) throw std::invalid_argument("MakeMlp: bad dropout rate");
  }
  Mlp mlp;
  mlp.sizes = sizes;
  mlp.dropout = dropout.empty() ? std::vector<double>(layers - 1, 0.0) : dropout;
  Rng rng(seed);
  for (int l = 0; l < layers; ++l) {
    const int fan_in = sizes[l], fan_out = sizes[l + 1];
    double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
    Eigen::MatrixXd w(fan_in, fan_out);
    for (int i = 0; i < fan_in; ++i) {
      for (int j = 0; j < fan_out; ++j) {
        w(i, j) = limit * (2.0 * rng.RandUniform() - 1.0);
      }
    }
    mlp.W.push_back(std::move(w));
    mlp.b.push_back(Eigen::VectorXd::Zero(fan_out));
  }
  return mlp;
}

ForwardResult Forward(const Mlp& mlp, const Eigen::MatrixXd& x, bool train_mode,
                      Rng* rng, const std::vector<Eigen::MatrixXd>* fixed_masks) {
  if (x.cols() != mlp.input_dim()) {
    throw std::invalid_argument("Forward: input dimension mismatch");
  }
  const int layers = mlp.num_layers();
  ForwardResult fwd;
  fwd.input = x;
  fwd.pre.resize(layers);
  fwd.post.resize(layers);
  if (train_mode) fwd.masks.resize(layers - 1);

  const Eigen::MatrixXd* cur = &fwd.input;
  for (int l = 0; l < layers; ++l) {
    fwd.pre[l].noalias() = (*cur) * mlp.W[l];
    fwd.pre[l].rowwise() += mlp.b[l].transpose();
    if (l == layers - 1) {
      fwd.post[l] = fwd.pre[l];  // linear output
    } else {
      fwd.post[l] = fwd.pre[l].cwiseMax(0.0);
      double rate = mlp.dropout[l];
      if (train_mode && rate > 0.0) {
        Eigen::MatrixXd mask;
        if (fixed_masks) {
          mask = (*fixed_masks)[l];
          if (mask.rows() != fwd.post[l].rows() || mask.cols() != fwd.post[l].cols()) {
            throw std::invalid_argument("Forward: dropout mask shape mismatch");
          }
        } else {
          if (!rng) throw std::invalid_argument("Forward: train mode needs rng or masks");
          mask.resize(fwd.post[l].rows(), fwd.post[l].cols());
          for (Eigen::Index r = 0; r < mask.rows(); ++r) {
            for (Eigen::Index c = 0; c < mask.cols(); ++c) {
              mask(r, c) = rng->RandUniform() >= rate ? 1.0 : 0.0;
            }
          }
        }
        fwd.post[l].array() *= mask.array() / (1.0 - rate);
        fwd.masks[l] = std::move(mask);
      } else if (train_mode) {
        fwd.masks[l].resize(0, 0);
      }
    }
    cur = &fwd.post[l];
  }
  return fwd;
}

Gradients ZeroGradients(const Mlp& mlp) {
  Gradients g;
  for (int l = 0; l < mlp.num_layers(); ++l) {
    g.dW.push_back(Eigen::MatrixXd::Zero(mlp.W[l].rows(), mlp.W[l].cols()));
    g.db.push_back(Eigen::VectorXd::Zero(mlp.b[l].size()));
  }
  return g;
}

void AccumulateGradients(Gradients* into, const Gradients& g) {
  for (size_t l = 0; l < g.dW.size(); ++l) {
    into->dW[l] += g.dW[l];
    into->db[l] += g.db[l];
  }
}

Gradients Backward(const Mlp& mlp, const ForwardResult& fwd,
                   const Eigen::MatrixXd& grad, int from_layer,
                   Eigen::MatrixXd* grad_input) {
  const int layers = mlp.num_layers();
  if (from_layer < 0) from_layer = layers - 1;
  if (from_layer >= layers) {
    throw std::invalid_argument("Backward: from_layer out of range");
  }
  Gradients g = ZeroGradients(mlp);

  // delta = dL/d(post[l]) while walking down.
  Eigen::MatrixXd delta = grad;
  const bool train_mode = !fwd.masks.empty();

  for (int l = from_layer; l >= 0; --l) {
    if (l < layers - 1) {
      // Undo dropout scaling, then the ReLU gate.
      double rate = mlp.dropout[l];
      if (train_mode && rate > 0.0 && fwd.masks[l].size() > 0) {
        delta.array() *= fwd.masks[l].array() / (1.0 - rate);
      }
      delta.array() *= (fwd.pre[l].array() > 0.0).cast<double>();
    }
    const Eigen::MatrixXd& below = (l == 0) ? fwd.input : fwd.post[l - 1];
    g.dW[l].noalias() = below.transpose() * delta;
    g.db[l] = delta.colwise().sum().transpose();
    if (l > 0 || grad_input) {
      Eigen::MatrixXd down = delta * mlp.W[l].transpose();
      if (l == 0) {
        if (grad_input) *grad_input = std::move(down);
      } else {
        delta = std::move(down);
      }
    }
  }
  return g;
}

AdamState MakeAdamState(const Mlp& mlp, const AdamConfig& config) {
  AdamState st;
  st.config = config;
  for (int l = 0; l < mlp.num_layers(); ++l) {
    st.mW.push_back(Eigen::MatrixXd::Zero(mlp.W[l].rows(), mlp.W[l].cols()));
    st.vW.push_back(Eigen::MatrixXd::Zero(mlp.W[l].rows(), mlp.W[l].cols()));
    st.mb.push_back(Eigen::VectorXd::Zero(mlp.b[l].size()));
    st.vb.push_back(Eigen::VectorXd::Zero(mlp.b[l].size()));
  }
  return st;
}

void AdamStep(Mlp* mlp, const Gradients& grads, AdamState* state) {
  const AdamConfig& c = state->config;
  state->step++;
  double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state->step));
  double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state->step));
  for (int l = 0; l < mlp->num_layers(); ++l) {
    state->mW[l] = c.beta1 * state->mW[l] + (1.0 - c.beta1) * grads.dW[l];
    state->vW[l] =
        c.beta2 * state->vW[l].array() +
        (1.0 - c.beta2) * grads.dW[l].array().square();
    mlp->W[l].array() -= c.lr * (state->mW[l].array() / bc1) /
                         ((state->vW[l].array() / bc2).sqrt() + c.eps);

    state->mb[l] = c.beta1 * state->mb[l] + (1.0 - c.beta1) * grads.db[l];
    state->vb[l] =
        c.beta2 * state->vb[l].array() +
        (1.0 - c.beta2) * grads.db[l].array().square();
    mlp->b[l].array() -= c.lr * (state->mb[l].array() / bc1) /
                         ((state->vb[l].array() / bc2).sqrt() + c.eps);
  }
}

double GradCheck(Mlp* mlp, const std::function<double(const Mlp&)>& loss,
                 const Gradients& analytic, int num_coords, double eps,
                 uint64_t seed) {
  // Flat view of (layer, is_bias, row, col) coordinates.
  struct Coord {
    int layer;
    bool bias;
    Eigen::Index r, c;
  };
  std::vector<Coord> coords;
  for (int l = 0; l < mlp->num_layers(); ++l) {
    for (Eigen::Index r = 0; r < mlp->W[l].rows(); ++r) {
      for (Eigen::Index c = 0; c < mlp->W[l].cols(); ++c) {
        coords.push_back({l, false, r, c});
      }
    }
    for (Eigen::Index r = 0; r < mlp->b[l].size(); ++r) {
      coords.push_back({l, true, r, 0});
    }
  }
  Rng rng(seed);
  rng.Shuffle(&coords);
  size_t n = std::min<size_t>(coords.size(), static_cast<size_t>(num_coords));

  double max_rel = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const Coord& cd = coords[i];
    double* p = cd.bias ? &mlp->b[cd.layer][cd.r] : &mlp->W[cd.layer](cd.r, cd.c);
    double orig = *p;
    *p = orig + eps;
    double lp = loss(*mlp);
    *p = orig - eps;
    double lm = loss(*mlp);
    *p = orig;
    double fd = (lp - lm) / (2.0 * eps);
    double an = cd.bias ? analytic.db[cd.layer][cd.r]
                        : analytic.dW[cd.layer](cd.r, cd.c);
    double rel = std::abs(fd - an) / std::max(std::abs(fd) + std::abs(an), 1e-8);
    max_rel = std::max(max_rel, rel);
  }
  return max_rel;
}

double LogSumExp(const Eigen::VectorXd& v) {
  double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

Eigen::VectorXd LogSoftmax(const Eigen::VectorXd& logits) {
  return logits.array() - LogSumExp(logits);
}

double SoftmaxCrossEntropy(const Eigen::MatrixXd& logits,
                           const std::vector<int>& y,
                           Eigen::MatrixXd* dlogits) {
  const Eigen::Index n = logits.rows();
  if (n != static_cast<Eigen::Index>(y.size())) {
    throw std::invalid_argument("SoftmaxCrossEntropy: label count mismatch");
  }
  if (dlogits) dlogits->resize(logits.rows(), logits.cols());
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd row = logits.row(i).transpose();
    double lse = LogSumExp(row);
    total += lse - row[y[i]];
    if (dlogits) {
      Eigen::VectorXd p = (row.array() - lse).exp();
      p[y[i]] -= 1.0;
      dlogits->row(i) = p.transpose() / static_cast<double>(n);
    }
  }
  return total / static_cast<double>(n);
}

SoftmaxTrainStats TrainSoftmaxClassifier(Mlp* mlp, const Eigen::MatrixXd& X,
                                         const std::vector<int>& y,
                                         const SoftmaxTrainConfig& config) {
  const Eigen::Index n = X.rows();
  if (n == 0 || n != static_cast<Eigen::Index>(y.size())) {
    throw std::invalid_argument("TrainSoftmaxClassifier: bad inputs");
  }
  AdamState adam = MakeAdamState(*mlp, config.adam);
  Rng shuffle_rng(DeriveSeed(config.seed, 1));
  Rng mask_rng(DeriveSeed(config.seed, 2));

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  SoftmaxTrainStats stats;

  const int batch = std::max(1, config.batch);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle_rng.Shuffle(&order);
    double epoch_loss = 0.0;
    int batches = 0;
    for (Eigen::Index start = 0; start < n; start += batch) {
      Eigen::Index bs = std::min<Eigen::Index>(batch, n - start);
      Eigen::MatrixXd xb(bs, X.cols());
      std::vector<int> yb(bs);
      for (Eigen::Index i = 0; i < bs; ++i) {
        xb.row(i) = X.row(order[start + i]);
        yb[i] = y[order[start + i]];
      }
      ForwardResult fwd = Forward(*mlp, xb, /*train_mode=*/true, &mask_rng);
      Eigen::MatrixXd dlogits;
      double loss = SoftmaxCrossEntropy(fwd.output(), yb, &dlogits);
      if (!std::isfinite(loss)) {
        throw std::runtime_error("TrainSoftmaxClassifier: non-finite loss at epoch " +
                                 std::to_string(epoch));
      }
      Gradients g = Backward(*mlp, fwd, dlogits);
      AdamStep(mlp, g, &adam);
      epoch_loss += loss;
      batches++;
    }
    stats.epoch_loss.push_back(epoch_loss / std::max(1, batches));
  }

  std::vector<int> preds = PredictRows(*mlp, X);
  int64_t correct = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (preds[i] == y[i]) correct++;
  }
  stats.train_accuracy = static_cast<double>(correct) / static_cast<double>(n);
  return stats;
}

std::vector<int> PredictRows(const Mlp& mlp, const Eigen::MatrixXd& X) {
  ForwardResult fwd = Forward(mlp, X, /*train_mode=*/false);
  const Eigen::MatrixXd& logits = fwd.output();
  std::vector<int> preds(logits.rows());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    int best = 0;
    for (int c = 1; c < logits.cols(); ++c) {
      if (logits(i, c) > logits(i, best)) best = c;
    }
    preds[i] = best;
  }
  return preds;
}

void WriteMlp(std::ostream& out, const Mlp& mlp) {
  out << "ADI_MLP v1\n";
  out << "sizes " << mlp.sizes.size();
  for (int s : mlp.sizes) out << ' ' << s;
  out << "\ndropout " << mlp.dropout.size();
  for (double d : mlp.dropout) out << ' ' << FormatDouble(d);
  out << "\n";
  for (int l = 0; l < mlp.num_layers(); ++l) {
    std::string wt = "W" + std::to_string(l);
    std::string bt = "b" + std::to_string(l);
    WriteMatrix(out, wt.c_str(), mlp.W[l]);
    WriteVector(out, bt.c_str(), mlp.b[l]);
  }
}

Mlp ReadMlp(std::istream& in) {
  std::string line;
  // Tolerate a preceding newline left by token-wise readers.
  while (std::getline(in, line) && line.empty()) {
  }
  if (line != "ADI_MLP v1") throw std::runtime_error("bad MLP header");
  std::string tag;
  size_t count = 0;
  if (!(in >> tag >> count) || tag != "sizes") {
    throw std::runtime_error("bad MLP sizes line");
  }
  Mlp mlp;
  mlp.sizes.resize(count);
  for (auto& s : mlp.sizes) {
    if (!(in >> s)) throw std::runtime_error("bad MLP sizes line");
  }
  if (!(in >> tag >> count) || tag != "dropout") {
    throw std::runtime_error("bad MLP dropout line");
  }
  mlp.dropout.resize(count);
  for (auto& d : mlp.dropout) {
    if (!(in >> d)) throw std::runtime_error("bad MLP dropout line");
  }
  const int layers = static_cast<int>(mlp.sizes.size()) - 1;
  for (int l = 0; l < layers; ++l) {
    std::string wt = "W" + std::to_string(l);
    std::string bt = "b" + std::to_string(l);
    mlp.W.push_back(ReadMatrix(in, wt.c_str()));
    mlp.b.push_back(ReadVector(in, bt.c_str()));
  }
  return mlp;
}

void SaveMlp(const Mlp& mlp, const std::string& path) {
  std::ostringstream out;
  WriteMlp(out, mlp);
  WriteFileString(path, out.str());
}

Mlp LoadMlp(const std::string& path) {
  std::istringstream in(ReadFileString(path));
  return ReadMlp(in);
}

}  // namespace adi

// adi/ubnf.cc

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

#include "adi/ubnf.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "adi/matrix-io.h"

namespace adi {

std::vector<FrameMatrix> LoadFrameMatrices(const std::string& path) {
  auto lines = ReadLines(path);
  std::vector<FrameMatrix> mats;
  size_t i = 0;
  while (i < lines.size()) {
    if (lines[i].empty()) {
      ++i;
      continue;
    }
    auto header = SplitWhitespace(lines[i]);
    int64_t t = 0, f = 0;
    if (header.size() != 3 || !ParseInt(header[1], &t) ||
        !ParseInt(header[2], &f) || t < 0 || f <= 0) {
      throw std::runtime_error(path + ":" + std::to_string(i + 1) +
                               ": bad frame block header");
    }
    FrameMatrix fm;
    fm.utt_id = header[0];
    fm.frames.resize(t, f);
    for (int64_t r = 0; r < t; ++r) {
      ++i;
      if (i >= lines.size()) {
        throw std::runtime_error(path + ": truncated frame block for " +
                                 fm.utt_id);
      }
      auto vals = SplitWhitespace(lines[i]);
      if (static_cast<int64_t>(vals.size()) != f) {
        throw std::runtime_error(path + ":" + std::to_string(i + 1) +
                                 ": expected " + std::to_string(f) + " values");
      }
      for (int64_t c = 0; c < f; ++c) {
        if (!ParseDouble(vals[c], &fm.frames(r, c))) {
          throw std::runtime_error(path + ":" + std::to_string(i + 1) +
                                   ": non-numeric value");
        }
      }
    }
    mats.push_back(std::move(fm));
    ++i;
  }
  return mats;
}

void SaveFrameMatrices(const std::vector<FrameMatrix>& mats,
                       const std::string& path) {
  std::ostringstream out;
  for (const auto& fm : mats) {
    out << fm.utt_id << ' ' << fm.frames.rows() << ' ' << fm.frames.cols()
        << '\n';
    for (Eigen::Index r = 0; r < fm.frames.rows(); ++r) {
      for (Eigen::Index c = 0; c < fm.frames.cols(); ++c) {
        if (c) out << ' ';
        out << FormatDouble(fm.frames(r, c));
      }
      out << '\n';
    }
  }
  WriteFileString(path, out.str());
}

Eigen::MatrixXd ComputeSdc(const Eigen::MatrixXd& frames, int n_static, int d,
                           int P, int k) {
  const Eigen::Index t_count = frames.rows();
  const Eigen::Index f = frames.cols();
  if (n_static <= 0 || d <= 0 || P <= 0 || k <= 0) {
    throw std::invalid_argument("ComputeSdc: parameters must be positive");
  }
  const Eigen::Index n = std::min<Eigen::Index>(n_static, f);
  if (t_count <= static_cast<Eigen::Index>(d + (k - 1) * P)) {
    throw std::invalid_argument("ComputeSdc: too few frames for d + (k-1)*P");
  }
  auto clamp = [&](Eigen::Index idx) {
    return std::clamp<Eigen::Index>(idx, 0, t_count - 1);
  };
  Eigen::MatrixXd out(t_count, f + n * k);
  out.leftCols(f) = frames;
  for (Eigen::Index t = 0; t < t_count; ++t) {
    for (int i = 0; i < k; ++i) {
      Eigen::Index plus = clamp(t + static_cast<Eigen::Index>(i) * P + d);
      Eigen::Index minus = clamp(t + static_cast<Eigen::Index>(i) * P - d);
      out.block(t, f + static_cast<Eigen::Index>(i) * n, 1, n) =
          frames.block(plus, 0, 1, n) - frames.block(minus, 0, 1, n);
    }
  }
  return out;
}

Eigen::MatrixXd SpliceFrames(const Eigen::MatrixXd& frames, int radius) {
  if (radius < 0) throw std::invalid_argument("SpliceFrames: radius must be >= 0");
  const Eigen::Index t_count = frames.rows();
  const Eigen::Index f = frames.cols();
  Eigen::MatrixXd out(t_count, f * (2 * radius + 1));
  for (Eigen::Index t = 0; t < t_count; ++t) {
    for (int o = -radius; o <= radius; ++o) {
      Eigen::Index src = std::clamp<Eigen::Index>(t + o, 0, t_count - 1);
      out.block(t, f * static_cast<Eigen::Index>(o + radius), 1, f) =
          frames.row(src);
    }
  }
  return out;
}

namespace {

// Row-wise log densities: T x N matrix of log w_j + log N(x_t; mu_j, var_j).
Eigen::MatrixXd LogJoint(const GmmModel& model, const Eigen::MatrixXd& frames) {
  const Eigen::Index t_count = frames.rows();
  const int n = model.num_mixtures();
  const int f = model.dim();
  if (frames.cols() != f) {
    throw std::invalid_argument("GMM: frame dimension mismatch");
  }
  Eigen::MatrixXd lj(t_count, n);
  const double log2pi = std::log(2.0 * M_PI);
  for (int j = 0; j < n; ++j) {
    double log_norm = 0.0;
    for (int dd = 0; dd < f; ++dd) {
      log_norm += std::log(model.variances(j, dd)) + log2pi;
    }
    log_norm *= -0.5;
    double logw = std::log(model.weights[j]);
    Eigen::ArrayXd inv_var = model.variances.row(j).transpose().array().inverse();
    for (Eigen::Index t = 0; t < t_count; ++t) {
      Eigen::ArrayXd diff =
          frames.row(t).transpose().array() - model.means.row(j).transpose().array();
      lj(t, j) = logw + log_norm - 0.5 * (diff.square() * inv_var).sum();
    }
  }
  return lj;
}

}  // namespace

double GmmLogLik(const GmmModel& model, const Eigen::MatrixXd& frames) {
  Eigen::MatrixXd lj = LogJoint(model, frames);
  double total = 0.0;
  for (Eigen::Index t = 0; t < lj.rows(); ++t) {
    total += LogSumExp(lj.row(t).transpose());
  }
  return total;
}

Eigen::MatrixXd FramePosteriors(const GmmModel& model,
                                const Eigen::MatrixXd& frames) {
  Eigen::MatrixXd lj = LogJoint(model, frames);
  for (Eigen::Index t = 0; t < lj.rows(); ++t) {
    double lse = LogSumExp(lj.row(t).transpose());
    lj.row(t) = (lj.row(t).array() - lse).exp();
  }
  return lj;
}

std::vector<int> FrameLabels(const GmmModel& model,
                             const Eigen::MatrixXd& frames) {
  Eigen::MatrixXd lj = LogJoint(model, frames);
  std::vector<int> labels(lj.rows());
  for (Eigen::Index t = 0; t < lj.rows(); ++t) {
    int best = 0;
    for (int j = 1; j < lj.cols(); ++j) {
      if (lj(t, j) > lj(t, best)) best = j;
    }
    labels[t] = best;
  }
  return labels;
}

GmmTrainResult FitGmmEm(const Eigen::MatrixXd& frames, int num_mixtures,
                        const GmmTrainOptions& options) {
  const Eigen::Index t_count = frames.rows();
  const Eigen::Index f = frames.cols();
  if (num_mixtures <= 0) {
    throw std::invalid_argument("FitGmmEm: need >= 1 mixture");
  }
  if (t_count < 10 * static_cast<Eigen::Index>(num_mixtures)) {
    throw std::invalid_argument("FitGmmEm: need >= 10*N samples, got " +
                                std::to_string(t_count));
  }

  // Global per-dim moments for init variances and the floor.
  Eigen::ArrayXd gmean = frames.colwise().mean().transpose().array();
  Eigen::ArrayXd gvar(f);
  for (Eigen::Index dd = 0; dd < f; ++dd) {
    gvar[dd] = (frames.col(dd).array() - gmean[dd]).square().mean();
  }
  Eigen::ArrayXd floor = (options.var_floor_frac * gvar).max(1e-12);

  GmmTrainResult result;
  GmmModel& model = result.model;
  model.weights = Eigen::VectorXd::Constant(num_mixtures, 1.0 / num_mixtures);
  model.means.resize(num_mixtures, f);
  model.variances.resize(num_mixtures, f);
  for (int j = 0; j < num_mixtures; ++j) {
    model.variances.row(j) = gvar.max(floor).matrix().transpose();
  }

  // k-means++ seeding of the means.
  Rng rng(options.seed);
  Eigen::VectorXd min_dist =
      Eigen::VectorXd::Constant(t_count, std::numeric_limits<double>::infinity());
  Eigen::Index first = rng.RandInt(static_cast<int>(t_count));
  model.means.row(0) = frames.row(first);
  for (int j = 1; j < num_mixtures; ++j) {
    for (Eigen::Index t = 0; t < t_count; ++t) {
      double d2 = (frames.row(t) - model.means.row(j - 1)).squaredNorm();
      if (d2 < min_dist[t]) min_dist[t] = d2;
    }
    double total = min_dist.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      double u = rng.RandUniform() * total;
      double acc = 0.0;
      for (Eigen::Index t = 0; t < t_count; ++t) {
        acc += min_dist[t];
        if (acc >= u) {
          pick = t;
          break;
        }
      }
    } else {
      pick = rng.RandInt(static_cast<int>(t_count));
    }
    model.means.row(j) = frames.row(pick);
  }

  for (int iter = 0; iter < options.iterations; ++iter) {
    // E-step.
    Eigen::MatrixXd lj = LogJoint(model, frames);
    double loglik = 0.0;
    Eigen::MatrixXd resp(t_count, num_mixtures);
    for (Eigen::Index t = 0; t < t_count; ++t) {
      double lse = LogSumExp(lj.row(t).transpose());
      loglik += lse;
      resp.row(t) = (lj.row(t).array() - lse).exp();
    }
    result.loglik.push_back(loglik);

    // M-step.
    Eigen::VectorXd nj = resp.colwise().sum().transpose();
    for (int j = 0; j < num_mixtures; ++j) {
      if (nj[j] < 1e-8) {
        // Dead mixture: restart at a perturbed copy of the widest one.
        int widest = 0;
        double wvar = -1.0;
        for (int h = 0; h < num_mixtures; ++h) {
          double v = model.variances.row(h).sum();
          if (h != j && v > wvar) {
            wvar = v;
            widest = h;
          }
        }
        for (Eigen::Index dd = 0; dd < f; ++dd) {
          model.means(j, dd) = model.means(widest, dd) +
                               0.1 * std::sqrt(model.variances(widest, dd)) *
                                   rng.RandGauss();
        }
        model.variances.row(j) = model.variances.row(widest);
        model.weights[j] = model.weights[widest] * 0.5;
        model.weights[widest] *= 0.5;
        result.events.push_back("iter " + std::to_string(iter) +
                                ": reseeded empty mixture " + std::to_string(j) +
                                " from " + std::to_string(widest));
        continue;
      }
      Eigen::RowVectorXd mean = (resp.col(j).transpose() * frames) / nj[j];
      Eigen::RowVectorXd ex2 =
          (resp.col(j).transpose() * frames.cwiseProduct(frames)) / nj[j];
      model.means.row(j) = mean;
      model.variances.row(j) =
          (ex2.array() - mean.array().square()).max(floor.transpose()).matrix();
      model.weights[j] = nj[j] / static_cast<double>(t_count);
    }
    // Weights can drift off the simplex after reseeds; renormalize.
    model.weights /= model.weights.sum();
  }
  return result;
}

void SaveGmmModel(const GmmModel& model, const std::string& path) {
  std::ostringstream out;
  out << "ADI_GMM_MODEL v1\n";
  WriteVector(out, "weights", model.weights);
  WriteMatrix(out, "means", model.means);
  WriteMatrix(out, "variances", model.variances);
  WriteFileString(path, out.str());
}

GmmModel LoadGmmModel(const std::string& path) {
  std::istringstream in(ReadFileString(path));
  std::string line;
  if (!std::getline(in, line) || line != "ADI_GMM_MODEL v1") {
    throw std::runtime_error("bad GMM model header");
  }
  GmmModel model;
  model.weights = ReadVector(in, "weights");
  model.means = ReadMatrix(in, "means");
  model.variances = ReadMatrix(in, "variances");
  return model;
}

BottleneckTrainResult TrainBottleneck(const Eigen::MatrixXd& frames,
                                      const std::vector<int>& labels,
                                      int num_classes,
                                      const BottleneckTrainConfig& config) {
  if (config.hidden.empty()) {
    throw std::invalid_argument("TrainBottleneck: need hidden sizes");
  }
  std::vector<int> sizes = {static_cast<int>(frames.cols())};
  sizes.insert(sizes.end(), config.hidden.begin(), config.hidden.end());
  sizes.push_back(num_classes);

  BottleneckTrainResult result;
  result.net.net = MakeMlp(sizes, {}, DeriveSeed(config.seed, 31));
  result.net.bottleneck_layer = result.net.net.num_layers() - 2;

  SoftmaxTrainConfig tc;
  tc.epochs = config.epochs;
  tc.batch = config.batch;
  tc.adam = config.adam;
  tc.seed = DeriveSeed(config.seed, 32);
  SoftmaxTrainStats stats =
      TrainSoftmaxClassifier(&result.net.net, frames, labels, tc);
  result.train_accuracy = stats.train_accuracy;
  result.epoch_loss = std::move(stats.epoch_loss);
  return result;
}

Eigen::MatrixXd ExtractUbnf(const BottleneckNet& net,
                            const Eigen::MatrixXd& frames) {
  ForwardResult fwd = Forward(net.net, frames, /*train_mode=*/false);
  return fwd.pre[net.bottleneck_layer];
}

Eigen::VectorXd PoolUtterance(const Eigen::MatrixXd& ubnf_frames) {
  if (ubnf_frames.rows() == 0) {
    throw std::invalid_argument("PoolUtterance: empty input");
  }
  return ubnf_frames.colwise().mean().transpose();
}

void SaveBottleneckNet(const BottleneckNet& net, const std::string& path) {
  std::ostringstream out;
  out << "ADI_BOTTLENECK v1\n";
  out << "bottleneck_layer " << net.bottleneck_layer << "\n";
  WriteMlp(out, net.net);
  WriteFileString(path, out.str());
}

BottleneckNet LoadBottleneckNet(const std::string& path) {
  std::istringstream in(ReadFileString(path));
  std::string line;
  if (!std::getline(in, line) || line != "ADI_BOTTLENECK v1") {
    throw std::runtime_error("bad bottleneck model header");
  }
  BottleneckNet net;
  std::string tag;
  if (!(in >> tag >> net.bottleneck_layer) || tag != "bottleneck_layer") {
    throw std::runtime_error("bad bottleneck layer line");
  }
  net.net = ReadMlp(in);
  return net;
}

}  // namespace adi

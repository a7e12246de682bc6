// adi/gaussian-backend.cc

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

#include "adi/gaussian-backend.h"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "adi/common.h"
#include "adi/matrix-io.h"

namespace adi {

GbModel MakeGbModel(const Eigen::MatrixXd& means,
                    const Eigen::MatrixXd& covariance, double lambda) {
  if (covariance.rows() != covariance.cols() ||
      covariance.rows() != means.cols()) {
    throw std::invalid_argument("GbModel: dimension mismatch");
  }
  double scale = covariance.cwiseAbs().maxCoeff();
  if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() >
      1e-12 * std::max(1.0, scale)) {
    throw std::invalid_argument("GbModel: covariance not symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(covariance);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("GbModel: covariance not positive definite");
  }
  GbModel model;
  model.means = means;
  model.covariance = covariance;
  model.precision = llt.solve(
      Eigen::MatrixXd::Identity(covariance.rows(), covariance.cols()));
  model.lambda = lambda;
  return model;
}

GbModel FitGb(const Eigen::MatrixXd& X, const std::vector<int>& y,
              int num_classes, double lambda) {
  const int n = static_cast<int>(X.rows());
  const int dim = static_cast<int>(X.cols());
  if (n != static_cast<int>(y.size())) {
    throw std::invalid_argument("FitGb: sample/label count mismatch");
  }
  if (lambda < 0.0) throw std::invalid_argument("FitGb: lambda must be >= 0");

  // Canonical per-class sample order makes accumulation independent of the
  // caller's row order (floating-point sums are order-sensitive).
  std::vector<std::vector<int>> members(num_classes);
  for (int i = 0; i < n; ++i) {
    if (y[i] < 0 || y[i] >= num_classes) {
      throw std::invalid_argument("FitGb: label out of range");
    }
    members[y[i]].push_back(i);
  }
  for (int c = 0; c < num_classes; ++c) {
    if (members[c].size() < 2) {
      throw std::invalid_argument("FitGb: every class needs >= 2 samples");
    }
    std::sort(members[c].begin(), members[c].end(), [&](int a, int b) {
      for (int j = 0; j < dim; ++j) {
        if (X(a, j) != X(b, j)) return X(a, j) < X(b, j);
      }
      return false;
    });
  }

  Eigen::MatrixXd means = Eigen::MatrixXd::Zero(num_classes, dim);
  for (int c = 0; c < num_classes; ++c) {
    for (int i : members[c]) means.row(c) += X.row(i);
    means.row(c) /= static_cast<double>(members[c].size());
  }

  Eigen::MatrixXd pooled = Eigen::MatrixXd::Zero(dim, dim);
  for (int c = 0; c < num_classes; ++c) {
    for (int i : members[c]) {
      Eigen::RowVectorXd diff = X.row(i) - means.row(c);
      pooled.noalias() += diff.transpose() * diff;
    }
  }
  pooled /= static_cast<double>(n);
  // Force exact symmetry; accumulated outer products drift at the last ulp.
  pooled = ((pooled + pooled.transpose()) * 0.5).eval();

  // Shrinkage scale tr/d; a corpus of exact per-class duplicates has zero
  // pooled scatter, where the fallback unit scale keeps the target PD.
  double scale = pooled.trace() / static_cast<double>(dim);
  if (scale <= 0.0) scale = 1.0;
  Eigen::MatrixXd sigma =
      pooled + lambda * scale * Eigen::MatrixXd::Identity(dim, dim);

  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error(
        "FitGb: covariance indefinite after shrinkage; increase lambda");
  }
  GbModel model;
  model.means = means;
  model.covariance = sigma;
  model.precision = llt.solve(Eigen::MatrixXd::Identity(dim, dim));
  model.lambda = lambda;
  return model;
}

Eigen::VectorXd GbLoglik(const GbModel& model, const Eigen::VectorXd& w) {
  if (w.size() != model.dim()) {
    throw std::invalid_argument("GbLoglik: dimension mismatch");
  }
  Eigen::VectorXd pw = model.precision * w;
  double quad = -0.5 * w.dot(pw);
  Eigen::VectorXd scores(model.num_classes());
  for (int c = 0; c < model.num_classes(); ++c) {
    Eigen::VectorXd m = model.means.row(c).transpose();
    scores[c] = quad + m.dot(pw) - 0.5 * m.dot(model.precision * m);
  }
  return scores;
}

int GbPredict(const GbModel& model, const Eigen::VectorXd& w) {
  Eigen::VectorXd scores = GbLoglik(model, w);
  int best = 0;
  for (int c = 1; c < scores.size(); ++c) {
    if (scores[c] > scores[best]) best = c;
  }
  return best;
}

std::string SerializeGbModel(const GbModel& model) {
  std::ostringstream out;
  out << "ADI_GB_MODEL v1\n";
  out << "lambda " << FormatDouble(model.lambda) << "\n";
  WriteMatrix(out, "means", model.means);
  WriteMatrix(out, "covariance", model.covariance);
  return out.str();
}

GbModel DeserializeGbModel(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "ADI_GB_MODEL v1") {
    throw std::runtime_error("bad GB model header");
  }
  std::string tag;
  double lambda = 0.0;
  if (!(in >> tag >> lambda) || tag != "lambda") {
    throw std::runtime_error("bad GB lambda line");
  }
  Eigen::MatrixXd means = ReadMatrix(in, "means");
  Eigen::MatrixXd cov = ReadMatrix(in, "covariance");
  return MakeGbModel(means, cov, lambda);
}

void SaveGbModel(const GbModel& model, const std::string& path) {
  WriteFileString(path, SerializeGbModel(model));
}

GbModel LoadGbModel(const std::string& path) {
  return DeserializeGbModel(ReadFileString(path));
}

}  // namespace adi

// adi/lda.cc

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

#include "adi/lda.h"

#include <Eigen/Eigenvalues>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "adi/common.h"
#include "adi/matrix-io.h"

namespace adi {

namespace {

struct Scatter {
  Eigen::MatrixXd sw;           // within-class, normalized by N
  Eigen::MatrixXd sb;           // between-class, normalized by N
  Eigen::MatrixXd class_means;  // K x D
};

Scatter ComputeScatter(const Eigen::MatrixXd& X, const std::vector<int>& y,
                       int num_classes) {
  const int n = static_cast<int>(X.rows());
  const int dim = static_cast<int>(X.cols());
  if (n != static_cast<int>(y.size())) {
    throw std::invalid_argument("FitLda: sample/label count mismatch");
  }
  if (num_classes < 2) throw std::invalid_argument("FitLda: need >= 2 classes");

  std::vector<int> counts(num_classes, 0);
  Scatter s;
  s.class_means = Eigen::MatrixXd::Zero(num_classes, dim);
  for (int i = 0; i < n; ++i) {
    if (y[i] < 0 || y[i] >= num_classes) {
      throw std::invalid_argument("FitLda: label out of range");
    }
    counts[y[i]]++;
    s.class_means.row(y[i]) += X.row(i);
  }
  for (int c = 0; c < num_classes; ++c) {
    if (counts[c] < 2) {
      throw std::invalid_argument("FitLda: every class needs >= 2 samples");
    }
    s.class_means.row(c) /= static_cast<double>(counts[c]);
  }

  Eigen::RowVectorXd global = Eigen::RowVectorXd::Zero(dim);
  for (int i = 0; i < n; ++i) global += X.row(i);
  global /= static_cast<double>(n);

  s.sw = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < n; ++i) {
    Eigen::RowVectorXd diff = X.row(i) - s.class_means.row(y[i]);
    s.sw.noalias() += diff.transpose() * diff;
  }
  s.sw /= static_cast<double>(n);

  s.sb = Eigen::MatrixXd::Zero(dim, dim);
  for (int c = 0; c < num_classes; ++c) {
    Eigen::RowVectorXd diff = s.class_means.row(c) - global;
    s.sb.noalias() += static_cast<double>(counts[c]) * diff.transpose() * diff;
  }
  s.sb /= static_cast<double>(n);
  return s;
}

// First component whose magnitude is non-negligible decides the sign.
void FixSign(Eigen::Ref<Eigen::VectorXd> v) {
  double scale = v.cwiseAbs().maxCoeff();
  if (scale <= 0.0) return;
  for (int i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 1e-12 * scale) {
      if (v[i] < 0.0) v = -v;
      return;
    }
  }
}

double ConditionOf(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  double lo = es.eigenvalues().minCoeff();
  double hi = es.eigenvalues().maxCoeff();
  if (lo <= 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

}  // namespace

double DefaultLdaShrinkage(const Eigen::MatrixXd& X, const std::vector<int>& y,
                           int num_classes) {
  Scatter s = ComputeScatter(X, y, num_classes);
  return 1e-4 * s.sw.trace() / static_cast<double>(X.cols());
}

LdaModel FitLda(const Eigen::MatrixXd& X, const std::vector<int>& y,
                int num_classes, int d, double gamma) {
  const int dim = static_cast<int>(X.cols());
  if (d < 1 || d > std::min(num_classes - 1, dim)) {
    throw std::invalid_argument("FitLda: d must satisfy 1 <= d <= min(K-1, D)");
  }
  if (gamma < 0.0) throw std::invalid_argument("FitLda: gamma must be >= 0");

  Scatter s = ComputeScatter(X, y, num_classes);
  Eigen::MatrixXd sw_reg =
      s.sw + gamma * Eigen::MatrixXd::Identity(dim, dim);

  // The generalized solver Cholesky-factorizes S_w + gamma I; reject
  // non-PD regularized scatter up front with an actionable message.
  Eigen::LLT<Eigen::MatrixXd> llt(sw_reg);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error(
        "FitLda: within-class scatter is singular; refit with a positive "
        "shrinkage gamma");
  }

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(s.sb, sw_reg);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("FitLda: generalized eigensolver failed");
  }

  LdaModel model;
  model.gamma = gamma;
  model.projection.resize(dim, d);
  model.eigenvalues.resize(d);
  // Eigen returns ascending eigenvalues; take the top d, largest first.
  for (int j = 0; j < d; ++j) {
    int src = dim - 1 - j;
    model.projection.col(j) = es.eigenvectors().col(src);
    model.eigenvalues[j] = es.eigenvalues()[src];
    FixSign(model.projection.col(j));
  }
  model.class_means = s.class_means;
  model.sw_condition = ConditionOf(sw_reg);
  model.sb_condition = ConditionOf(s.sb);
  return model;
}

Eigen::VectorXd LdaProject(const LdaModel& model, const Eigen::VectorXd& x) {
  if (x.size() != model.projection.rows()) {
    throw std::invalid_argument("LdaProject: dimension mismatch");
  }
  return model.projection.transpose() * x;
}

Eigen::MatrixXd LdaProjectRows(const LdaModel& model, const Eigen::MatrixXd& X) {
  if (X.cols() != model.projection.rows()) {
    throw std::invalid_argument("LdaProjectRows: dimension mismatch");
  }
  return X * model.projection;
}

std::string SerializeLdaModel(const LdaModel& model) {
  std::ostringstream out;
  out << "ADI_LDA_MODEL v1\n";
  out << "gamma " << FormatDouble(model.gamma) << "\n";
  WriteMatrix(out, "projection", model.projection);
  WriteMatrix(out, "class_means", model.class_means);
  WriteVector(out, "eigenvalues", model.eigenvalues);
  return out.str();
}

LdaModel DeserializeLdaModel(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "ADI_LDA_MODEL v1") {
    throw std::runtime_error("bad LDA model header");
  }
  std::string tag;
  LdaModel model;
  if (!(in >> tag >> model.gamma) || tag != "gamma") {
    throw std::runtime_error("bad LDA gamma line");
  }
  model.projection = ReadMatrix(in, "projection");
  model.class_means = ReadMatrix(in, "class_means");
  model.eigenvalues = ReadVector(in, "eigenvalues");
  return model;
}

void SaveLdaModel(const LdaModel& model, const std::string& path) {
  WriteFileString(path, SerializeLdaModel(model));
}

LdaModel LoadLdaModel(const std::string& path) {
  return DeserializeLdaModel(ReadFileString(path));
}

}  // namespace adi

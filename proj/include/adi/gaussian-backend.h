// adi/gaussian-backend.h

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

#ifndef ADI_GAUSSIAN_BACKEND_H_
#define ADI_GAUSSIAN_BACKEND_H_

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace adi {

// Shared-covariance Gaussian classifier. Class scores are
//   -0.5 w' P w + w' P m_d - 0.5 m_d' P m_d
// with P the cached precision of the shared covariance; the class-
// independent constant is fixed to 0 since it cancels at argmax.
struct GbModel {
  Eigen::MatrixXd means;       // K x d
  Eigen::MatrixXd covariance;  // d x d, symmetric positive definite
  Eigen::MatrixXd precision;   // cached inverse
  double lambda = 0.0;         // shrinkage used at fit time

  int num_classes() const { return static_cast<int>(means.rows()); }
  int dim() const { return static_cast<int>(means.cols()); }
};

// Builds a model from explicit parameters (deserialization, oracles).
// Validates symmetry and positive definiteness, then caches the precision.
GbModel MakeGbModel(const Eigen::MatrixXd& means,
                    const Eigen::MatrixXd& covariance, double lambda = 0.0);

// Class means plus pooled ML within-class covariance (divide by N), shrunk
// by lambda * (trace/d) * I. Rows of X are samples; every class needs
// >= 2 samples. Sample order does not affect the result at bit level.
GbModel FitGb(const Eigen::MatrixXd& X, const std::vector<int>& y,
              int num_classes, double lambda);

// K-vector of log p(w|d) up to the shared constant.
Eigen::VectorXd GbLoglik(const GbModel& model, const Eigen::VectorXd& w);

// Argmax with lowest-index tie-break.
int GbPredict(const GbModel& model, const Eigen::VectorXd& w);

void SaveGbModel(const GbModel& model, const std::string& path);
GbModel LoadGbModel(const std::string& path);
std::string SerializeGbModel(const GbModel& model);
GbModel DeserializeGbModel(const std::string& text);

}  // namespace adi

#endif  // ADI_GAUSSIAN_BACKEND_H_

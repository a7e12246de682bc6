// adi/lda.h

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

#ifndef ADI_LDA_H_
#define ADI_LDA_H_

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace adi {

// Linear discriminant projection fitted from the generalized eigenproblem
// S_b v = lambda (S_w + gamma I) v. Columns are ordered by decreasing
// eigenvalue with the sign fixed so each column's first nonzero component
// is positive.
struct LdaModel {
  Eigen::MatrixXd projection;   // D x d
  Eigen::MatrixXd class_means;  // K x D, classes seen at fit time
  Eigen::VectorXd eigenvalues;  // d, nonincreasing
  double gamma = 0.0;
  // Condition diagnostics of the scatter matrices at fit time.
  double sw_condition = 0.0;
  double sb_condition = 0.0;

  int input_dim() const { return static_cast<int>(projection.rows()); }
  int output_dim() const { return static_cast<int>(projection.cols()); }
};

// Default shrinkage: 1e-4 * trace(S_w) / D.
double DefaultLdaShrinkage(const Eigen::MatrixXd& X, const std::vector<int>& y,
                           int num_classes);

// X: N x D rows = samples. Requires >= 2 classes with >= 2 samples each and
// d <= min(K - 1, D). With gamma = 0 and singular S_w, throws with a hint
// to use positive shrinkage.
LdaModel FitLda(const Eigen::MatrixXd& X, const std::vector<int>& y,
                int num_classes, int d, double gamma);

Eigen::VectorXd LdaProject(const LdaModel& model, const Eigen::VectorXd& x);
Eigen::MatrixXd LdaProjectRows(const LdaModel& model, const Eigen::MatrixXd& X);

void SaveLdaModel(const LdaModel& model, const std::string& path);
LdaModel LoadLdaModel(const std::string& path);
std::string SerializeLdaModel(const LdaModel& model);
LdaModel DeserializeLdaModel(const std::string& text);

}  // namespace adi

#endif  // ADI_LDA_H_

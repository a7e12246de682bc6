// adi/matrix-io.h

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

#ifndef ADI_MATRIX_IO_H_
#define ADI_MATRIX_IO_H_

#include <Eigen/Dense>
#include <istream>
#include <ostream>

namespace adi {

// Text matrix block:
//   <tag> <rows> <cols>
//   r0c0 r0c1 ...
// Values are written in shortest round-trip decimal form.
void WriteMatrix(std::ostream& out, const char* tag, const Eigen::MatrixXd& m);
Eigen::MatrixXd ReadMatrix(std::istream& in, const char* tag);

void WriteVector(std::ostream& out, const char* tag, const Eigen::VectorXd& v);
Eigen::VectorXd ReadVector(std::istream& in, const char* tag);

}  // namespace adi

#endif  // ADI_MATRIX_IO_H_

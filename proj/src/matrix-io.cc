// adi/matrix-io.cc

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

#include "adi/matrix-io.h"

#include <stdexcept>
#include <string>

#include "adi/common.h"

namespace adi {

void WriteMatrix(std::ostream& out, const char* tag, const Eigen::MatrixXd& m) {
  out << tag << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ' ';
      out << FormatDouble(m(r, c));
    }
    out << '\n';
  }
}

Eigen::MatrixXd ReadMatrix(std::istream& in, const char* tag) {
  std::string got;
  Eigen::Index rows = 0, cols = 0;
  if (!(in >> got >> rows >> cols) || got != tag || rows < 0 || cols < 0) {
    throw std::runtime_error(std::string("expected matrix block '") + tag + "'");
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      std::string tok;
      if (!(in >> tok) || !ParseDouble(tok, &m(r, c))) {
        throw std::runtime_error(std::string("bad value in matrix '") + tag + "'");
      }
    }
  }
  return m;
}

void WriteVector(std::ostream& out, const char* tag, const Eigen::VectorXd& v) {
  out << tag << ' ' << v.size() << '\n';
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out << ' ';
    out << FormatDouble(v[i]);
  }
  out << '\n';
}

Eigen::VectorXd ReadVector(std::istream& in, const char* tag) {
  std::string got;
  Eigen::Index n = 0;
  if (!(in >> got >> n) || got != tag || n < 0) {
    throw std::runtime_error(std::string("expected vector block '") + tag + "'");
  }
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    std::string tok;
    if (!(in >> tok) || !ParseDouble(tok, &v[i])) {
      throw std::runtime_error(std::string("bad value in vector '") + tag + "'");
    }
  }
  return v;
}

}  // namespace adi

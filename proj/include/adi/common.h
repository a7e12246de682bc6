// adi/common.h

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

#ifndef ADI_COMMON_H_
#define ADI_COMMON_H_

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace adi {

// Seeded random stream. All sampling goes through this class rather than
// <random> distributions so that sampled sequences do not depend on the
// standard library implementation; frozen test values stay valid across
// toolchains.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t RandU64() { return gen_(); }

  // Uniform on [0, 1).
  double RandUniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer on [0, n), n > 0.
  int RandInt(int n);

  // Standard normal via Box-Muller; one spare is cached.
  double RandGauss();

  // Fisher-Yates.
  template <typename T>
  void Shuffle(std::vector<T>* v) {
    for (size_t i = v->size(); i > 1; --i) {
      size_t j = static_cast<size_t>(RandInt(static_cast<int>(i)));
      std::swap((*v)[i - 1], (*v)[j]);
    }
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Decorrelated child seed for an independent stream.
uint64_t DeriveSeed(uint64_t base, uint64_t stream);

// Shortest decimal form that parses back to the identical double.
std::string FormatDouble(double v);

// Strict parsers: the whole token must be consumed.
bool ParseDouble(std::string_view s, double* out);
bool ParseInt(std::string_view s, int64_t* out);

std::vector<std::string> SplitWhitespace(std::string_view s);
std::vector<std::string> SplitChar(std::string_view s, char sep);

// Reads a whole text file; throws std::runtime_error if it cannot be opened.
std::vector<std::string> ReadLines(const std::string& path);
std::string ReadFileString(const std::string& path);
void WriteFileString(const std::string& path, const std::string& content);

// FNV-1a over bytes; used for config hashes in run manifests.
uint64_t Fnv1a64(std::string_view s);

}  // namespace adi

#endif  // ADI_COMMON_H_

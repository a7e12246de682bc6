// tests/testing-util.h

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

#ifndef ADI_TESTS_TESTING_UTIL_H_
#define ADI_TESTS_TESTING_UTIL_H_

#include <filesystem>
#include <string>

namespace adi::testing {

// Fresh scratch directory under the build tree, wiped per construction.
class TempDir {
 public:
  explicit TempDir(const std::string& name) {
    path_ = std::filesystem::path("test-tmp") / name;
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }

  std::string Sub(const std::string& name) const {
    return (path_ / name).string();
  }
  std::string str() const { return path_.string(); }

 private:
  std::filesystem::path path_;
};

inline std::string DataFile(const std::string& name) {
  return std::string(ADI_DATA_DIR) + "/" + name;
}

}  // namespace adi::testing

#endif  // ADI_TESTS_TESTING_UTIL_H_

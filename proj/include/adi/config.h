// adi/config.h

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

#ifndef ADI_CONFIG_H_
#define ADI_CONFIG_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace adi {

// Hierarchical dotted-key configuration:
//   # comment
//   seed = 42
//   fusion.l2 = 1e-3
//   include common.conf
// Includes resolve relative to the including file. Environment variables
// with the ADI_ prefix override file values at load time; the key mapping
// is upper-case with '.' spelled as '__' (ADI_FUSION__L2 -> fusion.l2).
class Config {
 public:
  Config() = default;

  static Config FromFile(const std::string& path);
  static Config FromString(const std::string& text,
                           const std::string& base_dir = ".");

  bool Has(const std::string& key) const { return values_.count(key) > 0; }

  // Throwing accessors for required keys.
  std::string GetString(const std::string& key) const;
  int64_t GetInt(const std::string& key) const;
  double GetDouble(const std::string& key) const;

  // Defaulted accessors.
  std::string GetString(const std::string& key, const std::string& dflt) const;
  int64_t GetInt(const std::string& key, int64_t dflt) const;
  double GetDouble(const std::string& key, double dflt) const;
  bool GetBool(const std::string& key, bool dflt) const;
  std::vector<int> GetIntList(const std::string& key,
                              const std::vector<int>& dflt) const;
  std::vector<std::string> GetStringList(const std::string& key) const;

  void Set(const std::string& key, const std::string& value);

  const std::map<std::string, std::string>& values() const { return values_; }

  // Sorted "key = value" lines; the text whose hash goes into run manifests.
  std::string CanonicalText() const;
  uint64_t Hash() const;

  // Keys matching prefix "group.N." for consecutive N starting at 1.
  std::vector<std::string> GroupIndices(const std::string& group) const;

 private:
  void ApplyEnvOverrides();

  std::map<std::string, std::string> values_;
};

}  // namespace adi

#endif  // ADI_CONFIG_H_

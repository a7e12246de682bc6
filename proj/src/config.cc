// adi/config.cc

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

#include "adi/config.h"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <sstream>
#include <stdexcept>

#include "adi/common.h"

extern char** environ;

namespace adi {

namespace {

std::string Trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

void ParseInto(const std::string& text, const std::string& base_dir,
               std::map<std::string, std::string>* values, int depth) {
  if (depth > 8) throw std::runtime_error("config: include depth exceeded");
  std::istringstream in(text);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = Trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.rfind("include ", 0) == 0) {
      std::filesystem::path inc(Trim(t.substr(8)));
      if (inc.is_relative()) inc = std::filesystem::path(base_dir) / inc;
      ParseInto(ReadFileString(inc.string()), inc.parent_path().string(), values,
                depth + 1);
      continue;
    }
    auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("config line " + std::to_string(line_no) +
                               ": expected key = value, got '" + t + "'");
    }
    std::string key = Trim(t.substr(0, eq));
    std::string value = Trim(t.substr(eq + 1));
    if (key.empty()) {
      throw std::runtime_error("config line " + std::to_string(line_no) +
                               ": empty key");
    }
    (*values)[key] = value;  // later assignments win
  }
}

std::string EnvKeyToConfigKey(const std::string& env) {
  // ADI_FUSION__L2 -> fusion.l2
  std::string key;
  for (size_t i = 0; i < env.size(); ++i) {
    if (env[i] == '_' && i + 1 < env.size() && env[i + 1] == '_') {
      key += '.';
      ++i;
    } else {
      key += static_cast<char>(std::tolower(static_cast<unsigned char>(env[i])));
    }
  }
  return key;
}

}  // namespace

Config Config::FromFile(const std::string& path) {
  Config c;
  std::filesystem::path p(path);
  ParseInto(ReadFileString(path), p.parent_path().string(), &c.values_, 0);
  c.ApplyEnvOverrides();
  return c;
}

Config Config::FromString(const std::string& text, const std::string& base_dir) {
  Config c;
  ParseInto(text, base_dir, &c.values_, 0);
  c.ApplyEnvOverrides();
  return c;
}

void Config::ApplyEnvOverrides() {
  for (char** env = environ; env && *env; ++env) {
    std::string entry(*env);
    if (entry.rfind("ADI_", 0) != 0) continue;
    auto eq = entry.find('=');
    if (eq == std::string::npos) continue;
    std::string key = EnvKeyToConfigKey(entry.substr(4, eq - 4));
    values_[key] = entry.substr(eq + 1);
  }
}

std::string Config::GetString(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) {
    throw std::runtime_error("config: missing required key '" + key + "'");
  }
  return it->second;
}

int64_t Config::GetInt(const std::string& key) const {
  int64_t v = 0;
  if (!ParseInt(GetString(key), &v)) {
    throw std::runtime_error("config: key '" + key + "' is not an integer");
  }
  return v;
}

double Config::GetDouble(const std::string& key) const {
  double v = 0.0;
  if (!ParseDouble(GetString(key), &v)) {
    throw std::runtime_error("config: key '" + key + "' is not a number");
  }
  return v;
}

std::string Config::GetString(const std::string& key,
                              const std::string& dflt) const {
  auto it = values_.find(key);
  return it == values_.end() ? dflt : it->second;
}

int64_t Config::GetInt(const std::string& key, int64_t dflt) const {
  return Has(key) ? GetInt(key) : dflt;
}

double Config::GetDouble(const std::string& key, double dflt) const {
  return Has(key) ? GetDouble(key) : dflt;
}

bool Config::GetBool(const std::string& key, bool dflt) const {
  if (!Has(key)) return dflt;
  std::string v = GetString(key);
  std::transform(v.begin(), v.end(), v.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::runtime_error("config: key '" + key + "' is not a boolean");
}

std::vector<int> Config::GetIntList(const std::string& key,
                                    const std::vector<int>& dflt) const {
  if (!Has(key)) return dflt;
  std::vector<int> out;
  for (const auto& part : SplitChar(GetString(key), ',')) {
    int64_t v = 0;
    std::string t = Trim(part);
    if (t.empty()) continue;
    if (!ParseInt(t, &v)) {
      throw std::runtime_error("config: key '" + key + "' has non-integer '" +
                               t + "'");
    }
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::vector<std::string> Config::GetStringList(const std::string& key) const {
  std::vector<std::string> out;
  if (!Has(key)) return out;
  for (const auto& part : SplitChar(GetString(key), ',')) {
    std::string t = Trim(part);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

void Config::Set(const std::string& key, const std::string& value) {
  values_[key] = value;
}

std::string Config::CanonicalText() const {
  std::ostringstream out;
  for (const auto& [k, v] : values_) out << k << " = " << v << '\n';
  return out.str();
}

uint64_t Config::Hash() const { return Fnv1a64(CanonicalText()); }

std::vector<std::string> Config::GroupIndices(const std::string& group) const {
  std::vector<std::string> out;
  for (int i = 1;; ++i) {
    std::string prefix = group + "." + std::to_string(i) + ".";
    bool found = false;
    for (const auto& [k, v] : values_) {
      (void)v;
      if (k.rfind(prefix, 0) == 0) {
        found = true;
        break;
      }
    }
    if (!found) break;
    out.push_back(std::to_string(i));
  }
  return out;
}

}  // namespace adi

// tools/adi.cc

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

// Dialect-identification experiment harness. Every subcommand reads one
// config file; a few common keys can be overridden from the command line.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "adi/config.h"
#include "adi/pipeline.h"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::string avg;
  long long seed = -1;
  double min_acc = -1.0;
};

void AddCommon(CLI::App* cmd, CommonFlags* flags) {
  cmd->add_option("--config", flags->config_path, "config file")->required();
  cmd->add_option("--seed", flags->seed, "override the config seed");
  cmd->add_option("--out-dir", flags->out_dir, "override out_dir");
  cmd->add_option("--avg", flags->avg, "metric averaging: macro|micro");
  cmd->add_option("--min-acc", flags->min_acc,
                  "nonzero exit when accuracy falls below this");
}

adi::Config BuildConfig(const CommonFlags& flags) {
  adi::Config config = adi::Config::FromFile(flags.config_path);
  if (flags.seed >= 0) config.Set("seed", std::to_string(flags.seed));
  if (!flags.out_dir.empty()) config.Set("out_dir", flags.out_dir);
  if (!flags.avg.empty()) config.Set("avg", flags.avg);
  if (flags.min_acc >= 0.0) {
    config.Set("min_acc", std::to_string(flags.min_acc));
  }
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adi: dialect identification back-end toolkit"};
  app.require_subcommand(1);

  const char* commands[] = {"synth",        "train-text",   "train-gb",
                            "train-gan",    "ubnf-train",   "ubnf-extract",
                            "score",        "fuse-train",   "fuse-sweep",
                            "evaluate",     "project-dump", "pipeline",
                            "validate-manifest"};
  const char* descriptions[] = {
      "generate a synthetic corpus",
      "train the text SVM system",
      "train the Gaussian back-end system",
      "train the GAN back-end system",
      "train the UBNF GMM and bottleneck network",
      "extract UBNF features and pooled embeddings",
      "score a dataset with a trained system",
      "train the linear score fusion",
      "evaluate every system subset",
      "compute ACC/RCL/PRC from score files",
      "dump a 2-dim LDA projection for plotting",
      "run the full experiment protocol",
      "validate corpus statistics against a manifest"};

  CommonFlags flags;
  for (size_t i = 0; i < std::size(commands); ++i) {
    AddCommon(app.add_subcommand(commands[i], descriptions[i]), &flags);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    adi::Config config = BuildConfig(flags);
    return adi::RunCommand(app.get_subcommands().front()->get_name(), config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

// adi/pipeline.h

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

#ifndef ADI_PIPELINE_H_
#define ADI_PIPELINE_H_

#include <optional>
#include <string>
#include <vector>

#include "adi/config.h"
#include "adi/corpus.h"
#include "adi/fusion.h"
#include "adi/gan-backend.h"
#include "adi/gaussian-backend.h"
#include "adi/lda.h"
#include "adi/linear-svm.h"
#include "adi/text-features.h"

namespace adi {

inline constexpr const char* kToolkitVersion = "0.1.0";

// One classifier in the experiment roster.
struct SystemSpec {
  std::string id;
  std::string feature;  // embeddings | transcripts
  std::string backend;  // gb | gan | svm
  int lda_dim = 0;      // gb: 0 disables the projection
  int combo = 0;        // svm pre-processing combination
  FeatureScheme scheme = FeatureScheme::kTf;  // svm
};

std::vector<SystemSpec> ParseSystems(const Config& config);

struct TextSystemData {
  PreprocCombo combo{0};
  FeatureScheme scheme = FeatureScheme::kTf;
  StopList stoplist;
  std::vector<std::string> suffixes;
  Vocab vocab;
  SvmModel svm;
};

struct GbSystemData {
  std::optional<LdaModel> lda;
  GbModel gb;
};

struct TrainedSystem {
  SystemSpec spec;
  std::optional<TextSystemData> text;
  std::optional<GbSystemData> gb;
  std::optional<GanModel> gan;

  // Scores every utterance of the dataset the system's modality covers.
  ScoreSet Score(const LabeledDataset& ds) const;
};

// Trains one system on the dataset per its spec and the config hyper-
// parameters. The unlabeled set is consumed by GAN back-ends only.
TrainedSystem TrainSystem(const SystemSpec& spec, const LabeledDataset& train,
                          const EmbeddingSet* unlabeled, const Config& config,
                          uint64_t seed, const std::string& log_dir = "");

void SaveSystem(const TrainedSystem& system, const std::string& path);
TrainedSystem LoadSystem(const std::string& path);

// Synthetic corpus per the synth.* keys for one split.
LabeledDataset SynthSplit(const Config& config, SplitTag tag, uint64_t seed);

// Loads data.<split>.* paths when present, otherwise generates the
// synthetic split.
LabeledDataset LoadSplit(const Config& config, SplitTag tag);

// ---- command entry points (exit status semantics: 0 = ok) ----
int CmdSynth(const Config& config);
int CmdTrainText(const Config& config);
int CmdTrainGb(const Config& config);
int CmdTrainGan(const Config& config);
int CmdUbnfTrain(const Config& config);
int CmdUbnfExtract(const Config& config);
int CmdScore(const Config& config);
int CmdFuseTrain(const Config& config);
int CmdFuseSweep(const Config& config);
int CmdEvaluate(const Config& config);
int CmdProjectDump(const Config& config);
int CmdPipeline(const Config& config);
int CmdValidateManifest(const Config& config);

int RunCommand(const std::string& command, const Config& config);

}  // namespace adi

#endif  // ADI_PIPELINE_H_

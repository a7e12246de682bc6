// adi/pipeline.cc

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

#include "adi/pipeline.h"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "adi/matrix-io.h"
#include "adi/ubnf.h"

namespace adi {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string OutDir(const Config& config) {
  std::string dir = config.GetString("out_dir", "runs/adi");
  fs::create_directories(dir);
  return dir;
}

uint64_t MasterSeed(const Config& config) {
  return static_cast<uint64_t>(config.GetInt("seed", 42));
}

void WriteRunManifest(const Config& config, const std::string& command,
                      ordered_json extra) {
  ordered_json j;
  j["command"] = command;
  j["toolkit_version"] = kToolkitVersion;
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(config.Hash()));
  j["config_hash"] = hash;
  j["config"] = ordered_json::object();
  for (const auto& [k, v] : config.values()) j["config"][k] = v;
  for (auto& [k, v] : extra.items()) j[k] = v;
  WriteFileString(OutDir(config) + "/run.json", j.dump(2) + "\n");
}

Eigen::VectorXd ToEigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
}

// Design matrix and labels in sorted-utterance order.
void EmbeddingDesign(const LabeledDataset& ds, Eigen::MatrixXd* X,
                     std::vector<int>* y) {
  if (!ds.embeddings || ds.embeddings->empty()) {
    throw std::runtime_error("dataset has no embeddings");
  }
  std::vector<const EmbeddingRecord*> recs;
  std::vector<int> labels;
  for (const auto& [utt, d] : ds.labels) {
    const auto* rec = ds.embeddings->Find(utt);
    if (!rec) continue;
    recs.push_back(rec);
    labels.push_back(static_cast<int>(d));
  }
  if (recs.empty()) throw std::runtime_error("no labeled embeddings");
  X->resize(recs.size(), ds.embeddings->dim());
  for (size_t i = 0; i < recs.size(); ++i) {
    X->row(i) = ToEigen(recs[i]->vector).transpose();
  }
  *y = std::move(labels);
}

struct TextDesign {
  std::vector<std::vector<std::string>> docs;  // preprocessed
  std::vector<int> y;
};

TextDesign BuildTextDesign(const LabeledDataset& ds, const TextPipeline& pipe) {
  if (!ds.transcripts || ds.transcripts->empty()) {
    throw std::runtime_error("dataset has no transcripts");
  }
  TextDesign design;
  for (const auto& [utt, d] : ds.labels) {
    const auto* rec = ds.transcripts->Find(utt);
    if (!rec) continue;
    design.docs.push_back(pipe.Preprocess(rec->tokens));
    design.y.push_back(static_cast<int>(d));
  }
  if (design.docs.empty()) throw std::runtime_error("no labeled transcripts");
  return design;
}

std::map<std::string, Dialect> ArgmaxPredictions(const ScoreSet& scores) {
  std::map<std::string, Dialect> preds;
  for (const auto& [utt, row] : scores.rows) {
    int best = 0;
    for (size_t k = 1; k < row.size(); ++k) {
      if (row[k] > row[best]) best = static_cast<int>(k);
    }
    preds.emplace(utt, static_cast<Dialect>(best));
  }
  return preds;
}

Metrics MetricsAgainst(const std::map<std::string, Dialect>& preds,
                       const LabelMap& labels, Averaging avg = Averaging::kMacro) {
  std::vector<Dialect> p, l;
  for (const auto& [utt, d] : labels) {
    auto it = preds.find(utt);
    if (it == preds.end()) continue;
    p.push_back(it->second);
    l.push_back(d);
  }
  return ComputeMetrics(Confusion(p, l), avg);
}

ordered_json MetricsJson(const Metrics& m) {
  ordered_json j;
  j["acc"] = m.acc;
  j["rcl"] = m.rcl;
  j["prc"] = m.prc;
  return j;
}

}  // namespace

std::vector<SystemSpec> ParseSystems(const Config& config) {
  std::vector<SystemSpec> specs;
  for (const auto& idx : config.GroupIndices("system")) {
    std::string p = "system." + idx + ".";
    SystemSpec spec;
    spec.id = config.GetString(p + "id", "sys" + idx);
    spec.feature = config.GetString(p + "feature", "embeddings");
    spec.backend = config.GetString(p + "backend");
    spec.lda_dim = static_cast<int>(config.GetInt(p + "lda_dim", 0));
    spec.combo = static_cast<int>(config.GetInt(p + "combo", 0));
    spec.scheme =
        ParseFeatureScheme(config.GetString(p + "scheme", "TF"));
    if (spec.feature != "embeddings" && spec.feature != "transcripts") {
      throw std::runtime_error("system " + spec.id + ": unknown feature '" +
                               spec.feature + "'");
    }
    if (spec.backend != "gb" && spec.backend != "gan" && spec.backend != "svm") {
      throw std::runtime_error("system " + spec.id + ": unknown backend '" +
                               spec.backend + "'");
    }
    for (const auto& other : specs) {
      if (other.id == spec.id) {
        throw std::runtime_error("duplicate system id: " + spec.id);
      }
    }
    specs.push_back(std::move(spec));
  }
  if (specs.empty()) throw std::runtime_error("config defines no systems");
  return specs;
}

ScoreSet TrainedSystem::Score(const LabeledDataset& ds) const {
  ScoreSet out;
  out.system_id = spec.id;
  if (gb) {
    out.kind = "log-likelihood";
    if (!ds.embeddings) throw std::runtime_error("scoring needs embeddings");
    for (const auto& rec : ds.embeddings->records()) {
      Eigen::VectorXd x = ToEigen(rec.vector);
      if (gb->lda) x = LdaProject(*gb->lda, x);
      Eigen::VectorXd s = GbLoglik(gb->gb, x);
      out.Add(rec.utt_id, std::vector<double>(s.data(), s.data() + s.size()));
    }
  } else if (gan) {
    out.kind = "log-probability";
    if (!ds.embeddings) throw std::runtime_error("scoring needs embeddings");
    for (const auto& rec : ds.embeddings->records()) {
      Eigen::VectorXd s = GanScores(*gan, rec);
      out.Add(rec.utt_id, std::vector<double>(s.data(), s.data() + s.size()));
    }
  } else if (text) {
    out.kind = "decision-value";
    if (!ds.transcripts) throw std::runtime_error("scoring needs transcripts");
    TextPipeline pipe(text->combo, text->stoplist, Stemmer(text->suffixes));
    for (const auto& rec : ds.transcripts->records()) {
      SparseVector v = Vectorize(pipe.Preprocess(rec.tokens), text->vocab,
                                 text->scheme);
      out.Add(rec.utt_id, SvmScores(text->svm, v));
    }
  } else {
    throw std::runtime_error("system " + spec.id + " is untrained");
  }
  return out;
}

TrainedSystem TrainSystem(const SystemSpec& spec, const LabeledDataset& train,
                          const EmbeddingSet* unlabeled, const Config& config,
                          uint64_t seed, const std::string& log_dir) {
  TrainedSystem sys;
  sys.spec = spec;

  if (spec.backend == "gb") {
    Eigen::MatrixXd X;
    std::vector<int> y;
    EmbeddingDesign(train, &X, &y);
    GbSystemData data;
    if (spec.lda_dim > 0) {
      double gamma = config.GetDouble("lda.gamma", -1.0);
      if (gamma < 0.0) gamma = DefaultLdaShrinkage(X, y, kNumDialects);
      data.lda = FitLda(X, y, kNumDialects, spec.lda_dim, gamma);
      X = LdaProjectRows(*data.lda, X);
    }
    data.gb = FitGb(X, y, kNumDialects, config.GetDouble("gb.lambda", 1e-3));
    sys.gb = std::move(data);
  } else if (spec.backend == "gan") {
    if (!train.embeddings) throw std::runtime_error("gan needs embeddings");
    GanConfig gc;
    gc.noise_dim = static_cast<int>(config.GetInt("gan.noise_dim", 100));
    gc.gen_hidden = config.GetIntList("gan.gen_hidden", {500, 500});
    gc.disc_hidden = config.GetIntList("gan.disc_hidden", {1024, 1024, 1024});
    gc.dropout = config.GetDouble("gan.dropout", 0.5);
    gc.epochs = static_cast<int>(config.GetInt("gan.epochs", 40));
    gc.batch = static_cast<int>(config.GetInt("gan.batch", 100));
    gc.adam.lr = config.GetDouble("gan.lr", 2e-4);
    gc.adam.beta1 = config.GetDouble("gan.beta1", 0.5);
    gc.seed = seed;
    EmbeddingSet empty;
    GanTrainResult result = TrainGan(*train.embeddings, train.labels,
                                     unlabeled ? *unlabeled : empty, gc);
    if (!log_dir.empty()) {
      WriteFileString(log_dir + "/" + spec.id + ".train.tsv",
                      FormatGanLog(result.log));
    }
    sys.gan = std::move(result.model);
  } else if (spec.backend == "svm") {
    PreprocCombo combo = MakeCombo(spec.combo);
    StopList stoplist;
    std::vector<std::string> suffixes;
    if (config.Has("text.stopwords")) {
      stoplist = LoadStopList(config.GetString("text.stopwords"));
    }
    if (config.Has("text.suffixes")) {
      for (const auto& line : ReadLines(config.GetString("text.suffixes"))) {
        auto toks = SplitWhitespace(line);
        suffixes.insert(suffixes.end(), toks.begin(), toks.end());
      }
    }
    TextPipeline pipe(combo, stoplist, Stemmer(suffixes));
    TextDesign design = BuildTextDesign(train, pipe);
    TextSystemData data;
    data.combo = combo;
    data.scheme = spec.scheme;
    data.stoplist = std::move(stoplist);
    data.suffixes = std::move(suffixes);
    data.vocab = BuildVocab(design.docs, combo,
                            static_cast<int>(config.GetInt("text.min_df", 1)));
    std::vector<SparseVector> X;
    X.reserve(design.docs.size());
    for (const auto& doc : design.docs) {
      X.push_back(Vectorize(doc, data.vocab, spec.scheme));
    }
    SvmTrainOptions opts;
    opts.C = config.GetDouble("svm.C", 1.0);
    opts.tol = config.GetDouble("svm.tol", 1e-4);
    opts.max_iter = static_cast<int>(config.GetInt("svm.max_iter", 1000));
    opts.seed = seed;
    data.svm = TrainSvm(X, design.y, kNumDialects, data.vocab.size(), opts);
    sys.text = std::move(data);
  }
  return sys;
}

void SaveSystem(const TrainedSystem& system, const std::string& path) {
  std::ostringstream out;
  out << "ADI_SYSTEM v1\n";
  out << "id " << system.spec.id << "\n";
  out << "feature " << system.spec.feature << "\n";
  out << "backend " << system.spec.backend << "\n";
  if (system.gb) {
    out << "lda " << (system.gb->lda ? 1 : 0) << "\n";
    if (system.gb->lda) out << SerializeLdaModel(*system.gb->lda);
    out << SerializeGbModel(system.gb->gb);
  } else if (system.text) {
    out << "combo " << system.text->combo.combo_id << "\n";
    out << "scheme " << FeatureSchemeName(system.text->scheme) << "\n";
    out << "stoplist " << system.text->stoplist.size() << "\n";
    for (const auto& t : system.text->stoplist) out << t << "\n";
    out << "suffixes " << system.text->suffixes.size() << "\n";
    for (const auto& s : system.text->suffixes) out << s << "\n";
    const Vocab& v = system.text->vocab;
    out << "vocab " << v.size() << ' ' << v.num_docs << ' '
        << (v.bigram ? 1 : 0) << "\n";
    // Column order; features cannot contain tabs.
    std::vector<const std::string*> by_col(v.size());
    for (const auto& [feat, col] : v.index) by_col[col] = &feat;
    for (int32_t c = 0; c < v.size(); ++c) {
      out << *by_col[c] << '\t' << v.doc_freq[c] << "\n";
    }
    out << SerializeSvmModel(system.text->svm);
  } else if (system.gan) {
    // GAN block reuses the standalone model writer.
    out << "gan_file 1\n";
  } else {
    throw std::runtime_error("SaveSystem: untrained system");
  }
  WriteFileString(path, out.str());
  if (system.gan) SaveGanModel(*system.gan, path + ".gan");
}

TrainedSystem LoadSystem(const std::string& path) {
  std::istringstream in(ReadFileString(path));
  std::string line;
  if (!std::getline(in, line) || line != "ADI_SYSTEM v1") {
    throw std::runtime_error("bad system file header: " + path);
  }
  TrainedSystem sys;
  std::string tag;
  if (!(in >> tag >> sys.spec.id) || tag != "id") {
    throw std::runtime_error("bad system id line");
  }
  if (!(in >> tag >> sys.spec.feature) || tag != "feature") {
    throw std::runtime_error("bad system feature line");
  }
  if (!(in >> tag >> sys.spec.backend) || tag != "backend") {
    throw std::runtime_error("bad system backend line");
  }
  std::getline(in, line);  // finish the backend line

  if (sys.spec.backend == "gb") {
    int has_lda = 0;
    if (!(in >> tag >> has_lda) || tag != "lda") {
      throw std::runtime_error("bad system lda line");
    }
    std::getline(in, line);
    GbSystemData data;
    std::string rest((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    if (has_lda) {
      auto gb_pos = rest.find("ADI_GB_MODEL");
      if (gb_pos == std::string::npos) {
        throw std::runtime_error("system file missing GB block");
      }
      data.lda = DeserializeLdaModel(rest.substr(0, gb_pos));
      data.gb = DeserializeGbModel(rest.substr(gb_pos));
      sys.spec.lda_dim = data.lda->output_dim();
    } else {
      data.gb = DeserializeGbModel(rest);
    }
    sys.gb = std::move(data);
  } else if (sys.spec.backend == "svm") {
    TextSystemData data;
    int combo_id = 0;
    if (!(in >> tag >> combo_id) || tag != "combo") {
      throw std::runtime_error("bad system combo line");
    }
    data.combo = MakeCombo(combo_id);
    sys.spec.combo = combo_id;
    std::string scheme;
    if (!(in >> tag >> scheme) || tag != "scheme") {
      throw std::runtime_error("bad system scheme line");
    }
    data.scheme = ParseFeatureScheme(scheme);
    sys.spec.scheme = data.scheme;
    size_t n = 0;
    if (!(in >> tag >> n) || tag != "stoplist") {
      throw std::runtime_error("bad system stoplist line");
    }
    std::getline(in, line);
    for (size_t i = 0; i < n; ++i) {
      if (!std::getline(in, line)) throw std::runtime_error("truncated stoplist");
      data.stoplist.insert(line);
    }
    if (!(in >> tag >> n) || tag != "suffixes") {
      throw std::runtime_error("bad system suffixes line");
    }
    std::getline(in, line);
    for (size_t i = 0; i < n; ++i) {
      if (!std::getline(in, line)) throw std::runtime_error("truncated suffixes");
      data.suffixes.push_back(line);
    }
    int32_t vsize = 0;
    int bigram = 0;
    if (!(in >> tag >> vsize >> data.vocab.num_docs >> bigram) || tag != "vocab") {
      throw std::runtime_error("bad system vocab line");
    }
    data.vocab.bigram = bigram != 0;
    std::getline(in, line);
    for (int32_t c = 0; c < vsize; ++c) {
      if (!std::getline(in, line)) throw std::runtime_error("truncated vocab");
      auto tab = line.find('\t');
      int64_t df = 0;
      if (tab == std::string::npos ||
          !ParseInt(std::string_view(line).substr(tab + 1), &df)) {
        throw std::runtime_error("bad vocab row: " + line);
      }
      data.vocab.index.emplace(line.substr(0, tab), c);
      data.vocab.doc_freq.push_back(df);
    }
    std::string rest((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    data.svm = DeserializeSvmModel(rest);
    sys.text = std::move(data);
  } else if (sys.spec.backend == "gan") {
    sys.gan = LoadGanModel(path + ".gan");
  } else {
    throw std::runtime_error("unknown backend in system file: " +
                             sys.spec.backend);
  }
  return sys;
}

LabeledDataset SynthSplit(const Config& config, SplitTag tag, uint64_t seed) {
  SyntheticSpec spec;
  spec.dim = static_cast<int>(config.GetInt("synth.dim", 20));
  std::string tag_name = SplitTagName(tag);
  int per_class = static_cast<int>(
      config.GetInt("synth." + tag_name + "_per_class",
                    tag == SplitTag::kTrain ? 500 : (tag == SplitTag::kDev ? 150 : 200)));
  spec.counts.assign(kNumDialects, per_class);
  spec.separation = config.GetDouble("synth.separation", 4.0);
  spec.stddev.assign(kNumDialects, config.GetDouble("synth.stddev", 1.0));
  spec.duration_min_s = config.GetDouble("synth.duration_min", 1.0);
  spec.duration_max_s = config.GetDouble("synth.duration_max", 30.0);
  spec.vocab_size = static_cast<int>(config.GetInt("synth.vocab_size", 50));
  spec.tokens_per_utt = static_cast<int>(config.GetInt("synth.tokens_per_utt", 20));
  spec.token_boost = config.GetDouble("synth.token_boost", 5.0);
  spec.id_prefix = tag_name;
  LabeledDataset ds = SynthGenerate(spec, seed);
  ds.split_tag = tag;
  return ds;
}

LabeledDataset LoadSplit(const Config& config, SplitTag tag) {
  std::string tag_name = SplitTagName(tag);
  std::string emb_key = "data." + tag_name + ".embeddings";
  std::string trn_key = "data." + tag_name + ".transcripts";
  std::string lab_key = "data." + tag_name + ".labels";
  if (config.Has(lab_key)) {
    LabeledDataset ds;
    ds.split_tag = tag;
    ds.labels = LoadLabels(config.GetString(lab_key));
    if (config.Has(emb_key)) {
      ds.embeddings = LoadEmbeddings(config.GetString(emb_key));
    }
    if (config.Has(trn_key)) {
      ds.transcripts = LoadTranscripts(config.GetString(trn_key));
    }
    ds.Validate();
    return ds;
  }
  uint64_t stream = tag == SplitTag::kTrain ? 101 : (tag == SplitTag::kDev ? 102 : 103);
  return SynthSplit(config, tag, DeriveSeed(MasterSeed(config), stream));
}

namespace {

void SaveDataset(const LabeledDataset& ds, const std::string& dir,
                 const std::string& stem) {
  fs::create_directories(dir);
  if (ds.embeddings) SaveEmbeddings(*ds.embeddings, dir + "/" + stem + ".emb");
  if (ds.transcripts) {
    SaveTranscripts(*ds.transcripts, dir + "/" + stem + ".trn");
  }
  SaveLabels(ds.labels, dir + "/" + stem + ".lab");
}

// Synthetic per-utterance frame matrices for the ubnf pipeline demo: one
// Gaussian frame cloud per class.
std::vector<FrameMatrix> SynthFrames(const Config& config,
                                     const LabeledDataset& ds, uint64_t seed) {
  int dim = static_cast<int>(config.GetInt("synth.frames.dim", 8));
  int per_utt = static_cast<int>(config.GetInt("synth.frames.per_utt", 50));
  double sep = config.GetDouble("synth.frames.separation", 6.0);
  if (dim < kNumDialects) {
    throw std::runtime_error("synth.frames.dim must be >= 5");
  }
  std::vector<FrameMatrix> mats;
  Rng rng(seed);
  for (const auto& [utt, d] : ds.labels) {
    FrameMatrix fm;
    fm.utt_id = utt;
    fm.frames.resize(per_utt, dim);
    int c = static_cast<int>(d);
    for (int t = 0; t < per_utt; ++t) {
      for (int j = 0; j < dim; ++j) {
        double mean = (j == c) ? sep / std::sqrt(2.0) : 0.0;
        fm.frames(t, j) = mean + rng.RandGauss();
      }
    }
    mats.push_back(std::move(fm));
  }
  return mats;
}

}  // namespace

int CmdSynth(const Config& config) {
  std::string dir = OutDir(config);
  uint64_t seed = MasterSeed(config);
  ordered_json counts;
  for (SplitTag tag : {SplitTag::kTrain, SplitTag::kDev, SplitTag::kTest}) {
    uint64_t stream =
        tag == SplitTag::kTrain ? 101 : (tag == SplitTag::kDev ? 102 : 103);
    LabeledDataset ds = SynthSplit(config, tag, DeriveSeed(seed, stream));
    SaveDataset(ds, dir + "/data", SplitTagName(tag));
    if (config.GetBool("synth.frames.enable", false)) {
      SaveFrameMatrices(
          SynthFrames(config, ds, DeriveSeed(seed, stream + 50)),
          dir + "/data/" + SplitTagName(tag) + ".frames");
    }
    counts[SplitTagName(tag)] = ds.size();
  }
  ordered_json extra;
  extra["counts"] = counts;
  WriteRunManifest(config, "synth", extra);
  return 0;
}

namespace {

int TrainSingleSystem(const Config& config, const SystemSpec& spec) {
  std::string dir = OutDir(config);
  fs::create_directories(dir + "/models");
  LabeledDataset train = LoadSplit(config, SplitTag::kTrain);
  EmbeddingSet unlabeled;
  if (config.Has("data.unlabeled.embeddings")) {
    unlabeled = LoadEmbeddings(config.GetString("data.unlabeled.embeddings"));
  }
  TrainedSystem sys = TrainSystem(spec, train, &unlabeled, config,
                                  DeriveSeed(MasterSeed(config), 1000), dir);
  std::string model_path = dir + "/models/" + spec.id + ".model";
  SaveSystem(sys, model_path);
  ordered_json extra;
  extra["model"] = model_path;
  extra["train_utterances"] = train.size();
  WriteRunManifest(config, "train-" + spec.backend, extra);
  std::cout << "trained " << spec.id << " -> " << model_path << "\n";
  return 0;
}

}  // namespace

int CmdTrainText(const Config& config) {
  SystemSpec spec;
  spec.id = config.GetString("text.id", "text");
  spec.feature = "transcripts";
  spec.backend = "svm";
  spec.combo = static_cast<int>(config.GetInt("text.combo", 0));
  spec.scheme = ParseFeatureScheme(config.GetString("text.scheme", "TF"));
  return TrainSingleSystem(config, spec);
}

int CmdTrainGb(const Config& config) {
  SystemSpec spec;
  spec.id = config.GetString("gb.id", "gb");
  spec.feature = "embeddings";
  spec.backend = "gb";
  spec.lda_dim = static_cast<int>(config.GetInt("gb.lda_dim", kNumDialects - 1));
  return TrainSingleSystem(config, spec);
}

int CmdTrainGan(const Config& config) {
  SystemSpec spec;
  spec.id = config.GetString("gan.id", "gan");
  spec.feature = "embeddings";
  spec.backend = "gan";
  return TrainSingleSystem(config, spec);
}

namespace {

// SDC then splicing per the ubnf.* keys, shared by train and extract.
Eigen::MatrixXd UbnfFrontend(const Config& config, const Eigen::MatrixXd& raw) {
  Eigen::MatrixXd frames = raw;
  if (config.GetBool("ubnf.sdc.enable", false)) {
    frames = ComputeSdc(frames,
                        static_cast<int>(config.GetInt("ubnf.sdc.n", 7)),
                        static_cast<int>(config.GetInt("ubnf.sdc.d", 1)),
                        static_cast<int>(config.GetInt("ubnf.sdc.p", 3)),
                        static_cast<int>(config.GetInt("ubnf.sdc.k", 7)));
  }
  int splice = static_cast<int>(config.GetInt("ubnf.splice", 4));
  if (splice > 0) frames = SpliceFrames(frames, splice);
  return frames;
}

}  // namespace

int CmdUbnfTrain(const Config& config) {
  std::string dir = OutDir(config);
  fs::create_directories(dir + "/models");
  auto mats = LoadFrameMatrices(config.GetString("data.frames"));
  if (mats.empty()) throw std::runtime_error("no frame matrices loaded");

  std::vector<Eigen::MatrixXd> processed;
  Eigen::Index total = 0;
  for (const auto& fm : mats) {
    processed.push_back(UbnfFrontend(config, fm.frames));
    total += processed.back().rows();
  }
  Eigen::MatrixXd pooled(total, processed.front().cols());
  Eigen::Index at = 0;
  for (const auto& m : processed) {
    pooled.middleRows(at, m.rows()) = m;
    at += m.rows();
  }

  GmmTrainOptions gopts;
  gopts.iterations = static_cast<int>(config.GetInt("ubnf.em_iters", 20));
  gopts.seed = DeriveSeed(MasterSeed(config), 61);
  GmmTrainResult gmm = FitGmmEm(
      pooled, static_cast<int>(config.GetInt("ubnf.mixtures", 64)), gopts);
  SaveGmmModel(gmm.model, dir + "/models/ubnf-gmm.model");

  std::vector<int> labels = FrameLabels(gmm.model, pooled);
  BottleneckTrainConfig bc;
  bc.hidden = config.GetIntList("ubnf.hidden", {256, 256, 40});
  bc.epochs = static_cast<int>(config.GetInt("ubnf.epochs", 10));
  bc.batch = static_cast<int>(config.GetInt("ubnf.batch", 128));
  bc.adam.lr = config.GetDouble("ubnf.lr", 1e-3);
  bc.seed = DeriveSeed(MasterSeed(config), 62);
  BottleneckTrainResult bn =
      TrainBottleneck(pooled, labels, gmm.model.num_mixtures(), bc);
  SaveBottleneckNet(bn.net, dir + "/models/ubnf-net.model");

  ordered_json extra;
  extra["frames"] = static_cast<int64_t>(total);
  extra["gmm_loglik"] = gmm.loglik;
  extra["gmm_events"] = gmm.events;
  extra["bottleneck_train_accuracy"] = bn.train_accuracy;
  WriteRunManifest(config, "ubnf-train", extra);
  std::cout << "ubnf: " << total << " frames, bottleneck train acc "
            << bn.train_accuracy << "\n";
  return 0;
}

int CmdUbnfExtract(const Config& config) {
  std::string dir = OutDir(config);
  BottleneckNet net = LoadBottleneckNet(config.GetString("ubnf.net"));
  auto mats = LoadFrameMatrices(config.GetString("data.frames"));
  double frame_shift = config.GetDouble("ubnf.frame_shift_s", 0.01);

  std::vector<FrameMatrix> features;
  EmbeddingSet pooled;
  for (const auto& fm : mats) {
    Eigen::MatrixXd frames = UbnfFrontend(config, fm.frames);
    FrameMatrix out;
    out.utt_id = fm.utt_id;
    out.frames = ExtractUbnf(net, frames);
    Eigen::VectorXd mean = PoolUtterance(out.frames);
    EmbeddingRecord rec;
    rec.utt_id = fm.utt_id;
    rec.vector.assign(mean.data(), mean.data() + mean.size());
    rec.duration_s = static_cast<double>(fm.frames.rows()) * frame_shift;
    pooled.Append(std::move(rec));
    features.push_back(std::move(out));
  }
  std::string feat_path = config.GetString("ubnf.output", dir + "/ubnf.frames");
  std::string emb_path =
      config.GetString("ubnf.pooled_output", dir + "/ubnf.emb");
  SaveFrameMatrices(features, feat_path);
  SaveEmbeddings(pooled, emb_path);

  ordered_json extra;
  extra["utterances"] = features.size();
  extra["frames_output"] = feat_path;
  extra["pooled_output"] = emb_path;
  WriteRunManifest(config, "ubnf-extract", extra);
  return 0;
}

int CmdScore(const Config& config) {
  std::string dir = OutDir(config);
  fs::create_directories(dir + "/scores");
  TrainedSystem sys = LoadSystem(config.GetString("score.system"));
  std::string split = config.GetString("score.split", "test");
  SplitTag tag = split == "train" ? SplitTag::kTrain
                                  : (split == "dev" ? SplitTag::kDev : SplitTag::kTest);
  LabeledDataset ds = LoadSplit(config, tag);
  ScoreSet scores = sys.Score(ds);
  std::string out_path = config.GetString(
      "score.output", dir + "/scores/" + sys.spec.id + "." + split + ".tsv");
  SaveScoreFile(scores, out_path);
  ordered_json extra;
  extra["scored_utterances"] = scores.rows.size();
  extra["output"] = out_path;
  WriteRunManifest(config, "score", extra);
  return 0;
}

namespace {

std::vector<ScoreSet> LoadScoreSets(const Config& config, const std::string& key) {
  std::vector<ScoreSet> sets;
  for (const auto& path : config.GetStringList(key)) {
    sets.push_back(LoadScoreFile(path));
  }
  if (sets.empty()) {
    throw std::runtime_error("config: '" + key + "' lists no score files");
  }
  return sets;
}

LabelMap LoadLabelsForKey(const Config& config, const std::string& key) {
  if (config.Has(key)) return LoadLabels(config.GetString(key));
  // Fall back to the dev labels (the fusion training set in the protocol).
  return LoadSplit(config, SplitTag::kDev).labels;
}

LabelMap RestrictLabels(const LabelMap& labels,
                        const std::map<std::string, int>& folds, int keep,
                        bool invert) {
  LabelMap out;
  for (const auto& [utt, d] : labels) {
    bool in = folds.at(utt) == keep;
    if (in != invert) out.emplace(utt, d);
  }
  return out;
}

}  // namespace

int CmdFuseTrain(const Config& config) {
  std::string dir = OutDir(config);
  auto systems = LoadScoreSets(config, "fusion.scores");
  LabelMap labels = LoadLabelsForKey(config, "fusion.labels");

  FusionTrainOptions opts;
  opts.l2 = config.GetDouble("fusion.l2", 1e-3);
  opts.max_iter = static_cast<int>(config.GetInt("fusion.max_iter", 2000));
  opts.tol = config.GetDouble("fusion.tol", 1e-6);

  double frac = config.GetDouble("fusion.train_fraction", 1.0 / 3.0);
  LabelMap train_labels = labels, held_out;
  if (frac < 1.0) {
    auto folds = StratifiedFolds(labels, 3, DeriveSeed(MasterSeed(config), 8));
    train_labels = RestrictLabels(labels, folds, 0, false);
    held_out = RestrictLabels(labels, folds, 0, true);
  }

  std::vector<ScoreSet> train_scores;
  for (const auto& sys : systems) {
    ScoreSet r;
    r.system_id = sys.system_id;
    r.kind = sys.kind;
    for (const auto& [utt, d] : train_labels) {
      (void)d;
      auto it = sys.rows.find(utt);
      if (it != sys.rows.end()) r.rows.emplace(utt, it->second);
    }
    train_scores.push_back(std::move(r));
  }
  FusionTrainResult result = TrainFusion(train_scores, train_labels, opts);
  std::string model_path = config.GetString("fusion.model", dir + "/fusion.model");
  SaveFusionModel(result.model, model_path);

  ordered_json extra;
  extra["model"] = model_path;
  extra["fusion_train_utterances"] = train_labels.size();
  extra["final_objective"] = result.final_objective;
  extra["final_grad_norm"] = result.final_grad_norm;
  if (!held_out.empty()) {
    auto preds = FusePredict(result.model, systems);
    extra["held_out_metrics"] = MetricsJson(MetricsAgainst(preds, held_out));
  }
  WriteRunManifest(config, "fuse-train", extra);
  return 0;
}

int CmdFuseSweep(const Config& config) {
  std::string dir = OutDir(config);
  auto systems = LoadScoreSets(config, "fusion.scores");
  LabelMap labels = LoadLabelsForKey(config, "fusion.labels");

  SweepOptions opts;
  std::string protocol = config.GetString("fusion.protocol", "split");
  opts.protocol = protocol == "kfold" ? SweepProtocol::kKfold
                                      : SweepProtocol::kFusionSplit;
  opts.train_fraction = config.GetDouble("fusion.train_fraction", 1.0 / 3.0);
  opts.folds = static_cast<int>(config.GetInt("fusion.folds", 10));
  opts.seed = DeriveSeed(MasterSeed(config), 9);
  opts.fusion.l2 = config.GetDouble("fusion.l2", 1e-3);

  auto entries = SweepCombinations(systems, labels, opts);
  std::string out_path = config.GetString("fusion.sweep_output", dir + "/sweep.tsv");
  WriteFileString(out_path, FormatSweepReport(entries));

  ordered_json extra;
  extra["subsets"] = entries.size();
  extra["output"] = out_path;
  extra["best_subset"] = entries.front().name;
  extra["best_metrics"] = MetricsJson(entries.front().metrics);
  WriteRunManifest(config, "fuse-sweep", extra);
  std::cout << "sweep: " << entries.size() << " subsets, best "
            << entries.front().name << "\n";
  return 0;
}

int CmdEvaluate(const Config& config) {
  std::string dir = OutDir(config);
  auto systems = LoadScoreSets(config, "evaluate.scores");
  LabelMap labels;
  if (config.Has("evaluate.labels")) {
    labels = LoadLabels(config.GetString("evaluate.labels"));
  } else {
    labels = LoadSplit(config, SplitTag::kTest).labels;
  }
  Averaging avg = config.GetString("avg", "macro") == "micro" ? Averaging::kMicro
                                                              : Averaging::kMacro;

  std::map<std::string, Dialect> preds;
  std::string name;
  if (systems.size() == 1 && !config.Has("fusion.model")) {
    preds = ArgmaxPredictions(systems.front());
    name = systems.front().system_id;
  } else {
    FusionModel model = LoadFusionModel(config.GetString("fusion.model"));
    preds = FusePredict(model, systems);
    name = "fused";
  }
  Metrics m = MetricsAgainst(preds, labels, avg);
  std::vector<MetricsRow> rows{{name, m}};
  std::string tsv = Report(rows, ReportFormat::kTsv);
  WriteFileString(dir + "/evaluate.tsv", tsv);
  std::cout << tsv;

  ordered_json extra;
  extra["metrics"] = MetricsJson(m);
  WriteRunManifest(config, "evaluate", extra);

  double min_acc = config.GetDouble("min_acc", -1.0);
  if (min_acc >= 0.0 && m.acc < min_acc) {
    std::cerr << "accuracy " << m.acc << " below --min-acc " << min_acc << "\n";
    return 1;
  }
  return 0;
}

int CmdProjectDump(const Config& config) {
  std::string dir = OutDir(config);
  auto tag_of = [](const std::string& s) {
    if (s == "train") return SplitTag::kTrain;
    if (s == "dev") return SplitTag::kDev;
    if (s == "test") return SplitTag::kTest;
    throw std::runtime_error("project: unknown split '" + s + "'");
  };
  std::string fit_split = config.GetString("project.fit_split", "train");
  std::string dump_split = config.GetString("project.dump_split", fit_split);

  LabeledDataset fit_ds = LoadSplit(config, tag_of(fit_split));
  Eigen::MatrixXd X;
  std::vector<int> y;
  EmbeddingDesign(fit_ds, &X, &y);
  double gamma = config.GetDouble("lda.gamma", -1.0);
  if (gamma < 0.0) gamma = DefaultLdaShrinkage(X, y, kNumDialects);
  int d = static_cast<int>(config.GetInt("project.dim", 2));
  LdaModel lda = FitLda(X, y, kNumDialects, d, gamma);

  LabeledDataset dump_ds =
      dump_split == fit_split ? std::move(fit_ds) : LoadSplit(config, tag_of(dump_split));
  std::ostringstream out;
  for (const auto& [utt, label] : dump_ds.labels) {
    const auto* rec = dump_ds.embeddings ? dump_ds.embeddings->Find(utt) : nullptr;
    if (!rec) continue;
    Eigen::VectorXd p = LdaProject(lda, ToEigen(rec->vector));
    out << utt;
    for (Eigen::Index j = 0; j < p.size(); ++j) out << '\t' << FormatDouble(p[j]);
    out << '\t' << DialectName(label) << '\n';
  }
  std::string out_path =
      config.GetString("project.output", dir + "/projection.tsv");
  WriteFileString(out_path, out.str());

  ordered_json extra;
  extra["fit_split"] = fit_split;
  extra["dump_split"] = dump_split;
  extra["output"] = out_path;
  WriteRunManifest(config, "project-dump", extra);
  return 0;
}

int CmdValidateManifest(const Config& config) {
  Manifest manifest = LoadManifest(config.GetString("manifest"));
  bool ok = true;
  std::ostringstream report;
  for (const auto& [split, stats] : manifest.per_split) {
    report << split << ": " << stats.TotalUtterances() << " utterances, "
           << stats.TotalDurationH() << " h, " << stats.TotalWordsK() << " kw\n";
    std::string lab_key = "data." + split + ".labels";
    if (config.Has(lab_key)) {
      LabeledDataset ds;
      ds.labels = LoadLabels(config.GetString(lab_key));
      auto problems =
          ValidateAgainstManifest(ComputeManifestStats(ds), stats);
      for (const auto& p : problems) {
        report << "  MISMATCH " << p << "\n";
        ok = false;
      }
    }
  }
  report << (ok ? "manifest OK\n" : "manifest FAILED\n");
  std::cout << report.str();
  ordered_json extra;
  extra["valid"] = ok;
  WriteRunManifest(config, "validate-manifest", extra);
  return ok ? 0 : 1;
}

int CmdPipeline(const Config& config) {
  std::string dir = OutDir(config);
  fs::create_directories(dir + "/models");
  fs::create_directories(dir + "/scores");
  uint64_t seed = MasterSeed(config);
  std::string protocol = config.GetString("protocol", "submission");
  if (protocol != "submission" && protocol != "dev") {
    throw std::runtime_error("pipeline: protocol must be submission or dev");
  }
  std::vector<SystemSpec> specs = ParseSystems(config);

  LabeledDataset train = LoadSplit(config, SplitTag::kTrain);
  LabeledDataset dev = LoadSplit(config, SplitTag::kDev);
  LabeledDataset test = LoadSplit(config, SplitTag::kTest);
  SaveDataset(train, dir + "/data", "train");
  SaveDataset(dev, dir + "/data", "dev");
  SaveDataset(test, dir + "/data", "test");

  // One-third of dev for fusion training, the rest for the back-ends
  // (submission protocol) or for held-out reporting (dev protocol).
  auto dev_parts = SplitDataset(dev, {1.0 / 3.0, 2.0 / 3.0}, DeriveSeed(seed, 7));
  const LabeledDataset& fusion_ds = dev_parts[0];
  const LabeledDataset& dev_rest = dev_parts[1];

  LabeledDataset backend_train =
      protocol == "submission" ? MergeDatasets(train, dev_rest) : train;
  const LabeledDataset& eval_ds = protocol == "submission" ? test : dev_rest;
  std::string eval_name = protocol == "submission" ? "test" : "dev-rest";

  EmbeddingSet unlabeled;
  if (config.Has("data.unlabeled.embeddings")) {
    unlabeled = LoadEmbeddings(config.GetString("data.unlabeled.embeddings"));
  }

  // Train, save, score.
  std::vector<ScoreSet> fusion_scores, eval_scores;
  ordered_json per_system = ordered_json::object();
  for (size_t k = 0; k < specs.size(); ++k) {
    TrainedSystem sys = TrainSystem(specs[k], backend_train, &unlabeled, config,
                                    DeriveSeed(seed, 1000 + k), dir);
    SaveSystem(sys, dir + "/models/" + specs[k].id + ".model");
    ScoreSet fs_scores = sys.Score(fusion_ds);
    ScoreSet ev_scores = sys.Score(eval_ds);
    SaveScoreFile(fs_scores, dir + "/scores/" + specs[k].id + ".fusion.tsv");
    SaveScoreFile(ev_scores,
                  dir + "/scores/" + specs[k].id + "." + eval_name + ".tsv");
    Metrics m = MetricsAgainst(ArgmaxPredictions(ev_scores), eval_ds.labels);
    per_system[specs[k].id] = MetricsJson(m);
    fusion_scores.push_back(std::move(fs_scores));
    eval_scores.push_back(std::move(ev_scores));
  }

  // Fusion training on the one-third dev split.
  FusionTrainOptions fopts;
  fopts.l2 = config.GetDouble("fusion.l2", 1e-3);
  fopts.max_iter = static_cast<int>(config.GetInt("fusion.max_iter", 2000));
  fopts.tol = config.GetDouble("fusion.tol", 1e-6);
  FusionTrainResult fusion = TrainFusion(fusion_scores, fusion_ds.labels, fopts);
  SaveFusionModel(fusion.model, dir + "/fusion.model");

  // Subset sweep. The dev protocol re-splits the full-dev scores; the
  // submission protocol cross-validates within the fusion third (the rest
  // of dev went into back-end training).
  SweepOptions sopts;
  sopts.seed = DeriveSeed(seed, 9);
  sopts.folds = static_cast<int>(config.GetInt("fusion.folds", 10));
  sopts.fusion = fopts;
  std::vector<ScoreSet> sweep_scores;
  LabelMap sweep_labels;
  if (protocol == "dev") {
    sopts.protocol = SweepProtocol::kFusionSplit;
    for (size_t k = 0; k < specs.size(); ++k) {
      ScoreSet merged = fusion_scores[k];
      for (const auto& [utt, row] : eval_scores[k].rows) merged.rows[utt] = row;
      sweep_scores.push_back(std::move(merged));
    }
    sweep_labels = dev.labels;
  } else {
    sopts.protocol = SweepProtocol::kKfold;
    sweep_scores = fusion_scores;
    sweep_labels = fusion_ds.labels;
  }
  auto sweep = SweepCombinations(sweep_scores, sweep_labels, sopts);
  WriteFileString(dir + "/sweep.tsv", FormatSweepReport(sweep));

  // Final fused evaluation.
  auto fused_preds = FusePredict(fusion.model, eval_scores);
  Metrics fused = MetricsAgainst(fused_preds, eval_ds.labels);

  std::vector<MetricsRow> rows;
  for (size_t k = 0; k < specs.size(); ++k) {
    rows.push_back(
        {specs[k].id,
         MetricsAgainst(ArgmaxPredictions(eval_scores[k]), eval_ds.labels)});
  }
  rows.push_back({"fused", fused});
  FoldMetrics cv;
  if (protocol == "dev") {
    cv = KfoldEval(sweep_scores, dev.labels, sopts.folds, sopts.seed, fopts);
    rows.push_back({"fused-10fold-cv", cv.mean});
  }
  std::string report_tsv = Report(rows, ReportFormat::kTsv);
  WriteFileString(dir + "/report.tsv", report_tsv);
  WriteFileString(dir + "/report.md", Report(rows, ReportFormat::kMarkdown));
  std::cout << report_tsv;

  ordered_json extra;
  extra["protocol"] = protocol;
  extra["counts"] = {{"train", train.size()},
                     {"dev", dev.size()},
                     {"test", test.size()},
                     {"backend_train", backend_train.size()},
                     {"fusion_train", fusion_ds.size()},
                     {"eval", eval_ds.size()}};
  extra["systems"] = per_system;
  extra["fused"] = MetricsJson(fused);
  extra["sweep_rows"] = sweep.size();
  extra["best_subset"] = sweep.front().name;
  if (protocol == "dev") extra["fused_10fold_cv"] = MetricsJson(cv.mean);
  WriteRunManifest(config, "pipeline", extra);
  return 0;
}

int RunCommand(const std::string& command, const Config& config) {
  if (command == "synth") return CmdSynth(config);
  if (command == "train-text") return CmdTrainText(config);
  if (command == "train-gb") return CmdTrainGb(config);
  if (command == "train-gan") return CmdTrainGan(config);
  if (command == "ubnf-train") return CmdUbnfTrain(config);
  if (command == "ubnf-extract") return CmdUbnfExtract(config);
  if (command == "score") return CmdScore(config);
  if (command == "fuse-train") return CmdFuseTrain(config);
  if (command == "fuse-sweep") return CmdFuseSweep(config);
  if (command == "evaluate") return CmdEvaluate(config);
  if (command == "project-dump") return CmdProjectDump(config);
  if (command == "pipeline") return CmdPipeline(config);
  if (command == "validate-manifest") return CmdValidateManifest(config);
  throw std::runtime_error("unknown command: " + command);
}

}  // namespace adi

// adi/fusion.cc

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

#include "adi/fusion.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "adi/neural.h"  // LogSumExp

namespace adi {

void ScoreSet::Add(const std::string& utt_id, std::vector<double> scores) {
  for (double s : scores) {
    if (!std::isfinite(s)) {
      throw std::invalid_argument("ScoreSet: non-finite score for " + utt_id);
    }
  }
  if (!rows.emplace(utt_id, std::move(scores)).second) {
    throw std::invalid_argument("ScoreSet: duplicate utt_id " + utt_id);
  }
}

ScoreSet LoadScoreFile(const std::string& path) {
  ScoreSet set;
  auto lines = ReadLines(path);
  for (size_t i = 0; i < lines.size(); ++i) {
    const auto& line = lines[i];
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto f = SplitWhitespace(line.substr(1));
      if (f.size() >= 2 && f[0] == "system") {
        set.system_id = f[1];
        if (f.size() >= 3) set.kind = f[2];
      }
      continue;
    }
    auto f = SplitChar(line, '\t');
    if (f.size() < 2) {
      throw std::runtime_error(path + ":" + std::to_string(i + 1) +
                               ": expected utt_id and scores");
    }
    std::vector<double> scores(f.size() - 1);
    for (size_t k = 1; k < f.size(); ++k) {
      if (!ParseDouble(f[k], &scores[k - 1])) {
        throw std::runtime_error(path + ":" + std::to_string(i + 1) +
                                 ": non-numeric score");
      }
    }
    set.Add(f[0], std::move(scores));
  }
  if (set.system_id.empty()) set.system_id = path;
  return set;
}

void SaveScoreFile(const ScoreSet& set, const std::string& path) {
  std::ostringstream out;
  out << "#system " << set.system_id << ' '
      << (set.kind.empty() ? "unspecified" : set.kind) << '\n';
  for (const auto& [utt, scores] : set.rows) {
    out << utt;
    for (double s : scores) out << '\t' << FormatDouble(s);
    out << '\n';
  }
  WriteFileString(path, out.str());
}

namespace {

// Aligned design: one row per labeled utterance, one block per system.
struct AlignedScores {
  std::vector<std::string> utts;  // sorted
  std::vector<int> y;
  std::vector<Eigen::MatrixXd> scores;  // per system, N x K
  int num_classes = 0;
};

AlignedScores Align(const std::vector<ScoreSet>& systems, const LabelMap& labels) {
  if (systems.empty()) throw std::invalid_argument("fusion: no systems");
  AlignedScores a;
  std::vector<std::string> missing;
  for (const auto& [utt, d] : labels) {
    (void)d;
    for (const auto& sys : systems) {
      if (!sys.rows.count(utt)) {
        missing.push_back(sys.system_id + ":" + utt);
      }
    }
  }
  if (!missing.empty()) {
    std::string msg = "fusion: utterances missing from systems:";
    for (size_t i = 0; i < missing.size() && i < 10; ++i) msg += " " + missing[i];
    if (missing.size() > 10) {
      msg += " (+" + std::to_string(missing.size() - 10) + " more)";
    }
    throw std::invalid_argument(msg);
  }

  a.num_classes =
      static_cast<int>(systems.front().rows.begin()->second.size());
  for (const auto& [utt, d] : labels) {
    a.utts.push_back(utt);
    a.y.push_back(static_cast<int>(d));
  }
  const Eigen::Index n = static_cast<Eigen::Index>(a.utts.size());
  for (const auto& sys : systems) {
    Eigen::MatrixXd m(n, a.num_classes);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& row = sys.rows.at(a.utts[i]);
      if (static_cast<int>(row.size()) != a.num_classes) {
        throw std::invalid_argument("fusion: inconsistent score width in " +
                                    sys.system_id);
      }
      for (int k = 0; k < a.num_classes; ++k) m(i, k) = row[k];
    }
    a.scores.push_back(std::move(m));
  }
  return a;
}

struct Objective {
  double value = 0.0;
  Eigen::VectorXd grad_alpha;
  Eigen::VectorXd grad_beta;
};

Objective EvalObjective(const AlignedScores& a, const Eigen::VectorXd& alpha,
                        const Eigen::VectorXd& beta, double l2) {
  const Eigen::Index n = static_cast<Eigen::Index>(a.y.size());
  const int s_count = static_cast<int>(a.scores.size());
  const int k = a.num_classes;

  Eigen::MatrixXd fused = Eigen::MatrixXd::Zero(n, k);
  for (int s = 0; s < s_count; ++s) fused += alpha[s] * a.scores[s];
  fused.rowwise() += beta.transpose();

  Objective obj;
  obj.grad_alpha = Eigen::VectorXd::Zero(s_count);
  obj.grad_beta = Eigen::VectorXd::Zero(k);
  Eigen::MatrixXd dfused(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd row = fused.row(i).transpose();
    double lse = LogSumExp(row);
    obj.value += lse - row[a.y[i]];
    Eigen::VectorXd p = (row.array() - lse).exp();
    p[a.y[i]] -= 1.0;
    dfused.row(i) = p.transpose() / static_cast<double>(n);
  }
  obj.value /= static_cast<double>(n);

  for (int s = 0; s < s_count; ++s) {
    obj.grad_alpha[s] = dfused.cwiseProduct(a.scores[s]).sum() + l2 * alpha[s];
  }
  obj.grad_beta = dfused.colwise().sum().transpose();
  obj.value += 0.5 * l2 * alpha.squaredNorm();
  return obj;
}

}  // namespace

FusionTrainResult TrainFusion(const std::vector<ScoreSet>& systems,
                              const LabelMap& labels,
                              const FusionTrainOptions& options) {
  AlignedScores a = Align(systems, labels);
  std::vector<int64_t> per_class(a.num_classes, 0);
  for (int y : a.y) per_class[y]++;
  for (int c = 0; c < a.num_classes; ++c) {
    if (per_class[c] > 0 && per_class[c] < 2) {
      throw std::invalid_argument("fusion: class " + std::to_string(c) +
                                  " has fewer than 2 utterances");
    }
  }

  const int s_count = static_cast<int>(systems.size());
  Eigen::VectorXd alpha =
      Eigen::VectorXd::Constant(s_count, 1.0 / static_cast<double>(s_count));
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(a.num_classes);

  Objective obj = EvalObjective(a, alpha, beta, options.l2);
  double step = 1.0;
  int iter = 0;
  for (; iter < options.max_iter; ++iter) {
    double gnorm = std::max(obj.grad_alpha.cwiseAbs().maxCoeff(),
                            obj.grad_beta.cwiseAbs().maxCoeff());
    if (gnorm <= options.tol) break;

    // Armijo backtracking along the negative gradient.
    double g2 = obj.grad_alpha.squaredNorm() + obj.grad_beta.squaredNorm();
    double t = step;
    Objective next;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      Eigen::VectorXd na = alpha - t * obj.grad_alpha;
      Eigen::VectorXd nb = beta - t * obj.grad_beta;
      next = EvalObjective(a, na, nb, options.l2);
      if (next.value <= obj.value - 1e-4 * t * g2) {
        alpha = na;
        beta = nb;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;  // step underflow; gradient is numerically flat
    obj = next;
    step = std::min(t * 2.0, 1e6);
  }

  FusionTrainResult result;
  for (const auto& sys : systems) result.model.system_ids.push_back(sys.system_id);
  result.model.alpha.assign(alpha.data(), alpha.data() + alpha.size());
  result.model.beta = beta;
  result.final_objective = obj.value;
  result.final_grad_norm = std::max(obj.grad_alpha.cwiseAbs().maxCoeff(),
                                    obj.grad_beta.cwiseAbs().maxCoeff());
  result.iterations = iter;
  return result;
}

FusionModel IdentityFusion(const std::string& system_id, int num_classes) {
  FusionModel model;
  model.system_ids = {system_id};
  model.alpha = {1.0};
  model.beta = Eigen::VectorXd::Zero(num_classes);
  return model;
}

Eigen::VectorXd Fuse(const FusionModel& model,
                     const std::vector<std::vector<double>>& per_system_rows) {
  if (per_system_rows.size() != model.alpha.size()) {
    throw std::invalid_argument("Fuse: system count mismatch");
  }
  Eigen::VectorXd fused = model.beta;
  for (size_t s = 0; s < per_system_rows.size(); ++s) {
    const auto& row = per_system_rows[s];
    if (static_cast<Eigen::Index>(row.size()) != fused.size()) {
      throw std::invalid_argument("Fuse: score width mismatch");
    }
    for (Eigen::Index k = 0; k < fused.size(); ++k) {
      fused[k] += model.alpha[s] * row[k];
    }
  }
  return fused;
}

std::map<std::string, Dialect> FusePredict(const FusionModel& model,
                                           const std::vector<ScoreSet>& systems) {
  if (systems.size() != model.alpha.size()) {
    throw std::invalid_argument("FusePredict: system count mismatch");
  }
  std::map<std::string, Dialect> preds;
  for (const auto& [utt, row0] : systems.front().rows) {
    (void)row0;
    std::vector<std::vector<double>> rows;
    bool covered = true;
    for (const auto& sys : systems) {
      auto it = sys.rows.find(utt);
      if (it == sys.rows.end()) {
        covered = false;
        break;
      }
      rows.push_back(it->second);
    }
    if (!covered) continue;
    Eigen::VectorXd fused = Fuse(model, rows);
    int best = 0;
    for (int k = 1; k < fused.size(); ++k) {
      if (fused[k] > fused[best]) best = k;
    }
    preds.emplace(utt, static_cast<Dialect>(best));
  }
  return preds;
}

std::map<std::string, int> StratifiedFolds(const LabelMap& labels, int folds,
                                           uint64_t seed) {
  if (folds < 2) throw std::invalid_argument("StratifiedFolds: need >= 2 folds");
  std::vector<std::vector<std::string>> by_class(kNumDialects);
  for (const auto& [utt, d] : labels) {
    by_class[static_cast<int>(d)].push_back(utt);
  }
  std::map<std::string, int> assignment;
  for (int c = 0; c < kNumDialects; ++c) {
    auto& utts = by_class[c];
    Rng rng(DeriveSeed(seed, 500 + static_cast<uint64_t>(c)));
    rng.Shuffle(&utts);
    for (size_t i = 0; i < utts.size(); ++i) {
      assignment[utts[i]] = static_cast<int>(i % folds);
    }
  }
  return assignment;
}

namespace {

Metrics EvaluatePredictions(const std::map<std::string, Dialect>& preds,
                            const LabelMap& labels) {
  std::vector<Dialect> p, l;
  for (const auto& [utt, d] : labels) {
    auto it = preds.find(utt);
    if (it == preds.end()) continue;
    p.push_back(it->second);
    l.push_back(d);
  }
  return ComputeMetrics(Confusion(p, l));
}

std::vector<ScoreSet> RestrictScores(const std::vector<ScoreSet>& systems,
                                     const LabelMap& labels) {
  std::vector<ScoreSet> out;
  for (const auto& sys : systems) {
    ScoreSet r;
    r.system_id = sys.system_id;
    r.kind = sys.kind;
    for (const auto& [utt, d] : labels) {
      (void)d;
      auto it = sys.rows.find(utt);
      if (it != sys.rows.end()) r.rows.emplace(utt, it->second);
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

FoldMetrics KfoldEval(const std::vector<ScoreSet>& systems, const LabelMap& labels,
                      int folds, uint64_t seed,
                      const FusionTrainOptions& options) {
  auto assignment = StratifiedFolds(labels, folds, seed);
  FoldMetrics result;
  double acc = 0.0, rcl = 0.0, prc = 0.0;
  for (int fold = 0; fold < folds; ++fold) {
    LabelMap train_labels, eval_labels;
    for (const auto& [utt, d] : labels) {
      if (assignment.at(utt) == fold) {
        eval_labels.emplace(utt, d);
      } else {
        train_labels.emplace(utt, d);
      }
    }
    FusionTrainResult ft =
        TrainFusion(RestrictScores(systems, train_labels), train_labels, options);
    auto preds = FusePredict(ft.model, RestrictScores(systems, eval_labels));
    Metrics m = EvaluatePredictions(preds, eval_labels);
    acc += m.acc;
    rcl += m.rcl;
    prc += m.prc;
    result.per_fold.push_back(m);
  }
  result.mean.acc = acc / folds;
  result.mean.rcl = rcl / folds;
  result.mean.prc = prc / folds;
  return result;
}

std::vector<SweepEntry> SweepCombinations(const std::vector<ScoreSet>& systems,
                                          const LabelMap& labels,
                                          const SweepOptions& options) {
  const int s_count = static_cast<int>(systems.size());
  if (s_count < 1 || s_count > 16) {
    throw std::invalid_argument("sweep: need 1..16 systems");
  }

  // Fusion-split protocol: one stratified split shared by all subsets.
  LabelMap train_labels, eval_labels;
  if (options.protocol == SweepProtocol::kFusionSplit) {
    auto folds = StratifiedFolds(labels, 3, options.seed);
    for (const auto& [utt, d] : labels) {
      if (folds.at(utt) == 0) {
        train_labels.emplace(utt, d);
      } else {
        eval_labels.emplace(utt, d);
      }
    }
    // train_fraction other than 1/3 re-partitions on a finer grid.
    if (std::abs(options.train_fraction - 1.0 / 3.0) > 1e-9) {
      train_labels.clear();
      eval_labels.clear();
      int grid = 100;
      auto fine = StratifiedFolds(labels, grid, options.seed);
      int cut = static_cast<int>(options.train_fraction * grid + 0.5);
      for (const auto& [utt, d] : labels) {
        if (fine.at(utt) < cut) {
          train_labels.emplace(utt, d);
        } else {
          eval_labels.emplace(utt, d);
        }
      }
    }
  }

  std::vector<SweepEntry> entries;
  for (uint32_t mask = 1; mask < (1u << s_count); ++mask) {
    SweepEntry entry;
    std::vector<ScoreSet> subset;
    for (int s = 0; s < s_count; ++s) {
      if (mask & (1u << s)) {
        entry.subset.push_back(s);
        subset.push_back(systems[s]);
      }
    }
    for (size_t i = 0; i < entry.subset.size(); ++i) {
      if (i) entry.name += '+';
      entry.name += systems[entry.subset[i]].system_id;
    }
    if (options.protocol == SweepProtocol::kFusionSplit) {
      FusionTrainResult ft = TrainFusion(RestrictScores(subset, train_labels),
                                         train_labels, options.fusion);
      auto preds = FusePredict(ft.model, RestrictScores(subset, eval_labels));
      entry.metrics = EvaluatePredictions(preds, eval_labels);
    } else {
      entry.metrics =
          KfoldEval(subset, labels, options.folds, options.seed, options.fusion)
              .mean;
    }
    entries.push_back(std::move(entry));
  }

  std::sort(entries.begin(), entries.end(), [](const SweepEntry& x,
                                               const SweepEntry& y) {
    if (x.metrics.acc != y.metrics.acc) return x.metrics.acc > y.metrics.acc;
    if (x.subset.size() != y.subset.size()) return x.subset.size() < y.subset.size();
    return x.subset < y.subset;
  });
  return entries;
}

std::string FormatSweepReport(const std::vector<SweepEntry>& entries) {
  std::ostringstream out;
  out << "subset\tacc\trcl\tprc\n";
  char buf[64];
  for (const auto& e : entries) {
    std::snprintf(buf, sizeof(buf), "%.4f\t%.4f\t%.4f", e.metrics.acc,
                  e.metrics.rcl, e.metrics.prc);
    out << e.name << '\t' << buf << '\n';
  }
  return out.str();
}

void SaveFusionModel(const FusionModel& model, const std::string& path) {
  std::ostringstream out;
  out << "ADI_FUSION_MODEL v1\n";
  out << "systems " << model.system_ids.size();
  for (const auto& id : model.system_ids) out << ' ' << id;
  out << "\nalpha";
  for (double a : model.alpha) out << ' ' << FormatDouble(a);
  out << "\nbeta " << model.beta.size();
  for (Eigen::Index k = 0; k < model.beta.size(); ++k) {
    out << ' ' << FormatDouble(model.beta[k]);
  }
  out << '\n';
  WriteFileString(path, out.str());
}

FusionModel LoadFusionModel(const std::string& path) {
  auto lines = ReadLines(path);
  if (lines.empty() || lines[0] != "ADI_FUSION_MODEL v1") {
    throw std::runtime_error("bad fusion model header");
  }
  if (lines.size() < 4) throw std::runtime_error("truncated fusion model");
  FusionModel model;
  auto sys = SplitWhitespace(lines[1]);
  if (sys.size() < 2 || sys[0] != "systems") {
    throw std::runtime_error("bad fusion systems line");
  }
  for (size_t i = 2; i < sys.size(); ++i) model.system_ids.push_back(sys[i]);
  auto alpha = SplitWhitespace(lines[2]);
  if (alpha.empty() || alpha[0] != "alpha" ||
      alpha.size() - 1 != model.system_ids.size()) {
    throw std::runtime_error("bad fusion alpha line");
  }
  for (size_t i = 1; i < alpha.size(); ++i) {
    double v = 0.0;
    if (!ParseDouble(alpha[i], &v)) throw std::runtime_error("bad alpha value");
    model.alpha.push_back(v);
  }
  auto beta = SplitWhitespace(lines[3]);
  if (beta.size() < 2 || beta[0] != "beta") {
    throw std::runtime_error("bad fusion beta line");
  }
  int64_t k = 0;
  ParseInt(beta[1], &k);
  if (static_cast<int64_t>(beta.size()) != k + 2) {
    throw std::runtime_error("bad fusion beta length");
  }
  model.beta.resize(k);
  for (int64_t i = 0; i < k; ++i) {
    if (!ParseDouble(beta[2 + i], &model.beta[i])) {
      throw std::runtime_error("bad beta value");
    }
  }
  return model;
}

}  // namespace adi

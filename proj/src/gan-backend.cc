// adi/gan-backend.cc

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

#include "adi/gan-backend.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "adi/matrix-io.h"

namespace adi {

namespace {

// logsumexp of [l_1..l_K, 0].
double LogZ(const Eigen::VectorXd& logits) {
  double m = std::max(0.0, logits.maxCoeff());
  double s = std::exp(-m);  // the pinned fake logit
  for (Eigen::Index k = 0; k < logits.size(); ++k) s += std::exp(logits[k] - m);
  return m + std::log(s);
}

}  // namespace

Eigen::VectorXd ClassProbs(const Eigen::VectorXd& logits) {
  const Eigen::Index k = logits.size();
  double logz = LogZ(logits);
  Eigen::VectorXd probs(k + 1);
  for (Eigen::Index i = 0; i < k; ++i) probs[i] = std::exp(logits[i] - logz);
  probs[k] = std::exp(-logz);
  return probs;
}

double SupLoss(const Eigen::VectorXd& logits, int y) {
  if (y < 0 || y >= logits.size()) {
    throw std::invalid_argument("SupLoss: label out of range");
  }
  return LogSumExp(logits) - logits[y];
}

double UnsupLoss(const Eigen::MatrixXd& real_logits,
                 const Eigen::MatrixXd& fake_logits) {
  double real_term = 0.0;
  for (Eigen::Index i = 0; i < real_logits.rows(); ++i) {
    Eigen::VectorXd row = real_logits.row(i).transpose();
    // -log(1 - p(K+1)) = logZ - logsumexp(real logits)
    real_term += LogZ(row) - LogSumExp(row);
  }
  if (real_logits.rows() > 0) real_term /= static_cast<double>(real_logits.rows());

  double fake_term = 0.0;
  for (Eigen::Index i = 0; i < fake_logits.rows(); ++i) {
    // -log p(K+1) = logZ
    fake_term += LogZ(fake_logits.row(i).transpose());
  }
  if (fake_logits.rows() > 0) fake_term /= static_cast<double>(fake_logits.rows());

  return real_term + fake_term;
}

double GenFeatureMatchingLoss(const Eigen::MatrixXd& real_h,
                              const Eigen::MatrixXd& fake_h) {
  if (real_h.cols() != fake_h.cols()) {
    throw std::invalid_argument("GenFeatureMatchingLoss: width mismatch");
  }
  Eigen::VectorXd mu_r = real_h.colwise().mean().transpose();
  Eigen::VectorXd mu_f = fake_h.colwise().mean().transpose();
  return (mu_r - mu_f).squaredNorm();
}

DiscriminatorLoss ComputeDiscriminatorLoss(const Eigen::MatrixXd& labeled_logits,
                                           const std::vector<int>& y,
                                           const Eigen::MatrixXd& real_logits,
                                           const Eigen::MatrixXd& fake_logits) {
  DiscriminatorLoss out;
  const Eigen::Index nl = labeled_logits.rows();
  const Eigen::Index nr = real_logits.rows();
  const Eigen::Index nf = fake_logits.rows();
  if (nl != static_cast<Eigen::Index>(y.size())) {
    throw std::invalid_argument("ComputeDiscriminatorLoss: label count mismatch");
  }

  out.dlogits_labeled.setZero(nl, labeled_logits.cols());
  for (Eigen::Index i = 0; i < nl; ++i) {
    Eigen::VectorXd row = labeled_logits.row(i).transpose();
    double lse = LogSumExp(row);
    out.sup += lse - row[y[i]];
    Eigen::VectorXd r = (row.array() - lse).exp();  // restricted softmax
    r[y[i]] -= 1.0;
    out.dlogits_labeled.row(i) = r.transpose() / static_cast<double>(nl);
  }
  if (nl > 0) out.sup /= static_cast<double>(nl);

  out.dlogits_real.setZero(nr, real_logits.cols());
  double real_term = 0.0;
  for (Eigen::Index i = 0; i < nr; ++i) {
    Eigen::VectorXd row = real_logits.row(i).transpose();
    double logz = LogZ(row);
    double lse = LogSumExp(row);
    real_term += logz - lse;
    Eigen::VectorXd q = (row.array() - logz).exp();  // full softmax, real slots
    Eigen::VectorXd r = (row.array() - lse).exp();
    out.dlogits_real.row(i) = (q - r).transpose() / static_cast<double>(nr);
  }
  if (nr > 0) real_term /= static_cast<double>(nr);

  out.dlogits_fake.setZero(nf, fake_logits.cols());
  double fake_term = 0.0;
  for (Eigen::Index i = 0; i < nf; ++i) {
    Eigen::VectorXd row = fake_logits.row(i).transpose();
    double logz = LogZ(row);
    fake_term += logz;
    Eigen::VectorXd q = (row.array() - logz).exp();
    out.dlogits_fake.row(i) = q.transpose() / static_cast<double>(nf);
  }
  if (nf > 0) fake_term /= static_cast<double>(nf);

  out.unsup = real_term + fake_term;
  return out;
}

Eigen::VectorXd GanInputVector(const EmbeddingRecord& rec) {
  Eigen::VectorXd x(rec.vector.size() + 1);
  for (size_t i = 0; i < rec.vector.size(); ++i) x[i] = rec.vector[i];
  x[rec.vector.size()] = std::log1p(rec.duration_s);
  return x;
}

Eigen::MatrixXd GanInputMatrix(const EmbeddingSet& set) {
  if (set.empty()) return Eigen::MatrixXd(0, 0);
  Eigen::MatrixXd X(set.size(), set.dim() + 1);
  for (size_t i = 0; i < set.records().size(); ++i) {
    X.row(i) = GanInputVector(set.records()[i]).transpose();
  }
  return X;
}

namespace {

Eigen::MatrixXd Standardize(const Eigen::MatrixXd& X, const Eigen::VectorXd& mean,
                            const Eigen::VectorXd& scale) {
  Eigen::MatrixXd out = X;
  out.rowwise() -= mean.transpose();
  out.array().rowwise() /= scale.transpose().array();
  return out;
}

Eigen::MatrixXd SampleNoise(Eigen::Index n, int dim, Rng* rng) {
  Eigen::MatrixXd z(n, dim);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int j = 0; j < dim; ++j) z(i, j) = rng->RandGauss();
  }
  return z;
}

double AccuracyOn(const GanModel& model, const EmbeddingSet& set,
                  const LabelMap& labels) {
  int64_t correct = 0, total = 0;
  for (const auto& rec : set.records()) {
    auto it = labels.find(rec.utt_id);
    if (it == labels.end()) continue;
    if (GanPredict(model, rec) == it->second) correct++;
    total++;
  }
  return total ? 100.0 * static_cast<double>(correct) / static_cast<double>(total)
               : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

GanTrainResult TrainGan(const EmbeddingSet& labeled, const LabelMap& labels,
                        const EmbeddingSet& unlabeled, const GanConfig& config,
                        const EmbeddingSet* dev, const LabelMap* dev_labels) {
  if (labeled.empty()) throw std::invalid_argument("TrainGan: no labeled data");
  if (!unlabeled.empty() && unlabeled.dim() != labeled.dim()) {
    throw std::invalid_argument("TrainGan: embedding dimension mismatch");
  }
  const int in_dim = labeled.dim() + 1;

  Eigen::MatrixXd xl = GanInputMatrix(labeled);
  std::vector<int> yl;
  yl.reserve(labeled.size());
  for (const auto& rec : labeled.records()) {
    auto it = labels.find(rec.utt_id);
    if (it == labels.end()) {
      throw std::invalid_argument("TrainGan: missing label for " + rec.utt_id);
    }
    yl.push_back(static_cast<int>(it->second));
  }
  Eigen::MatrixXd xu = GanInputMatrix(unlabeled);

  // Standardization over the full training pool.
  Eigen::MatrixXd pool(xl.rows() + xu.rows(), in_dim);
  pool.topRows(xl.rows()) = xl;
  if (xu.rows() > 0) pool.bottomRows(xu.rows()) = xu;
  Eigen::VectorXd mean = pool.colwise().mean().transpose();
  Eigen::VectorXd scale(in_dim);
  for (int j = 0; j < in_dim; ++j) {
    double var = (pool.col(j).array() - mean[j]).square().mean();
    scale[j] = std::sqrt(std::max(var, 1e-12));
  }

  GanTrainResult result;
  GanModel& model = result.model;
  model.num_classes = config.num_classes;
  model.input_mean = mean;
  model.input_scale = scale;

  std::vector<int> disc_sizes = {in_dim};
  disc_sizes.insert(disc_sizes.end(), config.disc_hidden.begin(),
                    config.disc_hidden.end());
  disc_sizes.push_back(config.num_classes);
  std::vector<double> disc_drop(config.disc_hidden.size(), config.dropout);
  model.discriminator =
      MakeMlp(disc_sizes, disc_drop, DeriveSeed(config.seed, 11));

  std::vector<int> gen_sizes = {config.noise_dim};
  gen_sizes.insert(gen_sizes.end(), config.gen_hidden.begin(),
                   config.gen_hidden.end());
  gen_sizes.push_back(in_dim);
  model.generator = MakeMlp(gen_sizes, {}, DeriveSeed(config.seed, 12));

  Eigen::MatrixXd xls = Standardize(xl, mean, scale);
  Eigen::MatrixXd pool_s = Standardize(pool, mean, scale);

  AdamState disc_adam = MakeAdamState(model.discriminator, config.adam);
  AdamState gen_adam = MakeAdamState(model.generator, config.adam);

  Rng order_rng(DeriveSeed(config.seed, 21));
  Rng mask_rng(DeriveSeed(config.seed, 22));
  Rng noise_rng(DeriveSeed(config.seed, 23));

  const Eigen::Index n_labeled = xls.rows();
  const Eigen::Index n_pool = pool_s.rows();
  const int batch = std::max(1, config.batch);
  const Eigen::Index steps =
      std::max<Eigen::Index>(1, (n_pool + batch - 1) / batch);
  const int last_hidden = model.discriminator.num_layers() - 2;

  std::vector<Eigen::Index> labeled_order(n_labeled);
  std::iota(labeled_order.begin(), labeled_order.end(), Eigen::Index{0});
  std::vector<Eigen::Index> pool_order(n_pool);
  std::iota(pool_order.begin(), pool_order.end(), Eigen::Index{0});
  Eigen::Index labeled_pos = n_labeled;  // forces a shuffle on first use

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    order_rng.Shuffle(&pool_order);
    GanEpochLog log;
    log.epoch = epoch;

    for (Eigen::Index step = 0; step < steps; ++step) {
      // Labeled batch, cycling with reshuffles.
      Eigen::MatrixXd bl(std::min<Eigen::Index>(batch, n_labeled), in_dim);
      std::vector<int> by(bl.rows());
      for (Eigen::Index i = 0; i < bl.rows(); ++i) {
        if (labeled_pos >= n_labeled) {
          order_rng.Shuffle(&labeled_order);
          labeled_pos = 0;
        }
        bl.row(i) = xls.row(labeled_order[labeled_pos]);
        by[i] = yl[labeled_order[labeled_pos]];
        labeled_pos++;
      }
      // Real pool batch.
      Eigen::Index start = (step * batch) % n_pool;
      Eigen::Index bs = std::min<Eigen::Index>(batch, n_pool - start);
      Eigen::MatrixXd br(bs, in_dim);
      for (Eigen::Index i = 0; i < bs; ++i) {
        br.row(i) = pool_s.row(pool_order[start + i]);
      }
      // Generated batch.
      Eigen::MatrixXd z = SampleNoise(batch, config.noise_dim, &noise_rng);
      ForwardResult gen_fwd =
          Forward(model.generator, z, /*train_mode=*/false);
      Eigen::MatrixXd fake = gen_fwd.output();

      // ---- discriminator step ----
      Eigen::MatrixXd joint(bl.rows() + br.rows() + fake.rows(), in_dim);
      joint.topRows(bl.rows()) = bl;
      joint.middleRows(bl.rows(), br.rows()) = br;
      joint.bottomRows(fake.rows()) = fake;
      ForwardResult dfwd =
          Forward(model.discriminator, joint, /*train_mode=*/true, &mask_rng);
      const Eigen::MatrixXd& logits = dfwd.output();
      DiscriminatorLoss dl = ComputeDiscriminatorLoss(
          logits.topRows(bl.rows()), by, logits.middleRows(bl.rows(), br.rows()),
          logits.bottomRows(fake.rows()));
      if (!std::isfinite(dl.sup) || !std::isfinite(dl.unsup)) {
        throw std::runtime_error("TrainGan: non-finite discriminator loss at epoch " +
                                 std::to_string(epoch) + ", batch " +
                                 std::to_string(step));
      }
      Eigen::MatrixXd dlogits(joint.rows(), config.num_classes);
      dlogits.topRows(bl.rows()) = dl.dlogits_labeled;
      dlogits.middleRows(bl.rows(), br.rows()) = dl.dlogits_real;
      dlogits.bottomRows(fake.rows()) = dl.dlogits_fake;
      Gradients dgrad = Backward(model.discriminator, dfwd, dlogits);
      AdamStep(&model.discriminator, dgrad, &disc_adam);

      // ---- generator step (feature matching, discriminator frozen) ----
      Eigen::MatrixXd z2 = SampleNoise(batch, config.noise_dim, &noise_rng);
      ForwardResult gen_fwd2 =
          Forward(model.generator, z2, /*train_mode=*/false);
      ForwardResult d_real =
          Forward(model.discriminator, br, /*train_mode=*/false);
      ForwardResult d_fake =
          Forward(model.discriminator, gen_fwd2.output(), /*train_mode=*/false);
      const Eigen::MatrixXd& h_real = d_real.post[last_hidden];
      const Eigen::MatrixXd& h_fake = d_fake.post[last_hidden];
      double gloss = GenFeatureMatchingLoss(h_real, h_fake);
      if (!std::isfinite(gloss)) {
        throw std::runtime_error("TrainGan: non-finite generator loss at epoch " +
                                 std::to_string(epoch) + ", batch " +
                                 std::to_string(step));
      }
      Eigen::VectorXd mu_r = h_real.colwise().mean().transpose();
      Eigen::VectorXd mu_f = h_fake.colwise().mean().transpose();
      Eigen::MatrixXd dh =
          ((2.0 / static_cast<double>(h_fake.rows())) * (mu_f - mu_r))
              .transpose()
              .replicate(h_fake.rows(), 1);
      Eigen::MatrixXd dfake_input;
      Backward(model.discriminator, d_fake, dh, last_hidden, &dfake_input);
      Gradients ggrad = Backward(model.generator, gen_fwd2, dfake_input);
      AdamStep(&model.generator, ggrad, &gen_adam);

      log.sup_loss += dl.sup;
      log.unsup_loss += dl.unsup;
      log.gen_loss += gloss;
    }

    log.sup_loss /= static_cast<double>(steps);
    log.unsup_loss /= static_cast<double>(steps);
    log.gen_loss /= static_cast<double>(steps);
    if (dev && dev_labels) log.dev_accuracy = AccuracyOn(model, *dev, *dev_labels);
    result.log.push_back(log);
  }
  return result;
}

Eigen::VectorXd GanScores(const GanModel& model, const EmbeddingRecord& rec) {
  Eigen::VectorXd x = GanInputVector(rec);
  if (x.size() != model.input_mean.size()) {
    throw std::invalid_argument("GanScores: dimension mismatch");
  }
  x = (x - model.input_mean).cwiseQuotient(model.input_scale);
  ForwardResult fwd =
      Forward(model.discriminator, x.transpose(), /*train_mode=*/false);
  Eigen::VectorXd logits = fwd.output().row(0).transpose();
  return LogSoftmax(logits);  // log p(y|x, y < K+1)
}

Dialect GanPredict(const GanModel& model, const EmbeddingRecord& rec) {
  Eigen::VectorXd scores = GanScores(model, rec);
  int best = 0;
  for (int c = 1; c < scores.size(); ++c) {
    if (scores[c] > scores[best]) best = c;
  }
  return static_cast<Dialect>(best);
}

std::string FormatGanLog(const std::vector<GanEpochLog>& log) {
  std::ostringstream out;
  out << "epoch\tsup_loss\tunsup_loss\tgen_loss\tdev_acc\n";
  for (const auto& e : log) {
    out << e.epoch << '\t' << FormatDouble(e.sup_loss) << '\t'
        << FormatDouble(e.unsup_loss) << '\t' << FormatDouble(e.gen_loss) << '\t'
        << FormatDouble(e.dev_accuracy) << '\n';
  }
  return out.str();
}

void SaveGanModel(const GanModel& model, const std::string& path) {
  std::ostringstream out;
  out << "ADI_GAN_MODEL v1\n";
  out << "classes " << model.num_classes << "\n";
  WriteVector(out, "input_mean", model.input_mean);
  WriteVector(out, "input_scale", model.input_scale);
  WriteMlp(out, model.discriminator);
  WriteMlp(out, model.generator);
  WriteFileString(path, out.str());
}

GanModel LoadGanModel(const std::string& path) {
  std::istringstream in(ReadFileString(path));
  std::string line;
  if (!std::getline(in, line) || line != "ADI_GAN_MODEL v1") {
    throw std::runtime_error("bad GAN model header");
  }
  GanModel model;
  std::string tag;
  if (!(in >> tag >> model.num_classes) || tag != "classes") {
    throw std::runtime_error("bad GAN classes line");
  }
  model.input_mean = ReadVector(in, "input_mean");
  model.input_scale = ReadVector(in, "input_scale");
  model.discriminator = ReadMlp(in);
  model.generator = ReadMlp(in);
  return model;
}

}  // namespace adi

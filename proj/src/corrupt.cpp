#include "plltk/corrupt.hpp"

#include <sstream>

#include "plltk/errors.hpp"
#include "plltk/trainer.hpp"

namespace pll {

std::pair<PartialLabelDataset, FlipProfile> corrupt_id(const Scorer& annotator,
                                                       const CleanDataset& clean,
                                                       Rng& rng) {
  const int n = static_cast<int>(clean.features.rows());
  const int c = clean.num_classes;
  Eigen::MatrixXd scores = annotator(clean.features);
  if (scores.rows() != n || scores.cols() != c) {
    std::ostringstream msg;
    msg << "annotator produced " << scores.rows() << "x" << scores.cols()
        << " scores for " << n << " examples with " << c << " classes";
    throw DataError(msg.str());
  }

  PartialLabelDataset ds;
  ds.features = clean.features;
  ds.num_classes = c;
  ds.provenance = Provenance::kSyntheticId;
  ds.true_labels.resize(n);
  ds.candidates.reserve(n);

  FlipProfile profile;
  profile.probabilities = Eigen::MatrixXd::Zero(n, c);

  for (int i = 0; i < n; ++i) {
    const int y = clean.labels[i];
    if (y < 0 || y >= c) throw DataError("clean label out of range");
    ds.true_labels[i] = y;
    profile.probabilities(i, y) = 1.0;

    double max_incorrect = 0.0;
    for (int j = 0; j < c; ++j)
      if (j != y) max_incorrect = std::max(max_incorrect, scores(i, j));

    std::vector<int> members{y};
    for (int j = 0; j < c; ++j) {
      if (j == y) continue;
      const double xi =
          max_incorrect > 0.0 ? scores(i, j) / max_incorrect : 0.0;
      profile.probabilities(i, j) = xi;
      if (rng.bernoulli(xi)) members.push_back(j);
    }
    ds.candidates.push_back(CandidateSet::from_labels(c, members));
  }
  return {std::move(ds), std::move(profile)};
}

PartialLabelDataset corrupt_uniform(const CleanDataset& clean,
                                    double inclusion_prob, Rng& rng) {
  if (inclusion_prob < 0.0 || inclusion_prob > 1.0)
    throw DataError("uniform inclusion probability must lie in [0, 1]");
  const int n = static_cast<int>(clean.features.rows());
  const int c = clean.num_classes;

  PartialLabelDataset ds;
  ds.features = clean.features;
  ds.num_classes = c;
  ds.provenance = Provenance::kSyntheticUniform;
  ds.true_labels.resize(n);
  ds.candidates.reserve(n);
  for (int i = 0; i < n; ++i) {
    const int y = clean.labels[i];
    if (y < 0 || y >= c) throw DataError("clean label out of range");
    ds.true_labels[i] = y;
    std::vector<int> members{y};
    for (int j = 0; j < c; ++j)
      if (j != y && rng.bernoulli(inclusion_prob)) members.push_back(j);
    ds.candidates.push_back(CandidateSet::from_labels(c, members));
  }
  return ds;
}

ScoringModel train_annotator(const CleanDataset& clean, Rng& rng,
                             const AnnotatorConfig& cfg) {
  const int q = static_cast<int>(clean.features.cols());
  ScoringModel model =
      ScoringModel::mlp(q, {cfg.hidden_width}, clean.num_classes);
  model.init_params(rng);
  SgdOptimizer opt(model, cfg.optimizer);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch)
    train_epoch_supervised(model, opt, clean.features, clean.labels, rng);
  return model;
}

}  // namespace pll

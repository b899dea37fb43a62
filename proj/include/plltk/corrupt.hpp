#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <utility>

#include "plltk/dataset.hpp"
#include "plltk/model.hpp"
#include "plltk/optimizer.hpp"

namespace pll {

/// Any map from a feature matrix to simplex rows, one per example. The
/// usual choice is a trained annotator model; synthetic worlds can pass
/// the exact posterior instead.
using Scorer = std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>;

struct CleanDataset {
  Eigen::MatrixXd features;  // n x q
  Eigen::VectorXi labels;    // n, exact
  int num_classes = 0;
};

/// Per-example inclusion probabilities used during generation. Entry
/// (i, y_i) is 1 for the true label; incorrect labels carry their
/// annotator-confidence ratio.
struct FlipProfile {
  Eigen::MatrixXd probabilities;  // n x c
  std::optional<double> t_hat;    // filled by the theory diagnostics
};

/// Instance-dependent corruption: the true label always enters the
/// candidate set; each incorrect label j enters by an independent
/// Bernoulli draw with probability score_j / max over incorrect scores.
/// Rows whose incorrect scores are all zero get no incorrect candidates
/// (the ratio is defined as 0 rather than 0/0).
std::pair<PartialLabelDataset, FlipProfile> corrupt_id(const Scorer& annotator,
                                                       const CleanDataset& clean,
                                                       Rng& rng);

/// Comparison baseline: every incorrect label enters with the same
/// fixed probability.
PartialLabelDataset corrupt_uniform(const CleanDataset& clean,
                                    double inclusion_prob, Rng& rng);

struct AnnotatorConfig {
  int hidden_width = 128;
  int epochs = 20;
  OptimizerConfig optimizer;
};

/// Supervised 1-hidden-layer MLP trained on the clean labels; the
/// smallest model that yields usable confidence rankings.
ScoringModel train_annotator(const CleanDataset& clean, Rng& rng,
                             const AnnotatorConfig& cfg = {});

}  // namespace pll

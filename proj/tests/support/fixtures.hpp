#pragma once

#include <vector>

#include "plltk/candidate_set.hpp"
#include "plltk/losses.hpp"
#include "plltk/model.hpp"
#include "plltk/rng.hpp"
#include "plltk/synthetic.hpp"
#include "plltk/trainer.hpp"

namespace pll::testing {

// Small random model: linear, or an MLP with one or two hidden layers.
inline ScoringModel random_model(Rng& rng, int inputs, int classes) {
  ScoringModel model = [&] {
    switch (rng.below(3)) {
      case 0: return ScoringModel::linear(inputs, classes);
      case 1: return ScoringModel::mlp(inputs, {static_cast<int>(3 + rng.below(5))}, classes);
      default:
        return ScoringModel::mlp(
            inputs, {static_cast<int>(3 + rng.below(4)), static_cast<int>(3 + rng.below(4))},
            classes);
    }
  }();
  model.init_params(rng);
  return model;
}

inline Eigen::MatrixXd random_batch(Rng& rng, int n, int inputs) {
  Eigen::MatrixXd X(n, inputs);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < inputs; ++j) X(i, j) = rng.normal();
  return X;
}

// Non-empty random candidate set over c labels.
inline CandidateSet random_candidate_set(Rng& rng, int classes) {
  std::vector<int> members;
  for (int j = 0; j < classes; ++j)
    if (rng.bernoulli(0.5)) members.push_back(j);
  if (members.empty()) members.push_back(static_cast<int>(rng.below(classes)));
  return CandidateSet::from_labels(classes, members);
}

inline std::vector<CandidateSet> random_candidate_sets(Rng& rng, int n,
                                                       int classes) {
  std::vector<CandidateSet> sets;
  sets.reserve(n);
  for (int i = 0; i < n; ++i) sets.push_back(random_candidate_set(rng, classes));
  return sets;
}

// Random confidence rows supported on the sets and normalized.
inline Eigen::MatrixXd random_confidences(Rng& rng,
                                          const std::vector<CandidateSet>& sets) {
  const int c = sets.front().num_labels();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(static_cast<int>(sets.size()), c);
  for (std::size_t i = 0; i < sets.size(); ++i) {
    double total = 0.0;
    for (int j : sets[i].labels()) {
      w(static_cast<int>(i), j) = 0.05 + rng.uniform();
      total += w(static_cast<int>(i), j);
    }
    for (int j : sets[i].labels()) w(static_cast<int>(i), j) /= total;
  }
  return w;
}

// Three well-separated classes on a circle; the standard small world
// used by the training tests.
inline GaussianMixtureSpec small_triangle_mixture(double radius = 2.4,
                                                  double sigma = 1.0) {
  GaussianMixtureSpec spec;
  spec.means.resize(3, 2);
  for (int k = 0; k < 3; ++k) {
    double angle = 2.0 * M_PI * k / 3.0 + M_PI / 2.0;
    spec.means(k, 0) = radius * std::cos(angle);
    spec.means(k, 1) = radius * std::sin(angle);
  }
  spec.sigma = sigma;
  spec.priors = Eigen::VectorXd::Constant(3, 1.0 / 3.0);
  return spec;
}

}  // namespace pll::testing

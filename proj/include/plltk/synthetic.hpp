#pragma once

#include <Eigen/Dense>

#include "plltk/rng.hpp"

namespace pll {

/// Gaussian mixture with one mean per class and a shared isotropic
/// covariance; the single family where every posterior quantity used by
/// the diagnostics is available in closed form.
struct GaussianMixtureSpec {
  Eigen::MatrixXd means;   // c x q
  double sigma = 1.0;      // shared standard deviation, > 0
  Eigen::VectorXd priors;  // c, non-negative, sums to 1

  int num_classes() const { return static_cast<int>(means.rows()); }
  int dim() const { return static_cast<int>(means.cols()); }
  void validate() const;
};

/// Exact class posteriors p(y|x) under the generating mixture.
class PosteriorOracle {
 public:
  explicit PosteriorOracle(GaussianMixtureSpec spec);

  Eigen::MatrixXd posteriors(const Eigen::MatrixXd& X) const;
  // argmax of the posterior, lowest index on ties.
  Eigen::VectorXi bayes_predictions(const Eigen::MatrixXd& X) const;

  const GaussianMixtureSpec& spec() const { return spec_; }

 private:
  GaussianMixtureSpec spec_;
};

struct LabeledSample {
  Eigen::MatrixXd features;
  Eigen::VectorXi labels;
};

/// n i.i.d. draws: class from the priors, then an isotropic Gaussian
/// around the class mean.
LabeledSample sample_mixture(const GaussianMixtureSpec& spec, int n, Rng& rng);

}  // namespace pll

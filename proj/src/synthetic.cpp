#include "plltk/synthetic.hpp"

#include <cmath>

#include "plltk/errors.hpp"
#include "plltk/model.hpp"

namespace pll {

void GaussianMixtureSpec::validate() const {
  if (num_classes() < 2) throw DataError("mixture needs at least 2 classes");
  if (!(sigma > 0.0)) throw DataError("mixture sigma must be positive");
  if (priors.size() != num_classes())
    throw DataError("mixture priors length must match class count");
  double total = 0.0;
  for (int k = 0; k < priors.size(); ++k) {
    if (priors[k] < 0.0) throw DataError("mixture priors must be non-negative");
    total += priors[k];
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw DataError("mixture priors must sum to 1");
  for (int a = 0; a < num_classes(); ++a)
    for (int b = a + 1; b < num_classes(); ++b)
      if (priors[a] > 0.0 && priors[b] > 0.0 &&
          (means.row(a) - means.row(b)).norm() == 0.0)
        throw DataError("mixture has coincident means for active classes");
}

PosteriorOracle::PosteriorOracle(GaussianMixtureSpec spec)
    : spec_(std::move(spec)) {
  spec_.validate();
}

Eigen::MatrixXd PosteriorOracle::posteriors(const Eigen::MatrixXd& X) const {
  const int c = spec_.num_classes();
  const double inv_two_var = 1.0 / (2.0 * spec_.sigma * spec_.sigma);
  Eigen::MatrixXd logits(X.rows(), c);
  for (int k = 0; k < c; ++k) {
    double log_prior =
        spec_.priors[k] > 0.0 ? std::log(spec_.priors[k])
                              : -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      double sq = (X.row(i) - spec_.means.row(k)).squaredNorm();
      logits(i, k) = log_prior - sq * inv_two_var;
    }
  }
  // Zero-prior classes would feed -inf into the softmax; map them to a
  // finite value far below every active class instead.
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    double max_finite = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < c; ++k)
      if (std::isfinite(logits(i, k)))
        max_finite = std::max(max_finite, logits(i, k));
    for (int k = 0; k < c; ++k)
      if (!std::isfinite(logits(i, k))) logits(i, k) = max_finite - 1e3;
  }
  return softmax_rows(logits);
}

Eigen::VectorXi PosteriorOracle::bayes_predictions(const Eigen::MatrixXd& X) const {
  Eigen::MatrixXd post = posteriors(X);
  Eigen::VectorXi out(post.rows());
  for (Eigen::Index i = 0; i < post.rows(); ++i)
    out[i] = argmax_lowest(post.row(i).transpose());
  return out;
}

LabeledSample sample_mixture(const GaussianMixtureSpec& spec, int n, Rng& rng) {
  spec.validate();
  const int c = spec.num_classes();
  const int q = spec.dim();
  LabeledSample out;
  out.features.resize(n, q);
  out.labels.resize(n);
  for (int i = 0; i < n; ++i) {
    double u = rng.uniform();
    int k = c - 1;
    double cum = 0.0;
    for (int j = 0; j < c; ++j) {
      cum += spec.priors[j];
      if (u < cum) {
        k = j;
        break;
      }
    }
    out.labels[i] = k;
    for (int d = 0; d < q; ++d)
      out.features(i, d) = spec.means(k, d) + spec.sigma * rng.normal();
  }
  return out;
}

}  // namespace pll

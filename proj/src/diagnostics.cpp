#include "plltk/diagnostics.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "plltk/model.hpp"

namespace pll {

double margin(const Eigen::VectorXd& posterior_row, int true_label) {
  double second = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < posterior_row.size(); ++j)
    if (j != true_label) second = std::max(second, posterior_row[j]);
  return posterior_row[true_label] - second;
}

Eigen::VectorXd margins(const Eigen::MatrixXd& posteriors,
                        const Eigen::VectorXi& true_labels) {
  Eigen::VectorXd out(posteriors.rows());
  for (Eigen::Index i = 0; i < posteriors.rows(); ++i)
    out[i] = margin(posteriors.row(i).transpose(), true_labels[i]);
  return out;
}

double min_pure_boundary_from_margins(const Eigen::VectorXd& margin_values,
                                      const std::vector<bool>& correct) {
  const Eigen::Index n = margin_values.size();
  if (n == 0) throw std::invalid_argument("empty input");
  if (std::all_of(correct.begin(), correct.end(), [](bool b) { return b; }))
    return 0.0;

  std::vector<int> order(n);
  for (Eigen::Index i = 0; i < n; ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return margin_values[a] > margin_values[b];
  });

  // Walk the distinct margins downward; the level set at a margin is
  // pure exactly while every example seen so far is correct.
  double best = 1.0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double m = margin_values[order[i]];
    bool group_ok = true;
    while (i < order.size() && margin_values[order[i]] == m) {
      group_ok = group_ok && correct[order[i]];
      ++i;
    }
    if (!group_ok) break;
    best = m;
  }
  return best;
}

double min_pure_boundary(const Eigen::VectorXi& predictions,
                         const Eigen::MatrixXd& posteriors,
                         const Eigen::VectorXi& true_labels) {
  if (predictions.size() != posteriors.rows() ||
      predictions.size() != true_labels.size())
    throw std::invalid_argument("misaligned inputs");
  std::vector<bool> correct(predictions.size());
  for (Eigen::Index i = 0; i < predictions.size(); ++i)
    correct[i] = predictions[i] == true_labels[i];
  return min_pure_boundary_from_margins(margins(posteriors, true_labels),
                                        correct);
}

double bayes_agreement(const Eigen::VectorXi& predictions,
                       const Eigen::VectorXi& bayes_predictions) {
  if (predictions.size() == 0) throw std::invalid_argument("empty input");
  if (predictions.size() != bayes_predictions.size())
    throw std::invalid_argument("misaligned inputs");
  int agree = 0;
  for (Eigen::Index i = 0; i < predictions.size(); ++i)
    if (predictions[i] == bayes_predictions[i]) ++agree;
  return static_cast<double>(agree) / static_cast<double>(predictions.size());
}

DensityRatioEstimate estimate_density_ratio(const std::vector<double>& margins,
                                            int bin_count) {
  if (bin_count < 2) throw std::invalid_argument("need at least 2 bins");
  if (margins.empty()) throw std::invalid_argument("empty input");
  std::vector<long> counts(bin_count, 0);
  for (double u : margins) {
    if (u < 0.0 || u > 1.0)
      throw std::invalid_argument("margins must lie in [0, 1]");
    int bin = std::min(bin_count - 1, static_cast<int>(u * bin_count));
    ++counts[bin];
  }
  const double bin_width = 1.0 / bin_count;
  const double n = static_cast<double>(margins.size());

  DensityRatioEstimate est;
  int occupied = 0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (long cnt : counts) {
    if (cnt == 0) continue;
    ++occupied;
    double density = (cnt / n) / bin_width;
    lo = std::min(lo, density);
    hi = std::max(hi, density);
  }
  if (occupied < 2) {
    est.min_density = est.max_density = occupied == 1 ? hi : 0.0;
    est.ratio = 1.0;
    est.degenerate = true;
    return est;
  }
  est.min_density = lo;
  est.max_density = hi;
  est.ratio = hi / lo;
  return est;
}

double estimate_flip_proportionality(const Eigen::MatrixXd& flip_probs,
                                     const Eigen::MatrixXd& posteriors,
                                     const Eigen::VectorXi& true_labels) {
  double t_hat = 0.0;
  for (Eigen::Index i = 0; i < flip_probs.rows(); ++i)
    for (Eigen::Index j = 0; j < flip_probs.cols(); ++j) {
      if (j == true_labels[i]) continue;
      const double xi = flip_probs(i, j);
      const double post = posteriors(i, j);
      if (xi == 0.0) continue;
      t_hat = post > 0.0 ? std::max(t_hat, xi / post)
                         : std::numeric_limits<double>::infinity();
    }
  return t_hat;
}

}  // namespace pll

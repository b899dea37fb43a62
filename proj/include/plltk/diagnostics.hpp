#pragma once

#include <Eigen/Dense>
#include <vector>

namespace pll {

/// Posterior of the true label minus the largest posterior among the
/// other labels; negative when the true label is not the argmax.
double margin(const Eigen::VectorXd& posterior_row, int true_label);

Eigen::VectorXd margins(const Eigen::MatrixXd& posteriors,
                        const Eigen::VectorXi& true_labels);

/// Smallest margin value e, over the grid of observed distinct margins,
/// such that every example with margin >= e is predicted correctly.
/// 0 when all examples are correct; 1 when no grid value works.
double min_pure_boundary(const Eigen::VectorXi& predictions,
                         const Eigen::MatrixXd& posteriors,
                         const Eigen::VectorXi& true_labels);
double min_pure_boundary_from_margins(const Eigen::VectorXd& margins,
                                      const std::vector<bool>& correct);

/// Fraction of positions where the two prediction vectors agree.
double bayes_agreement(const Eigen::VectorXi& predictions,
                       const Eigen::VectorXi& bayes_predictions);

struct DensityRatioEstimate {
  double min_density = 0.0;  // over occupied bins
  double max_density = 0.0;
  double ratio = 1.0;        // max / min
  bool degenerate = false;   // fewer than 2 occupied bins
};

/// Histogram density of the margins over [0, 1]; empty bins are
/// excluded from the extremes.
DensityRatioEstimate estimate_density_ratio(const std::vector<double>& margins,
                                            int bin_count);

/// Largest ratio of an incorrect label's inclusion probability to its
/// posterior; the proportionality diagnostic for instance-dependent
/// generation. Ratios with zero posterior and zero inclusion count as 0.
double estimate_flip_proportionality(const Eigen::MatrixXd& flip_probs,
                                     const Eigen::MatrixXd& posteriors,
                                     const Eigen::VectorXi& true_labels);

}  // namespace pll

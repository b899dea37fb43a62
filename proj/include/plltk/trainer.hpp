#pragma once

#include <Eigen/Dense>
#include <vector>

#include "plltk/candidate_set.hpp"
#include "plltk/losses.hpp"
#include "plltk/model.hpp"
#include "plltk/optimizer.hpp"
#include "plltk/rng.hpp"

namespace pll {

struct EpochStats {
  double mean_loss = 0.0;
};

/// One epoch of shuffled mini-batch training on partial labels.
///
/// Per-example weights are frozen per batch before the gradient step:
/// proden uses the stored confidence rows (last refreshed from the
/// previous epoch's snapshot), rc and lws derive rows from the batch's
/// current probabilities, cavl picks its one-hot row from the batch's
/// current activation values. cc and clpl need no weights. The stored
/// confidence matrix itself is refreshed by the caller between epochs.
EpochStats train_epoch(ScoringModel& model, SgdOptimizer& opt,
                       const Eigen::MatrixXd& X,
                       const std::vector<CandidateSet>& sets,
                       const ConfidenceMatrix& confidences,
                       const PllLossConfig& loss, Rng& rng);

/// One epoch of shuffled mini-batch training with exact labels
/// (softmax cross entropy). Used for annotator training and controls.
EpochStats train_epoch_supervised(ScoringModel& model, SgdOptimizer& opt,
                                  const Eigen::MatrixXd& X,
                                  const Eigen::VectorXi& labels, Rng& rng);

/// Loss functional for one batch of partial-label examples with frozen
/// weight rows; exposed for gradient checking.
ExampleLoss make_batch_loss(const PllLossConfig& loss,
                            const std::vector<const CandidateSet*>& sets,
                            const Eigen::MatrixXd& frozen_weights);

double accuracy(const Eigen::VectorXi& predictions, const std::vector<int>& labels);
double accuracy(const Eigen::VectorXi& predictions, const Eigen::VectorXi& labels);
// Fraction of predictions that land inside the example's candidate set.
double candidate_hit_rate(const Eigen::VectorXi& predictions,
                          const std::vector<CandidateSet>& sets);

}  // namespace pll

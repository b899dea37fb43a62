#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "plltk/candidate_set.hpp"

namespace pll {

enum class PllLossKind { kProden, kRc, kCc, kLws, kCavl, kClpl };

PllLossKind parse_loss_kind(const std::string& name);
std::string to_string(PllLossKind kind);

struct PllLossConfig {
  PllLossKind kind = PllLossKind::kProden;
  double lws_beta = 1.0;  // trade-off on the non-candidate term, > 0
};

// Probabilities are clamped here before any log so losses stay finite.
inline constexpr double kLogClamp = 1e-12;

struct WeightedLossResult {
  double loss;
  Eigen::VectorXd new_weights;  // supported on the candidate set, sums to 1
};

/// Confidence-weighted cross entropy over the candidate set. The loss
/// uses the incoming weights; the refreshed weights are the probability
/// row restricted to the candidate set and renormalized.
WeightedLossResult proden_loss(const Eigen::VectorXd& probs,
                               const CandidateSet& s,
                               const Eigen::VectorXd& weights);

/// Same functional form as proden_loss, but the weights entering the
/// loss are refreshed from the current probabilities first.
WeightedLossResult rc_loss(const Eigen::VectorXd& probs, const CandidateSet& s,
                           const Eigen::VectorXd& weights);

/// -log of the total probability mass inside the candidate set.
double cc_loss(const Eigen::VectorXd& probs, const CandidateSet& s);

/// Candidate term: confidence-weighted -log p_j with weights derived
/// from the current probabilities (restricted to the set, normalized).
/// Non-candidate term: beta-scaled -log(1 - p_j), weighted uniformly by
/// 1/(c - |S|); it is an empty sum when the set is full.
double lws_loss(const Eigen::VectorXd& probs, const CandidateSet& s,
                double beta);

/// One-hot weights on the candidate label with the largest class
/// activation value |p_j * logit_j| (ties to the lowest index).
Eigen::VectorXd cavl_weights(const Eigen::VectorXd& logits,
                             const CandidateSet& s);

/// Squared-hinge loss on raw scores: psi(mean of scores inside the set)
/// plus psi(-score) over the non-candidates, psi(u) = max(0, 1-u)^2.
double clpl_loss(const Eigen::VectorXd& scores, const CandidateSet& s);

/// Per-example label weights w_ij, zero outside the candidate set and
/// summing to 1 over it. Initialized uniform over each set.
class ConfidenceMatrix {
 public:
  static ConfidenceMatrix uniform(const std::vector<CandidateSet>& sets);

  int rows() const { return static_cast<int>(w_.rows()); }
  int cols() const { return static_cast<int>(w_.cols()); }
  const Eigen::MatrixXd& values() const { return w_; }
  Eigen::VectorXd row(int i) const { return w_.row(i).transpose(); }

  // Replaces row i with probabilities restricted to the set, normalized.
  void refresh_from_probabilities(int i, const Eigen::VectorXd& probs,
                                  const CandidateSet& s);
  // Zeroes entries outside the (shrunken) set and renormalizes what is
  // left; falls back to uniform over the set if nothing is left.
  void renormalize(int i, const CandidateSet& s);

  void validate(const std::vector<CandidateSet>& sets) const;

 private:
  explicit ConfidenceMatrix(Eigen::MatrixXd w) : w_(std::move(w)) {}
  Eigen::MatrixXd w_;
};

}  // namespace pll

#include "plltk/losses.hpp"

#include <cmath>
#include <stdexcept>

#include "plltk/errors.hpp"
#include "plltk/model.hpp"

namespace pll {

PllLossKind parse_loss_kind(const std::string& name) {
  if (name == "proden") return PllLossKind::kProden;
  if (name == "rc") return PllLossKind::kRc;
  if (name == "cc") return PllLossKind::kCc;
  if (name == "lws") return PllLossKind::kLws;
  if (name == "cavl") return PllLossKind::kCavl;
  if (name == "clpl") return PllLossKind::kClpl;
  throw ConfigError("unknown loss kind '" + name +
                    "' (expected proden|rc|cc|lws|cavl|clpl)");
}

std::string to_string(PllLossKind kind) {
  switch (kind) {
    case PllLossKind::kProden: return "proden";
    case PllLossKind::kRc: return "rc";
    case PllLossKind::kCc: return "cc";
    case PllLossKind::kLws: return "lws";
    case PllLossKind::kCavl: return "cavl";
    case PllLossKind::kClpl: return "clpl";
  }
  return "?";
}

namespace {

double neg_log(double p) { return -std::log(std::max(p, kLogClamp)); }

Eigen::VectorXd normalized_over_set(const Eigen::VectorXd& probs,
                                    const CandidateSet& s) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(probs.size());
  double total = 0.0;
  for (int j : s.labels()) total += probs[j];
  if (total <= 0.0) {
    for (int j : s.labels()) w[j] = 1.0 / s.count();
    return w;
  }
  for (int j : s.labels()) w[j] = probs[j] / total;
  return w;
}

}  // namespace

WeightedLossResult proden_loss(const Eigen::VectorXd& probs,
                               const CandidateSet& s,
                               const Eigen::VectorXd& weights) {
  double loss = 0.0;
  for (int j : s.labels()) loss += weights[j] * neg_log(probs[j]);
  return {loss, normalized_over_set(probs, s)};
}

WeightedLossResult rc_loss(const Eigen::VectorXd& probs, const CandidateSet& s,
                           const Eigen::VectorXd& /*weights*/) {
  Eigen::VectorXd w = normalized_over_set(probs, s);
  double loss = 0.0;
  for (int j : s.labels()) loss += w[j] * neg_log(probs[j]);
  return {loss, std::move(w)};
}

double cc_loss(const Eigen::VectorXd& probs, const CandidateSet& s) {
  double inside = 0.0;
  for (int j : s.labels()) inside += probs[j];
  // rounding can push the mass of a full set a hair above 1
  return neg_log(std::min(inside, 1.0));
}

double lws_loss(const Eigen::VectorXd& probs, const CandidateSet& s,
                double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("lws beta must be positive");
  Eigen::VectorXd w = normalized_over_set(probs, s);
  double loss = 0.0;
  for (int j : s.labels()) loss += w[j] * neg_log(probs[j]);
  const int outside = s.num_labels() - s.count();
  if (outside > 0) {
    const double w_out = 1.0 / outside;
    for (int j = 0; j < s.num_labels(); ++j)
      if (!s.contains(j)) loss += beta * w_out * neg_log(1.0 - probs[j]);
  }
  return loss;
}

Eigen::VectorXd cavl_weights(const Eigen::VectorXd& logits,
                             const CandidateSet& s) {
  Eigen::VectorXd probs = softmax(logits);
  int best = -1;
  double best_value = -1.0;
  for (int j : s.labels()) {
    double value = std::abs(probs[j] * logits[j]);
    if (value > best_value) {  // ties resolve to the lowest index
      best_value = value;
      best = j;
    }
  }
  Eigen::VectorXd w = Eigen::VectorXd::Zero(logits.size());
  w[best] = 1.0;
  return w;
}

double clpl_loss(const Eigen::VectorXd& scores, const CandidateSet& s) {
  auto psi = [](double u) {
    double m = std::max(0.0, 1.0 - u);
    return m * m;
  };
  double mean_inside = 0.0;
  for (int j : s.labels()) mean_inside += scores[j];
  mean_inside /= s.count();
  double loss = psi(mean_inside);
  for (int j = 0; j < s.num_labels(); ++j)
    if (!s.contains(j)) loss += psi(-scores[j]);
  return loss;
}

ConfidenceMatrix ConfidenceMatrix::uniform(const std::vector<CandidateSet>& sets) {
  const int n = static_cast<int>(sets.size());
  const int c = n > 0 ? sets.front().num_labels() : 0;
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, c);
  for (int i = 0; i < n; ++i)
    for (int j : sets[i].labels()) w(i, j) = 1.0 / sets[i].count();
  return ConfidenceMatrix(std::move(w));
}

void ConfidenceMatrix::refresh_from_probabilities(int i,
                                                  const Eigen::VectorXd& probs,
                                                  const CandidateSet& s) {
  w_.row(i) = normalized_over_set(probs, s).transpose();
}

void ConfidenceMatrix::renormalize(int i, const CandidateSet& s) {
  double total = 0.0;
  for (int j = 0; j < cols(); ++j) {
    if (!s.contains(j)) w_(i, j) = 0.0;
    total += w_(i, j);
  }
  if (total <= 0.0) {
    for (int j : s.labels()) w_(i, j) = 1.0 / s.count();
  } else {
    w_.row(i) /= total;
  }
}

void ConfidenceMatrix::validate(const std::vector<CandidateSet>& sets) const {
  for (int i = 0; i < rows(); ++i) {
    double total = 0.0;
    for (int j = 0; j < cols(); ++j) {
      if (!sets[i].contains(j) && w_(i, j) != 0.0)
        throw DataError("confidence weight outside the candidate set");
      total += w_(i, j);
    }
    if (std::abs(total - 1.0) > 1e-9)
      throw DataError("confidence row does not sum to 1");
  }
}

}  // namespace pll

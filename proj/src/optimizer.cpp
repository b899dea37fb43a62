#include "plltk/optimizer.hpp"

#include <stdexcept>

namespace pll {

SgdOptimizer::SgdOptimizer(const ScoringModel& model, const OptimizerConfig& cfg)
    : cfg_(cfg) {
  if (cfg.momentum < 0.0 || cfg.momentum >= 1.0)
    throw std::invalid_argument("momentum must lie in [0, 1)");
  if (cfg.learning_rate < 0.0)
    throw std::invalid_argument("learning rate must be non-negative");
  if (cfg.weight_decay < 0.0)
    throw std::invalid_argument("weight decay must be non-negative");
  if (cfg.momentum > 0.0) {
    for (const auto& w : model.weight_matrices())
      vel_weights_.emplace_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
    for (const auto& b : model.bias_vectors())
      vel_biases_.emplace_back(Eigen::VectorXd::Zero(b.size()));
  }
}

void SgdOptimizer::step(ScoringModel& model, const Gradients& grads) {
  auto& ws = model.weight_matrices();
  auto& bs = model.bias_vectors();
  for (std::size_t l = 0; l < ws.size(); ++l) {
    Eigen::MatrixXd gw = grads.weights[l] + cfg_.weight_decay * ws[l];
    Eigen::VectorXd gb = grads.biases[l] + cfg_.weight_decay * bs[l];
    if (cfg_.momentum > 0.0) {
      vel_weights_[l] = cfg_.momentum * vel_weights_[l] + gw;
      vel_biases_[l] = cfg_.momentum * vel_biases_[l] + gb;
      ws[l] -= cfg_.learning_rate * vel_weights_[l];
      bs[l] -= cfg_.learning_rate * vel_biases_[l];
    } else {
      ws[l] -= cfg_.learning_rate * gw;
      bs[l] -= cfg_.learning_rate * gb;
    }
  }
}

}  // namespace pll

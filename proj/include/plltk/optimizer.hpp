#pragma once

#include <vector>

#include "plltk/model.hpp"

namespace pll {

struct OptimizerConfig {
  double learning_rate = 0.05;
  double momentum = 0.9;      // in [0, 1)
  double weight_decay = 1e-4;
  int batch_size = 256;
};

/// SGD with classical momentum and decoupled-from-nothing weight decay:
/// g <- g + wd * p; v <- mu * v + g; p <- p - lr * v.
/// Velocity buffers exist iff momentum > 0 and always mirror the
/// parameter shapes.
class SgdOptimizer {
 public:
  SgdOptimizer(const ScoringModel& model, const OptimizerConfig& cfg);

  void step(ScoringModel& model, const Gradients& grads);

  const OptimizerConfig& config() const { return cfg_; }
  bool has_velocity() const { return !vel_weights_.empty(); }
  const std::vector<Eigen::MatrixXd>& velocity_weights() const { return vel_weights_; }

 private:
  OptimizerConfig cfg_;
  std::vector<Eigen::MatrixXd> vel_weights_;
  std::vector<Eigen::VectorXd> vel_biases_;
};

}  // namespace pll

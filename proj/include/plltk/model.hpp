#pragma once

#include <Eigen/Dense>
#include <functional>
#include <utility>
#include <vector>

#include "plltk/rng.hpp"

namespace pll {

enum class Activation { kRelu, kNone };

struct LayerShape {
  int fan_in = 0;
  int fan_out = 0;
  Activation activation = Activation::kNone;
};

struct Gradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
};

/// Dense feed-forward scoring model with a softmax link on the output.
/// The layer structure is fixed at construction; only parameter values
/// change afterwards. Weight matrices are [fan_out x fan_in].
class ScoringModel {
 public:
  static ScoringModel linear(int inputs, int classes);
  static ScoringModel mlp(int inputs, const std::vector<int>& hidden, int classes);

  // Glorot-uniform weights (range sqrt(6/(fan_in+fan_out))), zero biases.
  void init_params(Rng& rng);

  int fan_in() const { return shapes_.front().fan_in; }
  int num_classes() const { return shapes_.back().fan_out; }
  const std::vector<LayerShape>& layers() const { return shapes_; }

  // Raw output-layer scores (logits), one row per example.
  Eigen::MatrixXd scores(const Eigen::MatrixXd& X) const;
  // Softmax of the scores; every row lies on the simplex.
  Eigen::MatrixXd probabilities(const Eigen::MatrixXd& X) const;
  // Per row, the lowest index attaining the maximum probability.
  Eigen::VectorXi predict(const Eigen::MatrixXd& X) const;

  std::vector<Eigen::MatrixXd>& weight_matrices() { return weights_; }
  std::vector<Eigen::VectorXd>& bias_vectors() { return biases_; }
  const std::vector<Eigen::MatrixXd>& weight_matrices() const { return weights_; }
  const std::vector<Eigen::VectorXd>& bias_vectors() const { return biases_; }

  Gradients zero_gradients() const;
  std::size_t parameter_count() const;

 private:
  explicit ScoringModel(std::vector<LayerShape> shapes);
  void check_input(const Eigen::MatrixXd& X) const;

  std::vector<LayerShape> shapes_;
  std::vector<Eigen::MatrixXd> weights_;
  std::vector<Eigen::VectorXd> biases_;

  friend std::pair<double, Gradients> loss_and_grad(
      const ScoringModel&, const Eigen::MatrixXd&,
      const std::function<double(int, const Eigen::VectorXd&,
                                 const Eigen::VectorXd&, Eigen::VectorXd&)>&);
};

/// Per-example loss functional. Receives the example's batch index, its
/// logit row and softmax row, returns the loss and fills dL/dlogits.
using ExampleLoss =
    std::function<double(int index, const Eigen::VectorXd& logits,
                         const Eigen::VectorXd& probs, Eigen::VectorXd& dlogits)>;

/// Mean loss over the batch and analytic gradients of that mean.
/// Throws NumericError naming the offending example when a loss or
/// gradient entry is non-finite.
std::pair<double, Gradients> loss_and_grad(const ScoringModel& model,
                                           const Eigen::MatrixXd& X,
                                           const ExampleLoss& example_loss);

// Numerically stable helpers shared across modules.
Eigen::VectorXd softmax(const Eigen::VectorXd& logits);
Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits);
int argmax_lowest(const Eigen::VectorXd& v);
// Maps dL/dprobs to dL/dlogits through the softmax Jacobian at probs.
Eigen::VectorXd softmax_backward(const Eigen::VectorXd& probs,
                                 const Eigen::VectorXd& dprobs);

}  // namespace pll

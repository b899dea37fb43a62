#include "plltk/model.hpp"

#include <cmath>
#include <sstream>

#include "plltk/errors.hpp"

namespace pll {

ScoringModel::ScoringModel(std::vector<LayerShape> shapes)
    : shapes_(std::move(shapes)) {
  weights_.reserve(shapes_.size());
  biases_.reserve(shapes_.size());
  for (const auto& s : shapes_) {
    weights_.emplace_back(Eigen::MatrixXd::Zero(s.fan_out, s.fan_in));
    biases_.emplace_back(Eigen::VectorXd::Zero(s.fan_out));
  }
}

ScoringModel ScoringModel::linear(int inputs, int classes) {
  return ScoringModel({{inputs, classes, Activation::kNone}});
}

ScoringModel ScoringModel::mlp(int inputs, const std::vector<int>& hidden,
                               int classes) {
  std::vector<LayerShape> shapes;
  int in = inputs;
  for (int h : hidden) {
    shapes.push_back({in, h, Activation::kRelu});
    in = h;
  }
  shapes.push_back({in, classes, Activation::kNone});
  return ScoringModel(std::move(shapes));
}

void ScoringModel::init_params(Rng& rng) {
  for (std::size_t l = 0; l < shapes_.size(); ++l) {
    const auto& s = shapes_[l];
    double bound = std::sqrt(6.0 / (s.fan_in + s.fan_out));
    for (int r = 0; r < s.fan_out; ++r)
      for (int c = 0; c < s.fan_in; ++c)
        weights_[l](r, c) = rng.uniform(-bound, bound);
    biases_[l].setZero();
  }
}

void ScoringModel::check_input(const Eigen::MatrixXd& X) const {
  if (X.cols() != fan_in()) {
    std::ostringstream msg;
    msg << "input has " << X.cols() << " features but the model expects "
        << fan_in() << " (input shape " << X.rows() << "x" << X.cols() << ")";
    throw DataError(msg.str());
  }
}

Eigen::MatrixXd ScoringModel::scores(const Eigen::MatrixXd& X) const {
  check_input(X);
  Eigen::MatrixXd h = X;
  for (std::size_t l = 0; l < shapes_.size(); ++l) {
    h = (h * weights_[l].transpose()).rowwise() + biases_[l].transpose();
    if (shapes_[l].activation == Activation::kRelu)
      h = h.cwiseMax(0.0);
  }
  return h;
}

Eigen::MatrixXd ScoringModel::probabilities(const Eigen::MatrixXd& X) const {
  return softmax_rows(scores(X));
}

Eigen::VectorXi ScoringModel::predict(const Eigen::MatrixXd& X) const {
  Eigen::MatrixXd z = scores(X);
  Eigen::VectorXi out(z.rows());
  for (Eigen::Index i = 0; i < z.rows(); ++i)
    out[i] = argmax_lowest(z.row(i).transpose());
  return out;
}

Gradients ScoringModel::zero_gradients() const {
  Gradients g;
  for (const auto& s : shapes_) {
    g.weights.emplace_back(Eigen::MatrixXd::Zero(s.fan_out, s.fan_in));
    g.biases.emplace_back(Eigen::VectorXd::Zero(s.fan_out));
  }
  return g;
}

std::size_t ScoringModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto& s : shapes_)
    n += static_cast<std::size_t>(s.fan_out) * (s.fan_in + 1);
  return n;
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  Eigen::VectorXd z = logits.array() - logits.maxCoeff();
  Eigen::VectorXd e = z.array().exp();
  return e / e.sum();
}

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd out(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i)
    out.row(i) = softmax(logits.row(i).transpose()).transpose();
  return out;
}

int argmax_lowest(const Eigen::VectorXd& v) {
  int best = 0;
  for (int j = 1; j < v.size(); ++j)
    if (v[j] > v[best]) best = j;
  return best;
}

Eigen::VectorXd softmax_backward(const Eigen::VectorXd& probs,
                                 const Eigen::VectorXd& dprobs) {
  double dot = probs.dot(dprobs);
  return probs.array() * (dprobs.array() - dot);
}

std::pair<double, Gradients> loss_and_grad(const ScoringModel& model,
                                           const Eigen::MatrixXd& X,
                                           const ExampleLoss& example_loss) {
  model.check_input(X);
  const auto& shapes = model.shapes_;
  const Eigen::Index n = X.rows();
  const std::size_t depth = shapes.size();

  // Forward pass, keeping each layer's input and pre-activation.
  std::vector<Eigen::MatrixXd> inputs(depth);   // input to layer l
  std::vector<Eigen::MatrixXd> preacts(depth);  // pre-activation of layer l
  Eigen::MatrixXd h = X;
  for (std::size_t l = 0; l < depth; ++l) {
    inputs[l] = h;
    preacts[l] =
        (h * model.weights_[l].transpose()).rowwise() + model.biases_[l].transpose();
    h = shapes[l].activation == Activation::kRelu ? preacts[l].cwiseMax(0.0)
                                                  : preacts[l];
  }
  const Eigen::MatrixXd& logits = h;

  double total_loss = 0.0;
  Eigen::MatrixXd dlogits(n, model.num_classes());
  Eigen::VectorXd dz(model.num_classes());
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd z = logits.row(i).transpose();
    Eigen::VectorXd p = softmax(z);
    dz.setZero();
    double li = example_loss(static_cast<int>(i), z, p, dz);
    if (!std::isfinite(li) || !dz.allFinite())
      throw NumericError("non-finite loss or gradient", i);
    total_loss += li;
    dlogits.row(i) = dz.transpose();
  }

  // Backward pass on the batch mean.
  Gradients grads = model.zero_gradients();
  Eigen::MatrixXd delta = dlogits / static_cast<double>(n);
  for (std::size_t l = depth; l-- > 0;) {
    if (shapes[l].activation == Activation::kRelu)
      delta = delta.array() * (preacts[l].array() > 0.0).cast<double>();
    grads.weights[l] = delta.transpose() * inputs[l];
    grads.biases[l] = delta.colwise().sum().transpose();
    if (l > 0) delta = delta * model.weights_[l];
  }
  for (std::size_t l = 0; l < depth; ++l)
    if (!grads.weights[l].allFinite() || !grads.biases[l].allFinite())
      throw NumericError("non-finite accumulated gradient", -1);

  return {total_loss / static_cast<double>(n), std::move(grads)};
}

}  // namespace pll

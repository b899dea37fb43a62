#include "plltk/trainer.hpp"

#include <cmath>
#include <numeric>

namespace pll {

namespace {

double neg_log(double p) { return -std::log(std::max(p, kLogClamp)); }

// Weighted cross entropy against a frozen weight row; dL/dz = p - w.
double weighted_ce(const Eigen::VectorXd& probs, const Eigen::VectorXd& w,
                   Eigen::VectorXd& dz) {
  double loss = 0.0;
  for (int j = 0; j < w.size(); ++j)
    if (w[j] != 0.0) loss += w[j] * neg_log(probs[j]);
  dz = probs - w;
  return loss;
}

}  // namespace

ExampleLoss make_batch_loss(const PllLossConfig& loss,
                            const std::vector<const CandidateSet*>& sets,
                            const Eigen::MatrixXd& frozen_weights) {
  switch (loss.kind) {
    case PllLossKind::kProden:
    case PllLossKind::kRc:
    case PllLossKind::kCavl:
      return [frozen_weights](int i, const Eigen::VectorXd&,
                              const Eigen::VectorXd& p, Eigen::VectorXd& dz) {
        return weighted_ce(p, frozen_weights.row(i).transpose(), dz);
      };
    case PllLossKind::kCc:
      return [sets](int i, const Eigen::VectorXd&, const Eigen::VectorXd& p,
                     Eigen::VectorXd& dz) {
        const CandidateSet& s = *sets[i];
        double inside = 0.0;
        for (int j : s.labels()) inside += p[j];
        Eigen::VectorXd g = Eigen::VectorXd::Zero(p.size());
        if (inside > kLogClamp)
          for (int j : s.labels()) g[j] = -1.0 / inside;
        dz = softmax_backward(p, g);
        return neg_log(std::min(inside, 1.0));
      };
    case PllLossKind::kLws: {
      const double beta = loss.lws_beta;
      return [sets, frozen_weights, beta](int i, const Eigen::VectorXd&,
                                           const Eigen::VectorXd& p,
                                           Eigen::VectorXd& dz) {
        const CandidateSet& s = *sets[i];
        const Eigen::VectorXd w = frozen_weights.row(i).transpose();
        double value = 0.0;
        Eigen::VectorXd g = Eigen::VectorXd::Zero(p.size());
        for (int j : s.labels()) {
          value += w[j] * neg_log(p[j]);
          if (p[j] > kLogClamp) g[j] = -w[j] / p[j];
        }
        const int outside = s.num_labels() - s.count();
        if (outside > 0) {
          const double w_out = 1.0 / outside;
          for (int j = 0; j < s.num_labels(); ++j) {
            if (s.contains(j)) continue;
            value += beta * w_out * neg_log(1.0 - p[j]);
            if (1.0 - p[j] > kLogClamp)
              g[j] += beta * w_out / (1.0 - p[j]);
          }
        }
        dz = softmax_backward(p, g);
        return value;
      };
    }
    case PllLossKind::kClpl:
      return [sets](int i, const Eigen::VectorXd& z, const Eigen::VectorXd&,
                     Eigen::VectorXd& dz) {
        const CandidateSet& s = *sets[i];
        dz.setZero();
        double mean_inside = 0.0;
        for (int j : s.labels()) mean_inside += z[j];
        mean_inside /= s.count();
        double m = std::max(0.0, 1.0 - mean_inside);
        double value = m * m;
        for (int j : s.labels()) dz[j] = -2.0 * m / s.count();
        for (int j = 0; j < s.num_labels(); ++j) {
          if (s.contains(j)) continue;
          double mo = std::max(0.0, 1.0 + z[j]);
          value += mo * mo;
          dz[j] += 2.0 * mo;
        }
        return value;
      };
  }
  throw std::logic_error("unhandled loss kind");
}

namespace {

// Frozen weight rows for one batch, per the kind's refresh semantics.
Eigen::MatrixXd freeze_batch_weights(const ScoringModel& model,
                                     const PllLossConfig& loss,
                                     const Eigen::MatrixXd& Xb,
                                     const std::vector<const CandidateSet*>& sets,
                                     const ConfidenceMatrix& confidences,
                                     const std::vector<int>& batch_indices) {
  const int b = static_cast<int>(batch_indices.size());
  switch (loss.kind) {
    case PllLossKind::kProden: {
      Eigen::MatrixXd w(b, confidences.cols());
      for (int i = 0; i < b; ++i)
        w.row(i) = confidences.values().row(batch_indices[i]);
      return w;
    }
    case PllLossKind::kRc:
    case PllLossKind::kLws: {
      Eigen::MatrixXd p = model.probabilities(Xb);
      Eigen::MatrixXd w = Eigen::MatrixXd::Zero(b, p.cols());
      for (int i = 0; i < b; ++i) {
        double total = 0.0;
        for (int j : sets[i]->labels()) total += p(i, j);
        for (int j : sets[i]->labels())
          w(i, j) = total > 0.0 ? p(i, j) / total : 1.0 / sets[i]->count();
      }
      return w;
    }
    case PllLossKind::kCavl: {
      Eigen::MatrixXd z = model.scores(Xb);
      Eigen::MatrixXd w(b, z.cols());
      for (int i = 0; i < b; ++i)
        w.row(i) = cavl_weights(z.row(i).transpose(), *sets[i]).transpose();
      return w;
    }
    case PllLossKind::kCc:
    case PllLossKind::kClpl:
      return Eigen::MatrixXd();
  }
  throw std::logic_error("unhandled loss kind");
}

}  // namespace

EpochStats train_epoch(ScoringModel& model, SgdOptimizer& opt,
                       const Eigen::MatrixXd& X,
                       const std::vector<CandidateSet>& sets,
                       const ConfidenceMatrix& confidences,
                       const PllLossConfig& loss, Rng& rng) {
  const int n = static_cast<int>(X.rows());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);

  const int batch = std::max(1, opt.config().batch_size);
  double loss_sum = 0.0;
  for (int start = 0; start < n; start += batch) {
    const int b = std::min(batch, n - start);
    Eigen::MatrixXd Xb(b, X.cols());
    std::vector<const CandidateSet*> batch_sets(b);
    std::vector<int> batch_indices(b);
    for (int i = 0; i < b; ++i) {
      int idx = order[start + i];
      Xb.row(i) = X.row(idx);
      batch_sets[i] = &sets[idx];
      batch_indices[i] = idx;
    }
    Eigen::MatrixXd frozen = freeze_batch_weights(model, loss, Xb, batch_sets,
                                                  confidences, batch_indices);
    auto [mean_loss, grads] =
        loss_and_grad(model, Xb, make_batch_loss(loss, batch_sets, frozen));
    opt.step(model, grads);
    loss_sum += mean_loss * b;
  }
  return {loss_sum / n};
}

EpochStats train_epoch_supervised(ScoringModel& model, SgdOptimizer& opt,
                                  const Eigen::MatrixXd& X,
                                  const Eigen::VectorXi& labels, Rng& rng) {
  const int n = static_cast<int>(X.rows());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);

  const int batch = std::max(1, opt.config().batch_size);
  double loss_sum = 0.0;
  for (int start = 0; start < n; start += batch) {
    const int b = std::min(batch, n - start);
    Eigen::MatrixXd Xb(b, X.cols());
    std::vector<int> yb(b);
    for (int i = 0; i < b; ++i) {
      Xb.row(i) = X.row(order[start + i]);
      yb[i] = labels[order[start + i]];
    }
    auto ce = [&yb](int i, const Eigen::VectorXd&, const Eigen::VectorXd& p,
                    Eigen::VectorXd& dz) {
      dz = p;
      dz[yb[i]] -= 1.0;
      return neg_log(p[yb[i]]);
    };
    auto [mean_loss, grads] = loss_and_grad(model, Xb, ce);
    opt.step(model, grads);
    loss_sum += mean_loss * b;
  }
  return {loss_sum / n};
}

double accuracy(const Eigen::VectorXi& predictions, const std::vector<int>& labels) {
  int hits = 0;
  for (Eigen::Index i = 0; i < predictions.size(); ++i)
    if (predictions[i] == labels[i]) ++hits;
  return predictions.size() == 0
             ? 0.0
             : static_cast<double>(hits) / static_cast<double>(predictions.size());
}

double accuracy(const Eigen::VectorXi& predictions, const Eigen::VectorXi& labels) {
  int hits = 0;
  for (Eigen::Index i = 0; i < predictions.size(); ++i)
    if (predictions[i] == labels[i]) ++hits;
  return predictions.size() == 0
             ? 0.0
             : static_cast<double>(hits) / static_cast<double>(predictions.size());
}

double candidate_hit_rate(const Eigen::VectorXi& predictions,
                          const std::vector<CandidateSet>& sets) {
  int hits = 0;
  for (Eigen::Index i = 0; i < predictions.size(); ++i)
    if (sets[i].contains(predictions[i])) ++hits;
  return predictions.size() == 0
             ? 0.0
             : static_cast<double>(hits) / static_cast<double>(predictions.size());
}

}  // namespace pll

#include "plltk/purify.hpp"

#include <cassert>
#include <stdexcept>

#include "plltk/diagnostics.hpp"
#include "plltk/errors.hpp"
#include "plltk/trainer.hpp"

namespace pll {

void PurificationSchedule::validate() const {
  if (!(initial_threshold > 0.0 && initial_threshold < 1.0))
    throw ConfigError("initial threshold must lie in (0, 1)");
  if (!(end_threshold > 0.0 && end_threshold <= initial_threshold))
    throw ConfigError("end threshold must lie in (0, initial threshold]");
  if (!(step > 0.0)) throw ConfigError("threshold step must be positive");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (rounds < 0) throw ConfigError("round budget must be non-negative");
  if (warmup_rounds < 0) throw ConfigError("warm-up rounds must be non-negative");
}

int purify_round(const Eigen::MatrixXd& probs, std::vector<CandidateSet>& sets,
                 double threshold, double epsilon,
                 std::vector<RemovalEvent>* events) {
  if (probs.rows() != static_cast<Eigen::Index>(sets.size()))
    throw DataError("probability snapshot does not match the candidate sets");
  const double gap = threshold + epsilon;
  int removals = 0;
  for (int i = 0; i < static_cast<int>(sets.size()); ++i) {
    CandidateSet& s = sets[i];
    const auto members = s.labels();
    int reference = members.front();
    for (int j : members)
      if (probs(i, j) > probs(i, reference)) reference = j;
    const double top = probs(i, reference);
    for (int j : members) {
      if (j == reference) continue;
      if (top - probs(i, j) >= gap) {
        s.remove(j);
        ++removals;
        if (events) events->push_back({i, j});
      }
    }
    assert(s.count() >= 1);
  }
  return removals;
}

double update_threshold(double threshold, int removals,
                        const PurificationSchedule& schedule) {
  if (removals != 0) return threshold;
  const double lowered = threshold - schedule.step;
  // tolerate rounding when the step lands exactly on the floor
  if (lowered >= schedule.end_threshold - 1e-12)
    return std::max(lowered, schedule.end_threshold);
  return threshold;
}

namespace {

std::optional<double> snapshot_boundary(const Eigen::MatrixXd& snapshot,
                                        const TheoryProbe* probe) {
  if (!probe) return std::nullopt;
  std::vector<bool> correct(snapshot.rows());
  for (Eigen::Index i = 0; i < snapshot.rows(); ++i)
    correct[i] =
        argmax_lowest(snapshot.row(i).transpose()) == probe->train_truth[i];
  return min_pure_boundary_from_margins(probe->train_margins, correct);
}

}  // namespace

PopResult run_pop(const PartialLabelDataset& train,
                  const PartialLabelDataset* validation, ScoringModel model,
                  const PllLossConfig& loss,
                  const PurificationSchedule& schedule,
                  const OptimizerConfig& optimizer, Rng& rng,
                  const TheoryProbe* probe, const EvalHooks* hooks,
                  const PopOptions& options) {
  schedule.validate();
  train.validate();

  std::vector<CandidateSet> sets = train.candidates;
  ConfidenceMatrix confidences = ConfidenceMatrix::uniform(sets);
  SgdOptimizer opt(model, optimizer);

  PopResult result{std::move(model), {}, {}, 0, 0};
  std::vector<bool> truth_removed(train.size(), false);

  auto evaluate_round = [&](int round, bool warmup, double threshold,
                            int removals, int truth_removals, double mean_loss,
                            const Eigen::MatrixXd& snapshot) {
    RoundRecord rec;
    rec.round = round;
    rec.warmup = warmup;
    rec.threshold = threshold;
    rec.removals = removals;
    rec.avg_candidates = 0.0;
    for (const auto& s : sets) rec.avg_candidates += s.count();
    rec.avg_candidates /= static_cast<double>(sets.size());
    rec.mean_loss = mean_loss;
    if (train.has_truth()) {
      Eigen::VectorXi preds(snapshot.rows());
      for (Eigen::Index i = 0; i < snapshot.rows(); ++i)
        preds[i] = argmax_lowest(snapshot.row(i).transpose());
      rec.train_accuracy = accuracy(preds, train.true_labels);
      rec.true_label_removals = truth_removals;
    }
    if (validation && validation->size() > 0) {
      Eigen::VectorXi preds = result.model.predict(validation->features);
      rec.val_accuracy = validation->has_truth()
                             ? accuracy(preds, validation->true_labels)
                             : candidate_hit_rate(preds, validation->candidates);
    }
    if (hooks && hooks->test_accuracy)
      rec.test_accuracy = hooks->test_accuracy(result.model);
    rec.pure_boundary = snapshot_boundary(snapshot, probe);
    if (!result.history.rounds.empty() &&
        rec.avg_candidates > result.history.rounds.back().avg_candidates + 1e-12)
      throw std::logic_error("average candidate count increased");
    result.history.rounds.push_back(std::move(rec));
  };

  int epoch = 0;
  for (int w = 0; w < schedule.warmup_rounds; ++w) {
    EpochStats stats = train_epoch(result.model, opt, train.features, sets,
                                   confidences, loss, rng);
    Eigen::MatrixXd snapshot = result.model.probabilities(train.features);
    for (int i = 0; i < train.size(); ++i)
      confidences.refresh_from_probabilities(i, snapshot.row(i).transpose(),
                                             sets[i]);
    evaluate_round(++epoch, true, schedule.initial_threshold, 0, 0,
                   stats.mean_loss, snapshot);
  }
  if (probe) {
    Eigen::MatrixXd snapshot = result.model.probabilities(train.features);
    result.history.warmup_boundary = snapshot_boundary(snapshot, probe);
  }

  double threshold = schedule.initial_threshold;
  for (int r = 0; r < schedule.rounds; ++r) {
    EpochStats stats = train_epoch(result.model, opt, train.features, sets,
                                   confidences, loss, rng);
    Eigen::MatrixXd snapshot = result.model.probabilities(train.features);
    for (int i = 0; i < train.size(); ++i)
      confidences.refresh_from_probabilities(i, snapshot.row(i).transpose(),
                                             sets[i]);

    int removals = 0;
    int truth_removals = 0;
    if (options.purification_enabled) {
      std::vector<RemovalEvent> events;
      removals = purify_round(snapshot, sets, threshold, schedule.epsilon,
                              &events);
      result.total_removals += removals;
      for (const auto& ev : events) {
        confidences.renormalize(ev.example, sets[ev.example]);
        if (train.has_truth() && train.true_labels[ev.example] == ev.label) {
          ++truth_removals;
          if (!truth_removed[ev.example]) {
            truth_removed[ev.example] = true;
            ++result.examples_with_true_label_removed;
          }
        }
      }
    }
    evaluate_round(++epoch, false, threshold, removals, truth_removals,
                   stats.mean_loss, snapshot);
    if (options.purification_enabled)
      threshold = update_threshold(threshold, removals, schedule);
  }

  result.final_sets = std::move(sets);
  return result;
}

}  // namespace pll

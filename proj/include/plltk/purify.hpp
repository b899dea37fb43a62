#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "plltk/dataset.hpp"
#include "plltk/losses.hpp"
#include "plltk/model.hpp"
#include "plltk/optimizer.hpp"

namespace pll {

struct PurificationSchedule {
  double initial_threshold = 0.9;  // e0
  double end_threshold = 0.05;     // floor the threshold never crosses
  double step = 0.05;              // decrement applied after idle rounds
  double epsilon = 0.05;           // slack added to the threshold
  int rounds = 100;                // purification rounds (one per epoch)
  int warmup_rounds = 10;          // epochs trained before purifying

  void validate() const;
};

struct RemovalEvent {
  int example;
  int label;
};

/// One purification sweep from a single probability snapshot. For each
/// example, the reference label is the in-set argmax of its snapshot
/// row (lowest index on ties) and every other candidate whose gap to it
/// reaches threshold + epsilon is removed. The reference label itself
/// never leaves, so sets stay non-empty. Returns the removal count.
int purify_round(const Eigen::MatrixXd& probs, std::vector<CandidateSet>& sets,
                 double threshold, double epsilon,
                 std::vector<RemovalEvent>* events = nullptr);

/// Threshold update: decrease by one step after a round with no
/// removals, but never below the floor.
double update_threshold(double threshold, int removals,
                        const PurificationSchedule& schedule);

struct RoundRecord {
  int round = 0;    // 1-based epoch index, warm-up included
  bool warmup = false;
  double threshold = 0.0;  // value in force during this round
  int removals = 0;
  double avg_candidates = 0.0;
  double mean_loss = 0.0;
  std::optional<double> train_accuracy;       // needs hidden truth
  std::optional<double> val_accuracy;         // truth, or candidate hit rate
  std::optional<double> test_accuracy;        // via the eval hook
  std::optional<int> true_label_removals;     // needs hidden truth
  std::optional<double> pure_boundary;        // needs the posterior oracle
};

struct PopHistory {
  std::vector<RoundRecord> rounds;
  // Empirical pure boundary measured right after warm-up finishes (for
  // zero warm-up rounds: at initialization).
  std::optional<double> warmup_boundary;
};

/// Oracle-side inputs enabling the theory diagnostics during a run.
struct TheoryProbe {
  Eigen::VectorXd train_margins;   // oracle margins of the training set
  Eigen::VectorXi train_truth;
};

struct EvalHooks {
  // Called once per round with the current model; the result lands in
  // RoundRecord::test_accuracy.
  std::function<double(const ScoringModel&)> test_accuracy;
};

struct PopOptions {
  bool purification_enabled = true;
};

struct PopResult {
  ScoringModel model;
  PopHistory history;
  std::vector<CandidateSet> final_sets;
  int examples_with_true_label_removed = 0;
  int total_removals = 0;
};

/// Full training procedure: warm-up epochs on the raw candidate sets,
/// then per round {train one epoch, snapshot probabilities, refresh
/// confidences, purify from the snapshot, renormalize confidences over
/// the shrunken sets, update the threshold}. Deterministic under the
/// given rng. The input dataset is never mutated.
PopResult run_pop(const PartialLabelDataset& train,
                  const PartialLabelDataset* validation, ScoringModel model,
                  const PllLossConfig& loss,
                  const PurificationSchedule& schedule,
                  const OptimizerConfig& optimizer, Rng& rng,
                  const TheoryProbe* probe = nullptr,
                  const EvalHooks* hooks = nullptr,
                  const PopOptions& options = {});

}  // namespace pll

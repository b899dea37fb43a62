#pragma once

#include <optional>
#include <string>
#include <vector>

#include "plltk/config.hpp"
#include "plltk/purify.hpp"

namespace pll {

/// One seeded trial: the outcome numbers the reports aggregate plus the
/// full per-round history.
struct TrialOutcome {
  std::uint64_t seed = 0;
  std::optional<double> final_test_accuracy;
  std::optional<double> final_train_accuracy;
  std::optional<double> final_val_accuracy;
  std::optional<double> bayes_agreement;        // model vs Bayes on test
  std::optional<double> bayes_test_accuracy;    // Bayes vs truth on test
  std::optional<double> margin_mass_below_epsilon;  // test margins < eps
  std::optional<double> true_label_removal_rate;
  std::optional<double> flip_proportionality;   // t-hat, synthetic ID only
  std::optional<double> density_ratio;          // margin histogram ratio
  std::optional<double> max_margin_density;     // upper density estimate
  double initial_avg_candidates = 0.0;
  double final_avg_candidates = 0.0;
  int total_removals = 0;
  std::optional<double> warmup_boundary;
  std::optional<double> final_boundary;
  std::optional<double> boundary_monotone_fraction;
  PopHistory history;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<TrialOutcome> trials;
  std::optional<double> mean_test_accuracy;
  std::optional<double> std_test_accuracy;  // sample std, n-1 denominator
};

/// Runs config.trials trials (trial i uses seed + i) without touching
/// the filesystem.
ExperimentReport run_experiment_in_memory(const ExperimentConfig& config);

/// Same, then writes report.csv, summary.json and report.txt into the
/// resolved output directory. A PLLTK_OUT_ROOT environment variable
/// prefixes relative output paths.
ExperimentReport run_experiment(const ExperimentConfig& config);

std::string resolve_output_dir(const std::string& configured);
void write_report_files(const ExperimentReport& report, const std::string& dir);

std::string summary_json(const ExperimentReport& report);
std::string report_csv(const ExperimentReport& report);
std::string report_table(const ExperimentReport& report);

struct SweepReport {
  std::string parameter;
  std::vector<double> values;
  std::vector<ExperimentReport> reports;
};

SweepReport run_sweep_in_memory(const ExperimentConfig& config,
                                const std::string& parameter,
                                const std::vector<double>& values);
/// Writes each value's reports under <out>/sweep_<parameter>_<index>/
/// plus a consolidated <out>/sweep.csv curve file.
SweepReport run_sweep(const ExperimentConfig& config,
                      const std::string& parameter,
                      const std::vector<double>& values);

struct CorruptStats {
  int examples = 0;
  int classes = 0;
  double avg_candidates = 0.0;
};

/// Loads a supervised source (PLLD with truth), trains the annotator,
/// applies instance-dependent corruption and writes the result.
CorruptStats corrupt_to_file(const std::string& in_path,
                             const std::string& out_path, std::uint64_t seed);

}  // namespace pll

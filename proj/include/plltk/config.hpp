#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "plltk/losses.hpp"
#include "plltk/optimizer.hpp"
#include "plltk/purify.hpp"

namespace pll {

enum class DatasetSource { kSynthetic, kPlld, kPlldCorrupt };
enum class CorruptionKind { kInstanceDependent, kUniform, kNone };
enum class AnnotatorKind { kMlp, kOracle };
enum class ModelKind { kLinear, kMlp };

struct SyntheticSpecConfig {
  int classes = 3;
  int dim = 2;
  std::vector<std::vector<double>> means;  // empty: regular simplex layout
  double mean_radius = 2.0;                // used by the default layout
  double sigma = 1.0;
  std::vector<double> priors;              // empty: uniform
  int train_n = 5000;
  int test_n = 2000;
};

struct ExperimentConfig {
  DatasetSource dataset = DatasetSource::kSynthetic;
  std::string plld_path;
  std::string plld_test_path;
  SyntheticSpecConfig synthetic;
  CorruptionKind corruption = CorruptionKind::kInstanceDependent;
  AnnotatorKind annotator = AnnotatorKind::kMlp;
  int annotator_epochs = 20;
  int annotator_width = 128;
  double uniform_inclusion = 0.3;
  ModelKind model = ModelKind::kLinear;
  std::vector<int> hidden = {64};
  PllLossConfig loss;
  bool pop_enabled = true;
  PurificationSchedule schedule;
  OptimizerConfig optimizer;
  int trials = 5;
  std::uint64_t seed = 1;
  double validation_fraction = 0.1;
  std::string output_dir = "out";

  void validate() const;
};

/// Parses the flat "key = value" experiment format ('#' comments,
/// blank lines ignored). Unknown keys and malformed values raise
/// ConfigError naming the field.
ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& source_name);
ExperimentConfig load_config(const std::string& path);

/// Sets one sweepable parameter: e0, e_s, e_end, epsilon,
/// warmup_rounds, lws_beta or lr.
void apply_sweep_value(ExperimentConfig& config, const std::string& parameter,
                       double value);

/// Canonical flat key/value image of a config, used to echo the full
/// configuration into reports.
std::map<std::string, std::string> config_key_values(const ExperimentConfig&);

}  // namespace pll

#include "plltk/experiment.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "plltk/corrupt.hpp"
#include "plltk/diagnostics.hpp"
#include "plltk/errors.hpp"
#include "plltk/synthetic.hpp"
#include "plltk/trainer.hpp"

namespace pll {

namespace {

// Default class layout when no means are given: a circle in the first
// two feature dimensions (a line for one-dimensional problems).
Eigen::MatrixXd default_means(int classes, int dim, double radius) {
  Eigen::MatrixXd means = Eigen::MatrixXd::Zero(classes, dim);
  if (dim == 1) {
    for (int k = 0; k < classes; ++k)
      means(k, 0) = classes == 1 ? 0.0
                                 : radius * (2.0 * k / (classes - 1) - 1.0);
    return means;
  }
  for (int k = 0; k < classes; ++k) {
    double angle = 2.0 * M_PI * k / classes + M_PI / 2.0;
    means(k, 0) = radius * std::cos(angle);
    means(k, 1) = radius * std::sin(angle);
  }
  return means;
}

GaussianMixtureSpec mixture_from_config(const SyntheticSpecConfig& s) {
  GaussianMixtureSpec spec;
  spec.sigma = s.sigma;
  if (s.means.empty()) {
    spec.means = default_means(s.classes, s.dim, s.mean_radius);
  } else {
    spec.means.resize(s.classes, s.dim);
    for (int k = 0; k < s.classes; ++k)
      for (int d = 0; d < s.dim; ++d) spec.means(k, d) = s.means[k][d];
  }
  if (s.priors.empty()) {
    spec.priors = Eigen::VectorXd::Constant(s.classes, 1.0 / s.classes);
  } else {
    spec.priors.resize(s.classes);
    for (int k = 0; k < s.classes; ++k) spec.priors[k] = s.priors[k];
  }
  return spec;
}

struct TrialData {
  PartialLabelDataset train;
  PartialLabelDataset validation;            // empty when fraction is 0
  std::optional<CleanDataset> test;          // features + labels
  std::optional<GaussianMixtureSpec> mixture;
  std::optional<double> flip_proportionality;  // Eq-ratio diagnostic (t-hat)
};

PartialLabelDataset singleton_dataset(const CleanDataset& clean) {
  PartialLabelDataset ds;
  ds.features = clean.features;
  ds.num_classes = clean.num_classes;
  ds.provenance = Provenance::kSyntheticUniform;
  ds.true_labels.resize(clean.labels.size());
  for (Eigen::Index i = 0; i < clean.labels.size(); ++i) {
    ds.true_labels[i] = clean.labels[i];
    ds.candidates.push_back(
        CandidateSet::singleton(clean.num_classes, clean.labels[i]));
  }
  return ds;
}

std::pair<PartialLabelDataset, std::optional<Eigen::MatrixXd>> corrupt_clean(
    const ExperimentConfig& config, const CleanDataset& clean,
    const std::optional<GaussianMixtureSpec>& mixture, Rng& rng) {
  switch (config.corruption) {
    case CorruptionKind::kNone:
      return {singleton_dataset(clean), std::nullopt};
    case CorruptionKind::kUniform: {
      Rng draw = rng.split(3);
      return {corrupt_uniform(clean, config.uniform_inclusion, draw),
              std::nullopt};
    }
    case CorruptionKind::kInstanceDependent: {
      Scorer scorer;
      if (config.annotator == AnnotatorKind::kOracle) {
        if (!mixture)
          throw ConfigError(
              "field 'corruption.annotator': oracle annotator requires a "
              "synthetic dataset");
        PosteriorOracle oracle(*mixture);
        scorer = [oracle](const Eigen::MatrixXd& X) {
          return oracle.posteriors(X);
        };
      } else {
        Rng ann_rng = rng.split(2);
        AnnotatorConfig ann_cfg;
        ann_cfg.hidden_width = config.annotator_width;
        ann_cfg.epochs = config.annotator_epochs;
        ScoringModel annotator = train_annotator(clean, ann_rng, ann_cfg);
        scorer = [annotator](const Eigen::MatrixXd& X) {
          return annotator.probabilities(X);
        };
      }
      Rng draw = rng.split(3);
      auto [ds, profile] = corrupt_id(scorer, clean, draw);
      return {std::move(ds), std::move(profile.probabilities)};
    }
  }
  throw std::logic_error("unhandled corruption kind");
}

TrialData build_trial_data(const ExperimentConfig& config, Rng& rng) {
  TrialData data;
  PartialLabelDataset full;
  std::optional<Eigen::MatrixXd> flip_probs;

  switch (config.dataset) {
    case DatasetSource::kSynthetic: {
      GaussianMixtureSpec spec = mixture_from_config(config.synthetic);
      data.mixture = spec;
      Rng draw = rng.split(1);
      LabeledSample train_sample =
          sample_mixture(spec, config.synthetic.train_n, draw);
      CleanDataset clean{train_sample.features, train_sample.labels,
                         spec.num_classes()};
      std::tie(full, flip_probs) = corrupt_clean(config, clean, data.mixture, rng);
      if (config.synthetic.test_n > 0) {
        LabeledSample test_sample =
            sample_mixture(spec, config.synthetic.test_n, draw);
        data.test = CleanDataset{test_sample.features, test_sample.labels,
                                 spec.num_classes()};
      }
      break;
    }
    case DatasetSource::kPlld: {
      full = load_plld(config.plld_path);
      break;
    }
    case DatasetSource::kPlldCorrupt: {
      PartialLabelDataset source = load_plld(config.plld_path);
      if (!source.has_truth())
        throw DataError(
            "plld+corrupt needs a supervised source with true labels: " +
            config.plld_path);
      CleanDataset clean;
      clean.features = source.features;
      clean.num_classes = source.num_classes;
      clean.labels.resize(source.size());
      for (int i = 0; i < source.size(); ++i)
        clean.labels[i] = source.true_labels[i];
      std::tie(full, flip_probs) =
          corrupt_clean(config, clean, std::nullopt, rng);
      break;
    }
  }

  if (config.dataset != DatasetSource::kSynthetic &&
      !config.plld_test_path.empty()) {
    PartialLabelDataset test_ds = load_plld(config.plld_test_path);
    if (!test_ds.has_truth())
      throw DataError("test dataset carries no true labels: " +
                      config.plld_test_path);
    CleanDataset test;
    test.features = test_ds.features;
    test.num_classes = test_ds.num_classes;
    test.labels.resize(test_ds.size());
    for (int i = 0; i < test_ds.size(); ++i)
      test.labels[i] = test_ds.true_labels[i];
    data.test = std::move(test);
  }

  // The proportionality diagnostic is evaluated on the full generated
  // dataset, before the validation split permutes rows.
  if (flip_probs && data.mixture && full.has_truth()) {
    PosteriorOracle oracle(*data.mixture);
    Eigen::VectorXi truth(full.size());
    for (int i = 0; i < full.size(); ++i) truth[i] = full.true_labels[i];
    data.flip_proportionality = estimate_flip_proportionality(
        *flip_probs, oracle.posteriors(full.features), truth);
  }

  if (config.validation_fraction > 0.0) {
    Rng split_rng = rng.split(4);
    std::tie(data.train, data.validation) =
        split_dataset(full, config.validation_fraction, split_rng);
  } else {
    data.train = std::move(full);
  }
  return data;
}

ScoringModel build_model(const ExperimentConfig& config, int inputs,
                         int classes, Rng& rng) {
  ScoringModel model = config.model == ModelKind::kLinear
                           ? ScoringModel::linear(inputs, classes)
                           : ScoringModel::mlp(inputs, config.hidden, classes);
  Rng init_rng = rng.split(5);
  model.init_params(init_rng);
  return model;
}

TrialOutcome run_trial(const ExperimentConfig& config, int trial) {
  Rng rng(config.seed + static_cast<std::uint64_t>(trial));
  TrialData data = build_trial_data(config, rng);

  TrialOutcome outcome;
  outcome.seed = config.seed + static_cast<std::uint64_t>(trial);
  outcome.initial_avg_candidates = avg_candidate_labels(data.train);

  // Oracle-side context for the theory diagnostics.
  std::optional<PosteriorOracle> oracle;
  std::optional<TheoryProbe> probe;
  if (data.mixture) {
    oracle.emplace(*data.mixture);
    TheoryProbe p;
    Eigen::VectorXi truth(data.train.size());
    for (int i = 0; i < data.train.size(); ++i)
      truth[i] = data.train.true_labels[i];
    p.train_margins =
        margins(oracle->posteriors(data.train.features), truth);
    p.train_truth = std::move(truth);
    probe = std::move(p);
  }

  EvalHooks hooks;
  if (data.test) {
    const CleanDataset& test = *data.test;
    hooks.test_accuracy = [&test](const ScoringModel& m) {
      return accuracy(m.predict(test.features), test.labels);
    };
  }

  ScoringModel model = build_model(config, data.train.feature_dim(),
                                   data.train.num_classes, rng);
  Rng train_rng = rng.split(6);
  PopOptions options;
  options.purification_enabled = config.pop_enabled;
  PopResult result = run_pop(
      data.train, data.validation.size() > 0 ? &data.validation : nullptr,
      std::move(model), config.loss, config.schedule, config.optimizer,
      train_rng, probe ? &*probe : nullptr,
      hooks.test_accuracy ? &hooks : nullptr, options);

  outcome.final_avg_candidates = avg_candidate_labels(
      {data.train.features, result.final_sets, data.train.num_classes,
       data.train.true_labels, data.train.provenance});
  outcome.total_removals = result.total_removals;
  if (data.train.has_truth())
    outcome.true_label_removal_rate =
        static_cast<double>(result.examples_with_true_label_removed) /
        data.train.size();

  if (!result.history.rounds.empty()) {
    const RoundRecord& last = result.history.rounds.back();
    outcome.final_train_accuracy = last.train_accuracy;
    outcome.final_val_accuracy = last.val_accuracy;
    outcome.final_test_accuracy = last.test_accuracy;
  }

  if (oracle && data.test) {
    Eigen::VectorXi bayes = oracle->bayes_predictions(data.test->features);
    outcome.bayes_agreement =
        bayes_agreement(result.model.predict(data.test->features), bayes);
    outcome.bayes_test_accuracy = accuracy(bayes, data.test->labels);
    Eigen::VectorXd test_margins =
        margins(oracle->posteriors(data.test->features), data.test->labels);
    int below = 0;
    for (Eigen::Index i = 0; i < test_margins.size(); ++i)
      if (test_margins[i] < config.schedule.epsilon) ++below;
    outcome.margin_mass_below_epsilon =
        static_cast<double>(below) / static_cast<double>(test_margins.size());

    std::vector<double> clamped(probe->train_margins.size());
    for (Eigen::Index i = 0; i < probe->train_margins.size(); ++i)
      clamped[i] = std::clamp(probe->train_margins[i], 0.0, 1.0);
    DensityRatioEstimate density = estimate_density_ratio(clamped, 20);
    outcome.density_ratio = density.ratio;
    outcome.max_margin_density = density.max_density;
  }
  outcome.flip_proportionality = data.flip_proportionality;

  outcome.warmup_boundary = result.history.warmup_boundary;
  int monotone = 0;
  int pairs = 0;
  std::optional<double> prev;
  for (const auto& rec : result.history.rounds) {
    if (rec.warmup || !rec.pure_boundary) continue;
    if (prev) {
      ++pairs;
      if (*rec.pure_boundary <= *prev + 1e-12) ++monotone;
    }
    prev = rec.pure_boundary;
    outcome.final_boundary = rec.pure_boundary;
  }
  if (pairs > 0)
    outcome.boundary_monotone_fraction =
        static_cast<double>(monotone) / static_cast<double>(pairs);

  outcome.history = std::move(result.history);
  return outcome;
}

}  // namespace

ExperimentReport run_experiment_in_memory(const ExperimentConfig& config) {
  config.validate();
  ExperimentReport report;
  report.config = config;
  report.trials.reserve(config.trials);
  for (int t = 0; t < config.trials; ++t)
    report.trials.push_back(run_trial(config, t));

  std::vector<double> accs;
  for (const auto& trial : report.trials)
    if (trial.final_test_accuracy) accs.push_back(*trial.final_test_accuracy);
  if (accs.size() == report.trials.size() && !accs.empty()) {
    double mean = 0.0;
    for (double a : accs) mean += a;
    mean /= accs.size();
    double var = 0.0;
    for (double a : accs) var += (a - mean) * (a - mean);
    report.mean_test_accuracy = mean;
    report.std_test_accuracy =
        accs.size() > 1 ? std::sqrt(var / (accs.size() - 1)) : 0.0;
  }
  return report;
}

std::string resolve_output_dir(const std::string& configured) {
  const char* root = std::getenv("PLLTK_OUT_ROOT");
  std::filesystem::path p(configured);
  if (root && *root && p.is_relative()) return (std::filesystem::path(root) / p).string();
  return configured;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  ExperimentReport report = run_experiment_in_memory(config);
  write_report_files(report, resolve_output_dir(config.output_dir));
  return report;
}

namespace {

std::string opt_cell(const std::optional<double>& v) {
  if (!v) return "";
  std::ostringstream out;
  out << std::setprecision(10) << *v;
  return out.str();
}

std::string opt_cell(const std::optional<int>& v) {
  return v ? std::to_string(*v) : "";
}

nlohmann::ordered_json opt_json(const std::optional<double>& v) {
  if (!v) return nullptr;
  return *v;
}

}  // namespace

std::string report_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "round,e,removals,avg_cls,train_acc,val_acc,test_acc,"
         "true_label_removals,empirical_pure_boundary\n";
  for (const auto& trial : report.trials)
    for (const auto& rec : trial.history.rounds) {
      out << rec.round << "," << std::setprecision(10) << rec.threshold << ","
          << rec.removals << "," << std::setprecision(10) << rec.avg_candidates
          << "," << opt_cell(rec.train_accuracy) << ","
          << opt_cell(rec.val_accuracy) << "," << opt_cell(rec.test_accuracy)
          << "," << opt_cell(rec.true_label_removals) << ","
          << opt_cell(rec.pure_boundary) << "\n";
    }
  return out.str();
}

std::string summary_json(const ExperimentReport& report) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json cfg;
  for (const auto& [k, v] : config_key_values(report.config)) cfg[k] = v;
  j["config"] = cfg;

  nlohmann::ordered_json trials = nlohmann::ordered_json::array();
  for (const auto& t : report.trials) {
    nlohmann::ordered_json row;
    row["seed"] = t.seed;
    row["final_test_accuracy"] = opt_json(t.final_test_accuracy);
    row["final_train_accuracy"] = opt_json(t.final_train_accuracy);
    row["final_val_accuracy"] = opt_json(t.final_val_accuracy);
    row["bayes_agreement"] = opt_json(t.bayes_agreement);
    row["bayes_test_accuracy"] = opt_json(t.bayes_test_accuracy);
    row["margin_mass_below_epsilon"] = opt_json(t.margin_mass_below_epsilon);
    row["true_label_removal_rate"] = opt_json(t.true_label_removal_rate);
    row["flip_proportionality"] = opt_json(t.flip_proportionality);
    row["density_ratio"] = opt_json(t.density_ratio);
    row["max_margin_density"] = opt_json(t.max_margin_density);
    row["initial_avg_candidates"] = t.initial_avg_candidates;
    row["final_avg_candidates"] = t.final_avg_candidates;
    row["total_removals"] = t.total_removals;
    row["warmup_pure_boundary"] = opt_json(t.warmup_boundary);
    row["final_pure_boundary"] = opt_json(t.final_boundary);
    row["boundary_monotone_fraction"] = opt_json(t.boundary_monotone_fraction);
    trials.push_back(row);
  }
  j["trials"] = trials;

  nlohmann::ordered_json agg;
  agg["trials"] = static_cast<int>(report.trials.size());
  agg["mean_test_accuracy"] = opt_json(report.mean_test_accuracy);
  agg["std_test_accuracy"] = opt_json(report.std_test_accuracy);
  j["aggregate"] = agg;
  return j.dump(2) + "\n";
}

std::string report_table(const ExperimentReport& report) {
  std::ostringstream out;
  out << "loss=" << to_string(report.config.loss.kind)
      << " pop=" << (report.config.pop_enabled ? "on" : "off")
      << " trials=" << report.trials.size() << "\n";
  out << "trial  seed        test_acc\n";
  for (std::size_t t = 0; t < report.trials.size(); ++t) {
    out << std::left << std::setw(7) << t << std::setw(12)
        << report.trials[t].seed;
    if (report.trials[t].final_test_accuracy)
      out << std::fixed << std::setprecision(4)
          << *report.trials[t].final_test_accuracy;
    else
      out << "-";
    out << "\n";
    out.unsetf(std::ios::fixed);
  }
  if (report.mean_test_accuracy) {
    out << std::fixed << std::setprecision(2) << "test accuracy: "
        << 100.0 * *report.mean_test_accuracy << " +/- "
        << 100.0 * *report.std_test_accuracy << " %  (" << report.trials.size()
        << " trials)\n";
  }
  return out.str();
}

void write_report_files(const ExperimentReport& report, const std::string& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&dir](const std::string& name, const std::string& body) {
    std::ofstream out(std::filesystem::path(dir) / name, std::ios::binary);
    if (!out) throw DataError("cannot write report file: " + name);
    out << body;
  };
  write("report.csv", report_csv(report));
  write("summary.json", summary_json(report));
  write("report.txt", report_table(report));
}

SweepReport run_sweep_in_memory(const ExperimentConfig& config,
                                const std::string& parameter,
                                const std::vector<double>& values) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  SweepReport sweep;
  sweep.parameter = parameter;
  sweep.values = values;
  for (double value : values) {
    ExperimentConfig c = config;
    apply_sweep_value(c, parameter, value);
    sweep.reports.push_back(run_experiment_in_memory(c));
  }
  return sweep;
}

SweepReport run_sweep(const ExperimentConfig& config,
                      const std::string& parameter,
                      const std::vector<double>& values) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  const std::string base = resolve_output_dir(config.output_dir);
  SweepReport sweep;
  sweep.parameter = parameter;
  sweep.values = values;
  for (std::size_t i = 0; i < values.size(); ++i) {
    ExperimentConfig c = config;
    apply_sweep_value(c, parameter, values[i]);
    ExperimentReport report = run_experiment_in_memory(c);
    std::ostringstream sub;
    sub << "sweep_" << parameter << "_" << i;
    write_report_files(report,
                       (std::filesystem::path(base) / sub.str()).string());
    sweep.reports.push_back(std::move(report));
  }
  std::filesystem::create_directories(base);
  std::ofstream curve(std::filesystem::path(base) / "sweep.csv",
                      std::ios::binary);
  curve << "parameter,value,mean_test_acc,std_test_acc\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    curve << parameter << "," << std::setprecision(10) << values[i] << ","
          << opt_cell(sweep.reports[i].mean_test_accuracy) << ","
          << opt_cell(sweep.reports[i].std_test_accuracy) << "\n";
  }
  return sweep;
}

CorruptStats corrupt_to_file(const std::string& in_path,
                             const std::string& out_path, std::uint64_t seed) {
  PartialLabelDataset source = load_plld(in_path);
  if (!source.has_truth())
    throw DataError("corruption needs a supervised source with true labels: " +
                    in_path);
  CleanDataset clean;
  clean.features = source.features;
  clean.num_classes = source.num_classes;
  clean.labels.resize(source.size());
  for (int i = 0; i < source.size(); ++i) clean.labels[i] = source.true_labels[i];

  Rng rng(seed);
  Rng ann_rng = rng.split(2);
  ScoringModel annotator = train_annotator(clean, ann_rng);
  Scorer scorer = [&annotator](const Eigen::MatrixXd& X) {
    return annotator.probabilities(X);
  };
  Rng draw = rng.split(3);
  auto [ds, profile] = corrupt_id(scorer, clean, draw);
  save_plld(ds, out_path);

  CorruptStats stats;
  stats.examples = ds.size();
  stats.classes = ds.num_classes;
  stats.avg_candidates = avg_candidate_labels(ds);
  return stats;
}

}  // namespace pll

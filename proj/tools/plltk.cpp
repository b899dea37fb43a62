// Config-driven experiment runner for partial-label training.
// Exit codes: 0 success, 2 config error, 3 data error, 4 numeric failure.

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "plltk/dataset.hpp"
#include "plltk/errors.hpp"
#include "plltk/experiment.hpp"

namespace {

std::vector<double> parse_values(const std::string& list) {
  std::vector<double> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(std::stod(item));
  if (out.empty()) throw pll::ConfigError("--values: expected a comma list");
  return out;
}

int run_command(const std::string& config_path) {
  pll::ExperimentConfig config = pll::load_config(config_path);
  pll::ExperimentReport report = pll::run_experiment(config);
  std::cout << pll::report_table(report);
  std::cout << "reports written to "
            << pll::resolve_output_dir(config.output_dir) << "\n";
  return 0;
}

int sweep_command(const std::string& config_path, const std::string& parameter,
                  const std::string& values) {
  pll::ExperimentConfig config = pll::load_config(config_path);
  pll::SweepReport sweep =
      pll::run_sweep(config, parameter, parse_values(values));
  for (std::size_t i = 0; i < sweep.values.size(); ++i) {
    std::cout << parameter << "=" << sweep.values[i] << "  ";
    if (sweep.reports[i].mean_test_accuracy)
      std::cout << "test_acc=" << *sweep.reports[i].mean_test_accuracy;
    std::cout << "\n";
  }
  std::cout << "sweep curve written to "
            << pll::resolve_output_dir(config.output_dir) << "/sweep.csv\n";
  return 0;
}

int corrupt_command(const std::string& in_path, const std::string& out_path,
                    std::uint64_t seed) {
  pll::CorruptStats stats = pll::corrupt_to_file(in_path, out_path, seed);
  std::cout << "wrote " << out_path << ": n=" << stats.examples
            << " c=" << stats.classes << " avg_cls=" << stats.avg_candidates
            << "\n";
  return 0;
}

int stats_command(const std::string& path) {
  pll::PartialLabelDataset ds = pll::load_plld(path);
  std::cout << "n=" << ds.size() << " q=" << ds.feature_dim()
            << " c=" << ds.num_classes << " truth=" << (ds.has_truth() ? 1 : 0)
            << " avg_cls=" << pll::avg_candidate_labels(ds) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"partial-label learning toolkit"};
  app.require_subcommand(1);

  std::string config_path, parameter, values, in_path, out_path, plld_path;
  std::uint64_t seed = 1;

  auto* run = app.add_subcommand("run", "run an experiment config");
  run->add_option("config", config_path, "experiment config file")->required();

  auto* sweep = app.add_subcommand("sweep", "sweep one hyper-parameter");
  sweep->add_option("config", config_path, "experiment config file")->required();
  sweep->add_option("--param", parameter, "parameter name")->required();
  sweep->add_option("--values", values, "comma-separated values")->required();

  auto* corrupt = app.add_subcommand(
      "corrupt", "generate instance-dependent candidate sets");
  corrupt->add_option("input", in_path, "supervised PLLD source")->required();
  corrupt->add_option("--out", out_path, "output PLLD path")->required();
  corrupt->add_option("--seed", seed, "generation seed");

  auto* stats = app.add_subcommand("stats", "describe a PLLD file");
  stats->add_option("plld", plld_path, "PLLD file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return run_command(config_path);
    if (sweep->parsed()) return sweep_command(config_path, parameter, values);
    if (corrupt->parsed()) return corrupt_command(in_path, out_path, seed);
    if (stats->parsed()) return stats_command(plld_path);
  } catch (const pll::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const pll::NumericError& e) {
    std::cerr << "numeric failure: " << e.what();
    if (e.example_index() >= 0)
      std::cerr << " (example " << e.example_index() << ")";
    std::cerr << "\n";
    return 4;
  } catch (const pll::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

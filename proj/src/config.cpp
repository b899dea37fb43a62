#include "plltk/config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "plltk/errors.hpp"

namespace pll {

namespace {

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("field '" + key + "': expected a number, got '" + value +
                      "'");
  }
}

long parse_long(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    long v = std::stol(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("field '" + key + "': expected an integer, got '" +
                      value + "'");
  }
}

bool parse_on_off(const std::string& key, const std::string& value) {
  if (value == "on" || value == "true" || value == "1") return true;
  if (value == "off" || value == "false" || value == "0") return false;
  throw ConfigError("field '" + key + "': expected on|off, got '" + value + "'");
}

std::vector<double> parse_double_list(const std::string& key,
                                      const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_double(key, item));
  }
  if (out.empty())
    throw ConfigError("field '" + key + "': expected a comma list");
  return out;
}

std::vector<int> parse_int_list(const std::string& key,
                                const std::string& value) {
  std::vector<int> out;
  for (double v : parse_double_list(key, value))
    out.push_back(static_cast<int>(v));
  return out;
}

// Semicolon-separated vectors, each a comma list: "0,2.2; -1.9,-1.1".
std::vector<std::vector<double>> parse_vector_list(const std::string& key,
                                                   const std::string& value) {
  std::vector<std::vector<double>> out;
  std::stringstream ss(value);
  std::string vec;
  while (std::getline(ss, vec, ';')) {
    vec = trim(vec);
    if (!vec.empty()) out.push_back(parse_double_list(key, vec));
  }
  return out;
}

void apply_field(ExperimentConfig& c, const std::string& key,
                 const std::string& value) {
  if (key == "dataset") {
    if (value == "synthetic") c.dataset = DatasetSource::kSynthetic;
    else if (value == "plld") c.dataset = DatasetSource::kPlld;
    else if (value == "plld+corrupt") c.dataset = DatasetSource::kPlldCorrupt;
    else throw ConfigError("field 'dataset': unknown source '" + value + "'");
  } else if (key == "plld.path") {
    c.plld_path = value;
  } else if (key == "plld.test_path") {
    c.plld_test_path = value;
  } else if (key == "synthetic.classes") {
    c.synthetic.classes = static_cast<int>(parse_long(key, value));
  } else if (key == "synthetic.dim") {
    c.synthetic.dim = static_cast<int>(parse_long(key, value));
  } else if (key == "synthetic.means") {
    c.synthetic.means = parse_vector_list(key, value);
  } else if (key == "synthetic.mean_radius") {
    c.synthetic.mean_radius = parse_double(key, value);
  } else if (key == "synthetic.sigma") {
    c.synthetic.sigma = parse_double(key, value);
  } else if (key == "synthetic.priors") {
    if (value == "uniform") c.synthetic.priors.clear();
    else c.synthetic.priors = parse_double_list(key, value);
  } else if (key == "synthetic.train_n") {
    c.synthetic.train_n = static_cast<int>(parse_long(key, value));
  } else if (key == "synthetic.test_n") {
    c.synthetic.test_n = static_cast<int>(parse_long(key, value));
  } else if (key == "corruption") {
    if (value == "id") c.corruption = CorruptionKind::kInstanceDependent;
    else if (value == "uniform") c.corruption = CorruptionKind::kUniform;
    else if (value == "none") c.corruption = CorruptionKind::kNone;
    else throw ConfigError("field 'corruption': unknown kind '" + value + "'");
  } else if (key == "corruption.annotator") {
    if (value == "mlp") c.annotator = AnnotatorKind::kMlp;
    else if (value == "oracle") c.annotator = AnnotatorKind::kOracle;
    else throw ConfigError("field 'corruption.annotator': unknown kind '" +
                           value + "'");
  } else if (key == "corruption.annotator_epochs") {
    c.annotator_epochs = static_cast<int>(parse_long(key, value));
  } else if (key == "corruption.annotator_width") {
    c.annotator_width = static_cast<int>(parse_long(key, value));
  } else if (key == "corruption.uniform_q") {
    c.uniform_inclusion = parse_double(key, value);
  } else if (key == "model") {
    if (value == "linear") c.model = ModelKind::kLinear;
    else if (value == "mlp") c.model = ModelKind::kMlp;
    else throw ConfigError("field 'model': unknown kind '" + value + "'");
  } else if (key == "model.hidden") {
    c.hidden = parse_int_list(key, value);
  } else if (key == "loss") {
    c.loss.kind = parse_loss_kind(value);
  } else if (key == "lws_beta") {
    c.loss.lws_beta = parse_double(key, value);
  } else if (key == "pop") {
    c.pop_enabled = parse_on_off(key, value);
  } else if (key == "pop.e0") {
    c.schedule.initial_threshold = parse_double(key, value);
  } else if (key == "pop.e_end") {
    c.schedule.end_threshold = parse_double(key, value);
  } else if (key == "pop.e_step") {
    c.schedule.step = parse_double(key, value);
  } else if (key == "pop.epsilon") {
    c.schedule.epsilon = parse_double(key, value);
  } else if (key == "pop.rounds") {
    c.schedule.rounds = static_cast<int>(parse_long(key, value));
  } else if (key == "pop.warmup") {
    c.schedule.warmup_rounds = static_cast<int>(parse_long(key, value));
  } else if (key == "opt.lr") {
    c.optimizer.learning_rate = parse_double(key, value);
  } else if (key == "opt.momentum") {
    c.optimizer.momentum = parse_double(key, value);
  } else if (key == "opt.weight_decay") {
    c.optimizer.weight_decay = parse_double(key, value);
  } else if (key == "opt.batch") {
    c.optimizer.batch_size = static_cast<int>(parse_long(key, value));
  } else if (key == "trials") {
    c.trials = static_cast<int>(parse_long(key, value));
  } else if (key == "seed") {
    c.seed = static_cast<std::uint64_t>(parse_long(key, value));
  } else if (key == "val_fraction") {
    c.validation_fraction = parse_double(key, value);
  } else if (key == "out") {
    c.output_dir = value;
  } else {
    throw ConfigError("unknown config field '" + key + "'");
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  if (trials < 1) throw ConfigError("field 'trials': must be >= 1");
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0))
    throw ConfigError("field 'val_fraction': must lie in [0, 1)");
  if (dataset != DatasetSource::kSynthetic) {
    if (plld_path.empty())
      throw ConfigError("field 'plld.path': required for PLLD dataset sources");
    if (!std::filesystem::exists(plld_path))
      throw ConfigError("field 'plld.path': no such file: " + plld_path);
    if (!plld_test_path.empty() && !std::filesystem::exists(plld_test_path))
      throw ConfigError("field 'plld.test_path': no such file: " +
                        plld_test_path);
  }
  if (dataset == DatasetSource::kSynthetic) {
    if (synthetic.classes < 2)
      throw ConfigError("field 'synthetic.classes': must be >= 2");
    if (synthetic.dim < 1) throw ConfigError("field 'synthetic.dim': must be >= 1");
    if (!(synthetic.sigma > 0.0))
      throw ConfigError("field 'synthetic.sigma': must be positive");
    if (synthetic.train_n < 1 || synthetic.test_n < 0)
      throw ConfigError("field 'synthetic.train_n': must be positive");
    if (!synthetic.means.empty()) {
      if (static_cast<int>(synthetic.means.size()) != synthetic.classes)
        throw ConfigError("field 'synthetic.means': need one mean per class");
      for (const auto& m : synthetic.means)
        if (static_cast<int>(m.size()) != synthetic.dim)
          throw ConfigError("field 'synthetic.means': dimension mismatch");
    }
    if (!synthetic.priors.empty() &&
        static_cast<int>(synthetic.priors.size()) != synthetic.classes)
      throw ConfigError("field 'synthetic.priors': need one prior per class");
  }
  if (model == ModelKind::kMlp) {
    if (hidden.empty() || hidden.size() > 2)
      throw ConfigError("field 'model.hidden': expected 1 or 2 hidden widths");
    for (int h : hidden)
      if (h < 1) throw ConfigError("field 'model.hidden': widths must be >= 1");
  }
  if (annotator_epochs < 1 || annotator_width < 1)
    throw ConfigError("field 'corruption.annotator_epochs': annotator "
                      "epochs and width must be >= 1");
  if (!(loss.lws_beta > 0.0))
    throw ConfigError("field 'lws_beta': must be positive");
  if (optimizer.batch_size < 1)
    throw ConfigError("field 'opt.batch': must be >= 1");
  schedule.validate();
}

ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& source_name) {
  ExperimentConfig c;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto comment = line.find('#');
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source_name + ":" + std::to_string(line_no) +
                        ": expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    apply_field(c, key, value);
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

void apply_sweep_value(ExperimentConfig& config, const std::string& parameter,
                       double value) {
  if (parameter == "e0") config.schedule.initial_threshold = value;
  else if (parameter == "e_s") config.schedule.step = value;
  else if (parameter == "e_end") config.schedule.end_threshold = value;
  else if (parameter == "epsilon") config.schedule.epsilon = value;
  else if (parameter == "warmup_rounds")
    config.schedule.warmup_rounds = static_cast<int>(value);
  else if (parameter == "lws_beta") config.loss.lws_beta = value;
  else if (parameter == "lr") config.optimizer.learning_rate = value;
  else
    throw ConfigError("unknown sweep parameter '" + parameter +
                      "' (expected e0|e_s|e_end|epsilon|warmup_rounds|"
                      "lws_beta|lr)");
  config.validate();
}

namespace {

std::string fmt(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

}  // namespace

std::map<std::string, std::string> config_key_values(const ExperimentConfig& c) {
  std::map<std::string, std::string> kv;
  switch (c.dataset) {
    case DatasetSource::kSynthetic: kv["dataset"] = "synthetic"; break;
    case DatasetSource::kPlld: kv["dataset"] = "plld"; break;
    case DatasetSource::kPlldCorrupt: kv["dataset"] = "plld+corrupt"; break;
  }
  if (!c.plld_path.empty()) kv["plld.path"] = c.plld_path;
  if (!c.plld_test_path.empty()) kv["plld.test_path"] = c.plld_test_path;
  if (c.dataset == DatasetSource::kSynthetic) {
    kv["synthetic.classes"] = std::to_string(c.synthetic.classes);
    kv["synthetic.dim"] = std::to_string(c.synthetic.dim);
    kv["synthetic.sigma"] = fmt(c.synthetic.sigma);
    kv["synthetic.train_n"] = std::to_string(c.synthetic.train_n);
    kv["synthetic.test_n"] = std::to_string(c.synthetic.test_n);
    if (c.synthetic.means.empty())
      kv["synthetic.mean_radius"] = fmt(c.synthetic.mean_radius);
    else {
      std::ostringstream ms;
      for (std::size_t i = 0; i < c.synthetic.means.size(); ++i) {
        if (i) ms << "; ";
        for (std::size_t j = 0; j < c.synthetic.means[i].size(); ++j) {
          if (j) ms << ",";
          ms << c.synthetic.means[i][j];
        }
      }
      kv["synthetic.means"] = ms.str();
    }
    if (c.synthetic.priors.empty())
      kv["synthetic.priors"] = "uniform";
    else {
      std::ostringstream ps;
      for (std::size_t i = 0; i < c.synthetic.priors.size(); ++i) {
        if (i) ps << ",";
        ps << c.synthetic.priors[i];
      }
      kv["synthetic.priors"] = ps.str();
    }
  }
  switch (c.corruption) {
    case CorruptionKind::kInstanceDependent: kv["corruption"] = "id"; break;
    case CorruptionKind::kUniform: kv["corruption"] = "uniform"; break;
    case CorruptionKind::kNone: kv["corruption"] = "none"; break;
  }
  kv["corruption.annotator"] =
      c.annotator == AnnotatorKind::kMlp ? "mlp" : "oracle";
  if (c.annotator == AnnotatorKind::kMlp &&
      c.corruption == CorruptionKind::kInstanceDependent) {
    kv["corruption.annotator_epochs"] = std::to_string(c.annotator_epochs);
    kv["corruption.annotator_width"] = std::to_string(c.annotator_width);
  }
  if (c.corruption == CorruptionKind::kUniform)
    kv["corruption.uniform_q"] = fmt(c.uniform_inclusion);
  kv["model"] = c.model == ModelKind::kLinear ? "linear" : "mlp";
  if (c.model == ModelKind::kMlp) {
    std::ostringstream hs;
    for (std::size_t i = 0; i < c.hidden.size(); ++i) {
      if (i) hs << ",";
      hs << c.hidden[i];
    }
    kv["model.hidden"] = hs.str();
  }
  kv["loss"] = to_string(c.loss.kind);
  if (c.loss.kind == PllLossKind::kLws) kv["lws_beta"] = fmt(c.loss.lws_beta);
  kv["pop"] = c.pop_enabled ? "on" : "off";
  kv["pop.e0"] = fmt(c.schedule.initial_threshold);
  kv["pop.e_end"] = fmt(c.schedule.end_threshold);
  kv["pop.e_step"] = fmt(c.schedule.step);
  kv["pop.epsilon"] = fmt(c.schedule.epsilon);
  kv["pop.rounds"] = std::to_string(c.schedule.rounds);
  kv["pop.warmup"] = std::to_string(c.schedule.warmup_rounds);
  kv["opt.lr"] = fmt(c.optimizer.learning_rate);
  kv["opt.momentum"] = fmt(c.optimizer.momentum);
  kv["opt.weight_decay"] = fmt(c.optimizer.weight_decay);
  kv["opt.batch"] = std::to_string(c.optimizer.batch_size);
  kv["trials"] = std::to_string(c.trials);
  kv["seed"] = std::to_string(c.seed);
  kv["val_fraction"] = fmt(c.validation_fraction);
  kv["out"] = c.output_dir;
  return kv;
}

}  // namespace pll

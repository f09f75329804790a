// SPDX-License-Identifier: Apache-2.0
#include "sparsemia/experiment/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace sparsemia::experiment {

namespace pt = boost::property_tree;

std::string to_string(Variant variant) {
  switch (variant) {
    case Variant::dense: return "dense";
    case Variant::butterfly: return "butterfly";
    case Variant::imp: return "imp";
  }
  return "unknown";
}

void ModelConfig::validate() const {
  if (width < 1) throw std::invalid_argument("model.width must be positive");
  if (segments < 1) throw std::invalid_argument("model.segments must be positive");
  if (variant == Variant::butterfly) {
    if (butterfly_segments < 1 || butterfly_segments > segments) {
      throw std::invalid_argument("model.butterfly_segments must lie in [1, model.segments]");
    }
    if (butterfly_depth < 1) throw std::invalid_argument("model.butterfly_depth must be positive");
  }
}

void ExperimentConfig::validate() const {
  if (seeds.empty()) throw std::invalid_argument("experiment.seeds must list at least one seed");
  model.validate();
  train.validate();
  imp.validate();
  mia.features.validate();
  mia.discriminator.validate();
  if (dataset.source != DatasetSource::synthetic && dataset.paths.empty()) {
    throw std::invalid_argument("dataset.path is required for file-backed datasets");
  }
  if (dataset.source == DatasetSource::synthetic && model.arch == Architecture::cnn) {
    throw std::invalid_argument("model.arch = cnn needs an image dataset");
  }
  for (int r : sweep.imp_rounds) {
    if (r < 1) throw std::invalid_argument("sweep.imp_rounds entries must be positive");
  }
  for (const auto& b : sweep.butterfly) {
    if (b.segments < 1 || b.segments > model.segments || b.depth < 1) {
      throw std::invalid_argument("sweep.butterfly entries must be S×L with 1 ≤ S ≤ model.segments");
    }
  }
}

namespace {

std::vector<std::string> split_list(const std::string& text, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, sep)) {
    const auto first = item.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    out.push_back(item.substr(first, item.find_last_not_of(" \t") - first + 1));
  }
  return out;
}

template <typename T>
T parse_scalar(const std::string& key, const std::string& text) {
  std::istringstream in(text);
  T value{};
  in >> value;
  if (!in || !(in >> std::ws).eof()) throw std::invalid_argument("bad value for " + key + ": '" + text + "'");
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw std::invalid_argument("bad boolean for " + key + ": '" + text + "'");
}

template <typename T>
std::vector<T> parse_vector(const std::string& key, const std::string& text) {
  std::vector<T> out;
  for (const auto& item : split_list(text)) out.push_back(parse_scalar<T>(key, item));
  return out;
}

/// Reads keys from one section, remembering which ones were consumed.
class Section {
 public:
  Section(const pt::ptree& root, std::string name) : name_(std::move(name)) {
    if (const auto child = root.get_child_optional(name_)) tree_ = *child;
  }

  std::optional<std::string> raw(const std::string& key) {
    used_.insert(key);
    if (const auto v = tree_.get_optional<std::string>(key)) return *v;
    return std::nullopt;
  }

  template <typename T>
  void read(const std::string& key, T& target) {
    const auto v = raw(key);
    if (!v) return;
    const std::string full = name_ + "." + key;
    if constexpr (std::is_same_v<T, bool>) {
      target = parse_bool(full, *v);
    } else if constexpr (std::is_same_v<T, std::string>) {
      target = *v;
    } else {
      target = parse_scalar<T>(full, *v);
    }
  }

  template <typename T>
  void read_list(const std::string& key, std::vector<T>& target) {
    if (const auto v = raw(key)) target = parse_vector<T>(name_ + "." + key, *v);
  }

  [[nodiscard]] std::string qualified(const std::string& key) const { return name_ + "." + key; }

  void reject_unknown() const {
    for (const auto& [key, value] : tree_) {
      if (!used_.contains(key)) throw std::invalid_argument("unknown configuration key " + name_ + "." + key);
    }
  }

 private:
  std::string name_;
  pt::ptree tree_;
  std::set<std::string> used_;
};

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  pt::ptree root;
  try {
    pt::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    throw std::invalid_argument(std::string("configuration syntax error: ") + e.what());
  }
  static const std::set<std::string> known{"experiment", "dataset", "model", "train", "imp", "mia", "sweep"};
  for (const auto& [name, child] : root) {
    if (!known.contains(name)) throw std::invalid_argument("unknown configuration section [" + name + "]");
  }

  ExperimentConfig c;

  Section exp(root, "experiment");
  exp.read("name", c.name);
  exp.read_list("seeds", c.seeds);
  if (const auto v = exp.raw("output")) c.output = *v;
  if (const auto v = exp.raw("release")) {
    if (*v == "final") c.release = Release::final_weights;
    else if (*v == "best") c.release = Release::best_validation;
    else throw std::invalid_argument("experiment.release must be final or best");
  }
  exp.reject_unknown();

  Section ds(root, "dataset");
  if (const auto v = ds.raw("kind")) {
    if (*v == "file") {
      c.dataset.source = DatasetSource::image_file;
    } else if (*v == "cifar10") {
      c.dataset.source = DatasetSource::cifar10;
    } else {
      c.dataset.source = DatasetSource::synthetic;
      c.dataset.synthetic.kind = data::parse_synthetic_kind(*v);
    }
  }
  ds.read("samples", c.dataset.synthetic.samples);
  ds.read("classes", c.dataset.synthetic.classes);
  ds.read("noise", c.dataset.synthetic.noise);
  ds.read("dims", c.dataset.synthetic.dims);
  ds.read("seed", c.dataset.synthetic.seed);
  ds.read("limit", c.dataset.limit);
  if (const auto v = ds.raw("path")) {
    for (const auto& p : split_list(*v)) c.dataset.paths.emplace_back(p);
  }
  ds.reject_unknown();

  Section model(root, "model");
  if (const auto v = model.raw("arch")) {
    if (*v == "mlp") c.model.arch = Architecture::mlp;
    else if (*v == "cnn") c.model.arch = Architecture::cnn;
    else throw std::invalid_argument("model.arch must be mlp or cnn");
  }
  model.read("width", c.model.width);
  model.read("segments", c.model.segments);
  if (const auto v = model.raw("variant")) {
    if (*v == "dense") c.model.variant = Variant::dense;
    else if (*v == "butterfly") c.model.variant = Variant::butterfly;
    else if (*v == "imp") c.model.variant = Variant::imp;
    else throw std::invalid_argument("model.variant must be dense, butterfly or imp");
  }
  model.read("butterfly_segments", c.model.butterfly_segments);
  model.read("butterfly_depth", c.model.butterfly_depth);
  model.reject_unknown();

  Section train(root, "train");
  train.read("epochs", c.train.epochs);
  train.read("batch_size", c.train.batch_size);
  train.read("lr", c.train.initial_lr);
  train.read("momentum", c.train.momentum);
  train.read("nesterov", c.train.nesterov);
  train.read("weight_decay", c.train.weight_decay);
  train.read("decoupled_weight_decay", c.train.decoupled_weight_decay);
  train.read_list("lr_drops", c.train.lr_drop_points);
  train.read("lr_drop_factor", c.train.lr_drop_factor);
  train.read("augment", c.train.augment);
  train.reject_unknown();

  Section imp(root, "imp");
  imp.read("rounds", c.imp.rounds);
  imp.read("prune_fraction", c.imp.prune_fraction);
  imp.read("global", c.imp.global);
  imp.read("prune_biases", c.imp.prune_biases);
  imp.reject_unknown();

  Section mia(root, "mia");
  mia.read("epsilon", c.mia.features.epsilon);
  mia.read("mc_samples", c.mia.features.mc_samples);
  if (const auto v = mia.raw("architectures")) {
    c.mia.discriminator.architectures.clear();
    for (const auto& arch : split_list(*v, ';')) {
      c.mia.discriminator.architectures.push_back(parse_vector<Index>(mia.qualified("architectures"), arch));
    }
  }
  mia.read_list("learning_rates", c.mia.discriminator.learning_rates);
  mia.read("epochs", c.mia.discriminator.epochs);
  mia.read("batch_size", c.mia.discriminator.batch_size);
  mia.read("holdout", c.mia.discriminator.holdout_fraction);
  mia.read("shuffle_labels", c.mia.shuffle_labels);
  mia.reject_unknown();

  Section sweep(root, "sweep");
  sweep.read("dense", c.sweep.dense);
  sweep.read_list("imp_rounds", c.sweep.imp_rounds);
  if (const auto v = sweep.raw("butterfly")) {
    c.sweep.butterfly.clear();
    for (const auto& item : split_list(*v)) {
      const auto parts = split_list(item, 'x');
      if (parts.size() != 2) throw std::invalid_argument("sweep.butterfly entries are written SxL, got '" + item + "'");
      c.sweep.butterfly.push_back({parse_scalar<int>("sweep.butterfly", parts[0]),
                                   parse_scalar<int>("sweep.butterfly", parts[1])});
    }
  }
  sweep.reject_unknown();

  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open configuration " + path.string());
  return parse_config(in);
}

}  // namespace sparsemia::experiment

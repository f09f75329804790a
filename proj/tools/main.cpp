// SPDX-License-Identifier: Apache-2.0
// Command-line driver: train, imp, attack, sweep, report, plot, resnet20.

#include "sparsemia/data/image_io.hpp"
#include "sparsemia/experiment/figure.hpp"
#include "sparsemia/experiment/runner.hpp"
#include "sparsemia/experiment/tradeoff.hpp"
#include "sparsemia/imp/mask_io.hpp"
#include "sparsemia/nn/checkpoint.hpp"
#include "sparsemia/nn/loss.hpp"
#include "sparsemia/nn/resnet_shapes.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>

namespace {

using namespace sparsemia;
using namespace sparsemia::experiment;
using nlohmann::json;

struct CommonArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool quiet = false;
};

void add_common(CLI::App& cmd, CommonArgs& args) {
  cmd.add_option("-c,--config", args.config, "experiment configuration (INI)")->required()->check(CLI::ExistingFile);
  cmd.add_option("-s,--seed", args.seed, "run this single seed instead of the configured list");
  cmd.add_option("-o,--out", args.out, "output directory (overrides experiment.output)");
  cmd.add_flag("-q,--quiet", args.quiet, "no progress messages");
}

ExperimentConfig resolve(const CommonArgs& args) {
  auto config = load_config(args.config);
  if (args.seed) config.seeds = {*args.seed};
  if (!args.out.empty()) config.output = args.out;
  std::filesystem::create_directories(config.output);
  return config;
}

RunOptions run_options(const CommonArgs& args, const ExperimentConfig& config) {
  RunOptions options;
  if (!args.quiet) options.log = [](const std::string& msg) { std::cerr << msg << '\n'; };
  options.artifacts = config.output / "artifacts";
  return options;
}

void write_history(const std::filesystem::path& path, const nn::TrainedModel& model) {
  std::ofstream out(path);
  out << "epoch,learning_rate,train_loss,val_accuracy\n" << std::setprecision(17);
  for (const auto& e : model.history) {
    out << e.epoch << ',' << e.learning_rate << ',' << e.train_loss << ',' << e.val_accuracy << '\n';
  }
}

int cmd_train(const CommonArgs& args) {
  const auto config = resolve(args);
  const auto dataset = prepare_dataset(config.dataset);
  const auto level = configured_level(config);
  json summary = json::array();
  for (auto seed : config.seeds) {
    const auto split = mia::partition(dataset.size(), seed);
    const auto sides = side_data(dataset, split, mia::Side::target);
    auto cfg = side_train_config(config, seed, mia::Side::target);
    cfg.seed = derive_seed(cfg.seed, 0);
    if (!args.quiet) std::cerr << "seed " << seed << ": training " << level.name() << '\n';
    const auto model = nn::train(initialized_network(config, level, dataset, seed, mia::Side::target), sides.train,
                                 sides.validation, cfg);
    const std::string stem = "target_seed" + std::to_string(seed);
    nn::save_checkpoint(config.output / (stem + ".ckpt"), model.network);
    nn::save_checkpoint(config.output / (stem + "_best.ckpt"), model.best_network());
    write_history(config.output / (stem + "_history.csv"), model);
    summary.push_back({{"seed", seed},
                       {"best_epoch", model.best_epoch},
                       {"train_accuracy", nn::accuracy(model.network, sides.train)},
                       {"test_accuracy", nn::accuracy(model.network, sides.test)},
                       {"parameters", nn::count_params(model.network).total}});
  }
  std::cout << summary.dump(2) << '\n';
  return 0;
}

int cmd_imp(const CommonArgs& args) {
  const auto config = resolve(args);
  const auto dataset = prepare_dataset(config.dataset);
  for (auto seed : config.seeds) {
    const auto split = mia::partition(dataset.size(), seed);
    const auto sides = side_data(dataset, split, mia::Side::target);
    const auto on_round = [&](const imp::ImpRound& r) {
      if (!args.quiet) {
        std::cerr << "seed " << seed << ": round " << r.round << " keeps " << r.survivors << "/" << r.prunable
                  << '\n';
      }
    };
    const auto rounds = imp::imp_run(initialized_network(config, Level{}, dataset, seed, mia::Side::target),
                                     sides.train, sides.validation,
                                     side_train_config(config, seed, mia::Side::target), config.imp, on_round);
    imp::write_imp_outputs(config.output / ("imp_seed" + std::to_string(seed)), rounds, config.imp);
  }
  return 0;
}

int finish_report(const ExperimentConfig& config, const ExperimentReport& report) {
  save_report(config.output / "report.json", report);
  write_records_csv(config.output / "records.csv", report);
  std::cout << to_json(report)["aggregates"].dump(2) << '\n';
  if (!report.diagnostics.empty()) {
    json d = json::array();
    for (const auto& diag : report.diagnostics) d.push_back({{"seed", diag.seed}, {"message", diag.message}});
    std::cerr << json{{"error", "some seeds failed"}, {"diagnostics", d}}.dump() << '\n';
    return report.records.empty() ? 1 : 0;
  }
  return 0;
}

int cmd_attack(const CommonArgs& args) {
  const auto config = resolve(args);
  return finish_report(config, run_experiment(config, run_options(args, config)));
}

int cmd_sweep(const CommonArgs& args) {
  const auto config = resolve(args);
  return finish_report(config, run_sweep(config, run_options(args, config)));
}

int cmd_report(const std::string& path, const std::vector<double>& window, const std::string& out) {
  const auto report = load_report(path);
  std::cout << std::fixed << std::setprecision(2);
  std::cout << std::left << std::setw(20) << "level" << std::right << std::setw(6) << "n" << std::setw(12)
            << "nonzero %" << std::setw(18) << "test acc" << std::setw(18) << "defense" << "  significant\n";
  for (const auto& a : report.aggregates) {
    std::cout << std::left << std::setw(20) << a.level << std::right << std::setw(6) << a.count << std::setw(12)
              << a.nonzero_percent.mean << std::setw(10) << a.test_accuracy.mean << " ± " << std::setw(5)
              << a.test_accuracy.std << std::setw(10) << a.defense.mean << " ± " << std::setw(5) << a.defense.std
              << "  " << (a.significant ? "yes" : "no") << '\n';
  }
  SparsityWindow w;
  if (window.size() == 2) w = {window[0], window[1]};
  const auto tradeoff = compute_tradeoff(report, w);
  const auto j = to_json(tradeoff);
  std::cout << "tradeoff " << j.dump() << '\n';
  if (!out.empty()) std::ofstream(out) << j.dump(2) << '\n';
  return 0;
}

int cmd_resnet20() {
  const auto shape = nn::resnet20_shape();
  std::cout << "resnet20 parameters " << shape.param_count() << '\n' << std::fixed << std::setprecision(2);
  for (int depth : {2, 3}) {
    for (int s = 1; s <= 3; ++s) {
      std::cout << "butterfly S=" << s << " L=" << depth << ": " << nn::resnet20_butterfly_fraction(s, depth)
                << "% of parameters\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparsity and membership-inference experiments"};
  app.require_subcommand(1);

  CommonArgs train_args, imp_args, attack_args, sweep_args;
  auto* train = app.add_subcommand("train", "train target models for the configured variant");
  add_common(*train, train_args);
  auto* imp_cmd = app.add_subcommand("imp", "iterative magnitude pruning with rewinding");
  add_common(*imp_cmd, imp_args);
  auto* attack = app.add_subcommand("attack", "shadow-model membership attack on the configured variant");
  add_common(*attack, attack_args);
  auto* sweep = app.add_subcommand("sweep", "attack every sparsity level of the configured sweep");
  add_common(*sweep, sweep_args);

  std::string report_path, tradeoff_out;
  std::vector<double> window;
  auto* report = app.add_subcommand("report", "aggregate table and trade-off of a report");
  report->add_option("report", report_path, "report.json")->required()->check(CLI::ExistingFile);
  report->add_option("-w,--window", window, "nonzero-percent window: MIN MAX")->expected(2);
  report->add_option("-o,--out", tradeoff_out, "write the trade-off JSON here");

  std::string plot_path, plot_out;
  auto* plot = app.add_subcommand("plot", "SVG scatter of defense against accuracy");
  plot->add_option("report", plot_path, "report.json")->required()->check(CLI::ExistingFile);
  plot->add_option("-o,--out", plot_out, "SVG path")->required();

  auto* resnet = app.add_subcommand("resnet20", "ResNet-20 parameter accounting");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code != 0) std::cerr << json{{"error", "usage"}, {"message", e.what()}}.dump() << '\n';
    return code;
  }

  try {
    if (*train) return cmd_train(train_args);
    if (*imp_cmd) return cmd_imp(imp_args);
    if (*attack) return cmd_attack(attack_args);
    if (*sweep) return cmd_sweep(sweep_args);
    if (*report) return cmd_report(report_path, window, tradeoff_out);
    if (*plot) {
      emit_figure(load_report(plot_path), plot_out);
      return 0;
    }
    if (*resnet) return cmd_resnet20();
  } catch (const data::DatasetError& e) {
    std::cerr << json{{"error", "dataset"}, {"kind", data::to_string(e.kind())}, {"message", e.what()}}.dump()
              << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << json{{"error", "invalid_argument"}, {"message", e.what()}}.dump() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "failure"}, {"message", e.what()}}.dump() << '\n';
    return 1;
  }
  return 1;
}

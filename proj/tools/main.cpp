#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "bpj/experiment.hpp"
#include "bpj/gradcheck.hpp"

namespace {

using nlohmann::json;

json load_config_document(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw bpj::ConfigError("cannot open config file " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& err) {
    throw bpj::ConfigError(path + ": " + err.what());
  }
  return doc;
}

struct RunFlags {
  std::string config_path;
  std::string algorithm;
  std::string procedure;
  std::string generator;
  std::string csv_path;
  std::string kernel_kind;
  std::string output_dir;
  double learning_rate = 0.0;
  double gamma = 0.0;
  int batch_size = 0;
  int epochs = 0;
  std::uint64_t seed = 0;
  std::uint64_t dataset_seed = 0;
  bool no_shuffle = false;
  bool trace = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& flags) {
  cmd->add_option("--config", flags.config_path, "JSON config file");
  cmd->add_option("--algorithm", flags.algorithm,
                  "backprojection | kernel_backprojection | backpropagation");
  cmd->add_option("--procedure", flags.procedure,
                  "forward | backward | forward_backward");
  cmd->add_option("--generator", flags.generator,
                  "two_blobs | three_blobs | blobs | csv");
  cmd->add_option("--data-csv", flags.csv_path, "dataset CSV (generator csv)");
  cmd->add_option("--kernel", flags.kernel_kind, "linear | rbf");
  cmd->add_option("--gamma", flags.gamma, "rbf bandwidth");
  cmd->add_option("--learning-rate", flags.learning_rate, "step size");
  cmd->add_option("--batch-size", flags.batch_size, "minibatch size");
  cmd->add_option("--epochs", flags.epochs, "training epochs");
  cmd->add_option("--seed", flags.seed, "weight/shuffle seed");
  cmd->add_option("--dataset-seed", flags.dataset_seed, "data generator seed");
  cmd->add_option("--output-dir", flags.output_dir, "artifact directory");
  cmd->add_flag("--no-shuffle", flags.no_shuffle, "keep sample order fixed");
  cmd->add_flag("--trace", flags.trace, "write per-update trace.csv");
}

/// Flags override the corresponding config-file fields.
json merged_config(const CLI::App* cmd, const RunFlags& flags) {
  json doc = load_config_document(flags.config_path);
  if (cmd->count("--algorithm")) doc["algorithm"] = flags.algorithm;
  if (cmd->count("--procedure")) doc["procedure"] = flags.procedure;
  if (cmd->count("--generator")) doc["dataset"]["generator"] = flags.generator;
  if (cmd->count("--data-csv")) {
    doc["dataset"]["generator"] = "csv";
    doc["dataset"]["csv_path"] = flags.csv_path;
  }
  if (cmd->count("--kernel")) doc["kernel"]["kind"] = flags.kernel_kind;
  if (cmd->count("--gamma")) doc["kernel"]["gamma"] = flags.gamma;
  if (cmd->count("--learning-rate")) doc["learning_rate"] = flags.learning_rate;
  if (cmd->count("--batch-size")) doc["batch_size"] = flags.batch_size;
  if (cmd->count("--epochs")) doc["epochs"] = flags.epochs;
  if (cmd->count("--seed")) doc["seed"] = flags.seed;
  if (cmd->count("--dataset-seed")) doc["dataset"]["seed"] = flags.dataset_seed;
  if (cmd->count("--output-dir")) doc["output_dir"] = flags.output_dir;
  if (cmd->count("--no-shuffle")) doc["shuffle"] = false;
  if (cmd->count("--trace")) doc["record_trace"] = true;
  return doc;
}

int do_run(const CLI::App* cmd, const RunFlags& flags) {
  const bpj::ExperimentConfig config =
      bpj::config_from_json_text(merged_config(cmd, flags).dump());
  const bpj::ExperimentResult result = bpj::run_experiment(config);
  std::cout << "algorithm " << bpj::to_string(config.algorithm)
            << ", procedure " << bpj::procedure_to_string(config.procedure)
            << ": final train accuracy " << result.report.final_train_accuracy
            << "\nartifacts in " << config.output_dir.string() << '\n';
  return 0;
}

int do_sweep(const CLI::App* cmd, const RunFlags& flags, int jobs) {
  const bpj::ExperimentConfig base = bpj::config_from_json_text(
      merged_config(cmd, flags).dump(), /*enforce_kernel_pairing=*/false);
  bpj::run_sweep(base, jobs);
  std::cout << "sweep artifacts in " << base.output_dir.string() << '\n';
  return 0;
}

int do_gradcheck(const bpj::GradCheckConfig& config) {
  if (config.max_dim > 8)
    throw bpj::ConfigError("gradcheck dims are capped at 8 (Kronecker oracle)");
  const bpj::GradCheckReport report = bpj::run_gradient_check(config);
  std::cout << "trials: " << report.trials
            << "\ngradients checked: " << report.gradients_checked
            << "\nmax relative error vs finite differences: "
            << report.max_rel_error_fd << " (tolerance " << report.tolerance
            << ")\nmax relative error vs Kronecker form: "
            << report.max_rel_error_kronecker << " (tolerance "
            << report.kronecker_tolerance << ")\n"
            << (report.pass ? "PASS" : "FAIL") << '\n';
  return report.pass ? 0 : 1;
}

struct GridFlags {
  std::string model_path;
  std::string out_path = "decision_grid.csv";
  std::string data_csv;
  int resolution = 200;
  std::vector<double> bounds;  // x1_min x1_max x2_min x2_max
};

int do_grid(const GridFlags& flags) {
  const bpj::Model model = bpj::load_model(flags.model_path);
  bpj::GridSpec grid;
  if (!flags.bounds.empty()) {
    grid.x1_min = flags.bounds[0];
    grid.x1_max = flags.bounds[1];
    grid.x2_min = flags.bounds[2];
    grid.x2_max = flags.bounds[3];
    grid.resolution = flags.resolution;
  } else if (!flags.data_csv.empty()) {
    const bpj::Dataset data = bpj::load_dataset_csv(flags.data_csv);
    grid = bpj::default_grid_bounds(data.X, flags.resolution);
  } else {
    throw bpj::ConfigError("grid needs either --bounds or --data-csv");
  }
  bpj::export_decision_grid(model, grid, flags.out_path);
  std::cout << "wrote " << flags.out_path << '\n';
  return 0;
}

int dispatch(int argc, char** argv) {
  CLI::App app{"backprojection training experiments"};
  app.require_subcommand(1);

  RunFlags run_flags;
  CLI::App* run = app.add_subcommand("run", "train one configuration");
  add_run_flags(run, run_flags);

  RunFlags sweep_flags;
  int jobs = 1;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "train every algorithm/procedure variant plus a timing table");
  add_run_flags(sweep, sweep_flags);
  sweep->add_option("--jobs", jobs, "parallel training threads")
      ->check(CLI::PositiveNumber);

  bpj::GradCheckConfig gc;
  CLI::App* gradcheck =
      app.add_subcommand("gradcheck", "verify gradients against the oracles");
  gradcheck->add_option("--trials", gc.trials)->check(CLI::PositiveNumber);
  gradcheck->add_option("--max-dim", gc.max_dim)->check(CLI::PositiveNumber);
  gradcheck->add_option("--max-batch", gc.max_batch)->check(CLI::PositiveNumber);
  gradcheck->add_option("--tolerance", gc.tolerance);
  gradcheck->add_option("--kron-tolerance", gc.kronecker_tolerance);
  gradcheck->add_option("--step", gc.step);
  gradcheck->add_option("--seed", gc.seed);

  GridFlags grid_flags;
  CLI::App* grid =
      app.add_subcommand("grid", "sample a trained model on a 2-D grid");
  grid->add_option("--model", grid_flags.model_path, "model.json path")
      ->required();
  grid->add_option("--out", grid_flags.out_path, "output CSV");
  grid->add_option("--resolution", grid_flags.resolution)
      ->check(CLI::Range(2, 4096));
  grid->add_option("--data-csv", grid_flags.data_csv,
                   "dataset CSV for automatic bounds");
  grid->add_option("--bounds", grid_flags.bounds,
                   "x1_min x1_max x2_min x2_max")
      ->expected(4);

  RunFlags datagen_flags;
  std::string datagen_out;
  CLI::App* datagen = app.add_subcommand("datagen", "write a dataset CSV");
  add_run_flags(datagen, datagen_flags);
  datagen->add_option("--out", datagen_out, "output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return 2;
  }

  if (*run) return do_run(run, run_flags);
  if (*sweep) return do_sweep(sweep, sweep_flags, jobs);
  if (*gradcheck) return do_gradcheck(gc);
  if (*grid) return do_grid(grid_flags);
  if (*datagen) {
    const bpj::ExperimentConfig config = bpj::config_from_json_text(
        merged_config(datagen, datagen_flags).dump(),
        /*enforce_kernel_pairing=*/false);
    bpj::save_dataset_csv(bpj::make_dataset(config.dataset), datagen_out);
    std::cout << "wrote " << datagen_out << '\n';
    return 0;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const bpj::TrainingAbort& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 3;
  } catch (const std::domain_error& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 3;
  } catch (const bpj::ConfigError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
}

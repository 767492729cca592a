#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bpj/backprop.hpp"
#include "bpj/data.hpp"
#include "bpj/kernel.hpp"
#include "bpj/model_io.hpp"
#include "bpj/network.hpp"
#include "bpj/trainer.hpp"

namespace bpj {

enum class AlgorithmKind { Backprojection, KernelBackprojection, Backpropagation };

AlgorithmKind algorithm_from_string(const std::string& name);
std::string_view to_string(AlgorithmKind kind);

/// Invalid configuration (bad field, inconsistent combination). The CLI
/// maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Where the training set comes from: a built-in blob benchmark, custom
/// blobs with explicit parameters, or a CSV file.
struct DatasetSpec {
  std::string generator = "two_blobs";  // two_blobs | three_blobs | blobs | csv
  std::filesystem::path csv_path;
  std::vector<int> n_per_class;                // generator == blobs
  std::vector<std::vector<double>> means;      // generator == blobs
  std::vector<double> variances;               // generator == blobs
  std::uint64_t seed = 1;
  bool standardize = true;
};

Dataset make_dataset(const DatasetSpec& spec);

/// Layer sizes and per-layer activation/loss choices. The output width is
/// not listed; it is derived from the dataset's class count. activations
/// and losses, when given, must cover hidden layers plus the output layer;
/// empty means ELU hidden layers with a sigmoid output, mse everywhere.
struct ArchitectureSpec {
  std::vector<int> hidden_units{15, 20};
  std::vector<Activation> activations;
  std::vector<Loss> losses;
};

struct KernelSpec {
  std::string kind = "rbf";
  std::optional<double> gamma;  // rbf default: 1/d at data resolution time
};

struct ExperimentConfig {
  DatasetSpec dataset;
  ArchitectureSpec architecture;
  AlgorithmKind algorithm = AlgorithmKind::Backprojection;
  Procedure procedure = Procedure::Forward;
  std::optional<KernelSpec> kernel;
  std::optional<double> learning_rate;  // default depends on algorithm
  int batch_size = 30;
  int epochs = 200;
  std::uint64_t seed = 42;
  bool shuffle = true;
  bool record_trace = false;
  std::filesystem::path output_dir = "out";
};

/// 1e-4 for backprojection and backpropagation, 1e-5 for kernel
/// backprojection, unless the config names a rate explicitly.
double resolved_learning_rate(const ExperimentConfig& config);

KernelKind resolve_kernel(const KernelSpec& spec, Eigen::Index data_dim);

/// Layer specs for the experiment: hidden_units then the output width
/// implied by n_classes; for kernel runs the first fan-in is n.
std::vector<LayerSpec> build_architecture(const ArchitectureSpec& arch,
                                          Eigen::Index input_dim,
                                          int n_classes);

/// Parses a config document, filling defaults and validating (unknown
/// names, inconsistent lengths, kernel spec present iff the algorithm is
/// kernel_backprojection). Throws ConfigError. enforce_kernel_pairing is
/// dropped by the sweep, which sets algorithm and kernel per variant.
ExperimentConfig config_from_json_text(const std::string& text,
                                       bool enforce_kernel_pairing = true);

/// Resolved config echo (defaults materialized) as a pretty JSON document
/// with alphabetically ordered keys.
std::string config_to_json_text(const ExperimentConfig& config,
                                std::optional<double> resolved_gamma = std::nullopt);

struct ExperimentResult {
  TrainReport report;
  Model model;
  Dataset data;  // raw, pre-standardization
};

/// Trains per the config and writes loss_curve.csv, report.json and
/// model.json (plus trace.csv when record_trace) under output_dir.
/// Propagates ConfigError and TrainingAbort.
ExperimentResult run_experiment(const ExperimentConfig& config);

struct GridSpec {
  double x1_min = 0.0;
  double x1_max = 1.0;
  double x2_min = 0.0;
  double x2_max = 1.0;
  int resolution = 200;
};

/// Data bounding box with every side pushed out by 20% of that axis range.
GridSpec default_grid_bounds(const Eigen::Ref<const Eigen::MatrixXd>& X,
                             int resolution);

/// resolution^2 rows of x1,x2,predicted_class,out_1..out_p covering the
/// rectangle. Only 2-D input spaces are supported.
void export_decision_grid(const Model& model, const GridSpec& grid,
                          const std::filesystem::path& path);

/// Runs every algorithm/procedure variant of the base config into its own
/// subdirectory (backpropagation has no procedure variants), then a shared
/// timing comparison. Emits sweep_summary.json and timing_comparison.json.
/// jobs > 1 trains variants in that many threads.
void run_sweep(const ExperimentConfig& base, int jobs = 1);

}  // namespace bpj

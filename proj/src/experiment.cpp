#include "bpj/experiment.hpp"

#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <numeric>
#include <thread>
#include <utility>

#include "json.hpp"

namespace bpj {

namespace {

using nlohmann::json;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed)
      if (item.key() == key) { known = true; break; }
    if (!known)
      throw ConfigError("unknown field '" + item.key() + "' in " + where);
  }
}

template <typename T>
T field_as(const json& obj, const char* key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& err) {
    throw ConfigError("bad field '" + std::string(key) + "' in " + where +
                      ": " + err.what());
  }
}

template <typename T>
T field_or(const json& obj, const char* key, const std::string& where,
           T fallback) {
  if (!obj.contains(key)) return fallback;
  return field_as<T>(obj, key, where);
}

DatasetSpec dataset_from_json(const json& obj) {
  check_keys(obj,
             {"generator", "csv_path", "n_per_class", "means", "variances",
              "seed", "standardize"},
             "dataset");
  DatasetSpec spec;
  spec.generator = field_or<std::string>(obj, "generator", "dataset", spec.generator);
  if (spec.generator != "two_blobs" && spec.generator != "three_blobs" &&
      spec.generator != "blobs" && spec.generator != "csv")
    throw ConfigError("unknown dataset generator: " + spec.generator);
  spec.csv_path = field_or<std::string>(obj, "csv_path", "dataset", "");
  spec.n_per_class = field_or<std::vector<int>>(obj, "n_per_class", "dataset", {});
  spec.means = field_or<std::vector<std::vector<double>>>(obj, "means", "dataset", {});
  spec.variances = field_or<std::vector<double>>(obj, "variances", "dataset", {});
  spec.seed = field_or<std::uint64_t>(obj, "seed", "dataset", spec.seed);
  spec.standardize = field_or<bool>(obj, "standardize", "dataset", spec.standardize);

  if (spec.generator == "csv" && spec.csv_path.empty())
    throw ConfigError("dataset generator 'csv' requires csv_path");
  if (spec.generator == "blobs" &&
      (spec.n_per_class.empty() || spec.means.empty() || spec.variances.empty()))
    throw ConfigError(
        "dataset generator 'blobs' requires n_per_class, means and variances");
  return spec;
}

ArchitectureSpec architecture_from_json(const json& obj) {
  check_keys(obj, {"hidden_units", "activations", "losses"}, "architecture");
  ArchitectureSpec arch;
  arch.hidden_units =
      field_or<std::vector<int>>(obj, "hidden_units", "architecture", arch.hidden_units);
  for (const std::string& name :
       field_or<std::vector<std::string>>(obj, "activations", "architecture", {})) {
    try {
      arch.activations.push_back(activation_from_string(name));
    } catch (const std::invalid_argument& err) {
      throw ConfigError(err.what());
    }
  }
  for (const std::string& name :
       field_or<std::vector<std::string>>(obj, "losses", "architecture", {})) {
    try {
      arch.losses.push_back(loss_from_string(name));
    } catch (const std::invalid_argument& err) {
      throw ConfigError(err.what());
    }
  }
  return arch;
}

json dataset_to_json(const DatasetSpec& spec) {
  json obj;
  obj["generator"] = spec.generator;
  if (spec.generator == "csv") obj["csv_path"] = spec.csv_path.string();
  if (spec.generator == "blobs") {
    obj["n_per_class"] = spec.n_per_class;
    obj["means"] = spec.means;
    obj["variances"] = spec.variances;
  }
  obj["seed"] = spec.seed;
  obj["standardize"] = spec.standardize;
  return obj;
}

double mean_of(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

json timing_stats_to_json(const TimingStats& stats) {
  json obj;
  obj["mean_epoch_seconds"] = stats.mean_epoch_seconds;
  obj["std_epoch_seconds"] = stats.std_epoch_seconds;
  obj["final_train_accuracy"] = stats.final_train_accuracy;
  return obj;
}

}  // namespace

AlgorithmKind algorithm_from_string(const std::string& name) {
  if (name == "backprojection") return AlgorithmKind::Backprojection;
  if (name == "kernel_backprojection") return AlgorithmKind::KernelBackprojection;
  if (name == "backpropagation") return AlgorithmKind::Backpropagation;
  throw ConfigError("unknown algorithm: " + name);
}

std::string_view to_string(AlgorithmKind kind) {
  switch (kind) {
    case AlgorithmKind::Backprojection: return "backprojection";
    case AlgorithmKind::KernelBackprojection: return "kernel_backprojection";
    case AlgorithmKind::Backpropagation: return "backpropagation";
  }
  throw std::logic_error("unknown algorithm enum value");
}

Dataset make_dataset(const DatasetSpec& spec) {
  if (spec.generator == "two_blobs") return two_blobs(spec.seed);
  if (spec.generator == "three_blobs") return three_blobs(spec.seed);
  if (spec.generator == "csv") {
    if (spec.csv_path.empty())
      throw ConfigError("dataset generator 'csv' requires csv_path");
    return load_dataset_csv(spec.csv_path);
  }
  if (spec.generator != "blobs")
    throw ConfigError("unknown dataset generator: " + spec.generator);
  if (spec.n_per_class.empty() || spec.means.empty() || spec.variances.empty())
    throw ConfigError(
        "dataset generator 'blobs' requires n_per_class, means and variances");

  std::vector<Eigen::VectorXd> means;
  means.reserve(spec.means.size());
  for (const std::vector<double>& m : spec.means)
    means.push_back(Eigen::Map<const Eigen::VectorXd>(
        m.data(), static_cast<Eigen::Index>(m.size())));
  return generate_blobs(spec.n_per_class, means, spec.variances, spec.seed);
}

double resolved_learning_rate(const ExperimentConfig& config) {
  if (config.learning_rate) return *config.learning_rate;
  return config.algorithm == AlgorithmKind::KernelBackprojection ? 1e-5 : 1e-4;
}

KernelKind resolve_kernel(const KernelSpec& spec, Eigen::Index data_dim) {
  if (spec.kind == "linear") return KernelKind::linear();
  if (spec.kind == "rbf")
    return KernelKind::rbf(
        spec.gamma.value_or(1.0 / static_cast<double>(data_dim)));
  throw ConfigError("unknown kernel: " + spec.kind);
}

std::vector<LayerSpec> build_architecture(const ArchitectureSpec& arch,
                                          Eigen::Index input_dim,
                                          int n_classes) {
  const std::size_t n_layers = arch.hidden_units.size() + 1;

  std::vector<Activation> activations = arch.activations;
  if (activations.empty()) {
    activations.assign(n_layers, Activation::Elu);
    activations.back() = Activation::Sigmoid;
  }
  std::vector<Loss> losses = arch.losses;
  if (losses.empty()) losses.assign(n_layers, Loss::Mse);

  if (activations.size() != n_layers)
    throw ConfigError("architecture lists " + std::to_string(activations.size()) +
                      " activations for " + std::to_string(n_layers) + " layers");
  if (losses.size() != n_layers)
    throw ConfigError("architecture lists " + std::to_string(losses.size()) +
                      " losses for " + std::to_string(n_layers) + " layers");

  std::vector<LayerSpec> specs(n_layers);
  int in_dim = static_cast<int>(input_dim);
  for (std::size_t i = 0; i < n_layers; ++i) {
    const int out_dim = i + 1 < n_layers ? arch.hidden_units[i] : label_dim(n_classes);
    if (i + 1 < n_layers && out_dim < 1)
      throw ConfigError("hidden layer sizes must be positive");
    specs[i] = {in_dim, out_dim, activations[i], losses[i]};
    if (losses[i] == Loss::CrossEntropy && activations[i] != Activation::Sigmoid)
      throw ConfigError("layer " + std::to_string(i + 1) +
                        " pairs cross_entropy with " +
                        std::string(to_string(activations[i])) +
                        "; cross_entropy requires sigmoid");
    in_dim = out_dim;
  }
  return specs;
}

ExperimentConfig config_from_json_text(const std::string& text,
                                       bool enforce_kernel_pairing) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& err) {
    throw ConfigError(std::string("config is not valid JSON: ") + err.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  check_keys(doc,
             {"dataset", "architecture", "algorithm", "procedure", "kernel",
              "learning_rate", "batch_size", "epochs", "seed", "shuffle",
              "record_trace", "output_dir"},
             "config");

  ExperimentConfig config;
  if (doc.contains("dataset")) config.dataset = dataset_from_json(doc["dataset"]);
  if (doc.contains("architecture"))
    config.architecture = architecture_from_json(doc["architecture"]);
  config.algorithm = algorithm_from_string(
      field_or<std::string>(doc, "algorithm", "config", "backprojection"));
  try {
    config.procedure = procedure_from_string(
        field_or<std::string>(doc, "procedure", "config", "forward"));
  } catch (const std::invalid_argument& err) {
    throw ConfigError(err.what());
  }

  if (doc.contains("kernel")) {
    const json& kobj = doc["kernel"];
    check_keys(kobj, {"kind", "gamma"}, "kernel");
    KernelSpec kspec;
    kspec.kind = field_or<std::string>(kobj, "kind", "kernel", kspec.kind);
    if (kspec.kind != "linear" && kspec.kind != "rbf")
      throw ConfigError("unknown kernel: " + kspec.kind);
    if (kobj.contains("gamma")) {
      kspec.gamma = field_as<double>(kobj, "gamma", "kernel");
      if (!(*kspec.gamma > 0.0)) throw ConfigError("kernel gamma must be positive");
    }
    config.kernel = std::move(kspec);
  }

  if (doc.contains("learning_rate")) {
    config.learning_rate = field_as<double>(doc, "learning_rate", "config");
    if (!(*config.learning_rate > 0.0))
      throw ConfigError("learning_rate must be positive");
  }
  config.batch_size = field_or<int>(doc, "batch_size", "config", config.batch_size);
  if (config.batch_size < 1) throw ConfigError("batch_size must be positive");
  config.epochs = field_or<int>(doc, "epochs", "config", config.epochs);
  if (config.epochs < 0) throw ConfigError("epochs must be nonnegative");
  config.seed = field_or<std::uint64_t>(doc, "seed", "config", config.seed);
  config.shuffle = field_or<bool>(doc, "shuffle", "config", config.shuffle);
  config.record_trace =
      field_or<bool>(doc, "record_trace", "config", config.record_trace);
  config.output_dir =
      field_or<std::string>(doc, "output_dir", "config", config.output_dir.string());

  if (enforce_kernel_pairing) {
    const bool wants_kernel =
        config.algorithm == AlgorithmKind::KernelBackprojection;
    if (wants_kernel && !config.kernel)
      throw ConfigError("kernel_backprojection requires a kernel spec");
    if (!wants_kernel && config.kernel)
      throw ConfigError("kernel spec is only valid with kernel_backprojection");
  }
  return config;
}

std::string config_to_json_text(const ExperimentConfig& config,
                                std::optional<double> resolved_gamma) {
  json doc;
  doc["dataset"] = dataset_to_json(config.dataset);

  const std::size_t n_layers = config.architecture.hidden_units.size() + 1;
  std::vector<Activation> activations = config.architecture.activations;
  if (activations.empty()) {
    activations.assign(n_layers, Activation::Elu);
    activations.back() = Activation::Sigmoid;
  }
  std::vector<Loss> losses = config.architecture.losses;
  if (losses.empty()) losses.assign(n_layers, Loss::Mse);
  doc["architecture"]["hidden_units"] = config.architecture.hidden_units;
  doc["architecture"]["activations"] = json::array();
  for (Activation a : activations)
    doc["architecture"]["activations"].push_back(std::string(to_string(a)));
  doc["architecture"]["losses"] = json::array();
  for (Loss l : losses)
    doc["architecture"]["losses"].push_back(std::string(to_string(l)));

  doc["algorithm"] = std::string(to_string(config.algorithm));
  doc["procedure"] = procedure_to_string(config.procedure);
  if (config.kernel) {
    doc["kernel"]["kind"] = config.kernel->kind;
    if (config.kernel->kind == "rbf") {
      if (resolved_gamma)
        doc["kernel"]["gamma"] = *resolved_gamma;
      else if (config.kernel->gamma)
        doc["kernel"]["gamma"] = *config.kernel->gamma;
    }
  }
  doc["learning_rate"] = resolved_learning_rate(config);
  doc["batch_size"] = config.batch_size;
  doc["epochs"] = config.epochs;
  doc["seed"] = config.seed;
  doc["shuffle"] = config.shuffle;
  doc["record_trace"] = config.record_trace;
  doc["output_dir"] = config.output_dir.string();
  return doc.dump(2) + "\n";
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  Dataset raw = make_dataset(config.dataset);

  std::optional<Standardizer> scaler;
  Dataset train = raw;
  if (config.dataset.standardize) {
    auto [X, s] = standardize(raw.X);
    train.X = std::move(X);
    scaler = std::move(s);
  }

  std::optional<KernelModel> kmodel;
  std::optional<double> resolved_gamma;
  if (config.algorithm == AlgorithmKind::KernelBackprojection) {
    if (!config.kernel)
      throw ConfigError("kernel_backprojection requires a kernel spec");
    const KernelKind kind = resolve_kernel(*config.kernel, train.X.rows());
    if (kind.type == KernelKind::Type::Rbf) resolved_gamma = kind.gamma;
    kmodel = build_kernel_model(kind, train.X);
    train.X = kmodel->K_normalized;
  }

  const std::vector<LayerSpec> specs =
      build_architecture(config.architecture, train.X.rows(), raw.n_classes);
  Network net = Network::random(specs, config.seed);

  TrainConfig tc;
  tc.procedure = config.procedure;
  tc.learning_rate = resolved_learning_rate(config);
  tc.batch_size = config.batch_size;
  tc.epochs = config.epochs;
  tc.seed = config.seed;
  tc.shuffle = config.shuffle;
  tc.record_trace = config.record_trace;

  TrainReport report = config.algorithm == AlgorithmKind::Backpropagation
                           ? train_backpropagation(net, train, tc)
                           : train_backprojection(net, train, tc);

  std::filesystem::create_directories(config.output_dir);

  {
    std::string csv = "epoch,mean_loss,wall_seconds\n";
    for (std::size_t e = 0; e < report.epoch_mean_loss.size(); ++e) {
      csv += std::to_string(e + 1);
      csv += ',';
      csv += fmt17(report.epoch_mean_loss[e]);
      csv += ',';
      csv += fmt17(report.epoch_seconds[e]);
      csv += '\n';
    }
    write_text(config.output_dir / "loss_curve.csv", csv);
  }

  if (config.record_trace) {
    std::string csv = "epoch,batch,layer,loss\n";
    for (const UpdateRecord& rec : report.trace) {
      csv += std::to_string(rec.epoch);
      csv += ',';
      csv += std::to_string(rec.batch);
      csv += ',';
      csv += std::to_string(rec.layer);
      csv += ',';
      csv += fmt17(rec.loss);
      csv += '\n';
    }
    write_text(config.output_dir / "trace.csv", csv);
  }

  Model model{std::move(net), std::move(scaler), std::move(kmodel)};
  save_model(model, config.output_dir / "model.json");

  {
    json doc;
    doc["config"] = json::parse(config_to_json_text(config, resolved_gamma));
    doc["final_train_accuracy"] = report.final_train_accuracy;
    if (!report.epoch_mean_loss.empty())
      doc["final_mean_loss"] = report.epoch_mean_loss.back();
    doc["epochs_run"] = static_cast<int>(report.epoch_mean_loss.size());
    doc["mean_epoch_seconds"] = mean_of(report.epoch_seconds);
    doc["total_train_seconds"] =
        std::accumulate(report.epoch_seconds.begin(), report.epoch_seconds.end(), 0.0);
    write_text(config.output_dir / "report.json", doc.dump(2) + "\n");
  }

  return {std::move(report), std::move(model), std::move(raw)};
}

GridSpec default_grid_bounds(const Eigen::Ref<const Eigen::MatrixXd>& X,
                             int resolution) {
  if (X.rows() != 2)
    throw ConfigError("decision grid requires 2-D input data");
  GridSpec grid;
  grid.resolution = resolution;
  const auto pad = [](double lo, double hi, double& out_lo, double& out_hi) {
    const double range = hi - lo;
    const double margin = range > 0.0 ? 0.2 * range : 1.0;
    out_lo = lo - margin;
    out_hi = hi + margin;
  };
  pad(X.row(0).minCoeff(), X.row(0).maxCoeff(), grid.x1_min, grid.x1_max);
  pad(X.row(1).minCoeff(), X.row(1).maxCoeff(), grid.x2_min, grid.x2_max);
  return grid;
}

void export_decision_grid(const Model& model, const GridSpec& grid,
                          const std::filesystem::path& path) {
  if (grid.resolution < 2) throw ConfigError("grid resolution must be at least 2");

  Eigen::Index raw_dim = model.net.input_dim();
  if (model.kernel) raw_dim = model.kernel->train_X.rows();
  if (model.scaler) raw_dim = model.scaler->mean.size();
  if (raw_dim != 2) throw ConfigError("decision grid requires a 2-D input space");

  const int res = grid.resolution;
  const auto coord = [res](double lo, double hi, int idx) {
    return lo + (hi - lo) * static_cast<double>(idx) / static_cast<double>(res - 1);
  };

  const Eigen::Index p = model.net.output_dim();
  const Activation last_act =
      model.net.layer(model.net.n_layers()).spec.activation;

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << "x1,x2,predicted_class";
  for (Eigen::Index k = 1; k <= p; ++k) out << ",out_" << k;
  out << '\n';

  constexpr int kChunk = 4096;
  Eigen::MatrixXd points(2, kChunk);
  std::vector<std::pair<int, int>> held(kChunk);
  Eigen::Index filled = 0;

  const auto flush = [&]() {
    if (filled == 0) return;
    const Eigen::MatrixXd outputs = model_outputs(model, points.leftCols(filled));
    const Eigen::VectorXi classes = classify_outputs(outputs, last_act);
    for (Eigen::Index c = 0; c < filled; ++c) {
      out << fmt17(coord(grid.x1_min, grid.x1_max, held[static_cast<std::size_t>(c)].first))
          << ','
          << fmt17(coord(grid.x2_min, grid.x2_max, held[static_cast<std::size_t>(c)].second))
          << ',' << classes(c);
      for (Eigen::Index k = 0; k < p; ++k) out << ',' << fmt17(outputs(k, c));
      out << '\n';
    }
    filled = 0;
  };

  for (int i2 = 0; i2 < res; ++i2) {
    for (int i1 = 0; i1 < res; ++i1) {
      points(0, filled) = coord(grid.x1_min, grid.x1_max, i1);
      points(1, filled) = coord(grid.x2_min, grid.x2_max, i2);
      held[static_cast<std::size_t>(filled)] = {i1, i2};
      if (++filled == kChunk) flush();
    }
  }
  flush();
  if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

void run_sweep(const ExperimentConfig& base, int jobs) {
  struct Variant {
    AlgorithmKind algorithm;
    Procedure procedure;
  };
  static constexpr Procedure kProcedures[] = {
      Procedure::Forward, Procedure::Backward, Procedure::ForwardBackward};

  std::vector<Variant> variants;
  for (Procedure p : kProcedures)
    variants.push_back({AlgorithmKind::Backprojection, p});
  for (Procedure p : kProcedures)
    variants.push_back({AlgorithmKind::KernelBackprojection, p});
  variants.push_back({AlgorithmKind::Backpropagation, base.procedure});

  const auto variant_config = [&](const Variant& v) {
    ExperimentConfig config = base;
    config.algorithm = v.algorithm;
    config.procedure = v.procedure;
    if (v.algorithm == AlgorithmKind::KernelBackprojection)
      config.kernel = base.kernel ? *base.kernel : KernelSpec{};
    else
      config.kernel.reset();
    std::string dir = std::string(to_string(v.algorithm));
    if (v.algorithm != AlgorithmKind::Backpropagation)
      dir += "_" + procedure_to_string(v.procedure);
    config.output_dir = base.output_dir / dir;
    return config;
  };

  std::vector<json> rows(variants.size());
  std::vector<std::exception_ptr> errors(variants.size());
  std::atomic<std::size_t> next{0};

  const auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= variants.size()) return;
      try {
        const ExperimentConfig config = variant_config(variants[i]);
        const ExperimentResult result = run_experiment(config);
        json row;
        row["algorithm"] = std::string(to_string(config.algorithm));
        row["procedure"] = procedure_to_string(config.procedure);
        row["output_dir"] = config.output_dir.string();
        row["final_train_accuracy"] = result.report.final_train_accuracy;
        if (!result.report.epoch_mean_loss.empty())
          row["final_mean_loss"] = result.report.epoch_mean_loss.back();
        row["mean_epoch_seconds"] = mean_of(result.report.epoch_seconds);
        rows[i] = std::move(row);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    const std::size_t n_threads =
        std::min(static_cast<std::size_t>(jobs), variants.size());
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  for (const std::exception_ptr& err : errors)
    if (err) std::rethrow_exception(err);

  std::filesystem::create_directories(base.output_dir);
  {
    json doc;
    doc["config"] = json::parse(config_to_json_text(base));
    doc["variants"] = json::array();
    for (json& row : rows) doc["variants"].push_back(std::move(row));
    write_text(base.output_dir / "sweep_summary.json", doc.dump(2) + "\n");
  }

  Dataset raw = make_dataset(base.dataset);
  Dataset timing_data = raw;
  if (base.dataset.standardize) timing_data.X = standardize(raw.X).first;
  const std::vector<LayerSpec> arch =
      build_architecture(base.architecture, timing_data.X.rows(), raw.n_classes);

  TrainConfig tc;
  tc.procedure = base.procedure;
  tc.learning_rate = base.learning_rate.value_or(1e-4);
  tc.batch_size = base.batch_size;
  tc.seed = base.seed;
  tc.shuffle = base.shuffle;

  const KernelSpec kspec = base.kernel ? *base.kernel : KernelSpec{};
  const std::optional<KernelKind> kind =
      resolve_kernel(kspec, timing_data.X.rows());
  const TimingComparison cmp = epoch_timing_comparison(
      arch, timing_data, tc, kind, 2, 20, base.learning_rate.value_or(1e-5));

  json doc;
  doc["backprojection"] = timing_stats_to_json(cmp.backprojection);
  if (cmp.kernel_backprojection)
    doc["kernel_backprojection"] = timing_stats_to_json(*cmp.kernel_backprojection);
  doc["backpropagation"] = timing_stats_to_json(cmp.backpropagation);
  doc["ratio_backprojection_over_backpropagation"] = cmp.ratio;
  doc["warmup_epochs"] = cmp.warmup_epochs;
  doc["timed_epochs"] = cmp.timed_epochs;
  write_text(base.output_dir / "timing_comparison.json", doc.dump(2) + "\n");
}

}  // namespace bpj

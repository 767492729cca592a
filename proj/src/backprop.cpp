#include "bpj/backprop.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bpj {

namespace {

std::vector<Eigen::MatrixXd> backprop_gradients_impl(
    const Network& net, const Eigen::Ref<const Eigen::MatrixXd>& X,
    const Eigen::Ref<const Eigen::MatrixXd>& Y, double* loss_out) {
  const int L = net.n_layers();
  ForwardTrace trace = forward_pass(net, X);

  const Layer& last = net.layer(L);
  if (Y.rows() != last.weights.cols())
    throw std::invalid_argument("backprop_gradients: targets have " +
                                std::to_string(Y.rows()) +
                                " rows, network emits " +
                                std::to_string(last.weights.cols()));

  Eigen::MatrixXd G = batch_loss_grad(last.spec.loss, trace.X.back(), Y);
  if (loss_out) *loss_out = batch_loss(last.spec.loss, trace.X.back(), Y);

  std::vector<Eigen::MatrixXd> grads(static_cast<std::size_t>(L));
  for (int m = L; m >= 1; --m) {
    const Layer& lay = net.layer(m);
    Eigen::MatrixXd D = act_derivative(lay.spec.activation,
                                       trace.Z[static_cast<std::size_t>(m - 1)]);
    Eigen::MatrixXd delta = G.cwiseProduct(D);
    grads[static_cast<std::size_t>(m - 1)] =
        trace.X[static_cast<std::size_t>(m - 1)] * delta.transpose();
    if (m > 1) G = lay.weights * delta;
  }
  return grads;
}

void validate_train_inputs(const Network& net, const Dataset& data,
                           const TrainConfig& config) {
  if (data.n() == 0) throw std::invalid_argument("train: empty dataset");
  if (data.dim() != net.input_dim())
    throw std::invalid_argument(
        "train: data has " + std::to_string(data.dim()) +
        " features, network expects " + std::to_string(net.input_dim()));
  if (!(config.learning_rate > 0.0))
    throw std::invalid_argument("train: learning_rate must be positive");
  if (config.batch_size < 1 || config.batch_size > data.n())
    throw std::invalid_argument("train: batch_size must lie in [1, n]");
  if (config.epochs < 0)
    throw std::invalid_argument("train: epochs must be nonnegative");
}

TimingStats summarize_epochs(const TrainReport& report, int warmup_epochs) {
  TimingStats stats;
  stats.final_train_accuracy = report.final_train_accuracy;
  const auto begin = report.epoch_seconds.begin() + warmup_epochs;
  const auto count = static_cast<double>(report.epoch_seconds.end() - begin);
  double sum = 0.0;
  for (auto it = begin; it != report.epoch_seconds.end(); ++it) sum += *it;
  stats.mean_epoch_seconds = sum / count;
  double sq = 0.0;
  for (auto it = begin; it != report.epoch_seconds.end(); ++it)
    sq += (*it - stats.mean_epoch_seconds) * (*it - stats.mean_epoch_seconds);
  stats.std_epoch_seconds = std::sqrt(sq / count);
  return stats;
}

}  // namespace

std::vector<Eigen::MatrixXd> backprop_gradients(
    const Network& net, const Eigen::Ref<const Eigen::MatrixXd>& X,
    const Eigen::Ref<const Eigen::MatrixXd>& Y) {
  return backprop_gradients_impl(net, X, Y, nullptr);
}

TrainReport train_backpropagation(Network& net, const Dataset& data,
                                  const TrainConfig& config) {
  validate_train_inputs(net, data, config);

  const int L = net.n_layers();
  const Activation last_act = net.layer(L).spec.activation;
  Eigen::MatrixXd Y = encode_labels(data.labels, data.n_classes, last_act);
  if (Y.rows() != net.output_dim())
    throw std::invalid_argument(
        "train: labels encode to " + std::to_string(Y.rows()) +
        " outputs, network emits " + std::to_string(net.output_dim()));

  std::mt19937_64 rng(config.seed);
  TrainReport report;
  report.epoch_mean_loss.reserve(static_cast<std::size_t>(config.epochs));
  report.epoch_seconds.reserve(static_cast<std::size_t>(config.epochs));

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto batches = make_batches(data.n(), config.batch_size, config.shuffle, rng);
    const auto sweep_start = std::chrono::steady_clock::now();
    for (std::size_t t = 0; t < batches.size(); ++t) {
      const int batch_index = static_cast<int>(t) + 1;
      Eigen::MatrixXd Xb = data.X(Eigen::all, batches[t]);
      Eigen::MatrixXd Yb = Y(Eigen::all, batches[t]);
      double loss = 0.0;
      const auto grads = backprop_gradients_impl(net, Xb, Yb, &loss);
      for (int m = 1; m <= L; ++m)
        net.layer(m).weights -=
            config.learning_rate * grads[static_cast<std::size_t>(m - 1)];
      if (config.record_trace)
        for (int m = 1; m <= L; ++m)
          report.trace.push_back({epoch, batch_index, m, loss});
      if (!std::isfinite(loss))
        throw TrainingAbort(epoch, batch_index, L, loss);
    }
    const auto sweep_end = std::chrono::steady_clock::now();
    report.epoch_seconds.push_back(
        std::chrono::duration<double>(sweep_end - sweep_start).count());
    report.epoch_mean_loss.push_back(mean_training_loss(net, data.X, Y));
  }

  report.final_train_accuracy = training_accuracy(net, data.X, data.labels);
  return report;
}

TimingComparison epoch_timing_comparison(
    const std::vector<LayerSpec>& arch, const Dataset& data,
    const TrainConfig& config, const std::optional<KernelKind>& kernel,
    int warmup_epochs, int timed_epochs,
    std::optional<double> kernel_learning_rate) {
  if (warmup_epochs < 0)
    throw std::invalid_argument("epoch_timing_comparison: warmup_epochs must be nonnegative");
  if (timed_epochs < 1)
    throw std::invalid_argument("epoch_timing_comparison: timed_epochs must be positive");

  TrainConfig run_config = config;
  run_config.epochs = warmup_epochs + timed_epochs;
  run_config.record_trace = false;

  TimingComparison cmp;
  cmp.warmup_epochs = warmup_epochs;
  cmp.timed_epochs = timed_epochs;

  {
    Network net = Network::random(arch, config.seed);
    cmp.backprojection =
        summarize_epochs(train_backprojection(net, data, run_config), warmup_epochs);
  }
  if (kernel) {
    KernelModel km = build_kernel_model(*kernel, data.X);
    Dataset kdata;
    kdata.X = km.K_normalized;
    kdata.labels = data.labels;
    kdata.n_classes = data.n_classes;
    std::vector<LayerSpec> karch = arch;
    karch.front().in_dim = static_cast<int>(km.n());
    TrainConfig kernel_config = run_config;
    if (kernel_learning_rate) kernel_config.learning_rate = *kernel_learning_rate;
    Network net = Network::random(karch, config.seed);
    cmp.kernel_backprojection = summarize_epochs(
        train_backprojection(net, kdata, kernel_config), warmup_epochs);
  }
  {
    Network net = Network::random(arch, config.seed);
    cmp.backpropagation =
        summarize_epochs(train_backpropagation(net, data, run_config), warmup_epochs);
  }

  cmp.ratio = cmp.backprojection.mean_epoch_seconds /
              cmp.backpropagation.mean_epoch_seconds;
  return cmp;
}

}  // namespace bpj

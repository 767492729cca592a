#include "bpj/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

namespace bpj {

namespace {

std::string abort_message(int epoch, int batch, int layer, double loss) {
  std::ostringstream os;
  os << "training aborted: non-finite loss " << loss << " at epoch " << epoch
     << ", batch " << batch << ", layer " << layer;
  return os.str();
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

}  // namespace

Procedure procedure_from_string(const std::string& name) {
  if (name == "forward") return Procedure::Forward;
  if (name == "backward") return Procedure::Backward;
  if (name == "forward_backward") return Procedure::ForwardBackward;
  throw std::invalid_argument("unknown procedure: " + name);
}

std::string procedure_to_string(Procedure p) {
  switch (p) {
    case Procedure::Forward: return "forward";
    case Procedure::Backward: return "backward";
    case Procedure::ForwardBackward: return "forward_backward";
  }
  throw std::invalid_argument("unknown procedure enum value");
}

TrainingAbort::TrainingAbort(int epoch_, int batch_, int layer_, double loss_)
    : std::runtime_error(abort_message(epoch_, batch_, layer_, loss_)),
      epoch(epoch_), batch(batch_), layer(layer_), loss(loss_) {}

std::vector<std::vector<Eigen::Index>> make_batches(Eigen::Index n,
                                                    int batch_size,
                                                    bool shuffle,
                                                    std::mt19937_64& rng) {
  if (n < 1) throw std::invalid_argument("make_batches: need n >= 1");
  if (batch_size < 1) throw std::invalid_argument("make_batches: need batch_size >= 1");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  if (shuffle) std::shuffle(order.begin(), order.end(), rng);

  std::vector<std::vector<Eigen::Index>> batches;
  const Eigen::Index b = batch_size;
  batches.reserve(static_cast<std::size_t>((n + b - 1) / b));
  for (Eigen::Index start = 0; start < n; start += b) {
    const Eigen::Index len = std::min(b, n - start);
    batches.emplace_back(order.begin() + start, order.begin() + start + len);
  }
  return batches;
}

std::vector<int> update_order(Procedure procedure, int n_layers,
                              int batch_index) {
  if (n_layers < 1) throw std::invalid_argument("update_order: need layers");
  if (batch_index < 1) throw std::invalid_argument("update_order: batch index is 1-based");

  const bool forward =
      procedure == Procedure::Forward ||
      (procedure == Procedure::ForwardBackward && batch_index % 2 == 1);
  std::vector<int> order(static_cast<std::size_t>(n_layers));
  if (forward)
    std::iota(order.begin(), order.end(), 1);
  else
    for (int m = n_layers; m >= 1; --m) order[static_cast<std::size_t>(n_layers - m)] = m;
  return order;
}

LayerGradient layer_gradient_with_loss(
    const Network& net, const Eigen::Ref<const Eigen::MatrixXd>& Xprev,
    const Eigen::Ref<const Eigen::MatrixXd>& Ym, int m) {
  const Layer& lay = net.layer(m);
  Eigen::MatrixXd Z = lay.weights.transpose() * Xprev;
  Eigen::MatrixXd F = act_forward(lay.spec.activation, Z);
  Eigen::MatrixXd G = batch_loss_grad(lay.spec.loss, F, Ym);
  Eigen::MatrixXd D = act_derivative(lay.spec.activation, Z);

  LayerGradient out;
  Eigen::MatrixXd delta = G.cwiseProduct(D);
  out.grad = Xprev * delta.transpose();
  out.loss = batch_loss(lay.spec.loss, F, Ym);
  return out;
}

Eigen::MatrixXd layer_gradient(const Network& net, const Batch& batch, int m) {
  ForwardTrace trace = forward_pass(net, batch.X, m - 1);
  Eigen::MatrixXd Ym = backproject_labels(net, batch.Y, m);
  return layer_gradient_with_loss(net, trace.X.back(), Ym, m).grad;
}

double update_layer_weights(Network& net,
                            const Eigen::Ref<const Eigen::MatrixXd>& X,
                            const Eigen::Ref<const Eigen::MatrixXd>& Y,
                            int m, double eta) {
  if (eta < 0.0) throw std::invalid_argument("update_layer_weights: eta must be nonnegative");

  ForwardTrace trace = forward_pass(net, X, m - 1);
  Eigen::MatrixXd Ym = backproject_labels(net, Y, m);
  LayerGradient lg = layer_gradient_with_loss(net, trace.X.back(), Ym, m);
  net.layer(m).weights -= eta * lg.grad;
  return lg.loss;
}

double mean_training_loss(const Network& net,
                          const Eigen::Ref<const Eigen::MatrixXd>& X,
                          const Eigen::Ref<const Eigen::MatrixXd>& Y) {
  const Layer& last = net.layer(net.n_layers());
  Eigen::MatrixXd F = forward_output(net, X);
  return batch_loss(last.spec.loss, F, Y) / static_cast<double>(X.cols());
}

double training_accuracy(const Network& net,
                         const Eigen::Ref<const Eigen::MatrixXd>& X,
                         const Eigen::Ref<const Eigen::VectorXi>& labels) {
  Eigen::VectorXi predicted = predict(net, X);
  Eigen::Index hits = 0;
  for (Eigen::Index i = 0; i < labels.size(); ++i)
    if (predicted(i) == labels(i)) ++hits;
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

TrainReport train_backprojection(Network& net, const Dataset& data,
                                 const TrainConfig& config) {
  validate_train_inputs(net, data, config);

  const Activation last_act = net.layer(net.n_layers()).spec.activation;
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
      for (int m : update_order(config.procedure, net.n_layers(), batch_index)) {
        const double loss = update_layer_weights(net, Xb, Yb, m, config.learning_rate);
        if (config.record_trace)
          report.trace.push_back({epoch, batch_index, m, loss});
        if (!std::isfinite(loss))
          throw TrainingAbort(epoch, batch_index, m, loss);
      }
    }
    const auto sweep_end = std::chrono::steady_clock::now();
    report.epoch_seconds.push_back(
        std::chrono::duration<double>(sweep_end - sweep_start).count());
    report.epoch_mean_loss.push_back(mean_training_loss(net, data.X, Y));
  }

  report.final_train_accuracy = training_accuracy(net, data.X, data.labels);
  return report;
}

}  // namespace bpj

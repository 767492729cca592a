#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "bpj/data.hpp"
#include "bpj/network.hpp"

namespace bpj {

/// Layer update order per batch: front to back, back to front, or
/// alternating by batch parity (odd-indexed batches go forward).
enum class Procedure { Forward, Backward, ForwardBackward };

Procedure procedure_from_string(const std::string& name);
std::string procedure_to_string(Procedure p);

struct TrainConfig {
  Procedure procedure = Procedure::Forward;
  double learning_rate = 1e-4;
  int batch_size = 30;
  int epochs = 200;
  std::uint64_t seed = 0;
  bool shuffle = true;
  bool record_trace = false;
};

/// One weight update: which layer was touched in which batch of which epoch
/// (all 1-based) and the local batch loss before the step.
struct UpdateRecord {
  int epoch = 0;
  int batch = 0;
  int layer = 0;
  double loss = 0.0;
};

struct TrainReport {
  std::vector<double> epoch_mean_loss;
  std::vector<double> epoch_seconds;
  double final_train_accuracy = 0.0;
  std::vector<UpdateRecord> trace;
};

/// Raised when a batch loss turns non-finite; training cannot meaningfully
/// continue and silent NaN propagation would corrupt timing comparisons.
class TrainingAbort : public std::runtime_error {
 public:
  TrainingAbort(int epoch, int batch, int layer, double loss);

  int epoch;
  int batch;
  int layer;
  double loss;
};

/// Sample indices 0..n-1, shuffled when requested, cut into ceil(n/b)
/// consecutive slices; the last slice keeps the remainder.
std::vector<std::vector<Eigen::Index>> make_batches(Eigen::Index n,
                                                    int batch_size,
                                                    bool shuffle,
                                                    std::mt19937_64& rng);

/// Layer indices visited for a given 1-based batch index.
std::vector<int> update_order(Procedure procedure, int n_layers,
                              int batch_index);

struct LayerGradient {
  Eigen::MatrixXd grad;
  double loss = 0.0;
};

/// Local gradient and loss of layer m given its own inputs X^(m-1) and
/// targets Y^(m): sum_i x_i (g_i .* f'(z_i))^T with g_i from the layer loss.
LayerGradient layer_gradient_with_loss(const Network& net,
                                       const Eigen::Ref<const Eigen::MatrixXd>& Xprev,
                                       const Eigen::Ref<const Eigen::MatrixXd>& Ym,
                                       int m);

/// Gradient of layer m's local loss with respect to its weights, with
/// inputs forwarded from the data and targets backprojected from batch.Y.
Eigen::MatrixXd layer_gradient(const Network& net, const Batch& batch, int m);

/// One descent step on layer m alone: forward to m-1, backproject targets
/// to m, then U_m -= eta * grad. Returns the pre-update local batch loss.
double update_layer_weights(Network& net,
                            const Eigen::Ref<const Eigen::MatrixXd>& X,
                            const Eigen::Ref<const Eigen::MatrixXd>& Y,
                            int m, double eta);

/// Mean per-sample loss of the final layer over the whole set.
double mean_training_loss(const Network& net,
                          const Eigen::Ref<const Eigen::MatrixXd>& X,
                          const Eigen::Ref<const Eigen::MatrixXd>& Y);

/// Fraction of samples whose predicted class matches the label.
double training_accuracy(const Network& net,
                         const Eigen::Ref<const Eigen::MatrixXd>& X,
                         const Eigen::Ref<const Eigen::VectorXi>& labels);

/// Backprojection training: per batch, layers are updated one at a time in
/// the procedure's order, each update seeing the weights already changed
/// earlier in the same sweep. epoch_seconds covers the update sweep only;
/// the per-epoch mean loss is evaluated outside the timed region.
TrainReport train_backprojection(Network& net, const Dataset& data,
                                 const TrainConfig& config);

}  // namespace bpj

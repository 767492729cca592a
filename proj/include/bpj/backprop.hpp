#pragma once

#include <Eigen/Core>

#include <optional>
#include <vector>

#include "bpj/kernel.hpp"
#include "bpj/network.hpp"
#include "bpj/trainer.hpp"

namespace bpj {

/// Gradients of the last-layer loss with respect to every layer's weights,
/// by one reverse-mode sweep; index m-1 holds layer m's gradient.
std::vector<Eigen::MatrixXd> backprop_gradients(
    const Network& net, const Eigen::Ref<const Eigen::MatrixXd>& X,
    const Eigen::Ref<const Eigen::MatrixXd>& Y);

/// End-to-end mini-batch gradient descent on the last-layer loss. Shares
/// batching, shuffling, report layout and abort behaviour with
/// train_backprojection; per batch all layers step from one gradient
/// evaluation at the pre-update weights.
TrainReport train_backpropagation(Network& net, const Dataset& data,
                                  const TrainConfig& config);

struct TimingStats {
  double mean_epoch_seconds = 0.0;
  double std_epoch_seconds = 0.0;
  double final_train_accuracy = 0.0;
};

struct TimingComparison {
  TimingStats backprojection;
  std::optional<TimingStats> kernel_backprojection;
  TimingStats backpropagation;
  int warmup_epochs = 0;
  int timed_epochs = 0;
  /// backprojection mean epoch seconds over backpropagation's.
  double ratio = 0.0;
};

/// Trains fresh identically seeded networks with each algorithm on the same
/// data and batch schedule, then summarizes per-epoch wall times with the
/// first warmup_epochs excluded. Kernel timing runs only when a kernel
/// config is supplied; its architecture replaces the first layer's fan-in
/// with n, and kernel_learning_rate (when given) overrides config's rate
/// for that run only, since the kernel path needs a smaller step to stay
/// finite.
TimingComparison epoch_timing_comparison(
    const std::vector<LayerSpec>& arch, const Dataset& data,
    const TrainConfig& config, const std::optional<KernelKind>& kernel,
    int warmup_epochs = 2, int timed_epochs = 20,
    std::optional<double> kernel_learning_rate = std::nullopt);

}  // namespace bpj

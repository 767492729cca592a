#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

#include "bpj/activation.hpp"
#include "bpj/loss.hpp"

namespace bpj {

struct LayerSpec {
  int in_dim = 0;
  int out_dim = 0;
  Activation activation = Activation::Elu;
  Loss loss = Loss::Mse;
};

/// One fully connected layer without bias. weights is in_dim x out_dim and
/// is applied as weights^T * x, so column j holds the fan-in of unit j.
struct Layer {
  Eigen::MatrixXd weights;
  LayerSpec spec;
};

/// A minibatch in column convention: X is d x b, Y is p x b.
struct Batch {
  Eigen::MatrixXd X;
  Eigen::MatrixXd Y;
};

class Network {
 public:
  explicit Network(std::vector<Layer> layers);

  /// Weights drawn i.i.d. from N(0, 1/in_dim) per layer, i.e. standard
  /// deviation 1/sqrt(fan-in). Deterministic under seed.
  static Network random(const std::vector<LayerSpec>& specs, std::uint64_t seed);

  int n_layers() const { return static_cast<int>(layers_.size()); }
  Eigen::Index input_dim() const { return layers_.front().weights.rows(); }
  Eigen::Index output_dim() const { return layers_.back().weights.cols(); }

  /// Layers are indexed 1..n_layers() throughout.
  Layer& layer(int m) { return layers_[static_cast<std::size_t>(m - 1)]; }
  const Layer& layer(int m) const { return layers_[static_cast<std::size_t>(m - 1)]; }

  const std::vector<Layer>& layers() const { return layers_; }

 private:
  std::vector<Layer> layers_;
};

/// Intermediate states of a forward pass through layers 1..upto:
/// X[0] is the input, Z[r-1] = W_r^T X[r-1] and X[r] = f_r(Z[r-1]).
struct ForwardTrace {
  std::vector<Eigen::MatrixXd> Z;
  std::vector<Eigen::MatrixXd> X;
};

/// Runs the input through layers 1..upto (upto = n_layers() by default when
/// negative). Throws std::invalid_argument on a row-count mismatch.
ForwardTrace forward_pass(const Network& net,
                          const Eigen::Ref<const Eigen::MatrixXd>& X,
                          int upto = -1);

/// Final activations X^(L) only.
Eigen::MatrixXd forward_output(const Network& net,
                               const Eigen::Ref<const Eigen::MatrixXd>& X);

/// Pulls the target matrix back from the output layer to layer m:
/// Y^(L) := Y and Y^(r) = W_{r+1} f_{r+1}^{-1}(project(Y^(r+1))) for
/// r = L-1, ..., m. The projection clips every entry into the feasible
/// set of f_{r+1} before inverting.
Eigen::MatrixXd backproject_labels(const Network& net,
                                   const Eigen::Ref<const Eigen::MatrixXd>& Y,
                                   int m);

/// Class index per output column: argmax over rows when p >= 2 (ties go to
/// the first maximal row); for p = 1 a threshold at 0 for tanh or linear
/// outputs and at 0.5 otherwise.
Eigen::VectorXi classify_outputs(const Eigen::Ref<const Eigen::MatrixXd>& F,
                                 Activation last_activation);

Eigen::VectorXi predict(const Network& net,
                        const Eigen::Ref<const Eigen::MatrixXd>& X);

}  // namespace bpj

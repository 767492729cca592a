#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <random>

#include "bpj/network.hpp"

namespace bpj {

/// Central-difference oracle for the layer gradient: perturbs each weight
/// of layer m by +-h and differences the local batch loss, with the layer
/// inputs X^(m-1) and targets Y^(m) frozen at the unperturbed weights.
Eigen::MatrixXd finite_difference_gradient(const Network& net,
                                           const Batch& batch, int m,
                                           double h);

/// Literal construction of the layer gradient: per sample, builds
/// I_{d_m} (x) x^T, multiplies by the diagonal activation Jacobian and the
/// loss gradient, and un-vectorizes column-major. Agrees with
/// layer_gradient to roundoff; kept as a cross-check, not a fast path.
Eigen::MatrixXd layer_gradient_kronecker(const Network& net,
                                         const Batch& batch, int m);

/// ||A - B||_F / ||B||_F with the denominator floored at 1e-12.
double relative_frobenius_error(const Eigen::Ref<const Eigen::MatrixXd>& A,
                                const Eigen::Ref<const Eigen::MatrixXd>& B);

/// Random batch whose inputs are standard normal and whose targets lie
/// strictly inside the feasible set of the network's last activation.
Batch random_feasible_batch(const Network& net, int batch_size,
                            std::mt19937_64& rng);

struct GradCheckConfig {
  int trials = 100;
  int max_dim = 5;
  int max_batch = 8;
  double tolerance = 1e-4;
  double kronecker_tolerance = 1e-12;
  double step = 1e-5;
  std::uint64_t seed = 7;
};

struct GradCheckReport {
  int trials = 0;
  int gradients_checked = 0;
  double max_rel_error_fd = 0.0;
  double max_rel_error_kronecker = 0.0;
  double tolerance = 0.0;
  double kronecker_tolerance = 0.0;
  bool pass = false;
};

/// Draws random networks (1 to 3 layers, dims <= max_dim, every activation,
/// mse everywhere plus cross_entropy on sigmoid layers) with feasible
/// random targets and checks every layer's gradient against both oracles.
/// pass requires max_rel_error_fd < tolerance and max_rel_error_kronecker
/// < kronecker_tolerance, both strict.
GradCheckReport run_gradient_check(const GradCheckConfig& config);

}  // namespace bpj

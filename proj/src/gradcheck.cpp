#include "bpj/gradcheck.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "bpj/trainer.hpp"

namespace bpj {

Eigen::MatrixXd finite_difference_gradient(const Network& net,
                                           const Batch& batch, int m,
                                           double h) {
  if (!(h > 0.0))
    throw std::invalid_argument("finite_difference_gradient: h must be positive");

  ForwardTrace trace = forward_pass(net, batch.X, m - 1);
  const Eigen::MatrixXd& Xprev = trace.X.back();
  const Eigen::MatrixXd Ym = backproject_labels(net, batch.Y, m);
  const Layer& lay = net.layer(m);

  const auto local_loss = [&](const Eigen::MatrixXd& W) {
    Eigen::MatrixXd F = act_forward(lay.spec.activation, W.transpose() * Xprev);
    return batch_loss(lay.spec.loss, F, Ym);
  };

  Eigen::MatrixXd grad(lay.weights.rows(), lay.weights.cols());
  Eigen::MatrixXd W = lay.weights;
  for (Eigen::Index c = 0; c < W.cols(); ++c) {
    for (Eigen::Index r = 0; r < W.rows(); ++r) {
      const double saved = W(r, c);
      W(r, c) = saved + h;
      const double plus = local_loss(W);
      W(r, c) = saved - h;
      const double minus = local_loss(W);
      W(r, c) = saved;
      grad(r, c) = (plus - minus) / (2.0 * h);
    }
  }
  return grad;
}

Eigen::MatrixXd layer_gradient_kronecker(const Network& net,
                                         const Batch& batch, int m) {
  ForwardTrace trace = forward_pass(net, batch.X, m - 1);
  const Eigen::MatrixXd& Xprev = trace.X.back();
  const Eigen::MatrixXd Ym = backproject_labels(net, batch.Y, m);
  const Layer& lay = net.layer(m);

  const Eigen::Index d_prev = lay.weights.rows();
  const Eigen::Index d_m = lay.weights.cols();

  Eigen::MatrixXd Z = lay.weights.transpose() * Xprev;
  Eigen::MatrixXd F = act_forward(lay.spec.activation, Z);
  Eigen::MatrixXd G = batch_loss_grad(lay.spec.loss, F, Ym);
  Eigen::MatrixXd Dall = act_derivative(lay.spec.activation, Z);

  Eigen::VectorXd vec_grad = Eigen::VectorXd::Zero(d_prev * d_m);
  for (Eigen::Index i = 0; i < Xprev.cols(); ++i) {
    Eigen::MatrixXd dz_dU = Eigen::MatrixXd::Zero(d_m, d_prev * d_m);
    for (Eigen::Index j = 0; j < d_m; ++j)
      dz_dU.block(j, j * d_prev, 1, d_prev) = Xprev.col(i).transpose();
    Eigen::MatrixXd D = Dall.col(i).asDiagonal();
    vec_grad += dz_dU.transpose() * D * G.col(i);
  }
  return Eigen::Map<const Eigen::MatrixXd>(vec_grad.data(), d_prev, d_m);
}

double relative_frobenius_error(const Eigen::Ref<const Eigen::MatrixXd>& A,
                                const Eigen::Ref<const Eigen::MatrixXd>& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols())
    throw std::invalid_argument("relative_frobenius_error: shape mismatch");
  return (A - B).norm() / std::max(B.norm(), 1e-12);
}

Batch random_feasible_batch(const Network& net, int batch_size,
                            std::mt19937_64& rng) {
  if (batch_size < 1)
    throw std::invalid_argument("random_feasible_batch: batch_size must be positive");

  std::normal_distribution<double> unit(0.0, 1.0);
  Batch batch;
  batch.X.resize(net.input_dim(), batch_size);
  for (Eigen::Index c = 0; c < batch.X.cols(); ++c)
    for (Eigen::Index r = 0; r < batch.X.rows(); ++r)
      batch.X(r, c) = unit(rng);

  const Activation last = net.layer(net.n_layers()).spec.activation;
  double lo = 0.0, hi = 0.0;
  switch (last) {
    case Activation::Sigmoid: lo = 0.05; hi = 0.95; break;
    case Activation::Tanh: lo = -0.95; hi = 0.95; break;
    case Activation::Elu: lo = -0.9; hi = 3.0; break;
    case Activation::Linear: break;
  }
  std::uniform_real_distribution<double> box(lo, hi);

  batch.Y.resize(net.output_dim(), batch_size);
  for (Eigen::Index c = 0; c < batch.Y.cols(); ++c)
    for (Eigen::Index r = 0; r < batch.Y.rows(); ++r)
      batch.Y(r, c) = last == Activation::Linear ? unit(rng) : box(rng);
  return batch;
}

GradCheckReport run_gradient_check(const GradCheckConfig& config) {
  if (config.trials < 1)
    throw std::invalid_argument("run_gradient_check: trials must be positive");
  if (config.max_dim < 1 || config.max_batch < 1)
    throw std::invalid_argument("run_gradient_check: dims and batch must be positive");

  static constexpr Activation kActivations[] = {
      Activation::Elu, Activation::Linear, Activation::Sigmoid,
      Activation::Tanh};

  std::mt19937_64 rng(config.seed);
  std::uniform_int_distribution<int> depth_dist(1, 3);
  std::uniform_int_distribution<int> dim_dist(1, config.max_dim);
  std::uniform_int_distribution<int> batch_dist(1, config.max_batch);
  std::uniform_int_distribution<int> act_dist(0, 3);
  std::uniform_int_distribution<int> loss_dist(0, 1);

  GradCheckReport report;
  report.tolerance = config.tolerance;
  report.kronecker_tolerance = config.kronecker_tolerance;

  for (int trial = 0; trial < config.trials; ++trial) {
    const int depth = depth_dist(rng);
    std::vector<LayerSpec> specs(static_cast<std::size_t>(depth));
    int in_dim = dim_dist(rng);
    for (LayerSpec& spec : specs) {
      spec.in_dim = in_dim;
      spec.out_dim = dim_dist(rng);
      spec.activation = kActivations[act_dist(rng)];
      spec.loss = (spec.activation == Activation::Sigmoid && loss_dist(rng) == 1)
                      ? Loss::CrossEntropy
                      : Loss::Mse;
      in_dim = spec.out_dim;
    }

    Network net = Network::random(specs, rng());
    Batch batch = random_feasible_batch(net, batch_dist(rng), rng);

    for (int m = 1; m <= net.n_layers(); ++m) {
      Eigen::MatrixXd grad = layer_gradient(net, batch, m);
      Eigen::MatrixXd fd = finite_difference_gradient(net, batch, m, config.step);
      Eigen::MatrixXd kron = layer_gradient_kronecker(net, batch, m);
      report.max_rel_error_fd =
          std::max(report.max_rel_error_fd, relative_frobenius_error(grad, fd));
      report.max_rel_error_kronecker =
          std::max(report.max_rel_error_kronecker,
                   relative_frobenius_error(grad, kron));
      ++report.gradients_checked;
    }
    ++report.trials;
  }

  report.pass = report.max_rel_error_fd < config.tolerance &&
                report.max_rel_error_kronecker < config.kronecker_tolerance;
  return report;
}

}  // namespace bpj

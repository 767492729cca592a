#include <doctest.h>

#include <Eigen/Core>
#include <random>
#include <vector>

#include "bpj/gradcheck.hpp"
#include "bpj/network.hpp"
#include "bpj/trainer.hpp"

using namespace bpj;

namespace {

Network linear_identity_net() {
  Layer lay;
  lay.weights = Eigen::MatrixXd::Identity(2, 2);
  lay.spec = {2, 2, Activation::Linear, Loss::Mse};
  return Network({lay});
}

}  // namespace

TEST_CASE("hand-computed single layer gradient") {
  Network net = linear_identity_net();
  Batch batch;
  batch.X = Eigen::MatrixXd::Zero(2, 1);
  batch.X(0, 0) = 1.0;
  batch.Y = Eigen::MatrixXd::Zero(2, 1);

  Eigen::MatrixXd grad = layer_gradient(net, batch, 1);
  Eigen::MatrixXd expect(2, 2);
  expect << 2.0, 0.0, 0.0, 0.0;
  CHECK((grad - expect).isZero(0.0));
}

TEST_CASE("zero residual means zero gradient") {
  Network net = linear_identity_net();
  Batch batch;
  batch.X = Eigen::MatrixXd::Random(2, 5);
  batch.Y = batch.X;
  CHECK(layer_gradient(net, batch, 1).isZero(0.0));
}

TEST_CASE("gradient sums over the batch") {
  Network net = linear_identity_net();
  Batch one;
  one.X = Eigen::MatrixXd::Random(2, 1);
  one.Y = Eigen::MatrixXd::Random(2, 1);
  Batch two;
  two.X = Eigen::MatrixXd::Random(2, 1);
  two.Y = Eigen::MatrixXd::Random(2, 1);
  Batch both;
  both.X.resize(2, 2);
  both.X << one.X, two.X;
  both.Y.resize(2, 2);
  both.Y << one.Y, two.Y;

  Eigen::MatrixXd sum =
      layer_gradient(net, one, 1) + layer_gradient(net, two, 1);
  CHECK((layer_gradient(net, both, 1) - sum).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("layer gradient matches finite differences on a deep net") {
  std::vector<LayerSpec> specs{{3, 4, Activation::Elu, Loss::Mse},
                               {4, 3, Activation::Tanh, Loss::Mse},
                               {3, 2, Activation::Sigmoid, Loss::Mse}};
  Network net = Network::random(specs, 17);
  std::mt19937_64 rng(99);
  Batch batch = random_feasible_batch(net, 6, rng);

  for (int m = 1; m <= net.n_layers(); ++m) {
    Eigen::MatrixXd analytic = layer_gradient(net, batch, m);
    Eigen::MatrixXd numeric = finite_difference_gradient(net, batch, m, 1e-5);
    CHECK(relative_frobenius_error(analytic, numeric) < 1e-6);
  }
}

TEST_CASE("finite differences see the frozen-targets objective") {
  std::vector<LayerSpec> specs{{2, 2, Activation::Sigmoid, Loss::CrossEntropy}};
  Network net = Network::random(specs, 3);
  Batch batch;
  batch.X = Eigen::MatrixXd::Random(2, 4);
  batch.Y = 0.5 * Eigen::MatrixXd::Ones(2, 4) + 0.3 * Eigen::MatrixXd::Random(2, 4);

  Eigen::MatrixXd analytic = layer_gradient(net, batch, 1);
  Eigen::MatrixXd numeric = finite_difference_gradient(net, batch, 1, 1e-5);
  CHECK(relative_frobenius_error(analytic, numeric) < 1e-6);
}

TEST_CASE("kronecker construction reproduces the production gradient") {
  std::vector<LayerSpec> specs{{4, 5, Activation::Elu, Loss::Mse},
                               {5, 2, Activation::Sigmoid, Loss::Mse}};
  Network net = Network::random(specs, 30);
  std::mt19937_64 rng(31);
  Batch batch = random_feasible_batch(net, 7, rng);

  for (int m = 1; m <= 2; ++m) {
    Eigen::MatrixXd fast = layer_gradient(net, batch, m);
    Eigen::MatrixXd literal = layer_gradient_kronecker(net, batch, m);
    CHECK(relative_frobenius_error(literal, fast) < 1e-12);
  }
}

TEST_CASE("relative frobenius error handles tiny denominators") {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2, 2);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(2, 2);
  CHECK(relative_frobenius_error(A, B) == 0.0);
  A(0, 0) = 1e-6;
  CHECK(relative_frobenius_error(A, B) > 1.0);
}

TEST_CASE("random feasible batches respect the output activation") {
  std::mt19937_64 rng(5);
  std::vector<LayerSpec> sig{{3, 2, Activation::Sigmoid, Loss::Mse}};
  Batch bs = random_feasible_batch(Network::random(sig, 1), 10, rng);
  CHECK((bs.Y.array() > 0.0).all());
  CHECK((bs.Y.array() < 1.0).all());

  std::vector<LayerSpec> th{{3, 2, Activation::Tanh, Loss::Mse}};
  Batch bt = random_feasible_batch(Network::random(th, 1), 10, rng);
  CHECK((bt.Y.array() > -1.0).all());
  CHECK((bt.Y.array() < 1.0).all());

  std::vector<LayerSpec> el{{3, 2, Activation::Elu, Loss::Mse}};
  Batch be = random_feasible_batch(Network::random(el, 1), 10, rng);
  CHECK((be.Y.array() > -1.0).all());
}

TEST_CASE("gradient check harness passes at its documented tolerances") {
  GradCheckConfig config;
  config.trials = 25;
  config.seed = 11;
  GradCheckReport report = run_gradient_check(config);
  CHECK(report.pass);
  CHECK(report.trials == 25);
  CHECK(report.gradients_checked >= 25);
  CHECK(report.max_rel_error_fd < config.tolerance);
  CHECK(report.max_rel_error_kronecker < config.kronecker_tolerance);
}

TEST_CASE("gradient check harness fails under an impossible tolerance") {
  GradCheckConfig config;
  config.trials = 5;
  config.tolerance = 0.0;
  config.seed = 11;
  GradCheckReport report = run_gradient_check(config);
  CHECK_FALSE(report.pass);
}

#include <doctest.h>

#include <Eigen/Core>
#include <cmath>
#include <stdexcept>

#include "bpj/loss.hpp"

using namespace bpj;

TEST_CASE("loss names round-trip") {
  CHECK(loss_from_string("mse") == Loss::Mse);
  CHECK(loss_from_string("cross_entropy") == Loss::CrossEntropy);
  CHECK(to_string(Loss::Mse) == "mse");
  CHECK(to_string(Loss::CrossEntropy) == "cross_entropy");
  CHECK_THROWS_AS(loss_from_string("hinge"), std::invalid_argument);
}

TEST_CASE("mse value and gradient") {
  Eigen::VectorXd f(2), y(2);
  f << 1.0, 0.0;
  y << 0.0, 0.0;
  CHECK(loss_value(Loss::Mse, f, y) == doctest::Approx(1.0).epsilon(1e-15));
  Eigen::VectorXd g = loss_grad(Loss::Mse, f, y);
  CHECK(g(0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(g(1) == 0.0);

  f << 0.5, -0.5;
  y << 0.5, -0.5;
  CHECK(loss_value(Loss::Mse, f, y) == 0.0);
  CHECK(loss_grad(Loss::Mse, f, y).isZero(0.0));
}

TEST_CASE("cross entropy value and gradient") {
  Eigen::VectorXd f(2), y(2);
  f << 0.5, 0.5;
  y << 1.0, 0.0;
  CHECK(loss_value(Loss::CrossEntropy, f, y) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
  Eigen::VectorXd g = loss_grad(Loss::CrossEntropy, f, y);
  CHECK(g(0) == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(g(1) == 0.0);
}

TEST_CASE("cross entropy skips zero-label terms exactly") {
  Eigen::VectorXd f(3), y(3);
  f << 0.2, 0.3, 0.5;
  y << 0.0, 0.0, 1.0;
  CHECK(loss_value(Loss::CrossEntropy, f, y) ==
        doctest::Approx(-std::log(0.5)).epsilon(1e-12));
  Eigen::VectorXd g = loss_grad(Loss::CrossEntropy, f, y);
  CHECK(g(0) == 0.0);
  CHECK(g(1) == 0.0);
  CHECK(g(2) == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("cross entropy accepts negative targets") {
  Eigen::VectorXd f(1), y(1);
  f << 0.25;
  y << -1.0;
  CHECK(loss_value(Loss::CrossEntropy, f, y) ==
        doctest::Approx(std::log(0.25)).epsilon(1e-12));
  CHECK(loss_grad(Loss::CrossEntropy, f, y)(0) ==
        doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("cross entropy rejects nonpositive activations") {
  Eigen::VectorXd f(2), y(2);
  f << 0.5, 0.0;
  y << 1.0, 0.0;
  CHECK_THROWS_AS(loss_value(Loss::CrossEntropy, f, y), std::domain_error);
  CHECK_THROWS_AS(loss_grad(Loss::CrossEntropy, f, y), std::domain_error);
  f << 0.5, -0.1;
  CHECK_THROWS_AS(loss_value(Loss::CrossEntropy, f, y), std::domain_error);
}

TEST_CASE("losses reject shape mismatches") {
  Eigen::VectorXd f(2), y(3);
  f << 1.0, 2.0;
  y << 1.0, 2.0, 3.0;
  CHECK_THROWS_AS(loss_value(Loss::Mse, f, y), std::invalid_argument);
  CHECK_THROWS_AS(loss_grad(Loss::Mse, f, y), std::invalid_argument);

  Eigen::MatrixXd F(2, 2), Y(2, 3);
  F.setOnes();
  Y.setOnes();
  CHECK_THROWS_AS(batch_loss(Loss::Mse, F, Y), std::invalid_argument);
  CHECK_THROWS_AS(batch_loss_grad(Loss::Mse, F, Y), std::invalid_argument);
}

TEST_CASE("batch loss sums per-column losses") {
  Eigen::MatrixXd F(2, 3), Y(2, 3);
  F << 1.0, 0.5, 0.0, 0.0, 0.5, 2.0;
  Y << 0.0, 0.5, 0.0, 0.0, 0.0, 1.0;
  double total = 0.0;
  for (int i = 0; i < 3; ++i) {
    total += loss_value(Loss::Mse, F.col(i), Y.col(i));
  }
  CHECK(batch_loss(Loss::Mse, F, Y) == doctest::Approx(total).epsilon(1e-15));

  Eigen::MatrixXd G = batch_loss_grad(Loss::Mse, F, Y);
  CHECK(G.rows() == 2);
  CHECK(G.cols() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK((G.col(i) - loss_grad(Loss::Mse, F.col(i), Y.col(i))).isZero(0.0));
  }
}

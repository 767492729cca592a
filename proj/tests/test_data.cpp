#include <doctest.h>

#include <Eigen/Core>
#include <cstdio>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include "bpj/data.hpp"

using namespace bpj;

namespace {

Eigen::VectorXd pt(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("generate_blobs shapes and determinism") {
  Dataset d = generate_blobs({150, 150}, {pt(-2, 0), pt(2, 0)}, {1.0, 2.5}, 9);
  CHECK(d.n() == 300);
  CHECK(d.dim() == 2);
  CHECK(d.n_classes == 2);
  CHECK((d.labels.array() == 0).count() == 150);
  CHECK((d.labels.array() == 1).count() == 150);

  Dataset again = generate_blobs({150, 150}, {pt(-2, 0), pt(2, 0)}, {1.0, 2.5}, 9);
  CHECK(d.X == again.X);
  CHECK(d.labels == again.labels);

  Dataset other = generate_blobs({150, 150}, {pt(-2, 0), pt(2, 0)}, {1.0, 2.5}, 10);
  CHECK(d.X != other.X);
}

TEST_CASE("generate_blobs centers classes near their means") {
  Dataset d = generate_blobs({4000, 4000}, {pt(-2, 0), pt(2, 0)}, {1.0, 1.0}, 3);
  Eigen::VectorXd mean0 = d.X.leftCols(4000).rowwise().mean();
  Eigen::VectorXd mean1 = d.X.rightCols(4000).rowwise().mean();
  CHECK(std::abs(mean0(0) + 2.0) < 0.1);
  CHECK(std::abs(mean0(1)) < 0.1);
  CHECK(std::abs(mean1(0) - 2.0) < 0.1);
}

TEST_CASE("generate_blobs validates its parameters") {
  CHECK_THROWS_AS(generate_blobs({10}, {pt(0, 0), pt(1, 1)}, {1.0}, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(generate_blobs({10, 10}, {pt(0, 0), pt(1, 1)}, {1.0, 0.0}, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(generate_blobs({10, 10}, {pt(0, 0), pt(1, 1)}, {1.0, -2.0}, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(generate_blobs({}, {}, {}, 1), std::invalid_argument);
}

TEST_CASE("standardize centers and scales rows") {
  Eigen::MatrixXd X(1, 2);
  X << 0.0, 2.0;
  auto [Z, stats] = standardize(X);
  CHECK(Z(0, 0) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(Z(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(stats.mean(0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(stats.stddev(0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("standardize is idempotent") {
  Dataset d = two_blobs(5);
  auto [Z, stats] = standardize(d.X);
  CHECK(std::abs(Z.row(0).mean()) < 1e-12);
  CHECK(std::abs(Z.row(1).mean()) < 1e-12);
  double var0 = Z.row(0).array().square().mean() - std::pow(Z.row(0).mean(), 2);
  CHECK(var0 == doctest::Approx(1.0).epsilon(1e-12));

  auto [Z2, stats2] = standardize(Z);
  CHECK((Z2 - Z).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("standardizer applies training statistics to new points") {
  Dataset d = two_blobs(5);
  auto [Z, stats] = standardize(d.X);
  Eigen::MatrixXd one = d.X.col(7);
  Eigen::MatrixXd mapped = stats.apply(one);
  CHECK((mapped - Z.col(7)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("standardize rejects constant rows") {
  Eigen::MatrixXd X(2, 3);
  X << 1.0, 2.0, 3.0, 5.0, 5.0, 5.0;
  CHECK_THROWS_AS(standardize(X), std::invalid_argument);
}

TEST_CASE("label_dim follows the class count") {
  CHECK(label_dim(2) == 1);
  CHECK(label_dim(3) == 3);
  CHECK(label_dim(5) == 5);
}

TEST_CASE("encode_labels binary conventions") {
  Eigen::VectorXi labels(3);
  labels << 0, 1, 0;

  Eigen::MatrixXd Ys = encode_labels(labels, 2, Activation::Sigmoid);
  CHECK(Ys.rows() == 1);
  CHECK(Ys(0, 0) == 0.0);
  CHECK(Ys(0, 1) == 1.0);

  Eigen::MatrixXd Yt = encode_labels(labels, 2, Activation::Tanh);
  CHECK(Yt(0, 0) == -1.0);
  CHECK(Yt(0, 1) == 1.0);

  Eigen::MatrixXd Yl = encode_labels(labels, 2, Activation::Linear);
  CHECK(Yl(0, 0) == 0.0);
  CHECK(Yl(0, 1) == 1.0);

  Eigen::MatrixXd Ye = encode_labels(labels, 2, Activation::Elu);
  CHECK(Ye(0, 0) == 0.0);
  CHECK(Ye(0, 1) == 1.0);
}

TEST_CASE("encode_labels one-hot for three classes") {
  Eigen::VectorXi labels(3);
  labels << 1, 0, 2;
  Eigen::MatrixXd Y = encode_labels(labels, 3, Activation::Sigmoid);
  CHECK(Y.rows() == 3);
  CHECK(Y.cols() == 3);
  CHECK(Y(0, 0) == 0.0);
  CHECK(Y(1, 0) == 1.0);
  CHECK(Y(2, 0) == 0.0);
  CHECK(Y.col(1)(0) == 1.0);
  CHECK(Y.col(2)(2) == 1.0);
  CHECK(Y.colwise().sum().isOnes(0.0));
}

TEST_CASE("encode_labels rejects out-of-range labels") {
  Eigen::VectorXi labels(2);
  labels << 0, 3;
  CHECK_THROWS_AS(encode_labels(labels, 3, Activation::Sigmoid),
                  std::invalid_argument);
  labels << -1, 0;
  CHECK_THROWS_AS(encode_labels(labels, 2, Activation::Sigmoid),
                  std::invalid_argument);
}

TEST_CASE("built-in benchmarks have the documented shapes") {
  Dataset two = two_blobs(1);
  CHECK(two.n() == 300);
  CHECK(two.dim() == 2);
  CHECK(two.n_classes == 2);

  Dataset three = three_blobs(1);
  CHECK(three.n() == 300);
  CHECK(three.dim() == 2);
  CHECK(three.n_classes == 3);
  CHECK((three.labels.array() == 2).count() == 100);
}

TEST_CASE("dataset CSV round trip") {
  Dataset d = two_blobs(11);
  auto path = std::filesystem::temp_directory_path() / "bpj_data_rt.csv";
  save_dataset_csv(d, path);
  Dataset back = load_dataset_csv(path);
  CHECK(back.n() == d.n());
  CHECK(back.dim() == d.dim());
  CHECK(back.n_classes == d.n_classes);
  CHECK(back.labels == d.labels);
  CHECK((back.X - d.X).cwiseAbs().maxCoeff() == 0.0);
  std::filesystem::remove(path);
}

TEST_CASE("dataset CSV validates header and fields") {
  auto path = std::filesystem::temp_directory_path() / "bpj_data_bad.csv";

  {
    std::FILE* f = std::fopen(path.c_str(), "w");
    std::fputs("a,b,label\n1,2,0\n", f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(load_dataset_csv(path), std::invalid_argument);

  {
    std::FILE* f = std::fopen(path.c_str(), "w");
    std::fputs("x1,x2,label\n1,2\n", f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(load_dataset_csv(path), std::invalid_argument);

  CHECK_THROWS_AS(load_dataset_csv(path.parent_path() / "bpj_missing.csv"),
                  std::invalid_argument);
  std::filesystem::remove(path);
}

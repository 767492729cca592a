#include <doctest.h>

#include <Eigen/Core>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "bpj/data.hpp"
#include "bpj/kernel.hpp"
#include "bpj/model_io.hpp"
#include "bpj/network.hpp"

using namespace bpj;

namespace {

std::filesystem::path tmp_file(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

Model plain_model(std::uint64_t seed) {
  std::vector<LayerSpec> specs{{2, 3, Activation::Elu, Loss::Mse},
                               {3, 1, Activation::Sigmoid, Loss::Mse}};
  return Model{Network::random(specs, seed), std::nullopt, std::nullopt};
}

}  // namespace

TEST_CASE("model json round trip preserves weights bitwise") {
  Model model = plain_model(31);
  auto path = tmp_file("bpj_model_rt.json");
  save_model(model, path);
  Model back = load_model(path);

  CHECK(back.net.n_layers() == 2);
  CHECK(back.net.layer(1).weights == model.net.layer(1).weights);
  CHECK(back.net.layer(2).weights == model.net.layer(2).weights);
  CHECK(back.net.layer(1).spec.activation == Activation::Elu);
  CHECK(back.net.layer(2).spec.activation == Activation::Sigmoid);
  CHECK(back.net.layer(2).spec.loss == Loss::Mse);
  CHECK_FALSE(back.scaler.has_value());
  CHECK_FALSE(back.kernel.has_value());
  std::filesystem::remove(path);
}

TEST_CASE("scaler and kernel blocks survive the round trip") {
  Dataset data = two_blobs(8);
  auto [Z, stats] = standardize(data.X);

  Model model = plain_model(9);
  model.scaler = stats;
  model.kernel = build_kernel_model(KernelKind::rbf(0.25), Z.leftCols(10));

  auto path = tmp_file("bpj_model_full.json");
  save_model(model, path);
  Model back = load_model(path);

  REQUIRE(back.scaler.has_value());
  CHECK(back.scaler->mean == stats.mean);
  CHECK(back.scaler->stddev == stats.stddev);

  REQUIRE(back.kernel.has_value());
  CHECK(back.kernel->kind.type == KernelKind::Type::Rbf);
  CHECK(back.kernel->kind.gamma == 0.25);
  CHECK(back.kernel->train_X == model.kernel->train_X);
  CHECK(back.kernel->K_normalized == model.kernel->K_normalized);
  CHECK(back.kernel->raw_diag == model.kernel->raw_diag);
  std::filesystem::remove(path);
}

TEST_CASE("malformed model documents name the offending field") {
  auto path = tmp_file("bpj_model_bad.json");

  auto write = [&](const char* text) {
    std::ofstream out(path);
    out << text;
  };

  write("not json at all");
  CHECK_THROWS_AS(load_model(path), std::runtime_error);

  write("{}");
  CHECK_THROWS_AS(load_model(path), std::runtime_error);

  write(R"({"layers": []})");
  CHECK_THROWS_AS(load_model(path), std::runtime_error);

  write(R"({"layers": [{"in_dim": 2, "out_dim": 1, "activation": "sigmoid",
              "loss": "mse", "weights": [[1.0], [2.0], [3.0]]}]})");
  CHECK_THROWS_AS(load_model(path), std::runtime_error);

  write(R"({"layers": [{"in_dim": 2, "out_dim": 1, "activation": "swish",
              "loss": "mse", "weights": [[1.0], [2.0]]}]})");
  CHECK_THROWS_AS(load_model(path), std::runtime_error);

  try {
    write(R"({"layers": [{"in_dim": 2, "activation": "sigmoid",
                "loss": "mse", "weights": [[1.0], [2.0]]}]})");
    load_model(path);
    FAIL("expected a field error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("out_dim") != std::string::npos);
  }
  std::filesystem::remove(path);
}

TEST_CASE("model outputs route through the scaler") {
  Dataset data = two_blobs(12);
  auto [Z, stats] = standardize(data.X);

  Model model = plain_model(3);
  model.scaler = stats;

  Eigen::MatrixXd direct = forward_output(model.net, stats.apply(data.X));
  Eigen::MatrixXd routed = model_outputs(model, data.X);
  CHECK(routed == direct);

  Eigen::VectorXi pred = model_predict(model, data.X);
  CHECK(pred.size() == data.n());
}

TEST_CASE("kernel model outputs match the manual pipeline") {
  Dataset data = two_blobs(13);
  auto [Z, stats] = standardize(data.X);
  Eigen::MatrixXd train = Z.leftCols(20);

  KernelModel km = build_kernel_model(KernelKind::rbf(0.5), train);
  std::vector<LayerSpec> specs{{20, 4, Activation::Elu, Loss::Mse},
                               {4, 1, Activation::Sigmoid, Loss::Mse}};
  Model model{Network::random(specs, 1), stats, km};

  Eigen::MatrixXd probe = data.X.rightCols(5);
  Eigen::MatrixXd manual =
      forward_output(model.net, test_kernel_matrix(km, stats.apply(probe)));
  CHECK(model_outputs(model, probe) == manual);
}

TEST_CASE("kernel matrices are rebuilt on load") {
  Eigen::MatrixXd train = Eigen::MatrixXd::Random(2, 6);
  KernelModel km = build_kernel_model(KernelKind::linear(), train);

  std::vector<LayerSpec> specs{{6, 1, Activation::Sigmoid, Loss::Mse}};
  Model model{Network::random(specs, 2), std::nullopt, km};

  auto path = tmp_file("bpj_model_kernel.json");
  save_model(model, path);
  Model back = load_model(path);
  REQUIRE(back.kernel.has_value());
  CHECK(back.kernel->K_normalized == km.K_normalized);
  std::filesystem::remove(path);
}

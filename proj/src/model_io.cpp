#include "bpj/model_io.hpp"

#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace bpj {

namespace {

using nlohmann::json;

json matrix_to_json(const Eigen::Ref<const Eigen::MatrixXd>& M) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows, const std::string& field) {
  if (!rows.is_array() || rows.empty() || !rows[0].is_array())
    throw std::runtime_error("load_model: " + field +
                             " must be a nonempty array of rows");
  const Eigen::Index n_rows = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index n_cols = static_cast<Eigen::Index>(rows[0].size());
  Eigen::MatrixXd M(n_rows, n_cols);
  for (Eigen::Index r = 0; r < n_rows; ++r) {
    const json& row = rows[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n_cols)
      throw std::runtime_error("load_model: ragged rows in " + field);
    for (Eigen::Index c = 0; c < n_cols; ++c)
      M(r, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return M;
}

json vector_to_json(const Eigen::Ref<const Eigen::VectorXd>& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Eigen::VectorXd vector_from_json(const json& arr, const std::string& field) {
  if (!arr.is_array() || arr.empty())
    throw std::runtime_error("load_model: " + field +
                             " must be a nonempty array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i)
    v(i) = arr[static_cast<std::size_t>(i)].get<double>();
  return v;
}

const json& require(const json& obj, const std::string& key) {
  const auto it = obj.find(key);
  if (it == obj.end())
    throw std::runtime_error("load_model: missing field " + key);
  return *it;
}

}  // namespace

void save_model(const Model& model, const std::filesystem::path& path) {
  json doc;
  doc["layers"] = json::array();
  for (const Layer& lay : model.net.layers()) {
    json layer;
    layer["in_dim"] = lay.spec.in_dim;
    layer["out_dim"] = lay.spec.out_dim;
    layer["activation"] = std::string(to_string(lay.spec.activation));
    layer["loss"] = std::string(to_string(lay.spec.loss));
    layer["weights"] = matrix_to_json(lay.weights);
    doc["layers"].push_back(std::move(layer));
  }
  if (model.scaler) {
    doc["scaler"]["mean"] = vector_to_json(model.scaler->mean);
    doc["scaler"]["stddev"] = vector_to_json(model.scaler->stddev);
  }
  if (model.kernel) {
    doc["kernel"]["kind"] = to_string(model.kernel->kind.type);
    doc["kernel"]["gamma"] = model.kernel->kind.gamma;
    doc["kernel"]["train_x"] = matrix_to_json(model.kernel->train_X);
  }

  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_model: cannot open " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw std::runtime_error("save_model: write to " + path.string() + " failed");
}

namespace {

Model parse_model_doc(const json& doc) {
  const json& layers_json = require(doc, "layers");
  if (!layers_json.is_array() || layers_json.empty())
    throw std::runtime_error("load_model: layers must be a nonempty array");

  std::vector<Layer> layers;
  layers.reserve(layers_json.size());
  for (const json& layer_json : layers_json) {
    Layer lay;
    lay.spec.in_dim = require(layer_json, "in_dim").get<int>();
    lay.spec.out_dim = require(layer_json, "out_dim").get<int>();
    lay.spec.activation =
        activation_from_string(require(layer_json, "activation").get<std::string>());
    lay.spec.loss = loss_from_string(require(layer_json, "loss").get<std::string>());
    lay.weights = matrix_from_json(require(layer_json, "weights"), "weights");
    if (lay.weights.rows() != lay.spec.in_dim ||
        lay.weights.cols() != lay.spec.out_dim)
      throw std::runtime_error(
          "load_model: weights shape disagrees with in_dim/out_dim");
    layers.push_back(std::move(lay));
  }

  Model model{Network(std::move(layers)), std::nullopt, std::nullopt};

  if (doc.contains("scaler")) {
    const json& scaler_json = doc["scaler"];
    Standardizer scaler;
    scaler.mean = vector_from_json(require(scaler_json, "mean"), "scaler.mean");
    scaler.stddev = vector_from_json(require(scaler_json, "stddev"), "scaler.stddev");
    if (scaler.mean.size() != scaler.stddev.size())
      throw std::runtime_error("load_model: scaler mean/stddev length mismatch");
    model.scaler = std::move(scaler);
  }

  if (doc.contains("kernel")) {
    const json& kernel_json = doc["kernel"];
    const auto kind_name = require(kernel_json, "kind").get<std::string>();
    const double gamma =
        kind_name == "rbf" ? require(kernel_json, "gamma").get<double>() : 0.0;
    KernelKind kind = kernel_kind_from_strings(kind_name, gamma);
    Eigen::MatrixXd train_X =
        matrix_from_json(require(kernel_json, "train_x"), "kernel.train_x");
    model.kernel = build_kernel_model(kind, train_X);
  }

  return model;
}

}  // namespace

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_model: cannot open " + path.string());

  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& err) {
    throw std::runtime_error("load_model: " + path.string() + ": " + err.what());
  }

  try {
    return parse_model_doc(doc);
  } catch (const std::runtime_error&) {
    throw;
  } catch (const std::exception& err) {
    throw std::runtime_error("load_model: " + path.string() + ": " + err.what());
  }
}

Eigen::MatrixXd model_outputs(const Model& model,
                              const Eigen::Ref<const Eigen::MatrixXd>& X) {
  Eigen::MatrixXd features = model.scaler ? model.scaler->apply(X)
                                          : Eigen::MatrixXd(X);
  if (model.kernel) features = test_kernel_matrix(*model.kernel, features);
  return forward_output(model.net, features);
}

Eigen::VectorXi model_predict(const Model& model,
                              const Eigen::Ref<const Eigen::MatrixXd>& X) {
  return classify_outputs(
      model_outputs(model, X),
      model.net.layer(model.net.n_layers()).spec.activation);
}

}  // namespace bpj

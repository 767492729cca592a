#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <optional>

#include "bpj/data.hpp"
#include "bpj/kernel.hpp"
#include "bpj/network.hpp"

namespace bpj {

/// A trained network plus the preprocessing it was trained behind: the
/// feature standardizer and, for kernel models, the frozen training
/// columns. Inputs to model_outputs are always raw data-space points.
struct Model {
  Network net;
  std::optional<Standardizer> scaler;
  std::optional<KernelModel> kernel;
};

/// JSON round trip. Weights are stored as nested row arrays; the kernel
/// block stores only the kind, gamma and training columns, and the kernel
/// matrix is recomputed on load. Throws std::runtime_error on malformed
/// documents, naming the offending field.
void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

/// Raw network outputs / class predictions for data-space inputs, routed
/// through the scaler and kernel front ends when present.
Eigen::MatrixXd model_outputs(const Model& model,
                              const Eigen::Ref<const Eigen::MatrixXd>& X);
Eigen::VectorXi model_predict(const Model& model,
                              const Eigen::Ref<const Eigen::MatrixXd>& X);

}  // namespace bpj

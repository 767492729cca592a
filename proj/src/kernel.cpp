#include "bpj/kernel.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace bpj {

namespace {

double kernel_eval(const KernelKind& kind,
                   const Eigen::Ref<const Eigen::VectorXd>& a,
                   const Eigen::Ref<const Eigen::VectorXd>& b) {
  if (kind.type == KernelKind::Type::Linear) return a.dot(b);
  return std::exp(-kind.gamma * (a - b).squaredNorm());
}

}  // namespace

KernelKind KernelKind::rbf(double gamma) {
  if (!(gamma > 0.0))
    throw std::invalid_argument("KernelKind::rbf: gamma must be positive");
  return {Type::Rbf, gamma};
}

KernelKind kernel_kind_from_strings(const std::string& name, double gamma) {
  if (name == "linear") return KernelKind::linear();
  if (name == "rbf") return KernelKind::rbf(gamma);
  throw std::invalid_argument("unknown kernel: " + name);
}

std::string to_string(KernelKind::Type type) {
  switch (type) {
    case KernelKind::Type::Linear: return "linear";
    case KernelKind::Type::Rbf: return "rbf";
  }
  throw std::logic_error("unknown kernel type");
}

Eigen::MatrixXd kernel_matrix(const KernelKind& kind,
                              const Eigen::Ref<const Eigen::MatrixXd>& A,
                              const Eigen::Ref<const Eigen::MatrixXd>& B) {
  if (A.rows() != B.rows()) {
    std::ostringstream msg;
    msg << "kernel_matrix: operands live in different spaces (" << A.rows()
        << " vs " << B.rows() << " rows)";
    throw std::invalid_argument(msg.str());
  }

  Eigen::MatrixXd K(A.cols(), B.cols());
  for (Eigen::Index j = 0; j < B.cols(); ++j)
    for (Eigen::Index i = 0; i < A.cols(); ++i)
      K(i, j) = kernel_eval(kind, A.col(i), B.col(j));
  return K;
}

Eigen::MatrixXd normalize_kernel(const Eigen::Ref<const Eigen::MatrixXd>& K) {
  if (K.rows() != K.cols())
    throw std::invalid_argument("normalize_kernel: matrix must be square");

  Eigen::VectorXd scale(K.rows());
  for (Eigen::Index i = 0; i < K.rows(); ++i) {
    if (!(K(i, i) > 0.0)) {
      std::ostringstream msg;
      msg << "normalize_kernel: diagonal entry " << i << " = " << K(i, i)
          << " is not strictly positive";
      throw std::domain_error(msg.str());
    }
    scale(i) = std::sqrt(K(i, i));
  }

  Eigen::MatrixXd out(K.rows(), K.cols());
  for (Eigen::Index j = 0; j < K.cols(); ++j)
    for (Eigen::Index i = 0; i < K.rows(); ++i)
      out(i, j) = i == j ? 1.0 : K(i, j) / (scale(i) * scale(j));
  return out;
}

KernelModel build_kernel_model(const KernelKind& kind,
                               const Eigen::Ref<const Eigen::MatrixXd>& train_X) {
  if (train_X.cols() < 1)
    throw std::invalid_argument("build_kernel_model: need at least one column");

  KernelModel model;
  model.train_X = train_X;
  model.kind = kind;
  Eigen::MatrixXd K = kernel_matrix(kind, train_X, train_X);
  model.raw_diag = K.diagonal();
  model.K_normalized = normalize_kernel(K);
  return model;
}

Eigen::MatrixXd test_kernel_matrix(const KernelModel& model,
                                   const Eigen::Ref<const Eigen::MatrixXd>& Xt) {
  Eigen::MatrixXd cross = kernel_matrix(model.kind, model.train_X, Xt);

  Eigen::MatrixXd out(model.n(), Xt.cols());
  for (Eigen::Index j = 0; j < Xt.cols(); ++j) {
    const double self = kernel_eval(model.kind, Xt.col(j), Xt.col(j));
    if (!(self > 0.0)) {
      std::ostringstream msg;
      msg << "test_kernel_vector: test point " << j << " has self-similarity "
          << self << ", cannot normalize";
      throw std::domain_error(msg.str());
    }
    const double scale_t = std::sqrt(self);
    for (Eigen::Index i = 0; i < model.n(); ++i)
      out(i, j) = cross(i, j) / (std::sqrt(model.raw_diag(i)) * scale_t);
  }
  return out;
}

Eigen::VectorXd test_kernel_vector(const KernelModel& model,
                                   const Eigen::Ref<const Eigen::VectorXd>& x_t) {
  return test_kernel_matrix(model, x_t);
}

}  // namespace bpj

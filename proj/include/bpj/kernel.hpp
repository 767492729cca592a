#pragma once

#include <Eigen/Core>

#include <string>

namespace bpj {

/// Kernel selector: linear k(a,b) = a.b or rbf k(a,b) = exp(-gamma |a-b|^2).
struct KernelKind {
  enum class Type { Linear, Rbf };

  Type type = Type::Rbf;
  double gamma = 1.0;

  static KernelKind linear() { return {Type::Linear, 0.0}; }
  static KernelKind rbf(double gamma);
};

KernelKind kernel_kind_from_strings(const std::string& name, double gamma);
std::string to_string(KernelKind::Type type);

/// Pairwise kernel evaluations: entry (i,j) = k(A.col(i), B.col(j)).
/// Throws std::invalid_argument when A and B disagree on row count.
Eigen::MatrixXd kernel_matrix(const KernelKind& kind,
                              const Eigen::Ref<const Eigen::MatrixXd>& A,
                              const Eigen::Ref<const Eigen::MatrixXd>& B);

/// Cosine-style normalization K(i,j)/sqrt(K(i,i) K(j,j)) with the diagonal
/// set to exactly 1. Throws std::domain_error naming the first index whose
/// diagonal entry is not strictly positive.
Eigen::MatrixXd normalize_kernel(const Eigen::Ref<const Eigen::MatrixXd>& K);

/// Frozen training-kernel state: the training columns, the normalized n x n
/// kernel fed to the network (one column per sample, so the first layer has
/// fan-in n), and the raw self-similarities needed to normalize test
/// columns exactly as a joint [train_X, x_t] kernel would.
struct KernelModel {
  Eigen::MatrixXd train_X;
  KernelKind kind;
  Eigen::MatrixXd K_normalized;
  Eigen::VectorXd raw_diag;

  Eigen::Index n() const { return train_X.cols(); }
};

KernelModel build_kernel_model(const KernelKind& kind,
                               const Eigen::Ref<const Eigen::MatrixXd>& train_X);

/// Kernel features of one test point: the first n entries of the last
/// column of the normalized (n+1) kernel over [train_X, x_t], computed
/// without rebuilding the training block (entrywise identical arithmetic).
Eigen::VectorXd test_kernel_vector(const KernelModel& model,
                                   const Eigen::Ref<const Eigen::VectorXd>& x_t);

/// Column-wise batch of test_kernel_vector.
Eigen::MatrixXd test_kernel_matrix(const KernelModel& model,
                                   const Eigen::Ref<const Eigen::MatrixXd>& Xt);

}  // namespace bpj

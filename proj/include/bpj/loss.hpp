#pragma once

#include <Eigen/Core>

#include <string_view>

namespace bpj {

/// Per-layer loss selector. mse is the squared l2 norm of the residual;
/// cross_entropy is -sum_j y_j ln f_j and requires strictly positive f.
enum class Loss { Mse, CrossEntropy };

Loss loss_from_string(std::string_view name);
std::string_view to_string(Loss kind);

/// Loss of one sample. Throws std::invalid_argument on length mismatch and
/// std::domain_error on a nonpositive f entry under cross_entropy.
double loss_value(Loss kind, const Eigen::Ref<const Eigen::VectorXd>& f,
                  const Eigen::Ref<const Eigen::VectorXd>& y);

/// Gradient of the loss with respect to the activation output f:
/// 2 (f - y) for mse; entrywise -y_j / f_j for cross_entropy, with entries
/// where y_j = 0 exactly zero.
Eigen::VectorXd loss_grad(Loss kind, const Eigen::Ref<const Eigen::VectorXd>& f,
                          const Eigen::Ref<const Eigen::VectorXd>& y);

/// Column-wise batch forms: batch_loss sums the per-sample losses,
/// batch_loss_grad stacks the per-sample gradients.
double batch_loss(Loss kind, const Eigen::Ref<const Eigen::MatrixXd>& f,
                  const Eigen::Ref<const Eigen::MatrixXd>& y);
Eigen::MatrixXd batch_loss_grad(Loss kind,
                                const Eigen::Ref<const Eigen::MatrixXd>& f,
                                const Eigen::Ref<const Eigen::MatrixXd>& y);

}  // namespace bpj

#pragma once

#include <Eigen/Core>

#include <string_view>

namespace bpj {

/// Activation functions available to network layers. Each variant is a total
/// forward map on the reals with a total derivative and an inverse defined on
/// the variant's feasible set: elu (-1, inf), linear all reals, sigmoid
/// (0, 1), tanh (-1, 1).
enum class Activation { Elu, Linear, Sigmoid, Tanh };

/// Margin by which project_feasible shrinks open feasible sets, keeping
/// inverse values finite.
inline constexpr double kFeasibleMargin = 1e-6;

/// Inverse outputs are clamped into [-kInverseBound, kInverseBound].
inline constexpr double kInverseBound = 1e3;

/// Parses "elu" / "linear" / "sigmoid" / "tanh"; throws std::invalid_argument
/// on anything else.
Activation activation_from_string(std::string_view name);
std::string_view to_string(Activation kind);

double act_forward(Activation kind, double z);
double act_derivative(Activation kind, double z);
double act_inverse(Activation kind, double y);
double project_feasible(Activation kind, double y);

/// Elementwise f over a matrix (or vector) of pre-activations.
Eigen::MatrixXd act_forward(Activation kind, const Eigen::Ref<const Eigen::MatrixXd>& z);

/// Elementwise f'. For these independent-node activations this holds the
/// diagonal of the activation Jacobian at each input entry.
Eigen::MatrixXd act_derivative(Activation kind, const Eigen::Ref<const Eigen::MatrixXd>& z);

/// Elementwise f^-1, clamped into [-kInverseBound, kInverseBound]. Every
/// entry must already lie in the feasible set (apply project_feasible
/// first); an infeasible entry raises std::domain_error naming the entry and
/// the violated bound.
Eigen::MatrixXd act_inverse(Activation kind, const Eigen::Ref<const Eigen::MatrixXd>& y);

/// Clamps every entry into the feasible set shrunk by kFeasibleMargin
/// (linear passes through unchanged). Idempotent, and its output always
/// satisfies act_inverse's precondition.
Eigen::MatrixXd project_feasible(Activation kind, const Eigen::Ref<const Eigen::MatrixXd>& y);

}  // namespace bpj

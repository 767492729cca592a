#include "bpj/activation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace bpj {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Interval {
  double lo;
  double hi;
};

// Open feasible interval of each inverse.
Interval feasible_interval(Activation kind) {
  switch (kind) {
    case Activation::Elu:
      return {-1.0, kInf};
    case Activation::Linear:
      return {-kInf, kInf};
    case Activation::Sigmoid:
      return {0.0, 1.0};
    case Activation::Tanh:
      return {-1.0, 1.0};
  }
  throw std::logic_error("unknown activation");
}

bool feasible(Activation kind, double y) {
  const Interval iv = feasible_interval(kind);
  return y > iv.lo && y < iv.hi;
}

double inverse_unchecked(Activation kind, double y) {
  switch (kind) {
    case Activation::Elu:
      return y <= 0.0 ? std::log1p(y) : y;
    case Activation::Linear:
      return y;
    case Activation::Sigmoid:
      return std::log(y / (1.0 - y));
    case Activation::Tanh:
      return 0.5 * std::log((1.0 + y) / (1.0 - y));
  }
  throw std::logic_error("unknown activation");
}

[[noreturn]] void throw_infeasible(Activation kind, double y, Eigen::Index row,
                                   Eigen::Index col) {
  const Interval iv = feasible_interval(kind);
  std::ostringstream msg;
  msg << "act_inverse(" << to_string(kind) << "): entry (" << row << ", "
      << col << ") = " << y << " lies outside the feasible interval ("
      << iv.lo << ", " << iv.hi << ")";
  throw std::domain_error(msg.str());
}

}  // namespace

Activation activation_from_string(std::string_view name) {
  if (name == "elu") return Activation::Elu;
  if (name == "linear") return Activation::Linear;
  if (name == "sigmoid") return Activation::Sigmoid;
  if (name == "tanh") return Activation::Tanh;
  throw std::invalid_argument("unknown activation name: " + std::string(name));
}

std::string_view to_string(Activation kind) {
  switch (kind) {
    case Activation::Elu:
      return "elu";
    case Activation::Linear:
      return "linear";
    case Activation::Sigmoid:
      return "sigmoid";
    case Activation::Tanh:
      return "tanh";
  }
  throw std::logic_error("unknown activation");
}

double act_forward(Activation kind, double z) {
  switch (kind) {
    case Activation::Elu:
      return z > 0.0 ? z : std::expm1(z);
    case Activation::Linear:
      return z;
    case Activation::Sigmoid:
      return 1.0 / (1.0 + std::exp(-z));
    case Activation::Tanh:
      return std::tanh(z);
  }
  throw std::logic_error("unknown activation");
}

double act_derivative(Activation kind, double z) {
  switch (kind) {
    case Activation::Elu:
      return z > 0.0 ? 1.0 : std::exp(z);
    case Activation::Linear:
      return 1.0;
    case Activation::Sigmoid: {
      const double f = 1.0 / (1.0 + std::exp(-z));
      return f * (1.0 - f);
    }
    case Activation::Tanh: {
      const double f = std::tanh(z);
      return 1.0 - f * f;
    }
  }
  throw std::logic_error("unknown activation");
}

double act_inverse(Activation kind, double y) {
  if (!feasible(kind, y)) throw_infeasible(kind, y, 0, 0);
  return std::clamp(inverse_unchecked(kind, y), -kInverseBound, kInverseBound);
}

double project_feasible(Activation kind, double y) {
  switch (kind) {
    case Activation::Elu:
      return std::max(y, -1.0 + kFeasibleMargin);
    case Activation::Linear:
      return y;
    case Activation::Sigmoid:
      return std::clamp(y, kFeasibleMargin, 1.0 - kFeasibleMargin);
    case Activation::Tanh:
      return std::clamp(y, -1.0 + kFeasibleMargin, 1.0 - kFeasibleMargin);
  }
  throw std::logic_error("unknown activation");
}

Eigen::MatrixXd act_forward(Activation kind,
                            const Eigen::Ref<const Eigen::MatrixXd>& z) {
  return z.unaryExpr([kind](double v) { return act_forward(kind, v); });
}

Eigen::MatrixXd act_derivative(Activation kind,
                               const Eigen::Ref<const Eigen::MatrixXd>& z) {
  return z.unaryExpr([kind](double v) { return act_derivative(kind, v); });
}

Eigen::MatrixXd act_inverse(Activation kind,
                            const Eigen::Ref<const Eigen::MatrixXd>& y) {
  for (Eigen::Index c = 0; c < y.cols(); ++c)
    for (Eigen::Index r = 0; r < y.rows(); ++r)
      if (!feasible(kind, y(r, c))) throw_infeasible(kind, y(r, c), r, c);
  return y.unaryExpr([kind](double v) {
    return std::clamp(inverse_unchecked(kind, v), -kInverseBound,
                      kInverseBound);
  });
}

Eigen::MatrixXd project_feasible(Activation kind,
                                 const Eigen::Ref<const Eigen::MatrixXd>& y) {
  return y.unaryExpr([kind](double v) { return project_feasible(kind, v); });
}

}  // namespace bpj

#include "bpj/loss.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace bpj {
namespace {

void check_shapes(const Eigen::Ref<const Eigen::MatrixXd>& f,
                  const Eigen::Ref<const Eigen::MatrixXd>& y) {
  if (f.rows() != y.rows() || f.cols() != y.cols()) {
    std::ostringstream msg;
    msg << "loss: shape mismatch, f is " << f.rows() << "x" << f.cols()
        << " but y is " << y.rows() << "x" << y.cols();
    throw std::invalid_argument(msg.str());
  }
}

void check_positive(const Eigen::Ref<const Eigen::MatrixXd>& f) {
  for (Eigen::Index c = 0; c < f.cols(); ++c)
    for (Eigen::Index r = 0; r < f.rows(); ++r)
      if (!(f(r, c) > 0.0)) {
        std::ostringstream msg;
        msg << "cross_entropy: activation entry (" << r << ", " << c
            << ") = " << f(r, c) << " is not strictly positive";
        throw std::domain_error(msg.str());
      }
}

double cross_entropy_value(const Eigen::Ref<const Eigen::MatrixXd>& f,
                           const Eigen::Ref<const Eigen::MatrixXd>& y) {
  check_positive(f);
  double total = 0.0;
  for (Eigen::Index c = 0; c < f.cols(); ++c)
    for (Eigen::Index r = 0; r < f.rows(); ++r)
      if (y(r, c) != 0.0) total -= y(r, c) * std::log(f(r, c));
  return total;
}

Eigen::MatrixXd cross_entropy_grad(const Eigen::Ref<const Eigen::MatrixXd>& f,
                                   const Eigen::Ref<const Eigen::MatrixXd>& y) {
  check_positive(f);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(f.rows(), f.cols());
  for (Eigen::Index c = 0; c < f.cols(); ++c)
    for (Eigen::Index r = 0; r < f.rows(); ++r)
      if (y(r, c) != 0.0) g(r, c) = -y(r, c) / f(r, c);
  return g;
}

}  // namespace

Loss loss_from_string(std::string_view name) {
  if (name == "mse") return Loss::Mse;
  if (name == "cross_entropy") return Loss::CrossEntropy;
  throw std::invalid_argument("unknown loss name: " + std::string(name));
}

std::string_view to_string(Loss kind) {
  switch (kind) {
    case Loss::Mse:
      return "mse";
    case Loss::CrossEntropy:
      return "cross_entropy";
  }
  throw std::logic_error("unknown loss");
}

double loss_value(Loss kind, const Eigen::Ref<const Eigen::VectorXd>& f,
                  const Eigen::Ref<const Eigen::VectorXd>& y) {
  return batch_loss(kind, f, y);
}

Eigen::VectorXd loss_grad(Loss kind,
                          const Eigen::Ref<const Eigen::VectorXd>& f,
                          const Eigen::Ref<const Eigen::VectorXd>& y) {
  return batch_loss_grad(kind, f, y);
}

double batch_loss(Loss kind, const Eigen::Ref<const Eigen::MatrixXd>& f,
                  const Eigen::Ref<const Eigen::MatrixXd>& y) {
  check_shapes(f, y);
  switch (kind) {
    case Loss::Mse:
      return (f - y).squaredNorm();
    case Loss::CrossEntropy:
      return cross_entropy_value(f, y);
  }
  throw std::logic_error("unknown loss");
}

Eigen::MatrixXd batch_loss_grad(Loss kind,
                                const Eigen::Ref<const Eigen::MatrixXd>& f,
                                const Eigen::Ref<const Eigen::MatrixXd>& y) {
  check_shapes(f, y);
  switch (kind) {
    case Loss::Mse:
      return 2.0 * (f - y);
    case Loss::CrossEntropy:
      return cross_entropy_grad(f, y);
  }
  throw std::logic_error("unknown loss");
}

}  // namespace bpj

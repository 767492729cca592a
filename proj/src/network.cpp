#include "bpj/network.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

namespace bpj {

Network::Network(std::vector<Layer> layers) : layers_(std::move(layers)) {
  if (layers_.empty())
    throw std::invalid_argument("Network: need at least one layer");
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const Layer& lay = layers_[i];
    if (lay.weights.rows() != lay.spec.in_dim ||
        lay.weights.cols() != lay.spec.out_dim)
      throw std::invalid_argument(
          "Network: layer " + std::to_string(i + 1) + " weights are " +
          std::to_string(lay.weights.rows()) + "x" +
          std::to_string(lay.weights.cols()) + ", spec says " +
          std::to_string(lay.spec.in_dim) + "x" +
          std::to_string(lay.spec.out_dim));
    if (i > 0 && layers_[i - 1].spec.out_dim != lay.spec.in_dim)
      throw std::invalid_argument(
          "Network: layer " + std::to_string(i + 1) + " expects " +
          std::to_string(lay.spec.in_dim) + " inputs but layer " +
          std::to_string(i) + " emits " +
          std::to_string(layers_[i - 1].spec.out_dim));
    if (lay.spec.loss == Loss::CrossEntropy &&
        lay.spec.activation != Activation::Sigmoid)
      throw std::invalid_argument(
          "Network: layer " + std::to_string(i + 1) +
          " pairs cross_entropy with " +
          std::string(to_string(lay.spec.activation)) +
          "; cross_entropy requires sigmoid");
  }
}

Network Network::random(const std::vector<LayerSpec>& specs,
                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);

  std::vector<Layer> layers;
  layers.reserve(specs.size());
  for (const LayerSpec& spec : specs) {
    if (spec.in_dim <= 0 || spec.out_dim <= 0)
      throw std::invalid_argument("Network::random: layer dims must be positive");
    Layer lay;
    lay.spec = spec;
    lay.weights.resize(spec.in_dim, spec.out_dim);
    const double sigma = 1.0 / std::sqrt(static_cast<double>(spec.in_dim));
    for (Eigen::Index c = 0; c < lay.weights.cols(); ++c)
      for (Eigen::Index r = 0; r < lay.weights.rows(); ++r)
        lay.weights(r, c) = sigma * unit(rng);
    layers.push_back(std::move(lay));
  }
  return Network(std::move(layers));
}

ForwardTrace forward_pass(const Network& net,
                          const Eigen::Ref<const Eigen::MatrixXd>& X,
                          int upto) {
  if (upto < 0) upto = net.n_layers();
  if (upto > net.n_layers())
    throw std::invalid_argument("forward_pass: upto " + std::to_string(upto) +
                                " exceeds depth " +
                                std::to_string(net.n_layers()));
  if (X.rows() != net.input_dim())
    throw std::invalid_argument("forward_pass: input has " +
                                std::to_string(X.rows()) + " rows, network expects " +
                                std::to_string(net.input_dim()));

  ForwardTrace trace;
  trace.X.reserve(static_cast<std::size_t>(upto) + 1);
  trace.Z.reserve(static_cast<std::size_t>(upto));
  trace.X.emplace_back(X);
  for (int r = 1; r <= upto; ++r) {
    const Layer& lay = net.layer(r);
    trace.Z.emplace_back(lay.weights.transpose() * trace.X.back());
    trace.X.emplace_back(act_forward(lay.spec.activation, trace.Z.back()));
  }
  return trace;
}

Eigen::MatrixXd forward_output(const Network& net,
                               const Eigen::Ref<const Eigen::MatrixXd>& X) {
  return forward_pass(net, X).X.back();
}

Eigen::MatrixXd backproject_labels(const Network& net,
                                   const Eigen::Ref<const Eigen::MatrixXd>& Y,
                                   int m) {
  const int L = net.n_layers();
  if (m < 1 || m > L)
    throw std::invalid_argument("backproject_labels: layer " +
                                std::to_string(m) + " outside 1.." +
                                std::to_string(L));
  if (Y.rows() != net.output_dim())
    throw std::invalid_argument("backproject_labels: targets have " +
                                std::to_string(Y.rows()) +
                                " rows, network emits " +
                                std::to_string(net.output_dim()));

  Eigen::MatrixXd Ym = Y;
  for (int r = L - 1; r >= m; --r) {
    const Layer& next = net.layer(r + 1);
    Ym = project_feasible(next.spec.activation, Ym);
    Ym = next.weights * act_inverse(next.spec.activation, Ym);
  }
  return Ym;
}

Eigen::VectorXi classify_outputs(const Eigen::Ref<const Eigen::MatrixXd>& F,
                                 Activation last_activation) {
  const Eigen::Index n = F.cols();
  Eigen::VectorXi classes(n);
  if (F.rows() == 1) {
    const double threshold =
        (last_activation == Activation::Tanh || last_activation == Activation::Linear)
            ? 0.0
            : 0.5;
    for (Eigen::Index i = 0; i < n; ++i)
      classes(i) = F(0, i) >= threshold ? 1 : 0;
  } else {
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Index best = 0;
      for (Eigen::Index r = 1; r < F.rows(); ++r)
        if (F(r, i) > F(best, i)) best = r;
      classes(i) = static_cast<int>(best);
    }
  }
  return classes;
}

Eigen::VectorXi predict(const Network& net,
                        const Eigen::Ref<const Eigen::MatrixXd>& X) {
  return classify_outputs(forward_output(net, X),
                          net.layer(net.n_layers()).spec.activation);
}

}  // namespace bpj

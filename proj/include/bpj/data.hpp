#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "bpj/activation.hpp"

namespace bpj {

/// Column-wise dataset: X is d x n with one sample per column, labels holds
/// class indices in [0, n_classes).
struct Dataset {
  Eigen::MatrixXd X;
  Eigen::VectorXi labels;
  int n_classes = 0;

  Eigen::Index n() const { return X.cols(); }
  Eigen::Index dim() const { return X.rows(); }
};

/// Isotropic Gaussian blob per class: class k draws n_per_class[k] points
/// from N(means[k], variances[k] * I). Deterministic under seed. The three
/// lists must have equal lengths and strictly positive variances.
Dataset generate_blobs(const std::vector<int>& n_per_class,
                       const std::vector<Eigen::VectorXd>& means,
                       const std::vector<double>& variances,
                       std::uint64_t seed);

/// Per-feature affine transform fitted by standardize(); apply() maps new
/// points with the training statistics.
struct Standardizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;

  Eigen::MatrixXd apply(const Eigen::Ref<const Eigen::MatrixXd>& X) const;
};

/// Shifts and scales every row (feature) to zero mean and unit population
/// standard deviation. Throws std::invalid_argument on a zero-variance row.
std::pair<Eigen::MatrixXd, Standardizer> standardize(
    const Eigen::Ref<const Eigen::MatrixXd>& X);

/// Output dimensionality p implied by a class count: 1 for two classes
/// (scalar targets), n_classes for three or more (one-hot columns).
int label_dim(int n_classes);

/// Encoded label matrix of shape label_dim(n_classes) x n. Two classes map
/// to scalars ({-1, 1} under a tanh output layer, {0, 1} otherwise); three
/// or more classes map to one-hot columns regardless of the activation.
Eigen::MatrixXd encode_labels(const Eigen::Ref<const Eigen::VectorXi>& labels,
                              int n_classes, Activation last_activation);

/// CSV with a mandatory header row "x1,...,xd,label".
void save_dataset_csv(const Dataset& data, const std::filesystem::path& path);
Dataset load_dataset_csv(const std::filesystem::path& path);

/// The built-in synthetic benchmarks: 300 points in two classes (150 each,
/// means (-2,0)/(2,0), variances 1.0/2.5) or three classes (100 each, means
/// (-2,-1)/(2,-1)/(0,2), variances 0.7/1.5/2.5).
Dataset two_blobs(std::uint64_t seed);
Dataset three_blobs(std::uint64_t seed);

}  // namespace bpj

#include "bpj/data.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

namespace bpj {

namespace {

[[noreturn]] void fail(const std::string& msg) {
  throw std::invalid_argument(msg);
}

}  // namespace

Dataset generate_blobs(const std::vector<int>& n_per_class,
                       const std::vector<Eigen::VectorXd>& means,
                       const std::vector<double>& variances,
                       std::uint64_t seed) {
  const std::size_t k = n_per_class.size();
  if (k == 0) fail("generate_blobs: need at least one class");
  if (means.size() != k || variances.size() != k)
    fail("generate_blobs: n_per_class, means and variances must have equal lengths");

  const Eigen::Index d = means[0].size();
  Eigen::Index total = 0;
  for (std::size_t c = 0; c < k; ++c) {
    if (n_per_class[c] <= 0) fail("generate_blobs: class sizes must be positive");
    if (means[c].size() != d) fail("generate_blobs: all means must share one dimension");
    if (!(variances[c] > 0.0)) fail("generate_blobs: variances must be positive");
    total += n_per_class[c];
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);

  Dataset data;
  data.X.resize(d, total);
  data.labels.resize(total);
  data.n_classes = static_cast<int>(k);

  Eigen::Index col = 0;
  for (std::size_t c = 0; c < k; ++c) {
    const double sigma = std::sqrt(variances[c]);
    for (int i = 0; i < n_per_class[c]; ++i, ++col) {
      for (Eigen::Index r = 0; r < d; ++r)
        data.X(r, col) = means[c](r) + sigma * unit(rng);
      data.labels(col) = static_cast<int>(c);
    }
  }
  return data;
}

Eigen::MatrixXd Standardizer::apply(
    const Eigen::Ref<const Eigen::MatrixXd>& X) const {
  if (X.rows() != mean.size())
    fail("Standardizer::apply: expected " + std::to_string(mean.size()) +
         " features, got " + std::to_string(X.rows()));
  return (X.colwise() - mean).array().colwise() / stddev.array();
}

std::pair<Eigen::MatrixXd, Standardizer> standardize(
    const Eigen::Ref<const Eigen::MatrixXd>& X) {
  if (X.cols() == 0) fail("standardize: empty dataset");

  Standardizer s;
  s.mean = X.rowwise().mean();
  Eigen::MatrixXd centered = X.colwise() - s.mean;
  s.stddev = (centered.array().square().rowwise().mean()).sqrt();
  for (Eigen::Index r = 0; r < s.stddev.size(); ++r) {
    if (!(s.stddev(r) > 0.0))
      fail("standardize: feature " + std::to_string(r) + " has zero variance");
  }
  return {centered.array().colwise() / s.stddev.array(), s};
}

int label_dim(int n_classes) {
  if (n_classes < 2) fail("label_dim: need at least two classes");
  return n_classes == 2 ? 1 : n_classes;
}

Eigen::MatrixXd encode_labels(const Eigen::Ref<const Eigen::VectorXi>& labels,
                              int n_classes, Activation last_activation) {
  const Eigen::Index n = labels.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (labels(i) < 0 || labels(i) >= n_classes)
      fail("encode_labels: label " + std::to_string(labels(i)) +
           " at sample " + std::to_string(i) + " outside [0, " +
           std::to_string(n_classes) + ")");
  }

  const int p = label_dim(n_classes);
  Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(p, n);
  if (p == 1) {
    const double neg = last_activation == Activation::Tanh ? -1.0 : 0.0;
    for (Eigen::Index i = 0; i < n; ++i) Y(0, i) = labels(i) == 1 ? 1.0 : neg;
  } else {
    for (Eigen::Index i = 0; i < n; ++i) Y(labels(i), i) = 1.0;
  }
  return Y;
}

void save_dataset_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail("save_dataset_csv: cannot open " + path.string());

  for (Eigen::Index r = 0; r < data.dim(); ++r) out << 'x' << (r + 1) << ',';
  out << "label\n";

  char buf[64];
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    for (Eigen::Index r = 0; r < data.dim(); ++r) {
      std::snprintf(buf, sizeof buf, "%.17g", data.X(r, i));
      out << buf << ',';
    }
    out << data.labels(i) << '\n';
  }
  if (!out) fail("save_dataset_csv: write to " + path.string() + " failed");
}

Dataset load_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("load_dataset_csv: cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) fail("load_dataset_csv: empty file " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) header.push_back(field);
  }
  if (header.size() < 2 || header.back() != "label")
    fail("load_dataset_csv: header must be x1,...,xd,label");
  for (std::size_t i = 0; i + 1 < header.size(); ++i) {
    if (header[i] != "x" + std::to_string(i + 1))
      fail("load_dataset_csv: header must be x1,...,xd,label, got column '" +
           header[i] + "'");
  }
  const Eigen::Index d = static_cast<Eigen::Index>(header.size()) - 1;

  std::vector<double> xs;
  std::vector<int> ys;
  Eigen::Index row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    Eigen::Index got = 0;
    while (std::getline(ss, field, ',')) {
      ++got;
      if (got <= d)
        xs.push_back(std::stod(field));
      else if (got == d + 1)
        ys.push_back(std::stoi(field));
    }
    if (got != d + 1)
      fail("load_dataset_csv: line " + std::to_string(row) + " has " +
           std::to_string(got) + " fields, expected " + std::to_string(d + 1));
  }
  if (ys.empty()) fail("load_dataset_csv: no data rows in " + path.string());

  Dataset data;
  const Eigen::Index n = static_cast<Eigen::Index>(ys.size());
  data.X.resize(d, n);
  data.labels.resize(n);
  int max_label = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index r = 0; r < d; ++r) data.X(r, i) = xs[i * d + r];
    if (ys[i] < 0)
      fail("load_dataset_csv: negative label at sample " + std::to_string(i));
    data.labels(i) = ys[i];
    max_label = std::max(max_label, ys[i]);
  }
  data.n_classes = max_label + 1;
  return data;
}

Dataset two_blobs(std::uint64_t seed) {
  Eigen::VectorXd m0(2), m1(2);
  m0 << -2.0, 0.0;
  m1 << 2.0, 0.0;
  return generate_blobs({150, 150}, {m0, m1}, {1.0, 2.5}, seed);
}

Dataset three_blobs(std::uint64_t seed) {
  Eigen::VectorXd m0(2), m1(2), m2(2);
  m0 << -2.0, -1.0;
  m1 << 2.0, -1.0;
  m2 << 0.0, 2.0;
  return generate_blobs({100, 100, 100}, {m0, m1, m2}, {0.7, 1.5, 2.5}, seed);
}

}  // namespace bpj

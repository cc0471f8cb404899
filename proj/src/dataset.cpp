#include "psc/dataset.hpp"

#include "psc/random.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace psc {

LabeledMatrix::LabeledMatrix(Eigen::MatrixXd samples, std::vector<int> labels,
                             std::vector<std::string> feature_names)
    : samples_(std::move(samples)), labels_(std::move(labels)),
      feature_names_(std::move(feature_names)) {
  if (static_cast<Eigen::Index>(labels_.size()) != samples_.rows()) {
    throw std::invalid_argument("label count " + std::to_string(labels_.size()) +
                                " does not match sample rows " +
                                std::to_string(samples_.rows()));
  }
  if (samples_.rows() < 2) {
    throw std::invalid_argument("need at least two samples");
  }
  if (samples_.cols() < 1) {
    throw std::invalid_argument("need at least one feature");
  }
  if (!feature_names_.empty() &&
      static_cast<Eigen::Index>(feature_names_.size()) != samples_.cols()) {
    throw std::invalid_argument("feature name count does not match columns");
  }
  for (const int y : labels_) {
    if (y != 1 && y != -1) {
      throw std::invalid_argument("labels must be +1 or -1, got " + std::to_string(y));
    }
  }
  if (count(1) == 0 || count(-1) == 0) {
    throw std::invalid_argument("both classes must be present");
  }
  if (!samples_.allFinite()) {
    for (Eigen::Index i = 0; i < samples_.rows(); ++i) {
      for (Eigen::Index j = 0; j < samples_.cols(); ++j) {
        if (!std::isfinite(samples_(i, j))) {
          throw std::invalid_argument("non-finite sample value at row " + std::to_string(i) +
                                      ", column " + std::to_string(j));
        }
      }
    }
  }
}

std::size_t LabeledMatrix::count(int label) const {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), label));
}

Eigen::VectorXd LabeledMatrix::label_vector() const {
  Eigen::VectorXd y(rows());
  for (Eigen::Index i = 0; i < rows(); ++i) {
    y[i] = labels_[static_cast<std::size_t>(i)];
  }
  return y;
}

LabeledMatrix LabeledMatrix::subset(std::span<const std::size_t> rows) const {
  Eigen::MatrixXd samples(static_cast<Eigen::Index>(rows.size()), dim());
  std::vector<int> labels;
  labels.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= labels_.size()) {
      throw std::out_of_range("subset row index out of range");
    }
    samples.row(static_cast<Eigen::Index>(r)) = samples_.row(static_cast<Eigen::Index>(rows[r]));
    labels.push_back(labels_[rows[r]]);
  }
  return LabeledMatrix(std::move(samples), std::move(labels), feature_names_);
}

ClassStats class_stats(const LabeledMatrix& data) {
  ClassStats stats;
  stats.u1 = Eigen::VectorXd::Zero(data.dim());
  stats.u2 = Eigen::VectorXd::Zero(data.dim());
  const auto& labels = data.labels();
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    if (labels[static_cast<std::size_t>(i)] == 1) {
      stats.u1 += data.samples().row(i).transpose();
      ++stats.n1;
    } else {
      stats.u2 += data.samples().row(i).transpose();
      ++stats.n2;
    }
  }
  if (stats.n1 == 0 || stats.n2 == 0) {
    throw std::invalid_argument("class_stats requires both classes");
  }
  stats.u1 /= static_cast<double>(stats.n1);
  stats.u2 /= static_cast<double>(stats.n2);
  const auto [lo, hi] = std::minmax(stats.n1, stats.n2);
  stats.m = static_cast<double>(hi) / static_cast<double>(lo);
  return stats;
}

std::vector<std::size_t> FoldPlan::test_indices(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] == fold) {
      out.push_back(i);
    }
  }
  return out;
}

std::vector<std::size_t> FoldPlan::train_indices(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] != fold) {
      out.push_back(i);
    }
  }
  return out;
}

FoldPlan stratified_kfold(std::span<const int> labels, int k, std::uint64_t seed) {
  if (k < 2) {
    throw std::invalid_argument("fold count must be at least 2");
  }
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.assignments.assign(labels.size(), -1);

  Rng rng(seed);
  for (const int cls : {1, -1}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == cls) {
        members.push_back(i);
      }
    }
    if (members.size() < static_cast<std::size_t>(k)) {
      throw std::invalid_argument("class " + std::to_string(cls) + " has " +
                                  std::to_string(members.size()) + " samples, fewer than " +
                                  std::to_string(k) + " folds");
    }
    rng.shuffle(members);
    for (std::size_t r = 0; r < members.size(); ++r) {
      plan.assignments[members[r]] = static_cast<int>(r % static_cast<std::size_t>(k));
    }
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (plan.assignments[i] < 0) {
      throw std::invalid_argument("labels must be +1 or -1");
    }
  }
  return plan;
}

double hdlss_mean_scale(Eigen::Index d) {
  return 1.35 / std::sqrt(static_cast<double>(d));
}

LabeledMatrix simulate_hdlss(Eigen::Index d, std::size_t n_pos, std::size_t n_neg,
                             std::uint64_t seed) {
  if (d < 1 || n_pos < 1 || n_neg < 1) {
    throw std::invalid_argument("simulate_hdlss needs d >= 1 and both counts >= 1");
  }
  const double c = hdlss_mean_scale(d);
  const auto n = static_cast<Eigen::Index>(n_pos + n_neg);
  Eigen::MatrixXd samples(n, d);
  std::vector<int> labels(static_cast<std::size_t>(n));
  Rng rng(seed);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int y = i < static_cast<Eigen::Index>(n_pos) ? 1 : -1;
    labels[static_cast<std::size_t>(i)] = y;
    for (Eigen::Index j = 0; j < d; ++j) {
      samples(i, j) = y * c + rng.normal();
    }
  }
  return LabeledMatrix(std::move(samples), std::move(labels));
}

Eigen::Vector2d fig1_mean() { return {1.0, 2.5}; }

Eigen::Matrix2d fig1_covariance() {
  Eigen::Matrix2d s;
  s << 1.5, 0.5, 0.5, 1.5;
  return s;
}

LabeledMatrix simulate_fig1(std::size_t n_pos, std::size_t n_neg, std::uint64_t seed) {
  if (n_pos < 1 || n_neg < 1) {
    throw std::invalid_argument("simulate_fig1 needs both counts >= 1");
  }
  const Eigen::Vector2d mu = fig1_mean();
  const Eigen::Matrix2d root = fig1_covariance().llt().matrixL();
  const auto n = static_cast<Eigen::Index>(n_pos + n_neg);
  Eigen::MatrixXd samples(n, 2);
  std::vector<int> labels(static_cast<std::size_t>(n));
  Rng rng(seed);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int y = i < static_cast<Eigen::Index>(n_pos) ? 1 : -1;
    labels[static_cast<std::size_t>(i)] = y;
    Eigen::Vector2d z;
    z[0] = rng.normal();
    z[1] = rng.normal();
    samples.row(i) = (y * mu + root * z).transpose();
  }
  return LabeledMatrix(std::move(samples), std::move(labels));
}

} // namespace psc

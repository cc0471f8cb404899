#include "psc/scatter.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace psc {

double imbalance_beta(std::size_t n1, std::size_t n2) {
  if (n1 == 0 || n2 == 0) {
    throw std::invalid_argument("imbalance_beta needs positive class counts");
  }
  const auto [lo, hi] = std::minmax(n1, n2);
  const double m = static_cast<double>(hi) / static_cast<double>(lo);
  return std::exp(-std::log(m) / 4.0);
}

PopulationFactor build_factor(const LabeledMatrix& data, const ClassStats& stats) {
  const auto n = data.rows();
  PopulationFactor f;
  f.n1 = stats.n1;
  f.n2 = stats.n2;
  f.beta = imbalance_beta(stats.n1, stats.n2);
  f.d.resize(n + 1, data.dim());
  f.ltau.resize(n + 1);
  f.order.reserve(static_cast<std::size_t>(n));

  const auto& labels = data.labels();
  Eigen::Index r = 0;
  for (const int cls : {1, -1}) {
    const Eigen::VectorXd& mean = cls == 1 ? stats.u1 : stats.u2;
    const double weight = 1.0 / static_cast<double>(cls == 1 ? stats.n1 : stats.n2);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (labels[static_cast<std::size_t>(i)] != cls) {
        continue;
      }
      f.d.row(r) = data.samples().row(i) - mean.transpose();
      f.ltau[r] = weight;
      f.order.push_back(static_cast<std::size_t>(i));
      ++r;
    }
  }
  f.d.row(n) = (stats.u1 - stats.u2).transpose();
  f.ltau[n] = f.beta;
  return f;
}

Eigen::MatrixXd dense_scatter(const LabeledMatrix& data, const ClassStats& stats) {
  const auto d = data.dim();
  Eigen::MatrixXd within = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    const bool positive = data.labels()[static_cast<std::size_t>(i)] == 1;
    const Eigen::VectorXd dev =
        data.samples().row(i).transpose() - (positive ? stats.u1 : stats.u2);
    const Eigen::MatrixXd outer = dev * dev.transpose();
    within += outer / static_cast<double>(positive ? stats.n1 : stats.n2);
  }
  const Eigen::VectorXd diff = stats.u1 - stats.u2;
  const Eigen::MatrixXd between = diff * diff.transpose();
  return imbalance_beta(stats.n1, stats.n2) * between + within;
}

} // namespace psc

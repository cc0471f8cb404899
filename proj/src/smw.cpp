#include "psc/smw.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace psc {
namespace {

void check_psd(const Eigen::MatrixXd& g) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("eigen decomposition of the dual Gram failed");
  }
  const auto& values = eig.eigenvalues();
  const double scale = values.cwiseAbs().maxCoeff();
  if (values.minCoeff() < -1e-8 * scale) {
    throw std::runtime_error("dual Gram is not positive semidefinite (min eigenvalue " +
                             std::to_string(values.minCoeff()) +
                             "); lambda too large or numerical breakdown");
  }
}

} // namespace

double lambda_cap(const PopulationFactor& factor) {
  const Eigen::VectorXd root = factor.ltau.cwiseSqrt();
  const Eigen::MatrixXd scaled = root.asDiagonal() * (factor.d * factor.d.transpose()) *
                                 root.asDiagonal();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(scaled, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("eigen decomposition of the population factor failed");
  }
  const double top = eig.eigenvalues().maxCoeff();
  if (!(top > 0.0)) {
    return std::numeric_limits<double>::infinity();
  }
  return 1.0 / top;
}

SmwOperator::SmwOperator(std::shared_ptr<const PopulationFactor> factor, double lambda)
    : factor_(std::move(factor)), lambda_(lambda) {
  if (!factor_) {
    throw std::invalid_argument("SmwOperator needs a factor");
  }
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("lambda must be positive and finite");
  }
  Eigen::MatrixXd b = factor_->d * factor_->d.transpose();
  b.diagonal() -= (lambda * factor_->ltau).cwiseInverse();
  middle_.compute(b);

  const double norm = b.cwiseAbs().rowwise().sum().maxCoeff();
  const double smallest_pivot = middle_.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (!(smallest_pivot > 1e-12 * norm)) {
    throw std::runtime_error("Woodbury middle matrix is singular; lambda is at or near an "
                             "eigenvalue reciprocal of the scatter");
  }
}

Eigen::MatrixXd SmwOperator::solve_middle(const Eigen::MatrixXd& r) const {
  if (r.rows() != factor_->rank_bound()) {
    throw std::invalid_argument("solve_middle: row count mismatch");
  }
  return middle_.solve(r);
}

Eigen::MatrixXd SmwOperator::apply_inverse(const Eigen::MatrixXd& v) const {
  if (v.rows() != dim()) {
    throw std::invalid_argument("apply_inverse: expected " + std::to_string(dim()) +
                                " rows, got " + std::to_string(v.rows()));
  }
  const Eigen::MatrixXd projected = factor_->d * v;
  return v - factor_->d.transpose() * middle_.solve(projected);
}

Eigen::VectorXd SmwOperator::apply_inverse(const Eigen::VectorXd& v) const {
  if (v.size() != dim()) {
    throw std::invalid_argument("apply_inverse: expected length " + std::to_string(dim()) +
                                ", got " + std::to_string(v.size()));
  }
  const Eigen::VectorXd projected = factor_->d * v;
  return v - factor_->d.transpose() * middle_.solve(projected);
}

SmwOperator build_operator(std::shared_ptr<const PopulationFactor> factor, double lambda) {
  if (!factor) {
    throw std::invalid_argument("build_operator needs a factor");
  }
  const double cap = lambda_cap(*factor);
  if (!(lambda > 0.0) || !(lambda < cap)) {
    throw std::invalid_argument("lambda " + std::to_string(lambda) + " outside (0, " +
                                std::to_string(cap) + ")");
  }
  return SmwOperator(std::move(factor), lambda);
}

SampleProducts sample_products(const PopulationFactor& factor, const Eigen::MatrixXd& samples) {
  if (samples.cols() != factor.dim()) {
    throw std::invalid_argument("sample_products: dimension mismatch");
  }
  SampleProducts p;
  p.xxt = samples * samples.transpose();
  p.xdt = samples * factor.d.transpose();
  return p;
}

Eigen::MatrixXd gram(const SmwOperator& op, const SampleProducts& products,
                     const Eigen::VectorXd& y) {
  const auto n = products.xxt.rows();
  if (products.xxt.cols() != n || products.xdt.rows() != n || y.size() != n ||
      products.xdt.cols() != op.factor().rank_bound()) {
    throw std::invalid_argument("gram: shape mismatch");
  }
  const Eigen::MatrixXd correction =
      products.xdt * op.solve_middle(products.xdt.transpose());
  Eigen::MatrixXd g = y.asDiagonal() * (products.xxt - correction) * y.asDiagonal();
  g = (0.5 * (g + g.transpose())).eval();
  check_psd(g);
  return g;
}

Eigen::MatrixXd gram(const SmwOperator& op, const LabeledMatrix& data) {
  return gram(op, sample_products(op.factor(), data.samples()), data.label_vector());
}

} // namespace psc

#pragma once

#include "psc/dataset.hpp"
#include "psc/scatter.hpp"

#include <Eigen/Dense>

#include <memory>
#include <span>

namespace psc {

/// Largest admissible lambda: 1 / lambda_max(beta*S_B + S_W).
///
/// lambda_max is taken from the (n+1) x (n+1) matrix sqrt(Lt) D D^T sqrt(Lt),
/// which shares its nonzero spectrum with the d x d scatter. Returns +inf when
/// the scatter vanishes.
double lambda_cap(const PopulationFactor& factor);

/// M = [I - lambda (beta*S_B + S_W)]^-1 applied through the Woodbury identity:
///   M = I - D^T B^-1 D,   B = (-lambda Lt)^-1 + D D^T.
/// B is (n+1) x (n+1) and LU-factored once at construction. Nothing d x d is
/// ever formed.
class SmwOperator {
public:
  SmwOperator(std::shared_ptr<const PopulationFactor> factor, double lambda);

  /// M V for a d x k block.
  Eigen::MatrixXd apply_inverse(const Eigen::MatrixXd& v) const;
  Eigen::VectorXd apply_inverse(const Eigen::VectorXd& v) const;

  /// B^-1 R for an (n+1) x k block.
  Eigen::MatrixXd solve_middle(const Eigen::MatrixXd& r) const;

  double lambda() const { return lambda_; }
  Eigen::Index dim() const { return factor_->dim(); }
  const PopulationFactor& factor() const { return *factor_; }

private:
  std::shared_ptr<const PopulationFactor> factor_;
  double lambda_;
  Eigen::PartialPivLU<Eigen::MatrixXd> middle_;
};

/// Throws unless 0 < lambda < lambda_cap(factor), or if B is numerically singular.
SmwOperator build_operator(std::shared_ptr<const PopulationFactor> factor, double lambda);

/// The n x n inner products needed by the dual: X X^T and X D^T.
struct SampleProducts {
  Eigen::MatrixXd xxt;
  Eigen::MatrixXd xdt;
};

SampleProducts sample_products(const PopulationFactor& factor, const Eigen::MatrixXd& samples);

/// Dual Gram G = Y X M X^T Y = Y [X X^T - (X D^T) B^-1 (X D^T)^T] Y, symmetrized.
/// Throws if the smallest eigenvalue falls below -1e-8 ||G||.
Eigen::MatrixXd gram(const SmwOperator& op, const LabeledMatrix& data);
Eigen::MatrixXd gram(const SmwOperator& op, const SampleProducts& products,
                     const Eigen::VectorXd& y);

} // namespace psc

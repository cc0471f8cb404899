#pragma once

#include "psc/dataset.hpp"
#include "psc/qp.hpp"
#include "psc/scatter.hpp"
#include "psc/smw.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace psc {

enum class Method { psc, cssvm, rmdd, bayes };

std::string_view to_string(Method method);
Method parse_method(std::string_view name);

struct Hyperparams {
  double gamma = 0.5; // lambda = gamma * lambda_cap
  double c0 = 1.0;
  double r_scale = 2.0;
  double tol = 1e-6;
  std::int64_t max_iter = 10'000'000;

  void validate() const;
};

/// Trained linear rule: decision(x) = w^T x + b, predict = +1 iff decision >= 0.
struct LinearModel {
  Method method = Method::psc;
  Eigen::VectorXd w;
  double b = 0.0;

  std::size_t n1 = 0;
  std::size_t n2 = 0;
  double gamma = 0.0;
  double lambda = 0.0;
  double c0 = 0.0;
  double r_scale = 2.0;
  bool converged = true;
  double kkt_residual = 0.0;
  std::int64_t iterations = 0;
  std::optional<std::uint64_t> seed_provenance;

  Eigen::Index dim() const { return w.size(); }
};

double decision(const LinearModel& model, const Eigen::VectorXd& x);
int predict(const LinearModel& model, const Eigen::VectorXd& x);
Eigen::VectorXd decisions(const LinearModel& model, const Eigen::MatrixXd& samples);

/// Slack caps C0 * W(y): 1 for class +1, n1/n2 for class -1.
Eigen::VectorXd slack_caps(const std::vector<int>& labels, std::size_t n1, std::size_t n2,
                           double c0);

/// Everything in a PSC fit that depends on the training data alone.
///
/// Hyperparameter sweeps build one of these, then one PscDual per gamma and
/// one fit per c0 on top of it.
class PscProblem {
public:
  explicit PscProblem(const LabeledMatrix& data);

  const LabeledMatrix& data() const { return data_; }
  const ClassStats& stats() const { return stats_; }
  const PopulationFactor& factor() const { return *factor_; }
  double lambda_cap() const { return cap_; }

  struct Dual {
    double gamma;
    SmwOperator op;
    Eigen::MatrixXd gram;
  };

  /// Woodbury operator at lambda = gamma * lambda_cap and its dual Gram.
  Dual dual(double gamma) const;

  LinearModel fit(const Dual& dual, const Hyperparams& hp) const;
  LinearModel fit(const Hyperparams& hp) const { return fit(dual(hp.gamma), hp); }

private:
  LabeledMatrix data_;
  ClassStats stats_;
  std::shared_ptr<const PopulationFactor> factor_;
  double cap_;
  SampleProducts products_;
};

/// Population-scatter regularized max-margin classifier with the
/// imbalance-adaptive intercept. If the QP stops at max_iter the model is
/// still returned with converged = false.
LinearModel fit_psc(const LabeledMatrix& data, const Hyperparams& hp);

/// Cost-sensitive soft-margin SVM with the same class weights, cached X X^T.
class CssvmProblem {
public:
  explicit CssvmProblem(const LabeledMatrix& data);
  LinearModel fit(double c0, double tol, std::int64_t max_iter, double r_scale = 2.0) const;

private:
  LabeledMatrix data_;
  ClassStats stats_;
  Eigen::MatrixXd gram_;
};

/// b is averaged over free support vectors (0 < a_i < cap); with none, it
/// falls back to choose_intercept on the training projections.
LinearModel fit_cssvm(const LabeledMatrix& data, double c0, double tol = 1e-6,
                      std::int64_t max_iter = 10'000'000, double r_scale = 2.0);

/// Unit mean-difference direction (u1 - u2) / |u1 - u2| with choose_intercept.
LinearModel fit_rmdd(const LabeledMatrix& data, double r_scale = 2.0);

/// Bayes rule for two Gaussians sharing sigma:
/// w = sigma^-1 (mu_pos - mu_neg), b = -1/2 w^T (mu_pos + mu_neg).
LinearModel bayes_oracle(const Eigen::VectorXd& mu_pos, const Eigen::VectorXd& mu_neg,
                         const Eigen::MatrixXd& sigma);

} // namespace psc

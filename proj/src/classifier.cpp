#include "psc/classifier.hpp"

#include "psc/intercept.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace psc {
namespace {

Eigen::VectorXd recover_primal(const LabeledMatrix& data, const Eigen::VectorXd& alpha) {
  return data.samples().transpose() * data.label_vector().cwiseProduct(alpha);
}

void check_direction(const Eigen::VectorXd& w) {
  if (!w.allFinite()) {
    throw std::runtime_error("fitted direction has non-finite entries");
  }
  if (w.cwiseAbs().maxCoeff() == 0.0) {
    throw std::runtime_error("fitted direction is identically zero");
  }
}

} // namespace

std::string_view to_string(Method method) {
  switch (method) {
  case Method::psc:
    return "psc";
  case Method::cssvm:
    return "cssvm";
  case Method::rmdd:
    return "rmdd";
  case Method::bayes:
    return "bayes";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "psc") {
    return Method::psc;
  }
  if (name == "cssvm") {
    return Method::cssvm;
  }
  if (name == "rmdd") {
    return Method::rmdd;
  }
  if (name == "bayes") {
    return Method::bayes;
  }
  throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

void Hyperparams::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("gamma must lie in (0, 1)");
  }
  if (!(c0 > 0.0) || !std::isfinite(c0)) {
    throw std::invalid_argument("c0 must be positive");
  }
  if (!(r_scale > 0.0) || !std::isfinite(r_scale)) {
    throw std::invalid_argument("r_scale must be positive");
  }
  if (!(tol > 0.0)) {
    throw std::invalid_argument("tol must be positive");
  }
  if (max_iter < 1) {
    throw std::invalid_argument("max_iter must be at least 1");
  }
}

double decision(const LinearModel& model, const Eigen::VectorXd& x) {
  if (x.size() != model.w.size()) {
    throw std::invalid_argument("decision: model has dimension " +
                                std::to_string(model.w.size()) + ", sample has " +
                                std::to_string(x.size()));
  }
  return model.w.dot(x) + model.b;
}

int predict(const LinearModel& model, const Eigen::VectorXd& x) {
  return decision(model, x) >= 0.0 ? 1 : -1;
}

Eigen::VectorXd decisions(const LinearModel& model, const Eigen::MatrixXd& samples) {
  if (samples.cols() != model.w.size()) {
    throw std::invalid_argument("decisions: model has dimension " +
                                std::to_string(model.w.size()) + ", samples have " +
                                std::to_string(samples.cols()));
  }
  return (samples * model.w).array() + model.b;
}

Eigen::VectorXd slack_caps(const std::vector<int>& labels, std::size_t n1, std::size_t n2,
                           double c0) {
  const double negative_weight = static_cast<double>(n1) / static_cast<double>(n2);
  Eigen::VectorXd caps(static_cast<Eigen::Index>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    caps[static_cast<Eigen::Index>(i)] = labels[i] == 1 ? c0 : c0 * negative_weight;
  }
  return caps;
}

PscProblem::PscProblem(const LabeledMatrix& data)
    : data_(data), stats_(class_stats(data_)),
      factor_(std::make_shared<const PopulationFactor>(build_factor(data_, stats_))),
      cap_(psc::lambda_cap(*factor_)), products_(sample_products(*factor_, data_.samples())) {}

PscProblem::Dual PscProblem::dual(double gamma) const {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("gamma must lie in (0, 1)");
  }
  // A vanishing scatter leaves M = I for any lambda; keep lambda finite.
  const double lambda = std::isfinite(cap_) ? gamma * cap_ : gamma;
  SmwOperator op(factor_, lambda);
  Eigen::MatrixXd g = gram(op, products_, data_.label_vector());
  return Dual{gamma, std::move(op), std::move(g)};
}

LinearModel PscProblem::fit(const Dual& dual, const Hyperparams& hp) const {
  hp.validate();
  BoxQP qp{dual.gram, data_.label_vector(),
           slack_caps(data_.labels(), stats_.n1, stats_.n2, hp.c0)};
  const DualSolution sol = solve_smo(qp, SmoOptions{hp.tol, hp.max_iter, false});
  if (sol.alpha.cwiseAbs().maxCoeff() == 0.0) {
    throw std::runtime_error("trivial dual: all multipliers are zero");
  }

  LinearModel model;
  model.method = Method::psc;
  model.w = dual.op.apply_inverse(recover_primal(data_, sol.alpha));
  check_direction(model.w);
  model.b = choose_intercept(project(data_.samples(), data_.labels(), model.w), hp.r_scale);
  model.n1 = stats_.n1;
  model.n2 = stats_.n2;
  model.gamma = dual.gamma;
  model.lambda = dual.op.lambda();
  model.c0 = hp.c0;
  model.r_scale = hp.r_scale;
  model.converged = sol.converged;
  model.kkt_residual = sol.kkt_residual;
  model.iterations = sol.iterations;
  return model;
}

LinearModel fit_psc(const LabeledMatrix& data, const Hyperparams& hp) {
  hp.validate();
  return PscProblem(data).fit(hp);
}

CssvmProblem::CssvmProblem(const LabeledMatrix& data)
    : data_(data), stats_(class_stats(data_)) {
  const Eigen::VectorXd y = data_.label_vector();
  gram_ = y.asDiagonal() * (data_.samples() * data_.samples().transpose()) * y.asDiagonal();
  gram_ = (0.5 * (gram_ + gram_.transpose())).eval();
}

LinearModel CssvmProblem::fit(double c0, double tol, std::int64_t max_iter,
                              double r_scale) const {
  if (!(c0 > 0.0) || !std::isfinite(c0)) {
    throw std::invalid_argument("c0 must be positive");
  }
  const Eigen::VectorXd y = data_.label_vector();
  const Eigen::VectorXd caps = slack_caps(data_.labels(), stats_.n1, stats_.n2, c0);
  BoxQP qp{gram_, y, caps};
  const DualSolution sol = solve_smo(qp, SmoOptions{tol, max_iter, false});
  if (sol.alpha.cwiseAbs().maxCoeff() == 0.0) {
    throw std::runtime_error("trivial dual: all multipliers are zero");
  }

  LinearModel model;
  model.method = Method::cssvm;
  model.w = recover_primal(data_, sol.alpha);
  check_direction(model.w);

  const Eigen::VectorXd scores = data_.samples() * model.w;
  double sum = 0.0;
  std::size_t free_count = 0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (sol.alpha[i] > 0.0 && sol.alpha[i] < caps[i]) {
      sum += y[i] - scores[i];
      ++free_count;
    }
  }
  model.b = free_count > 0
                ? sum / static_cast<double>(free_count)
                : choose_intercept(project(data_.samples(), data_.labels(), model.w), r_scale);
  model.n1 = stats_.n1;
  model.n2 = stats_.n2;
  model.c0 = c0;
  model.r_scale = r_scale;
  model.converged = sol.converged;
  model.kkt_residual = sol.kkt_residual;
  model.iterations = sol.iterations;
  return model;
}

LinearModel fit_cssvm(const LabeledMatrix& data, double c0, double tol, std::int64_t max_iter,
                      double r_scale) {
  return CssvmProblem(data).fit(c0, tol, max_iter, r_scale);
}

LinearModel fit_rmdd(const LabeledMatrix& data, double r_scale) {
  const ClassStats stats = class_stats(data);
  const Eigen::VectorXd diff = stats.u1 - stats.u2;
  const double norm = diff.norm();
  if (!(norm > 0.0)) {
    throw std::runtime_error("class means coincide; mean difference direction is zero");
  }
  LinearModel model;
  model.method = Method::rmdd;
  model.w = diff / norm;
  model.b = choose_intercept(project(data.samples(), data.labels(), model.w), r_scale);
  model.n1 = stats.n1;
  model.n2 = stats.n2;
  model.r_scale = r_scale;
  return model;
}

LinearModel bayes_oracle(const Eigen::VectorXd& mu_pos, const Eigen::VectorXd& mu_neg,
                         const Eigen::MatrixXd& sigma) {
  if (mu_pos.size() != mu_neg.size() || sigma.rows() != mu_pos.size() ||
      sigma.cols() != mu_pos.size()) {
    throw std::invalid_argument("bayes_oracle: dimension mismatch");
  }
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() >
      1e-12 * std::max(1.0, sigma.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("bayes_oracle: sigma is not symmetric");
  }
  const Eigen::LLT<Eigen::MatrixXd> chol(sigma);
  if (chol.info() != Eigen::Success) {
    throw std::invalid_argument("bayes_oracle: sigma is not positive definite");
  }
  LinearModel model;
  model.method = Method::bayes;
  model.w = chol.solve(mu_pos - mu_neg);
  model.b = -0.5 * model.w.dot(mu_pos + mu_neg) + 0.0;  // no negative zero
  return model;
}

} // namespace psc

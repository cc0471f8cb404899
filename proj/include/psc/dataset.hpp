#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace psc {

/// n x d sample matrix with +1/-1 labels.
///
/// Construction validates the invariants every downstream module relies on:
/// at least two rows, both classes present, labels strictly +1/-1, no NaN or
/// Inf, and (if given) one feature name per column. Immutable afterwards.
class LabeledMatrix {
public:
  LabeledMatrix(Eigen::MatrixXd samples, std::vector<int> labels,
                std::vector<std::string> feature_names = {});

  const Eigen::MatrixXd& samples() const { return samples_; }
  const std::vector<int>& labels() const { return labels_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }

  Eigen::Index rows() const { return samples_.rows(); }
  Eigen::Index dim() const { return samples_.cols(); }
  std::size_t count(int label) const;

  /// Labels as a +1.0/-1.0 vector (the diagonal of Y).
  Eigen::VectorXd label_vector() const;

  /// New matrix made of the given rows, in the given order.
  LabeledMatrix subset(std::span<const std::size_t> rows) const;

private:
  Eigen::MatrixXd samples_;
  std::vector<int> labels_;
  std::vector<std::string> feature_names_;
};

struct ClassStats {
  Eigen::VectorXd u1; // mean of class +1
  Eigen::VectorXd u2; // mean of class -1
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  double m = 1.0; // imbalance factor, max(n1,n2)/min(n1,n2)
};

ClassStats class_stats(const LabeledMatrix& data);

/// Stratified assignment of samples to k folds.
struct FoldPlan {
  int k = 0;
  std::vector<int> assignments; // fold index per sample
  std::uint64_t seed = 0;

  std::vector<std::size_t> test_indices(int fold) const;
  std::vector<std::size_t> train_indices(int fold) const;
};

/// Each class is shuffled independently (Rng seeded with `seed`; the +1 class
/// is shuffled first), then dealt round-robin starting at fold 0. Throws if a
/// class has fewer than k members.
FoldPlan stratified_kfold(std::span<const int> labels, int k, std::uint64_t seed);

/// Scale of the simulated class means: c with 2c * sqrt(d) = 2.7.
double hdlss_mean_scale(Eigen::Index d);

/// Classes N(+c 1_d, I) and N(-c 1_d, I). Rows are emitted positives first;
/// each row is d consecutive Rng::normal() draws.
LabeledMatrix simulate_hdlss(Eigen::Index d, std::size_t n_pos, std::size_t n_neg,
                             std::uint64_t seed);

/// Two-dimensional illustration set: N(+mu, S) vs N(-mu, S) with
/// mu = (1, 2.5), S = [[1.5, 0.5], [0.5, 1.5]]. Samples are mu + L z with L
/// the lower Cholesky factor of S.
LabeledMatrix simulate_fig1(std::size_t n_pos, std::size_t n_neg, std::uint64_t seed);

Eigen::Vector2d fig1_mean();
Eigen::Matrix2d fig1_covariance();

} // namespace psc

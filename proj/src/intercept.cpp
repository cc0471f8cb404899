#include "psc/intercept.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace psc {

Projections::Projections(std::vector<double> pos_values, std::vector<double> neg_values)
    : pos(std::move(pos_values)), neg(std::move(neg_values)), n_pos(pos.size()),
      n_neg(neg.size()) {}

Projections::Projections(std::vector<double> pos_values, std::vector<double> neg_values,
                         std::size_t pos_count, std::size_t neg_count)
    : pos(std::move(pos_values)), neg(std::move(neg_values)), n_pos(pos_count),
      n_neg(neg_count) {}

Projections project(const Eigen::MatrixXd& samples, const std::vector<int>& labels,
                    const Eigen::VectorXd& w) {
  const Eigen::VectorXd scores = samples * w;
  std::vector<double> pos;
  std::vector<double> neg;
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    (labels[static_cast<std::size_t>(i)] == 1 ? pos : neg).push_back(scores[i]);
  }
  return Projections(std::move(pos), std::move(neg));
}

bool is_separable(const Projections& p) {
  if (p.pos.empty() || p.neg.empty()) {
    return false;
  }
  return *std::min_element(p.pos.begin(), p.pos.end()) >
         *std::max_element(p.neg.begin(), p.neg.end());
}

double gap_intercept(const Projections& p, double r_scale) {
  if (!(r_scale > 0.0)) {
    throw std::invalid_argument("gap_intercept: R must be positive");
  }
  if (!is_separable(p)) {
    throw std::invalid_argument("gap_intercept: projections are not separable");
  }
  if (p.n_pos == 0 || p.n_neg == 0) {
    throw std::invalid_argument("gap_intercept: class counts must be positive");
  }
  const double min_pos = *std::min_element(p.pos.begin(), p.pos.end());
  const double max_neg = *std::max_element(p.neg.begin(), p.neg.end());
  const double gap = min_pos - max_neg;
  const double n_pos = static_cast<double>(p.n_pos);
  const double n_neg = static_cast<double>(p.n_neg);

  // ratio = b_minus / b_plus; the smaller class always gets the wider side.
  const double ratio = p.n_neg >= p.n_pos
                           ? std::exp(-std::log(n_neg / n_pos) / (2.0 * r_scale))
                           : std::exp(std::log(n_pos / n_neg) / (2.0 * r_scale));
  const double b_plus = gap / (1.0 + ratio);
  return b_plus - min_pos;
}

double min_misclass_intercept(const Projections& p) {
  if (p.pos.empty() || p.neg.empty()) {
    throw std::invalid_argument("min_misclass_intercept needs both classes");
  }
  struct Point {
    double value;
    int label;
  };
  std::vector<Point> points;
  points.reserve(p.pos.size() + p.neg.size());
  for (const double v : p.pos) {
    points.push_back({v, 1});
  }
  for (const double v : p.neg) {
    points.push_back({v, -1});
  }
  std::sort(points.begin(), points.end(),
            [](const Point& a, const Point& b) { return a.value < b.value; });

  // Distinct values with the class counts sitting on each.
  struct Level {
    double value;
    std::size_t pos = 0;
    std::size_t neg = 0;
  };
  std::vector<Level> levels;
  for (const auto& pt : points) {
    if (levels.empty() || levels.back().value != pt.value) {
      levels.push_back({pt.value});
    }
    (pt.label == 1 ? levels.back().pos : levels.back().neg) += 1;
  }

  double widest = 0.0;
  for (std::size_t l = 1; l < levels.size(); ++l) {
    widest = std::max(widest, levels[l].value - levels[l - 1].value);
  }
  const double margin = levels.size() > 1 ? widest / 2.0 : 0.5;

  const std::size_t total_pos = p.pos.size();
  const std::size_t total_neg = p.neg.size();
  // +1: positives are the smaller class, -1: negatives, 0: equal sizes.
  const int minority = total_pos < total_neg ? 1 : (total_neg < total_pos ? -1 : 0);

  struct Candidate {
    double threshold;
    double gap;
    std::size_t errors;
    double minority_recall;
  };
  const auto better = [](const Candidate& a, const Candidate& b) {
    if (a.errors != b.errors) {
      return a.errors < b.errors;
    }
    if (a.gap != b.gap) {
      return a.gap > b.gap;
    }
    if (a.minority_recall != b.minority_recall) {
      return a.minority_recall > b.minority_recall;
    }
    return std::abs(a.threshold) < std::abs(b.threshold);
  };

  // A threshold t between levels l-1 and l predicts +1 for levels >= l. Points
  // never sit exactly on a candidate threshold, so the sgn(0) convention only
  // matters for the returned boundary itself.
  std::size_t neg_below = 0; // negatives at levels < l (correct)
  std::size_t pos_below = 0; // positives at levels < l (wrong)
  Candidate best{};
  bool have_best = false;
  for (std::size_t l = 0; l <= levels.size(); ++l) {
    Candidate c{};
    if (l == 0) {
      c.threshold = levels.front().value - margin;
      c.gap = std::numeric_limits<double>::infinity();
    } else if (l == levels.size()) {
      c.threshold = levels.back().value + margin;
      c.gap = std::numeric_limits<double>::infinity();
    } else {
      c.threshold = levels[l - 1].value + (levels[l].value - levels[l - 1].value) / 2.0;
      c.gap = levels[l].value - levels[l - 1].value;
    }
    const std::size_t pos_wrong = pos_below;
    const std::size_t neg_wrong = total_neg - neg_below;
    c.errors = pos_wrong + neg_wrong;
    if (minority == 1) {
      c.minority_recall = static_cast<double>(total_pos - pos_wrong) / total_pos;
    } else if (minority == -1) {
      c.minority_recall = static_cast<double>(total_neg - neg_wrong) / total_neg;
    }
    if (!have_best || better(c, best)) {
      best = c;
      have_best = true;
    }
    if (l < levels.size()) {
      pos_below += levels[l].pos;
      neg_below += levels[l].neg;
    }
  }
  // Boundary proj + b = 0 sits at the threshold.
  return -best.threshold;
}

double choose_intercept(const Projections& p, double r_scale) {
  return is_separable(p) ? gap_intercept(p, r_scale) : min_misclass_intercept(p);
}

} // namespace psc

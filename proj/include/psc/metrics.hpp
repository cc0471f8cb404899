#pragma once

#include <Eigen/Dense>

#include <json.hpp>

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace psc {

/// Class +1 rows: tp right, fn wrong. Class -1 rows: tn right, fp wrong.
struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fn = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;

  std::size_t positives() const { return tp + fn; }
  std::size_t negatives() const { return tn + fp; }
  std::size_t total() const { return positives() + negatives(); }

  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  bool operator==(const ConfusionMatrix&) const = default;
};

struct RocPoint {
  double fpr;
  double tpr;
};

struct EvalReport {
  ConfusionMatrix confusion;
  double ccr1 = 0.0;
  double ccr2 = 0.0;
  double total_ccr = 0.0;
  double mwe = 0.0;
  double bccr = 0.0;
  /// Absent when only one class is present in the labels.
  std::optional<std::vector<RocPoint>> roc;
  std::optional<double> auc;
};

/// ((c1 + c2) / 2) * exp(-(c1 - c2)^2 / 2). Inputs must lie in [0, 1].
double bccr(double ccr1, double ccr2);

/// 1 - (c1 + c2) / 2. Inputs must lie in [0, 1].
double mwe(double ccr1, double ccr2);

/// Scalar metrics from counts. A class with no rows gets NaN for its CCR and
/// for MWE/BCCR.
EvalReport report_from_confusion(const ConfusionMatrix& confusion);

/// Predictions use decision >= 0 -> +1. The ROC sweeps every distinct
/// decision value from high to low (tied values enter together) and the AUC is
/// the trapezoid area under it.
EvalReport evaluate(std::span<const int> labels, std::span<const double> decisions);

/// ROC points from (0,0) to (1,1); requires both classes.
std::vector<RocPoint> roc_curve(std::span<const int> labels, std::span<const double> decisions);
double trapezoid_auc(const std::vector<RocPoint>& roc);

nlohmann::json report_to_json(const EvalReport& report);

/// Two columns, header "fpr,tpr".
void write_roc_csv(const std::filesystem::path& path, const std::vector<RocPoint>& roc);

} // namespace psc

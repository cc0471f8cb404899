#pragma once

#include "psc/classifier.hpp"
#include "psc/dataset.hpp"
#include "psc/metrics.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace psc {

enum class SelectionMetric { bccr, total_ccr, mwe };

std::string_view to_string(SelectionMetric metric);
SelectionMetric parse_selection_metric(std::string_view name);

/// Higher is better: bccr, total_ccr, or 1 - mwe.
double selection_score(const EvalReport& report, SelectionMetric metric);

struct SimulatorSpec {
  std::string kind = "hdlss"; // "hdlss" or "fig1"
  Eigen::Index d = 50;
  std::size_t n_pos = 100;
  std::size_t n_neg = 10;
};

struct DatasetSource {
  std::string csv_path;
  std::string label_column = "label";
  std::set<std::string> positive_labels{"1"};
  std::optional<SimulatorSpec> simulator;
};

std::vector<double> default_gamma_grid();
std::vector<double> default_c0_grid();

struct ExperimentConfig {
  DatasetSource source;
  Method method = Method::psc;
  std::vector<double> gamma_grid = default_gamma_grid();
  std::vector<double> c0_grid = default_c0_grid();
  double r_scale = 2.0;
  double tol = 1e-6;
  std::int64_t max_iter = 10'000'000;
  int outer_folds = 5;
  int inner_folds = 4;
  int repeats = 18;
  SelectionMetric selection_metric = SelectionMetric::bccr;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Reads the CSV, or draws the simulated set with the config seed.
LabeledMatrix load_source(const ExperimentConfig& config);

struct GridPoint {
  double gamma = 0.0; // unused by cssvm and rmdd
  double c0 = 0.0;    // unused by rmdd
};

/// Fits one model of the configured method at a grid point.
LinearModel fit_method(const LabeledMatrix& train, const ExperimentConfig& config,
                       const GridPoint& point);

struct TunedModel {
  LinearModel model;
  GridPoint chosen;
  double inner_score = 0.0;
};

/// Inner stratified k-fold grid search on `train`, then a refit of the winner
/// on all of `train`. The score of a grid point is the mean selection metric
/// over the inner folds; ties go to the smaller c0, then the smaller gamma.
TunedModel tune_and_fit(const LabeledMatrix& train, const ExperimentConfig& config,
                        std::uint64_t seed);

/// Same, reading only the `train` rows of a larger matrix.
TunedModel tune_and_fit(const Eigen::MatrixXd& samples, std::span<const int> labels,
                        std::span<const std::size_t> train, const ExperimentConfig& config,
                        std::uint64_t seed);

struct FoldResult {
  int repeat = 0;
  int fold = 0;
  std::vector<std::size_t> test_indices;
  std::vector<double> decisions; // aligned with test_indices
  std::optional<TunedModel> tuned;
  std::optional<EvalReport> report;
  std::string error;
};

struct RepeatResult {
  int repeat = 0;
  std::uint64_t seed = 0;
  EvalReport pooled;
  std::size_t failed_folds = 0;
};

struct MetricSummary {
  double mean = 0.0;
  double std = 0.0;
};

struct CvSummary {
  MetricSummary ccr1, ccr2, total_ccr, mwe, bccr, auc;
  EvalReport pooled; // all repeats' test decisions together
  std::size_t failed_folds = 0;
};

struct CvResult {
  std::vector<FoldResult> folds;
  std::vector<RepeatResult> repeats;
  CvSummary summary;
};

/// Repeated stratified outer k-fold with inner tuning. Repeat r uses outer seed
/// config.seed + r; fit errors are recorded on the fold and the run continues.
CvResult cv_run(const ExperimentConfig& config, const LabeledMatrix& data);
CvResult cv_run(const ExperimentConfig& config);

nlohmann::json config_to_json(const ExperimentConfig& config);
nlohmann::json cv_to_json(const CvResult& result);
nlohmann::json summary_to_json(const CvSummary& summary);

/// cv_report.json, summary.json and roc.csv (pooled ROC) in `out_dir`.
void write_cv_outputs(const ExperimentConfig& config, const CvResult& result,
                      const std::filesystem::path& out_dir);

} // namespace psc

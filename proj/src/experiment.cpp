#include "psc/experiment.hpp"

#include "psc/csv.hpp"
#include "psc/model_io.hpp"
#include "psc/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace psc {
namespace {

std::vector<GridPoint> effective_grid(const ExperimentConfig& config) {
  std::vector<double> c0s = config.c0_grid;
  std::vector<double> gammas = config.gamma_grid;
  std::sort(c0s.begin(), c0s.end());
  std::sort(gammas.begin(), gammas.end());
  c0s.erase(std::unique(c0s.begin(), c0s.end()), c0s.end());
  gammas.erase(std::unique(gammas.begin(), gammas.end()), gammas.end());

  std::vector<GridPoint> grid;
  switch (config.method) {
  case Method::psc:
    for (const double c0 : c0s) {
      for (const double gamma : gammas) {
        grid.push_back({gamma, c0});
      }
    }
    break;
  case Method::cssvm:
    for (const double c0 : c0s) {
      grid.push_back({0.0, c0});
    }
    break;
  default:
    grid.push_back({0.0, 0.0});
    break;
  }
  return grid;
}

Hyperparams hyperparams_at(const ExperimentConfig& config, const GridPoint& point) {
  Hyperparams hp;
  hp.gamma = point.gamma;
  hp.c0 = point.c0;
  hp.r_scale = config.r_scale;
  hp.tol = config.tol;
  hp.max_iter = config.max_iter;
  return hp;
}

// Scores every grid point on one inner split; failed fits score -inf.
std::vector<double> score_split(const LabeledMatrix& fit_rows, const LabeledMatrix& val_rows,
                                const ExperimentConfig& config,
                                const std::vector<GridPoint>& grid) {
  std::vector<double> scores(grid.size(), -std::numeric_limits<double>::infinity());
  const auto score_model = [&](const LinearModel& model) {
    const Eigen::VectorXd dec = decisions(model, val_rows.samples());
    const EvalReport report = evaluate(val_rows.labels(), {dec.data(), static_cast<std::size_t>(dec.size())});
    return selection_score(report, config.selection_metric);
  };

  if (config.method == Method::psc) {
    const PscProblem problem(fit_rows);
    // Grid is ordered by c0 then gamma; build each gamma's dual once.
    std::vector<double> gammas;
    for (const auto& p : grid) {
      if (std::find(gammas.begin(), gammas.end(), p.gamma) == gammas.end()) {
        gammas.push_back(p.gamma);
      }
    }
    for (const double gamma : gammas) {
      std::optional<PscProblem::Dual> dual;
      try {
        dual.emplace(problem.dual(gamma));
      } catch (const std::exception&) {
        continue;
      }
      for (std::size_t g = 0; g < grid.size(); ++g) {
        if (grid[g].gamma != gamma) {
          continue;
        }
        try {
          scores[g] = score_model(problem.fit(*dual, hyperparams_at(config, grid[g])));
        } catch (const std::exception&) {
        }
      }
    }
  } else if (config.method == Method::cssvm) {
    const CssvmProblem problem(fit_rows);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      try {
        scores[g] =
            score_model(problem.fit(grid[g].c0, config.tol, config.max_iter, config.r_scale));
      } catch (const std::exception&) {
      }
    }
  } else {
    for (std::size_t g = 0; g < grid.size(); ++g) {
      try {
        scores[g] = score_model(fit_method(fit_rows, config, grid[g]));
      } catch (const std::exception&) {
      }
    }
  }
  for (double& s : scores) {
    if (std::isnan(s)) {
      s = -std::numeric_limits<double>::infinity();
    }
  }
  return scores;
}

MetricSummary summarize(const std::vector<double>& values) {
  MetricSummary s;
  if (values.empty()) {
    s.mean = std::numeric_limits<double>::quiet_NaN();
    s.std = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  double sum = 0.0;
  for (const double v : values) {
    sum += v;
  }
  s.mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (const double v : values) {
    ss += (v - s.mean) * (v - s.mean);
  }
  s.std = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
  return s;
}

nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

nlohmann::json metric_json(const MetricSummary& s) {
  return {{"mean", number_or_null(s.mean)}, {"std", number_or_null(s.std)}};
}

} // namespace

std::string_view to_string(SelectionMetric metric) {
  switch (metric) {
  case SelectionMetric::bccr:
    return "bccr";
  case SelectionMetric::total_ccr:
    return "total_ccr";
  case SelectionMetric::mwe:
    return "mwe";
  }
  return "unknown";
}

SelectionMetric parse_selection_metric(std::string_view name) {
  if (name == "bccr") {
    return SelectionMetric::bccr;
  }
  if (name == "total_ccr") {
    return SelectionMetric::total_ccr;
  }
  if (name == "mwe") {
    return SelectionMetric::mwe;
  }
  throw std::invalid_argument("unknown selection metric '" + std::string(name) + "'");
}

double selection_score(const EvalReport& report, SelectionMetric metric) {
  switch (metric) {
  case SelectionMetric::bccr:
    return report.bccr;
  case SelectionMetric::total_ccr:
    return report.total_ccr;
  case SelectionMetric::mwe:
    return 1.0 - report.mwe;
  }
  return report.bccr;
}

std::vector<double> default_gamma_grid() { return {0.1, 0.3, 0.5, 0.7, 0.9}; }

std::vector<double> default_c0_grid() {
  return {0.03125, 0.125, 0.5, 2.0, 8.0, 32.0};
}

void ExperimentConfig::validate() const {
  if (method == Method::bayes) {
    throw std::invalid_argument("cv supports methods psc, cssvm and rmdd");
  }
  if (method == Method::psc && gamma_grid.empty()) {
    throw std::invalid_argument("gamma grid is empty");
  }
  if (method != Method::rmdd && c0_grid.empty()) {
    throw std::invalid_argument("c0 grid is empty");
  }
  for (const double g : gamma_grid) {
    if (!(g > 0.0 && g < 1.0)) {
      throw std::invalid_argument("gamma grid values must lie in (0, 1)");
    }
  }
  for (const double c : c0_grid) {
    if (!(c > 0.0) || !std::isfinite(c)) {
      throw std::invalid_argument("c0 grid values must be positive");
    }
  }
  if (outer_folds < 2 || inner_folds < 2) {
    throw std::invalid_argument("fold counts must be at least 2");
  }
  if (repeats < 1) {
    throw std::invalid_argument("repeats must be at least 1");
  }
  if (!(r_scale > 0.0)) {
    throw std::invalid_argument("r_scale must be positive");
  }
  if (source.csv_path.empty() && !source.simulator) {
    throw std::invalid_argument("no dataset: give a CSV path or a simulator");
  }
}

LabeledMatrix load_source(const ExperimentConfig& config) {
  if (config.source.simulator) {
    const auto& sim = *config.source.simulator;
    if (sim.kind == "hdlss") {
      return simulate_hdlss(sim.d, sim.n_pos, sim.n_neg, config.seed);
    }
    if (sim.kind == "fig1") {
      return simulate_fig1(sim.n_pos, sim.n_neg, config.seed);
    }
    throw std::invalid_argument("unknown simulator '" + sim.kind + "'");
  }
  return load_csv(config.source.csv_path, config.source.label_column,
                  config.source.positive_labels);
}

LinearModel fit_method(const LabeledMatrix& train, const ExperimentConfig& config,
                       const GridPoint& point) {
  switch (config.method) {
  case Method::psc:
    return fit_psc(train, hyperparams_at(config, point));
  case Method::cssvm:
    return fit_cssvm(train, point.c0, config.tol, config.max_iter, config.r_scale);
  case Method::rmdd:
    return fit_rmdd(train, config.r_scale);
  case Method::bayes:
    break;
  }
  throw std::invalid_argument("the Bayes rule is not fitted from data");
}

TunedModel tune_and_fit(const LabeledMatrix& train, const ExperimentConfig& config,
                        std::uint64_t seed) {
  const std::vector<GridPoint> grid = effective_grid(config);
  std::vector<double> totals(grid.size(), 0.0);

  if (grid.size() > 1) {
    const FoldPlan plan = stratified_kfold(train.labels(), config.inner_folds, seed);
    for (int f = 0; f < plan.k; ++f) {
      const auto fit_idx = plan.train_indices(f);
      const auto val_idx = plan.test_indices(f);
      const std::vector<double> scores =
          score_split(train.subset(fit_idx), train.subset(val_idx), config, grid);
      for (std::size_t g = 0; g < grid.size(); ++g) {
        totals[g] += scores[g];
      }
    }
  }

  std::size_t best = 0;
  for (std::size_t g = 1; g < grid.size(); ++g) {
    if (totals[g] > totals[best]) {
      best = g;
    }
  }
  if (grid.size() > 1 && !std::isfinite(totals[best])) {
    throw std::runtime_error("every grid point failed during inner cross-validation");
  }

  TunedModel tuned{fit_method(train, config, grid[best]), grid[best],
                   grid.size() > 1 ? totals[best] / config.inner_folds
                                   : std::numeric_limits<double>::quiet_NaN()};
  tuned.model.seed_provenance = seed;
  return tuned;
}

TunedModel tune_and_fit(const Eigen::MatrixXd& samples, std::span<const int> labels,
                        std::span<const std::size_t> train, const ExperimentConfig& config,
                        std::uint64_t seed) {
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(train.size()), samples.cols());
  std::vector<int> y;
  y.reserve(train.size());
  for (std::size_t r = 0; r < train.size(); ++r) {
    rows.row(static_cast<Eigen::Index>(r)) = samples.row(static_cast<Eigen::Index>(train[r]));
    y.push_back(labels[train[r]]);
  }
  return tune_and_fit(LabeledMatrix(std::move(rows), std::move(y)), config, seed);
}

CvResult cv_run(const ExperimentConfig& config, const LabeledMatrix& data) {
  config.validate();
  CvResult result;
  std::vector<int> pooled_labels;
  std::vector<double> pooled_decisions;
  const auto& labels = data.labels();

  for (int r = 0; r < config.repeats; ++r) {
    RepeatResult rep;
    rep.repeat = r;
    rep.seed = config.seed + static_cast<std::uint64_t>(r);
    const FoldPlan outer = stratified_kfold(labels, config.outer_folds, rep.seed);
    ConfusionMatrix repeat_confusion;

    for (int f = 0; f < outer.k; ++f) {
      FoldResult fold;
      fold.repeat = r;
      fold.fold = f;
      fold.test_indices = outer.test_indices(f);
      const auto train_idx = outer.train_indices(f);
      try {
        fold.tuned = tune_and_fit(data.samples(), labels, train_idx, config,
                                  mix_seed(rep.seed, static_cast<std::uint64_t>(f)));
        std::vector<int> test_labels;
        for (const std::size_t i : fold.test_indices) {
          const Eigen::VectorXd x = data.samples().row(static_cast<Eigen::Index>(i)).transpose();
          fold.decisions.push_back(decision(fold.tuned->model, x));
          test_labels.push_back(labels[i]);
        }
        fold.report = evaluate(test_labels, fold.decisions);
        repeat_confusion += fold.report->confusion;
        pooled_labels.insert(pooled_labels.end(), test_labels.begin(), test_labels.end());
        pooled_decisions.insert(pooled_decisions.end(), fold.decisions.begin(),
                                fold.decisions.end());
      } catch (const std::exception& e) {
        fold.error = e.what();
        ++rep.failed_folds;
      }
      result.folds.push_back(std::move(fold));
    }
    rep.pooled = report_from_confusion(repeat_confusion);
    result.summary.failed_folds += rep.failed_folds;
    result.repeats.push_back(std::move(rep));
  }

  std::vector<double> ccr1, ccr2, total, mwe_values, bccr_values, auc;
  ConfusionMatrix all;
  for (const auto& rep : result.repeats) {
    all += rep.pooled.confusion;
    ccr1.push_back(rep.pooled.ccr1);
    ccr2.push_back(rep.pooled.ccr2);
    total.push_back(rep.pooled.total_ccr);
    mwe_values.push_back(rep.pooled.mwe);
    bccr_values.push_back(rep.pooled.bccr);
  }
  // Per-repeat AUC from that repeat's pooled test decisions.
  std::size_t offset = 0;
  for (const auto& rep : result.repeats) {
    const std::size_t len = rep.pooled.confusion.total();
    const std::span<const int> l(pooled_labels.data() + offset, len);
    const std::span<const double> d(pooled_decisions.data() + offset, len);
    if (std::count(l.begin(), l.end(), 1) > 0 && std::count(l.begin(), l.end(), -1) > 0) {
      auc.push_back(trapezoid_auc(roc_curve(l, d)));
    }
    offset += len;
  }
  auto& s = result.summary;
  s.ccr1 = summarize(ccr1);
  s.ccr2 = summarize(ccr2);
  s.total_ccr = summarize(total);
  s.mwe = summarize(mwe_values);
  s.bccr = summarize(bccr_values);
  s.auc = summarize(auc);
  s.pooled = report_from_confusion(all);
  if (all.positives() > 0 && all.negatives() > 0) {
    s.pooled.roc = roc_curve(pooled_labels, pooled_decisions);
    s.pooled.auc = trapezoid_auc(*s.pooled.roc);
  }
  return result;
}

CvResult cv_run(const ExperimentConfig& config) {
  config.validate();
  return cv_run(config, load_source(config));
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json doc;
  if (c.source.simulator) {
    doc["simulator"] = {{"kind", c.source.simulator->kind},
                        {"d", c.source.simulator->d},
                        {"n_pos", c.source.simulator->n_pos},
                        {"n_neg", c.source.simulator->n_neg}};
  } else {
    doc["data"] = c.source.csv_path;
    doc["label_column"] = c.source.label_column;
    doc["positive"] = std::vector<std::string>(c.source.positive_labels.begin(),
                                               c.source.positive_labels.end());
  }
  doc["method"] = std::string(to_string(c.method));
  doc["gamma_grid"] = c.gamma_grid;
  doc["c0_grid"] = c.c0_grid;
  doc["r_scale"] = c.r_scale;
  doc["tol"] = c.tol;
  doc["max_iter"] = c.max_iter;
  doc["outer_folds"] = c.outer_folds;
  doc["inner_folds"] = c.inner_folds;
  doc["repeats"] = c.repeats;
  doc["selection_metric"] = std::string(to_string(c.selection_metric));
  doc["seed"] = c.seed;
  return doc;
}

nlohmann::json summary_to_json(const CvSummary& s) {
  nlohmann::json doc;
  doc["per_repeat"] = {{"ccr1", metric_json(s.ccr1)},           {"ccr2", metric_json(s.ccr2)},
                       {"total_ccr", metric_json(s.total_ccr)}, {"mwe", metric_json(s.mwe)},
                       {"bccr", metric_json(s.bccr)},           {"auc", metric_json(s.auc)}};
  doc["pooled"] = report_to_json(s.pooled);
  doc["failed_folds"] = s.failed_folds;
  return doc;
}

nlohmann::json cv_to_json(const CvResult& result) {
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& f : result.folds) {
    nlohmann::json doc;
    doc["repeat"] = f.repeat;
    doc["fold"] = f.fold;
    doc["n_test"] = f.test_indices.size();
    if (f.tuned) {
      doc["gamma"] = f.tuned->chosen.gamma;
      doc["c0"] = f.tuned->chosen.c0;
      doc["inner_score"] = number_or_null(f.tuned->inner_score);
      doc["lambda"] = f.tuned->model.lambda;
      doc["converged"] = f.tuned->model.converged;
      doc["kkt_residual"] = f.tuned->model.kkt_residual;
    }
    doc["report"] = f.report ? report_to_json(*f.report) : nlohmann::json(nullptr);
    doc["error"] = f.error.empty() ? nlohmann::json(nullptr) : nlohmann::json(f.error);
    folds.push_back(std::move(doc));
  }
  nlohmann::json repeats = nlohmann::json::array();
  for (const auto& r : result.repeats) {
    nlohmann::json doc = report_to_json(r.pooled);
    doc["repeat"] = r.repeat;
    doc["seed"] = r.seed;
    doc["failed_folds"] = r.failed_folds;
    repeats.push_back(std::move(doc));
  }
  return {{"folds", folds}, {"repeats", repeats}, {"summary", summary_to_json(result.summary)}};
}

void write_cv_outputs(const ExperimentConfig& config, const CvResult& result,
                      const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  nlohmann::json report = cv_to_json(result);
  report["config"] = config_to_json(config);
  write_json(out_dir / "cv_report.json", report);
  write_json(out_dir / "summary.json", summary_to_json(result.summary));
  if (result.summary.pooled.roc) {
    write_roc_csv(out_dir / "roc.csv", *result.summary.pooled.roc);
  }
}

} // namespace psc

#include "cli.hpp"

#include "psc/classifier.hpp"
#include "psc/csv.hpp"
#include "psc/dataset.hpp"
#include "psc/experiment.hpp"
#include "psc/metrics.hpp"
#include "psc/model_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>

namespace psc::cli {
namespace {

namespace fs = std::filesystem;

void add_config(CLI::App* sub) {
  sub->add_option("--config")->description("JSON file supplying defaults for any flag");
}

std::string config_scalar(const nlohmann::json& v, const std::string& key) {
  if (v.is_string()) {
    return v.get<std::string>();
  }
  if (v.is_boolean()) {
    return v.get<bool>() ? "true" : "false";
  }
  if (v.is_number()) {
    return v.dump();
  }
  throw std::invalid_argument("config: unsupported value for '" + key + "'");
}

// CLI11 only reads config files attached to the top-level app, so the
// per-subcommand file is expanded into extra arguments here. Flags already on
// the command line win.
void expand_config(const CLI::App& app, std::vector<std::string>& args) {
  if (args.size() < 2) {
    return;
  }
  const CLI::App* sub = app.get_subcommand_no_throw(args[1]);
  if (sub == nullptr) {
    return;
  }
  std::string path;
  std::set<std::string> given;
  for (std::size_t i = 2; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) != 0) {
      continue;
    }
    const std::string name = a.substr(0, a.find('='));
    given.insert(name);
    if (name == "--config") {
      path = a.size() > name.size() ? a.substr(name.size() + 1)
                                    : (i + 1 < args.size() ? args[i + 1] : "");
    }
  }
  if (path.empty()) {
    return;
  }
  const nlohmann::json doc = read_json(path);
  if (!doc.is_object()) {
    throw std::invalid_argument("config " + path + ": top level must be an object");
  }
  for (const auto& [key, value] : doc.items()) {
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    if (flag == "--config" || sub->get_option_no_throw(flag) == nullptr) {
      throw std::invalid_argument("config " + path + ": unknown key '" + key + "'");
    }
    if (given.contains(flag)) {
      continue;
    }
    args.push_back(flag);
    if (value.is_array()) {
      for (const auto& v : value) {
        args.push_back(config_scalar(v, key));
      }
    } else {
      args.push_back(config_scalar(value, key));
    }
  }
}

void add_seed(CLI::App* sub, std::uint64_t& seed) {
  sub->add_option("--seed", seed, "Random seed")->envname("PSC_SEED")->capture_default_str();
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string kind = "hdlss";
  long d = 50;
  std::size_t n_pos = 100;
  std::size_t n_neg = 10;
  std::uint64_t seed = 0;
  std::string label_column = "label";
  std::string out;
};

void run_simulate(const SimulateArgs& a, std::ostream& out) {
  const LabeledMatrix data = a.kind == "fig1"
                                 ? simulate_fig1(a.n_pos, a.n_neg, a.seed)
                                 : simulate_hdlss(a.d, a.n_pos, a.n_neg, a.seed);
  write_csv(a.out, data, a.label_column);
  out << "wrote " << data.rows() << " samples x " << data.dim() << " features to " << a.out
      << '\n';
}

// ---------------------------------------------------------------------------

struct FitArgs {
  std::string method = "psc";
  std::string train;
  std::string label_column = "label";
  std::vector<std::string> positive{"1"};
  Hyperparams hp;
  std::string out;
};

void run_fit(const FitArgs& a, std::ostream& out, std::ostream& err) {
  const LabeledMatrix data =
      load_csv(a.train, a.label_column, {a.positive.begin(), a.positive.end()});
  LinearModel model;
  switch (parse_method(a.method)) {
  case Method::psc:
    model = fit_psc(data, a.hp);
    break;
  case Method::cssvm:
    model = fit_cssvm(data, a.hp.c0, a.hp.tol, a.hp.max_iter, a.hp.r_scale);
    break;
  case Method::rmdd:
    model = fit_rmdd(data, a.hp.r_scale);
    break;
  case Method::bayes:
    throw std::invalid_argument("the Bayes rule needs population parameters; see demo-fig1");
  }
  if (!model.converged) {
    err << "warning: QP stopped at the iteration cap (kkt residual " << model.kkt_residual
        << ")\n";
  }
  save_model(a.out, model);
  out << "wrote " << to_string(model.method) << " model (d=" << model.dim() << ") to " << a.out
      << '\n';
}

// ---------------------------------------------------------------------------

struct PredictArgs {
  std::string model;
  std::string data;
  std::string label_column = "label";
  std::string out = "predictions.csv";
};

Eigen::MatrixXd feature_matrix(const CsvTable& table, const std::string& label_column,
                               const std::string& source) {
  std::vector<std::size_t> columns;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (table.header[c] != label_column) {
      columns.push_back(c);
    }
  }
  Eigen::MatrixXd x(static_cast<Eigen::Index>(table.rows.size()),
                    static_cast<Eigen::Index>(columns.size()));
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    for (std::size_t j = 0; j < columns.size(); ++j) {
      try {
        x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) =
            parse_real(table.rows[r][columns[j]]);
      } catch (const std::invalid_argument& e) {
        throw std::runtime_error(source + ": row " + std::to_string(r + 1) + ", column '" +
                                 table.header[columns[j]] + "': " + e.what());
      }
    }
  }
  return x;
}

void run_predict(const PredictArgs& a, std::ostream& out) {
  const LinearModel model = load_model(a.model);
  const Eigen::MatrixXd x = feature_matrix(read_csv_table(a.data), a.label_column, a.data);
  const Eigen::VectorXd dec = decisions(model, x);
  std::ofstream file(a.out);
  if (!file) {
    throw std::runtime_error("cannot write " + a.out);
  }
  file << "id,decision,prediction\n";
  for (Eigen::Index i = 0; i < dec.size(); ++i) {
    file << i << ',' << format_real(dec[i]) << ',' << (dec[i] >= 0.0 ? 1 : -1) << '\n';
  }
  out << "wrote " << dec.size() << " predictions to " << a.out << '\n';
}

// ---------------------------------------------------------------------------

struct EvaluateArgs {
  std::string pred;
  std::string truth;
  std::string label_column = "label";
  std::vector<std::string> positive{"1"};
  std::string out = "report.json";
  std::string roc_out;
};

void run_evaluate(const EvaluateArgs& a, std::ostream& out) {
  const CsvTable preds = read_csv_table(a.pred);
  const auto column = [&](const std::string& name) {
    const auto it = std::find(preds.header.begin(), preds.header.end(), name);
    if (it == preds.header.end()) {
      throw std::runtime_error(a.pred + ": no '" + name + "' column");
    }
    return static_cast<std::size_t>(it - preds.header.begin());
  };
  const std::size_t id_col = column("id");
  const std::size_t dec_col = column("decision");

  const CsvTable truth = read_csv_table(a.truth);
  const auto label_it = std::find(truth.header.begin(), truth.header.end(), a.label_column);
  if (label_it == truth.header.end()) {
    throw std::runtime_error(a.truth + ": no label column '" + a.label_column + "'");
  }
  const auto label_col = static_cast<std::size_t>(label_it - truth.header.begin());
  const std::set<std::string> positive(a.positive.begin(), a.positive.end());

  std::vector<int> labels;
  std::vector<double> dec;
  for (std::size_t r = 0; r < preds.rows.size(); ++r) {
    const double id_value = parse_real(preds.rows[r][id_col]);
    const auto id = static_cast<std::size_t>(id_value);
    if (id_value < 0 || static_cast<double>(id) != id_value || id >= truth.rows.size()) {
      throw std::runtime_error(a.pred + ": row " + std::to_string(r + 1) + " has id " +
                               preds.rows[r][id_col] + " outside the truth file");
    }
    labels.push_back(positive.contains(truth.rows[id][label_col]) ? 1 : -1);
    dec.push_back(parse_real(preds.rows[r][dec_col]));
  }
  const EvalReport report = evaluate(labels, dec);
  write_json(a.out, report_to_json(report));
  if (!a.roc_out.empty()) {
    if (!report.roc) {
      throw std::runtime_error("ROC undefined: truth labels hold a single class");
    }
    write_roc_csv(a.roc_out, *report.roc);
  }
  out << "bccr " << format_real(report.bccr) << " written to " << a.out << '\n';
}

// ---------------------------------------------------------------------------

struct CvArgs {
  std::string data;
  std::string label_column = "label";
  std::vector<std::string> positive{"1"};
  std::string simulate_kind;
  long simulate_d = 50;
  std::size_t simulate_n_pos = 100;
  std::size_t simulate_n_neg = 10;
  std::string method = "psc";
  std::string selection_metric = "bccr";
  ExperimentConfig config;
  std::string out_dir = "cv_out";
};

void run_cv(CvArgs a, std::ostream& out) {
  ExperimentConfig& config = a.config;
  config.method = parse_method(a.method);
  config.selection_metric = parse_selection_metric(a.selection_metric);
  if (!a.simulate_kind.empty()) {
    config.source.simulator = SimulatorSpec{a.simulate_kind, a.simulate_d, a.simulate_n_pos,
                                            a.simulate_n_neg};
  } else {
    config.source.csv_path = a.data;
    config.source.label_column = a.label_column;
    config.source.positive_labels = {a.positive.begin(), a.positive.end()};
  }
  const CvResult result = cv_run(config);
  write_cv_outputs(config, result, a.out_dir);
  out << "cv: " << result.repeats.size() << " repeats, pooled bccr "
      << format_real(result.summary.pooled.bccr) << ", failed folds "
      << result.summary.failed_folds << '\n';
}

// ---------------------------------------------------------------------------

struct DemoArgs {
  std::uint64_t seed = 0;
  Hyperparams hp;
  std::string out_dir = "fig1_out";
};

void run_demo_fig1(const DemoArgs& a, std::ostream& out) {
  fs::create_directories(a.out_dir);
  const std::vector<std::pair<char, std::size_t>> panels{{'a', 5}, {'b', 12}, {'c', 32}, {'d', 65}};
  const std::size_t n_neg = 65;
  const LinearModel bayes = bayes_oracle(fig1_mean(), -fig1_mean(), fig1_covariance());

  std::ofstream bounds(fs::path(a.out_dir) / "fig1_boundaries.csv");
  if (!bounds) {
    throw std::runtime_error("cannot write boundaries in " + a.out_dir);
  }
  bounds << "panel,n_pos,n_neg,method,w0,w1,b\n";
  const auto emit = [&](char panel, std::size_t n_pos, const LinearModel& m) {
    bounds << panel << ',' << n_pos << ',' << n_neg << ',' << to_string(m.method) << ','
           << format_real(m.w[0]) << ',' << format_real(m.w[1]) << ',' << format_real(m.b)
           << '\n';
  };
  for (std::size_t p = 0; p < panels.size(); ++p) {
    const auto [panel, n_pos] = panels[p];
    const LabeledMatrix data = simulate_fig1(n_pos, n_neg, a.seed + p);
    write_csv(fs::path(a.out_dir) / (std::string("fig1_") + panel + ".csv"), data);
    emit(panel, n_pos, fit_psc(data, a.hp));
    emit(panel, n_pos, fit_cssvm(data, a.hp.c0, a.hp.tol, a.hp.max_iter, a.hp.r_scale));
    emit(panel, n_pos, fit_rmdd(data, a.hp.r_scale));
    emit(panel, n_pos, bayes);
  }
  out << "wrote four illustration panels to " << a.out_dir << '\n';
}

void add_hyperparams(CLI::App* sub, Hyperparams& hp) {
  sub->add_option("--gamma", hp.gamma, "Fraction of the admissible lambda, in (0,1)")
      ->capture_default_str();
  sub->add_option("--c0", hp.c0, "Slack penalty")->capture_default_str();
  sub->add_option("--r-scale", hp.r_scale, "Intercept trade-off scale R")->capture_default_str();
  sub->add_option("--tol", hp.tol, "QP KKT tolerance")->capture_default_str();
  sub->add_option("--max-iter", hp.max_iter, "QP pair-update cap")->capture_default_str();
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Population-structure classifier for imbalanced high-dimensional data", "psc"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Draw a simulated data set as CSV");
  simulate->add_option("--kind", sim.kind, "hdlss or fig1")
      ->check(CLI::IsMember({"hdlss", "fig1"}))
      ->capture_default_str();
  simulate->add_option("--d", sim.d, "Dimension (hdlss)")->capture_default_str();
  simulate->add_option("--n-pos", sim.n_pos, "Positive samples")->capture_default_str();
  simulate->add_option("--n-neg", sim.n_neg, "Negative samples")->capture_default_str();
  simulate->add_option("--label-column", sim.label_column)->capture_default_str();
  simulate->add_option("--out", sim.out, "Output CSV")->required();
  add_seed(simulate, sim.seed);
  add_config(simulate);

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Train a model and write it as JSON");
  fit_cmd->add_option("--method", fit.method, "psc, cssvm or rmdd")
      ->check(CLI::IsMember({"psc", "cssvm", "rmdd"}))
      ->capture_default_str();
  fit_cmd->add_option("--train", fit.train, "Training CSV")->required();
  fit_cmd->add_option("--label-column", fit.label_column)->capture_default_str();
  fit_cmd->add_option("--positive", fit.positive, "Label strings mapped to +1")
      ->capture_default_str();
  add_hyperparams(fit_cmd, fit.hp);
  fit_cmd->add_option("--out", fit.out, "Model JSON")->required();
  add_config(fit_cmd);

  PredictArgs pred;
  auto* predict_cmd = app.add_subcommand("predict", "Score a CSV with a saved model");
  predict_cmd->add_option("--model", pred.model)->required();
  predict_cmd->add_option("--data", pred.data)->required();
  predict_cmd->add_option("--label-column", pred.label_column, "Ignored if present")
      ->capture_default_str();
  predict_cmd->add_option("--out", pred.out, "Predictions CSV (id,decision,prediction)")
      ->capture_default_str();
  add_config(predict_cmd);

  EvaluateArgs eval;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score predictions against labels");
  evaluate_cmd->add_option("--pred", eval.pred)->required();
  evaluate_cmd->add_option("--truth", eval.truth)->required();
  evaluate_cmd->add_option("--label-column", eval.label_column)->capture_default_str();
  evaluate_cmd->add_option("--positive", eval.positive)->capture_default_str();
  evaluate_cmd->add_option("--out", eval.out, "Report JSON")->capture_default_str();
  evaluate_cmd->add_option("--roc-out", eval.roc_out, "ROC CSV (fpr,tpr)");
  add_config(evaluate_cmd);

  CvArgs cv;
  auto* cv_cmd = app.add_subcommand("cv", "Repeated nested cross-validation");
  cv_cmd->add_option("--data", cv.data, "Dataset CSV");
  cv_cmd->add_option("--label-column", cv.label_column)->capture_default_str();
  cv_cmd->add_option("--positive", cv.positive)->capture_default_str();
  cv_cmd->add_option("--simulate-kind", cv.simulate_kind, "Use a simulator instead of --data")
      ->check(CLI::IsMember({"hdlss", "fig1"}));
  cv_cmd->add_option("--simulate-d", cv.simulate_d)->capture_default_str();
  cv_cmd->add_option("--simulate-n-pos", cv.simulate_n_pos)->capture_default_str();
  cv_cmd->add_option("--simulate-n-neg", cv.simulate_n_neg)->capture_default_str();
  cv_cmd->add_option("--method", cv.method)
      ->check(CLI::IsMember({"psc", "cssvm", "rmdd"}))
      ->capture_default_str();
  cv_cmd->add_option("--gamma-grid", cv.config.gamma_grid)->capture_default_str();
  cv_cmd->add_option("--c0-grid", cv.config.c0_grid)->capture_default_str();
  cv_cmd->add_option("--r-scale", cv.config.r_scale)->capture_default_str();
  cv_cmd->add_option("--tol", cv.config.tol)->capture_default_str();
  cv_cmd->add_option("--max-iter", cv.config.max_iter)->capture_default_str();
  cv_cmd->add_option("--outer-folds", cv.config.outer_folds)->capture_default_str();
  cv_cmd->add_option("--inner-folds", cv.config.inner_folds)->capture_default_str();
  cv_cmd->add_option("--repeats", cv.config.repeats)->capture_default_str();
  cv_cmd->add_option("--selection-metric", cv.selection_metric)
      ->check(CLI::IsMember({"bccr", "total_ccr", "mwe"}))
      ->capture_default_str();
  cv_cmd->add_option("--out-dir", cv.out_dir)->capture_default_str();
  add_seed(cv_cmd, cv.config.seed);
  add_config(cv_cmd);

  DemoArgs demo;
  auto* demo_cmd =
      app.add_subcommand("demo-fig1", "Two-dimensional illustration sets and fitted boundaries");
  add_hyperparams(demo_cmd, demo.hp);
  demo_cmd->add_option("--out-dir", demo.out_dir)->capture_default_str();
  add_seed(demo_cmd, demo.seed);
  add_config(demo_cmd);

  std::vector<std::string> expanded = args;
  try {
    expand_config(app, expanded);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  try {
    std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
    if (!reversed.empty()) {
      reversed.pop_back();
    }
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (simulate->parsed()) {
      run_simulate(sim, out);
    } else if (fit_cmd->parsed()) {
      run_fit(fit, out, err);
    } else if (predict_cmd->parsed()) {
      run_predict(pred, out);
    } else if (evaluate_cmd->parsed()) {
      run_evaluate(eval, out);
    } else if (cv_cmd->parsed()) {
      if (cv.data.empty() && cv.simulate_kind.empty()) {
        throw std::invalid_argument("cv needs --data or --simulate-kind");
      }
      run_cv(cv, out);
    } else if (demo_cmd->parsed()) {
      run_demo_fig1(demo, out);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

} // namespace psc::cli

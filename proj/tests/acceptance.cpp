// Acceptance gate: prints one PASS/FAIL line per criterion and exits nonzero
// if any criterion fails.

#include "cli.hpp"
#include "psc/classifier.hpp"
#include "psc/csv.hpp"
#include "psc/experiment.hpp"
#include "psc/intercept.hpp"
#include "psc/metrics.hpp"
#include "psc/qp.hpp"
#include "psc/smw.hpp"
#include "support/oracles.hpp"
#include "support/tempdir.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

// ---- allocation probe -------------------------------------------------------
// Records the largest single malloc while armed. Eigen and operator new both
// end up here.

extern "C" void* __libc_malloc(std::size_t);

namespace {
std::atomic<bool> probe_armed{false};
std::atomic<std::size_t> probe_largest{0};
} // namespace

extern "C" void* malloc(std::size_t size) {
  if (probe_armed.load(std::memory_order_relaxed)) {
    std::size_t seen = probe_largest.load(std::memory_order_relaxed);
    while (size > seen && !probe_largest.compare_exchange_weak(seen, size)) {
    }
  }
  return __libc_malloc(size);
}

using namespace psc;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(const char* format, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c, d);
  return buf;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream text;
  text << in.rdbuf();
  return text.str();
}

double bccr_on(const LinearModel& m, const LabeledMatrix& test) {
  const Eigen::VectorXd dec = decisions(m, test.samples());
  return evaluate(test.labels(), {dec.data(), static_cast<std::size_t>(dec.size())}).bccr;
}

// 1 ---------------------------------------------------------------------------
Verdict table_arithmetic() {
  const EvalReport psc = report_from_confusion({597, 123, 92, 304});
  double worst = std::max({std::abs(psc.ccr1 - 0.8292), std::abs(psc.ccr2 - 0.7677),
                           std::abs(psc.total_ccr - 0.8073), std::abs(1 - psc.mwe - 0.7984),
                           std::abs(psc.bccr - 0.7969)});
  const bool headline = worst <= 1e-4;

  std::ifstream in(std::string(PSC_FIXTURE_DIR) + "/published_confusion.csv");
  std::string line;
  std::getline(in, line);
  int rows = 0;
  double table_worst = 0.0;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::vector<std::string> f;
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      f.push_back(cell);
    }
    const EvalReport r = report_from_confusion(
        {std::stoul(f[2]), std::stoul(f[3]), std::stoul(f[4]), std::stoul(f[5])});
    table_worst = std::max({table_worst, std::abs(r.ccr1 - parse_real(f[6])),
                            std::abs(r.ccr2 - parse_real(f[7])),
                            std::abs(r.total_ccr - parse_real(f[8])),
                            std::abs(1 - r.mwe - parse_real(f[9])),
                            std::abs(r.bccr - parse_real(f[10]))});
    ++rows;
  }
  return {headline && rows == 48 && table_worst <= 1e-4,
          fmt("headline max err %.2g; %.0f rows, max err %.2g", worst, rows, table_worst)};
}

// 2 ---------------------------------------------------------------------------
Verdict smw_equivalence() {
  oracle::Gen gen(20240601);
  double worst_m = 0, worst_g = 0, worst_w = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto n1 = static_cast<std::size_t>(gen.integer(1, 10));
    const auto n2 = static_cast<std::size_t>(gen.integer(1, 20 - static_cast<int>(n1)));
    const Eigen::Index d = gen.integer(1, 50);
    const auto s = gen.sample(n1, n2, d, gen.uniform(0.0, 1.5));
    const LabeledMatrix data(s.x, s.y);
    const PscProblem problem(data);
    const double gamma = 0.1 * gen.integer(1, 9);
    const PscProblem::Dual dual = problem.dual(gamma);

    const Eigen::MatrixXd m_dense = oracle::inverse_m(s, dual.op.lambda());
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(d, d);
    worst_m = std::max(worst_m, oracle::rel_error(dual.op.apply_inverse(eye), m_dense));
    const Eigen::MatrixXd g_dense = oracle::gram(s, m_dense);
    worst_g = std::max(worst_g, oracle::rel_error(dual.gram, g_dense));

    Hyperparams hp;
    hp.gamma = gamma;
    hp.c0 = std::pow(2.0, gen.integer(-3, 3));
    const LinearModel model = problem.fit(dual, hp);
    const DualSolution sol = solve_smo(
        BoxQP{dual.gram, data.label_vector(), slack_caps(s.y, n1, n2, hp.c0)}, {hp.tol, hp.max_iter, false});
    const Eigen::VectorXd w_dense =
        m_dense * s.x.transpose() * data.label_vector().cwiseProduct(sol.alpha);
    worst_w = std::max(worst_w, oracle::rel_error(model.w, w_dense));
  }
  const bool pass = worst_m <= 1e-8 && worst_g <= 1e-8 && worst_w <= 1e-8;
  return {pass, fmt("200 instances; max rel err M %.2g, G %.2g, w %.2g", worst_m, worst_g,
                    worst_w)};
}

// 3 ---------------------------------------------------------------------------
Verdict qp_equivalence() {
  oracle::Gen gen(777);
  int within = 0;
  double worst_kkt = 0, worst_excess = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = gen.integer(2, 3);
    BoxQP p;
    p.g = gen.psd(n);
    p.y.resize(n);
    p.upper.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      p.y[i] = i == 0 ? 1 : (i == 1 ? -1 : (gen.integer(0, 1) ? 1 : -1));
      p.upper[i] = gen.uniform(0.05, 3.0);
    }
    const DualSolution s = solve_smo(p);
    const int points = n == 2 ? 401 : 201;
    const DualSolution b = brute_force_small(p, points);
    const double bound = oracle::grid_gap_bound(p.g, p.y, p.upper, s.alpha, points);
    const double gap = s.objective - b.objective;
    // The grid cannot beat the optimum by more than the solver tolerance
    // allows, and the optimum cannot beat the grid by more than its resolution.
    if (gap <= bound && -gap <= 1e-6) {
      ++within;
    }
    worst_excess = std::max(worst_excess, -gap);
    worst_kkt = std::max(worst_kkt, kkt_violation(p, s.alpha));
  }
  return {within == 100 && worst_kkt <= 1e-6,
          fmt("%.0f/100 within grid resolution; max kkt %.2g; grid excess %.2g", within,
              worst_kkt, worst_excess)};
}

// 4 ---------------------------------------------------------------------------
Verdict intercept_checks() {
  bool pass = true;
  std::string why;
  oracle::Gen gen(44);
  for (int trial = 0; trial < 100; ++trial) {
    const double lo = gen.uniform(-5, 5), gap = gen.uniform(0.01, 4);
    const Projections p({lo + gap, lo + gap + gen.uniform(0, 3)}, {lo, lo - gen.uniform(0, 3)},
                        static_cast<std::size_t>(gen.integer(1, 100)),
                        static_cast<std::size_t>(gen.integer(1, 100)));
    const double b = gap_intercept(p, 2.0);
    const double bp = std::min(p.pos[0], p.pos[1]) + b;
    const double bm = -b - std::max(p.neg[0], p.neg[1]);
    if (std::abs(bp + bm - gap) > 1e-12 * (1 + std::abs(lo))) {
      pass = false;
      why = "gap identity";
    }
  }
  const Projections balanced({3, 4}, {0, 1});
  if (gap_intercept(balanced, 2.0) != -2.0) {
    pass = false;
    why = "balanced midpoint";
  }
  const Projections skewed({3, 4}, {0, 1}, 2, 32);
  const double b = gap_intercept(skewed, 2.0);
  const double bp = 3 + b, bm = -b - 1;
  if (std::abs(bm / bp - 0.5) > 1e-10 || std::abs(bp - (4.0 / 3.0) * (2.0 / 2.0)) > 1e-10) {
    pass = false;
    why = "m=16 split";
  }
  int exact = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> pos, neg;
    for (int i = gen.integer(1, 12); i > 0; --i) {
      pos.push_back(gen.dyadic(-3, 3));
    }
    for (int i = gen.integer(1, 12); i > 0; --i) {
      neg.push_back(gen.dyadic(-3, 3) - 0.5);
    }
    const double cut = min_misclass_intercept(Projections(pos, neg));
    exact += oracle::misclassified(pos, neg, cut) == oracle::min_misclassified(pos, neg);
  }
  if (exact != 100) {
    pass = false;
    why = "exhaustive minimum";
  }
  return {pass, fmt("ratio %.12g, b+ %.12g; %.0f/100 minima exact", bm / bp, bp, exact) +
                    (why.empty() ? "" : "; failed: " + why)};
}

// 5 ---------------------------------------------------------------------------
Verdict svm_reduction() {
  oracle::Gen gen(55555);
  double worst = 1.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto n = static_cast<std::size_t>(gen.integer(3, 15));
    const auto s = gen.sample(n, n, gen.integer(2, 80), 3.0);
    const LabeledMatrix data(s.x, s.y);
    Hyperparams hp;
    hp.gamma = 1e-9;
    hp.c0 = 1.0;
    const LinearModel p = fit_psc(data, hp);
    const LinearModel c = fit_cssvm(data, 1.0);
    worst = std::min(worst, p.w.dot(c.w) / (p.w.norm() * c.w.norm()));
  }
  return {worst >= 1 - 1e-4, fmt("min cosine %.12f over 20 instances", worst)};
}

// 6 ---------------------------------------------------------------------------
Verdict dimension_trend() {
  const auto start = Clock::now();
  ExperimentConfig config;
  config.source.csv_path = "in-memory";
  const int reps = 10;
  std::ostringstream detail;
  bool pass = true;
  for (Eigen::Index d : {50, 200, 800}) {
    double psc_sum = 0, svm_sum = 0, bayes_sum = 0;
    int wins = 0, losses = 0;
    for (int r = 0; r < reps; ++r) {
      const std::uint64_t seed = 1000 * static_cast<std::uint64_t>(d) + static_cast<std::uint64_t>(r);
      const LabeledMatrix train = simulate_hdlss(d, 100, 10, seed);
      const LabeledMatrix test = simulate_hdlss(d, 1500, 1500, seed + 500);

      config.method = Method::psc;
      const double p = bccr_on(tune_and_fit(train, config, seed).model, test);
      config.method = Method::cssvm;
      const double c = bccr_on(tune_and_fit(train, config, seed).model, test);
      const Eigen::VectorXd mu = Eigen::VectorXd::Constant(d, hdlss_mean_scale(d));
      const double b = bccr_on(bayes_oracle(mu, -mu, Eigen::MatrixXd::Identity(d, d)), test);
      psc_sum += p;
      svm_sum += c;
      bayes_sum += b;
      wins += p > c;
      losses += p < c;
    }
    const double mp = psc_sum / reps, mc = svm_sum / reps, mb = bayes_sum / reps;
    // One-sided sign test, ties dropped.
    const int n = wins + losses;
    double tail = 0.0;
    for (int k = wins; k <= n; ++k) {
      tail += std::tgamma(n + 1.0) / (std::tgamma(k + 1.0) * std::tgamma(n - k + 1.0)) *
              std::pow(0.5, n);
    }
    detail << " d=" << d << ": psc " << fmt("%.4f", mp) << " cssvm " << fmt("%.4f", mc)
           << " bayes " << fmt("%.4f", mb) << " wins " << wins << "/" << n << " p="
           << fmt("%.4f", n > 0 ? tail : 1.0) << ";";
    if (d == 800 && !(mp > mc && n > 0 && tail < 0.05)) {
      pass = false;
    }
    if (d == 50 && !(mp >= 0.9 * mb)) {
      pass = false;
    }
  }
  const double secs = seconds_since(start);
  pass = pass && secs <= 600;
  detail << fmt(" %.1fs", secs);
  return {pass, detail.str()};
}

// 7 ---------------------------------------------------------------------------
Verdict gene_shaped_cv() {
  TempDir dir;
  {
    // 62 x 2000 with 22/40 labels; a handful of informative columns.
    oracle::Gen gen(62);
    Eigen::MatrixXd x = gen.matrix(62, 2000);
    std::vector<int> y;
    for (int i = 0; i < 62; ++i) {
      y.push_back(i % 3 == 0 && static_cast<int>(std::count(y.begin(), y.end(), 1)) < 22 ? 1 : -1);
    }
    for (int i = 0, pos = static_cast<int>(std::count(y.begin(), y.end(), 1)); pos < 22; ++i) {
      if (y[static_cast<std::size_t>(i)] == -1) {
        y[static_cast<std::size_t>(i)] = 1;
        ++pos;
      }
    }
    for (int i = 0; i < 62; ++i) {
      x.row(i).head(40).array() += 0.6 * y[static_cast<std::size_t>(i)];
    }
    std::vector<std::string> names;
    for (int j = 0; j < 2000; ++j) {
      names.push_back("g" + std::to_string(j));
    }
    write_csv(dir / "genes.csv", LabeledMatrix(x, y, names), "tissue");
  }
  ExperimentConfig config;
  config.source.csv_path = (dir / "genes.csv").string();
  config.source.label_column = "tissue";
  const auto start = Clock::now();
  const CvResult first = cv_run(config);
  const double secs = seconds_since(start);
  write_cv_outputs(config, first, dir / "run1");
  write_cv_outputs(config, cv_run(config), dir / "run2");
  bool same = true;
  for (const char* name : {"cv_report.json", "summary.json", "roc.csv"}) {
    same = same && slurp(dir / "run1" / name) == slurp(dir / "run2" / name);
  }
  const std::size_t total = first.summary.pooled.confusion.total();
  const bool pass = secs <= 300 && same && total == 18 * 62 && first.summary.failed_folds == 0;
  return {pass, fmt("one run %.1fs; pooled count %.0f (want %.0f); failed folds %.0f", secs,
                    static_cast<double>(total), 18.0 * 62, static_cast<double>(first.summary.failed_folds)) +
                    (same ? "; repeat run byte-identical" : "; repeat run DIFFERS")};
}

// 8 ---------------------------------------------------------------------------
Verdict complexity() {
  Hyperparams hp;
  const auto median_time = [&](Eigen::Index d) {
    const LabeledMatrix data = simulate_hdlss(d, 100, 10, 8);
    std::vector<double> times;
    for (int i = 0; i < 5; ++i) {
      const auto start = Clock::now();
      const LinearModel m = fit_psc(data, hp);
      times.push_back(seconds_since(start));
      if (m.w.size() != d) {
        times.back() = 1e9;
      }
    }
    std::sort(times.begin(), times.end());
    return times[2];
  };
  median_time(800); // warm-up
  const double small = median_time(800);
  const double large = median_time(3200);
  const double ratio = large / small;

  const Eigen::Index d = 3200;
  const LabeledMatrix data = simulate_hdlss(d, 100, 10, 9);
  probe_largest = 0;
  probe_armed = true;
  const LinearModel m = fit_psc(data, hp);
  probe_armed = false;
  const std::size_t largest = probe_largest.load();
  const std::size_t square = static_cast<std::size_t>(d) * static_cast<std::size_t>(d) * sizeof(double);
  const bool structural = largest > 0 && largest < square / 4 && m.w.size() == d;
  return {ratio <= 6.0 && structural,
          fmt("fit %.4fs at d=800, %.4fs at d=3200, ratio %.2f; largest block %.0f bytes", small,
              large, ratio, static_cast<double>(largest)) +
              fmt(" (d x d would be %.0f)", static_cast<double>(square))};
}

// 9 ---------------------------------------------------------------------------
Verdict determinism() {
  TempDir dir;
  const auto run = [&](const std::string& tag, std::vector<std::string> args) {
    const std::filesystem::path out = dir / tag;
    std::filesystem::create_directories(out);
    for (auto& a : args) {
      const auto pos = a.find("{out}");
      if (pos != std::string::npos) {
        a.replace(pos, 5, out.string());
      }
    }
    args.insert(args.begin(), "psc");
    std::ostringstream sink;
    return cli::run(args, sink, sink);
  };
  int failures = 0;
  int compared = 0;
  for (const char* tag : {"a", "b"}) {
    const std::string t = tag;
    failures += run(t + "/sim", {"simulate", "--d", "120", "--n-pos", "40", "--n-neg", "8",
                                 "--seed", "3", "--out", "{out}/train.csv"});
    failures += run(t + "/sim", {"simulate", "--d", "120", "--n-pos", "60", "--n-neg", "60",
                                 "--seed", "4", "--out", "{out}/test.csv"});
    failures += run(t + "/fit", {"fit", "--train", (dir / t / "sim" / "train.csv").string(),
                                 "--out", "{out}/model.json"});
    failures += run(t + "/pred", {"predict", "--model", (dir / t / "fit" / "model.json").string(),
                                  "--data", (dir / t / "sim" / "test.csv").string(), "--out",
                                  "{out}/preds.csv"});
    failures += run(t + "/eval", {"evaluate", "--pred", (dir / t / "pred" / "preds.csv").string(),
                                  "--truth", (dir / t / "sim" / "test.csv").string(), "--out",
                                  "{out}/report.json", "--roc-out", "{out}/roc.csv"});
    // The cv report records its input path, so both runs read the same file.
    failures += run(t + "/cv", {"cv", "--data", (dir / "a" / "sim" / "train.csv").string(),
                                "--repeats", "3", "--seed", "5", "--out-dir", "{out}"});
    failures += run(t + "/demo", {"demo-fig1", "--seed", "6", "--out-dir", "{out}"});
  }
  bool same = failures == 0;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir / "a")) {
    if (!entry.is_regular_file()) {
      continue;
    }
    const auto rel = std::filesystem::relative(entry.path(), dir / "a");
    ++compared;
    if (slurp(entry.path()) != slurp(dir / "b" / rel)) {
      same = false;
    }
  }
  return {same && compared >= 14,
          fmt("%.0f output files compared across two runs of all six subcommands; %.0f failed "
              "invocations",
              compared, failures)};
}

} // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"1 table arithmetic", table_arithmetic},
      {"2 woodbury vs dense", smw_equivalence},
      {"3 qp vs grid oracle", qp_equivalence},
      {"4 intercept formulas", intercept_checks},
      {"5 vanishing-lambda svm", svm_reduction},
      {"6 dimension trend", dimension_trend},
      {"7 gene-shaped cv", gene_shaped_cv},
      {"8 complexity", complexity},
      {"9 determinism", determinism},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v{false, ""};
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (v.pass ? "PASS" : "FAIL") << "  " << name << ": " << v.detail << std::endl;
    failed += v.pass ? 0 : 1;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " failed")
            << std::endl;
  return failed == 0 ? 0 : 1;
}

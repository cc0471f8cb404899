#include "psc/metrics.hpp"

#include "psc/csv.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace psc {
namespace {

void check_rate(double value, const char* name) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw std::invalid_argument(std::string(name) + " must lie in [0, 1]");
  }
}

double rate(std::size_t right, std::size_t total) {
  return total == 0 ? std::numeric_limits<double>::quiet_NaN()
                    : static_cast<double>(right) / static_cast<double>(total);
}

nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

} // namespace

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  tp += other.tp;
  fn += other.fn;
  fp += other.fp;
  tn += other.tn;
  return *this;
}

double bccr(double ccr1, double ccr2) {
  check_rate(ccr1, "ccr1");
  check_rate(ccr2, "ccr2");
  const double diff = ccr1 - ccr2;
  return 0.5 * (ccr1 + ccr2) * std::exp(-diff * diff / 2.0);
}

double mwe(double ccr1, double ccr2) {
  check_rate(ccr1, "ccr1");
  check_rate(ccr2, "ccr2");
  return 1.0 - 0.5 * (ccr1 + ccr2);
}

EvalReport report_from_confusion(const ConfusionMatrix& c) {
  EvalReport r;
  r.confusion = c;
  r.ccr1 = rate(c.tp, c.positives());
  r.ccr2 = rate(c.tn, c.negatives());
  r.total_ccr = rate(c.tp + c.tn, c.total());
  if (c.positives() > 0 && c.negatives() > 0) {
    r.mwe = mwe(r.ccr1, r.ccr2);
    r.bccr = bccr(r.ccr1, r.ccr2);
  } else {
    r.mwe = std::numeric_limits<double>::quiet_NaN();
    r.bccr = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

std::vector<RocPoint> roc_curve(std::span<const int> labels, std::span<const double> decisions) {
  if (labels.size() != decisions.size()) {
    throw std::invalid_argument("roc_curve: length mismatch");
  }
  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return decisions[a] > decisions[b];
  });
  const auto positives =
      static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  const std::size_t negatives = labels.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw std::invalid_argument("roc_curve needs both classes");
  }

  std::vector<RocPoint> roc{{0.0, 0.0}};
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t k = 0; k < order.size();) {
    const double value = decisions[order[k]];
    while (k < order.size() && decisions[order[k]] == value) {
      (labels[order[k]] == 1 ? tp : fp) += 1;
      ++k;
    }
    roc.push_back({static_cast<double>(fp) / static_cast<double>(negatives),
                   static_cast<double>(tp) / static_cast<double>(positives)});
  }
  return roc;
}

double trapezoid_auc(const std::vector<RocPoint>& roc) {
  double area = 0.0;
  for (std::size_t k = 1; k < roc.size(); ++k) {
    area += (roc[k].fpr - roc[k - 1].fpr) * (roc[k].tpr + roc[k - 1].tpr) / 2.0;
  }
  return area;
}

EvalReport evaluate(std::span<const int> labels, std::span<const double> decisions) {
  if (labels.size() != decisions.size()) {
    throw std::invalid_argument("evaluate: " + std::to_string(labels.size()) + " labels vs " +
                                std::to_string(decisions.size()) + " decisions");
  }
  ConfusionMatrix c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!std::isfinite(decisions[i])) {
      throw std::invalid_argument("evaluate: non-finite decision value");
    }
    const bool predicted_positive = decisions[i] >= 0.0;
    if (labels[i] == 1) {
      (predicted_positive ? c.tp : c.fn) += 1;
    } else if (labels[i] == -1) {
      (predicted_positive ? c.fp : c.tn) += 1;
    } else {
      throw std::invalid_argument("evaluate: labels must be +1 or -1");
    }
  }
  EvalReport report = report_from_confusion(c);
  if (c.positives() > 0 && c.negatives() > 0) {
    report.roc = roc_curve(labels, decisions);
    report.auc = trapezoid_auc(*report.roc);
  }
  return report;
}

nlohmann::json report_to_json(const EvalReport& r) {
  nlohmann::json doc;
  doc["confusion"] = {{"tp", r.confusion.tp},
                      {"fn", r.confusion.fn},
                      {"fp", r.confusion.fp},
                      {"tn", r.confusion.tn}};
  doc["ccr1"] = number_or_null(r.ccr1);
  doc["ccr2"] = number_or_null(r.ccr2);
  doc["total_ccr"] = number_or_null(r.total_ccr);
  doc["mwe"] = number_or_null(r.mwe);
  doc["one_minus_mwe"] = number_or_null(1.0 - r.mwe);
  doc["bccr"] = number_or_null(r.bccr);
  doc["auc"] = r.auc ? nlohmann::json(*r.auc) : nlohmann::json(nullptr);
  return doc;
}

void write_roc_csv(const std::filesystem::path& path, const std::vector<RocPoint>& roc) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << "fpr,tpr\n";
  for (const auto& p : roc) {
    out << format_real(p.fpr) << ',' << format_real(p.tpr) << '\n';
  }
}

} // namespace psc

#include "vislint/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "vislint/errors.hpp"

namespace vislint {

namespace {

void check_lengths(std::size_t preds, std::size_t truths) {
  if (preds != truths) throw LengthMismatch(preds, truths);
  if (truths == 0) throw EmptyInput("no prediction/ground-truth pairs to score");
}

double safe_div(double num, double den) { return den == 0 ? 0.0 : num / den; }

double json_number(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
}

}  // namespace

std::string_view to_string(InvalidPolicy p) { return p == InvalidPolicy::drop ? "drop" : "penalize"; }

InvalidPolicy invalid_policy_from_name(std::string_view name) {
  if (name == "drop") return InvalidPolicy::drop;
  if (name == "penalize") return InvalidPolicy::penalize;
  throw PreconditionError("unknown invalid policy '" + std::string(name) + "'");
}

std::size_t ConfusionMatrix::total() const {
  std::size_t n = 0;
  for (const auto& row : counts) {
    for (auto c : row) n += c;
  }
  return n;
}

std::size_t ConfusionMatrix::trace() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) n += counts[i][i];
  return n;
}

std::size_t ConfusionMatrix::row_sum(std::size_t i) const {
  std::size_t n = 0;
  for (auto c : counts[i]) n += c;
  return n;
}

std::size_t ConfusionMatrix::column_sum(std::size_t j) const {
  std::size_t n = 0;
  for (const auto& row : counts) n += row[j];
  return n;
}

ConfusionMatrix confusion_matrix(std::span<const std::optional<std::string>> preds,
                                 std::span<const std::string> truths) {
  check_lengths(preds.size(), truths.size());
  std::set<std::string> truth_classes(truths.begin(), truths.end());
  if (truth_classes.count(std::string(kInvalidClass))) {
    throw PreconditionError("ground truth must not contain the invalid class");
  }
  std::set<std::string> predicted_only;
  bool any_invalid = false;
  for (const auto& p : preds) {
    if (!p) {
      any_invalid = true;
    } else if (!truth_classes.count(*p)) {
      predicted_only.insert(*p);
    }
  }

  ConfusionMatrix m;
  m.classes.assign(truth_classes.begin(), truth_classes.end());
  m.truth_class_count = m.classes.size();
  m.classes.insert(m.classes.end(), predicted_only.begin(), predicted_only.end());
  if (any_invalid) m.classes.emplace_back(kInvalidClass);

  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < m.classes.size(); ++i) index[m.classes[i]] = i;
  m.counts.assign(m.classes.size(), std::vector<std::size_t>(m.classes.size(), 0));
  for (std::size_t k = 0; k < truths.size(); ++k) {
    const auto col = preds[k] ? index.at(*preds[k]) : index.at(std::string(kInvalidClass));
    ++m.counts[index.at(truths[k])][col];
  }
  return m;
}

double no_information_rate(std::span<const std::string> truths) {
  if (truths.empty()) throw EmptyInput("no ground-truth labels");
  std::map<std::string_view, std::size_t> counts;
  std::size_t best = 0;
  for (const auto& t : truths) best = std::max(best, ++counts[t]);
  return static_cast<double>(best) / static_cast<double>(truths.size());
}

ClassificationReport classification_report(std::span<const std::optional<std::string>> preds,
                                           std::span<const std::string> truths, InvalidPolicy policy) {
  check_lengths(preds.size(), truths.size());
  const auto invalid_count =
      static_cast<std::size_t>(std::count_if(preds.begin(), preds.end(), [](const auto& p) { return !p; }));

  std::vector<std::optional<std::string>> kept_preds;
  std::vector<std::string> kept_truths;
  if (policy == InvalidPolicy::drop && invalid_count > 0) {
    for (std::size_t i = 0; i < preds.size(); ++i) {
      if (!preds[i]) continue;
      kept_preds.push_back(preds[i]);
      kept_truths.push_back(truths[i]);
    }
    if (kept_truths.empty()) throw EmptyInput("every prediction is invalid");
    preds = kept_preds;
    truths = kept_truths;
  }

  ClassificationReport r;
  r.confusion = confusion_matrix(preds, truths);
  r.n = truths.size();
  r.invalid_count = invalid_count;
  r.invalid_policy = policy;

  const auto& m = r.confusion;
  const std::size_t k = m.truth_class_count;
  double p_sum = 0, r_sum = 0, f_sum = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double tp = static_cast<double>(m.counts[i][i]);
    const double precision = safe_div(tp, static_cast<double>(m.column_sum(i)));
    const double recall = safe_div(tp, static_cast<double>(m.row_sum(i)));
    p_sum += precision;
    r_sum += recall;
    f_sum += safe_div(2 * precision * recall, precision + recall);
  }
  r.macro_precision = p_sum / static_cast<double>(k);
  r.macro_recall = r_sum / static_cast<double>(k);
  r.macro_f1 = f_sum / static_cast<double>(k);
  r.balanced_accuracy = r.macro_recall;
  r.accuracy = static_cast<double>(m.trace()) / static_cast<double>(r.n);
  r.no_information_rate = no_information_rate(truths);
  return r;
}

ClassificationReport classification_report(std::span<const ParsedAnswer> preds, std::span<const Label> truths,
                                           InvalidPolicy policy) {
  check_lengths(preds.size(), truths.size());
  std::vector<std::optional<std::string>> p;
  std::vector<std::string> t;
  p.reserve(preds.size());
  t.reserve(truths.size());
  for (const auto& a : preds) p.push_back(a.is_invalid() ? std::nullopt : std::optional(a.to_string()));
  for (const auto& l : truths) t.push_back(label_to_string(l));
  return classification_report(p, t, policy);
}

RegressionReport regression_report(std::span<const std::optional<double>> preds, std::span<const double> truths) {
  check_lengths(preds.size(), truths.size());
  std::vector<double> x, y;
  RegressionReport r;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (!preds[i]) {
      ++r.invalid_count;
      continue;
    }
    x.push_back(*preds[i]);
    y.push_back(truths[i]);
  }
  r.n = x.size();
  if (r.n == 0) {
    r.rmse = r.mae = std::numeric_limits<double>::quiet_NaN();
    return r;
  }

  const double n = static_cast<double>(r.n);
  double se = 0, ae = 0, mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = x[i] - y[i];
    se += e * e;
    ae += std::abs(e);
    mx += x[i];
    my += y[i];
  }
  r.rmse = std::sqrt(se / n);
  r.mae = ae / n;
  mx /= n;
  my /= n;

  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx > 0 && syy > 0) r.pearson_r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  return r;
}

RegressionReport regression_report(std::span<const ParsedAnswer> preds, std::span<const std::uint64_t> truths) {
  check_lengths(preds.size(), truths.size());
  std::vector<std::optional<double>> p;
  p.reserve(preds.size());
  for (const auto& a : preds) {
    auto v = a.as_number();
    p.push_back(v ? std::optional(static_cast<double>(*v)) : std::nullopt);
  }
  std::vector<double> t(truths.begin(), truths.end());
  return regression_report(p, t);
}

nlohmann::json to_json(const ConfusionMatrix& m) {
  return {{"classes", m.classes}, {"counts", m.counts}, {"truth_class_count", m.truth_class_count}};
}

nlohmann::json to_json(const ClassificationReport& r) {
  return {{"macro_precision", r.macro_precision},
          {"macro_recall", r.macro_recall},
          {"macro_f1", r.macro_f1},
          {"accuracy", r.accuracy},
          {"balanced_accuracy", r.balanced_accuracy},
          {"no_information_rate", r.no_information_rate},
          {"n", r.n},
          {"invalid_count", r.invalid_count},
          {"invalid_policy", to_string(r.invalid_policy)},
          {"confusion", to_json(r.confusion)}};
}

nlohmann::json to_json(const RegressionReport& r) {
  nlohmann::json j = {{"rmse", r.rmse}, {"mae", r.mae}, {"n", r.n}, {"invalid_count", r.invalid_count}};
  j["pearson_r"] = r.pearson_r ? nlohmann::json(*r.pearson_r) : nlohmann::json(nullptr);
  if (!std::isfinite(r.rmse)) j["rmse"] = nullptr;
  if (!std::isfinite(r.mae)) j["mae"] = nullptr;
  return j;
}

ConfusionMatrix confusion_from_json(const nlohmann::json& j) {
  ConfusionMatrix m;
  m.classes = j.at("classes").get<std::vector<std::string>>();
  m.counts = j.at("counts").get<std::vector<std::vector<std::size_t>>>();
  m.truth_class_count = j.at("truth_class_count").get<std::size_t>();
  return m;
}

ClassificationReport classification_from_json(const nlohmann::json& j) {
  ClassificationReport r;
  r.macro_precision = j.at("macro_precision").get<double>();
  r.macro_recall = j.at("macro_recall").get<double>();
  r.macro_f1 = j.at("macro_f1").get<double>();
  r.accuracy = j.at("accuracy").get<double>();
  r.balanced_accuracy = j.at("balanced_accuracy").get<double>();
  r.no_information_rate = j.at("no_information_rate").get<double>();
  r.n = j.at("n").get<std::size_t>();
  r.invalid_count = j.at("invalid_count").get<std::size_t>();
  r.invalid_policy = invalid_policy_from_name(j.at("invalid_policy").get<std::string>());
  r.confusion = confusion_from_json(j.at("confusion"));
  return r;
}

RegressionReport regression_from_json(const nlohmann::json& j) {
  RegressionReport r;
  r.rmse = json_number(j, "rmse");
  r.mae = json_number(j, "mae");
  if (!j.at("pearson_r").is_null()) r.pearson_r = j.at("pearson_r").get<double>();
  r.n = j.at("n").get<std::size_t>();
  r.invalid_count = j.at("invalid_count").get<std::size_t>();
  return r;
}

}  // namespace vislint

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "vislint/answer_parsing.hpp"

namespace vislint {

// How Invalid predictions enter classification scores. penalize keeps them as
// a separate, always-wrong "invalid" column; drop removes those pairs.
enum class InvalidPolicy { penalize, drop };

std::string_view to_string(InvalidPolicy p);
InvalidPolicy invalid_policy_from_name(std::string_view name);

inline constexpr std::string_view kInvalidClass = "invalid";

// Rows are ground truth, columns predictions. Classes: truth classes (sorted),
// then classes only ever predicted (sorted), then "invalid" if present.
struct ConfusionMatrix {
  std::vector<std::string> classes;
  std::vector<std::vector<std::size_t>> counts;
  std::size_t truth_class_count = 0;

  std::size_t total() const;
  std::size_t trace() const;
  std::size_t row_sum(std::size_t i) const;
  std::size_t column_sum(std::size_t j) const;
};

// nullopt predictions are Invalid.
ConfusionMatrix confusion_matrix(std::span<const std::optional<std::string>> preds,
                                 std::span<const std::string> truths);

struct ClassificationReport {
  double macro_precision = 0;
  double macro_recall = 0;
  double macro_f1 = 0;
  double accuracy = 0;
  double balanced_accuracy = 0;
  double no_information_rate = 0;
  std::size_t n = 0;
  std::size_t invalid_count = 0;
  InvalidPolicy invalid_policy = InvalidPolicy::penalize;
  ConfusionMatrix confusion;
};

struct RegressionReport {
  double rmse = 0;
  double mae = 0;
  // Absent when either side has zero variance.
  std::optional<double> pearson_r;
  std::size_t n = 0;
  // Invalid predictions are always dropped pairwise and counted here.
  std::size_t invalid_count = 0;
};

// Share of the most frequent class. Throws EmptyInput.
double no_information_rate(std::span<const std::string> truths);

// Macro averages run over the classes present in the ground truth. A class
// that is never predicted has precision 0. Throws LengthMismatch, EmptyInput,
// and PreconditionError if a truth label is "invalid".
ClassificationReport classification_report(std::span<const std::optional<std::string>> preds,
                                           std::span<const std::string> truths,
                                           InvalidPolicy policy = InvalidPolicy::penalize);
ClassificationReport classification_report(std::span<const ParsedAnswer> preds, std::span<const Label> truths,
                                           InvalidPolicy policy = InvalidPolicy::penalize);

// Throws LengthMismatch and EmptyInput. If every prediction is Invalid the
// report has n = 0 and NaN errors.
RegressionReport regression_report(std::span<const std::optional<double>> preds, std::span<const double> truths);
RegressionReport regression_report(std::span<const ParsedAnswer> preds, std::span<const std::uint64_t> truths);

nlohmann::json to_json(const ConfusionMatrix& m);
nlohmann::json to_json(const ClassificationReport& r);
nlohmann::json to_json(const RegressionReport& r);
ConfusionMatrix confusion_from_json(const nlohmann::json& j);
ClassificationReport classification_from_json(const nlohmann::json& j);
RegressionReport regression_from_json(const nlohmann::json& j);

}  // namespace vislint

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "vislint/answer_parsing.hpp"
#include "vislint/catalog.hpp"
#include "vislint/dataset.hpp"
#include "vislint/metrics.hpp"
#include "vislint/prompting.hpp"

namespace vislint {

inline constexpr int kReportSchemaVersion = 1;

enum class Severity { violation, advisory, info, unknown };

std::string_view to_string(Severity s);
Severity severity_from_name(std::string_view name);

struct Thresholds {
  std::uint64_t max_lines = 5;
  std::uint64_t max_colors = 7;
  std::uint64_t max_legend_groups = 7;
};

// JSON object with any of max_lines, max_colors, max_legend_groups.
Thresholds load_thresholds(const std::filesystem::path& path);

struct Finding {
  int question_id = 0;
  ParsedAnswer verdict;
  std::string rule;
  Severity severity = Severity::unknown;
  bool low_confidence = false;
  std::string note;
  std::vector<RawAnswer> evidence;
};

// Rule identifier attached to every finding of a question.
std::string_view rule_id(int question_id);

// What is known about the image when its answers are judged. Without a
// manifest, type and has_legend come from the question 1 and 11 verdicts.
struct LintContext {
  std::optional<DiagramType> type;
  ExclusionFlags flags;
  std::optional<bool> has_legend;
};

// Context for linting without ground truth.
LintContext context_from_answers(const std::map<int, ParsedAnswer>& answers, ExclusionFlags flags = {});

// Questions that must be answered for the context. With an unknown type the
// type-dependent questions 3..10 are optional and listed in `optional`.
struct RequiredQuestions {
  std::set<int> required;
  std::set<int> optional;
};
RequiredQuestions required_questions(const LintContext& ctx);

// Applies the rule table. Throws PreconditionError unless the answers cover
// exactly the applicable questions.
std::vector<Finding> derive_findings(const std::map<int, ParsedAnswer>& answers, const LintContext& ctx,
                                     const Thresholds& thresholds,
                                     const std::map<int, std::vector<RawAnswer>>& evidence = {});

struct LintReport {
  std::string image_id;
  std::optional<DiagramType> diagram_type;
  std::vector<Finding> findings;
  Strategy strategy = Strategy::individual;
  std::string model_name;
  // Diagnostics of conversations that failed.
  std::vector<std::string> errors;

  bool has_violation() const;
};

struct QuestionResult {
  int question_id = 0;
  std::size_t n = 0;
  std::optional<ClassificationReport> classification;
  std::optional<RegressionReport> regression;
};

struct AggregateReport {
  Strategy strategy = Strategy::individual;
  std::string model_name;
  std::vector<QuestionResult> questions;

  const QuestionResult* find(int question_id) const;
};

// image_id -> question id -> verdict.
using VerdictTable = std::map<std::string, std::map<int, ParsedAnswer>>;

// Scores every question over its applicable subset of `records`. Records with
// no verdict for an applicable question count as Invalid. Throws
// MissingGroundTruth when verdicts name unknown images or an applicable record
// lacks a label.
AggregateReport aggregate_verdicts(const VerdictTable& verdicts, const std::vector<AnnotationRecord>& records,
                                   Strategy strategy, const std::string& model_name,
                                   InvalidPolicy policy = InvalidPolicy::penalize);

AggregateReport aggregate(const std::vector<LintReport>& reports, const std::vector<AnnotationRecord>& records,
                          InvalidPolicy policy = InvalidPolicy::penalize);

enum class Format { json, markdown };

Format format_from_name(std::string_view name);

nlohmann::json to_json(const ParsedAnswer& verdict);
ParsedAnswer verdict_from_json(const nlohmann::json& j);

nlohmann::json to_json(const LintReport& report);
nlohmann::json to_json(const AggregateReport& report);
LintReport lint_report_from_json(const nlohmann::json& j);
AggregateReport aggregate_from_json(const nlohmann::json& j);

std::string render(const LintReport& report, Format format);
std::string render(const AggregateReport& report, Format format);
// One table per question with a row per strategy/model.
std::string render_comparison(const std::vector<AggregateReport>& reports, Format format);

}  // namespace vislint

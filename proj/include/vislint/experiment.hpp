#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vislint/backend.hpp"
#include "vislint/dataset.hpp"
#include "vislint/lint_report.hpp"
#include "vislint/metrics.hpp"
#include "vislint/prompting.hpp"

namespace vislint {

// One persisted model reply. Rows are unique by
// (image_id, question_id, strategy, model, turn_index).
struct AnswerRow {
  std::string image_id;
  int question_id = 0;
  std::string strategy;
  std::string model;
  int turn_index = 0;
  std::string text;
  // The reply that is parsed into the question's verdict.
  bool extract = false;

  friend bool operator==(const AnswerRow&, const AnswerRow&) = default;
};

nlohmann::json to_json(const AnswerRow& row);
AnswerRow answer_row_from_json(const nlohmann::json& j);

// Reads a JSONL answer log. A missing file is an empty log; a torn final line
// (interrupted write) is ignored.
std::vector<AnswerRow> load_answers(const std::filesystem::path& path);

struct RunConfig {
  Strategy strategy = Strategy::individual;
  // Recorded in every row; selects which rows a rerun may reuse.
  std::string model_name;
  Thresholds thresholds;
  std::size_t parallelism = 4;
  std::vector<FewShotExemplar> exemplars;
  PlanOptions plan_options;
  InvalidPolicy invalid_policy = InvalidPolicy::penalize;
};

struct ExperimentResult {
  AggregateReport report;
  std::vector<LintReport> lint_reports;
  // "<image_id>: <diagnostic>" for every conversation that failed.
  std::vector<std::string> errors;
  std::size_t scripts_run = 0;
  std::size_t scripts_reused = 0;
};

// Runs the strategy over every record with bounded parallelism, appending new
// replies to `answers_log`. Conversations whose replies are already logged are
// replayed instead of re-sent. A failing image only yields Invalid verdicts.
ExperimentResult run_experiment(const RunConfig& config, ChatBackend& backend,
                                const std::vector<AnnotationRecord>& records,
                                const std::filesystem::path& answers_log);

// Offline re-scoring of a logged run.
AggregateReport evaluate_answers(const std::vector<AnswerRow>& rows, const std::vector<AnnotationRecord>& records,
                                 Strategy strategy, const std::string& model_name,
                                 InvalidPolicy policy = InvalidPolicy::penalize);

// Lints one image. With a manifest record the questions and rules follow its
// ground truth; without one all questions are asked and the type and legend
// come from the model's own answers to questions 1 and 11.
LintReport lint_image(const std::string& image_id, const std::optional<ImagePayload>& image, ChatBackend& backend,
                      const RunConfig& config, const AnnotationRecord* record = nullptr);

}  // namespace vislint

#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vislint/answer_parsing.hpp"
#include "vislint/backend.hpp"
#include "vislint/catalog.hpp"

namespace vislint {

enum class Strategy { individual, context, elaborate, summary, introduction_question, few_shot };

// Short CLI names: individual, context, elaborate, summary, intro, fewshot.
std::string_view to_string(Strategy s);
Strategy strategy_from_name(std::string_view name);

inline constexpr std::array<Strategy, 6> kAllStrategies = {
    Strategy::individual, Strategy::context,             Strategy::elaborate,
    Strategy::summary,    Strategy::introduction_question, Strategy::few_shot,
};

struct Turn {
  Role role = Role::user;
  std::string text;
  // Attach the image under review to this turn.
  bool attach_image = false;
  // Few-shot turns carry their own exemplar image instead.
  std::optional<std::string> exemplar_image;

  friend bool operator==(const Turn&, const Turn&) = default;
};

struct Extraction {
  int question_id = 0;
  int model_turn = 0;

  friend bool operator==(const Extraction&, const Extraction&) = default;
};

// Turn-by-turn plan for one conversation. A user turn that is not followed by a
// scripted assistant turn is answered by the model.
struct ConversationScript {
  std::vector<Turn> turns;
  int expected_model_turns = 0;
  // Which model turn holds the answer to each question in this script.
  std::vector<Extraction> extractions;
  // Question each model turn is attributed to, indexed by model turn.
  std::vector<int> turn_questions;

  friend bool operator==(const ConversationScript&, const ConversationScript&) = default;
};

struct FewShotExemplar {
  std::string image;
  int question_id = 0;
  std::string answer;
};

// JSON array of {question_id, image, answer}; relative image paths resolve
// against the file's directory.
std::vector<FewShotExemplar> load_exemplars(const std::filesystem::path& path);

inline constexpr std::string_view kSystemPrompt =
    "You are a helpful assistant specializing in scientific visualization. Your task is to help "
    "researchers assess and improve plots in their scientific papers.";

inline constexpr std::string_view kElaboratePrompt = "Are you sure? Please elaborate on your answer.";

// Empty in chart-specific mode, where the model has no system role.
std::string build_system_prompt(bool chart_specific_mode);
std::string_view answer_spec(AnswerKind kind);

struct IntroGroup {
  std::vector<int> questions;
  std::string_view prompt;
};

std::span<const IntroGroup> intro_groups();

struct PlanOptions {
  bool chart_specific_mode = false;
};

// Throws PreconditionError for an empty or out-of-range question list,
// MissingExemplars for few-shot without exemplars, and PlanError for exemplars
// given to any other strategy.
std::vector<ConversationScript> plan(Strategy strategy, std::span<const int> questions,
                                     std::span<const FewShotExemplar> exemplars = {},
                                     const PlanOptions& options = {});

// Resolves exemplar image paths to payloads.
using ImageLoader = std::function<ImagePayload(const std::string&)>;

// Drives one script against a backend. Turns go out strictly in order and each
// reply joins the context before the next user turn. Throws BackendError.
std::vector<RawAnswer> execute(const ConversationScript& script, ChatBackend& backend, const std::string& image_id,
                               const std::optional<ImagePayload>& image, const ImageLoader& loader = {});

struct ScriptOutcome {
  std::vector<RawAnswer> replies;
  std::map<int, ParsedAnswer> verdicts;
  std::map<int, std::vector<RawAnswer>> evidence;
  std::optional<std::string> error;
};

// Parses the extraction turns of a completed conversation.
ScriptOutcome parse_outcome(const ConversationScript& script, std::vector<RawAnswer> replies);

// execute() plus parsing of the extraction turns. A backend failure does not
// throw: every question of the script comes back Invalid and `error` is set.
ScriptOutcome run_script(const ConversationScript& script, ChatBackend& backend, const std::string& image_id,
                         const std::optional<ImagePayload>& image, const ImageLoader& loader = {});

}  // namespace vislint

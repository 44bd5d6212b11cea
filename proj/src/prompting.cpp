#include "vislint/prompting.hpp"

#include <algorithm>
#include <array>
#include <fstream>

#include <nlohmann/json.hpp>

#include "vislint/errors.hpp"

namespace vislint {

namespace {

const std::array<IntroGroup, 6> kIntroGroups = {{
    {{1, 2}, "Please describe the diagram type and any 3D effects."},
    {{3, 4, 5}, "Please describe the axes and their labels."},
    {{6, 7, 8}, "Please describe the axes, tick marks and tick labels of the diagram."},
    {{9, 10}, "Please describe the lines and colors used in the diagram."},
    {{11, 12}, "Please describe the legend of the diagram."},
    {{13}, "Please describe the overall image quality."},
}};

std::string with_spec(int question_id) {
  const auto& q = question(question_id);
  return std::string(q.text) + " " + std::string(answer_spec(q.kind));
}

// Fills expected_model_turns from the turn list: every user turn that is not
// answered by a scripted assistant turn waits for the model.
void count_model_turns(ConversationScript& s) {
  int n = 0;
  for (std::size_t i = 0; i < s.turns.size(); ++i) {
    if (s.turns[i].role != Role::user) continue;
    const bool scripted = i + 1 < s.turns.size() && s.turns[i + 1].role == Role::assistant;
    if (!scripted) ++n;
  }
  s.expected_model_turns = n;
}

ConversationScript start_script(const PlanOptions& options) {
  ConversationScript s;
  const auto sys = build_system_prompt(options.chart_specific_mode);
  if (!sys.empty()) s.turns.push_back({Role::system, sys, false, std::nullopt});
  return s;
}

std::vector<int> normalized_questions(std::span<const int> questions) {
  if (questions.empty()) throw PreconditionError("plan needs at least one question");
  std::vector<int> out(questions.begin(), questions.end());
  for (int q : out) (void)question(q);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::individual: return "individual";
    case Strategy::context: return "context";
    case Strategy::elaborate: return "elaborate";
    case Strategy::summary: return "summary";
    case Strategy::introduction_question: return "intro";
    case Strategy::few_shot: return "fewshot";
  }
  return "?";
}

Strategy strategy_from_name(std::string_view name) {
  for (auto s : kAllStrategies) {
    if (to_string(s) == name) return s;
  }
  if (name == "introduction" || name == "introduction-question") return Strategy::introduction_question;
  if (name == "few-shot") return Strategy::few_shot;
  throw PreconditionError("unknown strategy '" + std::string(name) + "'");
}

std::vector<FewShotExemplar> load_exemplars(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open exemplar file " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error("exemplar file " + path.string() + ": " + e.what());
  }
  if (!doc.is_array()) throw Error("exemplar file " + path.string() + ": expected a JSON array");
  std::vector<FewShotExemplar> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& e = doc[i];
    if (!e.is_object() || !e.contains("question_id") || !e["question_id"].is_number_integer() ||
        !e.contains("image") || !e["image"].is_string() || !e.contains("answer") || !e["answer"].is_string()) {
      throw Error("exemplar " + std::to_string(i) + ": needs integer question_id and string image/answer");
    }
    FewShotExemplar ex;
    ex.question_id = e["question_id"].get<int>();
    (void)question(ex.question_id);
    std::filesystem::path img = e["image"].get<std::string>();
    if (img.is_relative()) img = path.parent_path() / img;
    ex.image = img.string();
    ex.answer = e["answer"].get<std::string>();
    out.push_back(std::move(ex));
  }
  return out;
}

std::string build_system_prompt(bool chart_specific_mode) {
  if (chart_specific_mode) return {};
  return std::string(kSystemPrompt);
}

std::string_view answer_spec(AnswerKind kind) {
  switch (kind) {
    case AnswerKind::yes_no: return "Please answer the question with a single \"yes\" or \"no\".";
    case AnswerKind::count: return "Please answer the question with a single whole number (e.g. 1, 2, or 3).";
    case AnswerKind::type_choice: return "Please answer the question with one of the given options only.";
  }
  return {};
}

std::span<const IntroGroup> intro_groups() { return kIntroGroups; }

std::vector<ConversationScript> plan(Strategy strategy, std::span<const int> questions,
                                     std::span<const FewShotExemplar> exemplars, const PlanOptions& options) {
  const auto qs = normalized_questions(questions);
  if (strategy == Strategy::few_shot && exemplars.empty()) {
    throw MissingExemplars("few-shot strategy needs at least one exemplar");
  }
  if (strategy != Strategy::few_shot && !exemplars.empty()) {
    throw PlanError("exemplars are only used by the few-shot strategy");
  }

  std::vector<ConversationScript> scripts;
  switch (strategy) {
    case Strategy::individual:
    case Strategy::few_shot:
      for (int q : qs) {
        auto s = start_script(options);
        for (const auto& ex : exemplars) {
          if (ex.question_id != q) continue;
          s.turns.push_back({Role::user, with_spec(q), false, ex.image});
          s.turns.push_back({Role::assistant, ex.answer, false, std::nullopt});
        }
        s.turns.push_back({Role::user, with_spec(q), true, std::nullopt});
        s.extractions = {{q, 0}};
        s.turn_questions = {q};
        scripts.push_back(std::move(s));
      }
      break;

    case Strategy::context: {
      auto s = start_script(options);
      for (std::size_t i = 0; i < qs.size(); ++i) {
        s.turns.push_back({Role::user, with_spec(qs[i]), i == 0, std::nullopt});
        s.extractions.push_back({qs[i], static_cast<int>(i)});
        s.turn_questions.push_back(qs[i]);
      }
      scripts.push_back(std::move(s));
      break;
    }

    case Strategy::elaborate:
      for (int q : qs) {
        auto s = start_script(options);
        const auto spec = std::string(answer_spec(question(q).kind));
        s.turns.push_back({Role::user, with_spec(q), true, std::nullopt});
        s.turns.push_back({Role::user, std::string(kElaboratePrompt), false, std::nullopt});
        s.turns.push_back({Role::user, "Please give your final answer. " + spec, false, std::nullopt});
        s.extractions = {{q, 2}};
        s.turn_questions = {q, q, q};
        scripts.push_back(std::move(s));
      }
      break;

    case Strategy::summary:
      for (int q : qs) {
        auto s = start_script(options);
        const auto spec = std::string(answer_spec(question(q).kind));
        s.turns.push_back({Role::user, std::string(question(q).text), true, std::nullopt});
        s.turns.push_back({Role::user, "Please summarize your answer. " + spec, false, std::nullopt});
        s.extractions = {{q, 1}};
        s.turn_questions = {q, q};
        scripts.push_back(std::move(s));
      }
      break;

    case Strategy::introduction_question:
      for (const auto& group : kIntroGroups) {
        std::vector<int> members;
        for (int q : group.questions) {
          if (std::binary_search(qs.begin(), qs.end(), q)) members.push_back(q);
        }
        if (members.empty()) continue;
        auto s = start_script(options);
        s.turns.push_back({Role::user, std::string(group.prompt), true, std::nullopt});
        s.turn_questions.push_back(members.front());
        for (std::size_t i = 0; i < members.size(); ++i) {
          s.turns.push_back({Role::user, with_spec(members[i]), false, std::nullopt});
          s.extractions.push_back({members[i], static_cast<int>(i + 1)});
          s.turn_questions.push_back(members[i]);
        }
        scripts.push_back(std::move(s));
      }
      break;
  }

  for (auto& s : scripts) count_model_turns(s);
  return scripts;
}

std::vector<RawAnswer> execute(const ConversationScript& script, ChatBackend& backend, const std::string& image_id,
                               const std::optional<ImagePayload>& image, const ImageLoader& loader) {
  const bool want_bytes = backend.needs_image_bytes();
  std::vector<ChatMessage> context;
  context.reserve(script.turns.size() + static_cast<std::size_t>(script.expected_model_turns));
  std::vector<RawAnswer> replies;

  for (std::size_t i = 0; i < script.turns.size(); ++i) {
    const Turn& turn = script.turns[i];
    ChatMessage msg{turn.role, turn.text, std::nullopt};
    if (want_bytes && turn.attach_image) {
      if (!image) throw PreconditionError("script attaches an image but none was supplied for " + image_id);
      msg.image = image;
    }
    if (want_bytes && turn.exemplar_image) {
      msg.image = loader ? loader(*turn.exemplar_image) : load_image(*turn.exemplar_image);
    }
    context.push_back(std::move(msg));

    if (turn.role != Role::user) continue;
    if (i + 1 < script.turns.size() && script.turns[i + 1].role == Role::assistant) continue;

    const int model_turn = static_cast<int>(replies.size());
    const int qid = model_turn < static_cast<int>(script.turn_questions.size())
                        ? script.turn_questions[static_cast<std::size_t>(model_turn)]
                        : 0;
    std::string reply = backend.complete(context, CallKey{image_id, qid, model_turn});
    context.push_back({Role::assistant, reply, std::nullopt});
    replies.push_back({std::move(reply), model_turn});
  }
  return replies;
}

ScriptOutcome parse_outcome(const ConversationScript& script, std::vector<RawAnswer> replies) {
  if (static_cast<int>(replies.size()) != script.expected_model_turns) {
    throw PreconditionError("script expects " + std::to_string(script.expected_model_turns) + " replies, got " +
                            std::to_string(replies.size()));
  }
  ScriptOutcome out;
  out.replies = std::move(replies);
  for (const auto& r : out.replies) {
    out.evidence[script.turn_questions[static_cast<std::size_t>(r.turn_index)]].push_back(r);
  }
  for (const auto& ex : script.extractions) {
    const auto& raw = out.replies[static_cast<std::size_t>(ex.model_turn)];
    out.verdicts[ex.question_id] = parse_answer(question(ex.question_id).kind, raw);
  }
  return out;
}

ScriptOutcome run_script(const ConversationScript& script, ChatBackend& backend, const std::string& image_id,
                         const std::optional<ImagePayload>& image, const ImageLoader& loader) {
  std::vector<RawAnswer> replies;
  try {
    replies = execute(script, backend, image_id, image, loader);
  } catch (const Error& e) {
    ScriptOutcome out;
    out.error = e.what();
    for (const auto& ex : script.extractions) out.verdicts[ex.question_id] = ParsedAnswer::invalid();
    return out;
  }
  return parse_outcome(script, std::move(replies));
}

}  // namespace vislint

#include "vislint/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iterator>
#include <map>
#include <mutex>
#include <thread>
#include <tuple>

#include "vislint/errors.hpp"

namespace vislint {

namespace {

using TurnKey = std::tuple<std::string, int, int>;  // image, question, turn
using ReplyIndex = std::map<TurnKey, std::string>;

struct ImageResult {
  std::vector<AnswerRow> new_rows;
  std::map<int, ParsedAnswer> verdicts;
  std::map<int, std::vector<RawAnswer>> evidence;
  std::vector<std::string> errors;
  std::size_t run = 0;
  std::size_t reused = 0;
};

void merge_outcome(ImageResult& out, ScriptOutcome&& outcome) {
  for (auto& [q, v] : outcome.verdicts) out.verdicts[q] = v;
  for (auto& [q, ev] : outcome.evidence) {
    auto& dst = out.evidence[q];
    dst.insert(dst.end(), ev.begin(), ev.end());
  }
}

std::optional<std::vector<RawAnswer>> replay(const ConversationScript& script, const std::string& image_id,
                                             const ReplyIndex& index) {
  std::vector<RawAnswer> replies;
  for (int t = 0; t < script.expected_model_turns; ++t) {
    auto it = index.find({image_id, script.turn_questions[static_cast<std::size_t>(t)], t});
    if (it == index.end()) return std::nullopt;
    replies.push_back({it->second, t});
  }
  return replies;
}

ImageResult process_image(const AnnotationRecord& rec, const std::vector<ConversationScript>& scripts,
                          const ReplyIndex& index, ChatBackend& backend, const RunConfig& config) {
  ImageResult out;
  std::optional<ImagePayload> image;
  std::optional<std::string> image_error;
  bool image_loaded = false;

  for (const auto& script : scripts) {
    if (auto replies = replay(script, rec.image_id, index)) {
      merge_outcome(out, parse_outcome(script, std::move(*replies)));
      ++out.reused;
      continue;
    }
    ++out.run;
    if (!image_loaded && backend.needs_image_bytes()) {
      try {
        image = load_image(rec.path);
      } catch (const Error& e) {
        image_error = e.what();
      }
    }
    image_loaded = true;
    if (image_error) {
      out.errors.push_back(rec.image_id + ": " + *image_error);
      for (const auto& ex : script.extractions) out.verdicts[ex.question_id] = ParsedAnswer::invalid();
      continue;
    }

    auto outcome = run_script(script, backend, rec.image_id, image);
    if (outcome.error) {
      out.errors.push_back(rec.image_id + ": " + *outcome.error);
    } else {
      std::set<int> extracted_turns;
      for (const auto& ex : script.extractions) extracted_turns.insert(ex.model_turn);
      for (const auto& r : outcome.replies) {
        out.new_rows.push_back({rec.image_id, script.turn_questions[static_cast<std::size_t>(r.turn_index)],
                                std::string(to_string(config.strategy)), config.model_name, r.turn_index, r.text,
                                extracted_turns.count(r.turn_index) > 0});
      }
    }
    merge_outcome(out, std::move(outcome));
  }
  std::sort(out.new_rows.begin(), out.new_rows.end(), [](const AnswerRow& a, const AnswerRow& b) {
    return std::tie(a.question_id, a.turn_index) < std::tie(b.question_id, b.turn_index);
  });
  return out;
}

// Appends rows to the log, healing a torn final line first.
// An interrupted write leaves an unterminated last line; cut it off so new
// rows start on a fresh line.
void drop_torn_tail(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) return;
  std::string text;
  {
    std::ifstream in(path, std::ios::binary);
    text.assign(std::istreambuf_iterator<char>(in), {});
  }
  if (text.empty() || text.back() == '\n') return;
  const auto keep = text.rfind('\n');
  std::filesystem::resize_file(path, keep == std::string::npos ? 0 : keep + 1);
}

class AnswerWriter {
public:
  explicit AnswerWriter(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    drop_torn_tail(path);
    out_.open(path, std::ios::app | std::ios::binary);
    if (!out_) throw Error("cannot open answer log " + path.string());
  }

  void write(const std::vector<AnswerRow>& rows) {
    for (const auto& r : rows) out_ << to_json(r).dump() << '\n';
    out_.flush();
  }

private:
  std::ofstream out_;
};

LintContext context_from_record(const AnnotationRecord& rec) { return {rec.type, rec.flags, rec.has_legend()}; }

}  // namespace

nlohmann::json to_json(const AnswerRow& row) {
  return {{"image_id", row.image_id}, {"question_id", row.question_id}, {"strategy", row.strategy},
          {"model", row.model},       {"turn_index", row.turn_index},   {"text", row.text},
          {"extract", row.extract}};
}

AnswerRow answer_row_from_json(const nlohmann::json& j) {
  AnswerRow r;
  r.image_id = j.at("image_id").get<std::string>();
  r.question_id = j.at("question_id").get<int>();
  r.strategy = j.at("strategy").get<std::string>();
  r.model = j.at("model").get<std::string>();
  r.turn_index = j.at("turn_index").get<int>();
  r.text = j.at("text").get<std::string>();
  r.extract = j.value("extract", false);
  return r;
}

std::vector<AnswerRow> load_answers(const std::filesystem::path& path) {
  std::vector<AnswerRow> rows;
  std::ifstream in(path);
  if (!in) return rows;
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) lines.push_back(std::move(line));
  }
  for (std::size_t i = 0; i < lines.size(); ++i) {
    try {
      rows.push_back(answer_row_from_json(nlohmann::json::parse(lines[i])));
    } catch (const nlohmann::json::exception& e) {
      if (i + 1 == lines.size()) break;
      throw Error("answer log " + path.string() + ", line " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return rows;
}

ExperimentResult run_experiment(const RunConfig& config, ChatBackend& backend,
                                const std::vector<AnnotationRecord>& records,
                                const std::filesystem::path& answers_log) {
  if (config.parallelism < 1) throw PreconditionError("parallelism must be at least 1");
  const std::string strategy_name(to_string(config.strategy));

  std::vector<const AnnotationRecord*> sorted;
  for (const auto& r : records) {
    if (!r.type) throw PreconditionError("record " + r.image_id + " has no consolidated diagram type");
    sorted.push_back(&r);
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const AnnotationRecord* a, const AnnotationRecord* b) { return a->image_id < b->image_id; });

  ReplyIndex index;
  for (auto& row : load_answers(answers_log)) {
    if (row.strategy == strategy_name && row.model == config.model_name) {
      index.emplace(TurnKey{row.image_id, row.question_id, row.turn_index}, std::move(row.text));
    }
  }

  std::vector<std::vector<ConversationScript>> plans;
  plans.reserve(sorted.size());
  for (const auto* rec : sorted) {
    const auto qs = applicable_questions(applicability(*rec));
    const std::vector<int> ids(qs.begin(), qs.end());
    plans.push_back(plan(config.strategy, ids, config.exemplars, config.plan_options));
  }

  AnswerWriter writer(answers_log);
  std::vector<std::optional<ImageResult>> results(sorted.size());
  std::mutex commit_mutex;
  std::size_t next_commit = 0;
  std::atomic<std::size_t> next_task{0};

  auto worker = [&] {
    for (std::size_t i = next_task++; i < sorted.size(); i = next_task++) {
      ImageResult r = process_image(*sorted[i], plans[i], index, backend, config);
      std::lock_guard lock(commit_mutex);
      results[i] = std::move(r);
      // Commit in image order so the log is byte-identical across runs.
      while (next_commit < results.size() && results[next_commit]) {
        writer.write(results[next_commit]->new_rows);
        results[next_commit]->new_rows.clear();
        ++next_commit;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const std::size_t n = std::min(config.parallelism, std::max<std::size_t>(sorted.size(), 1));
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
  }

  ExperimentResult out;
  VerdictTable table;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto& rec = *sorted[i];
    auto& r = *results[i];
    out.scripts_run += r.run;
    out.scripts_reused += r.reused;
    out.errors.insert(out.errors.end(), r.errors.begin(), r.errors.end());

    LintReport lr;
    lr.image_id = rec.image_id;
    lr.diagram_type = rec.type;
    lr.strategy = config.strategy;
    lr.model_name = config.model_name;
    lr.errors = r.errors;
    lr.findings = derive_findings(r.verdicts, context_from_record(rec), config.thresholds, r.evidence);
    out.lint_reports.push_back(std::move(lr));
    table[rec.image_id] = std::move(r.verdicts);
  }
  out.report = aggregate_verdicts(table, records, config.strategy, config.model_name, config.invalid_policy);
  return out;
}

AggregateReport evaluate_answers(const std::vector<AnswerRow>& rows, const std::vector<AnnotationRecord>& records,
                                 Strategy strategy, const std::string& model_name, InvalidPolicy policy) {
  const std::string strategy_name(to_string(strategy));
  VerdictTable table;
  for (const auto& row : rows) {
    if (!row.extract || row.strategy != strategy_name || row.model != model_name) continue;
    table[row.image_id][row.question_id] = parse_answer(question(row.question_id).kind, {row.text, row.turn_index});
  }
  return aggregate_verdicts(table, records, strategy, model_name, policy);
}

LintReport lint_image(const std::string& image_id, const std::optional<ImagePayload>& image, ChatBackend& backend,
                      const RunConfig& config, const AnnotationRecord* record) {
  std::vector<int> ids;
  if (record) {
    const auto qs = applicable_questions(applicability(*record));
    ids.assign(qs.begin(), qs.end());
  } else {
    for (const auto& q : catalog()) ids.push_back(q.id);
  }

  LintReport report;
  report.image_id = image_id;
  report.strategy = config.strategy;
  report.model_name = config.model_name;

  std::map<int, ParsedAnswer> verdicts;
  std::map<int, std::vector<RawAnswer>> evidence;
  for (const auto& script : plan(config.strategy, ids, config.exemplars, config.plan_options)) {
    auto outcome = run_script(script, backend, image_id, image);
    if (outcome.error) report.errors.push_back(*outcome.error);
    for (auto& [q, v] : outcome.verdicts) verdicts[q] = v;
    for (auto& [q, ev] : outcome.evidence) evidence[q] = std::move(ev);
  }

  LintContext ctx;
  if (record) {
    ctx = context_from_record(*record);
  } else {
    ctx = context_from_answers(verdicts);
    // Drop answers the model's own type/legend verdicts make inapplicable.
    const auto req = required_questions(ctx);
    std::erase_if(verdicts, [&](const auto& kv) {
      return !req.required.count(kv.first) && !req.optional.count(kv.first);
    });
  }
  report.diagram_type = ctx.type;
  report.findings = derive_findings(verdicts, ctx, config.thresholds, evidence);
  return report;
}

}  // namespace vislint

#include "vislint/lint_report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "vislint/errors.hpp"

namespace vislint {

namespace {

std::string percent(double v) {
  if (!std::isfinite(v)) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f %%", v * 100.0);
  return buf;
}

std::string fixed2(double v) {
  if (!std::isfinite(v)) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string bold_if(const std::string& s, bool bold) { return bold ? "**" + s + "**" : s; }

std::string ids_to_string(const std::set<int>& ids) {
  std::string out;
  for (int id : ids) {
    if (!out.empty()) out += ",";
    out += std::to_string(id);
  }
  return out;
}

bool fits_kind(const ParsedAnswer& v, AnswerKind kind) {
  switch (kind) {
    case AnswerKind::yes_no: return v.is_invalid() || v.as_yes_no().has_value();
    case AnswerKind::count: return v.is_invalid() || v.as_number().has_value();
    case AnswerKind::type_choice: return v.is_invalid() || v.as_type().has_value();
  }
  return false;
}

Finding judge(int qid, const ParsedAnswer& verdict, const LintContext& ctx, const Thresholds& th) {
  Finding f;
  f.question_id = qid;
  f.verdict = verdict;
  f.rule = std::string(rule_id(qid));
  f.low_confidence = qid == 13;
  if (verdict.is_invalid()) {
    f.severity = Severity::unknown;
    return f;
  }

  auto over = [&](std::uint64_t limit) { return *verdict.as_number() > limit ? Severity::advisory : Severity::info; };
  switch (qid) {
    case 1:
      f.severity = verdict.as_type() == DiagramType::pie ? Severity::advisory : Severity::info;
      break;
    case 2:
      if (!*verdict.as_yes_no()) {
        f.severity = Severity::info;
      } else if (!ctx.type) {
        f.verdict = ParsedAnswer::invalid();
        f.severity = Severity::unknown;
        f.note = "diagram type unknown";
      } else {
        f.severity = *ctx.type == DiagramType::surface ? Severity::info : Severity::violation;
      }
      break;
    case 3:
    case 4:
    case 5:
    case 6:
    case 7:
    case 8:
    case 11:
      f.severity = *verdict.as_yes_no() ? Severity::info : Severity::violation;
      break;
    case 9: f.severity = over(th.max_lines); break;
    case 10: f.severity = over(th.max_colors); break;
    case 12: f.severity = over(th.max_legend_groups); break;
    case 13: f.severity = *verdict.as_yes_no() ? Severity::advisory : Severity::info; break;
  }
  if (!ctx.type && depends_on_type(qid)) {
    f.verdict = ParsedAnswer::invalid();
    f.severity = Severity::unknown;
    f.note = "diagram type unknown";
  }
  return f;
}

nlohmann::json raw_to_json(const RawAnswer& r) { return {{"text", r.text}, {"turn_index", r.turn_index}}; }

RawAnswer raw_from_json(const nlohmann::json& j) {
  return {j.at("text").get<std::string>(), j.at("turn_index").get<int>()};
}

}  // namespace

std::string_view to_string(Severity s) {
  switch (s) {
    case Severity::violation: return "violation";
    case Severity::advisory: return "advisory";
    case Severity::info: return "info";
    case Severity::unknown: return "unknown";
  }
  return "?";
}

Severity severity_from_name(std::string_view name) {
  for (auto s : {Severity::violation, Severity::advisory, Severity::info, Severity::unknown}) {
    if (to_string(s) == name) return s;
  }
  throw PreconditionError("unknown severity '" + std::string(name) + "'");
}

Thresholds load_thresholds(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open thresholds file " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error("thresholds file " + path.string() + ": " + e.what());
  }
  if (!doc.is_object()) throw Error("thresholds file must hold a JSON object");
  Thresholds t;
  auto read = [&](const char* key, std::uint64_t& dst) {
    if (!doc.contains(key)) return;
    if (!doc[key].is_number_integer() || doc[key].get<std::int64_t>() < 0) {
      throw Error(std::string("threshold '") + key + "' must be a non-negative integer");
    }
    dst = doc[key].get<std::uint64_t>();
  };
  read("max_lines", t.max_lines);
  read("max_colors", t.max_colors);
  read("max_legend_groups", t.max_legend_groups);
  return t;
}

std::string_view rule_id(int question_id) {
  switch (question_id) {
    case 1: return "pie-discouraged";
    case 2: return "unnecessary-3D";
    case 3: return "missing-axis-labels";
    case 4:
    case 5: return "missing-axis-label";
    case 6:
    case 7:
    case 8: return "missing-ticks";
    case 9: return "too-many-lines";
    case 10: return "too-many-colors";
    case 11: return "missing-legend";
    case 12: return "too-many-legend-groups";
    case 13: return "compression-artifacts";
    default: throw PreconditionError("question id out of range: " + std::to_string(question_id));
  }
}

LintContext context_from_answers(const std::map<int, ParsedAnswer>& answers, ExclusionFlags flags) {
  LintContext ctx;
  ctx.flags = flags;
  if (auto it = answers.find(1); it != answers.end()) ctx.type = it->second.as_type();
  if (auto it = answers.find(11); it != answers.end()) ctx.has_legend = it->second.as_yes_no();
  return ctx;
}

RequiredQuestions required_questions(const LintContext& ctx) {
  RequiredQuestions out;
  if (ctx.type) {
    out.required = applicable_questions({*ctx.type, ctx.flags, ctx.has_legend});
    return out;
  }
  // Questions 1, 2, 11, 12 and 13 do not depend on the type; any type works here.
  const ApplicabilityInput probe{DiagramType::line, ctx.flags, ctx.has_legend};
  for (int q = 1; q <= kQuestionCount; ++q) {
    if (depends_on_type(q)) {
      out.optional.insert(q);
    } else if (is_applicable(q, probe)) {
      out.required.insert(q);
    }
  }
  return out;
}

std::vector<Finding> derive_findings(const std::map<int, ParsedAnswer>& answers, const LintContext& ctx,
                                     const Thresholds& thresholds,
                                     const std::map<int, std::vector<RawAnswer>>& evidence) {
  const auto req = required_questions(ctx);
  std::set<int> missing, extra;
  for (int q : req.required) {
    if (!answers.count(q)) missing.insert(q);
  }
  for (const auto& [q, _] : answers) {
    if (!req.required.count(q) && !req.optional.count(q)) extra.insert(q);
  }
  if (!missing.empty() || !extra.empty()) {
    throw PreconditionError("answers must cover exactly the applicable questions (missing: " +
                            ids_to_string(missing) + "; not applicable: " + ids_to_string(extra) + ")");
  }

  std::vector<Finding> out;
  for (const auto& [q, verdict] : answers) {
    if (!fits_kind(verdict, question(q).kind)) {
      throw PreconditionError("answer to question " + std::to_string(q) + " has the wrong kind");
    }
    auto f = judge(q, verdict, ctx, thresholds);
    if (auto it = evidence.find(q); it != evidence.end()) f.evidence = it->second;
    out.push_back(std::move(f));
  }
  return out;
}

bool LintReport::has_violation() const {
  return std::any_of(findings.begin(), findings.end(),
                     [](const Finding& f) { return f.severity == Severity::violation; });
}

const QuestionResult* AggregateReport::find(int question_id) const {
  for (const auto& q : questions) {
    if (q.question_id == question_id) return &q;
  }
  return nullptr;
}

AggregateReport aggregate_verdicts(const VerdictTable& verdicts, const std::vector<AnnotationRecord>& records,
                                   Strategy strategy, const std::string& model_name, InvalidPolicy policy) {
  std::set<std::string> known;
  for (const auto& r : records) known.insert(r.image_id);
  std::vector<std::string> unmatched;
  for (const auto& [id, _] : verdicts) {
    if (!known.count(id)) unmatched.push_back(id);
  }
  if (!unmatched.empty()) throw MissingGroundTruth(std::move(unmatched));

  std::vector<const AnnotationRecord*> sorted;
  for (const auto& r : records) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(),
            [](const AnnotationRecord* a, const AnnotationRecord* b) { return a->image_id < b->image_id; });

  AggregateReport report;
  report.strategy = strategy;
  report.model_name = model_name;
  std::vector<std::string> unlabeled;
  for (const auto& q : catalog()) {
    std::vector<ParsedAnswer> preds;
    std::vector<Label> truths;
    for (const AnnotationRecord* r : sorted) {
      if (!r->type || !is_applicable(q.id, applicability(*r))) continue;
      std::optional<Label> truth;
      if (const Label* l = r->label(q.id)) {
        truth = *l;
      } else if (q.id == 1) {
        truth = *r->type;
      }
      if (!truth) {
        unlabeled.push_back(r->image_id + ":q" + std::to_string(q.id));
        continue;
      }
      ParsedAnswer verdict;
      if (auto it = verdicts.find(r->image_id); it != verdicts.end()) {
        if (auto v = it->second.find(q.id); v != it->second.end()) verdict = v->second;
      }
      preds.push_back(verdict);
      truths.push_back(*truth);
    }
    if (truths.empty()) continue;

    QuestionResult result;
    result.question_id = q.id;
    result.n = truths.size();
    if (q.kind == AnswerKind::count) {
      std::vector<std::uint64_t> counts;
      for (const auto& t : truths) counts.push_back(std::get<std::uint64_t>(t));
      result.regression = regression_report(preds, counts);
    } else {
      result.classification = classification_report(preds, truths, policy);
    }
    report.questions.push_back(std::move(result));
  }
  if (!unlabeled.empty()) throw MissingGroundTruth(std::move(unlabeled));
  return report;
}

AggregateReport aggregate(const std::vector<LintReport>& reports, const std::vector<AnnotationRecord>& records,
                          InvalidPolicy policy) {
  VerdictTable table;
  Strategy strategy = Strategy::individual;
  std::string model;
  for (const auto& r : reports) {
    auto& row = table[r.image_id];
    for (const auto& f : r.findings) row[f.question_id] = f.verdict;
    strategy = r.strategy;
    model = r.model_name;
  }
  return aggregate_verdicts(table, records, strategy, model, policy);
}

Format format_from_name(std::string_view name) {
  if (name == "json") return Format::json;
  if (name == "markdown" || name == "md") return Format::markdown;
  throw PreconditionError("unknown format '" + std::string(name) + "'");
}

nlohmann::json to_json(const ParsedAnswer& verdict) {
  struct Visitor {
    nlohmann::json operator()(Invalid) const { return {{"kind", "invalid"}}; }
    nlohmann::json operator()(bool b) const { return {{"kind", "yes_no"}, {"value", b}}; }
    nlohmann::json operator()(std::uint64_t n) const { return {{"kind", "number"}, {"value", n}}; }
    nlohmann::json operator()(DiagramType t) const { return {{"kind", "type"}, {"value", to_string(t)}}; }
  };
  return std::visit(Visitor{}, verdict.value());
}

ParsedAnswer verdict_from_json(const nlohmann::json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "invalid") return ParsedAnswer::invalid();
  if (kind == "yes_no") return ParsedAnswer::yes_no(j.at("value").get<bool>());
  if (kind == "number") return ParsedAnswer::number(j.at("value").get<std::uint64_t>());
  if (kind == "type") return ParsedAnswer::type_choice(diagram_type_from_name(j.at("value").get<std::string>()));
  throw PreconditionError("unknown verdict kind '" + kind + "'");
}

nlohmann::json to_json(const LintReport& report) {
  nlohmann::json findings = nlohmann::json::array();
  for (const auto& f : report.findings) {
    nlohmann::json evidence = nlohmann::json::array();
    for (const auto& e : f.evidence) evidence.push_back(raw_to_json(e));
    findings.push_back({{"question_id", f.question_id},
                        {"verdict", to_json(f.verdict)},
                        {"rule", f.rule},
                        {"severity", to_string(f.severity)},
                        {"low_confidence", f.low_confidence},
                        {"note", f.note},
                        {"evidence", evidence}});
  }
  return {{"schema_version", kReportSchemaVersion},
          {"image_id", report.image_id},
          {"diagram_type", report.diagram_type ? nlohmann::json(to_string(*report.diagram_type)) : nlohmann::json()},
          {"strategy", to_string(report.strategy)},
          {"model_name", report.model_name},
          {"findings", findings},
          {"errors", report.errors}};
}

LintReport lint_report_from_json(const nlohmann::json& j) {
  if (j.at("schema_version").get<int>() != kReportSchemaVersion) throw PreconditionError("unsupported schema_version");
  LintReport r;
  r.image_id = j.at("image_id").get<std::string>();
  if (!j.at("diagram_type").is_null()) r.diagram_type = diagram_type_from_name(j["diagram_type"].get<std::string>());
  r.strategy = strategy_from_name(j.at("strategy").get<std::string>());
  r.model_name = j.at("model_name").get<std::string>();
  for (const auto& f : j.at("findings")) {
    Finding out;
    out.question_id = f.at("question_id").get<int>();
    out.verdict = verdict_from_json(f.at("verdict"));
    out.rule = f.at("rule").get<std::string>();
    out.severity = severity_from_name(f.at("severity").get<std::string>());
    out.low_confidence = f.at("low_confidence").get<bool>();
    out.note = f.at("note").get<std::string>();
    for (const auto& e : f.at("evidence")) out.evidence.push_back(raw_from_json(e));
    r.findings.push_back(std::move(out));
  }
  r.errors = j.at("errors").get<std::vector<std::string>>();
  return r;
}

nlohmann::json to_json(const AggregateReport& report) {
  nlohmann::json questions = nlohmann::json::array();
  for (const auto& q : report.questions) {
    nlohmann::json jq = {{"question_id", q.question_id}, {"kind", to_string(question(q.question_id).kind)}, {"n", q.n}};
    if (q.classification) jq["classification"] = to_json(*q.classification);
    if (q.regression) jq["regression"] = to_json(*q.regression);
    questions.push_back(std::move(jq));
  }
  return {{"schema_version", kReportSchemaVersion},
          {"strategy", to_string(report.strategy)},
          {"model_name", report.model_name},
          {"questions", questions}};
}

AggregateReport aggregate_from_json(const nlohmann::json& j) {
  if (j.at("schema_version").get<int>() != kReportSchemaVersion) throw PreconditionError("unsupported schema_version");
  AggregateReport r;
  r.strategy = strategy_from_name(j.at("strategy").get<std::string>());
  r.model_name = j.at("model_name").get<std::string>();
  for (const auto& jq : j.at("questions")) {
    QuestionResult q;
    q.question_id = jq.at("question_id").get<int>();
    q.n = jq.at("n").get<std::size_t>();
    if (jq.contains("classification")) q.classification = classification_from_json(jq["classification"]);
    if (jq.contains("regression")) q.regression = regression_from_json(jq["regression"]);
    r.questions.push_back(std::move(q));
  }
  return r;
}

std::string render(const LintReport& report, Format format) {
  if (format == Format::json) return to_json(report).dump(2);
  std::ostringstream md;
  md << "# Lint report: " << report.image_id << "\n\n";
  md << "- Diagram type: " << (report.diagram_type ? std::string(to_string(*report.diagram_type)) : "unknown") << "\n";
  md << "- Strategy: " << to_string(report.strategy) << "\n";
  md << "- Model: " << report.model_name << "\n\n";
  if (report.findings.empty()) {
    md << "No findings.\n";
  } else {
    md << "| Question | Rule | Severity | Verdict |\n|---|---|---|---|\n";
    for (const auto& f : report.findings) {
      std::string severity(to_string(f.severity));
      if (f.low_confidence) severity += " (low confidence)";
      md << "| " << f.question_id << " | " << f.rule << " | " << severity << " | " << f.verdict.to_string();
      if (!f.note.empty()) md << " (" << f.note << ")";
      md << " |\n";
    }
  }
  for (const auto& e : report.errors) md << "\n> error: " << e << "\n";
  return md.str();
}

std::string render(const AggregateReport& report, Format format) {
  if (format == Format::json) return to_json(report).dump(2);
  std::ostringstream md;
  md << "# Results: strategy " << to_string(report.strategy) << ", model " << report.model_name << "\n\n";

  bool header = false;
  for (const auto& q : report.questions) {
    if (!q.classification) continue;
    if (!header) {
      md << "| Question | Precision | Recall | F1-score | Accuracy | Balanced accuracy |\n"
            "|---|---:|---:|---:|---:|---:|\n";
      header = true;
    }
    const auto& c = *q.classification;
    md << "| Q" << q.question_id << " (n=" << q.n << ", No information rate: " << percent(c.no_information_rate);
    if (c.invalid_count > 0) md << ", invalid: " << c.invalid_count;
    md << ") | " << percent(c.macro_precision) << " | " << percent(c.macro_recall) << " | " << percent(c.macro_f1)
       << " | " << percent(c.accuracy) << " | " << percent(c.balanced_accuracy) << " |\n";
  }

  header = false;
  for (const auto& q : report.questions) {
    if (!q.regression) continue;
    if (!header) {
      md << "\n| Question | n | RMSE | MAE | Pearson's R |\n|---|---:|---:|---:|---:|\n";
      header = true;
    }
    const auto& r = *q.regression;
    md << "| Q" << q.question_id << " | " << r.n;
    if (r.invalid_count > 0) md << " (+" << r.invalid_count << " invalid)";
    md << " | " << fixed2(r.rmse) << " | " << fixed2(r.mae) << " | "
       << (r.pearson_r ? fixed2(*r.pearson_r) : std::string("undefined")) << " |\n";
  }
  return md.str();
}

std::string render_comparison(const std::vector<AggregateReport>& reports, Format format) {
  if (format == Format::json) {
    nlohmann::json all = nlohmann::json::array();
    for (const auto& r : reports) all.push_back(to_json(r));
    return all.dump(2);
  }

  std::ostringstream md;
  md << "# Strategy comparison\n";
  for (const auto& q : catalog()) {
    std::vector<std::pair<std::string, const QuestionResult*>> rows;
    for (const auto& r : reports) {
      if (const auto* res = r.find(q.id)) {
        rows.emplace_back(std::string(to_string(r.strategy)) + " / " + r.model_name, res);
      }
    }
    if (rows.empty()) continue;
    const QuestionResult& first = *rows.front().second;
    md << "\n## Q" << q.id << ": " << q.text << "\n\n";

    if (first.classification) {
      md << "n=" << first.n << ", No information rate: " << percent(first.classification->no_information_rate)
         << "\n\n| Strategy | Precision | Recall | F1-score | Accuracy | Balanced accuracy |\n"
            "|---|---:|---:|---:|---:|---:|\n";
      using Field = double ClassificationReport::*;
      const Field fields[] = {&ClassificationReport::macro_precision, &ClassificationReport::macro_recall,
                              &ClassificationReport::macro_f1, &ClassificationReport::accuracy,
                              &ClassificationReport::balanced_accuracy};
      double best[5];
      for (int k = 0; k < 5; ++k) {
        best[k] = -1;
        for (const auto& [_, res] : rows) {
          if (res->classification) best[k] = std::max(best[k], (*res->classification).*fields[k]);
        }
      }
      for (const auto& [name, res] : rows) {
        if (!res->classification) continue;
        md << "| " << name;
        for (int k = 0; k < 5; ++k) {
          const double v = (*res->classification).*fields[k];
          md << " | " << bold_if(percent(v), rows.size() > 1 && v == best[k]);
        }
        md << " |\n";
      }
    } else {
      md << "n=" << first.n << "\n\n| Strategy | RMSE | MAE | Pearson's R |\n|---|---:|---:|---:|\n";
      double best_rmse = INFINITY, best_mae = INFINITY, best_r = -INFINITY;
      for (const auto& [_, res] : rows) {
        if (!res->regression) continue;
        if (std::isfinite(res->regression->rmse)) best_rmse = std::min(best_rmse, res->regression->rmse);
        if (std::isfinite(res->regression->mae)) best_mae = std::min(best_mae, res->regression->mae);
        if (res->regression->pearson_r) best_r = std::max(best_r, *res->regression->pearson_r);
      }
      const bool multi = rows.size() > 1;
      for (const auto& [name, res] : rows) {
        if (!res->regression) continue;
        const auto& r = *res->regression;
        md << "| " << name << " | " << bold_if(fixed2(r.rmse), multi && r.rmse == best_rmse) << " | "
           << bold_if(fixed2(r.mae), multi && r.mae == best_mae) << " | "
           << (r.pearson_r ? bold_if(fixed2(*r.pearson_r), multi && *r.pearson_r == best_r) : "undefined") << " |\n";
      }
    }
  }
  return md.str();
}

}  // namespace vislint

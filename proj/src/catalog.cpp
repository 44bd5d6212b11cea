#include "vislint/catalog.hpp"

#include <algorithm>
#include <cctype>

#include <nlohmann/json.hpp>

#include "vislint/errors.hpp"

namespace vislint {

namespace {

constexpr std::array<std::string_view, kDiagramTypeCount> kTypeNames = {
    "surface", "box", "pie", "scatter-line", "area", "scatter",
    "bar", "interval", "venn", "line", "heatmap", "manhattan",
};

constexpr std::array<GuidelineQuestion, kQuestionCount> kQuestions = {{
    {1,
     "Which of the following categories best describes the diagram type? surface, box, pie, "
     "scatter-line, area, scatter, bar, interval, venn, line, heatmap, manhattan.",
     AnswerKind::type_choice},
    {2, "Does the diagram visually appear to have a 3D effect?", AnswerKind::yes_no},
    {3, "Do all the axes have labels?", AnswerKind::yes_no},
    {4, "Does the horizontal axis contain an axis label?", AnswerKind::yes_no},
    {5, "Does the vertical axis contain an axis label?", AnswerKind::yes_no},
    {6, "Do all axes have tick marks and tick labels?", AnswerKind::yes_no},
    {7, "Does the horizontal axis have tick marks and tick labels?", AnswerKind::yes_no},
    {8, "Does the vertical axis have tick marks and tick labels?", AnswerKind::yes_no},
    {9, "How many lines does the diagram contain? Do not count the axes.", AnswerKind::count},
    {10, "How many colors are used in the diagram? Do not count black as a color.", AnswerKind::count},
    {11, "Does the diagram contain a legend?", AnswerKind::yes_no},
    {12, "How many groups are used in the legend of the diagram?", AnswerKind::count},
    {13,
     "Does the image contain any compression artifacts (such as visible block structures and halos "
     "around edges or general loss of sharpness and oscillations around high-contrast edges)?",
     AnswerKind::yes_no},
}};

constexpr std::array<std::string_view, 16> kRawTypes = {
    "area",           "line",           "manhattan",           "scatter",
    "scatter-line",   "pie",            "vertical box",        "horizontal box",
    "horizontal bar", "vertical bar",   "horizontal interval", "vertical interval",
    "map",            "heatmap",        "surface",             "venn",
};

struct RawMapping {
  std::string_view raw;
  std::optional<DiagramType> type;
};

constexpr std::array<RawMapping, 16> kRawMappings = {{
    {"area", DiagramType::area},
    {"line", DiagramType::line},
    {"manhattan", DiagramType::manhattan},
    {"scatter", DiagramType::scatter},
    {"scatter-line", DiagramType::scatter_line},
    {"pie", DiagramType::pie},
    {"vertical box", DiagramType::box},
    {"horizontal box", DiagramType::box},
    {"horizontal bar", DiagramType::bar},
    {"vertical bar", DiagramType::bar},
    {"horizontal interval", DiagramType::interval},
    {"vertical interval", DiagramType::interval},
    {"map", std::nullopt},
    {"heatmap", DiagramType::heatmap},
    {"surface", DiagramType::surface},
    {"venn", DiagramType::venn},
}};

bool has_suffix(const std::string& s, std::string_view suffix) {
  return s.size() > suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string normalize_label(std::string_view raw) {
  std::string out;
  bool pending_space = false;
  for (char c : raw) {
    auto uc = static_cast<unsigned char>(c);
    if (std::isspace(uc) || c == '_') {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(uc)));
  }
  for (std::string_view suffix : {" chart", " plot", " diagram"}) {
    if (has_suffix(out, suffix)) {
      out.erase(out.size() - suffix.size());
      break;
    }
  }
  if (out == "scatter line") out = "scatter-line";
  if (out == "heat map") out = "heatmap";
  return out;
}

}  // namespace

std::string_view to_string(DiagramType t) { return kTypeNames[static_cast<std::size_t>(t)]; }

DiagramType diagram_type_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kTypeNames.size(); ++i) {
    if (kTypeNames[i] == name) return static_cast<DiagramType>(i);
  }
  throw UnknownType(std::string(name));
}

std::string_view to_string(AnswerKind k) {
  switch (k) {
    case AnswerKind::yes_no: return "yes_no";
    case AnswerKind::count: return "count";
    case AnswerKind::type_choice: return "type_choice";
  }
  return "?";
}

std::span<const GuidelineQuestion, kQuestionCount> catalog() { return kQuestions; }

const GuidelineQuestion& question(int id) {
  if (id < 1 || id > kQuestionCount) throw PreconditionError("question id out of range: " + std::to_string(id));
  return kQuestions[static_cast<std::size_t>(id - 1)];
}

bool is_applicable(int question_id, const ApplicabilityInput& in) {
  const auto t = in.type;
  const bool no_axes = t == DiagramType::pie || t == DiagramType::venn;
  switch (question_id) {
    case 1:
    case 2:
    case 11:
    case 13:
      return true;
    case 3:
    case 6:
      return !no_axes;
    case 4:
    case 5:
    case 7:
    case 8:
      return !no_axes && t != DiagramType::surface;
    case 9:
      return t == DiagramType::line || t == DiagramType::scatter_line;
    case 10:
      return t != DiagramType::surface && t != DiagramType::heatmap && t != DiagramType::venn &&
             !in.flags.has_gradient;
    case 12:
      return in.has_legend.value_or(false) && !in.flags.multiple_legends && !in.flags.has_gradient;
    default:
      throw PreconditionError("question id out of range: " + std::to_string(question_id));
  }
}

std::set<int> applicable_questions(const ApplicabilityInput& in) {
  std::set<int> out;
  for (const auto& q : kQuestions) {
    if (is_applicable(q.id, in)) out.insert(q.id);
  }
  return out;
}

bool depends_on_type(int question_id) { return question_id >= 3 && question_id <= 10; }

std::string canonical_raw_type(std::string_view raw_label) {
  const std::string norm = normalize_label(raw_label);
  for (auto name : kRawTypes) {
    if (name == norm) return std::string(name);
  }
  throw UnknownType(std::string(raw_label));
}

std::span<const std::string_view> raw_type_names() { return kRawTypes; }

bool excluded_from_sampling(std::string_view canonical_raw) {
  return canonical_raw == "map" || canonical_raw == "horizontal interval";
}

DiagramType consolidate_type(std::string_view raw_label, TypeMode mode) {
  const std::string norm = normalize_label(raw_label);
  // Consolidated names are accepted as their own raw label.
  for (std::size_t i = 0; i < kTypeNames.size(); ++i) {
    if (kTypeNames[i] == norm) return static_cast<DiagramType>(i);
  }
  const std::string raw = canonical_raw_type(raw_label);
  auto it = std::find_if(kRawMappings.begin(), kRawMappings.end(),
                         [&](const RawMapping& m) { return m.raw == raw; });
  if (!it->type) throw UnknownType(std::string(raw_label), "no consolidated variant");
  if (excluded_from_sampling(raw) && mode != TypeMode::ingestion) {
    throw UnknownType(std::string(raw_label), "only accepted in ingestion mode");
  }
  return *it->type;
}

std::string catalog_json() {
  nlohmann::json questions = nlohmann::json::array();
  for (const auto& q : kQuestions) {
    questions.push_back({{"id", q.id}, {"text", q.text}, {"kind", to_string(q.kind)}});
  }
  nlohmann::json types = nlohmann::json::array();
  for (auto n : kTypeNames) types.push_back(n);
  nlohmann::json doc = {{"diagram_types", types}, {"questions", questions}};
  return doc.dump(2);
}

}  // namespace vislint

#pragma once

#include <array>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>

namespace vislint {

// Consolidated diagram types. Horizontal and vertical variants of the source
// dataset collapse onto a single variant here.
enum class DiagramType {
  surface,
  box,
  pie,
  scatter_line,
  area,
  scatter,
  bar,
  interval,
  venn,
  line,
  heatmap,
  manhattan,
};

inline constexpr std::size_t kDiagramTypeCount = 12;

// In the order they are offered to the model in question 1.
inline constexpr std::array<DiagramType, kDiagramTypeCount> kAllDiagramTypes = {
    DiagramType::surface, DiagramType::box,      DiagramType::pie,   DiagramType::scatter_line,
    DiagramType::area,    DiagramType::scatter,  DiagramType::bar,   DiagramType::interval,
    DiagramType::venn,    DiagramType::line,     DiagramType::heatmap, DiagramType::manhattan,
};

std::string_view to_string(DiagramType t);
// Exact (lower-case) option name, e.g. "scatter-line". Throws UnknownType.
DiagramType diagram_type_from_name(std::string_view name);

enum class AnswerKind { yes_no, count, type_choice };

std::string_view to_string(AnswerKind k);

struct GuidelineQuestion {
  int id;
  std::string_view text;
  AnswerKind kind;
};

inline constexpr int kQuestionCount = 13;

std::span<const GuidelineQuestion, kQuestionCount> catalog();
// Throws PreconditionError for ids outside 1..13.
const GuidelineQuestion& question(int id);

// Manually annotated properties that remove an image from some subsets.
struct ExclusionFlags {
  bool has_gradient = false;
  bool multiple_legends = false;

  friend bool operator==(const ExclusionFlags&, const ExclusionFlags&) = default;
};

// Everything applicability depends on. has_legend comes from ground truth when
// evaluating and from the parsed question 11 verdict when linting; nullopt
// means nobody knows, and question 12 is then left out.
struct ApplicabilityInput {
  DiagramType type;
  ExclusionFlags flags{};
  std::optional<bool> has_legend;
};

bool is_applicable(int question_id, const ApplicabilityInput& in);
std::set<int> applicable_questions(const ApplicabilityInput& in);

// True when whether `question_id` applies depends on the diagram type.
bool depends_on_type(int question_id);

// Dataset ingestion accepts the two source types that were never sampled.
enum class TypeMode { evaluation, ingestion };

// Normalizes a source-dataset type label ("Vertical bar chart", "vertical_bar",
// "Scatter-line plot") to its canonical raw name ("vertical bar"). Throws
// UnknownType for anything outside the source dataset's type list.
std::string canonical_raw_type(std::string_view raw_label);

// Canonical raw names of the source dataset, in table order.
std::span<const std::string_view> raw_type_names();

// Raw names that exist in the source dataset but were never sampled.
bool excluded_from_sampling(std::string_view canonical_raw);

// Maps a raw label to its consolidated type. "horizontal interval" is only
// accepted in ingestion mode; "map" has no consolidated variant at all and
// always throws UnknownType.
DiagramType consolidate_type(std::string_view raw_label, TypeMode mode = TypeMode::evaluation);

// Question catalog as pretty-printed JSON, for prompt auditing.
std::string catalog_json();

}  // namespace vislint

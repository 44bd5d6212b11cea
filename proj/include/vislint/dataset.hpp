#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vislint/answer_parsing.hpp"
#include "vislint/catalog.hpp"

namespace vislint {

struct AnnotationRecord {
  std::string image_id;
  std::string path;
  // Canonical source-dataset name, e.g. "vertical bar".
  std::string raw_type;
  // Empty only for "map" records loaded in ingestion mode.
  std::optional<DiagramType> type;
  std::map<int, Label> labels;
  ExclusionFlags flags;

  const Label* label(int question_id) const;
  // Legend presence from the question 11 label, if annotated.
  std::optional<bool> has_legend() const;
};

// Applicability of a record's questions, judged by its ground truth. Throws
// PreconditionError for records without a consolidated type.
ApplicabilityInput applicability(const AnnotationRecord& record);

// Throws SchemaError (with record index and field) or DuplicateId.
std::vector<AnnotationRecord> parse_manifest(const nlohmann::json& doc, TypeMode mode = TypeMode::evaluation);
// Relative image paths are resolved against the manifest's directory.
std::vector<AnnotationRecord> load_manifest(const std::filesystem::path& path, TypeMode mode = TypeMode::evaluation);

nlohmann::json manifest_to_json(const std::vector<AnnotationRecord>& records);

struct SamplePlan {
  // Canonical raw type name -> number of images to draw.
  std::map<std::string, std::size_t> targets;
  std::uint64_t seed = 0;

  std::size_t total() const;
};

inline constexpr std::uint64_t kDefaultSampleSeed = 20250618;

// Sampled-set column of the source table: 1010 images, none of the horizontal
// interval or map types.
SamplePlan default_sample_plan();

// {"seed": int, "targets": {"<raw type>": int, ...}}; missing types get 0.
SamplePlan parse_sample_plan(const nlohmann::json& doc);
SamplePlan load_sample_plan(const std::filesystem::path& path);

// Draws exactly plan.targets[t] records of every raw type t without
// replacement. The result depends only on the pool contents, the plan and the
// seed, and is ordered by image_id. Throws InsufficientPool.
std::vector<AnnotationRecord> stratified_sample(const std::vector<AnnotationRecord>& pool, const SamplePlan& plan);

struct FilteredSubset {
  int question_id = 0;
  std::vector<AnnotationRecord> records;
  std::size_t n = 0;
};

FilteredSubset filter_applicable(const std::vector<AnnotationRecord>& records, int question_id);

}  // namespace vislint

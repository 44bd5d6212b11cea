#include <gtest/gtest.h>

#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "vislint/errors.hpp"

using namespace vislint;
using nlohmann::json;

namespace {

json three_records() {
  return json::parse(R"([
    {"image_id": "a", "path": "img/a.png", "raw_type": "Vertical bar chart",
     "labels": {"1": "bar", "2": false, "9": 3}, "flags": {"has_gradient": false, "multiple_legends": false}},
    {"image_id": "b", "path": "/abs/b.png", "raw_type": "pie", "labels": {"11": true, "12": 4}},
    {"image_id": "c", "path": "c.jpg", "raw_type": "heatmap", "flags": {"has_gradient": true}}
  ])");
}

}  // namespace

TEST(Manifest, LoadsValidRecords) {
  const auto recs = parse_manifest(three_records());
  ASSERT_EQ(recs.size(), 3u);
  EXPECT_EQ(recs[0].raw_type, "vertical bar");
  EXPECT_EQ(recs[0].type, DiagramType::bar);
  EXPECT_EQ(*recs[0].label(9), Label{std::uint64_t{3}});
  EXPECT_EQ(*recs[0].label(2), Label{false});
  EXPECT_EQ(recs[0].label(5), nullptr);
  EXPECT_EQ(recs[1].has_legend(), true);
  EXPECT_FALSE(recs[2].has_legend());
  EXPECT_TRUE(recs[2].flags.has_gradient);
}

TEST(Manifest, ResolvesRelativePathsAndRoundTrips) {
  fixture::TempDir dir("manifest");
  const auto file = dir.path() / "m.json";
  std::ofstream(file) << three_records().dump();
  const auto recs = load_manifest(file);
  EXPECT_EQ(recs[0].path, (dir.path() / "img/a.png").string());
  EXPECT_EQ(recs[1].path, "/abs/b.png");
  const auto again = parse_manifest(manifest_to_json(parse_manifest(three_records())));
  ASSERT_EQ(again.size(), 3u);
  EXPECT_EQ(again[0].labels, parse_manifest(three_records())[0].labels);
}

TEST(Manifest, SchemaErrors) {
  auto doc = three_records();
  doc[0]["labels"]["9"] = "three";
  try {
    parse_manifest(doc);
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.record_index(), 0u);
    EXPECT_EQ(e.field(), "labels.9");
  }
  doc = three_records();
  doc[1]["labels"]["2"] = 1;
  EXPECT_THROW(parse_manifest(doc), SchemaError);
  doc = three_records();
  doc[2]["raw_type"] = "treemap";
  EXPECT_THROW(parse_manifest(doc), SchemaError);
  doc = three_records();
  doc[0]["labels"]["1"] = "line";
  EXPECT_THROW(parse_manifest(doc), SchemaError);
  doc = three_records();
  doc[0]["labels"]["14"] = true;
  EXPECT_THROW(parse_manifest(doc), SchemaError);
  doc = three_records();
  doc[0].erase("path");
  EXPECT_THROW(parse_manifest(doc), SchemaError);
  EXPECT_THROW(parse_manifest(json::object()), SchemaError);
}

TEST(Manifest, DuplicateIds) {
  auto doc = three_records();
  doc[2]["image_id"] = "a";
  EXPECT_THROW(parse_manifest(doc), DuplicateId);
}

TEST(Manifest, UnsampledTypesOnlyInIngestion) {
  const auto doc = json::parse(R"([{"image_id": "m", "path": "m.png", "raw_type": "map"},
                                   {"image_id": "h", "path": "h.png", "raw_type": "horizontal interval"}])");
  EXPECT_THROW(parse_manifest(doc), SchemaError);
  const auto recs = parse_manifest(doc, TypeMode::ingestion);
  EXPECT_FALSE(recs[0].type);
  EXPECT_EQ(recs[1].type, DiagramType::interval);
}

TEST(Sampling, DefaultPlanMatchesTable) {
  const auto plan = default_sample_plan();
  EXPECT_EQ(plan.total(), 1010u);
  EXPECT_EQ(plan.targets.at("map"), 0u);
  EXPECT_EQ(plan.targets.at("horizontal interval"), 0u);
  EXPECT_EQ(plan.seed, kDefaultSampleSeed);
}

TEST(Sampling, ExactCountsAndDeterminism) {
  const auto pool = fixture::training_pool();
  const auto plan = default_sample_plan();
  const auto a = stratified_sample(pool, plan);
  const auto b = stratified_sample(pool, plan);
  ASSERT_EQ(a.size(), 1010u);
  std::map<std::string, std::size_t> counts;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].image_id, b[i].image_id);
    if (i) EXPECT_LT(a[i - 1].image_id, a[i].image_id);
    ++counts[a[i].raw_type];
  }
  for (const auto& [raw, want] : plan.targets) {
    EXPECT_EQ(counts[raw], want) << raw;
  }

  auto reseeded = plan;
  reseeded.seed += 1;
  const auto c = stratified_sample(pool, reseeded);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) differs = differs || a[i].image_id != c[i].image_id;
  EXPECT_TRUE(differs);
}

TEST(Sampling, EdgeCases) {
  const auto pool = fixture::training_pool();
  SamplePlan zeros;
  for (const auto& [raw, n] : default_sample_plan().targets) zeros.targets[raw] = 0;
  EXPECT_TRUE(stratified_sample(pool, zeros).empty());

  std::vector<AnnotationRecord> small;
  for (const auto& r : pool) {
    if (r.raw_type == "area" && small.size() < 30) small.push_back(r);
  }
  SamplePlan greedy;
  greedy.targets["area"] = 31;
  try {
    stratified_sample(small, greedy);
    FAIL() << "expected InsufficientPool";
  } catch (const InsufficientPool& e) {
    EXPECT_EQ(e.raw_type(), "area");
  }
  greedy.targets["area"] = 30;
  EXPECT_EQ(stratified_sample(small, greedy).size(), 30u);

  SamplePlan maps;
  maps.targets["map"] = 1;
  EXPECT_THROW(stratified_sample(pool, maps), PlanError);
}

TEST(Sampling, PlanParsing) {
  const auto plan = parse_sample_plan(json::parse(R"({"seed": 5, "targets": {"Area chart": 2, "venn": 1}})"));
  EXPECT_EQ(plan.seed, 5u);
  EXPECT_EQ(plan.total(), 3u);
  EXPECT_THROW(parse_sample_plan(json::parse(R"({"targets": {"area": -1}})")), Error);
}

TEST(Filtering, MirrorSubsetSizes) {
  const auto recs = load_manifest(fixture::mirror_manifest());
  ASSERT_EQ(recs.size(), 1010u);
  const std::map<int, std::size_t> expected = {{1, 1010}, {2, 1010}, {3, 950}, {4, 920},  {5, 920},
                                               {6, 950},  {7, 920},  {8, 920}, {9, 300},  {10, 915},
                                               {11, 1010}, {12, 461}, {13, 1010}};
  for (const auto& [q, n] : expected) {
    const auto sub = filter_applicable(recs, q);
    EXPECT_EQ(sub.n, n) << "q" << q;
    EXPECT_EQ(sub.records.size(), sub.n);
    for (const auto& r : sub.records) EXPECT_TRUE(is_applicable(q, applicability(r)));
  }
}

TEST(Filtering, SubsetInvariants) {
  const auto recs = load_manifest(fixture::mirror_manifest());
  EXPECT_LE(filter_applicable(recs, 4).n, filter_applicable(recs, 3).n);
  for (const auto& r : filter_applicable(recs, 12).records) {
    EXPECT_EQ(r.has_legend(), true);
    EXPECT_FALSE(r.flags.multiple_legends);
    EXPECT_FALSE(r.flags.has_gradient);
  }
}

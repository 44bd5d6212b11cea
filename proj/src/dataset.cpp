#include "vislint/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <random>
#include <set>

#include "vislint/errors.hpp"

namespace vislint {

namespace {

// Unbiased draw from [0, bound) on top of the fully specified mt19937_64, so a
// seed gives the same sample with every standard library.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

Label parse_label(std::size_t index, int qid, const nlohmann::json& v, TypeMode mode) {
  const std::string field = "labels." + std::to_string(qid);
  switch (question(qid).kind) {
    case AnswerKind::yes_no:
      if (!v.is_boolean()) throw SchemaError(index, field, "expected a boolean");
      return v.get<bool>();
    case AnswerKind::count:
      if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
        throw SchemaError(index, field, "expected a non-negative integer");
      }
      return v.get<std::uint64_t>();
    case AnswerKind::type_choice:
      if (!v.is_string()) throw SchemaError(index, field, "expected a diagram type name");
      try {
        return consolidate_type(v.get<std::string>(), mode);
      } catch (const UnknownType& e) {
        throw SchemaError(index, field, e.what());
      }
  }
  throw SchemaError(index, field, "unsupported answer kind");
}

bool read_flag(std::size_t index, const nlohmann::json& flags, const char* name) {
  if (!flags.contains(name)) return false;
  if (!flags[name].is_boolean()) throw SchemaError(index, std::string("flags.") + name, "expected a boolean");
  return flags[name].get<bool>();
}

AnnotationRecord parse_record(std::size_t index, const nlohmann::json& r, TypeMode mode) {
  if (!r.is_object()) throw SchemaError(index, "", "record is not an object");
  auto require_string = [&](const char* name) {
    if (!r.contains(name) || !r[name].is_string()) throw SchemaError(index, name, "expected a string");
    return r[name].get<std::string>();
  };

  AnnotationRecord rec;
  rec.image_id = require_string("image_id");
  if (rec.image_id.empty()) throw SchemaError(index, "image_id", "must not be empty");
  rec.path = require_string("path");
  const std::string raw = require_string("raw_type");
  try {
    rec.raw_type = canonical_raw_type(raw);
    if (rec.raw_type == "map" && mode == TypeMode::ingestion) {
      rec.type = std::nullopt;
    } else {
      rec.type = consolidate_type(rec.raw_type, mode);
    }
  } catch (const UnknownType& e) {
    throw SchemaError(index, "raw_type", e.what());
  }

  if (r.contains("labels")) {
    const auto& labels = r["labels"];
    if (!labels.is_object()) throw SchemaError(index, "labels", "expected an object");
    for (const auto& [key, value] : labels.items()) {
      int qid = 0;
      try {
        std::size_t used = 0;
        qid = std::stoi(key, &used);
        if (used != key.size()) qid = 0;
      } catch (const std::exception&) {
        qid = 0;
      }
      if (qid < 1 || qid > kQuestionCount) throw SchemaError(index, "labels." + key, "not a question id");
      rec.labels[qid] = parse_label(index, qid, value, mode);
    }
  }
  if (auto it = rec.labels.find(1); it != rec.labels.end()) {
    if (!rec.type || std::get<DiagramType>(it->second) != *rec.type) {
      throw SchemaError(index, "labels.1", "disagrees with raw_type");
    }
  }

  if (r.contains("flags")) {
    const auto& flags = r["flags"];
    if (!flags.is_object()) throw SchemaError(index, "flags", "expected an object");
    rec.flags.has_gradient = read_flag(index, flags, "has_gradient");
    rec.flags.multiple_legends = read_flag(index, flags, "multiple_legends");
  }
  return rec;
}

}  // namespace

const Label* AnnotationRecord::label(int question_id) const {
  auto it = labels.find(question_id);
  return it == labels.end() ? nullptr : &it->second;
}

std::optional<bool> AnnotationRecord::has_legend() const {
  if (const Label* l = label(11)) return std::get<bool>(*l);
  return std::nullopt;
}

ApplicabilityInput applicability(const AnnotationRecord& record) {
  if (!record.type) throw PreconditionError("record " + record.image_id + " has no consolidated diagram type");
  return {*record.type, record.flags, record.has_legend()};
}

std::vector<AnnotationRecord> parse_manifest(const nlohmann::json& doc, TypeMode mode) {
  if (!doc.is_array()) throw SchemaError(0, "", "manifest must be a JSON array");
  std::vector<AnnotationRecord> out;
  out.reserve(doc.size());
  std::set<std::string> seen;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    auto rec = parse_record(i, doc[i], mode);
    if (!seen.insert(rec.image_id).second) throw DuplicateId(rec.image_id);
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<AnnotationRecord> load_manifest(const std::filesystem::path& path, TypeMode mode) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open manifest " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error("manifest " + path.string() + " is not valid JSON: " + e.what());
  }
  auto records = parse_manifest(doc, mode);
  for (auto& r : records) {
    std::filesystem::path p = r.path;
    if (p.is_relative()) r.path = (path.parent_path() / p).lexically_normal().string();
  }
  return records;
}

nlohmann::json manifest_to_json(const std::vector<AnnotationRecord>& records) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : records) {
    nlohmann::json labels = nlohmann::json::object();
    for (const auto& [qid, label] : r.labels) {
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, DiagramType>) {
              labels[std::to_string(qid)] = to_string(v);
            } else {
              labels[std::to_string(qid)] = v;
            }
          },
          label);
    }
    out.push_back({{"image_id", r.image_id},
                   {"path", r.path},
                   {"raw_type", r.raw_type},
                   {"labels", labels},
                   {"flags", {{"has_gradient", r.flags.has_gradient}, {"multiple_legends", r.flags.multiple_legends}}}});
  }
  return out;
}

std::size_t SamplePlan::total() const {
  std::size_t n = 0;
  for (const auto& [_, k] : targets) n += k;
  return n;
}

SamplePlan default_sample_plan() {
  SamplePlan plan;
  plan.seed = kDefaultSampleSeed;
  plan.targets = {
      {"area", 30},           {"line", 200},          {"manhattan", 30},
      {"scatter", 100},       {"scatter-line", 100},  {"pie", 30},
      {"vertical box", 100},  {"horizontal box", 0},  {"horizontal bar", 100},
      {"vertical bar", 200},  {"horizontal interval", 0}, {"vertical interval", 30},
      {"map", 0},             {"heatmap", 30},        {"surface", 30},
      {"venn", 30},
  };
  return plan;
}

SamplePlan parse_sample_plan(const nlohmann::json& doc) {
  if (!doc.is_object()) throw Error("sample plan must be a JSON object");
  SamplePlan plan;
  plan.seed = kDefaultSampleSeed;
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer()) throw Error("plan seed must be an integer");
    plan.seed = doc["seed"].get<std::uint64_t>();
  }
  if (!doc.contains("targets") || !doc["targets"].is_object()) throw Error("sample plan needs a 'targets' object");
  for (const auto& [name, count] : doc["targets"].items()) {
    if (!count.is_number_integer() || count.get<std::int64_t>() < 0) {
      throw Error("plan target for '" + name + "' must be a non-negative integer");
    }
    plan.targets[canonical_raw_type(name)] = count.get<std::size_t>();
  }
  return plan;
}

SamplePlan load_sample_plan(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open sample plan " + path.string());
  try {
    return parse_sample_plan(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw Error("sample plan " + path.string() + ": " + e.what());
  }
}

std::vector<AnnotationRecord> stratified_sample(const std::vector<AnnotationRecord>& pool, const SamplePlan& plan) {
  std::map<std::string, std::vector<const AnnotationRecord*>> by_type;
  for (const auto& r : pool) by_type[r.raw_type].push_back(&r);

  std::mt19937_64 rng(plan.seed);
  std::vector<AnnotationRecord> out;
  out.reserve(plan.total());
  for (const auto& [raw, target] : plan.targets) {
    if (target == 0) continue;
    if (excluded_from_sampling(raw)) throw PlanError("raw type '" + raw + "' cannot be sampled");
    auto& candidates = by_type[raw];
    if (candidates.size() < target) throw InsufficientPool(raw, target, candidates.size());
    std::sort(candidates.begin(), candidates.end(),
              [](const AnnotationRecord* a, const AnnotationRecord* b) { return a->image_id < b->image_id; });
    // Partial Fisher-Yates: the first `target` slots end up a uniform sample.
    for (std::size_t i = 0; i < target; ++i) {
      const auto j = i + uniform_below(rng, candidates.size() - i);
      std::swap(candidates[i], candidates[j]);
      out.push_back(*candidates[i]);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const AnnotationRecord& a, const AnnotationRecord& b) { return a.image_id < b.image_id; });
  return out;
}

FilteredSubset filter_applicable(const std::vector<AnnotationRecord>& records, int question_id) {
  (void)question(question_id);
  FilteredSubset subset;
  subset.question_id = question_id;
  for (const auto& r : records) {
    if (!r.type) continue;
    if (is_applicable(question_id, applicability(r))) subset.records.push_back(r);
  }
  subset.n = subset.records.size();
  return subset;
}

}  // namespace vislint

#pragma once

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "vislint/dataset.hpp"

namespace vislint::fixture {

inline std::filesystem::path data_dir() { return VISLINT_TEST_DATA_DIR; }
inline std::filesystem::path mirror_manifest() { return data_dir() / "mirror_manifest.json"; }

// Training-split sizes per source type.
inline const std::vector<std::pair<std::string, std::size_t>>& training_counts() {
  static const std::vector<std::pair<std::string, std::size_t>> counts = {
      {"area", 172},           {"line", 10556},        {"manhattan", 176},          {"scatter", 1350},
      {"scatter-line", 1818},  {"pie", 242},           {"vertical box", 763},       {"horizontal bar", 787},
      {"vertical bar", 5454},  {"horizontal interval", 156}, {"vertical interval", 489}, {"map", 533},
      {"heatmap", 197},        {"surface", 155},       {"venn", 75},
  };
  return counts;
}

// Unlabeled pool with the training-split composition, loaded in ingestion mode.
inline std::vector<AnnotationRecord> training_pool() {
  std::vector<AnnotationRecord> pool;
  std::size_t serial = 0;
  for (const auto& [raw, count] : training_counts()) {
    for (std::size_t i = 0; i < count; ++i) {
      char id[32];
      std::snprintf(id, sizeof id, "train-%05zu", ++serial);
      AnnotationRecord r;
      r.image_id = id;
      r.path = std::string("images/") + id + ".png";
      r.raw_type = raw;
      if (raw != "map") r.type = consolidate_type(raw, TypeMode::ingestion);
      pool.push_back(std::move(r));
    }
  }
  return pool;
}

// Unique scratch directory, removed on destruction.
class TempDir {
public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("vislint-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(++counter));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

private:
  std::filesystem::path path_;
};

}  // namespace vislint::fixture

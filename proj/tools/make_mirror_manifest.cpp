// Writes a synthetic 1010-image manifest whose type composition, flag counts
// and label counts match the evaluation set. Only the counts are meaningful;
// which image gets which label is arbitrary.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <vector>

#include "vislint/dataset.hpp"

using namespace vislint;

namespace {

struct TypeCount {
  const char* raw;
  int count;
};

constexpr TypeCount kComposition[] = {
    {"area", 30},          {"line", 200},         {"manhattan", 30},         {"scatter", 100},
    {"scatter-line", 100}, {"pie", 30},           {"vertical box", 100},     {"horizontal bar", 100},
    {"vertical bar", 200}, {"vertical interval", 30}, {"heatmap", 30},       {"surface", 30},
    {"venn", 30},
};

template <typename Rng>
void shuffle(std::vector<std::size_t>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng() % i]);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: " << argv[0] << " <out.json>\n";
    return 2;
  }
  std::mt19937 rng(1010);

  std::vector<AnnotationRecord> recs;
  for (const auto& tc : kComposition) {
    for (int i = 0; i < tc.count; ++i) {
      AnnotationRecord r;
      char id[16];
      std::snprintf(id, sizeof id, "pm-%04zu", recs.size() + 1);
      r.image_id = id;
      r.path = std::string("images/") + id + ".png";
      r.raw_type = tc.raw;
      r.type = consolidate_type(tc.raw);
      r.labels[1] = *r.type;
      recs.push_back(std::move(r));
    }
  }

  auto of_type = [&](DiagramType t) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < recs.size(); ++i) {
      if (recs[i].type == t) out.push_back(i);
    }
    return out;
  };
  auto set_all = [&](int q, bool v) {
    for (auto& r : recs) r.labels[q] = v;
  };

  // 3D effects: every surface plot and five pie charts.
  set_all(2, false);
  for (auto i : of_type(DiagramType::surface)) recs[i].labels[2] = true;
  auto pies = of_type(DiagramType::pie);
  for (int k = 0; k < 5; ++k) recs[pies[static_cast<std::size_t>(k)]].labels[2] = true;

  // Axis questions. 920 records have both axes questions, surfaces only the
  // "all axes" ones.
  std::vector<std::size_t> axes, surfaces = of_type(DiagramType::surface);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const auto t = *recs[i].type;
    if (t != DiagramType::pie && t != DiagramType::venn && t != DiagramType::surface) axes.push_back(i);
  }
  for (auto i : axes) {
    for (int q = 3; q <= 8; ++q) recs[i].labels[q] = true;
  }
  for (auto i : surfaces) recs[i].labels[3] = recs[i].labels[6] = true;

  // Missing labels: 234 horizontal, 123 vertical, 84 both; 10 more surfaces.
  shuffle(axes, rng);
  for (std::size_t k = 0; k < 273; ++k) {
    auto& r = recs[axes[k]];
    r.labels[3] = false;
    if (k < 234) r.labels[4] = false;
    if (k < 84 || k >= 234) r.labels[5] = false;
  }
  shuffle(surfaces, rng);
  for (std::size_t k = 0; k < 10; ++k) recs[surfaces[k]].labels[3] = false;

  // Missing ticks: 169 horizontal, 127 vertical, 86 both; 8 more surfaces.
  shuffle(axes, rng);
  for (std::size_t k = 0; k < 210; ++k) {
    auto& r = recs[axes[k]];
    r.labels[6] = false;
    if (k < 169) r.labels[7] = false;
    if (k < 86 || k >= 169) r.labels[8] = false;
  }
  shuffle(surfaces, rng);
  for (std::size_t k = 0; k < 8; ++k) recs[surfaces[k]].labels[6] = false;

  // Legends: 479 present. 15 of them are color-gradient legends (five each on
  // heatmaps, surfaces and scatter plots), 3 line charts carry several legends.
  set_all(11, false);
  std::vector<bool> used(recs.size(), false);
  auto take = [&](DiagramType t, int n, bool gradient, bool multiple) {
    auto pool = of_type(t);
    shuffle(pool, rng);
    int taken = 0;
    for (auto i : pool) {
      if (taken == n) break;
      if (used[i]) continue;
      used[i] = true;
      recs[i].labels[11] = true;
      recs[i].flags.has_gradient = gradient;
      recs[i].flags.multiple_legends = multiple;
      ++taken;
    }
  };
  take(DiagramType::heatmap, 5, true, false);
  take(DiagramType::surface, 5, true, false);
  take(DiagramType::scatter, 5, true, false);
  take(DiagramType::line, 3, false, true);
  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    if (!used[i]) rest.push_back(i);
  }
  shuffle(rest, rng);
  for (std::size_t k = 0; k < 461; ++k) {
    recs[rest[k]].labels[11] = true;
    recs[rest[k]].labels[12] = static_cast<std::uint64_t>(1 + rng() % 7);
  }

  // Counts for lines and colors.
  for (auto& r : recs) {
    if (r.type == DiagramType::line || r.type == DiagramType::scatter_line) {
      r.labels[9] = static_cast<std::uint64_t>(1 + rng() % 12);
    }
    if (is_applicable(10, applicability(r))) r.labels[10] = static_cast<std::uint64_t>(1 + rng() % 10);
  }

  // Compression artifacts in 270 images.
  set_all(13, false);
  std::vector<std::size_t> all(recs.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  shuffle(all, rng);
  for (std::size_t k = 0; k < 270; ++k) recs[all[k]].labels[13] = true;

  std::ofstream out(argv[1]);
  const auto doc = manifest_to_json(recs);
  out << "[\n";
  for (std::size_t i = 0; i < doc.size(); ++i) out << doc[i].dump() << (i + 1 < doc.size() ? ",\n" : "\n");
  out << "]\n";

  for (int q = 1; q <= kQuestionCount; ++q) {
    std::cout << "q" << q << ": n=" << filter_applicable(recs, q).n << '\n';
  }
  return 0;
}

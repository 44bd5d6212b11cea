// Acceptance checks. One PASS/FAIL line per criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "metrics_oracle.hpp"
#include "vislint/experiment.hpp"
#include "vislint/metrics.hpp"
#include "vislint/prompting.hpp"
#include "vislint/vlm_client.hpp"

using namespace vislint;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
  std::printf("%s [%d] %s: %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

// Runs fn, turning exceptions into a failed criterion.
void criterion(int id, const std::string& name, const std::function<bool(std::string&)>& fn) {
  std::string detail;
  bool ok = false;
  try {
    ok = fn(detail);
  } catch (const std::exception& e) {
    detail += std::string(" exception: ") + e.what();
  }
  report(id, name, ok, detail);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// Expected no-information rates, in percent.
const std::map<int, double> kPublishedNir = {{2, 96.53}, {3, 70.21}, {4, 74.57}, {5, 86.63}, {6, 77.05},
                                             {7, 81.63}, {8, 86.20}, {11, 52.57}, {13, 73.27}};

std::vector<std::string> truth_strings(const FilteredSubset& sub, int q) {
  std::vector<std::string> out;
  for (const auto& r : sub.records) out.push_back(label_to_string(r.label(q) ? *r.label(q) : Label{*r.type}));
  return out;
}

bool c1_subsets(std::string& d) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto recs = load_manifest(fixture::mirror_manifest());
  const std::vector<std::pair<int, std::size_t>> expected = {{3, 950}, {4, 920}, {5, 920}, {7, 920},
                                                             {8, 920}, {10, 915}, {12, 461}, {9, 300}};
  bool ok = true;
  for (auto [q, n] : expected) {
    const auto got = filter_applicable(recs, q).n;
    ok = ok && got == n;
    d += "q" + std::to_string(q) + "=" + std::to_string(got) + " ";
  }
  const double secs = seconds_since(t0);
  d += "in " + fmt(secs, 3) + " s";
  return ok && secs < 1.0;
}

bool c2_nir(std::string& d) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto recs = load_manifest(fixture::mirror_manifest());
  bool ok = true;
  for (const auto& [q, pct] : kPublishedNir) {
    const auto sub = filter_applicable(recs, q);
    const double got = 100.0 * no_information_rate(truth_strings(sub, q));
    ok = ok && std::abs(got - pct) <= 0.01;
    d += "q" + std::to_string(q) + "=" + fmt(got) + "% ";
  }
  // Straight from the raw positive counts as well.
  ok = ok && std::abs(100.0 * (1010 - 35) / 1010 - 96.53) <= 0.01 && std::abs(100.0 * 531 / 1010 - 52.57) <= 0.01 &&
       std::abs(100.0 * (1010 - 270) / 1010 - 73.27) <= 0.01;
  const double secs = seconds_since(t0);
  d += "in " + fmt(secs, 3) + " s";
  return ok && secs < 1.0;
}

bool c3_parsers(std::string& d) {
  const auto p = [](std::string s) { return RawAnswer{std::move(s), 0}; };
  const std::vector<std::pair<ParsedAnswer, ParsedAnswer>> golden = {
      {parse_yes_no(p("Yes, all axes are labeled.")), ParsedAnswer::yes_no(true)},
      {parse_yes_no(p("No.")), ParsedAnswer::yes_no(false)},
      {parse_yes_no(p("I cannot determine that.")), ParsedAnswer::invalid()},
      {parse_count(p("There are 3 lines and 2 confidence bands.")), ParsedAnswer::number(3)},
      {parse_count(p("two")), ParsedAnswer::number(2)},
      {parse_count(p("Several colors are present.")), ParsedAnswer::invalid()},
      {parse_diagram_type(p("This is a scatter-line plot.")), ParsedAnswer::type_choice(DiagramType::scatter_line)},
      {parse_diagram_type(p("bar")), ParsedAnswer::type_choice(DiagramType::bar)},
      {parse_diagram_type(p("It is a photograph.")), ParsedAnswer::invalid()},
  };
  std::size_t golden_ok = 0;
  for (const auto& [got, want] : golden) golden_ok += got == want;

  const std::vector<std::string> words = {"know",  "not",   "yesterday", "nothing", "cannot", "eyes",  "nose",
                                          "noon",  "yess",  "nope",      "known",   "snow",   "the",   "axis",
                                          "label", "maybe", "unknown",   "notable", "yesno",  "norm",  "bayes"};
  const std::vector<std::string> seps = {" ", ", ", "-", ". ", "\n", "_", "/", "; "};
  std::mt19937_64 rng(1000);
  std::size_t soup_ok = 0;
  for (int i = 0; i < 1000; ++i) {
    std::string soup = words[rng() % 3];  // always one of know/not/yesterday
    const std::size_t len = rng() % 12;
    for (std::size_t w = 0; w < len; ++w) soup += seps[rng() % seps.size()] + words[rng() % words.size()];
    if (rng() % 2) soup[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(soup[0])));
    soup_ok += parse_yes_no(p(soup)).is_invalid();
  }
  d = "golden " + std::to_string(golden_ok) + "/" + std::to_string(golden.size()) + ", word soups Invalid " +
      std::to_string(soup_ok) + "/1000";
  return golden_ok == golden.size() && soup_ok == 1000;
}

bool c4_metrics(std::string& d) {
  std::mt19937_64 rng(200);
  std::size_t cls_ok = 0, reg_ok = 0, order_ok = 0;
  for (int i = 0; i < 200; ++i) {
    const auto inst = fixture::random_instance(rng);
    const auto got = classification_report(inst.preds, inst.truths);
    const auto want = fixture::reference_classification(inst.preds, inst.truths);
    cls_ok += std::abs(got.macro_precision - want.precision) <= 1e-9 && std::abs(got.macro_recall - want.recall) <= 1e-9 &&
              std::abs(got.macro_f1 - want.f1) <= 1e-9 && std::abs(got.accuracy - want.accuracy) <= 1e-9 &&
              std::abs(got.balanced_accuracy - want.balanced_accuracy) <= 1e-9 &&
              std::abs(got.no_information_rate - want.nir) <= 1e-9;

    const std::size_t n = inst.truths.size();
    std::vector<double> pd, t;
    for (std::size_t k = 0; k < n; ++k) {
      pd.push_back(double(rng() % 13));
      t.push_back(double(rng() % 13));
    }
    const std::vector<std::optional<double>> po(pd.begin(), pd.end());
    const auto rg = regression_report(po, t);
    const auto rw = fixture::reference_regression(pd, t);
    const bool r_ok = rg.pearson_r.has_value() == rw.r.has_value() && (!rw.r || std::abs(*rg.pearson_r - *rw.r) <= 1e-9);
    reg_ok += std::abs(rg.rmse - rw.rmse) <= 1e-9 && std::abs(rg.mae - rw.mae) <= 1e-9 && r_ok;
    order_ok += rg.mae <= rg.rmse;
  }
  d = "classification " + std::to_string(cls_ok) + "/200, regression " + std::to_string(reg_ok) + "/200, mae<=rmse " +
      std::to_string(order_ok) + "/200";
  return cls_ok == 200 && reg_ok == 200 && order_ok == 200;
}

// Wraps the scripted backend and serializes every request it would send.
class TranscriptBackend : public ChatBackend {
public:
  explicit TranscriptBackend(ScriptedBackend& inner) : inner_(inner) {
    cfg_.endpoint_url = "http://localhost/v1";
    cfg_.model_name = "mock";
  }
  std::string complete(std::span<const ChatMessage> messages, const CallKey& key) override {
    transcript += build_request_body(cfg_, messages).dump() + "\n";
    const auto reply = inner_.complete(messages, key);
    transcript += reply + "\n";
    return reply;
  }
  bool needs_image_bytes() const override { return false; }
  std::string transcript;

private:
  ScriptedBackend& inner_;
  ModelConfig cfg_;
};

bool c5_turns(std::string& d) {
  std::vector<int> qs(13);
  std::iota(qs.begin(), qs.end(), 1);
  const std::vector<std::tuple<Strategy, std::size_t, int>> expected = {
      {Strategy::individual, 13, 13}, {Strategy::context, 1, 13},  {Strategy::elaborate, 13, 39},
      {Strategy::summary, 13, 26},    {Strategy::introduction_question, 6, 19}};
  bool ok = true;
  for (auto [strategy, n_scripts, n_turns] : expected) {
    const auto scripts = plan(strategy, qs);
    int planned = 0;
    for (const auto& s : scripts) planned += s.expected_model_turns;

    std::string transcripts[2];
    std::size_t calls[2] = {0, 0};
    for (int run = 0; run < 2; ++run) {
      ScriptedBackend mock("2");
      mock.set_reply("img", 1, "bar");
      mock.set_reply("img", 2, "no");
      TranscriptBackend rec(mock);
      for (const auto& s : scripts) run_script(s, rec, "img", std::nullopt);
      transcripts[run] = rec.transcript;
      calls[run] = mock.call_count();
    }
    const bool this_ok = scripts.size() == n_scripts && planned == n_turns &&
                         calls[0] == static_cast<std::size_t>(n_turns) && calls[1] == calls[0] &&
                         transcripts[0] == transcripts[1];
    ok = ok && this_ok;
    d += std::string(to_string(strategy)) + " " + std::to_string(scripts.size()) + "/" + std::to_string(planned) + "/" +
         std::to_string(calls[0]) + (transcripts[0] == transcripts[1] ? "" : " (nondeterministic)") + "; ";
  }
  d += "scripts/planned turns/executed turns";
  return ok;
}

bool c6_end_to_end(std::string& d) {
  const auto recs = load_manifest(fixture::mirror_manifest());
  fixture::TempDir dir("acceptance");

  ScriptedBackend perfect("unparseable");
  for (const auto& r : recs) {
    perfect.set_reply(r.image_id, 1, std::string(to_string(*r.type)));
    for (const auto& [q, l] : r.labels) perfect.set_reply(r.image_id, q, label_to_string(l));
  }
  RunConfig cfg;
  cfg.model_name = "perfect";
  const auto good = run_experiment(cfg, perfect, recs, dir.path() / "perfect.jsonl");
  bool ok = good.errors.empty();
  std::size_t perfect_questions = 0;
  for (const auto& q : good.report.questions) {
    const bool q_ok = (q.classification && q.classification->macro_f1 == 1.0) ||
                      (q.regression && q.regression->rmse == 0.0 && q.regression->invalid_count == 0);
    perfect_questions += q_ok && q.n == filter_applicable(recs, q.question_id).n;
  }
  ok = ok && perfect_questions == 13;
  d = "perfect script: " + std::to_string(perfect_questions) + "/13 questions at F1=1 or RMSE=0; majority accuracy ";

  ScriptedBackend majority("unparseable");
  for (const auto& [q, pct] : kPublishedNir) {
    const auto sub = filter_applicable(recs, q);
    std::map<std::string, std::size_t> counts;
    for (const auto& s : truth_strings(sub, q)) ++counts[s];
    const auto top = std::max_element(counts.begin(), counts.end(),
                                       [](const auto& a, const auto& b) { return a.second < b.second; });
    for (const auto& r : recs) majority.set_reply(r.image_id, q, top->first);
  }
  cfg.model_name = "majority";
  const auto base = run_experiment(cfg, majority, recs, dir.path() / "majority.jsonl");
  for (const auto& [q, pct] : kPublishedNir) {
    const auto& c = base.report.find(q)->classification;
    const double acc = 100.0 * c->accuracy;
    ok = ok && std::abs(acc - pct) <= 0.01 && std::abs(c->accuracy - c->no_information_rate) <= 1e-12;
    d += "q" + std::to_string(q) + "=" + fmt(acc) + "% ";
  }
  return ok;
}

bool c7_sampler(std::string& d) {
  const auto pool = fixture::training_pool();
  const auto plan = default_sample_plan();
  const auto a = stratified_sample(pool, plan);
  const auto b = stratified_sample(pool, plan);
  bool same = a.size() == b.size();
  for (std::size_t i = 0; same && i < a.size(); ++i) same = a[i].image_id == b[i].image_id;
  std::map<std::string, std::size_t> counts;
  for (const auto& r : a) ++counts[r.raw_type];
  bool exact = true;
  for (const auto& [raw, want] : plan.targets) exact = exact && counts[raw] == want;
  d = "pool " + std::to_string(pool.size()) + ", sampled " + std::to_string(a.size()) + ", identical ids " +
      (same ? "yes" : "no") + ", per-type counts " + (exact ? "exact" : "off");
  return same && exact && a.size() == 1010;
}

bool c8_documented(std::string& d) {
  std::ifstream in(fs::path(VISLINT_SOURCE_DIR) / "README.md");
  std::stringstream ss;
  ss << in.rdbuf();
  const auto text = ss.str();
  bool live_command = false;
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);) {
    live_command = live_command || (line.find("vislint experiment") != std::string::npos &&
                                    line.find("--endpoint") != std::string::npos);
  }
  const bool caveat = text.find("not reproducible") != std::string::npos;
  d = std::string("README live-run command ") + (live_command ? "present" : "missing") + ", non-reproducibility note " +
      (caveat ? "present" : "missing") + "; model-quality tables need GPU inference and the source images";
  return live_command && caveat;
}

}  // namespace

int main() {
  criterion(1, "applicability subset sizes", c1_subsets);
  criterion(2, "no-information rates", c2_nir);
  criterion(3, "answer parser golden suite and fuzz", c3_parsers);
  criterion(4, "metrics match brute-force oracle", c4_metrics);
  criterion(5, "strategy turn counts and determinism", c5_turns);
  criterion(6, "end-to-end scripted runs", c6_end_to_end);
  criterion(7, "stratified sampler determinism", c7_sampler);
  criterion(8, "live-run documentation", c8_documented);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

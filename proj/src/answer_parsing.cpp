#include "vislint/answer_parsing.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <vector>

namespace vislint {

namespace {

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Maximal alphanumeric runs; every other character (hyphen included) separates.
std::vector<std::string_view> word_tokens(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !is_alnum(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && is_alnum(text[i])) ++i;
    if (i > start) out.push_back(text.substr(start, i - start));
  }
  return out;
}

constexpr std::array<std::string_view, 15> kNumberWords = {
    "one", "two",    "three",  "four",     "five",     "six",     "seven",  "eight",
    "nine", "ten", "eleven", "twelve", "thirteen", "fourteen", "fifteen",
};

// 19 digits always fit in uint64; longer runs are not plausible counts.
constexpr std::size_t kMaxDigits = 18;

}  // namespace

std::optional<bool> ParsedAnswer::as_yes_no() const {
  if (auto p = std::get_if<bool>(&value_)) return *p;
  return std::nullopt;
}

std::optional<std::uint64_t> ParsedAnswer::as_number() const {
  if (auto p = std::get_if<std::uint64_t>(&value_)) return *p;
  return std::nullopt;
}

std::optional<DiagramType> ParsedAnswer::as_type() const {
  if (auto p = std::get_if<DiagramType>(&value_)) return *p;
  return std::nullopt;
}

std::string ParsedAnswer::to_string() const {
  struct Visitor {
    std::string operator()(Invalid) const { return "invalid"; }
    std::string operator()(bool b) const { return b ? "yes" : "no"; }
    std::string operator()(std::uint64_t n) const { return std::to_string(n); }
    std::string operator()(DiagramType t) const { return std::string(vislint::to_string(t)); }
  };
  return std::visit(Visitor{}, value_);
}

ParsedAnswer parse_yes_no(const RawAnswer& raw) {
  const std::string text = lower(raw.text);
  const auto tokens = word_tokens(text);
  if (std::find(tokens.begin(), tokens.end(), "yes") != tokens.end()) return ParsedAnswer::yes_no(true);
  if (std::find(tokens.begin(), tokens.end(), "no") != tokens.end()) return ParsedAnswer::yes_no(false);
  return ParsedAnswer::invalid();
}

ParsedAnswer parse_count(const RawAnswer& raw) {
  const std::string text = lower(raw.text);
  std::optional<std::uint64_t> best;

  // Whole-number tokens: digit runs bounded by non-alphanumerics. A run joined
  // to more digits by '.' is a decimal and does not count.
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_alnum(text[i])) {
      ++i;
      continue;
    }
    std::size_t start = i;
    bool all_digits = true;
    bool decimal = false;
    while (i < text.size()) {
      if (is_alnum(text[i])) {
        all_digits = all_digits && is_digit(text[i]);
        ++i;
      } else if (text[i] == '.' && i + 1 < text.size() && is_digit(text[i + 1]) && i > start &&
                 is_digit(text[i - 1])) {
        decimal = true;
        ++i;
      } else {
        break;
      }
    }
    const std::size_t len = i - start;
    if (!all_digits || decimal || len > kMaxDigits) continue;
    const std::uint64_t v = std::stoull(text.substr(start, len));
    best = best ? std::max(*best, v) : v;
  }
  if (best) return ParsedAnswer::number(*best);

  for (auto tok : word_tokens(text)) {
    auto it = std::find(kNumberWords.begin(), kNumberWords.end(), tok);
    if (it == kNumberWords.end()) continue;
    const auto v = static_cast<std::uint64_t>(it - kNumberWords.begin() + 1);
    best = best ? std::max(*best, v) : v;
  }
  if (best) return ParsedAnswer::number(*best);
  return ParsedAnswer::invalid();
}

ParsedAnswer parse_diagram_type(const RawAnswer& raw) {
  const std::string text = lower(raw.text);

  // Type tokens keep hyphens so "scatter-line" is a single token.
  auto is_type_char = [](char c) { return is_alnum(c) || c == '-'; };
  struct Tok {
    std::string_view text;
    std::size_t pos;
  };
  std::vector<Tok> tokens;
  for (std::size_t i = 0; i < text.size();) {
    while (i < text.size() && !is_type_char(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && is_type_char(text[i])) ++i;
    if (i > start) tokens.push_back({std::string_view(text).substr(start, i - start), start});
  }

  std::array<DiagramType, kDiagramTypeCount> candidates = kAllDiagramTypes;
  std::stable_sort(candidates.begin(), candidates.end(), [](DiagramType a, DiagramType b) {
    return to_string(a).size() > to_string(b).size();
  });

  std::optional<DiagramType> found;
  std::size_t found_pos = 0;
  std::size_t found_len = 0;
  for (auto t : candidates) {
    const auto name = to_string(t);
    if (found && name.size() < found_len) break;
    for (const auto& tok : tokens) {
      if (tok.text != name) continue;
      if (!found || tok.pos < found_pos) {
        found = t;
        found_pos = tok.pos;
        found_len = name.size();
      }
      break;
    }
  }
  if (found) return ParsedAnswer::type_choice(*found);
  return ParsedAnswer::invalid();
}

ParsedAnswer parse_answer(AnswerKind kind, const RawAnswer& raw) {
  switch (kind) {
    case AnswerKind::yes_no: return parse_yes_no(raw);
    case AnswerKind::count: return parse_count(raw);
    case AnswerKind::type_choice: return parse_diagram_type(raw);
  }
  return ParsedAnswer::invalid();
}

}  // namespace vislint

namespace vislint {

std::string label_to_string(const Label& label) {
  struct Visitor {
    std::string operator()(bool b) const { return b ? "yes" : "no"; }
    std::string operator()(std::uint64_t n) const { return std::to_string(n); }
    std::string operator()(DiagramType t) const { return std::string(to_string(t)); }
  };
  return std::visit(Visitor{}, label);
}

bool matches(const ParsedAnswer& verdict, const Label& label) {
  if (verdict.is_invalid()) return false;
  return verdict.to_string() == label_to_string(label);
}

}  // namespace vislint

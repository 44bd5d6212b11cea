#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "vislint/catalog.hpp"

namespace vislint {

// Text of one model reply and the index of the model turn that produced it.
struct RawAnswer {
  std::string text;
  int turn_index = 0;

  friend bool operator==(const RawAnswer&, const RawAnswer&) = default;
};

struct Invalid {
  friend bool operator==(Invalid, Invalid) = default;
};

// Structured verdict extracted from free text. Invalid is a regular value.
class ParsedAnswer {
public:
  using Value = std::variant<Invalid, bool, std::uint64_t, DiagramType>;

  ParsedAnswer() = default;
  static ParsedAnswer invalid() { return ParsedAnswer(); }
  static ParsedAnswer yes_no(bool v) { return ParsedAnswer(Value(v)); }
  static ParsedAnswer number(std::uint64_t v) { return ParsedAnswer(Value(v)); }
  static ParsedAnswer type_choice(DiagramType t) { return ParsedAnswer(Value(t)); }

  bool is_invalid() const { return std::holds_alternative<Invalid>(value_); }
  std::optional<bool> as_yes_no() const;
  std::optional<std::uint64_t> as_number() const;
  std::optional<DiagramType> as_type() const;
  const Value& value() const { return value_; }

  // "yes"/"no", decimal digits, the type name, or "invalid".
  std::string to_string() const;

  friend bool operator==(const ParsedAnswer&, const ParsedAnswer&) = default;

private:
  explicit ParsedAnswer(Value v) : value_(std::move(v)) {}
  Value value_{Invalid{}};
};

ParsedAnswer parse_yes_no(const RawAnswer& raw);
ParsedAnswer parse_count(const RawAnswer& raw);
ParsedAnswer parse_diagram_type(const RawAnswer& raw);

// Dispatches on the question's answer kind.
ParsedAnswer parse_answer(AnswerKind kind, const RawAnswer& raw);

}  // namespace vislint

namespace vislint {

// Ground-truth value of one question: bool for yes/no questions, a count, or
// the diagram type for question 1.
using Label = std::variant<bool, std::uint64_t, DiagramType>;

std::string label_to_string(const Label& label);

// True when a verdict equals the label (never for Invalid).
bool matches(const ParsedAnswer& verdict, const Label& label);

}  // namespace vislint

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "vislint/answer_parsing.hpp"

using namespace vislint;

namespace {
RawAnswer raw(std::string s) { return {std::move(s), 0}; }
}  // namespace

TEST(ParseYesNo, Examples) {
  EXPECT_EQ(parse_yes_no(raw("Yes, all axes are labeled.")), ParsedAnswer::yes_no(true));
  EXPECT_EQ(parse_yes_no(raw("No.")), ParsedAnswer::yes_no(false));
  EXPECT_TRUE(parse_yes_no(raw("I cannot determine that.")).is_invalid());
}

TEST(ParseYesNo, TokenBoundaries) {
  EXPECT_TRUE(parse_yes_no(raw("")).is_invalid());
  EXPECT_TRUE(parse_yes_no(raw("I know nothing, not yesterday")).is_invalid());
  EXPECT_TRUE(parse_yes_no(raw("eyes nose")).is_invalid());
  EXPECT_EQ(parse_yes_no(raw("YES")), ParsedAnswer::yes_no(true));
  EXPECT_EQ(parse_yes_no(raw("no-the axes lack labels")), ParsedAnswer::yes_no(false));
  EXPECT_EQ(parse_yes_no(raw("**No**")), ParsedAnswer::yes_no(false));
  EXPECT_EQ(parse_yes_no(raw("No, wait... yes")), ParsedAnswer::yes_no(true));
  EXPECT_EQ(parse_yes_no(raw("Yes and no")), ParsedAnswer::yes_no(true));
}

TEST(ParseCount, Examples) {
  EXPECT_EQ(parse_count(raw("There are 3 lines and 2 confidence bands.")), ParsedAnswer::number(3));
  EXPECT_EQ(parse_count(raw("two")), ParsedAnswer::number(2));
  EXPECT_TRUE(parse_count(raw("Several colors are present.")).is_invalid());
}

TEST(ParseCount, Tokens) {
  EXPECT_EQ(parse_count(raw("The 3D plot has 2 lines")), ParsedAnswer::number(2));
  EXPECT_TRUE(parse_count(raw("A 3D surface")).is_invalid());
  EXPECT_EQ(parse_count(raw("About 2.5 or 1")), ParsedAnswer::number(1));
  EXPECT_EQ(parse_count(raw("0")), ParsedAnswer::number(0));
  EXPECT_EQ(parse_count(raw("Five, maybe Twelve")), ParsedAnswer::number(12));
  EXPECT_EQ(parse_count(raw("fifteen")), ParsedAnswer::number(15));
  EXPECT_TRUE(parse_count(raw("sixteen")).is_invalid());
  EXPECT_EQ(parse_count(raw("seven colors, 4 of them red")), ParsedAnswer::number(4));
  EXPECT_TRUE(parse_count(raw("someone")).is_invalid());
  EXPECT_EQ(parse_count(raw("(10)")), ParsedAnswer::number(10));
}

TEST(ParseCount, PermutationInvariant) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> nums(1 + rng() % 6);
    for (auto& n : nums) n = static_cast<int>(rng() % 100);
    const auto join = [](const std::vector<int>& v) {
      std::string s = "values:";
      for (int n : v) s += " " + std::to_string(n) + " and";
      return s;
    };
    const auto expected = parse_count(raw(join(nums)));
    EXPECT_EQ(expected, ParsedAnswer::number(*std::max_element(nums.begin(), nums.end())));
    std::shuffle(nums.begin(), nums.end(), rng);
    EXPECT_EQ(parse_count(raw(join(nums))), expected);
  }
}

TEST(ParseType, Examples) {
  EXPECT_EQ(parse_diagram_type(raw("This is a scatter-line plot.")), ParsedAnswer::type_choice(DiagramType::scatter_line));
  EXPECT_EQ(parse_diagram_type(raw("bar")), ParsedAnswer::type_choice(DiagramType::bar));
  EXPECT_TRUE(parse_diagram_type(raw("It is a photograph.")).is_invalid());
}

TEST(ParseType, LongestThenEarliest) {
  EXPECT_EQ(parse_diagram_type(raw("A line chart, not a scatter")), ParsedAnswer::type_choice(DiagramType::scatter));
  EXPECT_EQ(parse_diagram_type(raw("Heatmap")), ParsedAnswer::type_choice(DiagramType::heatmap));
  EXPECT_EQ(parse_diagram_type(raw("pie or bar")), ParsedAnswer::type_choice(DiagramType::pie));
  EXPECT_TRUE(parse_diagram_type(raw("barcode")).is_invalid());
  EXPECT_TRUE(parse_diagram_type(raw("")).is_invalid());
}

TEST(ParseAnswer, Dispatch) {
  EXPECT_EQ(parse_answer(AnswerKind::yes_no, raw("yes")), ParsedAnswer::yes_no(true));
  EXPECT_EQ(parse_answer(AnswerKind::count, raw("4")), ParsedAnswer::number(4));
  EXPECT_EQ(parse_answer(AnswerKind::type_choice, raw("venn")), ParsedAnswer::type_choice(DiagramType::venn));
  EXPECT_EQ(ParsedAnswer::invalid().to_string(), "invalid");
  EXPECT_EQ(ParsedAnswer::yes_no(false).to_string(), "no");
  EXPECT_EQ(ParsedAnswer::type_choice(DiagramType::scatter_line).to_string(), "scatter-line");
}

TEST(ParseAnswer, TotalOnRandomBytes) {
  std::mt19937 rng(11);
  for (int i = 0; i < 2000; ++i) {
    std::string s(rng() % 40, '\0');
    for (auto& c : s) c = static_cast<char>(rng() % 256);
    const auto t = parse_diagram_type(raw(s));
    if (!t.is_invalid()) EXPECT_TRUE(t.as_type().has_value());
    const auto n = parse_count(raw(s));
    if (!n.is_invalid()) EXPECT_TRUE(n.as_number().has_value());
    (void)parse_yes_no(raw(s));
  }
}

TEST(Labels, Matching) {
  EXPECT_TRUE(matches(ParsedAnswer::yes_no(true), Label{true}));
  EXPECT_FALSE(matches(ParsedAnswer::yes_no(true), Label{false}));
  EXPECT_FALSE(matches(ParsedAnswer::invalid(), Label{false}));
  EXPECT_TRUE(matches(ParsedAnswer::number(3), Label{std::uint64_t{3}}));
  EXPECT_EQ(label_to_string(Label{DiagramType::venn}), "venn");
}

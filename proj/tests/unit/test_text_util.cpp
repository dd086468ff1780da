#include <gtest/gtest.h>

#include "a11y/text_util.hpp"

namespace a11y::text {
namespace {

TEST(TextUtil, DecodesMultiByteUtf8) {
  const auto cps = decode_utf8("a\xC3\xA9\xE2\x98\x85");
  ASSERT_EQ(cps.size(), 3u);
  EXPECT_EQ(cps[1], U'é');
  EXPECT_EQ(cps[2], U'★');
  EXPECT_EQ(encode_utf8(cps), "a\xC3\xA9\xE2\x98\x85");
}

TEST(TextUtil, InvalidBytesBecomeReplacementChar) {
  const auto cps = decode_utf8("a\xFF" "b");
  ASSERT_EQ(cps.size(), 3u);
  EXPECT_EQ(cps[1], U'�');
}

TEST(TextUtil, CodepointCount) {
  EXPECT_EQ(codepoint_count(""), 0u);
  EXPECT_EQ(codepoint_count("\xE2\x98\x85"), 1u);
  EXPECT_EQ(codepoint_count("Q"), 1u);
}

TEST(TextUtil, CaseHelpers) {
  EXPECT_EQ(to_lower_ascii("Try It FREE"), "try it free");
  EXPECT_TRUE(iequals("Search", "sEARCH"));
  EXPECT_FALSE(iequals("Search", "Searc"));
  EXPECT_TRUE(icontains("Episode 12: Deep Sea", "deep"));
  EXPECT_FALSE(icontains("Episode", "sea"));
}

TEST(TextUtil, TrimAndSplit) {
  EXPECT_EQ(trim("  a b \n"), "a b");
  EXPECT_EQ(trim("   "), "");
  EXPECT_EQ(split("a,,b", ','), (std::vector<std::string>{"a", "", "b"}));
  EXPECT_EQ(split_words("  one\ttwo  three "), (std::vector<std::string>{"one", "two", "three"}));
}

TEST(TextUtil, GlyphOnly) {
  EXPECT_TRUE(is_glyph_only("\xE2\x98\x85"));
  EXPECT_TRUE(is_glyph_only("\xE2\x86\x90 !"));
  EXPECT_FALSE(is_glyph_only("Back"));
  EXPECT_FALSE(is_glyph_only("\xC3\xA9"));
  EXPECT_FALSE(is_glyph_only("4"));
}

TEST(TextUtil, Slugify) {
  EXPECT_EQ(slugify("Share an Episode!"), "share_an_episode");
  EXPECT_EQ(slugify("  --  "), "untitled");
  EXPECT_EQ(slugify("A/B"), "a_b");
}

}  // namespace
}  // namespace a11y::text

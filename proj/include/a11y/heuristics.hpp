#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "a11y/imaging.hpp"
#include "a11y/ui_model.hpp"
#include "a11y/voiceover.hpp"

namespace a11y {

enum class FindingKind {
  DynamicTypeNoGrowth,
  IconNoGrowth,
  ButtonShapeUnderlinedInContainer,
  ClickableTextNotUnderlined,
  VoiceOverLoop,
  VoiceOverMissingElement,
};

enum class Verdict { Fail, Pass };
enum class ColorRole { IssueOrange, IssueCyan, PassGreen };

std::string_view to_string(FindingKind kind);
std::string_view to_string(Verdict verdict);
std::string_view to_string(ColorRole role);
std::optional<FindingKind> parse_finding_kind(std::string_view name);
std::optional<Verdict> parse_verdict(std::string_view name);
std::optional<ColorRole> parse_color_role(std::string_view name);

/// VoiceOver fails are cyan, other fails orange, passes green.
ColorRole color_for(FindingKind kind, Verdict verdict);

struct HeuristicFinding {
  FindingKind kind = FindingKind::DynamicTypeNoGrowth;
  BoundingBox region;
  std::string screen_id;
  Verdict verdict = Verdict::Fail;
  std::string detail;
  ColorRole color_role = ColorRole::IssueOrange;
  std::string subject;  // element text, or element key for VoiceOver findings

  friend bool operator==(const HeuristicFinding&, const HeuristicFinding&) = default;
};

struct HeuristicConfig {
  double partial_similarity_min = 0.50;
  double growth_min = 0.10;
  double underline_span_min = 0.75;
  double icon_gap_max_frac = 0.5;
  CannyParams canny;
};

/// Throws SpecError unless every fraction lies in (0, 1].
void validate(const HeuristicConfig& cfg);

std::size_t levenshtein(std::u32string_view a, std::u32string_view b);

/// Best match of the shorter string against every equal-length window of the
/// longer one: 1 - distance / |shorter|. Empty vs empty is 1, empty vs
/// non-empty is 0.
double partial_similarity(std::string_view a, std::string_view b);

struct TextMatch {
  std::size_t base_index = 0;   // index into base.elements
  std::size_t grown_index = 0;  // index into grown.elements
  double similarity = 0.0;
  friend bool operator==(const TextMatch&, const TextMatch&) = default;
};

/// Greedy best-first pairing of elements carrying text. Ties prefer the
/// earliest base element, then the earliest grown element.
std::vector<TextMatch> match_text_elements(const ScreenSnapshot& base, const ScreenSnapshot& grown,
                                           const HeuristicConfig& cfg);

/// grown_area >= (1 + growth_min) * base_area, inclusive.
bool grew_enough(long long base_area, long long grown_area, double growth_min);

struct IconPair {
  std::size_t icon_index = 0;
  std::size_t text_index = 0;
  friend bool operator==(const IconPair&, const IconPair&) = default;
};

/// Greedily pairs icons with the text element starting closest to their
/// right edge.
std::vector<IconPair> pair_icons(const ScreenSnapshot& snapshot, const HeuristicConfig& cfg);

/// `grown` is captured one Dynamic Type increment above `base`. One finding
/// per matched text pair and per icon pair carried across the match.
std::vector<HeuristicFinding> dynamic_type_check(const ScreenSnapshot& base, const ScreenSnapshot& grown,
                                                 const HeuristicConfig& cfg);

/// Underline test on the text box patch: grayscale, Otsu binarization,
/// Canny, horizontal line spanning underline_span_min of the width.
bool has_underline(const PixelBuffer& pixels, const BoundingBox& box, const HeuristicConfig& cfg);

std::vector<HeuristicFinding> button_shapes_check(const ScreenSnapshot& snapshot, const PixelBuffer& pixels,
                                                  const HeuristicConfig& cfg);

/// Loop and missing-element findings, deduplicated by screen and element.
std::vector<HeuristicFinding> collect_vo_findings(const std::vector<VisitTrace>& traces,
                                                  const std::vector<ActivationResult>& activations);

}  // namespace a11y

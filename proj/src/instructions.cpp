#include <algorithm>
#include <array>
#include <cctype>

#include <fmt/format.h>

#include "a11y/errors.hpp"
#include "a11y/runner.hpp"
#include "a11y/text_util.hpp"

namespace a11y {

namespace {

constexpr std::array<std::pair<Feature, std::string_view>, 4> kFeatureNames{{
    {Feature::VoiceOver, "VoiceOver"},
    {Feature::DynamicType, "DynamicType"},
    {Feature::BoldText, "BoldText"},
    {Feature::ButtonShapes, "ButtonShapes"},
}};

// Longest phrases first so "bold text" wins over "bold".
constexpr std::array<std::pair<std::string_view, Feature>, 16> kSynonyms{{
    {"dynamic type size", Feature::DynamicType},
    {"button shapes", Feature::ButtonShapes},
    {"dynamic type", Feature::DynamicType},
    {"dynamic text", Feature::DynamicType},
    {"larger text", Feature::DynamicType},
    {"screen reader", Feature::VoiceOver},
    {"button shape", Feature::ButtonShapes},
    {"large text", Feature::DynamicType},
    {"voice over", Feature::VoiceOver},
    {"voiceover", Feature::VoiceOver},
    {"bold text", Feature::BoldText},
    {"text size", Feature::DynamicType},
    {"buttonshapes", Feature::ButtonShapes},
    {"dynamictype", Feature::DynamicType},
    {"boldtext", Feature::BoldText},
    {"vo", Feature::VoiceOver},
}};

constexpr std::array<std::string_view, 6> kPlatforms{"ios", "ipados", "android", "macos", "watchos", "tvos"};
constexpr std::array<std::string_view, 6> kConnectors{"in", "on", "for", "with", "-", "of"};
constexpr std::array<std::string_view, 6> kOrderPhrases{"navigation order", "focus order", "reading order",
                                                        "read all", "read-all", "all elements"};

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

/// Position of `phrase` in `lower` on word boundaries.
std::optional<std::size_t> find_phrase(std::string_view lower, std::string_view phrase) {
  for (auto pos = lower.find(phrase); pos != std::string_view::npos; pos = lower.find(phrase, pos + 1)) {
    const bool left = pos == 0 || !is_word_char(lower[pos - 1]);
    const auto end = pos + phrase.size();
    const bool right = end == lower.size() || !is_word_char(lower[end]);
    if (left && right) return pos;
  }
  return std::nullopt;
}

struct FeatureHit {
  Feature feature;
  std::size_t pos;
  std::size_t len;
};

std::optional<FeatureHit> find_feature(std::string_view text) {
  const auto lower = text::to_lower_ascii(text);
  std::optional<FeatureHit> best;
  for (const auto& [phrase, feature] : kSynonyms) {
    if (auto pos = find_phrase(lower, phrase)) {
      if (!best || *pos < best->pos) best = FeatureHit{feature, *pos, phrase.size()};
    }
  }
  return best;
}

std::string strip_connectors(std::string s) {
  while (true) {
    s = text::trim(s);
    bool changed = false;
    for (auto c : kConnectors) {
      const auto lower = text::to_lower_ascii(s);
      if (lower.size() > c.size() && lower.starts_with(c) &&
          (!is_word_char(lower[c.size()]) || !is_word_char(c.back()))) {
        s = s.substr(c.size());
        changed = true;
        break;
      }
      if (lower == c) return {};
    }
    if (!changed) return s;
  }
}

std::optional<std::string> labelled(std::string_view line, std::string_view label) {
  const auto trimmed = text::trim(line);
  if (trimmed.size() < label.size() + 1) return std::nullopt;
  if (!text::iequals(std::string_view(trimmed).substr(0, label.size()), label)) return std::nullopt;
  const auto rest = std::string_view(trimmed).substr(label.size());
  if (rest.empty() || rest.front() != ':') return std::nullopt;
  return text::trim(rest.substr(1));
}

/// "1. Tap X", "2) Tap Y", "- Tap Z" -> step text.
std::optional<std::string> step_line(std::string_view line) {
  const auto t = text::trim(line);
  std::size_t i = 0;
  while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) ++i;
  if (i > 0 && i < t.size() && (t[i] == '.' || t[i] == ')')) {
    auto rest = text::trim(std::string_view(t).substr(i + 1));
    if (!rest.empty()) return rest;
  }
  if (t.size() > 2 && (t[0] == '-' || t[0] == '*') && t[1] == ' ') return text::trim(std::string_view(t).substr(2));
  return std::nullopt;
}

std::string resolve_app_from_text(std::string_view raw, const InstructionContext& ctx) {
  const auto lower = text::to_lower_ascii(raw);
  std::string best;
  std::size_t best_pos = std::string::npos;
  for (const auto& name : ctx.known_apps) {
    if (auto pos = find_phrase(lower, text::to_lower_ascii(name))) {
      if (*pos < best_pos || (*pos == best_pos && name.size() > best.size())) {
        best = name;
        best_pos = *pos;
      }
    }
  }
  return best;
}

}  // namespace

std::string_view to_string(Feature feature) {
  for (const auto& [f, name] : kFeatureNames) {
    if (f == feature) return name;
  }
  return "VoiceOver";
}

std::optional<Feature> parse_feature(std::string_view name) {
  for (const auto& [f, n] : kFeatureNames) {
    if (text::iequals(n, name)) return f;
  }
  return match_feature_synonym(name);
}

std::optional<Feature> match_feature_synonym(std::string_view phrase) {
  const auto lower = text::to_lower_ascii(text::trim(phrase));
  for (const auto& [p, f] : kSynonyms) {
    if (lower == p) return f;
  }
  if (auto hit = find_feature(phrase)) return hit->feature;
  return std::nullopt;
}

std::vector<std::string> supported_feature_names() {
  std::vector<std::string> out;
  for (const auto& [f, name] : kFeatureNames) out.emplace_back(name);
  return out;
}

std::string_view to_string(Difficulty difficulty) { return difficulty == Difficulty::Easy ? "Easy" : "Hard"; }

std::optional<Difficulty> parse_difficulty(std::string_view name) {
  if (text::iequals(text::trim(name), "easy")) return Difficulty::Easy;
  if (text::iequals(text::trim(name), "hard")) return Difficulty::Hard;
  return std::nullopt;
}

TestSpec parse_instructions(std::string_view raw, const InstructionContext& ctx) {
  if (text::trim(raw).empty()) throw SpecError("empty test instructions");
  TestSpec spec;

  // Normalize the one-line "Title: ...; Instructions: ...; Expected Results: ..." shape.
  std::string normalized(raw);
  for (std::string_view label : {"; Instructions:", "; Expected Results:", "; Steps:"}) {
    for (auto pos = normalized.find(label); pos != std::string::npos; pos = normalized.find(label)) {
      normalized.replace(pos, 2, "\n");
    }
  }

  std::optional<std::string> title;
  bool in_expected = false;
  std::vector<std::string> expected_lines;
  for (const auto& line : text::split(normalized, '\n')) {
    const auto t = text::trim(line);
    if (t.empty()) continue;
    if (auto v = labelled(t, "Title")) {
      title = *v;
      continue;
    }
    if (auto v = labelled(t, "Expected Results")) {
      in_expected = true;
      if (!v->empty()) expected_lines.push_back(*v);
      continue;
    }
    if (auto v = labelled(t, "Target Screen")) {
      spec.target_screen = *v;
      continue;
    }
    if (auto v = labelled(t, "Difficulty")) {
      spec.difficulty = parse_difficulty(*v);
      if (!spec.difficulty) throw SpecError(fmt::format("unknown difficulty '{}'", *v));
      continue;
    }
    if (auto v = labelled(t, "App")) {
      spec.app_name = *v;
      continue;
    }
    if (labelled(t, "Instructions") || labelled(t, "Steps") || t == "Instructions:" || t == "Steps:") {
      in_expected = false;
      const auto colon = t.find(':');
      const auto rest = text::trim(std::string_view(t).substr(colon + 1));
      if (!rest.empty()) {
        if (auto s = step_line(rest)) spec.steps.push_back(*s);
        else spec.steps.push_back(rest);
      }
      continue;
    }
    if (auto s = step_line(t)) {
      (in_expected ? expected_lines : spec.steps).push_back(*s);
      continue;
    }
    if (in_expected) {
      expected_lines.push_back(t);
      continue;
    }
    if (!title) title = t;
  }
  if (!expected_lines.empty()) {
    std::string joined;
    for (const auto& l : expected_lines) joined += (joined.empty() ? "" : " ") + l;
    spec.expected_results = joined;
  }
  spec.title = title.value_or("");

  // Title: [platform:] [app:] feature[: goal] with the feature possibly
  // leading a phrase ("Large Text in Following Tab").
  auto parts = text::split(spec.title, ':');
  for (auto& p : parts) p = text::trim(p);
  std::erase_if(parts, [](const std::string& p) { return p.empty(); });
  if (!parts.empty()) {
    const auto first = text::to_lower_ascii(parts.front());
    if (std::find(kPlatforms.begin(), kPlatforms.end(), first) != kPlatforms.end()) {
      spec.platform = parts.front();
      parts.erase(parts.begin());
    }
  }
  std::optional<std::size_t> feature_part;
  for (std::size_t i = 0; i < parts.size() && !feature_part; ++i) {
    if (auto hit = find_feature(parts[i])) {
      feature_part = i;
      spec.feature = hit->feature;
      const auto after = strip_connectors(parts[i].substr(hit->pos + hit->len));
      std::vector<std::string> goal_parts;
      if (!after.empty()) goal_parts.push_back(after);
      for (std::size_t j = i + 1; j < parts.size(); ++j) goal_parts.push_back(parts[j]);
      std::string goal;
      for (const auto& g : goal_parts) goal += (goal.empty() ? "" : ": ") + g;
      spec.goal = goal;
      const auto before = text::trim(std::string_view(parts[i]).substr(0, hit->pos));
      std::vector<std::string> app_parts(parts.begin(), parts.begin() + static_cast<std::ptrdiff_t>(i));
      if (!before.empty()) app_parts.push_back(before);
      if (spec.app_name.empty() && !app_parts.empty()) {
        std::string app;
        for (const auto& a : app_parts) app += (app.empty() ? "" : ": ") + a;
        spec.app_name = app;
      }
    }
  }
  if (!feature_part) {
    // Feature named outside the title (e.g. in a step)?
    if (auto hit = find_feature(raw)) {
      spec.feature = hit->feature;
      feature_part = parts.size();
    }
  }

  if (spec.app_name.empty()) spec.app_name = resolve_app_from_text(raw, ctx);
  if (spec.app_name.empty() && ctx.default_app) spec.app_name = *ctx.default_app;

  if ((!feature_part || spec.app_name.empty()) && ctx.fallback) {
    const auto guess = ctx.fallback->extract_instructions(raw, supported_feature_names());
    if (!feature_part) {
      if (auto f = match_feature_synonym(guess.feature)) {
        spec.feature = *f;
        feature_part = 0;
      }
    }
    if (spec.app_name.empty()) spec.app_name = text::trim(guess.app_name);
    if (spec.goal.empty()) spec.goal = text::trim(guess.goal);
  }
  if (!feature_part) {
    throw SpecError(fmt::format("cannot tell which accessibility feature to test; supported: {}",
                                fmt::join(supported_feature_names(), ", ")));
  }
  if (spec.app_name.empty()) throw SpecError("cannot tell which app to test");
  if (spec.goal.empty()) spec.goal = spec.title.empty() ? spec.app_name : spec.title;

  const auto lower = text::to_lower_ascii(raw);
  spec.verify_vo_order = std::any_of(kOrderPhrases.begin(), kOrderPhrases.end(),
                                     [&](std::string_view p) { return lower.find(p) != std::string::npos; });
  return spec;
}

}  // namespace a11y

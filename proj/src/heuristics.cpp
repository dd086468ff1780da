#include "a11y/heuristics.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "a11y/errors.hpp"
#include "a11y/text_util.hpp"

namespace a11y {

namespace {

constexpr std::array<std::pair<FindingKind, std::string_view>, 6> kFindingNames{{
    {FindingKind::DynamicTypeNoGrowth, "DynamicTypeNoGrowth"},
    {FindingKind::IconNoGrowth, "IconNoGrowth"},
    {FindingKind::ButtonShapeUnderlinedInContainer, "ButtonShapeUnderlinedInContainer"},
    {FindingKind::ClickableTextNotUnderlined, "ClickableTextNotUnderlined"},
    {FindingKind::VoiceOverLoop, "VoiceOverLoop"},
    {FindingKind::VoiceOverMissingElement, "VoiceOverMissingElement"},
}};

// Similarity as an exact fraction so ties compare without rounding.
struct Ratio {
  long long num = 0;
  long long den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

bool ratio_less(const Ratio& a, const Ratio& b) { return a.num * b.den < b.num * a.den; }

Ratio partial_ratio(std::string_view a, std::string_view b) {
  auto ua = text::decode_utf8(a);
  auto ub = text::decode_utf8(b);
  if (ua.size() > ub.size()) std::swap(ua, ub);
  if (ua.empty()) return {ub.empty() ? 1 : 0, 1};
  std::size_t best = ua.size();
  const std::u32string_view longer(ub);
  for (std::size_t start = 0; start + ua.size() <= ub.size() && best > 0; ++start) {
    best = std::min(best, levenshtein(ua, longer.substr(start, ua.size())));
  }
  const auto len = static_cast<long long>(ua.size());
  return {len - static_cast<long long>(best), len};
}

double growth_percent(long long base, long long grown) {
  if (base == 0) return 0.0;
  return 100.0 * static_cast<double>(grown - base) / static_cast<double>(base);
}

HeuristicFinding make_finding(FindingKind kind, Verdict verdict, const BoundingBox& region,
                              std::string screen_id, std::string subject, std::string detail) {
  return {kind, region, std::move(screen_id), verdict, std::move(detail), color_for(kind, verdict),
          std::move(subject)};
}

}  // namespace

std::string_view to_string(FindingKind kind) {
  for (const auto& [k, name] : kFindingNames) {
    if (k == kind) return name;
  }
  return "DynamicTypeNoGrowth";
}

std::optional<FindingKind> parse_finding_kind(std::string_view name) {
  for (const auto& [k, n] : kFindingNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

std::string_view to_string(Verdict verdict) { return verdict == Verdict::Pass ? "pass" : "fail"; }

std::optional<Verdict> parse_verdict(std::string_view name) {
  if (name == "pass") return Verdict::Pass;
  if (name == "fail") return Verdict::Fail;
  return std::nullopt;
}

std::string_view to_string(ColorRole role) {
  switch (role) {
    case ColorRole::IssueOrange: return "issue-orange";
    case ColorRole::IssueCyan: return "issue-cyan";
    case ColorRole::PassGreen: return "pass-green";
  }
  return "issue-orange";
}

std::optional<ColorRole> parse_color_role(std::string_view name) {
  if (name == "issue-orange") return ColorRole::IssueOrange;
  if (name == "issue-cyan") return ColorRole::IssueCyan;
  if (name == "pass-green") return ColorRole::PassGreen;
  return std::nullopt;
}

ColorRole color_for(FindingKind kind, Verdict verdict) {
  if (verdict == Verdict::Pass) return ColorRole::PassGreen;
  if (kind == FindingKind::VoiceOverLoop || kind == FindingKind::VoiceOverMissingElement) {
    return ColorRole::IssueCyan;
  }
  return ColorRole::IssueOrange;
}

void validate(const HeuristicConfig& cfg) {
  const std::pair<std::string_view, double> fields[] = {
      {"partial_similarity_min", cfg.partial_similarity_min},
      {"growth_min", cfg.growth_min},
      {"underline_span_min", cfg.underline_span_min},
      {"icon_gap_max_frac", cfg.icon_gap_max_frac},
  };
  for (const auto& [name, v] : fields) {
    if (!(v > 0.0 && v <= 1.0)) throw SpecError(fmt::format("{} must be in (0, 1], got {}", name, v));
  }
  if (!(cfg.canny.low >= 0.0 && cfg.canny.low < cfg.canny.high)) {
    throw SpecError(fmt::format("canny thresholds need 0 <= low < high, got {} / {}", cfg.canny.low,
                                cfg.canny.high));
  }
}

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

double partial_similarity(std::string_view a, std::string_view b) { return partial_ratio(a, b).value(); }

std::vector<TextMatch> match_text_elements(const ScreenSnapshot& base, const ScreenSnapshot& grown,
                                           const HeuristicConfig& cfg) {
  struct Candidate {
    std::size_t i, j;
    Ratio sim;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < base.elements.size(); ++i) {
    if (!base.elements[i].has_text()) continue;
    for (std::size_t j = 0; j < grown.elements.size(); ++j) {
      if (!grown.elements[j].has_text()) continue;
      const auto sim = partial_ratio(*base.elements[i].text, *grown.elements[j].text);
      if (sim.value() + 1e-12 >= cfg.partial_similarity_min) candidates.push_back({i, j, sim});
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (ratio_less(b.sim, a.sim)) return true;
    if (ratio_less(a.sim, b.sim)) return false;
    return std::tie(a.i, a.j) < std::tie(b.i, b.j);
  });
  std::vector<bool> used_base(base.elements.size()), used_grown(grown.elements.size());
  std::vector<TextMatch> out;
  for (const auto& c : candidates) {
    if (used_base[c.i] || used_grown[c.j]) continue;
    used_base[c.i] = used_grown[c.j] = true;
    out.push_back({c.i, c.j, c.sim.value()});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.base_index < b.base_index; });
  return out;
}

bool grew_enough(long long base_area, long long grown_area, double growth_min) {
  const auto base = static_cast<double>(base_area);
  return static_cast<double>(grown_area - base_area) + 1e-9 * base >= growth_min * base;
}

std::vector<IconPair> pair_icons(const ScreenSnapshot& snapshot, const HeuristicConfig& cfg) {
  struct Candidate {
    int gap;
    std::size_t icon, text;
  };
  std::vector<Candidate> candidates;
  const auto& els = snapshot.elements;
  for (std::size_t i = 0; i < els.size(); ++i) {
    if (els[i].kind != ElementKind::Icon) continue;
    const auto& icon = els[i].box;
    for (std::size_t t = 0; t < els.size(); ++t) {
      if (t == i || !els[t].has_text()) continue;
      const auto& text = els[t].box;
      const int gap = text.x0 - icon.x1;
      if (gap < 0) continue;
      if (gap > cfg.icon_gap_max_frac * icon.width()) continue;
      if (icon.y0 < text.y0 || icon.y1 > text.y1) continue;
      candidates.push_back({gap, i, t});
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    return std::tie(a.gap, a.icon, a.text) < std::tie(b.gap, b.icon, b.text);
  });
  std::vector<bool> used_icon(els.size()), used_text(els.size());
  std::vector<IconPair> out;
  for (const auto& c : candidates) {
    if (used_icon[c.icon] || used_text[c.text]) continue;
    used_icon[c.icon] = used_text[c.text] = true;
    out.push_back({c.icon, c.text});
  }
  return out;
}

std::vector<HeuristicFinding> dynamic_type_check(const ScreenSnapshot& base, const ScreenSnapshot& grown,
                                                 const HeuristicConfig& cfg) {
  std::vector<HeuristicFinding> findings;
  const auto matches = match_text_elements(base, grown, cfg);
  for (const auto& m : matches) {
    const auto& b = base.elements[m.base_index];
    const auto& g = grown.elements[m.grown_index];
    const auto ba = b.box.area();
    const auto ga = g.box.area();
    const bool ok = grew_enough(ba, ga, cfg.growth_min);
    findings.push_back(make_finding(
        FindingKind::DynamicTypeNoGrowth, ok ? Verdict::Pass : Verdict::Fail, g.box, grown.screen_id, *g.text,
        fmt::format("text \"{}\" area {} -> {} ({:+.1f}%, need {:.0f}%)", *g.text, ba, ga, growth_percent(ba, ga),
                    cfg.growth_min * 100.0)));
  }

  const auto base_icons = pair_icons(base, cfg);
  const auto grown_icons = pair_icons(grown, cfg);
  for (const auto& bp : base_icons) {
    auto m = std::find_if(matches.begin(), matches.end(),
                          [&](const TextMatch& tm) { return tm.base_index == bp.text_index; });
    if (m == matches.end()) continue;
    auto gp = std::find_if(grown_icons.begin(), grown_icons.end(),
                           [&](const IconPair& p) { return p.text_index == m->grown_index; });
    if (gp == grown_icons.end()) continue;
    const auto& bi = base.elements[bp.icon_index];
    const auto& gi = grown.elements[gp->icon_index];
    const auto& label = *grown.elements[gp->text_index].text;
    const auto ba = bi.box.area();
    const auto ga = gi.box.area();
    const bool ok = grew_enough(ba, ga, cfg.growth_min);
    findings.push_back(make_finding(
        FindingKind::IconNoGrowth, ok ? Verdict::Pass : Verdict::Fail, gi.box, grown.screen_id, label,
        fmt::format("icon beside \"{}\" area {} -> {} ({:+.1f}%, need {:.0f}%)", label, ba, ga,
                    growth_percent(ba, ga), cfg.growth_min * 100.0)));
  }
  return findings;
}

bool has_underline(const PixelBuffer& pixels, const BoundingBox& box, const HeuristicConfig& cfg) {
  const auto gray = to_grayscale(extract_patch(pixels, box));
  const auto binary = binarize(gray, otsu_threshold(gray));
  const auto edges = canny_edges(binary, cfg.canny.low, cfg.canny.high);
  return !hough_horizontal_lines(edges, cfg.underline_span_min).empty();
}

std::vector<HeuristicFinding> button_shapes_check(const ScreenSnapshot& snapshot, const PixelBuffer& pixels,
                                                  const HeuristicConfig& cfg) {
  std::vector<HeuristicFinding> findings;
  const auto& els = snapshot.elements;
  for (std::size_t i = 0; i < els.size(); ++i) {
    const auto& e = els[i];
    if (e.kind != ElementKind::Text || !e.has_text() || text::is_glyph_only(*e.text)) continue;
    if (e.box.area() == 0) continue;
    const bool contained = std::any_of(els.begin(), els.end(), [&](const UIElement& c) {
      return &c != &e && (c.kind == ElementKind::Button || c.kind == ElementKind::Tab) && c.box.contains(e.box);
    });
    if (!contained && !e.clickable) continue;
    bool underlined = false;
    try {
      underlined = has_underline(pixels, e.box, cfg);
    } catch (const PatchError&) {
      continue;
    }
    if (contained) {
      findings.push_back(make_finding(
          FindingKind::ButtonShapeUnderlinedInContainer, underlined ? Verdict::Fail : Verdict::Pass, e.box,
          snapshot.screen_id, *e.text,
          underlined ? fmt::format("\"{}\" is underlined inside a button shape", *e.text)
                     : fmt::format("\"{}\" relies on its button shape", *e.text)));
    } else {
      findings.push_back(make_finding(
          FindingKind::ClickableTextNotUnderlined, underlined ? Verdict::Pass : Verdict::Fail, e.box,
          snapshot.screen_id, *e.text,
          underlined ? fmt::format("clickable \"{}\" is underlined", *e.text)
                     : fmt::format("clickable \"{}\" has no underline or button shape", *e.text)));
    }
  }
  return findings;
}

std::vector<HeuristicFinding> collect_vo_findings(const std::vector<VisitTrace>& traces,
                                                  const std::vector<ActivationResult>& activations) {
  std::vector<HeuristicFinding> findings;
  std::set<ElementRef> loops_seen;
  std::set<std::tuple<std::string, int, int, int, int>> missing_seen;
  auto add_loop = [&](const VisitTrace& trace) {
    if (!trace.loop) return;
    const auto& loop = *trace.loop;
    if (!loops_seen.insert(loop.repeated_element).second) return;
    const auto& caption = trace.visited[static_cast<std::size_t>(loop.repeat_index)].caption;
    findings.push_back(make_finding(
        FindingKind::VoiceOverLoop, Verdict::Fail, loop.region, loop.repeated_element.screen_id,
        loop.repeated_element.key,
        fmt::format("VoiceOver focus returned to \"{}\" after {} swipes{}", caption,
                    loop.repeat_index - loop.first_index, loop.broke_out ? "" : "; no element below to escape to")));
  };
  for (const auto& t : traces) add_loop(t);
  for (const auto& a : activations) {
    add_loop(a.trace);
    if (!a.missing) continue;
    const auto& b = a.target_box;
    if (!missing_seen.emplace(a.screen_id, b.x0, b.y0, b.x1, b.y1).second) continue;
    findings.push_back(make_finding(
        FindingKind::VoiceOverMissingElement, Verdict::Fail, b, a.screen_id,
        fmt::format("({}, {})", a.requested.x, a.requested.y),
        fmt::format("no VoiceOver element contains ({}, {}) after {} forward and {} backward swipes", a.requested.x,
                    a.requested.y, a.swipes_forward, a.swipes_backward)));
  }
  return findings;
}

}  // namespace a11y

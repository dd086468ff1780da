#include "a11y/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include <fmt/format.h>

#include "a11y/errors.hpp"

namespace a11y {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::replace(s.begin(), s.end(), '\r', ' ');
  for (auto pos = s.find("-->"); pos != std::string::npos; pos = s.find("-->")) s.replace(pos, 3, "->");
  return s;
}

std::string issue_title(const HeuristicFinding& f) {
  return one_line(fmt::format("Issue: {} on {}: {}", to_string(f.kind), f.screen_id, f.subject));
}

json box_json(const BoundingBox& b) { return json::array({b.x0, b.y0, b.x1, b.y1}); }

BoundingBox box_from(const json& j) {
  if (!j.is_array() || j.size() != 4) throw ParseError("box must be [x0, y0, x1, y1]");
  return {j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()};
}

template <typename T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> opt_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

std::optional<EventKind> parse_event_kind(std::string_view name) {
  for (auto k : {EventKind::Action, EventKind::Screenshot, EventKind::Finding, EventKind::PlanRevision,
                 EventKind::ChapterBoundary}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

json event_json(const SessionEvent& e) {
  return {{"t_ms", e.t_ms},
          {"duration_ms", e.duration_ms},
          {"kind", std::string(to_string(e.kind))},
          {"name", e.name},
          {"detail", e.detail},
          {"screen_id", e.screen_id},
          {"point", e.point ? json::array({e.point->x, e.point->y}) : json(nullptr)},
          {"direction", opt(e.direction)},
          {"frame_index", opt(e.frame_index)},
          {"finding_index", opt(e.finding_index)},
          {"pass_index", e.pass_index}};
}

SessionEvent event_from(const json& j) {
  SessionEvent e;
  e.t_ms = j.at("t_ms").get<long long>();
  e.duration_ms = j.at("duration_ms").get<long long>();
  auto kind = parse_event_kind(j.at("kind").get<std::string>());
  if (!kind) throw ParseError("unknown event kind");
  e.kind = *kind;
  e.name = j.at("name").get<std::string>();
  e.detail = j.at("detail").get<std::string>();
  e.screen_id = j.at("screen_id").get<std::string>();
  if (!j.at("point").is_null()) e.point = Point{j.at("point")[0].get<int>(), j.at("point")[1].get<int>()};
  e.direction = opt_from<std::string>(j, "direction");
  e.frame_index = opt_from<int>(j, "frame_index");
  e.finding_index = opt_from<int>(j, "finding_index");
  e.pass_index = j.at("pass_index").get<int>();
  return e;
}

json pass_json(const PassSummary& p) {
  return {{"index", p.index},
          {"label", p.label},
          {"navigation", std::string(to_string(p.navigation))},
          {"final_screen", p.final_screen},
          {"reached_target", p.reached_target},
          {"steps_succeeded", p.steps_succeeded},
          {"explanation", p.explanation}};
}

PassSummary pass_from(const json& j) {
  PassSummary p;
  p.index = j.at("index").get<int>();
  p.label = j.at("label").get<std::string>();
  const auto nav = j.at("navigation").get<std::string>();
  if (nav == "reached") p.navigation = NavigationStatus::Reached;
  else if (nav == "partial") p.navigation = NavigationStatus::Partial;
  else if (nav == "failed") p.navigation = NavigationStatus::Failed;
  else throw ParseError("unknown navigation status");
  p.final_screen = j.at("final_screen").get<std::string>();
  p.reached_target = j.at("reached_target").get<bool>();
  p.steps_succeeded = j.at("steps_succeeded").get<int>();
  p.explanation = j.at("explanation").get<std::string>();
  return p;
}

json chapter_json(const ChapterMarker& c) {
  return {{"start_ms", c.start_ms},
          {"end_ms", c.end_ms},
          {"title", c.title},
          {"kind", std::string(to_string(c.kind))},
          {"finding_ref", opt(c.finding_ref)}};
}

ChapterMarker chapter_from(const json& j) {
  ChapterMarker c;
  c.start_ms = j.at("start_ms").get<long long>();
  c.end_ms = j.at("end_ms").get<long long>();
  c.title = j.at("title").get<std::string>();
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "step") c.kind = ChapterKind::Step;
  else if (kind == "issue") c.kind = ChapterKind::Issue;
  else throw ParseError("unknown chapter kind");
  c.finding_ref = opt_from<int>(j, "finding_ref");
  return c;
}

void draw_arrow(PixelBuffer& buf, Point origin, SwipeDirection dir) {
  int dx = 0;
  int dy = 0;
  switch (dir) {
    case SwipeDirection::Up: dy = -1; break;
    case SwipeDirection::Down: dy = 1; break;
    case SwipeDirection::Left: dx = -1; break;
    case SwipeDirection::Right: dx = 1; break;
  }
  const int tx = origin.x + dx * kArrowLength;
  const int ty = origin.y + dy * kArrowLength;
  draw_line(buf, origin.x, origin.y, tx, ty, kCursorPink, kStrokeWidth);
  const int head = kArrowLength / 4;
  // Head wings point back along the shaft, one on each side.
  draw_line(buf, tx, ty, tx - dx * head + dy * head, ty - dy * head + dx * head, kCursorPink, kStrokeWidth);
  draw_line(buf, tx, ty, tx - dx * head - dy * head, ty - dy * head - dx * head, kCursorPink, kStrokeWidth);
}

}  // namespace

std::string_view to_string(ChapterKind kind) { return kind == ChapterKind::Step ? "step" : "issue"; }

Color color_of(ColorRole role) {
  switch (role) {
    case ColorRole::IssueOrange: return kIssueOrange;
    case ColorRole::IssueCyan: return kIssueCyan;
    case ColorRole::PassGreen: return kPassGreen;
  }
  return kIssueOrange;
}

std::vector<ChapterMarker> build_chapters(const SessionRecording& recording) {
  const auto& events = recording.events;
  if (events.empty()) return {};
  const long long start = events.front().t_ms;
  long long end = start;
  for (const auto& e : events) end = std::max(end, e.t_ms + e.duration_ms);
  if (end <= start) return {};

  struct Segment {
    long long start;
    std::string title;
  };
  std::vector<Segment> segments;
  for (const auto& e : events) {
    if (e.kind == EventKind::ChapterBoundary) segments.push_back({e.t_ms, one_line(e.name)});
  }
  if (segments.empty()) {
    segments.push_back({start, one_line(recording.spec.title.empty() ? "Session" : recording.spec.title)});
  }
  segments.front().start = start;

  struct Issue {
    long long start;
    long long end;
    int finding;
  };
  std::vector<Issue> issues;
  for (const auto& e : events) {
    if (e.kind != EventKind::Finding || !e.finding_index || e.duration_ms <= 0) continue;
    const auto idx = static_cast<std::size_t>(*e.finding_index);
    if (idx >= recording.findings.size() || recording.findings[idx].verdict != Verdict::Fail) continue;
    issues.push_back({e.t_ms, std::min(end, e.t_ms + e.duration_ms), *e.finding_index});
  }

  std::set<long long> cuts{start, end};
  for (const auto& s : segments) cuts.insert(s.start);
  for (const auto& i : issues) {
    cuts.insert(i.start);
    cuts.insert(i.end);
  }

  std::vector<ChapterMarker> out;
  std::optional<std::pair<std::size_t, int>> last_owner;  // (segment, issue or -1)
  for (auto it = cuts.begin(); it != cuts.end(); ++it) {
    const auto next = std::next(it);
    if (next == cuts.end()) break;
    const long long a = *it;
    const long long b = *next;
    if (a < start || b > end) continue;

    std::size_t seg = 0;
    for (std::size_t k = 0; k < segments.size(); ++k) {
      if (segments[k].start <= a) seg = k;
    }
    int issue = -1;
    for (std::size_t k = 0; k < issues.size(); ++k) {
      if (issues[k].start <= a && a < issues[k].end) {
        issue = static_cast<int>(k);
        break;
      }
    }
    const std::pair<std::size_t, int> owner{issue >= 0 ? 0 : seg, issue};
    if (last_owner == owner) {
      out.back().end_ms = b;
      continue;
    }
    last_owner = owner;
    ChapterMarker c;
    c.start_ms = a;
    c.end_ms = b;
    if (issue >= 0) {
      const auto& iss = issues[static_cast<std::size_t>(issue)];
      c.kind = ChapterKind::Issue;
      c.finding_ref = iss.finding;
      c.title = issue_title(recording.findings[static_cast<std::size_t>(iss.finding)]);
    } else {
      c.title = segments[seg].title;
    }
    out.push_back(std::move(c));
  }
  return out;
}

PixelBuffer annotate_frame(const PixelBuffer& frame, const std::vector<Overlay>& overlays) {
  if (overlays.empty()) return frame;
  PixelBuffer out = frame.channels == 3 ? frame : to_rgb(frame);
  for (const auto& o : overlays) {
    switch (o.kind) {
      case Overlay::Kind::Crosshair:
        draw_line(out, o.point.x - kCrosshairArm, o.point.y, o.point.x + kCrosshairArm, o.point.y, kCursorPink,
                  kStrokeWidth);
        draw_line(out, o.point.x, o.point.y - kCrosshairArm, o.point.x, o.point.y + kCrosshairArm, kCursorPink,
                  kStrokeWidth);
        break;
      case Overlay::Kind::Arrow: draw_arrow(out, o.point, o.direction); break;
      case Overlay::Kind::Box: stroke_rect(out, o.box, color_of(o.color), kStrokeWidth); break;
    }
  }
  return out;
}

std::string vtt_timestamp(long long recording_ms, double speedup_factor) {
  const auto ms = static_cast<long long>(std::floor(static_cast<double>(recording_ms) / speedup_factor));
  return fmt::format("{:02}:{:02}:{:02}.{:03}", ms / 3600000, (ms / 60000) % 60, (ms / 1000) % 60, ms % 1000);
}

std::string render_vtt(const std::vector<ChapterMarker>& chapters, double speedup_factor) {
  std::string out = "WEBVTT\n";
  int cue = 0;
  for (const auto& c : chapters) {
    const auto from = vtt_timestamp(c.start_ms, speedup_factor);
    const auto to = vtt_timestamp(c.end_ms, speedup_factor);
    if (from == to) continue;
    out += fmt::format("\n{}\n{} --> {}\n{}\n", ++cue, from, to, c.title);
  }
  return out;
}

TestReport make_report(const SessionRecording& recording, const ExportOptions& options) {
  if (!(options.speedup_factor > 0)) throw ExportError("speedup factor must be positive");
  TestReport r;
  r.spec = recording.spec;
  r.status = recording.final_status;
  r.status_detail = recording.status_detail;
  r.speedup_factor = options.speedup_factor;
  r.passes = recording.passes;
  r.chapters = build_chapters(recording);
  r.findings = recording.findings;
  std::set<int> referenced;
  for (const auto& c : r.chapters) {
    if (c.finding_ref) referenced.insert(*c.finding_ref);
  }
  for (std::size_t i = 0; i < r.findings.size(); ++i) {
    if (r.findings[i].verdict == Verdict::Fail && !referenced.count(static_cast<int>(i))) {
      r.residual_findings.push_back(static_cast<int>(i));
    }
  }
  for (std::size_t i = 0; i < recording.frames.size(); ++i) {
    const auto& f = recording.frames[i];
    r.frames.push_back({f.t_ms, fmt::format("frame_{:05}.png", i), f.label, f.screen_id});
  }
  r.events = recording.events;
  r.exchanges = recording.exchanges;
  return r;
}

TestReport export_report(const SessionRecording& recording, const fs::path& out_dir, const ExportOptions& options) {
  auto report = make_report(recording, options);
  std::vector<fs::path> written;
  auto cleanup = [&] {
    std::error_code ec;
    for (const auto& p : written) fs::remove(p, ec);
  };
  try {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir)) {
      throw ExportError(fmt::format("cannot create output directory {}: {}", out_dir.string(), ec.message()));
    }
    // Drop artifacts of an earlier export so a shorter recording leaves no stale frames.
    for (const auto& entry : fs::directory_iterator(out_dir)) {
      const auto name = entry.path().filename().string();
      if (name.starts_with("frame_") && name.ends_with(".png")) fs::remove(entry.path());
    }
    for (std::size_t i = 0; i < recording.frames.size(); ++i) {
      const auto& frame = recording.frames[i];
      const auto path = out_dir / report.frames[i].file;
      written.push_back(path);
      write_png(path, annotate_frame(render_frame(frame), frame.overlays));
    }
    auto write_text = [&](const fs::path& path, const std::string& text) {
      written.push_back(path);
      std::ofstream out(path, std::ios::binary | std::ios::trunc);
      out << text;
      out.close();
      if (!out) throw ExportError(fmt::format("cannot write {}", path.string()));
    };
    write_text(out_dir / "chapters.vtt", render_vtt(report.chapters, report.speedup_factor));
    write_text(out_dir / "report.json", to_json(report).dump(2) + "\n");
  } catch (const ExportError&) {
    cleanup();
    throw;
  } catch (const std::exception& e) {
    cleanup();
    throw ExportError(fmt::format("export to {} failed: {}", out_dir.string(), e.what()));
  }
  return report;
}

json to_json(const TestSpec& spec) {
  return {{"title", spec.title},
          {"platform", spec.platform},
          {"app_name", spec.app_name},
          {"feature", std::string(to_string(spec.feature))},
          {"goal", spec.goal},
          {"steps", spec.steps},
          {"expected_results", opt(spec.expected_results)},
          {"difficulty", spec.difficulty ? json(std::string(to_string(*spec.difficulty))) : json(nullptr)},
          {"target_screen", opt(spec.target_screen)},
          {"verify_vo_order", spec.verify_vo_order}};
}

TestSpec spec_from_json(const json& j) {
  TestSpec s;
  s.title = j.at("title").get<std::string>();
  s.platform = j.at("platform").get<std::string>();
  s.app_name = j.at("app_name").get<std::string>();
  auto feature = parse_feature(j.at("feature").get<std::string>());
  if (!feature) throw ParseError("unknown feature");
  s.feature = *feature;
  s.goal = j.at("goal").get<std::string>();
  s.steps = j.at("steps").get<std::vector<std::string>>();
  s.expected_results = opt_from<std::string>(j, "expected_results");
  if (auto d = opt_from<std::string>(j, "difficulty")) {
    s.difficulty = parse_difficulty(*d);
    if (!s.difficulty) throw ParseError("unknown difficulty");
  }
  s.target_screen = opt_from<std::string>(j, "target_screen");
  s.verify_vo_order = j.at("verify_vo_order").get<bool>();
  return s;
}

json to_json(const HeuristicFinding& f) {
  return {{"kind", std::string(to_string(f.kind))},
          {"region", box_json(f.region)},
          {"screen_id", f.screen_id},
          {"verdict", std::string(to_string(f.verdict))},
          {"detail", f.detail},
          {"color_role", std::string(to_string(f.color_role))},
          {"subject", f.subject}};
}

HeuristicFinding finding_from_json(const json& j) {
  HeuristicFinding f;
  auto kind = parse_finding_kind(j.at("kind").get<std::string>());
  auto verdict = parse_verdict(j.at("verdict").get<std::string>());
  auto color = parse_color_role(j.at("color_role").get<std::string>());
  if (!kind || !verdict || !color) throw ParseError("malformed finding");
  f.kind = *kind;
  f.verdict = *verdict;
  f.color_role = *color;
  f.region = box_from(j.at("region"));
  f.screen_id = j.at("screen_id").get<std::string>();
  f.detail = j.at("detail").get<std::string>();
  f.subject = j.at("subject").get<std::string>();
  return f;
}

json to_json(const TestReport& r) {
  json j;
  j["schema_version"] = r.schema_version;
  j["spec"] = to_json(r.spec);
  j["status"] = std::string(to_string(r.status));
  j["status_detail"] = r.status_detail;
  j["speedup_factor"] = r.speedup_factor;
  j["passes"] = json::array();
  for (const auto& p : r.passes) j["passes"].push_back(pass_json(p));
  j["chapters"] = json::array();
  for (const auto& c : r.chapters) j["chapters"].push_back(chapter_json(c));
  j["findings"] = json::array();
  for (const auto& f : r.findings) j["findings"].push_back(to_json(f));
  j["residual_findings"] = r.residual_findings;
  j["frames"] = json::array();
  for (const auto& f : r.frames) {
    j["frames"].push_back({{"t_ms", f.t_ms}, {"file", f.file}, {"label", f.label}, {"screen_id", f.screen_id}});
  }
  j["events"] = json::array();
  for (const auto& e : r.events) j["events"].push_back(event_json(e));
  j["exchanges"] = json::array();
  for (const auto& e : r.exchanges) j["exchanges"].push_back(to_json(e));
  return j;
}

TestReport report_from_json(const json& j) {
  try {
    TestReport r;
    r.schema_version = j.at("schema_version").get<int>();
    if (r.schema_version != kReportSchemaVersion) {
      throw ParseError(fmt::format("unsupported report schema version {}", r.schema_version));
    }
    r.spec = spec_from_json(j.at("spec"));
    auto status = parse_final_status(j.at("status").get<std::string>());
    if (!status) throw ParseError("unknown final status");
    r.status = *status;
    r.status_detail = j.at("status_detail").get<std::string>();
    r.speedup_factor = j.at("speedup_factor").get<double>();
    for (const auto& p : j.at("passes")) r.passes.push_back(pass_from(p));
    for (const auto& c : j.at("chapters")) r.chapters.push_back(chapter_from(c));
    for (const auto& f : j.at("findings")) r.findings.push_back(finding_from_json(f));
    r.residual_findings = j.at("residual_findings").get<std::vector<int>>();
    for (const auto& f : j.at("frames")) {
      r.frames.push_back({f.at("t_ms").get<long long>(), f.at("file").get<std::string>(),
                          f.at("label").get<std::string>(), f.at("screen_id").get<std::string>()});
    }
    for (const auto& e : j.at("events")) r.events.push_back(event_from(e));
    for (const auto& e : j.at("exchanges")) r.exchanges.push_back(exchange_from_json(e));
    return r;
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("malformed report: {}", e.what()));
  }
}

json to_json(const ScreenSnapshot& snapshot) {
  json elements = json::array();
  for (const auto& e : snapshot.elements) {
    elements.push_back({{"kind", std::string(to_string(e.kind))},
                        {"text", opt(e.text)},
                        {"clickable", e.clickable},
                        {"box", box_json(e.box)}});
  }
  return {{"screen_id", snapshot.screen_id},
          {"width", snapshot.width},
          {"height", snapshot.height},
          {"elements", elements}};
}

ScreenSnapshot snapshot_from_json(const json& j) {
  try {
    ScreenSnapshot s;
    s.screen_id = j.value("screen_id", "");
    s.width = j.at("width").get<int>();
    s.height = j.at("height").get<int>();
    if (s.width <= 0 || s.height <= 0) throw ParseError("manifest width and height must be positive");
    for (const auto& e : j.at("elements")) {
      UIElement el;
      auto kind = parse_element_kind(e.at("kind").get<std::string>());
      if (!kind) throw ParseError(fmt::format("unknown element kind '{}'", e.at("kind").get<std::string>()));
      el.kind = *kind;
      el.text = opt_from<std::string>(e, "text");
      el.clickable = e.value("clickable", false);
      el.box = box_from(e.at("box"));
      if (!el.box.valid()) throw ParseError("invalid element box");
      s.elements.push_back(std::move(el));
    }
    normalize_snapshot(s);
    return s;
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("malformed element manifest: {}", e.what()));
  }
}

}  // namespace a11y

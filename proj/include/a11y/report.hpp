#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "a11y/imaging.hpp"
#include "a11y/runner.hpp"

namespace a11y {

inline constexpr double kDefaultSpeedupFactor = 2.5;
inline constexpr int kReportSchemaVersion = 1;

enum class ChapterKind { Step, Issue };

std::string_view to_string(ChapterKind kind);

struct ChapterMarker {
  long long start_ms = 0;
  long long end_ms = 0;
  std::string title;
  ChapterKind kind = ChapterKind::Step;
  std::optional<int> finding_ref;  // index into the findings list, issue chapters only

  friend bool operator==(const ChapterMarker&, const ChapterMarker&) = default;
};

struct FrameRef {
  long long t_ms = 0;
  std::string file;  // relative to the report directory
  std::string label;
  std::string screen_id;

  friend bool operator==(const FrameRef&, const FrameRef&) = default;
};

struct TestReport {
  int schema_version = kReportSchemaVersion;
  TestSpec spec;
  FinalStatus status = FinalStatus::Fail;
  std::string status_detail;
  double speedup_factor = kDefaultSpeedupFactor;
  std::vector<PassSummary> passes;
  std::vector<ChapterMarker> chapters;
  std::vector<HeuristicFinding> findings;
  std::vector<int> residual_findings;  // fail findings no chapter references
  std::vector<FrameRef> frames;
  std::vector<SessionEvent> events;
  std::vector<LLMExchange> exchanges;

  friend bool operator==(const TestReport&, const TestReport&) = default;
};

/// Step chapters start at each chapter boundary event (events before the
/// first boundary fold into the first chapter). Each fail finding gets an
/// issue chapter over its dwell time, splitting any step chapter it overlaps.
/// The result partitions [first event, end of last event]; zero-length
/// pieces are dropped.
std::vector<ChapterMarker> build_chapters(const SessionRecording& recording);

inline constexpr Color kIssueOrange{0xFF, 0x8C, 0x00};
inline constexpr Color kIssueCyan{0x00, 0xB7, 0xEB};
inline constexpr Color kPassGreen{0x2E, 0x8B, 0x57};
inline constexpr Color kCursorPink{0xFF, 0x69, 0xB4};

Color color_of(ColorRole role);

inline constexpr int kCrosshairArm = 18;
inline constexpr int kArrowLength = 60;
inline constexpr int kStrokeWidth = 3;

/// Returns an annotated copy: pink crosshairs, pink direction arrows and
/// colored finding boxes. Grayscale input is promoted to RGB when any
/// overlay is drawn; with no overlays the copy is identical.
PixelBuffer annotate_frame(const PixelBuffer& frame, const std::vector<Overlay>& overlays);

struct ExportOptions {
  double speedup_factor = kDefaultSpeedupFactor;
};

/// "HH:MM:SS.mmm" for a recording timestamp divided by the speedup factor.
std::string vtt_timestamp(long long recording_ms, double speedup_factor);
std::string render_vtt(const std::vector<ChapterMarker>& chapters, double speedup_factor);

TestReport make_report(const SessionRecording& recording, const ExportOptions& options = {});

/// Writes frame_%05d.png, chapters.vtt and report.json into `out_dir`.
/// Throws ExportError; files written before the failure are removed.
TestReport export_report(const SessionRecording& recording, const std::filesystem::path& out_dir,
                         const ExportOptions& options = {});

nlohmann::json to_json(const TestSpec& spec);
TestSpec spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const HeuristicFinding& finding);
HeuristicFinding finding_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TestReport& report);
/// Throws ParseError on schema mismatch.
TestReport report_from_json(const nlohmann::json& j);

/// Element manifest used by the standalone heuristic checks:
/// {"screen_id", "width", "height", "elements": [{"kind", "text", "clickable", "box": [x0, y0, x1, y1]}]}.
nlohmann::json to_json(const ScreenSnapshot& snapshot);
ScreenSnapshot snapshot_from_json(const nlohmann::json& j);

}  // namespace a11y

#include <gtest/gtest.h>

#include "a11y/errors.hpp"
#include "a11y/report.hpp"
#include "runner_support.hpp"
#include "test_support.hpp"

namespace a11y {
namespace {

SessionEvent ev(EventKind kind, long long duration, std::string name = "tap") {
  SessionEvent e;
  e.kind = kind;
  e.duration_ms = duration;
  e.name = std::move(name);
  return e;
}

// Appends events through a SessionLog so timestamps are consistent.
struct Builder {
  SessionLog log;
  SessionRecording rec;

  Builder& chapter(std::string title) {
    log.append(ev(EventKind::ChapterBoundary, 0, std::move(title)));
    return *this;
  }
  Builder& action(long long ms) {
    log.append(ev(EventKind::Action, ms));
    return *this;
  }
  Builder& finding(FindingKind kind, Verdict verdict, long long dwell, std::string subject = "x") {
    HeuristicFinding f;
    f.kind = kind;
    f.verdict = verdict;
    f.screen_id = "home";
    f.subject = std::move(subject);
    f.region = {10, 10, 50, 50};
    f.color_role = color_for(kind, verdict);
    auto e = ev(EventKind::Finding, dwell, std::string(to_string(kind)));
    e.finding_index = static_cast<int>(rec.findings.size());
    rec.findings.push_back(f);
    log.append(e);
    return *this;
  }
  SessionRecording done() {
    rec.events = log.events();
    return rec;
  }
};

TEST(Chapters, ThreeStepsNoFindings) {
  const auto rec = Builder().chapter("Step 1").action(300).chapter("Step 2").action(500).chapter("Step 3").action(300).done();
  const auto ch = build_chapters(rec);
  ASSERT_EQ(ch.size(), 3u);
  EXPECT_EQ(ch[0].title, "Step 1");
  EXPECT_EQ(ch[0].start_ms, 0);
  EXPECT_EQ(ch[0].end_ms, 300);
  EXPECT_EQ(ch[1].start_ms, 300);
  EXPECT_EQ(ch[2].end_ms, 1100);
  for (const auto& c : ch) EXPECT_EQ(c.kind, ChapterKind::Step);
}

TEST(Chapters, LoopFindingAddsIssueChapter) {
  const auto rec = Builder()
                       .chapter("Step 1")
                       .action(300)
                       .chapter("Read all")
                       .action(300)
                       .finding(FindingKind::VoiceOverLoop, Verdict::Fail, 500, "row_a")
                       .done();
  const auto ch = build_chapters(rec);
  ASSERT_EQ(ch.size(), 3u);
  EXPECT_EQ(ch[2].kind, ChapterKind::Issue);
  EXPECT_EQ(ch[2].finding_ref, 0);
  EXPECT_EQ(ch[2].title, "Issue: VoiceOverLoop on home: row_a");
  EXPECT_EQ(ch[2].start_ms, 600);
  EXPECT_EQ(ch[2].end_ms, 1100);
}

TEST(Chapters, IssueSplitsStepChapter) {
  const auto rec = Builder()
                       .chapter("Step 1")
                       .action(300)
                       .finding(FindingKind::DynamicTypeNoGrowth, Verdict::Fail, 500)
                       .action(300)
                       .done();
  const auto ch = build_chapters(rec);
  ASSERT_EQ(ch.size(), 3u);
  EXPECT_EQ(ch[0].title, "Step 1");
  EXPECT_EQ(ch[1].kind, ChapterKind::Issue);
  EXPECT_EQ(ch[2].title, "Step 1");
  EXPECT_EQ(ch[2].start_ms, 800);
  EXPECT_EQ(ch[2].end_ms, 1100);
}

TEST(Chapters, PassFindingsAddNoChapter) {
  const auto rec = Builder().chapter("A").action(100).finding(FindingKind::DynamicTypeNoGrowth, Verdict::Pass, 0).done();
  EXPECT_EQ(build_chapters(rec).size(), 1u);
}

TEST(Chapters, EventsBeforeFirstBoundaryFoldIn) {
  const auto rec = Builder().action(200).chapter("First").action(100).done();
  const auto ch = build_chapters(rec);
  ASSERT_EQ(ch.size(), 1u);
  EXPECT_EQ(ch[0].start_ms, 0);
  EXPECT_EQ(ch[0].end_ms, 300);
}

TEST(Chapters, TitlesAreSingleLine) {
  const auto rec = Builder().chapter("Tap\n\"A\" --> B").action(100).done();
  EXPECT_EQ(build_chapters(rec)[0].title, "Tap \"A\" -> B");
}

TEST(Chapters, EmptyRecording) { EXPECT_TRUE(build_chapters(SessionRecording{}).empty()); }

TEST(Vtt, ThreeChaptersThreeCues) {
  const std::vector<ChapterMarker> ch{{0, 2500, "One", ChapterKind::Step, {}},
                                      {2500, 5000, "Two", ChapterKind::Step, {}},
                                      {5000, 3725000, "Three", ChapterKind::Issue, 0}};
  const auto vtt = render_vtt(ch, 2.5);
  EXPECT_EQ(vtt,
            "WEBVTT\n\n1\n00:00:00.000 --> 00:00:01.000\nOne\n\n2\n00:00:01.000 --> 00:00:02.000\nTwo\n\n"
            "3\n00:00:02.000 --> 00:24:50.000\nThree\n");
}

TEST(Vtt, TimestampFloorsScaledTime) {
  EXPECT_EQ(vtt_timestamp(1, 2.5), "00:00:00.000");
  EXPECT_EQ(vtt_timestamp(9000000, 1.0), "02:30:00.000");
  EXPECT_EQ(vtt_timestamp(1001, 2.5), "00:00:00.400");
  // Scaling keeps order.
  for (long long t = 0; t < 5000; t += 7) EXPECT_LE(vtt_timestamp(t, 2.5), vtt_timestamp(t + 7, 2.5));
}

TEST(Vtt, ZeroLengthCuesAreSkipped) {
  const std::vector<ChapterMarker> ch{{0, 1, "tiny", ChapterKind::Step, {}}, {1, 5000, "real", ChapterKind::Step, {}}};
  EXPECT_EQ(render_vtt(ch, 2.5), "WEBVTT\n\n1\n00:00:00.000 --> 00:00:02.000\nreal\n");
}

TEST(Annotate, NoOverlaysIsIdentical) {
  PixelBuffer g(20, 20, 1, 77);
  EXPECT_EQ(annotate_frame(g, {}), g);
}

TEST(Annotate, CrosshairAtTapPoint) {
  PixelBuffer rgb(100, 100, 3, 255);
  Overlay o;
  o.kind = Overlay::Kind::Crosshair;
  o.point = {40, 60};
  const auto out = annotate_frame(rgb, {o});
  auto is_pink = [&](int x, int y) {
    return out.at(x, y, 0) == kCursorPink.r && out.at(x, y, 1) == kCursorPink.g && out.at(x, y, 2) == kCursorPink.b;
  };
  EXPECT_TRUE(is_pink(40, 60));
  EXPECT_TRUE(is_pink(40 + kCrosshairArm, 60));
  EXPECT_TRUE(is_pink(40, 60 - kCrosshairArm));
  EXPECT_FALSE(is_pink(40 + kCrosshairArm + 3, 60));
  EXPECT_FALSE(is_pink(10, 10));
}

TEST(Annotate, FailFindingBoxIsOrangeAndGrayIsPromoted) {
  PixelBuffer g(100, 100, 1, 255);
  Overlay o;
  o.kind = Overlay::Kind::Box;
  o.box = {10, 10, 60, 40};
  o.color = color_for(FindingKind::DynamicTypeNoGrowth, Verdict::Fail);
  const auto out = annotate_frame(g, {o});
  EXPECT_EQ(out.channels, 3);
  EXPECT_EQ(out.at(10, 20, 0), kIssueOrange.r);
  EXPECT_EQ(out.at(10, 20, 1), kIssueOrange.g);
  EXPECT_EQ(out.at(10, 20, 2), kIssueOrange.b);
  EXPECT_EQ(out.at(30, 25, 1), 255);  // interior untouched
  EXPECT_EQ(color_of(ColorRole::IssueCyan), kIssueCyan);
  EXPECT_EQ(color_of(ColorRole::PassGreen), kPassGreen);
}

TEST(Annotate, ArrowStartsAtSwipeOrigin) {
  PixelBuffer rgb(200, 200, 3, 255);
  Overlay o;
  o.kind = Overlay::Kind::Arrow;
  o.point = {100, 150};
  o.direction = SwipeDirection::Up;
  const auto out = annotate_frame(rgb, {o});
  EXPECT_EQ(out.at(100, 150, 0), kCursorPink.r);
  EXPECT_EQ(out.at(100, 150 - kArrowLength / 2, 1), kCursorPink.g);
  EXPECT_EQ(out.at(100, 190, 1), 255);
}

SessionRecording real_recording() {
  auto client = testing::scripted_navigation({{"Tap \"Open Details\"", "Open Details"}});
  TestSpec spec;
  spec.title = "iOS: Mini App: Bold Text: details";
  spec.app_name = "Mini App";
  spec.feature = Feature::BoldText;
  spec.goal = "details";
  spec.target_screen = "details";
  return run_test(spec, testing::mini_app(), client);
}

TEST(Export, WritesFramesVttAndJson) {
  testing::TempDir dir;
  const auto rec = real_recording();
  const auto report = export_report(rec, dir.path());
  EXPECT_EQ(report.frames.size(), rec.frames.size());
  for (const auto& f : report.frames) EXPECT_TRUE(std::filesystem::exists(dir / f.file)) << f.file;
  EXPECT_TRUE(testing::read_file(dir / "chapters.vtt").starts_with("WEBVTT\n"));
  const auto j = testing::read_json(dir / "report.json");
  EXPECT_EQ(j.at("speedup_factor"), 2.5);
  EXPECT_EQ(j.at("status"), "success");
  EXPECT_EQ(report_from_json(j), report);
}

TEST(Export, ReExportIsByteIdentical) {
  testing::TempDir a, b;
  const auto rec = real_recording();
  export_report(rec, a.path());
  export_report(real_recording(), b.path());
  std::size_t files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(a.path())) {
    const auto name = entry.path().filename();
    EXPECT_EQ(testing::read_file(entry.path()), testing::read_file(b.path() / name)) << name;
    ++files;
  }
  EXPECT_GE(files, 3u);
}

TEST(Export, ShorterRecordingLeavesNoStaleFrames) {
  testing::TempDir dir;
  export_report(real_recording(), dir.path());
  SessionRecording empty;
  const auto report = export_report(empty, dir.path());
  EXPECT_TRUE(report.frames.empty());
  EXPECT_TRUE(report.chapters.empty());
  EXPECT_TRUE(report.findings.empty());
  EXPECT_TRUE(report.events.empty());
  std::size_t pngs = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir.path())) pngs += entry.path().extension() == ".png";
  EXPECT_EQ(pngs, 0u);
  EXPECT_EQ(testing::read_file(dir / "chapters.vtt"), "WEBVTT\n");
  const auto j = testing::read_json(dir / "report.json");
  EXPECT_TRUE(j.at("frames").empty());
  EXPECT_TRUE(j.at("chapters").empty());
}

TEST(Export, UnwritableDirectoryIsExportError) {
  testing::TempDir dir;
  std::ofstream(dir / "file") << "x";
  EXPECT_THROW(export_report(real_recording(), dir / "file" / "sub"), ExportError);
  ExportOptions bad;
  bad.speedup_factor = 0;
  EXPECT_THROW(make_report(SessionRecording{}, bad), ExportError);
}

TEST(Export, EveryActionEventSitsInExactlyOneChapter) {
  const auto report = make_report(real_recording());
  ASSERT_FALSE(report.chapters.empty());
  for (std::size_t i = 1; i < report.chapters.size(); ++i) {
    EXPECT_EQ(report.chapters[i].start_ms, report.chapters[i - 1].end_ms);
  }
  const auto last_end = report.chapters.back().end_ms;
  for (const auto& e : report.events) {
    if (e.kind != EventKind::Action) continue;
    int owners = 0;
    for (const auto& c : report.chapters) {
      owners += (c.start_ms <= e.t_ms && e.t_ms < c.end_ms) || (e.t_ms == last_end && c.end_ms == last_end);
    }
    EXPECT_EQ(owners, 1) << e.name << " at " << e.t_ms;
  }
}

TEST(Json, ReportRoundTripAndSchemaCheck) {
  const auto report = make_report(real_recording());
  auto j = to_json(report);
  EXPECT_EQ(report_from_json(j), report);
  EXPECT_EQ(j.at("schema_version"), kReportSchemaVersion);
  j["schema_version"] = 99;
  EXPECT_THROW(report_from_json(j), ParseError);
}

TEST(Json, SnapshotManifestRoundTrip) {
  Device d(testing::mini_app());
  auto snap = d.launch_app("mini");
  snap.app_id.clear();  // not part of the manifest
  EXPECT_EQ(snapshot_from_json(to_json(snap)), snap);
}

TEST(Json, FindingAndSpecRoundTrip) {
  HeuristicFinding f{FindingKind::IconNoGrowth, {1, 2, 3, 4}, "s", Verdict::Fail, "d", ColorRole::IssueOrange, "Alarms"};
  EXPECT_EQ(finding_from_json(to_json(f)), f);
  TestSpec spec;
  spec.title = "t";
  spec.feature = Feature::ButtonShapes;
  spec.difficulty = Difficulty::Hard;
  spec.steps = {"a", "b"};
  EXPECT_EQ(spec_from_json(to_json(spec)), spec);
}

}  // namespace
}  // namespace a11y

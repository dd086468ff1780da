#include <gtest/gtest.h>

#include <sstream>

#include "a11y/cli.hpp"
#include "a11y/errors.hpp"
#include "a11y/render.hpp"
#include "test_support.hpp"

namespace a11y {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "a11y-replay");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string fixture(const std::string& rel) { return (testing::fixtures_dir() / rel).string(); }

TEST(Cli, SingleTestExportsOneDirectory) {
  testing::TempDir out;
  const auto r = cli({"run", "--app", fixture("apps"), "--tests", fixture("tests/weather_dt_city.txt"), "--backend",
                      "scripted:" + fixture("scripts"), "--out", out.path().string()});
  EXPECT_EQ(r.code, 0) << r.err;
  std::size_t dirs = 0;
  for (const auto& e : fs::directory_iterator(out.path())) dirs += e.is_directory();
  EXPECT_EQ(dirs, 1u);
  EXPECT_TRUE(fs::exists(out / "weather_dt_city" / "report.json"));
  EXPECT_TRUE(fs::exists(out / "weather_dt_city" / "chapters.vtt"));
  EXPECT_NE(r.out.find("1/1 exported"), std::string::npos);
}

TEST(Cli, MissingAppIsUsageError) {
  testing::TempDir out;
  const auto r = cli({"run", "--app", "/nonexistent/app.json", "--tests", fixture("tests"), "--backend",
                      "scripted:" + fixture("scripts"), "--out", out.path().string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("not found"), std::string::npos);
  EXPECT_TRUE(fs::is_empty(out.path()));
}

TEST(Cli, BadBackendAndMissingArgsAreUsageErrors) {
  EXPECT_EQ(cli({"run", "--app", fixture("apps"), "--tests", fixture("tests"), "--backend", "ftp:x", "--out", "/tmp/x"})
                .code,
            2);
  EXPECT_EQ(cli({"run", "--app", fixture("apps")}).code, 2);
  EXPECT_EQ(cli({"bogus"}).code, 2);
}

TEST(Batch, ParallelKeepsInputOrderAndMatchesReports) {
  testing::TempDir out;
  RunConfig cfg;
  cfg.app_paths = {testing::fixtures_dir() / "apps"};
  for (const auto& e : fs::directory_iterator(testing::fixtures_dir() / "tests")) cfg.test_paths.push_back(e.path());
  std::sort(cfg.test_paths.begin(), cfg.test_paths.end(), std::greater<>());
  cfg.test_paths.resize(10);
  cfg.backend = "scripted:" + fixture("scripts");
  cfg.out_dir = out.path();
  cfg.parallel = 4;
  const auto results = run_batch(cfg);
  ASSERT_EQ(results.size(), 10u);
  for (std::size_t i = 0; i < results.size(); ++i) {
    EXPECT_EQ(results[i].test_name, cfg.test_paths[i].stem().string());
    EXPECT_TRUE(results[i].error.empty()) << results[i].error;
    const auto j = testing::read_json(results[i].out / "report.json");
    EXPECT_EQ(j.at("status"), results[i].status);
    EXPECT_EQ(j.at("findings").size(), results[i].findings);
    std::size_t fails = 0;
    for (const auto& f : j.at("findings")) fails += f.at("verdict") == "fail";
    EXPECT_EQ(fails, results[i].issues);
  }
}

TEST(Batch, ParallelMustBePositive) {
  RunConfig cfg;
  cfg.parallel = 0;
  EXPECT_THROW(run_batch(cfg), UsageError);
}

json manifest(int w, int h, const std::vector<std::tuple<std::string, std::string, bool, BoundingBox>>& elements) {
  json j = {{"screen_id", "lab"}, {"width", w}, {"height", h}, {"elements", json::array()}};
  for (const auto& [kind, text, clickable, b] : elements) {
    j["elements"].push_back({{"kind", kind}, {"text", text}, {"clickable", clickable}, {"box", {b.x0, b.y0, b.x1, b.y1}}});
  }
  return j;
}

void write(const fs::path& p, const json& j) { std::ofstream(p) << j.dump(); }

TEST(CheckHeuristics, DynamicTypePairFlagsStaticElement) {
  testing::TempDir dir;
  write(dir / "before.json", manifest(390, 844, {{"Text", "Grows", false, {10, 10, 110, 30}},
                                                 {"Text", "Stuck", false, {10, 50, 110, 70}}}));
  write(dir / "after.json", manifest(390, 844, {{"Text", "Grows", false, {10, 10, 130, 34}},
                                                {"Text", "Stuck", false, {10, 50, 110, 70}}}));
  const auto r = cli({"check-heuristics", "--mode", "dynamic-type", "--before", (dir / "before.json").string(),
                      "--after", (dir / "after.json").string(), "--out", (dir / "out").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  ASSERT_EQ(j.at("findings").size(), 2u);
  int fails = 0;
  for (const auto& f : j.at("findings")) {
    if (f.at("verdict") == "fail") {
      ++fails;
      EXPECT_EQ(f.at("subject"), "Stuck");
    }
  }
  EXPECT_EQ(fails, 1);
  EXPECT_EQ(testing::read_json(dir / "out" / "findings.json"), j);
  EXPECT_TRUE(fs::exists(dir / "out" / "annotated.png"));
}

TEST(CheckHeuristics, CompliantButtonShapesImageAllPass) {
  testing::TempDir dir;
  std::vector<ResolvedElement> elements;
  for (int i = 0; i < 3; ++i) {
    ResolvedElement e;
    e.kind = ElementKind::Text;
    e.text = "Link " + std::to_string(i);
    e.clickable = true;
    e.underline = true;
    e.box = {20, 40 + 60 * i, 220, 70 + 60 * i};
    elements.push_back(e);
  }
  AccessibilityFeatureState bs;
  bs.button_shapes_on = true;
  write_png(dir / "screen.png", render_elements(elements, bs, 390, 300));
  std::vector<std::tuple<std::string, std::string, bool, BoundingBox>> rows;
  for (const auto& e : elements) rows.emplace_back("Text", *e.text, true, e.box);
  write(dir / "m.json", manifest(390, 300, rows));
  const auto r = cli({"check-heuristics", "--mode", "button-shapes", "--manifest", (dir / "m.json").string(), "--image",
                      (dir / "screen.png").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  ASSERT_EQ(j.at("findings").size(), 3u);
  for (const auto& f : j.at("findings")) EXPECT_EQ(f.at("verdict"), "pass");
}

TEST(CheckHeuristics, MissingManifestIsUsageError) {
  const auto r = cli({"check-heuristics", "--mode", "button-shapes", "--manifest", "/nonexistent.json", "--image",
                      "/nonexistent.png"});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(cli({"check-heuristics", "--mode", "sideways"}).code, 2);
}

TEST(Snapshot, PrintsElementLines) {
  testing::TempDir dir;
  write(dir / "mini.json", testing::mini_app_json());
  const auto r = cli({"snapshot", "--app", (dir / "mini.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("[Button (Clickable)] \"Open Details\" (16, 120) to (374, 164)"), std::string::npos) << r.out;
  const auto bad = cli({"snapshot", "--app", (dir / "mini.json").string(), "--dynamic-type", "Huge"});
  EXPECT_EQ(bad.code, 2);
}

}  // namespace
}  // namespace a11y

// Acceptance suite: one PASS/FAIL line per criterion, exit 1 on any FAIL.

#include <chrono>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <tuple>

#include <fmt/format.h>

#include "a11y/cli.hpp"
#include "a11y/render.hpp"
#include "otsu_reference.hpp"
#include "runner_support.hpp"
#include "test_support.hpp"
#include "underline_fixtures.hpp"

namespace fs = std::filesystem;
using namespace a11y;
using nlohmann::json;

namespace {

int failures = 0;

void report(std::string_view id, bool ok, const std::string& detail) {
  std::cout << (ok ? "PASS " : "FAIL ") << id << ": " << detail << "\n";
  if (!ok) ++failures;
}

// Runs `body`, turning any exception into a FAIL line.
template <typename F>
void criterion(std::string_view id, F&& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, false, fmt::format("threw: {}", e.what()));
  }
}

struct Score {
  std::size_t tp = 0, fp = 0, fn = 0;
  double precision() const { return tp + fp == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp); }
  double recall() const { return tp + fn == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fn); }
  bool perfect() const { return fp == 0 && fn == 0; }
  std::string text() const {
    return fmt::format("precision {:.1f}% recall {:.1f}% (tp {} fp {} fn {})", 100 * precision(), 100 * recall(), tp, fp,
                       fn);
  }
};

template <typename T>
Score score(const std::set<T>& predicted, const std::set<T>& expected) {
  Score s;
  for (const auto& p : predicted) (expected.count(p) ? s.tp : s.fp)++;
  for (const auto& e : expected) s.fn += predicted.count(e) == 0;
  return s;
}

fs::path fixtures() { return testing::fixtures_dir(); }

RunConfig batch_config(const fs::path& tests, const fs::path& out) {
  RunConfig cfg;
  cfg.app_paths = {fixtures() / "apps"};
  cfg.test_paths = {tests};
  cfg.backend = "scripted:" + (fixtures() / "scripts").string();
  cfg.out_dir = out;
  cfg.parallel = 1;
  return cfg;
}

void e2e_corpus() {
  std::vector<AppModel> apps;
  InstructionContext ctx;
  for (const auto& e : fs::directory_iterator(fixtures() / "apps")) {
    apps.push_back(load_app_file(e.path()));
    ctx.known_apps.push_back(apps.back().app_name);
  }
  std::map<Feature, std::set<Difficulty>> difficulties;
  std::map<Feature, int> per_feature;
  std::set<std::string> used_apps;
  int tests = 0;
  for (const auto& e : fs::directory_iterator(fixtures() / "tests")) {
    const auto spec = parse_instructions(testing::read_file(e.path()), ctx);
    ++tests;
    ++per_feature[spec.feature];
    if (spec.difficulty) difficulties[spec.feature].insert(*spec.difficulty);
    used_apps.insert(spec.app_name);
  }
  bool balanced = per_feature.size() == 4;
  for (const auto& [f, n] : per_feature) balanced = balanced && n >= 4 && difficulties[f].size() == 2;
  report("e2e_corpus", apps.size() >= 10 && used_apps.size() >= 10 && tests >= 16 && balanced,
         fmt::format("{} app definitions, {} apps exercised, {} tests, >=4 per feature with Easy and Hard: {}",
                     apps.size(), used_apps.size(), tests, balanced ? "yes" : "no"));
}

void e2e_success() {
  testing::TempDir out;
  const auto start = std::chrono::steady_clock::now();
  const auto results = run_batch(batch_config(fixtures() / "tests", out.path()));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::size_t ok = 0;
  std::string bad;
  for (const auto& r : results) {
    if (r.status == "success") ++ok;
    else bad += fmt::format(" {}={}{}", r.test_name, r.status, r.error.empty() ? "" : "(" + r.error + ")");
  }
  report("e2e_success", ok == results.size() && results.size() >= 16,
         fmt::format("{}/{} scripted tests succeeded{}", ok, results.size(), bad));
  report("e2e_runtime", secs < 60.0, fmt::format("batch wall time {:.2f}s (limit 60s)", secs));
}

void e2e_faults() {
  testing::TempDir out;
  const auto results = run_batch(batch_config(fixtures() / "faults", out.path()));
  std::size_t ok = 0;
  for (const auto& r : results) ok += r.status == "success";
  report("e2e_fault_recovery", results.size() == 3 && ok >= 2,
         fmt::format("{}/{} fault-injected tests recovered (need 2)", ok, results.size()));
}

ScreenSnapshot lab_screen(const AppModel& app, const std::string& screen, const FeatureChange& change) {
  Device d(app);
  d.set_feature(change);
  d.launch_app(app.app_id);
  return d.show_screen(screen);
}

void dynamic_type_pr(const json& labels) {
  const auto app = load_app_file(fixtures() / "heuristics" / "dt_lab.json");
  const DynamicTypeSize order[] = {DynamicTypeSize::Off, DynamicTypeSize::XL, DynamicTypeSize::XXL,
                                   DynamicTypeSize::XXXL, DynamicTypeSize::AX1};
  using Key = std::tuple<std::string, std::string, std::string, std::string>;  // screen, pair, subject, kind
  std::set<Key> predicted, expected;
  std::set<std::pair<std::string, std::string>> bugs;
  for (const auto& screen : labels.at("dynamic_type")) {
    const std::string sid = screen.at("screen");
    for (const auto& b : screen.at("bugs")) {
      bugs.emplace(sid, b.at("subject"));
      for (const auto& pair : b.at("pairs")) expected.emplace(sid, pair, b.at("subject"), b.at("kind"));
    }
    std::vector<ScreenSnapshot> shots;
    for (auto size : order) {
      FeatureChange c;
      c.dynamic_type_size = size;
      shots.push_back(lab_screen(app, sid, c));
    }
    for (std::size_t i = 0; i + 1 < shots.size(); ++i) {
      const auto pair = fmt::format("{}-{}", to_string(order[i]), to_string(order[i + 1]));
      for (const auto& f : dynamic_type_check(shots[i], shots[i + 1], HeuristicConfig{})) {
        if (f.verdict == Verdict::Fail) predicted.emplace(sid, pair, f.subject, std::string(to_string(f.kind)));
      }
    }
  }
  const auto s = score(predicted, expected);
  report("heuristic_dynamic_type", s.perfect() && bugs.size() >= 20,
         fmt::format("{} labelled bugs over {} size pairs; {}", bugs.size(), expected.size(), s.text()));
}

void button_shapes_pr(const json& labels) {
  const auto app = load_app_file(fixtures() / "heuristics" / "bs_lab.json");
  using Key = std::tuple<std::string, std::string, std::string>;  // screen, subject, kind
  std::set<Key> pred_fail, exp_fail, pred_pass, exp_pass;
  for (const auto& screen : labels.at("button_shapes")) {
    const std::string sid = screen.at("screen");
    for (const auto& f : screen.at("findings")) {
      (f.at("verdict") == "fail" ? exp_fail : exp_pass).emplace(sid, f.at("subject"), f.at("kind"));
    }
    Device d(app);
    FeatureChange c;
    c.button_shapes_on = true;
    d.set_feature(c);
    d.launch_app(app.app_id);
    const auto snap = d.show_screen(sid);
    const auto pixels = render_elements(d.visible_elements(), d.state().feature, app.screen_width, app.screen_height);
    for (const auto& f : button_shapes_check(snap, pixels, HeuristicConfig{})) {
      (f.verdict == Verdict::Fail ? pred_fail : pred_pass).emplace(sid, f.subject, std::string(to_string(f.kind)));
    }
  }
  const auto fails = score(pred_fail, exp_fail);
  const auto passes = score(pred_pass, exp_pass);
  report("heuristic_button_shapes", fails.perfect() && passes.perfect() && exp_fail.size() >= 10,
         fmt::format("{} labelled bugs; fail {}; pass agreement {}/{}", exp_fail.size(), fails.text(), passes.tp,
                     exp_pass.size()));
}

void voiceover_pr(const json& labels) {
  const auto app = load_app_file(fixtures() / "heuristics" / "vo_lab.json");
  const auto& vo = labels.at("voiceover");
  std::set<std::pair<std::string, std::string>> exp_loops, pred_loops;
  using BoxKey = std::tuple<std::string, int, int, int, int>;
  std::set<BoxKey> exp_missing, pred_missing;
  for (const auto& l : vo.at("loops")) exp_loops.emplace(l.at("screen"), l.at("repeated"));
  for (const auto& m : vo.at("missing")) {
    const auto& b = m.at("box");
    exp_missing.emplace(m.at("screen"), b[0], b[1], b[2], b[3]);
  }
  std::size_t screens = 0;
  for (const auto& [sid, def] : app.screens) {
    ++screens;
    Device d(app);
    FeatureChange c;
    c.voiceover_on = true;
    d.set_feature(c);
    d.launch_app(app.app_id);
    d.show_screen(sid);
    std::vector<VisitTrace> traces{read_all(d)};
    // Double Tap every element the agents can see, by coordinates, as a
    // replayed step would.
    std::vector<ActivationResult> activations;
    d.show_screen(sid);
    for (const auto& e : observe(d, RunnerConfig{}).snapshot.elements) {
      d.show_screen(sid);
      activations.push_back(activate_from_coordinates(d, Point{e.box.center_x(), e.box.center_y()}, e.kind, e.box));
    }
    for (const auto& f : collect_vo_findings(traces, activations)) {
      if (f.kind == FindingKind::VoiceOverLoop) pred_loops.emplace(f.screen_id, f.subject);
      else pred_missing.emplace(f.screen_id, f.region.x0, f.region.y0, f.region.x1, f.region.y1);
    }
  }
  const auto loops = score(pred_loops, exp_loops);
  const auto missing = score(pred_missing, exp_missing);
  report("heuristic_vo_loops", loops.perfect() && exp_loops.size() >= 4,
         fmt::format("{} labelled loops over {} screens; {}", exp_loops.size(), screens, loops.text()));
  report("heuristic_vo_missing", missing.perfect() && exp_missing.size() >= 4,
         fmt::format("{} labelled missing elements; {}", exp_missing.size(), missing.text()));
}

void imaging() {
  std::mt19937 rng(20240611);
  std::uniform_int_distribution<int> count(0, 5000);
  std::bernoulli_distribution sparse(0.3);
  int agree = 0;
  for (int i = 0; i < 100; ++i) {
    Histogram h{};
    for (auto& bin : h) bin = sparse(rng) ? static_cast<std::uint64_t>(count(rng)) : 0;
    h[static_cast<std::size_t>(i)] += 1;
    h[255 - static_cast<std::size_t>(i)] += 1;
    agree += otsu_threshold(h) == testing::brute_force_otsu(h);
  }
  report("otsu_exact", agree == 100, fmt::format("{}/100 random histograms match exhaustive search", agree));

  int underlined = 0, found = 0, blobs = 0, false_hits = 0;
  for (const auto& fx : testing::underline_fixtures(50)) {
    const bool hit = has_underline(fx.pixels, fx.box, HeuristicConfig{});
    if (fx.underlined) {
      ++underlined;
      found += hit;
    } else {
      ++blobs;
      false_hits += hit;
    }
  }
  report("hough_underline", found == underlined && false_hits == 0 && underlined + blobs == 50,
         fmt::format("underlines found {}/{}, blob-only patches flagged {}/{} at span 0.75", found, underlined,
                     false_hits, blobs));
}

void thresholds() {
  const HeuristicConfig cfg;
  const bool growth = cfg.growth_min == 0.10 && grew_enough(1000, 1100, cfg.growth_min) &&
                      !grew_enough(1000, 1099, cfg.growth_min);
  report("threshold_growth", growth, "10% area growth is inclusive (1000->1100 passes, 1000->1099 fails)");

  const bool similarity = cfg.partial_similarity_min == 0.50 && partial_similarity("abcd", "abxy") == 0.5;
  ScreenSnapshot a, b;
  UIElement ea, eb;
  ea.kind = eb.kind = ElementKind::Text;
  ea.text = "abcd";
  eb.text = "abxy";
  a.elements = {ea};
  b.elements = {eb};
  const bool matched = match_text_elements(a, b, cfg).size() == 1;
  eb.text = "axyz";
  b.elements = {eb};
  const bool unmatched = match_text_elements(a, b, cfg).empty();
  report("threshold_similarity", similarity && matched && unmatched,
         "similarity 0.50 matches, 0.25 does not");

  auto j = testing::mini_app_json();
  auto& elements = j["screens"]["home"]["elements"];
  elements = json::array();
  for (int i = 0; i < 60; ++i) {
    const int x = (i % 6) * 65, y = 40 + (i / 6) * 60;
    elements.push_back({{"key", fmt::format("b{}", i)}, {"kind", "Button"}, {"text", fmt::format("Item {}", i)},
                        {"box", {x, y, x + 60, y + 50}}});
  }
  j["screens"]["home"]["transitions"] = json::array();
  Device d(load_app(j));
  FeatureChange vo;
  vo.voiceover_on = true;
  d.set_feature(vo);
  d.launch_app("mini");
  const auto trace = read_all(d);
  report("threshold_vo_cap", kReadAllVisitCap == 50 && trace.visited.size() == 50 && trace.truncated,
         fmt::format("read-all on 60 elements stopped after {} visits, truncated={}", trace.visited.size(),
                     trace.truncated));
  const double rate = d.state().feature.speaking_rate;
  report("threshold_speaking_rate", rate == 0.25, fmt::format("speaking rate {} with VoiceOver on", rate));
}

SessionRecording details_recording() {
  auto client = testing::scripted_navigation({{"Tap \"Open Details\"", "Open Details"}});
  TestSpec spec;
  spec.title = "iOS: Mini App: Button Shapes: details";
  spec.app_name = "Mini App";
  spec.feature = Feature::ButtonShapes;
  spec.goal = "details";
  spec.target_screen = "details";
  return run_test(spec, testing::mini_app(), client);
}

void determinism_and_speedup() {
  testing::TempDir a, b;
  export_report(details_recording(), a.path());
  export_report(details_recording(), b.path());
  std::size_t files = 0, same = 0;
  for (const auto& e : fs::directory_iterator(a.path())) {
    ++files;
    same += fs::exists(b / e.path().filename().string()) &&
            testing::read_file(e.path()) == testing::read_file(b / e.path().filename().string());
  }
  std::size_t files_b = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(b.path())) ++files_b;
  report("determinism", files > 2 && same == files && files_b == files,
         fmt::format("{}/{} exported files byte-identical across two runs", same, files));
  const double speedup = testing::read_json(a / "report.json").at("speedup_factor");
  report("threshold_speedup", speedup == 2.5, fmt::format("report speedup_factor {}", speedup));
}

void golden_line() {
  UIElement e;
  e.id = 3;
  e.kind = ElementKind::Button;
  e.text = "Try It Free";
  e.clickable = true;
  e.box = {194, 1563, 1042, 1744};
  const auto line = format_element_line(e);
  report("golden_element_line", line == "(3) [Button (Clickable)] \"Try It Free\" (194, 1563) to (1042, 1744)", line);
}

void turn_economy() {
  const std::vector<testing::ScriptedStep> steps{{"Tap the Search tab", "Search"},
                                                 {"Tap the Profile tab", "Profile"},
                                                 {"Tap \"Home\" tab", "Home"},
                                                 {"Tap \"Open Details\"", "Open Details"}};
  auto client = testing::scripted_navigation(steps);
  Device device(testing::mini_app());
  device.launch_app("mini");
  Session session(device, client);
  const auto out = session.run_navigation("tour", "Mini App");
  const auto calls = session.agents().exchanges().size();
  report("turn_economy", out.status == NavigationStatus::Reached && out.replans == 0 && calls == 1 + 4 + 4,
         fmt::format("{} model calls for a 4-step plan (expected 1+4+4)", calls));
}

}  // namespace

int main() {
  criterion("e2e_corpus", e2e_corpus);
  criterion("e2e_success", e2e_success);
  criterion("e2e_fault_recovery", e2e_faults);
  json labels;
  criterion("heuristic_labels", [&] { labels = testing::read_json(fixtures() / "heuristics" / "labels.json"); });
  criterion("heuristic_dynamic_type", [&] { dynamic_type_pr(labels); });
  criterion("heuristic_button_shapes", [&] { button_shapes_pr(labels); });
  criterion("heuristic_vo", [&] { voiceover_pr(labels); });
  criterion("imaging", imaging);
  criterion("thresholds", thresholds);
  criterion("determinism", determinism_and_speedup);
  criterion("golden_element_line", golden_line);
  criterion("turn_economy", turn_economy);
  std::cout << (failures == 0 ? "ALL PASS" : fmt::format("{} FAILED", failures)) << "\n";
  return failures == 0 ? 0 : 1;
}

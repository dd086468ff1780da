#include "a11y/cli.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <set>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "a11y/errors.hpp"
#include "a11y/render.hpp"
#include "a11y/text_util.hpp"

namespace a11y {

namespace fs = std::filesystem;

namespace {

std::vector<fs::path> expand(const std::vector<fs::path>& paths, std::string_view ext, std::string_view what) {
  std::vector<fs::path> out;
  for (const auto& p : paths) {
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& entry : fs::directory_iterator(p)) {
        if (entry.is_regular_file() && entry.path().extension() == ext) found.push_back(entry.path());
      }
      std::sort(found.begin(), found.end());
      if (found.empty()) throw UsageError(fmt::format("no {} files in {}", what, p.string()));
      out.insert(out.end(), found.begin(), found.end());
    } else if (fs::is_regular_file(p)) {
      out.push_back(p);
    } else {
      throw UsageError(fmt::format("{} not found: {}", what, p.string()));
    }
  }
  return out;
}

struct Backend {
  enum class Kind { Scripted, Http } kind = Kind::Scripted;
  std::string target;
};

Backend parse_backend(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw UsageError("backend must be scripted:<path> or http:<url>");
  const auto scheme = spec.substr(0, colon);
  const auto rest = spec.substr(colon + 1);
  if (scheme == "scripted" && !rest.empty()) {
    if (!fs::exists(rest)) throw UsageError(fmt::format("script not found: {}", rest));
    return {Backend::Kind::Scripted, rest};
  }
  if ((scheme == "http" || scheme == "https") && !rest.empty()) {
    // Accept both "http:host:port" and a full "http://host:port" URL.
    if (rest.starts_with("//")) return {Backend::Kind::Http, spec};
    if (rest.starts_with("http://") || rest.starts_with("https://")) return {Backend::Kind::Http, rest};
    return {Backend::Kind::Http, "http://" + rest};
  }
  throw UsageError(fmt::format("unsupported backend '{}'; use scripted:<path> or http:<url>", spec));
}

const AppModel* find_app(const std::vector<AppModel>& apps, std::string_view name) {
  for (const auto& a : apps) {
    if (text::iequals(a.app_name, name) || text::iequals(a.app_id, name)) return &a;
  }
  return nullptr;
}

std::unique_ptr<LLMClient> make_client(const Backend& backend, const RunConfig& config, const fs::path& test) {
  if (backend.kind == Backend::Kind::Http) {
    HttpChatConfig http;
    http.base_url = backend.target;
    http.model = config.model;
    http.seed = config.seed;
    return std::make_unique<HttpChatClient>(http);
  }
  fs::path script = backend.target;
  if (fs::is_directory(script)) {
    script = script / (test.stem().string() + ".json");
    if (!fs::exists(script)) throw ClientError(fmt::format("no script for this test: {}", script.string()));
  }
  return load_scripted_client(script);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError(fmt::format("cannot read {}", path.string()));
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

RunResult run_one(const fs::path& test, const std::vector<AppModel>& apps, const Backend& backend,
                  const RunConfig& config) {
  RunResult result;
  result.test_name = test.stem().string();
  result.out = config.out_dir / result.test_name;
  try {
    auto client = make_client(backend, config, test);
    AgentSession fallback(*client);
    InstructionContext ctx;
    for (const auto& a : apps) ctx.known_apps.push_back(a.app_name);
    if (apps.size() == 1) ctx.default_app = apps.front().app_name;
    ctx.fallback = &fallback;
    const auto spec = parse_instructions(read_file(test), ctx);
    const auto* app = find_app(apps, spec.app_name);
    if (!app) throw SpecError(fmt::format("no app definition named '{}'", spec.app_name));
    const auto recording = run_test(spec, *app, *client, config.runner);
    const auto report = export_report(recording, result.out, config.export_options);
    result.status = std::string(to_string(report.status));
    result.findings = report.findings.size();
    result.issues = static_cast<std::size_t>(std::count_if(report.findings.begin(), report.findings.end(),
                                                           [](const auto& f) { return f.verdict == Verdict::Fail; }));
  } catch (const std::exception& e) {
    result.status = "error";
    result.error = e.what();
  }
  return result;
}

void print_summary(const std::vector<RunResult>& results, std::ostream& out) {
  std::size_t width = 4;
  for (const auto& r : results) width = std::max(width, r.test_name.size());
  out << fmt::format("{:<{}}  {:<8}  {:>8}  {:>6}  {}\n", "test", width, "status", "findings", "issues", "out");
  for (const auto& r : results) {
    out << fmt::format("{:<{}}  {:<8}  {:>8}  {:>6}  {}\n", r.test_name, width, r.status, r.findings, r.issues,
                       r.out.string());
  }
  const auto exported = std::count_if(results.begin(), results.end(), [](const auto& r) { return r.error.empty(); });
  out << fmt::format("{}/{} exported\n", exported, results.size());
}

ResolvedElement to_resolved(const UIElement& e) {
  ResolvedElement r;
  r.key = fmt::format("e{}", e.id);
  r.kind = e.kind;
  r.text = e.text;
  r.clickable = e.clickable;
  r.box = e.box;
  return r;
}

ScreenSnapshot load_manifest(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw UsageError(fmt::format("element manifest not found: {}", path.string()));
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(fmt::format("element manifest {} is not JSON: {}", path.string(), e.what()));
  }
  return snapshot_from_json(j);
}

struct CheckOptions {
  std::string mode;
  fs::path before;
  fs::path after;
  fs::path manifest;
  fs::path image;
  fs::path out_dir;
};

int cmd_check_heuristics(const CheckOptions& opt, const HeuristicConfig& cfg, std::ostream& out) {
  validate(cfg);
  std::vector<HeuristicFinding> findings;
  PixelBuffer canvas;
  if (opt.mode == "dynamic-type") {
    if (opt.before.empty() || opt.after.empty() || !opt.manifest.empty()) {
      throw UsageError("dynamic-type mode takes --before and --after manifests");
    }
    const auto base = load_manifest(opt.before);
    const auto grown = load_manifest(opt.after);
    findings = dynamic_type_check(base, grown, cfg);
    if (!opt.image.empty()) {
      canvas = read_png(opt.image);
    } else {
      std::vector<ResolvedElement> elements;
      for (const auto& e : grown.elements) elements.push_back(to_resolved(e));
      canvas = render_elements(elements, {}, grown.width, grown.height);
    }
  } else if (opt.mode == "button-shapes") {
    if (opt.manifest.empty() || opt.image.empty() || !opt.before.empty() || !opt.after.empty()) {
      throw UsageError("button-shapes mode takes --manifest and --image");
    }
    const auto snapshot = load_manifest(opt.manifest);
    if (!fs::is_regular_file(opt.image)) throw UsageError(fmt::format("image not found: {}", opt.image.string()));
    canvas = read_png(opt.image);
    findings = button_shapes_check(snapshot, canvas, cfg);
  } else {
    throw UsageError(fmt::format("unknown mode '{}'; use dynamic-type or button-shapes", opt.mode));
  }

  nlohmann::json fragment = {{"mode", opt.mode}, {"findings", nlohmann::json::array()}};
  std::vector<Overlay> overlays;
  for (const auto& f : findings) {
    fragment["findings"].push_back(to_json(f));
    overlays.push_back({Overlay::Kind::Box, {}, {}, f.region, f.color_role});
  }
  if (!opt.out_dir.empty()) {
    fs::create_directories(opt.out_dir);
    std::ofstream(opt.out_dir / "findings.json", std::ios::binary) << fragment.dump(2) << "\n";
    write_png(opt.out_dir / "annotated.png", annotate_frame(canvas, overlays));
  }
  out << fragment.dump(2) << "\n";
  return 0;
}

struct SnapshotOptions {
  fs::path app;
  std::string screen;
  std::string dynamic_type = "Off";
  bool bold_text = false;
  bool button_shapes = false;
  bool json = false;
  fs::path png;
};

int cmd_snapshot(const SnapshotOptions& opt, std::ostream& out) {
  if (!fs::is_regular_file(opt.app)) throw UsageError(fmt::format("app definition not found: {}", opt.app.string()));
  const auto app = load_app_file(opt.app);
  const auto size = parse_dynamic_type_size(opt.dynamic_type);
  if (!size) throw UsageError(fmt::format("unknown Dynamic Type size '{}'", opt.dynamic_type));
  Device device(app);
  FeatureChange change;
  change.dynamic_type_size = *size;
  change.bold_text_on = opt.bold_text;
  change.button_shapes_on = opt.button_shapes;
  device.set_feature(change);
  device.launch_app(app.app_id);
  if (!opt.screen.empty()) device.show_screen(opt.screen);
  auto snap = device.snapshot();
  if (opt.json) out << to_json(snap).dump(2) << "\n";
  else out << serialize_elements(snap) << "\n";
  if (!opt.png.empty()) {
    write_png(opt.png, render_elements(device.visible_elements(), device.state().feature, app.screen_width,
                                       app.screen_height));
  }
  return 0;
}

}  // namespace

std::vector<RunResult> run_batch(const RunConfig& config) {
  if (config.parallel < 1) throw UsageError("--parallel must be at least 1");
  if (config.out_dir.empty()) throw UsageError("--out is required");
  if (config.app_paths.empty()) throw UsageError("at least one --app is required");
  if (config.test_paths.empty()) throw UsageError("at least one --tests path is required");
  validate(config.runner.heuristics);
  if (!(config.export_options.speedup_factor > 0)) throw UsageError("--speedup must be positive");
  const auto backend = parse_backend(config.backend);

  std::vector<AppModel> apps;
  for (const auto& p : expand(config.app_paths, ".json", "app definition")) {
    try {
      apps.push_back(load_app_file(p));
    } catch (const Error& e) {
      throw UsageError(fmt::format("cannot load app definition {}: {}", p.string(), e.what()));
    }
  }
  const auto tests = expand(config.test_paths, ".txt", "test instructions");
  std::set<std::string> stems;
  for (const auto& t : tests) {
    if (!stems.insert(t.stem().string()).second) {
      throw UsageError(fmt::format("two tests share the name '{}'", t.stem().string()));
    }
  }

  std::vector<RunResult> results(tests.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (auto i = next++; i < tests.size(); i = next++) results[i] = run_one(tests[i], apps, backend, config);
  };
  const auto n = std::min<std::size_t>(static_cast<std::size_t>(config.parallel), tests.size());
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return results;
}

int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  std::vector<RunResult> results;
  try {
    results = run_batch(config);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const SpecError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  print_summary(results, out);
  bool ok = true;
  for (const auto& r : results) {
    if (!r.error.empty()) {
      err << fmt::format("{}: {}\n", r.test_name, r.error);
      ok = false;
    }
  }
  return ok ? 0 : 1;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Replays accessibility test instructions on a simulated device and exports annotated recordings"};
  app.require_subcommand(1);

  RunConfig run;
  std::vector<std::string> apps;
  std::vector<std::string> tests;
  std::string out_dir;
  auto* run_cmd = app.add_subcommand("run", "Replay tests and export recordings");
  run_cmd->add_option("--app", apps, "App definition file or directory (repeatable)")->required();
  run_cmd->add_option("--tests", tests, "Test instruction file or directory (repeatable)")->required();
  run_cmd->add_option("--backend", run.backend, "scripted:<path> or http:<url>")->required();
  run_cmd->add_option("--out", out_dir, "Output directory")->required();
  run_cmd->add_option("--parallel", run.parallel, "Concurrent sessions");
  run_cmd->add_option("--seed", run.seed, "Sampling seed passed to the HTTP backend");
  run_cmd->add_option("--model", run.model, "Model name for the HTTP backend");
  run_cmd->add_option("--max-actions", run.runner.max_actions, "Action budget per navigation");
  run_cmd->add_option("--max-replans", run.runner.max_replans, "Replan budget per navigation");
  run_cmd->add_option("--speedup", run.export_options.speedup_factor, "Playback speedup for chapter timestamps");

  auto add_thresholds = [](CLI::App* cmd, HeuristicConfig& h) {
    cmd->add_option("--growth-min", h.growth_min, "Minimum Dynamic Type area growth");
    cmd->add_option("--similarity-min", h.partial_similarity_min, "Minimum text match similarity");
    cmd->add_option("--underline-span-min", h.underline_span_min, "Minimum underline span fraction");
    cmd->add_option("--icon-gap-max", h.icon_gap_max_frac, "Maximum icon-to-text gap as a fraction of icon width");
    cmd->add_option("--canny-low", h.canny.low, "Canny low threshold");
    cmd->add_option("--canny-high", h.canny.high, "Canny high threshold");
  };
  add_thresholds(run_cmd, run.runner.heuristics);

  CheckOptions check;
  HeuristicConfig check_cfg;
  std::string before, after, manifest, image, check_out;
  auto* check_cmd = app.add_subcommand("check-heuristics", "Run one heuristic on supplied screens");
  check_cmd->add_option("--mode", check.mode, "dynamic-type or button-shapes")->required();
  check_cmd->add_option("--before", before, "Element manifest before the size increase");
  check_cmd->add_option("--after", after, "Element manifest after the size increase");
  check_cmd->add_option("--manifest", manifest, "Element manifest for the screenshot");
  check_cmd->add_option("--image", image, "Screenshot (PNG)");
  check_cmd->add_option("--out", check_out, "Directory for findings.json and annotated.png");
  add_thresholds(check_cmd, check_cfg);

  SnapshotOptions snap;
  std::string snap_app, snap_png;
  auto* snap_cmd = app.add_subcommand("snapshot", "Print one screen of an app definition");
  snap_cmd->add_option("--app", snap_app, "App definition file")->required();
  snap_cmd->add_option("--screen", snap.screen, "Screen id (default: initial screen)");
  snap_cmd->add_option("--dynamic-type", snap.dynamic_type, "Dynamic Type size");
  snap_cmd->add_flag("--bold-text", snap.bold_text, "Bold Text on");
  snap_cmd->add_flag("--button-shapes", snap.button_shapes, "Button Shapes on");
  snap_cmd->add_flag("--json", snap.json, "Print an element manifest instead of element lines");
  snap_cmd->add_option("--png", snap_png, "Write the rendered screen");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    if (!app.get_subcommands().empty()) err << app.get_subcommands().front()->help();
    else err << app.help();
    return 2;
  }

  try {
    if (*run_cmd) {
      for (const auto& a : apps) run.app_paths.emplace_back(a);
      for (const auto& t : tests) run.test_paths.emplace_back(t);
      run.out_dir = out_dir;
      return cmd_run(run, out, err);
    }
    if (*check_cmd) {
      check.before = before;
      check.after = after;
      check.manifest = manifest;
      check.image = image;
      check.out_dir = check_out;
      return cmd_check_heuristics(check, check_cfg, out);
    }
    snap.app = snap_app;
    snap.png = snap_png;
    return cmd_snapshot(snap, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const SpecError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace a11y

#include "a11y/runner.hpp"

#include <algorithm>
#include <map>

#include <fmt/format.h>

#include "a11y/errors.hpp"
#include "a11y/render.hpp"

namespace a11y {

namespace {

constexpr std::string_view kKeyboardLine = "[Keyboard visible]";

SwipeDirection content_direction(SwipeDirection finger) {
  switch (finger) {
    case SwipeDirection::Up: return SwipeDirection::Down;
    case SwipeDirection::Down: return SwipeDirection::Up;
    default: return finger;
  }
}

std::vector<ResolvedElement> detached(std::vector<ResolvedElement> elements) {
  for (auto& e : elements) e.def = nullptr;
  return elements;
}

std::vector<Overlay> finding_overlays(const std::vector<HeuristicFinding>& findings) {
  std::vector<Overlay> out;
  for (const auto& f : findings) {
    Overlay o;
    o.kind = Overlay::Kind::Box;
    o.box = f.region;
    o.color = f.color_role;
    out.push_back(o);
  }
  return out;
}

std::string pass_label(Feature feature, const FeatureChange& change) {
  auto on_off = [](const std::optional<bool>& v) { return v.value_or(false) ? "on" : "off"; };
  switch (feature) {
    case Feature::DynamicType:
      return fmt::format("Dynamic Type {}", to_string(change.dynamic_type_size.value_or(DynamicTypeSize::Off)));
    case Feature::BoldText: return fmt::format("Bold Text {}", on_off(change.bold_text_on));
    case Feature::ButtonShapes: return fmt::format("Button Shapes {}", on_off(change.button_shapes_on));
    case Feature::VoiceOver: return fmt::format("VoiceOver {}", on_off(change.voiceover_on));
  }
  return "";
}

}  // namespace

std::string_view to_string(NavigationStatus status) {
  switch (status) {
    case NavigationStatus::Reached: return "reached";
    case NavigationStatus::Partial: return "partial";
    case NavigationStatus::Failed: return "failed";
  }
  return "failed";
}

std::string_view to_string(FinalStatus status) {
  switch (status) {
    case FinalStatus::Success: return "success";
    case FinalStatus::Partial: return "partial";
    case FinalStatus::Fail: return "fail";
  }
  return "fail";
}

std::optional<FinalStatus> parse_final_status(std::string_view name) {
  if (name == "success") return FinalStatus::Success;
  if (name == "partial") return FinalStatus::Partial;
  if (name == "fail") return FinalStatus::Fail;
  return std::nullopt;
}

PixelBuffer render_frame(const FrameRecord& frame) {
  return render_elements(frame.elements, frame.feature, frame.width, frame.height);
}

ObservedScreen observe(const Device& device, const RunnerConfig& config) {
  ObservedScreen out;
  auto snap = device.snapshot();
  const auto keyboard = detect_keyboard(snap);
  snap.elements = keyboard.filtered;
  snap.keyboard_visible = keyboard.keyboard_visible;
  if (device.state().feature.captions_on) snap = filter_caption_panel(snap, config.caption_height_frac);
  assign_ids(snap.elements);
  out.text = serialize_elements(snap);
  if (snap.keyboard_visible) {
    if (!out.text.empty()) out.text.push_back('\n');
    out.text += kKeyboardLine;
  }
  out.snapshot = std::move(snap);
  return out;
}

Session::Session(Device& device, LLMClient& client, RunnerConfig config)
    : device_(device), agents_(client), config_(std::move(config)) {}

void Session::chapter(std::string title) {
  SessionEvent ev;
  ev.kind = EventKind::ChapterBoundary;
  ev.name = std::move(title);
  ev.screen_id = device_.state().current_screen;
  ev.pass_index = device_.log().current_pass();
  device_.log().append(std::move(ev));
}

void Session::plan_revision(const Plan& plan) {
  SessionEvent ev;
  ev.kind = EventKind::PlanRevision;
  ev.name = fmt::format("plan revision {}", plan.revision);
  ev.detail = to_json(plan).dump();
  ev.screen_id = device_.state().current_screen;
  ev.pass_index = device_.log().current_pass();
  device_.log().append(std::move(ev));
}

int Session::capture_frame(std::string label, std::vector<Overlay> overlays) {
  FrameRecord frame;
  frame.t_ms = device_.log().now();
  frame.label = std::move(label);
  frame.screen_id = device_.state().current_screen;
  frame.feature = device_.state().feature;
  if (device_.app_running()) {
    frame.width = device_.current_app_model().screen_width;
    frame.height = device_.current_app_model().screen_height;
    frame.elements = detached(device_.visible_elements());
  }
  frame.overlays = std::move(overlays);
  frames_.push_back(std::move(frame));
  return static_cast<int>(frames_.size()) - 1;
}

int Session::screenshot(std::string label) {
  const int index = capture_frame(label);
  SessionEvent ev;
  ev.kind = EventKind::Screenshot;
  ev.name = "screenshot";
  ev.detail = std::move(label);
  ev.duration_ms = device_.costs.screenshot;
  ev.screen_id = device_.state().current_screen;
  ev.frame_index = index;
  ev.pass_index = device_.log().current_pass();
  device_.log().append(std::move(ev));
  return index;
}

void Session::add_findings(const std::vector<HeuristicFinding>& findings, std::string label,
                           std::optional<int> source_frame) {
  if (findings.empty()) return;
  if (!source_frame && !device_.app_running()) {
    for (int i = static_cast<int>(frames_.size()) - 1; i >= 0; --i) {
      if (!frames_[static_cast<std::size_t>(i)].elements.empty()) {
        source_frame = i;
        break;
      }
    }
  }
  const int frame = capture_frame(std::move(label), finding_overlays(findings));
  if (source_frame) {
    auto& f = frames_[static_cast<std::size_t>(frame)];
    const auto src = frames_.at(static_cast<std::size_t>(*source_frame));
    f.elements = src.elements;
    f.width = src.width;
    f.height = src.height;
    f.feature = src.feature;
    f.screen_id = src.screen_id;
  }
  for (const auto& f : findings) {
    SessionEvent ev;
    ev.kind = EventKind::Finding;
    ev.name = std::string(to_string(f.kind));
    ev.detail = f.detail;
    ev.screen_id = f.screen_id;
    ev.duration_ms = f.verdict == Verdict::Fail ? config_.finding_dwell_ms : 0;
    ev.finding_index = static_cast<int>(findings_.size());
    ev.frame_index = frame;
    ev.pass_index = device_.log().current_pass();
    findings_.push_back(f);
    device_.log().append(std::move(ev));
  }
}

std::vector<Overlay> Session::overlays_for(const ActionCommand& cmd, const ObservedScreen& screen) const {
  std::vector<Overlay> out;
  auto element_center = [&](int id) -> std::optional<Point> {
    for (const auto& e : screen.snapshot.elements) {
      if (e.id == id) return Point{e.box.center_x(), e.box.center_y()};
    }
    return std::nullopt;
  };
  if (const auto* tap = std::get_if<TapAction>(&cmd.action)) {
    if (auto p = element_center(tap->id)) out.push_back({Overlay::Kind::Crosshair, *p, {}, {}, {}});
  } else if (const auto* entry = std::get_if<TextEntryAction>(&cmd.action)) {
    if (auto p = element_center(entry->id)) out.push_back({Overlay::Kind::Crosshair, *p, {}, {}, {}});
  } else if (const auto* swipe = std::get_if<SwipeAction>(&cmd.action)) {
    Point p{swipe->x, swipe->y};
    if (p.x < 0 || p.y < 0) p = {screen.snapshot.width / 2, screen.snapshot.height / 2};
    out.push_back({Overlay::Kind::Arrow, p, swipe->direction, {}, {}});
  }
  return out;
}

void Session::execute(const ActionCommand& cmd, const ObservedScreen& screen) {
  auto element = [&](int id) -> const UIElement& {
    for (const auto& e : screen.snapshot.elements) {
      if (e.id == id) return e;
    }
    throw ActionError(fmt::format("element {} is not on the current screen", id));
  };
  const bool vo = device_.state().feature.voiceover_on;
  if (const auto* tap = std::get_if<TapAction>(&cmd.action)) {
    const auto& e = element(tap->id);
    const Point center{e.box.center_x(), e.box.center_y()};
    if (vo) activations_.push_back(activate_from_coordinates(device_, center, e.kind, e.box));
    else device_.tap(center);
  } else if (const auto* entry = std::get_if<TextEntryAction>(&cmd.action)) {
    const auto& e = element(entry->id);
    const Point center{e.box.center_x(), e.box.center_y()};
    if (vo) {
      auto result = activate_from_coordinates(device_, center, e.kind, e.box);
      const bool missing = result.missing;
      activations_.push_back(std::move(result));
      if (missing) return;
    }
    device_.type_text(center, entry->text);
  } else if (const auto* swipe = std::get_if<SwipeAction>(&cmd.action)) {
    Point p{swipe->x, swipe->y};
    if (p.x < 0 || p.y < 0) p = {screen.snapshot.width / 2, screen.snapshot.height / 2};
    if (vo) vo_scroll(device_, content_direction(swipe->direction));
    else device_.swipe(swipe->direction, p);
  }
}

NavigationOutcome Session::run_navigation(std::string_view goal, std::string_view app_name,
                                          const std::vector<std::string>& instruction_steps,
                                          const std::function<void()>& on_step_success) {
  NavigationOutcome out;
  auto screen = observe(device_, config_);
  out.plan = agents_.propose_plan(goal, app_name, screen.text, instruction_steps);
  plan_revision(out.plan);

  auto give_up = [&](std::string why) {
    out.status = out.steps_succeeded > 0 ? NavigationStatus::Partial : NavigationStatus::Failed;
    out.explanation = std::move(why);
    return out;
  };

  std::size_t index = 0;
  while (index < out.plan.steps.size()) {
    if (out.actions >= config_.max_actions) {
      return give_up(fmt::format("action budget of {} exhausted", config_.max_actions));
    }
    const auto& step = out.plan.steps[index];
    chapter(step.action);
    const auto cmd = agents_.next_action(step, screen.text);
    ++out.actions;

    std::string feedback;
    if (const auto* stop = std::get_if<StopAction>(&cmd.action)) {
      feedback = stop->feedback;
    } else {
      capture_frame(std::string(action_name(cmd.action)), overlays_for(cmd, screen));
      try {
        execute(cmd, screen);
      } catch (const ActionError& e) {
        feedback = e.what();
      }
      if (feedback.empty()) {
        auto after = observe(device_, config_);
        const auto eval = agents_.evaluate_action(goal, out.plan, index, cmd, screen.text, after.text);
        screen = std::move(after);
        if (eval.result != EvalResult::Failure) {
          out.plan.steps[index].status = StepStatus::Success;
          ++out.steps_succeeded;
          if (on_step_success) on_step_success();
          if (eval.result == EvalResult::TaskComplete) {
            out.status = NavigationStatus::Reached;
            out.explanation = eval.explanation;
            return out;
          }
          ++index;
          continue;
        }
        feedback = eval.explanation;
      } else {
        screen = observe(device_, config_);
      }
    }

    if (out.replans >= config_.max_replans) {
      return give_up(fmt::format("replan budget of {} exhausted; last problem: {}", config_.max_replans, feedback));
    }
    out.plan = agents_.replan(out.plan, index, feedback, screen.text);
    ++out.replans;
    plan_revision(out.plan);
  }
  out.status = NavigationStatus::Reached;
  out.explanation = "all plan steps succeeded";
  return out;
}

SessionRecording run_test(const TestSpec& spec, const AppModel& app, LLMClient& client, const RunnerConfig& config) {
  validate(config.heuristics);
  Device device(app);
  Session session(device, client, config);
  SessionRecording rec;
  rec.spec = spec;

  struct PassPlan {
    FeatureChange change;
    bool collect = false;  // feature-on pass whose screens feed the heuristics
  };
  std::vector<PassPlan> passes;
  auto change = [](auto FeatureChange::*member, auto value) {
    FeatureChange c;
    c.*member = value;
    return c;
  };
  switch (spec.feature) {
    case Feature::DynamicType:
      for (auto size : kDynamicTypeIncrements) passes.push_back({change(&FeatureChange::dynamic_type_size, size), true});
      passes.push_back({change(&FeatureChange::dynamic_type_size, DynamicTypeSize::Off), true});
      break;
    case Feature::BoldText:
      passes.push_back({change(&FeatureChange::bold_text_on, true), true});
      passes.push_back({change(&FeatureChange::bold_text_on, false), false});
      break;
    case Feature::ButtonShapes:
      passes.push_back({change(&FeatureChange::button_shapes_on, true), true});
      passes.push_back({change(&FeatureChange::button_shapes_on, false), false});
      break;
    case Feature::VoiceOver:
      passes.push_back({change(&FeatureChange::voiceover_on, true), true});
      passes.push_back({change(&FeatureChange::voiceover_on, false), false});
      break;
  }

  std::map<DynamicTypeSize, ScreenSnapshot> dt_shots;
  std::map<DynamicTypeSize, int> dt_frames;
  bool any_success = false;
  bool all_reached = true;

  for (std::size_t p = 0; p < passes.size(); ++p) {
    const auto& pass = passes[p];
    device.log().set_pass(static_cast<int>(p));
    const auto label = pass_label(spec.feature, pass.change);
    session.chapter(fmt::format("Pass {}: {}", p + 1, label));
    device.set_feature(pass.change);
    device.launch_app(app.app_id);
    session.clear_activations();

    std::vector<std::string> shot_screens;
    std::vector<std::pair<ScreenSnapshot, PixelBuffer>> bs_screens;
    auto capture_screen = [&](bool final_shot) -> int {
      const auto& screen_id = device.state().current_screen;
      const bool seen = std::find(shot_screens.begin(), shot_screens.end(), screen_id) != shot_screens.end();
      if (seen && !final_shot) return -1;
      if (!seen) shot_screens.push_back(screen_id);
      const int frame = session.screenshot(fmt::format("{}: {}", label, screen_id));
      if (spec.feature == Feature::ButtonShapes && pass.collect && !seen) {
        bs_screens.emplace_back(device.snapshot(), render_elements(device.visible_elements(), device.state().feature,
                                                                    device.current_app_model().screen_width,
                                                                    device.current_app_model().screen_height));
      }
      return frame;
    };
    const bool per_step_shots = spec.feature == Feature::BoldText || spec.feature == Feature::ButtonShapes;

    NavigationOutcome nav;
    try {
      nav = session.run_navigation(spec.goal, spec.app_name, spec.steps, [&] {
        if (per_step_shots) capture_screen(false);
      });
    } catch (const PlanningError& e) {
      nav.status = NavigationStatus::Failed;
      nav.explanation = e.what();
    } catch (const ActionError& e) {
      nav.status = NavigationStatus::Failed;
      nav.explanation = e.what();
    }

    PassSummary summary;
    summary.index = static_cast<int>(p);
    summary.label = label;
    summary.navigation = nav.status;
    summary.final_screen = device.state().current_screen;
    summary.steps_succeeded = nav.steps_succeeded;
    summary.explanation = nav.explanation;
    summary.reached_target = nav.status == NavigationStatus::Reached &&
                             (!spec.target_screen || *spec.target_screen == device.state().current_screen);
    any_success = any_success || nav.steps_succeeded > 0;
    all_reached = all_reached && summary.reached_target;

    if (spec.feature == Feature::DynamicType) {
      dt_frames[device.state().feature.dynamic_type_size] = capture_screen(true);
      dt_shots[device.state().feature.dynamic_type_size] = device.snapshot();
    } else if (per_step_shots) {
      capture_screen(false);
    } else {
      capture_screen(true);
    }

    if (spec.feature == Feature::VoiceOver && pass.collect) {
      std::vector<VisitTrace> traces;
      if (spec.verify_vo_order && summary.reached_target) {
        session.chapter("Read all elements");
        traces.push_back(read_all(device));
      }
      session.add_findings(collect_vo_findings(traces, session.activations()), "VoiceOver findings");
    }
    if (!bs_screens.empty()) {
      for (const auto& [snap, pixels] : bs_screens) {
        session.add_findings(button_shapes_check(snap, pixels, config.heuristics),
                             fmt::format("Button Shapes check: {}", snap.screen_id));
      }
    }
    rec.passes.push_back(std::move(summary));
    device.kill_app();
  }

  if (spec.feature == Feature::DynamicType) {
    const DynamicTypeSize order[] = {DynamicTypeSize::Off, DynamicTypeSize::XL, DynamicTypeSize::XXL,
                                     DynamicTypeSize::XXXL, DynamicTypeSize::AX1};
    for (std::size_t i = 0; i + 1 < std::size(order); ++i) {
      const auto& base = dt_shots[order[i]];
      const auto& grown = dt_shots[order[i + 1]];
      if (base.screen_id.empty() || base.screen_id != grown.screen_id) continue;
      const auto label = fmt::format("Dynamic Type {} vs {}", to_string(order[i]), to_string(order[i + 1]));
      session.add_findings(dynamic_type_check(base, grown, config.heuristics), label, dt_frames[order[i + 1]]);
    }
  }

  rec.events = device.log().events();
  rec.frames = std::move(session.frames());
  rec.findings = std::move(session.findings());
  rec.exchanges = session.agents().exchanges();
  if (all_reached) {
    rec.final_status = FinalStatus::Success;
    rec.status_detail = "every pass reached the target screen";
  } else if (any_success) {
    rec.final_status = FinalStatus::Partial;
  } else {
    rec.final_status = FinalStatus::Fail;
  }
  if (rec.status_detail.empty()) {
    for (const auto& p : rec.passes) {
      if (!p.reached_target) {
        rec.status_detail = fmt::format("{}: {} ({})", p.label, to_string(p.navigation), p.explanation);
        break;
      }
    }
  }
  return rec;
}

}  // namespace a11y

#include <gtest/gtest.h>

#include "a11y/device.hpp"
#include "a11y/errors.hpp"
#include "test_support.hpp"

namespace a11y {
namespace {

Point center_of(const ScreenSnapshot& s, std::string_view text) {
  for (const auto& e : s.elements) {
    if (e.text && *e.text == text) return {e.box.center_x(), e.box.center_y()};
  }
  ADD_FAILURE() << "no element '" << text << "' on " << s.screen_id;
  return {};
}

FeatureChange vo_change(bool on) {
  FeatureChange c;
  c.voiceover_on = on;
  return c;
}

class DeviceTest : public ::testing::Test {
 protected:
  Device device{testing::mini_app()};
};

TEST_F(DeviceTest, RequiresLaunchedApp) {
  EXPECT_THROW(device.tap({1, 1}), StateError);
  EXPECT_THROW(device.launch_app("nope"), StateError);
  EXPECT_FALSE(device.app_running());
  EXPECT_TRUE(device.snapshot().elements.empty());
}

TEST_F(DeviceTest, LaunchShowsInitialScreen) {
  const auto s = device.launch_app("mini");
  EXPECT_EQ(s.screen_id, "home");
  EXPECT_EQ(s.app_id, "mini");
  EXPECT_EQ(s.width, 390);
  EXPECT_EQ(s.elements.front().id, 1);
  ASSERT_EQ(device.log().events().size(), 1u);
  EXPECT_EQ(device.log().events()[0].name, "launch");
  EXPECT_EQ(device.log().now(), device.costs.launch);
}

TEST_F(DeviceTest, TapFollowsTransitionsAndBack) {
  auto s = device.launch_app("mini");
  s = device.tap(center_of(s, "Open Details"));
  EXPECT_EQ(s.screen_id, "details");
  ASSERT_TRUE(s.elements.front().is_back_button);
  s = device.tap(center_of(s, "Back"));
  EXPECT_EQ(s.screen_id, "home");
}

TEST_F(DeviceTest, TapOnInertElementDoesNothing) {
  auto s = device.launch_app("mini");
  s = device.tap(center_of(s, "Home"));  // the title text, first in reading order
  EXPECT_EQ(s.screen_id, "home");
  s = device.tap({380, 500});
  EXPECT_EQ(s.screen_id, "home");
}

TEST_F(DeviceTest, TypeTextSubmitsToResults) {
  auto s = device.launch_app("mini");
  s = device.tap(center_of(s, "Search"));
  ASSERT_EQ(s.screen_id, "search");
  s = device.type_text(center_of(s, "Search"), "podcast");
  EXPECT_EQ(s.screen_id, "results");
  const auto& last = device.log().events().back();
  EXPECT_EQ(last.name, "type_text");
  EXPECT_EQ(last.duration_ms, device.costs.tap + 7 * device.costs.keystroke);
}

TEST_F(DeviceTest, TypeTextOnNonFieldIsActionError) {
  auto s = device.launch_app("mini");
  EXPECT_THROW(device.type_text(center_of(s, "Open Details"), "x"), ActionError);
}

TEST_F(DeviceTest, TappingFieldShowsKeyboardWithSubmitKey) {
  auto s = device.launch_app("mini");
  s = device.tap(center_of(s, "Search"));
  s = device.tap(center_of(s, "Search"));
  EXPECT_TRUE(s.keyboard_visible);
  int singles = 0;
  bool submit = false;
  for (const auto& e : s.elements) {
    if (e.text && e.text->size() == 1) ++singles;
    if (e.text && *e.text == "search") submit = true;
  }
  EXPECT_GE(singles, 26);
  EXPECT_TRUE(submit);
  // Tab bar sits under the keyboard and is hidden.
  for (const auto& e : s.elements) EXPECT_NE(e.kind, ElementKind::Tab);
  s = device.tap(center_of(s, "q"));
  s = device.tap(center_of(s, "search"));
  EXPECT_EQ(s.screen_id, "results");
}

TEST_F(DeviceTest, VoiceOverSetsSpeakingRateAndCaptions) {
  device.set_feature(vo_change(true));
  const auto& f = device.state().feature;
  EXPECT_TRUE(f.voiceover_on);
  EXPECT_TRUE(f.captions_on);
  EXPECT_EQ(f.speaking_rate, 0.25);
  EXPECT_EQ(f.speaking_rate, kVoiceOverSpeakingRate);
  device.set_feature(vo_change(false));
  EXPECT_FALSE(device.state().feature.captions_on);
}

TEST_F(DeviceTest, VoiceOverTapOnlyMovesCursor) {
  device.set_feature(vo_change(true));
  auto s = device.launch_app("mini");
  EXPECT_EQ(device.state().vo_cursor, "title");
  s = device.tap(center_of(s, "Open Details"));
  EXPECT_EQ(device.state().current_screen, "home");
  EXPECT_EQ(device.state().vo_cursor, "open");
  EXPECT_EQ(device.state().caption, "Open Details");
  device.vo_activate();
  EXPECT_EQ(device.state().current_screen, "details");
}

TEST_F(DeviceTest, CaptionPanelAppearsWhenCaptionsOn) {
  device.set_feature(vo_change(true));
  const auto s = device.launch_app("mini");
  // Cursor starts on the title without speaking; focusing speaks.
  const auto next = device.vo_successor("title");
  ASSERT_TRUE(next.has_value());
  device.vo_focus(*next, "vo_swipe_right");
  const auto after = device.snapshot();
  EXPECT_EQ(after.elements.size(), s.elements.size() + 1);
  EXPECT_EQ(*after.elements.back().text, "Open Details");
}

TEST_F(DeviceTest, CaptionDwellDependsOnSpeakingRate) {
  device.set_feature(vo_change(true));
  device.launch_app("mini");
  const auto next = device.vo_successor("title");
  device.vo_focus(*next, "vo_swipe_right");
  const auto& ev = device.log().events().back();
  // 12 characters at 25ms/char divided by rate 0.25.
  EXPECT_EQ(ev.duration_ms, device.costs.vo_gesture + 1200);
}

TEST_F(DeviceTest, VoOrderHonorsIndicesAndVoNext) {
  auto j = testing::mini_app_json();
  auto& els = j["screens"]["home"]["elements"];
  els[2]["vo_order"] = 0;  // promo first
  els[1]["vo_next"] = "title";
  Device d(load_app(j));
  d.set_feature(vo_change(true));
  d.launch_app("mini");
  const auto order = d.vo_order();
  ASSERT_FALSE(order.empty());
  EXPECT_EQ(order[0].key, "promo");
  EXPECT_EQ(order[1].key, "title");
  EXPECT_EQ(d.vo_successor("open")->key, "title");
  EXPECT_EQ(d.vo_predecessor("title")->key, "promo");
  EXPECT_FALSE(d.vo_predecessor("promo"));
}

TEST_F(DeviceTest, ScrollPagesAndReportsNoChange) {
  auto j = testing::mini_app_json();
  j["screens"]["home"]["scroll_extent"] = 1;
  j["screens"]["home"]["elements"].push_back(
      {{"key", "more"}, {"kind", "Text"}, {"text", "More"}, {"box", {16, 300, 200, 330}}, {"page", 1}});
  Device d(load_app(j));
  d.launch_app("mini");
  EXPECT_TRUE(d.scroll(SwipeDirection::Up, ""));
  EXPECT_EQ(d.state().scroll_offset, 1);
  EXPECT_FALSE(d.scroll(SwipeDirection::Up, ""));
  EXPECT_TRUE(d.scroll(SwipeDirection::Down, ""));
  EXPECT_FALSE(d.scroll(SwipeDirection::Down, ""));
}

TEST_F(DeviceTest, InterruptionFiresOnceAndPersists) {
  auto j = testing::mini_app_json();
  j["screens"]["dialog"] = {
      {"title", "Dialog"},
      {"elements", {{{"key", "ok"}, {"kind", "Button"}, {"text", "OK"}, {"box", {100, 400, 290, 440}}}}},
      {"transitions", {{{"element", "ok"}, {"action", "tap"}, {"target", "$back"}}}},
  };
  j["interruptions"] = {{{"on_enter", "details"}, {"show", "dialog"}}};
  Device d(load_app(j));
  auto s = d.launch_app("mini");
  s = d.tap(center_of(s, "Open Details"));
  EXPECT_EQ(s.screen_id, "dialog");
  s = d.tap(center_of(s, "OK"));
  EXPECT_EQ(s.screen_id, "details");
  d.kill_app();
  s = d.launch_app("mini");
  s = d.tap(center_of(s, "Open Details"));
  EXPECT_EQ(s.screen_id, "details");
}

TEST_F(DeviceTest, ShowScreenRecordsNothing) {
  device.launch_app("mini");
  const auto before = device.log().events().size();
  const auto s = device.show_screen("profile");
  EXPECT_EQ(s.screen_id, "profile");
  EXPECT_EQ(device.log().events().size(), before);
  EXPECT_THROW(device.show_screen("nope"), StateError);
}

TEST_F(DeviceTest, TimestampsNonDecreasing) {
  auto s = device.launch_app("mini");
  s = device.tap(center_of(s, "Open Details"));
  s = device.swipe(SwipeDirection::Up, {195, 400});
  device.kill_app();
  long long prev = -1;
  for (const auto& e : device.log().events()) {
    EXPECT_GE(e.t_ms, prev);
    prev = e.t_ms;
  }
}

TEST(SwipeDirection, ParseAndPrint) {
  EXPECT_EQ(parse_swipe_direction("left"), SwipeDirection::Left);
  EXPECT_EQ(to_string(SwipeDirection::Down), "down");
  EXPECT_FALSE(parse_swipe_direction("sideways"));
}

}  // namespace
}  // namespace a11y

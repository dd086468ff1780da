#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "a11y/app_model.hpp"

namespace a11y::testing {

inline std::filesystem::path fixtures_dir() { return A11Y_FIXTURES_DIR; }

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline nlohmann::json read_json(const std::filesystem::path& p) { return nlohmann::json::parse(read_file(p)); }

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() / ("a11y_test_" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Three tabs (Home, Search, Profile), a detail screen with a back button and
// a search field that submits to a results screen.
inline nlohmann::json mini_app_json() {
  using nlohmann::json;
  auto tabs = [] {
    return json::array({
        {{"key", "tab_home"}, {"kind", "Tab"}, {"text", "Home"}, {"box", {0, 590, 130, 650}}, {"fixed", true}},
        {{"key", "tab_search"}, {"kind", "Tab"}, {"text", "Search"}, {"box", {130, 590, 260, 650}}, {"fixed", true}},
        {{"key", "tab_profile"}, {"kind", "Tab"}, {"text", "Profile"}, {"box", {260, 590, 390, 650}}, {"fixed", true}},
    });
  };
  auto tab_transitions = [] {
    return json::array({
        {{"element", "tab_home"}, {"action", "tap"}, {"target", "home"}},
        {{"element", "tab_search"}, {"action", "tap"}, {"target", "search"}},
        {{"element", "tab_profile"}, {"action", "tap"}, {"target", "profile"}},
    });
  };
  auto with_tabs = [&](json elements) {
    for (auto& t : tabs()) elements.push_back(t);
    return elements;
  };

  json home = {
      {"title", "Home"},
      {"elements", with_tabs(json::array({
                       {{"key", "title"}, {"kind", "Text"}, {"text", "Home"}, {"box", {20, 56, 300, 84}}},
                       {{"key", "open"}, {"kind", "Button"}, {"text", "Open Details"}, {"box", {16, 120, 374, 164}}},
                       {{"key", "promo"}, {"kind", "Text"}, {"text", "Try It Free"}, {"box", {16, 200, 374, 240}},
                        {"clickable", true}},
                       {{"key", "star"}, {"kind", "Icon"}, {"text", "\xE2\x98\x85"}, {"box", {16, 260, 36, 280}},
                        {"clickable", true}},
                   }))},
  };
  home["transitions"] = tab_transitions();
  home["transitions"].push_back({{"element", "open"}, {"action", "tap"}, {"target", "details"}});

  json details = {
      {"title", "Details"},
      {"elements", json::array({
                       {{"key", "back"}, {"kind", "Button"}, {"text", "Back"}, {"box", {8, 50, 70, 90}}},
                       {{"key", "heading"}, {"kind", "Text"}, {"text", "Details"}, {"box", {100, 56, 290, 84}}},
                       {{"key", "notify"}, {"kind", "Toggle"}, {"text", "Notify me"}, {"box", {16, 120, 374, 164}}},
                   })},
      {"transitions", json::array({{{"element", "back"}, {"action", "tap"}, {"target", "$back"}}})},
  };

  json search = {
      {"title", "Search"},
      {"elements", with_tabs(json::array({
                       {{"key", "field"}, {"kind", "TextField"}, {"text", "Search"}, {"box", {16, 100, 374, 140}},
                        {"return_key", "search"}},
                   }))},
  };
  search["transitions"] = tab_transitions();
  search["transitions"].push_back(
      {{"element", "field"}, {"action", "submit"}, {"target", "results"}, {"query", "*"}});

  json results = {
      {"title", "Results"},
      {"elements", with_tabs(json::array({
                       {{"key", "hit"}, {"kind", "Button"}, {"text", "First Result"}, {"box", {16, 100, 374, 140}}},
                   }))},
  };
  results["transitions"] = tab_transitions();

  json profile = {
      {"title", "Profile"},
      {"elements", with_tabs(json::array({
                       {{"key", "name"}, {"kind", "Text"}, {"text", "Your Profile"}, {"box", {20, 56, 300, 84}}},
                   }))},
  };
  profile["transitions"] = tab_transitions();

  return {
      {"format_version", 1},
      {"app_id", "mini"},
      {"app_name", "Mini App"},
      {"screen_size", {390, 844}},
      {"initial_screen", "home"},
      {"screens", {{"home", home}, {"details", details}, {"search", search}, {"results", results}, {"profile", profile}}},
  };
}

inline AppModel mini_app() { return load_app(mini_app_json()); }

}  // namespace a11y::testing

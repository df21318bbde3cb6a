#include "cadact/actions.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <sstream>

#include "cadact/error.hpp"

namespace cadact::act {

namespace {

constexpr std::array<std::string_view, kKeyCount> kKeyNames = {
    "shift_down", "shift_up", "tab", "enter", "escape", "space", "l", "c", "a", "s",
    "e", "p", "h", "y", "seven", "plus", "arrow_up", "arrow_down", "arrow_left", "arrow_right"};

// Which of fields 1..6 each command uses.
constexpr std::array<std::array<bool, 6>, kCmdCount> kUsed = {{
    {true, true, false, false, false, false},   // MoveTo: x, y
    {false, false, true, true, false, false},   // PressKey: k, n
    {false, false, false, false, true, false},  // Scroll: s
    {false, false, false, false, false, true},  // Type: v
    {false, false, false, false, false, false}, // Click
}};

}  // namespace

std::string_view key_name(Key k) { return kKeyNames[static_cast<std::size_t>(k)]; }

std::string_view cmd_name(Cmd c) {
  switch (c) {
    case Cmd::MoveTo: return "MoveTo";
    case Cmd::PressKey: return "PressKey";
    case Cmd::Scroll: return "Scroll";
    case Cmd::Type: return "Type";
    case Cmd::Click: return "Click";
  }
  return "?";
}

Action Action::move_to(double x, double y) {
  Action a;
  a.cmd = Cmd::MoveTo;
  a.x = x;
  a.y = y;
  return a;
}

Action Action::press(Key k, int n) {
  Action a;
  a.cmd = Cmd::PressKey;
  a.key = static_cast<int>(k);
  a.count = n;
  return a;
}

Action Action::scroll_by(double s) {
  Action a;
  a.cmd = Cmd::Scroll;
  a.scroll = s;
  return a;
}

Action Action::type(double v) {
  Action a;
  a.cmd = Cmd::Type;
  a.value = v;
  return a;
}

Action Action::click() { return Action{}; }

int bin_unit(double u) { return std::clamp(static_cast<int>(std::floor(u * kBins)), 0, kBins - 1); }
double unbin_unit(int k) { return (k + 0.5) / kBins; }
int bin_signed(double v) { return bin_unit((v + 1.0) / 2.0); }
double unbin_signed(int k) { return unbin_unit(k) * 2.0 - 1.0; }

ActionVector encode_action(const Action& a) {
  ActionVector v;
  v.fill(-1);
  v[0] = static_cast<int>(a.cmd);
  switch (a.cmd) {
    case Cmd::MoveTo:
      v[1] = bin_unit(a.x.value_or(0.0));
      v[2] = bin_unit(a.y.value_or(0.0));
      break;
    case Cmd::PressKey:
      v[3] = std::clamp(a.key.value_or(0), 0, kBins - 1);
      v[4] = std::clamp(a.count.value_or(1), 0, kBins - 1);
      break;
    case Cmd::Scroll: v[5] = bin_signed(a.scroll.value_or(0.0)); break;
    case Cmd::Type: v[6] = bin_signed(a.value.value_or(0.0)); break;
    case Cmd::Click: break;
  }
  return v;
}

bool well_formed(const ActionVector& v) {
  if (v[0] < 0 || v[0] >= kCmdCount) return false;
  const auto& used = kUsed[static_cast<std::size_t>(v[0])];
  for (std::size_t f = 0; f < 6; ++f) {
    const int x = v[f + 1];
    if (used[f] ? (x < 0 || x >= kBins) : x != -1) return false;
  }
  if (v[0] == static_cast<int>(Cmd::PressKey) && (v[3] >= kKeyCount || v[4] < 1)) return false;
  return true;
}

Action decode_action(const ActionVector& v) {
  if (!well_formed(v)) {
    std::string s;
    for (int x : v) s += std::to_string(x) + " ";
    fail(ErrorCode::MalformedVector, "vector does not match its command: " + s);
  }
  switch (static_cast<Cmd>(v[0])) {
    case Cmd::MoveTo: return Action::move_to(unbin_unit(v[1]), unbin_unit(v[2]));
    case Cmd::PressKey: return Action::press(static_cast<Key>(v[3]), v[4]);
    case Cmd::Scroll: return Action::scroll_by(unbin_signed(v[5]));
    case Cmd::Type: return Action::type(unbin_signed(v[6]));
    case Cmd::Click: return Action::click();
  }
  return Action::click();
}

std::vector<ActionVector> ActionProgram::vectors() const {
  std::vector<ActionVector> out;
  out.reserve(actions.size());
  for (const auto& a : actions) out.push_back(encode_action(a));
  return out;
}

const std::string* ActionProgram::tag_at(std::size_t index) const {
  const auto it = std::lower_bound(hl_events.begin(), hl_events.end(), index,
                                   [](const HlEvent& e, std::size_t i) { return e.index < i; });
  if (it != hl_events.end() && it->index == index) return &it->tag;
  return nullptr;
}

std::size_t ActionProgram::count_tag(std::string_view tag) const {
  return static_cast<std::size_t>(std::count_if(hl_events.begin(), hl_events.end(), [&](const HlEvent& e) { return e.tag == tag; }));
}

std::string step_to_json(std::size_t index, const ActionVector& v, double dt, const std::string* hl) {
  nlohmann::ordered_json j;
  j["i"] = index;
  j["a"] = v;
  j["dt"] = dt;
  if (hl) j["hl"] = *hl;
  return j.dump();
}

std::string ActionProgram::to_jsonl() const {
  std::string out;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    out += step_to_json(i, encode_action(actions[i]), actions[i].dt, tag_at(i));
    out += '\n';
  }
  return out;
}

std::vector<JsonlStep> parse_jsonl(std::string_view text) {
  std::vector<JsonlStep> out;
  std::size_t start = 0, line_no = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const auto line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      JsonlStep s;
      s.index = j.at("i").get<std::size_t>();
      const auto a = j.at("a").get<std::vector<int>>();
      if (a.size() != 7) fail(ErrorCode::MalformedVector, "line " + std::to_string(line_no) + ": expected 7 fields");
      std::copy(a.begin(), a.end(), s.vector.begin());
      s.dt = j.at("dt").get<double>();
      if (j.contains("hl")) s.hl = j.at("hl").get<std::string>();
      out.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::MalformedVector, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace cadact::act

#pragma once

// UI actions, their 7-integer vector encoding and JSON Lines programs.

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cadact::act {

enum class Cmd : int { MoveTo = 0, PressKey = 1, Scroll = 2, Type = 3, Click = 4 };

inline constexpr int kCmdCount = 5;

enum class Key : int {
  ShiftDown = 0,
  ShiftUp,
  Tab,
  Enter,
  Escape,
  Space,
  L,
  C,
  A,
  S,
  E,
  P,
  H,
  Y,
  Seven,
  Plus,
  ArrowUp,
  ArrowDown,
  ArrowLeft,
  ArrowRight,
};

inline constexpr int kKeyCount = 20;

std::string_view key_name(Key k);
std::string_view cmd_name(Cmd c);

struct Action {
  Cmd cmd = Cmd::Click;
  std::optional<double> x, y;   // MoveTo
  std::optional<int> key;       // PressKey
  std::optional<int> count;     // PressKey
  std::optional<double> scroll; // Scroll
  std::optional<double> value;  // Type
  double dt = 0.0;

  static Action move_to(double x, double y);
  static Action press(Key k, int n = 1);
  static Action scroll_by(double s);
  static Action type(double v);
  static Action click();

  bool is_key(Key k) const { return cmd == Cmd::PressKey && key == static_cast<int>(k); }
  bool operator==(const Action&) const = default;
};

// (c, x, y, k, n, s, v); unused fields are -1.
using ActionVector = std::array<int, 7>;

inline constexpr int kBins = 1000;

int bin_unit(double u);           // [0,1] -> [0,999]
double unbin_unit(int k);         // bin center
int bin_signed(double v);         // [-1,1] via (v+1)/2
double unbin_signed(int k);

ActionVector encode_action(const Action& a);
// Throws MalformedVector when the used/unused pattern does not fit the command.
Action decode_action(const ActionVector& v);
bool well_formed(const ActionVector& v);

struct HlEvent {
  std::size_t index = 0;
  std::string tag;

  bool operator==(const HlEvent&) const = default;
};

struct ActionProgram {
  std::vector<Action> actions;
  std::vector<HlEvent> hl_events;

  std::vector<ActionVector> vectors() const;
  const std::string* tag_at(std::size_t index) const;
  std::size_t count_tag(std::string_view tag) const;
  std::string to_jsonl() const;

  bool operator==(const ActionProgram&) const = default;
};

// One parsed line of actions.jsonl.
struct JsonlStep {
  std::size_t index = 0;
  ActionVector vector{};
  double dt = 0.0;
  std::optional<std::string> hl;
};

std::string step_to_json(std::size_t index, const ActionVector& v, double dt, const std::string* hl);
std::vector<JsonlStep> parse_jsonl(std::string_view text);

}  // namespace cadact::act

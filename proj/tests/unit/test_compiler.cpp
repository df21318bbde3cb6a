#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "../support/tokens.hpp"
#include "cadact/compiler.hpp"
#include "cadact/error.hpp"
#include "cadact/synth.hpp"
#include "cadact/ui_layout.hpp"

using namespace cadact;
using act::ActionVector;
namespace tt = testing_tokens;

namespace {

constexpr int K_SHIFT_DOWN = 0, K_SHIFT_UP = 1, K_TAB = 2, K_ENTER = 3, K_ESC = 4, K_SPACE = 5, K_C = 7, K_S = 9,
              K_E = 10, K_P = 11, K_H = 12, K_SEVEN = 14, K_PLUS = 15, K_UP = 16, K_DOWN = 17;

ActionVector key(int k, int n = 1) { return {1, -1, -1, k, n, -1, -1}; }
ActionVector move(int x, int y) { return {0, x, y, -1, -1, -1, -1}; }
ActionVector type(int v) { return {3, -1, -1, -1, -1, -1, v}; }
const ActionVector kClick{4, -1, -1, -1, -1, -1, -1};

compile::CompileConfig plain() {
  compile::CompileConfig cfg;
  cfg.delays = false;
  cfg.jitter = false;
  cfg.zoom = false;
  return cfg;
}

seq::CadSequence circle_on_top(int pz = 128, int e1 = 160) {
  tt::Ext e;
  e.s = 128;
  e.pz = pz;
  e.e1 = e1;
  return seq::parse_sequence(tt::seq({tt::circle(128, 128, 40), tt::ext(e)}));
}

std::vector<int> keys_only(const std::vector<ActionVector>& v, std::size_t from, std::size_t to) {
  std::vector<int> out;
  for (std::size_t i = from; i < to; ++i)
    if (v[i][0] == 1) out.push_back(v[i][3] * 10 + v[i][4]);
  return out;
}

}  // namespace

TEST_CASE("single circle on the top plane") {
  Rng rng(1);
  const auto prog = compile::compile_sequence(circle_on_top(), plain(), rng);
  const auto v = prog.vectors();
  // Radius 40/128 * 128/256 * 0.5 = 0.078125 -> radius point at u = 0.578125.
  // Depth 0.5 * 32/128 = 0.125 -> (0.125 + 1) / 2 -> bin 562.
  const std::vector<ActionVector> head = {
      key(K_SHIFT_DOWN), key(K_PLUS),  key(K_UP),        key(K_SHIFT_UP),           // view the top plane
      key(K_SHIFT_DOWN), key(K_S),     key(K_SHIFT_UP),  move(50, 930), kClick,     // sketch on tree row 0
      key(K_C),          key(K_SHIFT_DOWN), move(500, 500), kClick,                  // circle center
      key(K_SHIFT_UP),   move(578, 500), kClick,                                       // radius point closes the loop
      key(K_ESC)};
  REQUIRE(v.size() == 31);
  for (std::size_t i = 0; i < head.size(); ++i) CHECK(v[i] == head[i]);
  // Region click: somewhere inside the circle, away from its edge.
  REQUIRE(v[17][0] == 0);
  const double du = act::unbin_unit(v[17][1]) - 0.5, dv = act::unbin_unit(v[17][2]) - 0.5;
  CHECK(std::hypot(du, dv) < 0.078125 - ui::kHitRadius);
  CHECK(v[18] == kClick);
  const std::vector<ActionVector> tail = {key(K_SHIFT_DOWN), key(K_E), key(K_SHIFT_UP), key(K_TAB), type(562),
                                         key(K_ENTER),      key(K_SHIFT_DOWN), key(K_H), key(K_SHIFT_UP),
                                         key(K_SHIFT_DOWN), key(K_SEVEN), key(K_SHIFT_UP)};
  for (std::size_t i = 0; i < tail.size(); ++i) CHECK(v[19 + i] == tail[i]);

  CHECK(prog.hl_events == std::vector<act::HlEvent>{{5, "sketch_begin"},
                                                    {9, "loop_begin"},
                                                    {15, "primitive:circle"},
                                                    {24, "extrude"},
                                                    {29, "eos"}});
  for (const auto& a : prog.actions) CHECK(a.dt == compile::kFixedDelay);
}

TEST_CASE("offset plane is created through the dialog") {
  Rng rng(1);
  // pz = 96 -> offset 0.5 * (-32/128) = -0.125, typed as 0.125 then flipped.
  const auto v = compile::compile_sequence(circle_on_top(96), plain(), rng).vectors();
  const std::vector<ActionVector> head = {move(30, 975), kClick,       move(50, 930), kClick, key(K_TAB), type(562),
                                          key(K_TAB),    move(940, 800), kClick,      key(K_ENTER),
                                          key(K_SHIFT_DOWN), key(K_P), key(K_SHIFT_UP)};
  for (std::size_t i = 0; i < head.size(); ++i) CHECK(v[i] == head[i]);
  // The sketch now lives on tree row 3 (center 0.93 - 3 * 0.025).
  CHECK(v[20] == move(50, 855));

  Rng rng2(1);
  const auto up = compile::compile_sequence(circle_on_top(160), plain(), rng2).vectors();
  CHECK(up[5] == type(562));
  CHECK(up[6] == key(K_ENTER));
}

TEST_CASE("remove extrusion toggles merge") {
  tt::Ext a, b;
  a.s = 200;
  b.s = 200;
  b.u = 1;
  b.e1 = 100;
  std::vector<std::string> toks = tt::square(60, 200);
  toks.push_back(tt::ext(a));
  toks.push_back(tt::circle(128, 128, 20));
  toks.push_back(tt::ext(b));
  Rng rng(3);
  const auto prog = compile::compile_sequence(seq::parse_sequence(tt::seq(toks)), plain(), rng);
  const auto v = prog.vectors();
  REQUIRE(prog.count_tag("extrude") == 2);
  const std::size_t enter = prog.hl_events[prog.hl_events.size() - 2].index;
  std::size_t e_key = enter;
  while (v[e_key] != key(K_E)) --e_key;
  // After Shift+E: arrow_down once, Tab to depth, Type, two Tabs to the merge box, Space, Enter.
  CHECK(keys_only(v, e_key + 1, enter + 1) ==
        std::vector<int>{K_SHIFT_UP * 10 + 1, K_DOWN * 10 + 1, K_TAB * 10 + 1, K_TAB * 10 + 2, K_SPACE * 10 + 1,
                         K_ENTER * 10 + 1});
  CHECK(v[e_key + 4] == type(act::bin_signed(0.5 * (100 - 128) / 128.0)));
  // The second sketch hides the first part with 'y' and Shift+Y shows it again.
  std::vector<std::size_t> ys;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] == key(13)) ys.push_back(i);
  REQUIRE(ys.size() == 2);
  CHECK(v[ys[0] - 1] != key(K_SHIFT_DOWN));
  CHECK(v[ys[1] - 1] == key(K_SHIFT_DOWN));
}

TEST_CASE("determinism and seed skeleton") {
  const auto s = synth::generate_sequence(5);
  Rng r1(9), r2(9), r3(10);
  const auto p1 = compile::compile_sequence(s, {}, r1);
  const auto p2 = compile::compile_sequence(s, {}, r2);
  const auto p3 = compile::compile_sequence(s, {}, r3);
  CHECK(p1 == p2);
  REQUIRE(p1.actions.size() == p3.actions.size());
  CHECK(p1.hl_events == p3.hl_events);
  bool any_diff = false;
  for (std::size_t i = 0; i < p1.actions.size(); ++i) {
    auto a = encode_action(p1.actions[i]), b = encode_action(p3.actions[i]);
    any_diff |= a != b || p1.actions[i].dt != p3.actions[i].dt;
    a[1] = a[2] = b[1] = b[2] = 0;
    CHECK(a == b);
  }
  CHECK(any_diff);
  for (const auto& act : p1.actions) {
    CHECK(act.dt >= 0.2);
    CHECK(act.dt <= 0.5);
    CHECK(std::round(act.dt * 1000) == doctest::Approx(act.dt * 1000));
  }
}

TEST_CASE("small loops are zoomed only when enabled") {
  tt::Ext e;
  e.s = 200;
  std::vector<std::string> toks = tt::square(40, 220);
  toks.push_back(tt::sep());
  toks.push_back(tt::circle(128, 128, 4));
  toks.push_back(tt::ext(e));
  const auto seq = seq::parse_sequence(tt::seq(toks));
  auto cfg = plain();
  Rng r1(1);
  const auto flat = compile::compile_sequence(seq, cfg, r1).vectors();
  cfg.zoom = true;
  Rng r2(1);
  const auto zoomed = compile::compile_sequence(seq, cfg, r2).vectors();
  auto scrolls = [](const std::vector<ActionVector>& v) {
    std::vector<int> out;
    for (const auto& a : v)
      if (a[0] == 2) out.push_back(a[5]);
    return out;
  };
  CHECK(scrolls(flat).empty());
  CHECK(scrolls(zoomed) == std::vector<int>{999, 0});
}

TEST_CASE("off-canvas circles are rejected while lowering") {
  tt::Ext e;
  e.s = 255;
  e.px = 128;
  // Radius about 0.99 around the canvas center.
  const auto seq = seq::parse_sequence(tt::seq({tt::circle(128, 128, 255), tt::ext(e)}));
  Rng rng(1);
  try {
    compile::compile_sequence(seq, plain(), rng);
    FAIL("expected OffCanvas");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::OffCanvas);
  }
}

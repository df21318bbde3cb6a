#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "../support/tokens.hpp"
#include "cadact/chamfer.hpp"
#include "cadact/compiler.hpp"
#include "cadact/sim.hpp"
#include "cadact/synth.hpp"

using namespace cadact;
using act::ActionVector;
using geo::Vec3;
namespace tt = testing_tokens;

namespace {

const ActionVector kClick{4, -1, -1, -1, -1, -1, -1};
ActionVector key(act::Key k, int n = 1) { return {1, -1, -1, static_cast<int>(k), n, -1, -1}; }

compile::CompileConfig plain() {
  compile::CompileConfig cfg;
  cfg.delays = false;
  cfg.jitter = false;
  cfg.zoom = false;
  return cfg;
}

act::ActionProgram program_for(std::uint64_t seed, const compile::CompileConfig& cfg = {}) {
  Rng rng(seed);
  return compile::compile_sequence(synth::generate_sequence(seed), cfg, rng);
}

// Walks a program, calling fn(state_before, state_after, outcome, index).
template <typename Fn>
void walk(const std::vector<ActionVector>& vs, Fn&& fn) {
  sim::SimState st;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    auto [next, out] = sim::step(st, vs[i]);
    fn(st, next, out, i);
    st = std::move(next);
  }
}

}  // namespace

TEST_CASE("episodes complete and rebuild the oracle") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const auto sq = synth::generate_sequence(seed);
    Rng rng(seed);
    const auto low = geo::lower_sequence(sq);
    const auto prog = compile::compile_lowered(low, {}, rng);
    sim::RunConfig rc;
    rc.render_frames = false;
    const auto trace = sim::run(prog, rc);
    REQUIRE(trace.completed());
    for (const auto& s : trace.steps) CHECK(s.result == sim::StepResult::Ok);
    CHECK(trace.final_doc.count_extrusions() == sq.records.size());
    CHECK(trace.final_doc.count_sketches() == sq.records.size());
    const auto oracle = kernel::build_solid(low);
    const auto P = kernel::sample_points(oracle, 2048, 0), Q = kernel::sample_points(trace.final_doc.solid, 2048, 0);
    CHECK(metrics::chamfer(P, Q) < 1e-3);
    // The feature list alone reproduces the document solid.
    const auto R = kernel::sample_points(sim::replay(trace.final_doc.features), 2048, 0);
    CHECK(R == Q);
  }
}

TEST_CASE("traces are deterministic") {
  const auto prog = program_for(3);
  const auto a = sim::run(prog), b = sim::run(prog);
  CHECK(a.bytes() == b.bytes());
  CHECK(a.steps.size() == prog.actions.size());
  for (std::size_t i : {std::size_t{0}, a.steps.size() / 2, a.steps.size() - 1})
    CHECK(sim::frame_after(prog.vectors(), i) == a.steps[i].frame);
}

TEST_CASE("shift is held for chained commits and released for closing ones") {
  std::size_t commits = 0, closing = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    walk(program_for(seed).vectors(), [&](const sim::SimState&, const sim::SimState& after, const sim::StepOutcome& o,
                                          std::size_t) {
      if (o.event.rfind("commit_", 0) != 0) return;
      ++commits;
      const bool closes = o.event.find("+loop_closed") != std::string::npos;
      closing += closes;
      CHECK(after.shift_held == !closes);
    });
  }
  CHECK(closing > 0);
  CHECK(commits > closing);
}

TEST_CASE("three failures in a row terminate") {
  const auto t = sim::run_vectors({kClick, kClick, kClick, key(act::Key::Seven)});
  CHECK_FALSE(t.completed());
  CHECK(t.reason == "3 consecutive failures");
  CHECK(t.steps.size() == 3);

  const auto ok = sim::run_vectors({kClick, kClick, key(act::Key::ShiftDown), kClick, kClick, key(act::Key::Seven),
                                    key(act::Key::ShiftUp)});
  CHECK(ok.completed());
  CHECK(sim::run_vectors({key(act::Key::ShiftDown)}).reason == "program ended without eos");
}

TEST_CASE("failed steps leave the state untouched") {
  sim::SimState st;
  const auto before = sim::render_canvas(st, {});
  for (const ActionVector& v : {key(act::Key::L), key(act::Key::ShiftUp), key(act::Key::Enter),
                                ActionVector{4, 0, -1, -1, -1, -1, -1}, ActionVector{3, -1, -1, -1, -1, -1, 500}}) {
    auto [next, out] = sim::step(st, v);
    CHECK(out.result != sim::StepResult::Ok);
    CHECK(next.mode == st.mode);
    CHECK(next.shift_held == st.shift_held);
    CHECK(sim::render_canvas(next, {}) == before);
  }
  CHECK(sim::step(st, key(act::Key::ShiftUp)).second.result == sim::StepResult::NoOpWarning);
  CHECK(sim::step(st, {4, 0, -1, -1, -1, -1, -1}).second.result == sim::StepResult::InvalidTransition);
  // ArrowLeft never names a view.
  auto [armed, o1] = sim::step(sim::step(st, key(act::Key::ShiftDown)).first, key(act::Key::Plus));
  REQUIRE(o1.result == sim::StepResult::Ok);
  CHECK(sim::step(armed, key(act::Key::ArrowLeft)).second.result == sim::StepResult::InvalidTransition);
  CHECK(sim::step(armed, key(act::Key::ArrowRight)).first.camera == sim::CameraView{false, geo::Right});
}

TEST_CASE("extrude dialog tab order") {
  sim::SimState st;
  st.mode = sim::Mode::ExtrudeDialog;
  st.focus = ui::Field::DepthField;
  auto [a, o] = sim::step(st, key(act::Key::Tab));
  REQUIRE(o.result == sim::StepResult::Ok);
  CHECK(a.focus == ui::Field::SymmetricBox);
  CHECK(sim::step(st, key(act::Key::Tab, 2)).first.focus == ui::Field::MergeBox);
  CHECK(sim::step(st, key(act::Key::Tab, 4)).first.focus == ui::Field::TypeSelector);
  // Typed text commits on Tab.
  auto [typed, o2] = sim::step(st, {3, -1, -1, -1, -1, -1, 562});
  REQUIRE(o2.result == sim::StepResult::Ok);
  CHECK(*sim::step(typed, key(act::Key::Tab)).first.extrude_dialog.depth == doctest::Approx(0.125));
  auto [toggled, o3] = sim::step(a, key(act::Key::Space));
  REQUIRE(o3.result == sim::StepResult::Ok);
  CHECK(toggled.extrude_dialog.symmetric);
}

TEST_CASE("committed circle is stroked on its locus") {
  tt::Ext e;
  e.s = 128;
  Rng rng(1);
  const auto prog = compile::compile_sequence(seq::parse_sequence(tt::seq({tt::circle(128, 128, 40), tt::ext(e)})),
                                              plain(), rng);
  const std::size_t commit = prog.hl_events[2].index;
  REQUIRE(prog.hl_events[2].tag == "primitive:circle");
  const auto frame = sim::frame_after(prog.vectors(), commit);
  // Circle center (0.5, 0.5), radius 0.078125; look at its top and left points.
  auto darkest = [&](double u, double v) {
    const int x = static_cast<int>(u * 224), y = static_cast<int>((1 - v) * 224);
    int m = 255;
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) m = std::min<int>(m, frame.at(x + dx, y + dy));
    return m;
  };
  CHECK(darkest(0.5, 0.578125) == 0);
  CHECK(darkest(0.421875, 0.5) == 0);
  CHECK(darkest(0.5, 0.53) > 0);
  CHECK(darkest(0.5, 0.62) > 0);
}

TEST_CASE("isometric solid pixels stay inside the projected bounds") {
  const auto prog = program_for(4);
  sim::SimState st;
  for (const auto& v : prog.vectors()) st = sim::step(st, v).first;
  REQUIRE(st.eos);
  REQUIRE(st.camera.isometric);
  const auto with = sim::render_canvas(st, {});
  auto bare = st;
  bare.doc.solid = kernel::Solid();
  const auto without = sim::render_canvas(bare, {});

  const auto cam = sim::view_camera(st.camera);
  const auto box = st.doc.solid.bounds();
  double x0 = 1e9, x1 = -1e9, y0 = 1e9, y1 = -1e9;
  for (int c = 0; c < 8; ++c) {
    const Vec3 p((c & 1 ? box.hi : box.lo).x(), (c & 2 ? box.hi : box.lo).y(), (c & 4 ? box.hi : box.lo).z());
    const Vec3 d = p - cam.center;
    const double x = d.dot(cam.right) / (2 * cam.half_extent) * 224 + 112;
    const double y = 112 - d.dot(cam.up) / (2 * cam.half_extent) * 224;
    x0 = std::min(x0, x), x1 = std::max(x1, x), y0 = std::min(y0, y), y1 = std::max(y1, y);
  }
  std::size_t changed = 0;
  for (int y = 0; y < 224; ++y)
    for (int x = 0; x < 224; ++x) {
      if (with.at(x, y) == without.at(x, y)) continue;
      ++changed;
      CHECK(x >= x0 - 1);
      CHECK(x <= x1 + 1);
      CHECK(y >= y0 - 1);
      CHECK(y <= y1 + 1);
    }
  CHECK(changed > 200);
}

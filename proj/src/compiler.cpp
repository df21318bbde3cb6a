#include "cadact/compiler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cadact/error.hpp"
#include "cadact/region.hpp"
#include "cadact/ui_layout.hpp"

namespace cadact::compile {

namespace {

using act::Action;
using act::Key;
using geo::PixelPoint;
using geo::Vec2;
using ui::Field;

// Snap to the center of the bin a MoveTo will be encoded into.
PixelPoint binned(const PixelPoint& p) {
  return {act::unbin_unit(act::bin_unit(p.x())), act::unbin_unit(act::bin_unit(p.y()))};
}

bool on_canvas(const PixelPoint& p) { return p.x() >= 0 && p.x() <= 1 && p.y() >= 0 && p.y() <= 1; }

int field_index(Field f) {
  for (std::size_t i = 0; i < ui::kExtrudeDialogOrder.size(); ++i)
    if (ui::kExtrudeDialogOrder[i] == f) return static_cast<int>(i);
  return -1;
}

class Emitter {
 public:
  Emitter(const CompileConfig& cfg, Rng& rng, act::ActionProgram& prog) : cfg_(cfg), rng_(rng), prog_(prog) {}

  void push(Action a, const char* tag = nullptr) {
    a.dt = cfg_.delays ? std::round(rng_.uniform(0.2, 0.5) * 1000.0) / 1000.0 : kFixedDelay;
    if (a.cmd == act::Cmd::Type && !ui::is_text_field(focus))
      throw std::logic_error("compiler emitted Type without a focused text field");
    if (a.cmd == act::Cmd::Scroll) zoom = std::clamp(zoom * std::exp(ui::kZoomRate * act::unbin_signed(act::bin_signed(*a.scroll))), ui::kZoomMin, ui::kZoomMax);
    if (tag) prog_.hl_events.push_back({prog_.actions.size(), tag});
    prog_.actions.push_back(std::move(a));
  }

  void key(Key k, int n = 1, const char* tag = nullptr) { push(Action::press(k, n), tag); }

  void combo(Key k, const char* tag = nullptr) {
    key(Key::ShiftDown);
    key(k, 1, tag);
    key(Key::ShiftUp);
  }

  void move_click(const PixelPoint& p, const char* tag = nullptr) {
    if (!on_canvas(p)) fail(ErrorCode::UnsupportedGeometry, "click target leaves the canvas");
    push(Action::move_to(p.x(), p.y()));
    push(Action::click(), tag);
  }

  void shift(bool down) {
    if (down == shift_held) return;
    key(down ? Key::ShiftDown : Key::ShiftUp);
    shift_held = down;
  }

  std::size_t size() const { return prog_.actions.size(); }

  Field focus = Field::None;
  bool shift_held = false;
  double zoom = 1.0;

 private:
  const CompileConfig& cfg_;
  Rng& rng_;
  act::ActionProgram& prog_;
};

Key tool_key(const geo::Primitive& p) {
  if (std::holds_alternative<geo::Line>(p)) return Key::L;
  if (std::holds_alternative<geo::Arc>(p)) return Key::A;
  return Key::C;
}

const char* primitive_tag(const geo::Primitive& p) {
  if (std::holds_alternative<geo::Line>(p)) return "primitive:line";
  if (std::holds_alternative<geo::Arc>(p)) return "primitive:arc";
  return "primitive:circle";
}

PixelPoint radius_point(const geo::Circle& c) {
  for (const Vec2& d : {Vec2(1, 0), Vec2(-1, 0), Vec2(0, 1), Vec2(0, -1)}) {
    const PixelPoint p = c.center + c.radius * d;
    if (on_canvas(p)) return p;
  }
  fail(ErrorCode::UnsupportedGeometry, "circle has no on-canvas radius point");
}

bool in_face(const kernel::PlanarRegion& region, int loop, const PixelPoint& p) {
  if (!region.loop_contains(loop, p)) return false;
  for (int c : region.loops()[static_cast<std::size_t>(loop)].children)
    if (region.loop_contains(c, p)) return false;
  return true;
}

struct FacePick {
  PixelPoint best;
  double best_clearance = 0.0;
};

// Best grid point of a face by clearance from all region edges.
FacePick search_face(const kernel::PlanarRegion& region, int loop) {
  const auto& box = region.loops()[static_cast<std::size_t>(loop)].box;
  FacePick pick;
  pick.best = box.lo;
  constexpr int kGrid = 32;
  for (int j = 0; j < kGrid; ++j) {
    for (int i = 0; i < kGrid; ++i) {
      const PixelPoint p = binned(box.lo + Vec2((i + 0.5) / kGrid * (box.hi.x() - box.lo.x()),
                                               (j + 0.5) / kGrid * (box.hi.y() - box.lo.y())));
      if (!in_face(region, loop, p)) continue;
      const double c = region.boundary_distance(p);
      if (c > pick.best_clearance) {
        pick.best_clearance = c;
        pick.best = p;
      }
    }
  }
  return pick;
}

void emit_loop(Emitter& em, const geo::LoopGeom& loop, const CompileConfig& cfg, std::optional<Key>& tool) {
  const std::size_t first = em.size();
  bool small = false;
  for (const auto& p : loop.primitives) small |= geo::primitive_extent(p) < cfg.small_extent;
  const bool zoomed = cfg.zoom && small;
  auto tag_first = [&]() -> const char* { return em.size() == first ? "loop_begin" : nullptr; };

  if (zoomed) em.push(Action::scroll_by(1.0), tag_first());
  const std::size_t n = loop.primitives.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& prim = loop.primitives[i];
    const bool closing = i + 1 == n;
    const Key k = tool_key(prim);
    if (tool != k) {
      if (tool) em.key(Key::Escape, 1, tag_first());
      em.key(k, 1, tag_first());
      tool = k;
    }
    if (!em.shift_held) {
      em.key(Key::ShiftDown, 1, tag_first());
      em.shift_held = true;
    }
    // Constraints come back on for the click that closes the loop.
    if (const auto* line = std::get_if<geo::Line>(&prim)) {
      em.move_click(line->start);
      if (closing) em.shift(false);
      em.move_click(line->end, primitive_tag(prim));
    } else if (const auto* arc = std::get_if<geo::Arc>(&prim)) {
      em.move_click(arc->start);
      if (closing) em.shift(false);
      em.move_click(arc->end);
      em.move_click(arc->mid, primitive_tag(prim));
    } else {
      const auto& c = std::get<geo::Circle>(prim);
      em.move_click(c.center);
      em.shift(false);
      em.move_click(radius_point(c), primitive_tag(prim));
    }
  }
  if (zoomed) em.push(Action::scroll_by(-1.0));
}

}  // namespace

act::ActionProgram compile_record(const geo::LoweredRecord& rec, const CompileConfig& cfg, Rng& rng, CompilerState& state) {
  act::ActionProgram prog;
  Emitter em(cfg, rng, prog);
  const int plane = rec.basis.plane_id;
  const double offset = rec.basis.offset;
  int sketch_row = ui::default_plane_row(plane);

  // (a) offset plane
  if (offset != 0.0) {
    em.move_click(ui::kPlaneIcon.center(), "plane_create");
    em.move_click(ui::tree_row(ui::default_plane_row(plane)).center());
    em.key(Key::Tab);
    em.focus = Field::OffsetField;
    em.push(Action::type(std::abs(offset)));
    if (offset < 0) {
      em.key(Key::Tab);
      em.focus = Field::DirectionArrow;
      em.move_click(ui::kDirectionArrow.center());
    }
    em.key(Key::Enter);
    em.focus = Field::None;
    sketch_row = 3 + state.custom_planes;
    ++state.custom_planes;
    if (sketch_row >= ui::kMaxTreeRows) fail(ErrorCode::UnsupportedGeometry, "too many custom planes for the tree panel");
    if (cfg.visibility && state.planes_visible) {
      em.combo(Key::P);
      state.planes_visible = false;
    }
  }

  // (b) view navigation
  em.key(Key::ShiftDown);
  em.key(Key::Plus);
  em.key(plane == geo::Top ? Key::ArrowUp : plane == geo::Right ? Key::ArrowRight : Key::ArrowDown);
  em.key(Key::ShiftUp);
  em.zoom = 1.0;

  // (c) sketch on the plane
  const bool hide_parts = cfg.visibility && state.record > 0;
  if (hide_parts) em.key(Key::Y);
  em.combo(Key::S, "sketch_begin");
  em.move_click(ui::tree_row(sketch_row).center());

  // (d) loops
  std::optional<Key> tool;
  for (const auto& loop : rec.sketch.loops) emit_loop(em, loop, cfg, tool);
  if (em.shift_held) em.shift(false);
  em.key(Key::Escape);

  // (e) region selection and extrusion
  const auto region = kernel::build_region(rec.sketch, plane, offset);
  for (int l = 0; l < static_cast<int>(region.loops().size()); ++l) {
    if (region.loops()[static_cast<std::size_t>(l)].depth % 2 != 0) continue;
    const FacePick pick = search_face(region, l);
    const double floor_clear = ui::kHitRadius / em.zoom + 0.001;
    int scrolls = 0;
    if (pick.best_clearance < floor_clear) {
      if (!cfg.zoom) fail(ErrorCode::UnsupportedGeometry, "face too thin to click without zoom");
      double z = em.zoom;
      while (ui::kHitRadius / z + 0.001 > pick.best_clearance && z < ui::kZoomMax) {
        z = std::min(ui::kZoomMax, z * std::exp(ui::kZoomRate * act::unbin_signed(act::bin_signed(1.0))));
        ++scrolls;
      }
      if (ui::kHitRadius / z + 0.001 > pick.best_clearance) fail(ErrorCode::UnsupportedGeometry, "face too thin to click");
      for (int s = 0; s < scrolls; ++s) em.push(Action::scroll_by(1.0));
    }
    const double need = std::max(0.1 * pick.best_clearance, ui::kHitRadius / em.zoom + 0.001);
    PixelPoint target = pick.best;
    if (cfg.jitter) {
      const auto& box = region.loops()[static_cast<std::size_t>(l)].box;
      for (int attempt = 0; attempt < 4000; ++attempt) {
        const PixelPoint p = binned(Vec2(rng.uniform(box.lo.x(), box.hi.x()), rng.uniform(box.lo.y(), box.hi.y())));
        if (in_face(region, l, p) && region.boundary_distance(p) >= need) {
          target = p;
          break;
        }
      }
    }
    em.move_click(target);
    for (int s = 0; s < scrolls; ++s) em.push(Action::scroll_by(-1.0));
  }
  em.combo(Key::E);
  em.focus = Field::TypeSelector;
  const int op = static_cast<int>(rec.params.op);
  if (op != 0) em.key(Key::ArrowDown, op);
  auto tab_to = [&](Field f) {
    const int n = field_index(f) - field_index(em.focus);
    em.key(Key::Tab, n);
    em.focus = f;
  };
  tab_to(Field::DepthField);
  em.push(Action::type(rec.params.e1));
  if (rec.params.sides == geo::ExtrudeSides::Symmetric) {
    tab_to(Field::SymmetricBox);
    em.key(Key::Space);
  }
  if (rec.params.op == geo::ExtrudeOp::Remove) {
    tab_to(Field::MergeBox);
    em.key(Key::Space);
  }
  if (rec.params.sides == geo::ExtrudeSides::TwoSided) {
    tab_to(Field::SecondDepthField);
    em.push(Action::type(rec.params.e2));
  }
  em.key(Key::Enter, 1, "extrude");
  em.focus = Field::None;

  // (f) visibility
  if (hide_parts) em.combo(Key::Y);
  if (cfg.visibility && !state.sketches_hidden) {
    em.combo(Key::H);
    state.sketches_hidden = true;
  }
  ++state.record;
  return prog;
}

act::ActionProgram compile_record(const geo::LoweredRecord& rec, const CompileConfig& cfg, Rng& rng) {
  CompilerState state;
  return compile_record(rec, cfg, rng, state);
}

void append_eos(act::ActionProgram& prog, const CompileConfig& cfg, Rng& rng) {
  Emitter em(cfg, rng, prog);
  em.combo(Key::Seven, "eos");
}

act::ActionProgram compile_lowered(const std::vector<geo::LoweredRecord>& records, const CompileConfig& cfg, Rng& rng) {
  act::ActionProgram prog;
  CompilerState state;
  for (const auto& rec : records) {
    auto frag = compile_record(rec, cfg, rng, state);
    const std::size_t base = prog.actions.size();
    for (auto& e : frag.hl_events) prog.hl_events.push_back({e.index + base, std::move(e.tag)});
    prog.actions.insert(prog.actions.end(), frag.actions.begin(), frag.actions.end());
  }
  append_eos(prog, cfg, rng);
  return prog;
}

act::ActionProgram compile_sequence(const seq::CadSequence& seq, const CompileConfig& cfg, Rng& rng) {
  return compile_lowered(geo::lower_sequence(seq), cfg, rng);
}

}  // namespace cadact::compile

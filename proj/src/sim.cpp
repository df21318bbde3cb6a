#include "cadact/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <span>

#include "cadact/error.hpp"

namespace cadact::sim {

using act::Key;
using geo::Vec2;
using ui::Field;

std::size_t DocState::count_sketches() const {
  return static_cast<std::size_t>(std::count_if(features.begin(), features.end(),
                                                [](const Feature& f) { return std::holds_alternative<SketchFeature>(f); }));
}

std::size_t DocState::count_extrusions() const {
  return static_cast<std::size_t>(std::count_if(features.begin(), features.end(),
                                                [](const Feature& f) { return std::holds_alternative<ExtrudeFeature>(f); }));
}

std::vector<const PlaneFeature*> DocState::planes() const {
  std::vector<const PlaneFeature*> out;
  for (const auto& f : features)
    if (const auto* p = std::get_if<PlaneFeature>(&f)) out.push_back(p);
  return out;
}

kernel::PlanarRegion extrusion_region(const kernel::PlanarRegion& sketch_region, const std::vector<int>& faces) {
  const auto& loops = sketch_region.loops();
  std::vector<int> parity(loops.size(), 0);
  for (int f : faces) {
    if (f < 0 || f >= static_cast<int>(loops.size())) fail(ErrorCode::OutOfRange, "face index out of range");
    parity[static_cast<std::size_t>(f)] ^= 1;
    for (int c : loops[static_cast<std::size_t>(f)].children) parity[static_cast<std::size_t>(c)] ^= 1;
  }
  std::vector<kernel::Polygon> polys;
  for (std::size_t i = 0; i < loops.size(); ++i)
    if (parity[i]) polys.push_back(loops[i].polygon);
  return kernel::region_from_polygons(std::move(polys), sketch_region.plane_id(), sketch_region.offset());
}

namespace {

kernel::Solid apply_extrude(const kernel::Solid& solid, const SketchFeature& sk, const ExtrudeFeature& ex,
                            const kernel::PlanarRegion& sketch_region) {
  if (ex.params.op == geo::ExtrudeOp::Remove && !ex.merge) return solid;
  auto region = std::make_shared<const kernel::PlanarRegion>(extrusion_region(sketch_region, ex.faces));
  return kernel::extrude(solid, std::move(region), ex.params, sk.offset);
}

}  // namespace

kernel::Solid replay(const std::vector<Feature>& features) {
  kernel::Solid solid;
  for (const auto& f : features) {
    const auto* ex = std::get_if<ExtrudeFeature>(&f);
    if (!ex) continue;
    if (ex->sketch >= features.size() || !std::holds_alternative<SketchFeature>(features[ex->sketch]))
      fail(ErrorCode::OutOfRange, "extrusion references a missing sketch");
    const auto& sk = std::get<SketchFeature>(features[ex->sketch]);
    solid = apply_extrude(solid, sk, *ex, kernel::build_region(sk.geom, sk.plane_id, sk.offset));
  }
  return solid;
}

std::string_view to_string(StepResult r) {
  switch (r) {
    case StepResult::Ok: return "ok";
    case StepResult::NoOpWarning: return "noop";
    case StepResult::InvalidTransition: return "invalid";
  }
  return "?";
}

namespace {

int arity(Tool t) { return t == Tool::Arc ? 3 : 2; }

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Machine {
 public:
  explicit Machine(const SimState& st) : s(st) {}

  SimState s;

  StepOutcome ok(std::string e) { return {StepResult::Ok, std::move(e)}; }
  StepOutcome noop(std::string e) { return {StepResult::NoOpWarning, std::move(e)}; }
  StepOutcome invalid(std::string e) { return {StepResult::InvalidTransition, std::move(e)}; }

  StepOutcome apply(const act::Action& a) {
    switch (a.cmd) {
      case act::Cmd::MoveTo:
        s.cursor = {*a.x, *a.y};
        return ok("move");
      case act::Cmd::Click: return click();
      case act::Cmd::PressKey: return press(static_cast<Key>(*a.key), *a.count);
      case act::Cmd::Scroll: return scroll(*a.scroll);
      case act::Cmd::Type: return type(*a.value);
    }
    return invalid("unknown command");
  }

 private:
  bool dialog_open() const { return s.mode == Mode::PlaneDialog || s.mode == Mode::ExtrudeDialog; }

  int custom_plane_count() const { return static_cast<int>(s.doc.planes().size()); }

  // (axis, offset) of a feature-tree row, if the row holds a plane.
  std::optional<std::pair<int, double>> row_plane(int row) const {
    if (row >= 0 && row < 3) return std::pair{2 - row, 0.0};
    const auto planes = s.doc.planes();
    const int i = row - 3;
    if (i >= 0 && i < static_cast<int>(planes.size())) {
      const auto* p = planes[static_cast<std::size_t>(i)];
      return std::pair{p->base_plane, p->offset};
    }
    return std::nullopt;
  }

  StepOutcome scroll(double amount) {
    if (amount == 0.0) return noop("zero scroll");
    s.zoom = std::clamp(s.zoom * std::exp(ui::kZoomRate * amount), ui::kZoomMin, ui::kZoomMax);
    return ok("zoom");
  }

  StepOutcome type(double value) {
    if (!ui::is_text_field(s.focus)) return invalid("type without a focused text field");
    s.text_buffer = format_value(value);
    return ok("type");
  }

  void commit_buffer() {
    if (s.text_buffer.empty()) return;
    const double v = std::strtod(s.text_buffer.c_str(), nullptr);
    switch (s.focus) {
      case Field::OffsetField: s.plane_dialog.value = v; break;
      case Field::DepthField: s.extrude_dialog.depth = v; break;
      case Field::SecondDepthField: s.extrude_dialog.second_depth = v; break;
      default: break;
    }
    s.text_buffer.clear();
  }

  void close_dialog() {
    s.focus = Field::None;
    s.text_buffer.clear();
    s.active_tool = Tool::None;
  }

  StepOutcome press(Key k, int count) {
    switch (k) {
      case Key::ShiftDown:
        if (s.shift_held) return noop("shift already held");
        s.shift_held = true;
        return ok("shift_down");
      case Key::ShiftUp:
        if (!s.shift_held) return noop("shift not held");
        s.shift_held = false;
        s.nav_armed = false;
        return ok("shift_up");
      case Key::Tab: return tab(count);
      case Key::Enter: return enter();
      case Key::Escape: return escape();
      case Key::Space: return space();
      case Key::L: return tool_key(Tool::Line);
      case Key::C: return tool_key(Tool::Circle);
      case Key::A: return tool_key(Tool::Arc);
      case Key::S:
        if (!s.shift_held) return noop("s without shift");
        if (s.mode != Mode::Idle) return invalid("sketch tool outside idle mode");
        s.mode = Mode::SketchPick;
        return ok("sketch_pick");
      case Key::E: return shift_e();
      case Key::P:
        if (!s.shift_held) return noop("p without shift");
        s.planes_visible = !s.planes_visible;
        return ok("toggle_planes");
      case Key::H:
        if (!s.shift_held) return noop("h without shift");
        s.sketches_visible = !s.sketches_visible;
        return ok("toggle_sketches");
      case Key::Y:
        if (s.shift_held) {
          if (s.parts_visible) return noop("parts already shown");
          s.parts_visible = true;
          return ok("show_parts");
        }
        if (!s.parts_visible) return noop("parts already hidden");
        s.parts_visible = false;
        return ok("hide_parts");
      case Key::Seven:
        if (!s.shift_held) return noop("7 without shift");
        if (dialog_open() || s.mode == Mode::Sketch) return invalid("view change during an edit");
        s.camera = {true, s.camera.plane_id};
        s.eos = true;
        return ok("eos");
      case Key::Plus:
        if (!s.shift_held) return noop("+ without shift");
        s.nav_armed = true;
        return ok("nav_armed");
      case Key::ArrowUp:
      case Key::ArrowDown:
      case Key::ArrowLeft:
      case Key::ArrowRight: return arrow(k, count);
    }
    return invalid("unknown key");
  }

  StepOutcome arrow(Key k, int count) {
    if (s.nav_armed) {
      s.nav_armed = false;
      if (k == Key::ArrowLeft) return invalid("no view bound to arrow_left");
      const int plane = k == Key::ArrowUp ? geo::Top : k == Key::ArrowRight ? geo::Right : geo::Front;
      s.camera = {false, plane};
      s.zoom = 1.0;
      return ok("view");
    }
    if (s.mode == Mode::ExtrudeDialog && s.focus == Field::TypeSelector) {
      if (k != Key::ArrowDown && k != Key::ArrowUp) return noop("sideways arrow on type list");
      const int before = s.extrude_dialog.type_index;
      const int delta = k == Key::ArrowDown ? count : -count;
      s.extrude_dialog.type_index = std::clamp(before + delta, 0, ui::kExtrudeTypeCount - 1);
      if (s.extrude_dialog.type_index == before) return noop("type list at its end");
      return ok("extrude_type");
    }
    return noop("arrow without target");
  }

  StepOutcome tab(int count) {
    std::span<const Field> order;
    if (s.mode == Mode::PlaneDialog) order = ui::kPlaneDialogOrder;
    else if (s.mode == Mode::ExtrudeDialog) order = ui::kExtrudeDialogOrder;
    else return noop("tab without a dialog");
    commit_buffer();
    const int n = static_cast<int>(order.size());
    int at = -1;
    for (int i = 0; i < n; ++i)
      if (order[static_cast<std::size_t>(i)] == s.focus) at = i;
    at = ((at + count) % n + n) % n;
    s.focus = order[static_cast<std::size_t>(at)];
    return ok("focus");
  }

  StepOutcome space() {
    if (s.mode == Mode::ExtrudeDialog && s.focus == Field::SymmetricBox) {
      s.extrude_dialog.symmetric = !s.extrude_dialog.symmetric;
      return ok("toggle_symmetric");
    }
    if (s.mode == Mode::ExtrudeDialog && s.focus == Field::MergeBox) {
      s.extrude_dialog.merge = !s.extrude_dialog.merge;
      return ok("toggle_merge");
    }
    if (s.mode == Mode::PlaneDialog && s.focus == Field::DirectionArrow) {
      s.plane_dialog.flipped = !s.plane_dialog.flipped;
      return ok("flip_direction");
    }
    return noop("space without a checkbox");
  }

  StepOutcome escape() {
    switch (s.mode) {
      case Mode::Sketch:
        if (s.active_tool == Tool::None) return noop("no tool to exit");
        s.active_tool = Tool::None;
        s.pending_clicks.clear();
        return ok("tool_exit");
      case Mode::PlaneDialog:
      case Mode::ExtrudeDialog:
      case Mode::SketchPick:
        close_dialog();
        s.mode = Mode::Idle;
        s.active_sketch.reset();
        return ok("cancel");
      case Mode::Idle: break;
    }
    return noop("escape in idle");
  }

  StepOutcome tool_key(Tool t) {
    if (s.mode != Mode::Sketch) return noop("tool key outside a sketch");
    if (s.active_tool == t) return noop("tool already active");
    if (s.active_tool != Tool::None) return invalid("switch tools without exiting the active one");
    s.active_tool = t;
    return ok("tool");
  }

  StepOutcome enter() {
    if (s.mode == Mode::PlaneDialog) {
      commit_buffer();
      if (!s.plane_dialog.base_row) return invalid("plane dialog without a base plane");
      const auto base = row_plane(*s.plane_dialog.base_row);
      if (!base) return invalid("base plane vanished");
      if (3 + custom_plane_count() >= ui::kMaxTreeRows) return invalid("feature tree full");
      const double v = s.plane_dialog.flipped ? -s.plane_dialog.value : s.plane_dialog.value;
      s.doc.features.push_back(PlaneFeature{base->first, base->second + v});
      close_dialog();
      s.mode = Mode::Idle;
      return ok("plane_created");
    }
    if (s.mode == Mode::ExtrudeDialog) return commit_extrude();
    return invalid("enter without a dialog");
  }

  StepOutcome shift_e() {
    if (!s.shift_held) return noop("e without shift");
    if (s.mode != Mode::Sketch || !s.active_sketch) return invalid("extrude without an active sketch");
    auto& sk = *s.active_sketch;
    if (!s.pending_clicks.empty() || !sk.chain.primitives.empty()) return invalid("sketch has an open loop");
    if (sk.loops.empty()) return invalid("sketch is empty");
    if (!ensure_region()) return invalid("sketch loops intersect");
    s.doc.features.push_back(SketchFeature{sk.plane_id, sk.offset, geo::SketchGeom{sk.loops}});
    s.mode = Mode::ExtrudeDialog;
    s.active_tool = Tool::None;
    s.extrude_dialog = {};
    s.focus = Field::TypeSelector;
    return ok("extrude_dialog");
  }

  StepOutcome commit_extrude() {
    commit_buffer();
    auto& d = s.extrude_dialog;
    if (!d.depth || *d.depth == 0.0) return invalid("extrude depth missing");
    if (!s.active_sketch || s.active_sketch->selection.empty()) return invalid("no faces selected");
    ExtrudeFeature ex;
    ex.sketch = s.doc.features.size() - 1;
    ex.faces.assign(s.active_sketch->selection.begin(), s.active_sketch->selection.end());
    ex.params.e1 = *d.depth;
    ex.params.e2 = d.second_depth.value_or(0.0);
    ex.params.op = static_cast<geo::ExtrudeOp>(d.type_index);
    ex.params.sides = d.symmetric ? geo::ExtrudeSides::Symmetric
                      : d.second_depth ? geo::ExtrudeSides::TwoSided
                                       : geo::ExtrudeSides::OneSided;
    ex.merge = d.merge;
    const auto& sk = std::get<SketchFeature>(s.doc.features[ex.sketch]);
    try {
      s.doc.solid = apply_extrude(s.doc.solid, sk, ex, *s.active_sketch->region);
    } catch (const Error& e) {
      return invalid(e.what());
    }
    s.doc.features.push_back(std::move(ex));
    close_dialog();
    s.mode = Mode::Idle;
    s.active_sketch.reset();
    return ok("extruded");
  }

  bool ensure_region() {
    auto& sk = *s.active_sketch;
    if (sk.region) return true;
    try {
      sk.region = std::make_shared<const kernel::PlanarRegion>(
          kernel::build_region(geo::SketchGeom{sk.loops}, sk.plane_id, sk.offset));
    } catch (const Error&) {
      return false;
    }
    return true;
  }

  StepOutcome click() {
    switch (s.mode) {
      case Mode::Idle:
        if (ui::kPlaneIcon.contains(s.cursor)) {
          s.mode = Mode::PlaneDialog;
          s.active_tool = Tool::PlaneCreate;
          s.plane_dialog = {};
          s.focus = Field::None;
          return ok("plane_dialog");
        }
        return noop("click on nothing");
      case Mode::PlaneDialog: {
        if (s.focus == Field::DirectionArrow && ui::kDirectionArrow.contains(s.cursor)) {
          s.plane_dialog.flipped = !s.plane_dialog.flipped;
          return ok("flip_direction");
        }
        const int row = ui::tree_row_at(s.cursor);
        if (row >= 0 && row_plane(row)) {
          s.plane_dialog.base_row = row;
          return ok("base_plane");
        }
        return noop("click outside plane dialog targets");
      }
      case Mode::SketchPick: {
        const int row = ui::tree_row_at(s.cursor);
        const auto plane = row >= 0 ? row_plane(row) : std::nullopt;
        if (!plane) return noop("click is not on a plane");
        s.mode = Mode::Sketch;
        s.active_sketch = ActiveSketch{};
        s.active_sketch->plane_id = plane->first;
        s.active_sketch->offset = plane->second;
        s.active_tool = Tool::None;
        return ok("sketch_begin");
      }
      case Mode::Sketch:
        if (s.active_tool == Tool::None) return select_face();
        return draw_click();
      case Mode::ExtrudeDialog: return noop("click in extrude dialog");
    }
    return invalid("bad mode");
  }

  StepOutcome select_face() {
    auto& sk = *s.active_sketch;
    if (!sk.chain.primitives.empty()) return invalid("selection with an open loop");
    if (sk.loops.empty()) return noop("no faces to select");
    if (!ensure_region()) return invalid("sketch loops intersect");
    const auto& region = *sk.region;
    if (region.boundary_distance(s.cursor) <= s.hit_radius()) return noop("click lands on an edge");
    const int loop = region.innermost_loop(s.cursor);
    if (loop < 0) return noop("click outside every face");
    if (!sk.selection.erase(loop)) sk.selection.insert(loop);
    return ok("face_toggle");
  }

  StepOutcome draw_click() {
    auto& sk = *s.active_sketch;
    if (s.camera.isometric || s.camera.plane_id != sk.plane_id) return invalid("sketch plane not in view");
    PixelPoint p = s.cursor;
    auto& chain = sk.chain.primitives;
    const std::size_t k = s.pending_clicks.size();
    if (s.active_tool == Tool::Circle) {
      if (!chain.empty()) return invalid("circle inside an open loop");
    } else if (k == 0 && !chain.empty()) {
      const PixelPoint tail = geo::end_point(chain.back());
      if (p != tail) {
        if (s.shift_held || (p - tail).norm() > s.hit_radius()) return invalid("primitive does not continue the loop");
        p = tail;
      }
    } else if (k == 1 && !chain.empty() && !s.shift_held) {
      const PixelPoint head = geo::start_point(chain.front());
      if ((p - head).norm() <= s.hit_radius()) p = head;
    }
    s.pending_clicks.push_back(p);
    if (static_cast<int>(s.pending_clicks.size()) < arity(s.active_tool)) return ok("pending_click");

    const auto clicks = std::move(s.pending_clicks);
    s.pending_clicks.clear();
    geo::Primitive prim;
    switch (s.active_tool) {
      case Tool::Line:
        if (clicks[0] == clicks[1]) return invalid("zero-length line");
        prim = geo::Line{clicks[0], clicks[1]};
        break;
      case Tool::Circle: {
        const double r = (clicks[1] - clicks[0]).norm();
        if (r == 0.0) return invalid("zero radius");
        prim = geo::Circle{clicks[0], r};
        break;
      }
      case Tool::Arc:
        try {
          prim = geo::arc_through(clicks[0], clicks[2], clicks[1]);
        } catch (const Error& e) {
          return invalid(e.what());
        }
        break;
      default: return invalid("no drawing tool");
    }
    sk.region.reset();
    if (std::holds_alternative<geo::Circle>(prim)) {
      sk.loops.push_back(geo::LoopGeom{{prim}});
      return ok("commit_circle+loop_closed");
    }
    const char* kind = std::holds_alternative<geo::Line>(prim) ? "commit_line" : "commit_arc";
    chain.push_back(prim);
    if (chain.size() > 1 && geo::end_point(prim) == geo::start_point(chain.front())) {
      sk.loops.push_back(std::move(sk.chain));
      sk.chain = {};
      return ok(std::string(kind) + "+loop_closed");
    }
    return ok(kind);
  }
};

}  // namespace

std::pair<SimState, StepOutcome> step(const SimState& st, const act::ActionVector& v) {
  if (!act::well_formed(v)) return {st, {StepResult::InvalidTransition, "malformed vector"}};
  Machine m(st);
  StepOutcome out = m.apply(act::decode_action(v));
  if (out.result != StepResult::Ok) return {st, std::move(out)};
  // EOS stays set only while nothing but the trailing shift release follows.
  if (out.event != "eos" && out.event != "shift_up") m.s.eos = false;
  return {std::move(m.s), std::move(out)};
}

kernel::Camera view_camera(const CameraView& view) {
  if (!view.isometric) return kernel::plane_camera(view.plane_id);
  kernel::Camera c = kernel::isometric_camera();
  c.half_extent = 1.0;
  return c;
}

namespace {

constexpr std::uint8_t kBackground = 236;
constexpr std::uint8_t kGrid = 214;
constexpr std::uint8_t kSketchStroke = 96;
constexpr std::uint8_t kActiveStroke = 0;
constexpr std::uint8_t kSelection = 170;
constexpr std::uint8_t kChrome = 60;

struct Pixels {
  int w, h;
  int x(double u) const { return raster::to_px(u, w); }
  int y(double v) const { return raster::to_py(v, h); }
};

void stroke_primitive(GrayImage& img, const geo::Primitive& prim, std::uint8_t value) {
  const Pixels px{img.width, img.height};
  const auto pts = kernel::tessellate(prim, 2.0 / img.width);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    raster::line(img, px.x(pts[i].x()), px.y(pts[i].y()), px.x(pts[i + 1].x()), px.y(pts[i + 1].y()), value);
  if (std::holds_alternative<geo::Circle>(prim) && pts.size() > 1)
    raster::line(img, px.x(pts.back().x()), px.y(pts.back().y()), px.x(pts.front().x()), px.y(pts.front().y()), value);
}

void fill_selection(GrayImage& img, const ActiveSketch& sk) {
  if (sk.selection.empty() || !sk.region) return;
  const auto& box = sk.region->box();
  const Pixels px{img.width, img.height};
  const int x0 = std::max(0, px.x(box.lo.x())), x1 = std::min(img.width - 1, px.x(box.hi.x()));
  const int y0 = std::max(0, px.y(box.hi.y())), y1 = std::min(img.height - 1, px.y(box.lo.y()));
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const Vec2 p((x + 0.5) / img.width, 1.0 - (y + 0.5) / img.height);
      const int loop = sk.region->innermost_loop(p);
      if (loop >= 0 && sk.selection.count(loop)) img.at(x, y) = kSelection;
    }
  }
}

void draw_rect(GrayImage& img, const ui::Rect& r, std::uint8_t v, bool filled) {
  const Pixels px{img.width, img.height};
  if (filled) raster::fill_rect(img, px.x(r.u0), px.y(r.v1), px.x(r.u1), px.y(r.v0), v);
  else raster::outline_rect(img, px.x(r.u0), px.y(r.v1), px.x(r.u1), px.y(r.v0), v);
}

void draw_chrome(GrayImage& img, const SimState& st) {
  draw_rect(img, ui::kPlaneIcon, kChrome, st.mode == Mode::PlaneDialog);
  const int rows = 3 + static_cast<int>(st.doc.planes().size());
  for (int r = 0; r < std::min(rows, ui::kMaxTreeRows); ++r) draw_rect(img, ui::tree_row(r), kChrome, false);
  // Tool and mode indicator strip along the top edge.
  const ui::Rect strip{0.60, 0.965, 0.60 + 0.04 * (1 + static_cast<int>(st.active_tool)), 0.985};
  draw_rect(img, strip, st.shift_held ? 20 : kChrome, true);
  const ui::Rect mode{0.85, 0.965, 0.85 + 0.025 * (1 + static_cast<int>(st.mode)), 0.985};
  draw_rect(img, mode, kChrome, false);
}

void draw_dialog(GrayImage& img, const SimState& st) {
  if (st.mode != Mode::PlaneDialog && st.mode != Mode::ExtrudeDialog) return;
  const auto& panel = ui::kDialogPanel;
  draw_rect(img, panel, 250, true);
  draw_rect(img, panel, 0, false);
  std::vector<Field> fields;
  if (st.mode == Mode::PlaneDialog) fields.assign(ui::kPlaneDialogOrder.begin(), ui::kPlaneDialogOrder.end());
  else fields.assign(ui::kExtrudeDialogOrder.begin(), ui::kExtrudeDialogOrder.end());
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const double top = panel.v1 - 0.02 - 0.06 * static_cast<double>(i);
    const ui::Rect row{panel.u0 + 0.01, top - 0.04, panel.u1 - 0.01, top};
    draw_rect(img, row, fields[i] == st.focus ? 200 : 235, true);
    draw_rect(img, row, 90, false);
    bool on = false;
    switch (fields[i]) {
      case Field::SymmetricBox: on = st.extrude_dialog.symmetric; break;
      case Field::MergeBox: on = st.extrude_dialog.merge; break;
      case Field::DirectionArrow: on = st.plane_dialog.flipped; break;
      case Field::DepthField: on = st.extrude_dialog.depth.has_value(); break;
      case Field::SecondDepthField: on = st.extrude_dialog.second_depth.has_value(); break;
      case Field::OffsetField: on = st.plane_dialog.value != 0.0; break;
      case Field::TypeSelector: on = true; break;
      case Field::None: break;
    }
    if (on) {
      const double w = fields[i] == Field::TypeSelector ? 0.03 * (1 + st.extrude_dialog.type_index) : 0.02;
      draw_rect(img, {row.u0 + 0.005, row.v0 + 0.008, row.u0 + 0.005 + w, row.v1 - 0.008}, 30, true);
    }
  }
}

}  // namespace

GrayImage render_canvas(const SimState& st, const FrameConfig& cfg, FrameCache* cache) {
  GrayImage img(cfg.width, cfg.height, kBackground);
  const Pixels px{cfg.width, cfg.height};
  const bool plane_view = !st.camera.isometric;

  if (plane_view) {
    for (int i = 1; i < 10; ++i) {
      const double t = 0.1 * i;
      raster::line(img, px.x(t), 0, px.x(t), cfg.height - 1, kGrid);
      raster::line(img, 0, px.y(t), cfg.width - 1, px.y(t), kGrid);
    }
    if (st.planes_visible) raster::outline_rect(img, px.x(0.03), px.y(0.97), px.x(0.97), px.y(0.03), 200);
  }

  if (st.parts_visible && !st.doc.solid.empty()) {
    FrameCache local;
    FrameCache& c = cache ? *cache : local;
    if (!c.valid || c.solid_id != st.doc.solid.id() || !(c.camera == st.camera) || c.layer.width != cfg.width ||
        c.layer.height != cfg.height) {
      c.layer = kernel::render(st.doc.solid, view_camera(st.camera), cfg.width, cfg.height, 0);
      c.solid_id = st.doc.solid.id();
      c.keep_alive = st.doc.solid;
      c.camera = st.camera;
      c.valid = true;
    }
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
      if (c.layer.pixels[i] != 0) img.pixels[i] = c.layer.pixels[i];
  }

  if (plane_view) {
    if (st.sketches_visible) {
      for (const auto& f : st.doc.features) {
        const auto* sk = std::get_if<SketchFeature>(&f);
        if (!sk || sk->plane_id != st.camera.plane_id) continue;
        for (const auto& loop : sk->geom.loops)
          for (const auto& prim : loop.primitives) stroke_primitive(img, prim, kSketchStroke);
      }
    }
    if (st.active_sketch && st.active_sketch->plane_id == st.camera.plane_id) {
      const auto& sk = *st.active_sketch;
      fill_selection(img, sk);
      for (const auto& loop : sk.loops)
        for (const auto& prim : loop.primitives) stroke_primitive(img, prim, kActiveStroke);
      for (const auto& prim : sk.chain.primitives) stroke_primitive(img, prim, kActiveStroke);
      for (const auto& p : st.pending_clicks)
        raster::fill_rect(img, px.x(p.x()) - 1, px.y(p.y()) - 1, px.x(p.x()) + 1, px.y(p.y()) + 1, kActiveStroke);
    }
  }

  draw_chrome(img, st);
  draw_dialog(img, st);

  const int cx = px.x(st.cursor.x()), cy = px.y(st.cursor.y());
  raster::line(img, cx - 5, cy, cx + 5, cy, 0);
  raster::line(img, cx, cy - 5, cx, cy + 5, 0);
  return img;
}

std::string EpisodeTrace::bytes() const {
  std::string out = completed() ? "completed\n" : "terminated:" + reason + "\n";
  for (const auto& s : steps) {
    for (int v : s.vector) out += std::to_string(v) + ' ';
    out += std::string(to_string(s.result)) + ' ' + s.event + ' ' + s.hl.value_or("-") + '\n';
    out += encode_pgm(s.frame);
  }
  out += "features " + std::to_string(final_doc.features.size()) + '\n';
  return out;
}

EpisodeTrace run_vectors(const std::vector<act::ActionVector>& vectors, const RunConfig& cfg,
                         const std::vector<act::HlEvent>& hl) {
  EpisodeTrace trace;
  SimState st;
  FrameCache cache;
  std::map<std::size_t, std::string> tags;
  for (const auto& e : hl) tags[e.index] = e.tag;
  int failures = 0;
  bool terminated = false;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    auto [next, outcome] = step(st, vectors[i]);
    st = std::move(next);
    failures = outcome.result == StepResult::Ok ? 0 : failures + 1;
    st.retry_count = failures;
    TraceStep ts;
    ts.vector = vectors[i];
    if (auto it = tags.find(i); it != tags.end()) ts.hl = it->second;
    ts.result = outcome.result;
    ts.event = std::move(outcome.event);
    if (cfg.render_frames) ts.frame = render_canvas(st, cfg.frame, &cache);
    trace.steps.push_back(std::move(ts));
    if (failures == 3) {
      terminated = true;
      trace.reason = "3 consecutive failures";
      break;
    }
  }
  trace.final_doc = st.doc;
  if (!terminated && st.eos) {
    trace.status = EpisodeTrace::Status::Completed;
  } else {
    trace.status = EpisodeTrace::Status::Terminated;
    if (!terminated) trace.reason = "program ended without eos";
  }
  return trace;
}

GrayImage frame_after(const std::vector<act::ActionVector>& vectors, std::size_t i, const FrameConfig& cfg) {
  if (i >= vectors.size()) fail(ErrorCode::OutOfRange, "frame index past the end of the episode");
  SimState st;
  int failures = 0;
  for (std::size_t k = 0; k <= i; ++k) {
    auto [next, outcome] = step(st, vectors[k]);
    st = std::move(next);
    failures = outcome.result == StepResult::Ok ? 0 : failures + 1;
    st.retry_count = failures;
  }
  return render_canvas(st, cfg);
}

EpisodeTrace run(const act::ActionProgram& prog, const RunConfig& cfg) {
  return run_vectors(prog.vectors(), cfg, prog.hl_events);
}

}  // namespace cadact::sim

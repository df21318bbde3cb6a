#pragma once

// Headless CAD front end: a pure state machine over action vectors with a
// feature-based document and per-step keyframes.

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "cadact/actions.hpp"
#include "cadact/image.hpp"
#include "cadact/render.hpp"
#include "cadact/solid.hpp"
#include "cadact/ui_layout.hpp"

namespace cadact::sim {

using geo::PixelPoint;

struct PlaneFeature {
  int base_plane = geo::Top;
  double offset = 0.0;
};

struct SketchFeature {
  int plane_id = geo::Top;
  double offset = 0.0;
  geo::SketchGeom geom;
};

struct ExtrudeFeature {
  std::size_t sketch = 0;      // index of the SketchFeature in the feature list
  std::vector<int> faces;      // selected loop indices
  geo::ExtrudeParams params;
  bool merge = false;          // "Merge with all"; a Remove without it changes nothing
};

using Feature = std::variant<PlaneFeature, SketchFeature, ExtrudeFeature>;

struct DocState {
  std::vector<Feature> features;
  kernel::Solid solid;

  std::size_t count_sketches() const;
  std::size_t count_extrusions() const;
  std::vector<const PlaneFeature*> planes() const;
};

// Rebuilds the solid from the feature list. Throws kernel errors.
kernel::Solid replay(const std::vector<Feature>& features);

// Region covered by the selected faces: each selected loop with its holes,
// loops listed twice cancel.
kernel::PlanarRegion extrusion_region(const kernel::PlanarRegion& sketch_region, const std::vector<int>& faces);

enum class Mode { Idle, PlaneDialog, SketchPick, Sketch, ExtrudeDialog };
enum class Tool { None, Line, Circle, Arc, PlaneCreate };

struct CameraView {
  bool isometric = false;
  int plane_id = geo::Top;

  bool operator==(const CameraView&) const = default;
};

struct ActiveSketch {
  int plane_id = geo::Top;
  double offset = 0.0;
  std::vector<geo::LoopGeom> loops;  // closed loops
  geo::LoopGeom chain;               // open chain being drawn
  std::set<int> selection;
  std::shared_ptr<const kernel::PlanarRegion> region;  // of `loops`, built on demand
};

struct PlaneDialogState {
  std::optional<int> base_row;
  double value = 0.0;
  bool flipped = false;
};

struct ExtrudeDialogState {
  int type_index = 0;
  std::optional<double> depth;
  std::optional<double> second_depth;
  bool symmetric = false;
  bool merge = false;
};

struct SimState {
  PixelPoint cursor{0.5, 0.5};
  Mode mode = Mode::Idle;
  Tool active_tool = Tool::None;
  bool shift_held = false;
  bool nav_armed = false;
  ui::Field focus = ui::Field::None;
  std::string text_buffer;
  std::vector<PixelPoint> pending_clicks;
  std::optional<ActiveSketch> active_sketch;
  PlaneDialogState plane_dialog;
  ExtrudeDialogState extrude_dialog;
  double zoom = 1.0;
  CameraView camera{false, geo::Top};
  bool planes_visible = true;
  bool sketches_visible = true;
  bool parts_visible = true;
  int retry_count = 0;
  bool eos = false;
  DocState doc;

  double hit_radius() const { return ui::kHitRadius / zoom; }
};

enum class StepResult { Ok, NoOpWarning, InvalidTransition };

std::string_view to_string(StepResult r);

struct StepOutcome {
  StepResult result = StepResult::Ok;
  std::string event;  // short description of the effect or the failure
};

// Pure transition; on failure the returned state equals the input.
std::pair<SimState, StepOutcome> step(const SimState& st, const act::ActionVector& v);

struct FrameConfig {
  int width = 224;
  int height = 224;
};

// Cache of the last shaded solid layer, keyed by solid identity and view.
struct FrameCache {
  const void* solid_id = nullptr;
  CameraView camera;
  bool valid = false;
  GrayImage layer;
  kernel::Solid keep_alive;
};

GrayImage render_canvas(const SimState& st, const FrameConfig& cfg, FrameCache* cache = nullptr);

// Fixed world-space camera used for the isometric view.
kernel::Camera view_camera(const CameraView& view);

struct RunConfig {
  FrameConfig frame;
  bool render_frames = true;
};

struct TraceStep {
  act::ActionVector vector{};
  GrayImage frame;
  std::optional<std::string> hl;
  StepResult result = StepResult::Ok;
  std::string event;
};

struct EpisodeTrace {
  enum class Status { Completed, Terminated };
  std::vector<TraceStep> steps;
  DocState final_doc;
  Status status = Status::Terminated;
  std::string reason;

  bool completed() const { return status == Status::Completed; }
  // Canonical byte serialization, frames included.
  std::string bytes() const;
};

EpisodeTrace run(const act::ActionProgram& prog, const RunConfig& cfg = {});

// Frame after step i, replayed without rendering the earlier steps.
GrayImage frame_after(const std::vector<act::ActionVector>& vectors, std::size_t i, const FrameConfig& cfg = {});
EpisodeTrace run_vectors(const std::vector<act::ActionVector>& vectors, const RunConfig& cfg = {},
                         const std::vector<act::HlEvent>& hl = {});

}  // namespace cadact::sim

#pragma once

// Dequantization and lowering of extrusion records into canvas-space sketch
// geometry. Canvas coordinates (u, v) live in [0,1]^2 with v pointing up.

#include <Eigen/Dense>
#include <string_view>
#include <variant>
#include <vector>

#include "cadact/sequence.hpp"

namespace cadact::geo {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using PixelPoint = Vec2;

inline constexpr double kCloseEps = 1e-6;
inline constexpr double kCanvasSlack = 1e-9;

inline PixelPoint canvas_center() { return {0.5, 0.5}; }

enum PlaneId : int { Right = 0, Front = 1, Top = 2 };

std::string_view plane_name(int plane_id);

// N(p) = (p - 128) / 128. Throws OutOfRange outside [0,255].
double normalize(int p);

struct PlaneBasis {
  Vec3 n = Vec3::UnitZ();
  Vec3 x_axis = Vec3::UnitX();
  Vec3 y_axis = Vec3::UnitY();
  int plane_id = Top;
  double offset = 0.0;
};

PlaneBasis plane_basis(int theta_q, int phi_q, int gamma_q, int px_q, int py_q, int pz_q);

// Dequantized sketch origin N(p).
Vec3 origin_vector(int px_q, int py_q, int pz_q);

// s = s_q / 256.
double sketch_scale(int s_q);

// Drops component `plane_id`, keeping the remaining two in index order.
Vec2 drop_axis(const Vec3& p, int plane_id);

// Projects an already-normalized in-sketch point.
PixelPoint project_normalized(const Vec2& p_norm, const PlaneBasis& basis, double s, const Vec3& o,
                              const PixelPoint& C = canvas_center());

// Throws OffCanvas when the result leaves the unit canvas.
PixelPoint project_point(int x_q, int y_q, const PlaneBasis& basis, double s, const Vec3& o,
                         const PixelPoint& C = canvas_center());

double circle_radius(int r_q, double s);

struct Line {
  PixelPoint start;
  PixelPoint end;
};

struct Circle {
  PixelPoint center;
  double radius = 0.0;
};

struct Arc {
  PixelPoint start;
  PixelPoint end;
  PixelPoint center;
  PixelPoint mid;
  double radius = 0.0;
  double sweep_deg = 0.0;
  int flag = 1;  // 1 counter-clockwise, 0 clockwise
};

using Primitive = std::variant<Line, Arc, Circle>;

struct LoopGeom {
  std::vector<Primitive> primitives;
};

struct SketchGeom {
  std::vector<LoopGeom> loops;
};

Arc arc_geometry(const PixelPoint& start, const PixelPoint& end, int alpha_q, int f);

// Circumscribed arc through start, mid, end. Throws DegenerateChord when
// the points are (nearly) collinear or coincident.
Arc arc_through(const PixelPoint& start, const PixelPoint& mid, const PixelPoint& end);

// Angle swept from start to end passing through mid, in degrees.
double swept_angle_deg(const Arc& arc);

enum class ExtrudeOp : int { New = 0, Remove = 1, Union = 2 };
enum class ExtrudeSides : int { OneSided = 0, Symmetric = 1, TwoSided = 2 };

std::string_view to_string(ExtrudeOp op);
std::string_view to_string(ExtrudeSides sides);

struct ExtrudeParams {
  double e1 = 0.0;
  double e2 = 0.0;
  ExtrudeOp op = ExtrudeOp::New;
  ExtrudeSides sides = ExtrudeSides::OneSided;
  double scale_s = 0.5;
};

ExtrudeParams extrude_params(int e1_q, int e2_q, int u, int b, int s_q);

struct LoweredRecord {
  PlaneBasis basis;
  SketchGeom sketch;
  ExtrudeParams params;
};

LoweredRecord lower_record(const seq::ExtrusionRecordRaw& rec, const PixelPoint& C = canvas_center());
std::vector<LoweredRecord> lower_sequence(const seq::CadSequence& seq);

// Throws OpenLoop when consecutive endpoints drift apart by more than eps.
void verify_closure(const SketchGeom& sketch, double eps = kCloseEps);

PixelPoint start_point(const Primitive& p);
PixelPoint end_point(const Primitive& p);

// Smallest distance between the points clicked to draw the primitive.
double primitive_extent(const Primitive& p);

// World placement of a canvas point: in-plane axes are the two kept by the
// projection mask (centered on the canvas), depth runs along +axis plane_id.
Vec3 canvas_to_world(const PixelPoint& p, int plane_id, double depth);
PixelPoint world_to_canvas(const Vec3& w, int plane_id);

}  // namespace cadact::geo

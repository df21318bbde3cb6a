#include "cadact/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cadact/error.hpp"

namespace cadact::geo {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_360(double deg) {
  double d = std::fmod(deg, 360.0);
  if (d < 0) d += 360.0;
  return d;
}

double angle_deg(const PixelPoint& c, const PixelPoint& p) { return std::atan2(p.y() - c.y(), p.x() - c.x()) * 180.0 / kPi; }

}  // namespace

std::string_view plane_name(int plane_id) {
  switch (plane_id) {
    case Right: return "Right";
    case Front: return "Front";
    case Top: return "Top";
    default: return "?";
  }
}

double normalize(int p) {
  if (p < 0 || p > 255) fail(ErrorCode::OutOfRange, "quantized value " + std::to_string(p) + " outside [0,255]");
  return (p - 128) / 128.0;
}

Vec3 origin_vector(int px_q, int py_q, int pz_q) { return {normalize(px_q), normalize(py_q), normalize(pz_q)}; }

PlaneBasis plane_basis(int theta_q, int phi_q, int gamma_q, int px_q, int py_q, int pz_q) {
  const double theta = kPi * normalize(theta_q);
  const double phi = kPi * normalize(phi_q);
  const double gamma = kPi * normalize(gamma_q);
  const Vec3 o = origin_vector(px_q, py_q, pz_q);

  PlaneBasis b;
  b.n = Vec3(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta));
  const double len = b.n.norm();
  if (len < 1e-9) fail(ErrorCode::DegenerateNormal, "zero-length sketch normal");
  b.n /= len;
  const Vec3 x0(std::cos(theta) * std::cos(phi), std::cos(theta) * std::sin(phi), -std::sin(theta));
  // Rodrigues rotation of x0 about n; x0 is orthogonal to n so the parallel term vanishes.
  b.x_axis = x0 * std::cos(gamma) + b.n.cross(x0) * std::sin(gamma);
  b.x_axis.normalize();
  b.y_axis = b.n.cross(b.x_axis);

  int id = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(b.n[i]) > std::abs(b.n[id])) id = i;
  b.plane_id = id;
  b.offset = 0.5 * o[id];
  return b;
}

double sketch_scale(int s_q) {
  if (s_q < 1 || s_q > 255) fail(ErrorCode::OutOfRange, "sketch scale " + std::to_string(s_q) + " outside [1,255]");
  return s_q / 256.0;
}

Vec2 drop_axis(const Vec3& p, int plane_id) {
  switch (plane_id) {
    case 0: return {p.y(), p.z()};
    case 1: return {p.x(), p.z()};
    default: return {p.x(), p.y()};
  }
}

PixelPoint project_normalized(const Vec2& p_norm, const PlaneBasis& basis, double s, const Vec3& o, const PixelPoint& C) {
  const Vec3 p_rot = basis.x_axis * (p_norm.x() * s) + basis.y_axis * (p_norm.y() * s) + o;
  return 0.5 * drop_axis(p_rot, basis.plane_id) + C;
}

PixelPoint project_point(int x_q, int y_q, const PlaneBasis& basis, double s, const Vec3& o, const PixelPoint& C) {
  if (!(s > 0)) fail(ErrorCode::OutOfRange, "non-positive sketch scale");
  const PixelPoint p = project_normalized({normalize(x_q), normalize(y_q)}, basis, s, o, C);
  if (!(p.x() >= -kCanvasSlack && p.x() <= 1 + kCanvasSlack && p.y() >= -kCanvasSlack && p.y() <= 1 + kCanvasSlack))
    fail(ErrorCode::OffCanvas, "point (" + std::to_string(p.x()) + ", " + std::to_string(p.y()) + ") leaves the canvas");
  return p;
}

double circle_radius(int r_q, double s) {
  if (r_q < 1 || r_q > 255) fail(ErrorCode::OutOfRange, "circle radius " + std::to_string(r_q) + " outside [1,255]");
  if (!(s > 0)) fail(ErrorCode::OutOfRange, "non-positive sketch scale");
  return r_q / 128.0 * s * 0.5;
}

Arc arc_geometry(const PixelPoint& start, const PixelPoint& end, int alpha_q, int f) {
  if (alpha_q < 1 || alpha_q > 255) fail(ErrorCode::OutOfRange, "arc sweep " + std::to_string(alpha_q) + " outside [1,255]");
  if (f != 0 && f != 1) fail(ErrorCode::OutOfRange, "arc flag must be 0 or 1");
  const double alpha = 180.0 * alpha_q / 128.0;
  if (alpha > 360.0) fail(ErrorCode::ReflexOverflow, "arc sweep exceeds 360 degrees");
  const Vec2 v = end - start;
  const double L = v.norm();
  if (L < 1e-9) fail(ErrorCode::DegenerateChord, "arc start and end coincide");
  const double half = alpha / 2.0 * kPi / 180.0;
  const double r = L / (2.0 * std::sin(half));
  // Signed distance from chord to center; negative past a semicircle.
  const double h = r * std::cos(half);
  const Vec2 v_perp = Vec2(-v.y(), v.x()) / L;
  const PixelPoint chord = (start + end) / 2.0;

  Arc a;
  a.start = start;
  a.end = end;
  a.center = f == 1 ? PixelPoint(chord + h * v_perp) : PixelPoint(chord - h * v_perp);
  a.radius = r;
  a.sweep_deg = alpha;
  a.flag = f;
  const double theta_start = std::atan2(start.y() - a.center.y(), start.x() - a.center.x());
  const double theta_mid = theta_start + (f == 1 ? half : -half);
  a.mid = a.center + r * Vec2(std::cos(theta_mid), std::sin(theta_mid));
  return a;
}

Arc arc_through(const PixelPoint& start, const PixelPoint& mid, const PixelPoint& end) {
  const Vec2 b = mid - start;
  const Vec2 c = end - start;
  const double d = 2.0 * (b.x() * c.y() - b.y() * c.x());
  const double scale = std::max({b.squaredNorm(), c.squaredNorm(), 1e-300});
  if (std::abs(d) < 1e-12 * scale || c.norm() < 1e-12)
    fail(ErrorCode::DegenerateChord, "arc points are collinear or coincident");
  const double ux = (c.y() * b.squaredNorm() - b.y() * c.squaredNorm()) / d;
  const double uy = (b.x() * c.squaredNorm() - c.x() * b.squaredNorm()) / d;
  Arc a;
  a.start = start;
  a.end = end;
  a.mid = mid;
  a.center = start + Vec2(ux, uy);
  a.radius = Vec2(ux, uy).norm();
  a.flag = d > 0 ? 1 : 0;
  a.sweep_deg = swept_angle_deg(a);
  return a;
}

double swept_angle_deg(const Arc& arc) {
  const double s = angle_deg(arc.center, arc.start);
  const double m = angle_deg(arc.center, arc.mid);
  const double e = angle_deg(arc.center, arc.end);
  const double to_mid = wrap_360(m - s);
  const double to_end = wrap_360(e - s);
  if (to_mid <= to_end) return to_end;  // counter-clockwise passes mid first
  return 360.0 - to_end;
}

std::string_view to_string(ExtrudeOp op) {
  switch (op) {
    case ExtrudeOp::New: return "new";
    case ExtrudeOp::Remove: return "remove";
    case ExtrudeOp::Union: return "union";
  }
  return "?";
}

std::string_view to_string(ExtrudeSides sides) {
  switch (sides) {
    case ExtrudeSides::OneSided: return "one-sided";
    case ExtrudeSides::Symmetric: return "symmetric";
    case ExtrudeSides::TwoSided: return "two-sided";
  }
  return "?";
}

ExtrudeParams extrude_params(int e1_q, int e2_q, int u, int b, int s_q) {
  if (u < 0 || u > 2) fail(ErrorCode::OutOfRange, "extrude op " + std::to_string(u) + " outside {0,1,2}");
  if (b < 0 || b > 2) fail(ErrorCode::OutOfRange, "extrude sides " + std::to_string(b) + " outside {0,1,2}");
  ExtrudeParams p;
  p.e1 = 0.5 * normalize(e1_q);
  p.e2 = 0.5 * normalize(e2_q);
  p.op = static_cast<ExtrudeOp>(u);
  p.sides = static_cast<ExtrudeSides>(b);
  p.scale_s = sketch_scale(s_q);
  return p;
}

LoweredRecord lower_record(const seq::ExtrusionRecordRaw& rec, const PixelPoint& C) {
  LoweredRecord out;
  out.basis = plane_basis(rec.theta, rec.phi, rec.gamma, rec.px, rec.py, rec.pz);
  out.params = extrude_params(rec.e1, rec.e2, rec.op, rec.sides, rec.scale);
  const double s = out.params.scale_s;
  const Vec3 o = origin_vector(rec.px, rec.py, rec.pz);

  for (const auto& loop : rec.loops) {
    LoopGeom lg;
    if (loop.primitives.empty()) fail(ErrorCode::OpenLoop, "empty loop");
    std::vector<PixelPoint> ends;
    ends.reserve(loop.primitives.size());
    for (const auto& p : loop.primitives) ends.push_back(project_point(p.x, p.y, out.basis, s, o, C));
    const std::size_t n = loop.primitives.size();
    for (std::size_t i = 0; i < n; ++i) {
      const auto& p = loop.primitives[i];
      // Each curve stores its end point; the start is the previous curve's end.
      const PixelPoint& start = ends[(i + n - 1) % n];
      switch (p.kind) {
        case seq::PrimitiveKind::Line:
          if (n < 2) fail(ErrorCode::OpenLoop, "single-line loop cannot close");
          lg.primitives.push_back(Line{start, ends[i]});
          break;
        case seq::PrimitiveKind::Arc:
          if (n < 2) fail(ErrorCode::OpenLoop, "single-arc loop cannot close");
          lg.primitives.push_back(arc_geometry(start, ends[i], p.alpha, p.flag));
          break;
        case seq::PrimitiveKind::Circle: {
          const double r = circle_radius(p.radius, s);
          const PixelPoint& c = ends[i];
          if (c.x() - r < -kCanvasSlack || c.x() + r > 1 + kCanvasSlack || c.y() - r < -kCanvasSlack ||
              c.y() + r > 1 + kCanvasSlack)
            fail(ErrorCode::OffCanvas, "circle leaves the canvas");
          lg.primitives.push_back(Circle{c, r});
          break;
        }
      }
    }
    out.sketch.loops.push_back(std::move(lg));
  }
  verify_closure(out.sketch);
  return out;
}

std::vector<LoweredRecord> lower_sequence(const seq::CadSequence& seq) {
  std::vector<LoweredRecord> out;
  out.reserve(seq.records.size());
  for (const auto& rec : seq.records) out.push_back(lower_record(rec));
  return out;
}

PixelPoint start_point(const Primitive& p) {
  return std::visit(
      [](const auto& g) -> PixelPoint {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, Circle>)
          return g.center + Vec2(g.radius, 0.0);
        else
          return g.start;
      },
      p);
}

PixelPoint end_point(const Primitive& p) {
  return std::visit(
      [](const auto& g) -> PixelPoint {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, Circle>)
          return g.center + Vec2(g.radius, 0.0);
        else
          return g.end;
      },
      p);
}

double primitive_extent(const Primitive& p) {
  return std::visit(
      [](const auto& g) -> double {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, Line>)
          return (g.end - g.start).norm();
        else if constexpr (std::is_same_v<T, Circle>)
          return g.radius;
        else
          return std::min({(g.end - g.start).norm(), (g.mid - g.start).norm(), (g.end - g.mid).norm()});
      },
      p);
}

void verify_closure(const SketchGeom& sketch, double eps) {
  for (std::size_t l = 0; l < sketch.loops.size(); ++l) {
    const auto& prims = sketch.loops[l].primitives;
    if (prims.empty()) fail(ErrorCode::OpenLoop, "loop " + std::to_string(l) + " is empty");
    if (prims.size() == 1 && std::holds_alternative<Circle>(prims[0])) continue;
    for (std::size_t i = 0; i < prims.size(); ++i) {
      if (std::holds_alternative<Circle>(prims[i]))
        fail(ErrorCode::OpenLoop, "circle mixed into loop " + std::to_string(l));
      const PixelPoint a = end_point(prims[i]);
      const PixelPoint b = start_point(prims[(i + 1) % prims.size()]);
      if ((a - b).norm() > eps)
        fail(ErrorCode::OpenLoop, "loop " + std::to_string(l) + " breaks after primitive " + std::to_string(i));
    }
  }
}

Vec3 canvas_to_world(const PixelPoint& p, int plane_id, double depth) {
  const double a = p.x() - 0.5;
  const double b = p.y() - 0.5;
  switch (plane_id) {
    case 0: return {depth, a, b};
    case 1: return {a, depth, b};
    default: return {a, b, depth};
  }
}

PixelPoint world_to_canvas(const Vec3& w, int plane_id) { return drop_axis(w, plane_id) + Vec2(0.5, 0.5); }

}  // namespace cadact::geo

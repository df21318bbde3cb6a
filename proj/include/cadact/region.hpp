#pragma once

// Planar regions: tessellated closed loops with their containment tree and
// an even-odd membership test.

#include <memory>
#include <vector>

#include "cadact/geometry.hpp"

namespace cadact::kernel {

using geo::Vec2;
using geo::Vec3;

// Maximum segment length used when flattening arcs and circles.
inline constexpr double kTessTol = 1e-3;

using Polygon = std::vector<Vec2>;  // closed implicitly, no repeated end vertex

struct Box2 {
  Vec2 lo{0, 0};
  Vec2 hi{0, 0};

  bool contains(const Vec2& p) const { return p.x() >= lo.x() && p.x() <= hi.x() && p.y() >= lo.y() && p.y() <= hi.y(); }
};

struct LoopNode {
  Polygon polygon;
  double signed_area = 0.0;
  Box2 box;
  int parent = -1;
  int depth = 0;
  std::vector<int> children;
};

class PlanarRegion {
 public:
  PlanarRegion() = default;

  int plane_id() const { return plane_id_; }
  double offset() const { return offset_; }
  const std::vector<LoopNode>& loops() const { return loops_; }
  const Box2& box() const { return box_; }
  std::size_t edge_count() const { return edges_.size(); }

  // Even-odd membership over all loops, in canvas coordinates.
  bool contains(const Vec2& p) const;
  double area() const;

  // Loop containing p with the greatest nesting depth, or -1.
  int innermost_loop(const Vec2& p) const;
  bool loop_contains(int loop, const Vec2& p) const;

  // Distance from p to the nearest boundary edge.
  double boundary_distance(const Vec2& p) const;

  struct Edge {
    Vec2 a;
    Vec2 b;
    int loop = 0;
  };
  const std::vector<Edge>& edges() const { return edges_; }

  friend PlanarRegion region_from_polygons(std::vector<Polygon> polygons, int plane_id, double offset);

 private:
  int plane_id_ = geo::Top;
  double offset_ = 0.0;
  std::vector<LoopNode> loops_;
  std::vector<Edge> edges_;
  Box2 box_;
  // Horizontal bands of edge indices for crossing tests.
  double band_lo_ = 0.0;
  double band_h_ = 1.0;
  std::vector<std::vector<int>> bands_;

  void index_edges();
  bool crossing_parity(const Vec2& p, int only_loop) const;
};

std::vector<Vec2> tessellate(const geo::Primitive& prim, double tol = kTessTol);
Polygon tessellate_loop(const geo::LoopGeom& loop, double tol = kTessTol);

// Throws SelfIntersecting when a loop crosses itself or another loop.
PlanarRegion region_from_polygons(std::vector<Polygon> polygons, int plane_id, double offset);

PlanarRegion build_region(const geo::SketchGeom& geom, int plane_id, double offset, double tol = kTessTol);

double polygon_signed_area(const Polygon& poly);
bool point_in_polygon(const Polygon& poly, const Vec2& p);

// Throws SelfIntersecting if any two non-adjacent edges touch or adjacent
// edges overlap.
void check_simple(const std::vector<Polygon>& polygons);

}  // namespace cadact::kernel

#include "cadact/region.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "cadact/error.hpp"

namespace cadact::kernel {

namespace {

constexpr double kPi = std::numbers::pi;

double orient(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

int sign(double v) { return (v > 0) - (v < 0); }

bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) && std::min(a.y(), b.y()) <= p.y() &&
         p.y() <= std::max(a.y(), b.y());
}

bool segments_touch(const Vec2& p1, const Vec2& p2, const Vec2& p3, const Vec2& p4) {
  const int d1 = sign(orient(p3, p4, p1));
  const int d2 = sign(orient(p3, p4, p2));
  const int d3 = sign(orient(p1, p2, p3));
  const int d4 = sign(orient(p1, p2, p4));
  if (d1 * d2 < 0 && d3 * d4 < 0) return true;
  if (d1 == 0 && on_segment(p3, p4, p1)) return true;
  if (d2 == 0 && on_segment(p3, p4, p2)) return true;
  if (d3 == 0 && on_segment(p1, p2, p3)) return true;
  if (d4 == 0 && on_segment(p1, p2, p4)) return true;
  return false;
}

double segment_distance(const Vec2& a, const Vec2& b, const Vec2& p) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (a + t * ab - p).norm();
}

Box2 polygon_box(const Polygon& poly) {
  Box2 b{poly.front(), poly.front()};
  for (const auto& p : poly) {
    b.lo = b.lo.cwiseMin(p);
    b.hi = b.hi.cwiseMax(p);
  }
  return b;
}

}  // namespace

double polygon_signed_area(const Polygon& poly) {
  double a = 0.0;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % n];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a;
}

bool point_in_polygon(const Polygon& poly, const Vec2& p) {
  bool inside = false;
  for (std::size_t i = 0, n = poly.size(), j = n - 1; i < n; j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

std::vector<Vec2> tessellate(const geo::Primitive& prim, double tol) {
  std::vector<Vec2> pts;
  if (const auto* line = std::get_if<geo::Line>(&prim)) {
    pts = {line->start, line->end};
  } else if (const auto* arc = std::get_if<geo::Arc>(&prim)) {
    const double sweep = arc->sweep_deg * kPi / 180.0;
    int n = std::max(2, static_cast<int>(std::ceil(arc->radius * sweep / tol)));
    n += n % 2;  // even count puts a vertex on the clicked midpoint
    const double t0 = std::atan2(arc->start.y() - arc->center.y(), arc->start.x() - arc->center.x());
    const double dir = arc->flag == 1 ? 1.0 : -1.0;
    pts.reserve(static_cast<std::size_t>(n) + 1);
    pts.push_back(arc->start);
    for (int i = 1; i < n; ++i) {
      if (i * 2 == n) {
        pts.push_back(arc->mid);
        continue;
      }
      const double t = t0 + dir * sweep * i / n;
      pts.push_back(arc->center + arc->radius * Vec2(std::cos(t), std::sin(t)));
    }
    pts.push_back(arc->end);
  } else {
    const auto& c = std::get<geo::Circle>(prim);
    const int n = std::max(8, static_cast<int>(std::ceil(2 * kPi * c.radius / tol)));
    pts.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const double t = 2 * kPi * i / n;
      pts.push_back(c.center + c.radius * Vec2(std::cos(t), std::sin(t)));
    }
  }
  return pts;
}

Polygon tessellate_loop(const geo::LoopGeom& loop, double tol) {
  Polygon out;
  if (loop.primitives.size() == 1 && std::holds_alternative<geo::Circle>(loop.primitives[0]))
    return tessellate(loop.primitives[0], tol);
  for (const auto& prim : loop.primitives) {
    auto pts = tessellate(prim, tol);
    out.insert(out.end(), pts.begin(), pts.end() - 1);
  }
  return out;
}

void check_simple(const std::vector<Polygon>& polygons) {
  struct Seg {
    Vec2 a, b;
    int loop;
    int index;
    int loop_size;
  };
  std::vector<Seg> segs;
  Box2 box{{1e300, 1e300}, {-1e300, -1e300}};
  for (int l = 0; l < static_cast<int>(polygons.size()); ++l) {
    const auto& poly = polygons[static_cast<std::size_t>(l)];
    const int n = static_cast<int>(poly.size());
    if (n < 3 || std::abs(polygon_signed_area(poly)) <= 0.0)
      fail(ErrorCode::SelfIntersecting, "loop " + std::to_string(l) + " is degenerate");
    for (int i = 0; i < n; ++i) {
      segs.push_back({poly[static_cast<std::size_t>(i)], poly[static_cast<std::size_t>((i + 1) % n)], l, i, n});
      box.lo = box.lo.cwiseMin(poly[static_cast<std::size_t>(i)]);
      box.hi = box.hi.cwiseMax(poly[static_cast<std::size_t>(i)]);
    }
  }
  const int g = std::clamp(static_cast<int>(std::sqrt(static_cast<double>(segs.size()))), 1, 256);
  const Vec2 span = (box.hi - box.lo).cwiseMax(Vec2(1e-12, 1e-12));
  auto cell = [&](double v, int axis) {
    return std::clamp(static_cast<int>((v - box.lo[axis]) / span[axis] * g), 0, g - 1);
  };
  std::vector<std::vector<int>> grid(static_cast<std::size_t>(g) * g);
  for (int s = 0; s < static_cast<int>(segs.size()); ++s) {
    const auto& sg = segs[static_cast<std::size_t>(s)];
    const int x0 = cell(std::min(sg.a.x(), sg.b.x()), 0), x1 = cell(std::max(sg.a.x(), sg.b.x()), 0);
    const int y0 = cell(std::min(sg.a.y(), sg.b.y()), 1), y1 = cell(std::max(sg.a.y(), sg.b.y()), 1);
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) grid[static_cast<std::size_t>(y) * g + x].push_back(s);
  }
  for (const auto& bucket : grid) {
    for (std::size_t i = 0; i < bucket.size(); ++i) {
      for (std::size_t j = i + 1; j < bucket.size(); ++j) {
        const Seg& s = segs[static_cast<std::size_t>(bucket[i])];
        const Seg& t = segs[static_cast<std::size_t>(bucket[j])];
        bool adjacent_st = false, adjacent_ts = false;
        if (s.loop == t.loop) {
          adjacent_st = (s.index + 1) % s.loop_size == t.index;  // s.b == t.a
          adjacent_ts = (t.index + 1) % t.loop_size == s.index;  // t.b == s.a
        }
        bool bad;
        if (adjacent_st && adjacent_ts) {
          bad = true;  // two-edge loop
        } else if (adjacent_st) {
          bad = orient(s.a, s.b, t.b) == 0.0 && (s.a - s.b).dot(t.b - s.b) > 0;
        } else if (adjacent_ts) {
          bad = orient(t.a, t.b, s.b) == 0.0 && (t.a - t.b).dot(s.b - t.b) > 0;
        } else {
          bad = segments_touch(s.a, s.b, t.a, t.b);
        }
        if (bad) {
          if (s.loop == t.loop)
            fail(ErrorCode::SelfIntersecting, "loop " + std::to_string(s.loop) + " crosses itself");
          fail(ErrorCode::SelfIntersecting,
               "loops " + std::to_string(s.loop) + " and " + std::to_string(t.loop) + " intersect");
        }
      }
    }
  }
}

PlanarRegion region_from_polygons(std::vector<Polygon> polygons, int plane_id, double offset) {
  check_simple(polygons);
  PlanarRegion r;
  r.plane_id_ = plane_id;
  r.offset_ = offset;
  for (auto& poly : polygons) {
    LoopNode node;
    node.signed_area = polygon_signed_area(poly);
    node.box = polygon_box(poly);
    node.polygon = std::move(poly);
    r.loops_.push_back(std::move(node));
  }
  const int n = static_cast<int>(r.loops_.size());
  // Parent = smallest loop containing a vertex of this one.
  for (int i = 0; i < n; ++i) {
    auto& li = r.loops_[static_cast<std::size_t>(i)];
    double best = 1e300;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const auto& lj = r.loops_[static_cast<std::size_t>(j)];
      const double aj = std::abs(lj.signed_area);
      if (aj <= std::abs(li.signed_area) || aj >= best) continue;
      if (lj.box.contains(li.polygon.front()) && point_in_polygon(lj.polygon, li.polygon.front())) {
        best = aj;
        li.parent = j;
      }
    }
  }
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(r.loops_[static_cast<std::size_t>(a)].signed_area) >
           std::abs(r.loops_[static_cast<std::size_t>(b)].signed_area);
  });
  for (int i : order) {
    auto& li = r.loops_[static_cast<std::size_t>(i)];
    if (li.parent >= 0) {
      li.depth = r.loops_[static_cast<std::size_t>(li.parent)].depth + 1;
      r.loops_[static_cast<std::size_t>(li.parent)].children.push_back(i);
    }
  }
  for (auto& l : r.loops_) std::sort(l.children.begin(), l.children.end());
  r.index_edges();
  return r;
}

PlanarRegion build_region(const geo::SketchGeom& geom, int plane_id, double offset, double tol) {
  geo::verify_closure(geom);
  std::vector<Polygon> polys;
  polys.reserve(geom.loops.size());
  for (const auto& loop : geom.loops) polys.push_back(tessellate_loop(loop, tol));
  return region_from_polygons(std::move(polys), plane_id, offset);
}

void PlanarRegion::index_edges() {
  edges_.clear();
  box_ = Box2{{1e300, 1e300}, {-1e300, -1e300}};
  for (int l = 0; l < static_cast<int>(loops_.size()); ++l) {
    const auto& poly = loops_[static_cast<std::size_t>(l)].polygon;
    for (std::size_t i = 0; i < poly.size(); ++i) edges_.push_back({poly[i], poly[(i + 1) % poly.size()], l});
    box_.lo = box_.lo.cwiseMin(loops_[static_cast<std::size_t>(l)].box.lo);
    box_.hi = box_.hi.cwiseMax(loops_[static_cast<std::size_t>(l)].box.hi);
  }
  const int nb = std::clamp(static_cast<int>(edges_.size() / 8), 1, 4096);
  band_lo_ = box_.lo.y();
  band_h_ = std::max(box_.hi.y() - box_.lo.y(), 1e-12) / nb;
  bands_.assign(static_cast<std::size_t>(nb), {});
  for (int e = 0; e < static_cast<int>(edges_.size()); ++e) {
    const auto& ed = edges_[static_cast<std::size_t>(e)];
    const int b0 = std::clamp(static_cast<int>((std::min(ed.a.y(), ed.b.y()) - band_lo_) / band_h_), 0, nb - 1);
    const int b1 = std::clamp(static_cast<int>((std::max(ed.a.y(), ed.b.y()) - band_lo_) / band_h_), 0, nb - 1);
    for (int b = b0; b <= b1; ++b) bands_[static_cast<std::size_t>(b)].push_back(e);
  }
}

bool PlanarRegion::crossing_parity(const Vec2& p, int only_loop) const {
  if (bands_.empty()) return false;
  const int nb = static_cast<int>(bands_.size());
  const int b = std::clamp(static_cast<int>((p.y() - band_lo_) / band_h_), 0, nb - 1);
  bool inside = false;
  for (int e : bands_[static_cast<std::size_t>(b)]) {
    const auto& ed = edges_[static_cast<std::size_t>(e)];
    if (only_loop >= 0 && ed.loop != only_loop) continue;
    if ((ed.a.y() > p.y()) != (ed.b.y() > p.y())) {
      const double x = ed.a.x() + (p.y() - ed.a.y()) * (ed.b.x() - ed.a.x()) / (ed.b.y() - ed.a.y());
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

bool PlanarRegion::contains(const Vec2& p) const {
  if (!box_.contains(p)) return false;
  return crossing_parity(p, -1);
}

bool PlanarRegion::loop_contains(int loop, const Vec2& p) const {
  if (!loops_[static_cast<std::size_t>(loop)].box.contains(p)) return false;
  return crossing_parity(p, loop);
}

int PlanarRegion::innermost_loop(const Vec2& p) const {
  int best = -1;
  for (int l = 0; l < static_cast<int>(loops_.size()); ++l) {
    if (best >= 0 && loops_[static_cast<std::size_t>(l)].depth <= loops_[static_cast<std::size_t>(best)].depth) continue;
    if (loop_contains(l, p)) best = l;
  }
  return best;
}

double PlanarRegion::area() const {
  double a = 0.0;
  for (const auto& l : loops_) a += (l.depth % 2 == 0 ? 1.0 : -1.0) * std::abs(l.signed_area);
  return a;
}

double PlanarRegion::boundary_distance(const Vec2& p) const {
  double best = 1e300;
  for (const auto& e : edges_) best = std::min(best, segment_distance(e.a, e.b, p));
  return best;
}

}  // namespace cadact::kernel

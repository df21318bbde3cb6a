#include "cadact/solid.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "cadact/error.hpp"
#include "cadact/rng.hpp"

namespace cadact::kernel {

namespace {

using Node = Solid::Node;

Vec3 in_plane_to_world(const Vec2& v, int axis) {
  switch (axis) {
    case 0: return {0.0, v.x(), v.y()};
    case 1: return {v.x(), 0.0, v.y()};
    default: return {v.x(), v.y(), 0.0};
  }
}

bool node_contains(const Node& n, const Vec3& p) {
  if (!n.box.contains(p)) return false;
  switch (n.kind) {
    case Node::Kind::Leaf: return n.prism.contains(p);
    case Node::Kind::Union: return node_contains(*n.left, p) || node_contains(*n.right, p);
    case Node::Kind::Difference: return node_contains(*n.left, p) && !node_contains(*n.right, p);
  }
  return false;
}

void collect_leaves(const Node& n, int sign, std::vector<Solid::SignedPrism>& out) {
  switch (n.kind) {
    case Node::Kind::Leaf: out.push_back({&n.prism, sign}); break;
    case Node::Kind::Union:
      collect_leaves(*n.left, sign, out);
      collect_leaves(*n.right, sign, out);
      break;
    case Node::Kind::Difference:
      collect_leaves(*n.left, sign, out);
      collect_leaves(*n.right, -sign, out);
      break;
  }
}

std::shared_ptr<const Node> leaf(Prism p) {
  auto n = std::make_shared<Node>();
  n->box = p.box();
  n->prism = std::move(p);
  return n;
}

}  // namespace

bool Prism::contains(const Vec3& p) const {
  const int k = axis();
  if (p[k] < lo || p[k] > hi) return false;
  return region->contains(geo::world_to_canvas(p, k));
}

Box3 Prism::box() const {
  const int k = axis();
  const Box2& b = region->box();
  Box3 out;
  out.lo = geo::canvas_to_world(b.lo, k, lo);
  out.hi = geo::canvas_to_world(b.hi, k, hi);
  return out;
}

bool Solid::contains(const Vec3& p) const { return root_ && node_contains(*root_, p); }

Box3 Solid::bounds() const { return root_ ? root_->box : Box3{}; }

Solid Solid::unite(Prism p) const {
  Solid s;
  if (!root_) {
    s.root_ = leaf(std::move(p));
    return s;
  }
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Union;
  n->left = root_;
  n->right = leaf(std::move(p));
  n->box = n->left->box.merged(n->right->box);
  s.root_ = n;
  return s;
}

Solid Solid::subtract(Prism p) const {
  if (!root_) fail(ErrorCode::RemoveFromEmpty, "cannot remove material from an empty solid");
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Difference;
  n->left = root_;
  n->right = leaf(std::move(p));
  n->box = root_->box;
  Solid s;
  s.root_ = n;
  return s;
}

std::vector<Solid::SignedPrism> Solid::leaves() const {
  std::vector<SignedPrism> out;
  if (root_) collect_leaves(*root_, 1, out);
  return out;
}

DepthInterval extrude_interval(const geo::ExtrudeParams& params, double plane_offset) {
  if (std::abs(params.e1) < 1e-12) fail(ErrorCode::ZeroDepth, "extrusion depth is zero");
  double a = plane_offset, b = plane_offset;
  switch (params.sides) {
    case geo::ExtrudeSides::OneSided: b = plane_offset + params.e1; break;
    case geo::ExtrudeSides::Symmetric:
      a = plane_offset - std::abs(params.e1);
      b = plane_offset + std::abs(params.e1);
      break;
    case geo::ExtrudeSides::TwoSided:
      a = plane_offset - params.e2;
      b = plane_offset + params.e1;
      break;
  }
  if (a > b) std::swap(a, b);
  if (b - a < 1e-12) fail(ErrorCode::ZeroDepth, "extrusion interval is empty");
  return {a, b};
}

Solid extrude(const Solid& solid, std::shared_ptr<const PlanarRegion> region, const geo::ExtrudeParams& params,
              double plane_offset) {
  const DepthInterval d = extrude_interval(params, plane_offset);
  Prism p{std::move(region), d.lo, d.hi};
  if (params.op == geo::ExtrudeOp::Remove) return solid.subtract(std::move(p));
  return solid.unite(std::move(p));
}

Solid build_solid(const std::vector<geo::LoweredRecord>& records) {
  Solid s;
  for (const auto& rec : records) {
    auto region = std::make_shared<const PlanarRegion>(build_region(rec.sketch, rec.basis.plane_id, rec.basis.offset));
    s = extrude(s, std::move(region), rec.params, rec.basis.offset);
  }
  return s;
}

std::vector<FaceSample> sample_surface(const Solid& solid, std::size_t n, std::uint64_t seed) {
  if (solid.empty()) fail(ErrorCode::EmptySolid, "solid has no material");
  struct Face {
    const Prism* prism;
    int edge;  // -1 low cap, -2 high cap, otherwise wall edge index
    double area;
  };
  std::vector<Face> faces;
  std::vector<double> cumulative;
  double total = 0.0;
  for (const auto& sp : solid.leaves()) {
    const Prism& p = *sp.prism;
    const double cap = p.region->area();
    const double depth = p.hi - p.lo;
    faces.push_back({&p, -1, cap});
    faces.push_back({&p, -2, cap});
    const auto& edges = p.region->edges();
    for (int e = 0; e < static_cast<int>(edges.size()); ++e)
      faces.push_back({&p, e, (edges[static_cast<std::size_t>(e)].b - edges[static_cast<std::size_t>(e)].a).norm() * depth});
  }
  cumulative.reserve(faces.size());
  for (const auto& f : faces) {
    total += f.area;
    cumulative.push_back(total);
  }
  if (!(total > 0)) fail(ErrorCode::EmptySolid, "solid has no surface area");

  Rng rng(seed);
  std::vector<FaceSample> out;
  out.reserve(n);
  std::size_t attempts = 0;
  while (out.size() < n) {
    if (++attempts > 20000 && out.empty()) fail(ErrorCode::EmptySolid, "no boundary found; solid is empty");
    const double r = rng.uniform() * total;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
    const Face& f = faces[std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), faces.size() - 1)];
    const Prism& p = *f.prism;
    const int k = p.axis();
    Vec3 point, normal;
    if (f.edge < 0) {
      const Box2& b = p.region->box();
      Vec2 q;
      do {
        q = Vec2(rng.uniform(b.lo.x(), b.hi.x()), rng.uniform(b.lo.y(), b.hi.y()));
      } while (!p.region->contains(q));
      point = geo::canvas_to_world(q, k, f.edge == -1 ? p.lo : p.hi);
      normal = Vec3::Zero();
      normal[k] = f.edge == -1 ? -1.0 : 1.0;
    } else {
      const auto& e = p.region->edges()[static_cast<std::size_t>(f.edge)];
      const Vec2 q = e.a + rng.uniform() * (e.b - e.a);
      point = geo::canvas_to_world(q, k, rng.uniform(p.lo, p.hi));
      const Vec2 d = (e.b - e.a).normalized();
      normal = in_plane_to_world(Vec2(d.y(), -d.x()), k);
    }
    if (solid.contains(point + kSurfTol * normal) != solid.contains(point - kSurfTol * normal))
      out.push_back({point, normal});
  }
  return out;
}

PointCloud sample_points(const Solid& solid, std::size_t n, std::uint64_t seed) {
  PointCloud out;
  out.reserve(n);
  for (const auto& s : sample_surface(solid, n, seed)) out.push_back(s.point);
  return out;
}

double monte_carlo_volume(const Solid& solid, std::size_t n, std::uint64_t seed) {
  if (solid.empty() || n == 0) return 0.0;
  const Box3 b = solid.bounds();
  Rng rng(seed);
  std::size_t inside = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 p(rng.uniform(b.lo.x(), b.hi.x()), rng.uniform(b.lo.y(), b.hi.y()), rng.uniform(b.lo.z(), b.hi.z()));
    if (solid.contains(p)) ++inside;
  }
  const Vec3 e = b.extent();
  return e.x() * e.y() * e.z() * static_cast<double>(inside) / static_cast<double>(n);
}

Eigen::Matrix3d SignedPermutation::matrix() const {
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  for (int i = 0; i < 3; ++i) m(i, perm[static_cast<std::size_t>(i)]) = sign[static_cast<std::size_t>(i)];
  return m;
}

std::vector<SignedPermutation> SignedPermutation::all() {
  std::vector<SignedPermutation> out;
  std::array<int, 3> perm{0, 1, 2};
  do {
    for (int mask = 0; mask < 8; ++mask) {
      SignedPermutation t;
      t.perm = perm;
      for (int i = 0; i < 3; ++i) t.sign[static_cast<std::size_t>(i)] = (mask >> i) & 1 ? -1 : 1;
      out.push_back(t);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

Solid transformed(const Solid& solid, const SignedPermutation& t) {
  if (solid.empty()) return solid;
  const Eigen::Matrix3d m = t.matrix();
  std::map<const PlanarRegion*, std::shared_ptr<const PlanarRegion>> cache;
  auto map_prism = [&](const Prism& p) {
    const int k = p.axis();
    int nk = 0;
    for (int i = 0; i < 3; ++i)
      if (t.perm[static_cast<std::size_t>(i)] == k) nk = i;
    const double s = t.sign[static_cast<std::size_t>(nk)];
    auto& region = cache[p.region.get()];
    if (!region) {
      std::vector<Polygon> polys;
      for (const auto& loop : p.region->loops()) {
        Polygon poly;
        poly.reserve(loop.polygon.size());
        for (const auto& v : loop.polygon) poly.push_back(geo::world_to_canvas(m * geo::canvas_to_world(v, k, 0.0), nk));
        polys.push_back(std::move(poly));
      }
      region = std::make_shared<const PlanarRegion>(region_from_polygons(std::move(polys), nk, s * p.region->offset()));
    }
    double lo = s * p.lo, hi = s * p.hi;
    if (lo > hi) std::swap(lo, hi);
    return Prism{region, lo, hi};
  };
  // Rebuild with the same left-deep shape.
  std::vector<std::pair<Node::Kind, const Prism*>> ops;
  const Node* n = solid.root().get();
  while (n->kind != Node::Kind::Leaf) {
    ops.emplace_back(n->kind, &n->right->prism);
    n = n->left.get();
  }
  Solid out = Solid().unite(map_prism(n->prism));
  for (auto it = ops.rbegin(); it != ops.rend(); ++it)
    out = it->first == Node::Kind::Union ? out.unite(map_prism(*it->second)) : out.subtract(map_prism(*it->second));
  return out;
}

}  // namespace cadact::kernel

#include "cadact/topology.hpp"

#include <algorithm>
#include <array>
#include <functional>

#include "cadact/chamfer.hpp"
#include "cadact/error.hpp"

namespace cadact::kernel {

namespace {

struct GridFrame {
  int n[3];
  double origin[3];
  double h[3];

  double center(int axis, int i) const { return origin[axis] + (i + 0.5) * h[axis]; }
};

std::vector<std::uint8_t> eval_node(const Solid::Node& node, const GridFrame& f) {
  const std::size_t total = static_cast<std::size_t>(f.n[0]) * f.n[1] * f.n[2];
  using Kind = Solid::Node::Kind;
  if (node.kind != Kind::Leaf) {
    auto a = eval_node(*node.left, f);
    const auto b = eval_node(*node.right, f);
    for (std::size_t i = 0; i < total; ++i) a[i] = node.kind == Kind::Union ? (a[i] | b[i]) : (a[i] & !b[i]);
    return a;
  }
  std::vector<std::uint8_t> out(total, 0);
  const Prism& p = node.prism;
  const int k = p.axis();
  const int u = k == 0 ? 1 : 0;
  const int v = k == 2 ? 1 : 2;
  // 2D mask over the in-plane axes, then copied across the depth range.
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(f.n[u]) * f.n[v], 0);
  for (int j = 0; j < f.n[v]; ++j)
    for (int i = 0; i < f.n[u]; ++i)
      mask[static_cast<std::size_t>(j) * f.n[u] + i] =
          p.region->contains(Vec2(f.center(u, i) + 0.5, f.center(v, j) + 0.5)) ? 1 : 0;
  int idx[3];
  for (idx[2] = 0; idx[2] < f.n[2]; ++idx[2])
    for (idx[1] = 0; idx[1] < f.n[1]; ++idx[1])
      for (idx[0] = 0; idx[0] < f.n[0]; ++idx[0]) {
        const double d = f.center(k, idx[k]);
        if (d < p.lo || d > p.hi) continue;
        if (mask[static_cast<std::size_t>(idx[v]) * f.n[u] + idx[u]])
          out[(static_cast<std::size_t>(idx[2]) * f.n[1] + idx[1]) * f.n[0] + idx[0]] = 1;
      }
  return out;
}

long count_components(int nx, int ny, int nz, const std::function<bool(int, int, int)>& member, bool full26) {
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(nx) * ny * nz, 0);
  auto id = [&](int x, int y, int z) { return (static_cast<std::size_t>(z) * ny + y) * nx + x; };
  long comps = 0;
  std::vector<std::array<int, 3>> stack;
  for (int z = 0; z < nz; ++z)
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x) {
        if (seen[id(x, y, z)] || !member(x, y, z)) continue;
        ++comps;
        seen[id(x, y, z)] = 1;
        stack.push_back({x, y, z});
        while (!stack.empty()) {
          const auto c = stack.back();
          stack.pop_back();
          for (int dz = -1; dz <= 1; ++dz)
            for (int dy = -1; dy <= 1; ++dy)
              for (int dx = -1; dx <= 1; ++dx) {
                const int manhattan = std::abs(dx) + std::abs(dy) + std::abs(dz);
                if (manhattan == 0 || (!full26 && manhattan != 1)) continue;
                const int X = c[0] + dx, Y = c[1] + dy, Z = c[2] + dz;
                if (X < 0 || Y < 0 || Z < 0 || X >= nx || Y >= ny || Z >= nz) continue;
                if (seen[id(X, Y, Z)] || !member(X, Y, Z)) continue;
                seen[id(X, Y, Z)] = 1;
                stack.push_back({X, Y, Z});
              }
        }
      }
  return comps;
}

}  // namespace

VoxelGrid voxelize(const Solid& solid, int res) {
  if (solid.empty()) fail(ErrorCode::EmptySolid, "nothing to voxelize");
  const Box3 b = solid.bounds();
  GridFrame f{};
  for (int a = 0; a < 3; ++a) {
    f.n[a] = res;
    f.h[a] = std::max(b.hi[a] - b.lo[a], 1e-9) / (res - 2);
    f.origin[a] = b.lo[a] - f.h[a];
  }
  VoxelGrid g;
  g.nx = f.n[0];
  g.ny = f.n[1];
  g.nz = f.n[2];
  g.cells = eval_node(*solid.root(), f);
  return g;
}

Betti voxel_betti(const VoxelGrid& g) {
  const int nx = g.nx, ny = g.ny, nz = g.nz;
  auto occ = [&](int x, int y, int z) { return g.at(x, y, z); };
  long V = 0, E = 0, F = 0, C = 0;
  for (int z = 0; z <= nz; ++z)
    for (int y = 0; y <= ny; ++y)
      for (int x = 0; x <= nx; ++x) {
        bool v = false;
        for (int c = 0; c < 8 && !v; ++c) v = occ(x - (c & 1), y - ((c >> 1) & 1), z - ((c >> 2) & 1));
        V += v;
        if (x < nx) E += occ(x, y - 1, z - 1) || occ(x, y, z - 1) || occ(x, y - 1, z) || occ(x, y, z);
        if (y < ny) E += occ(x - 1, y, z - 1) || occ(x, y, z - 1) || occ(x - 1, y, z) || occ(x, y, z);
        if (z < nz) E += occ(x - 1, y - 1, z) || occ(x, y - 1, z) || occ(x - 1, y, z) || occ(x, y, z);
        if (y < ny && z < nz) F += occ(x - 1, y, z) || occ(x, y, z);
        if (x < nx && z < nz) F += occ(x, y - 1, z) || occ(x, y, z);
        if (x < nx && y < ny) F += occ(x, y, z - 1) || occ(x, y, z);
        if (x < nx && y < ny && z < nz) C += occ(x, y, z);
      }
  Betti b;
  b.euler = V - E + F - C;
  b.b0 = count_components(nx, ny, nz, occ, true);
  const long empty_parts = count_components(nx, ny, nz, [&](int x, int y, int z) { return !occ(x, y, z); }, false);
  b.b2 = empty_parts - 1;
  b.b1 = b.b0 + b.b2 - b.euler;
  return b;
}

int count_through_holes_at(const Solid& solid, int res) { return static_cast<int>(voxel_betti(voxelize(solid, res)).b1); }

std::optional<int> count_through_holes(const Solid& solid) {
  const int coarse = count_through_holes_at(solid, kVoxelCoarse);
  const int fine = count_through_holes_at(solid, kVoxelFine);
  if (coarse != fine) return std::nullopt;
  return coarse;
}

std::array<double, 3> symmetry_scores(const Solid& solid, std::size_t samples, std::uint64_t seed) {
  PointCloud cloud = sample_points(solid, samples, seed);
  Vec3 centroid = Vec3::Zero();
  for (const auto& p : cloud) centroid += p;
  centroid /= static_cast<double>(cloud.size());
  Vec3 lo = cloud.front() - centroid, hi = lo;
  for (auto& p : cloud) {
    p -= centroid;
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double diag = (hi - lo).norm();
  if (diag > 0)
    for (auto& p : cloud) p /= diag;
  std::array<double, 3> out{};
  for (int a = 0; a < 3; ++a) {
    PointCloud mirrored = cloud;
    for (auto& p : mirrored) p[a] = -p[a];
    out[static_cast<std::size_t>(a)] = metrics::chamfer(cloud, mirrored);
  }
  return out;
}

std::vector<std::string> symmetry_planes(const Solid& solid, double tol, std::size_t samples, std::uint64_t seed) {
  const auto scores = symmetry_scores(solid, samples, seed);
  std::vector<std::string> out;
  static const char* names[] = {"x", "y", "z"};
  for (std::size_t a = 0; a < 3; ++a)
    if (scores[a] < tol) out.emplace_back(names[a]);
  return out;
}

}  // namespace cadact::kernel

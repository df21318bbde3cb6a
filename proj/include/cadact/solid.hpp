#pragma once

// Immutable CSG trees of extruded prisms.

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "cadact/region.hpp"

namespace cadact::kernel {

inline constexpr double kSurfTol = 1e-4;

using PointCloud = std::vector<Vec3>;

struct Box3 {
  Vec3 lo{0, 0, 0};
  Vec3 hi{0, 0, 0};

  bool contains(const Vec3& p) const { return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all(); }
  Box3 merged(const Box3& o) const { return {lo.cwiseMin(o.lo), hi.cwiseMax(o.hi)}; }
  Vec3 extent() const { return hi - lo; }
};

struct Prism {
  std::shared_ptr<const PlanarRegion> region;
  double lo = 0.0;
  double hi = 0.0;

  int axis() const { return region->plane_id(); }
  bool contains(const Vec3& p) const;
  Box3 box() const;
  double volume() const { return region->area() * (hi - lo); }
};

class Solid {
 public:
  struct Node {
    enum class Kind { Leaf, Union, Difference };
    Kind kind = Kind::Leaf;
    Prism prism;
    std::shared_ptr<const Node> left;
    std::shared_ptr<const Node> right;
    Box3 box;  // bound of material; difference keeps the left bound
  };

  Solid() = default;

  // True when no material-adding extrusion has been applied.
  bool empty() const { return root_ == nullptr; }
  bool contains(const Vec3& p) const;
  Box3 bounds() const;

  Solid unite(Prism p) const;
  Solid subtract(Prism p) const;

  // Leaves in tree order with their sign (+1 adds material, -1 removes).
  struct SignedPrism {
    const Prism* prism;
    int sign;
  };
  std::vector<SignedPrism> leaves() const;

  const std::shared_ptr<const Node>& root() const { return root_; }

  // Identity of the tree, usable as a cache key.
  const void* id() const { return root_.get(); }

 private:
  std::shared_ptr<const Node> root_;
};

struct DepthInterval {
  double lo = 0.0;
  double hi = 0.0;
};

// Throws ZeroDepth.
DepthInterval extrude_interval(const geo::ExtrudeParams& params, double plane_offset);

// Throws ZeroDepth, RemoveFromEmpty.
Solid extrude(const Solid& solid, std::shared_ptr<const PlanarRegion> region, const geo::ExtrudeParams& params,
              double plane_offset);

// Direct oracle: regions built from each lowered record's sketch.
Solid build_solid(const std::vector<geo::LoweredRecord>& records);

// Surface samples, area weighted over prism faces and kept where membership
// flips across +-kSurfTol. Throws EmptySolid.
PointCloud sample_points(const Solid& solid, std::size_t n, std::uint64_t seed);

struct FaceSample {
  Vec3 point;
  Vec3 normal;
};
// Same sampler, also returning the face normal used for the flip test.
std::vector<FaceSample> sample_surface(const Solid& solid, std::size_t n, std::uint64_t seed);

double monte_carlo_volume(const Solid& solid, std::size_t n, std::uint64_t seed);

// Signed axis permutation: row i of the matrix has +-1 at column perm[i].
struct SignedPermutation {
  std::array<int, 3> perm{0, 1, 2};
  std::array<int, 3> sign{1, 1, 1};

  Eigen::Matrix3d matrix() const;
  static std::vector<SignedPermutation> all();  // 48 entries
};

// Applies the permutation to every prism. Coordinates are centered on the
// canvas, so the result stays inside the unit box.
Solid transformed(const Solid& solid, const SignedPermutation& t);

}  // namespace cadact::kernel

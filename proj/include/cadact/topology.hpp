#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "cadact/solid.hpp"

namespace cadact::kernel {

inline constexpr int kVoxelCoarse = 64;
inline constexpr int kVoxelFine = 96;
inline constexpr double kSymmetryTol = 0.005;

// Occupancy of cell centers on a grid of `res` cells per axis spanning the
// solid's bounds with one empty cell of padding on each side.
struct VoxelGrid {
  int nx = 0, ny = 0, nz = 0;
  std::vector<std::uint8_t> cells;

  bool at(int x, int y, int z) const {
    if (x < 0 || y < 0 || z < 0 || x >= nx || y >= ny || z >= nz) return false;
    return cells[(static_cast<std::size_t>(z) * ny + y) * nx + x] != 0;
  }
};

VoxelGrid voxelize(const Solid& solid, int res);

struct Betti {
  long b0 = 0;
  long b1 = 0;
  long b2 = 0;
  long euler = 0;
};

// Homology of the union of closed occupied cubes.
Betti voxel_betti(const VoxelGrid& grid);

// First Betti number at both resolutions; nullopt when they disagree.
// Throws EmptySolid.
std::optional<int> count_through_holes(const Solid& solid);
int count_through_holes_at(const Solid& solid, int res);

// Chamfer distance between the centered, diagonal-normalized surface cloud
// and its mirror image across each axis plane.
std::array<double, 3> symmetry_scores(const Solid& solid, std::size_t samples = 4096, std::uint64_t seed = 0);

// Mirror planes through the centroid: subset of "x", "y", "z" in order.
// Throws EmptySolid.
std::vector<std::string> symmetry_planes(const Solid& solid, double tol = kSymmetryTol, std::size_t samples = 4096,
                                         std::uint64_t seed = 0);

}  // namespace cadact::kernel

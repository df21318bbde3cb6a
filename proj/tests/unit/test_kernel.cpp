#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "../support/shapes.hpp"
#include "cadact/render.hpp"
#include "cadact/rng.hpp"
#include "cadact/topology.hpp"

using namespace cadact;
using namespace cadact::kernel;
namespace ts = testing_shapes;

namespace {

constexpr double kPi = std::numbers::pi;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Io;
}

geo::SketchGeom sketch(std::initializer_list<geo::LoopGeom> loops) {
  geo::SketchGeom g;
  g.loops = loops;
  return g;
}

Solid washer(int axis = 2) {
  return Solid().unite(ts::prism(sketch({ts::circle_loop(0.5, 0.5, 0.3), ts::circle_loop(0.5, 0.5, 0.12)}), axis, 0.0, 0.1));
}

Solid plate_with_holes() {
  Solid s = Solid().unite(ts::box({-0.4, -0.2, 0.0}, {0.4, 0.2, 0.08}));
  for (double x : {-0.25, 0.0, 0.25}) s = s.subtract(ts::prism(sketch({ts::circle_loop(0.5 + x, 0.5, 0.07)}), 2, -0.1, 0.2));
  return s;
}

}  // namespace

TEST_CASE("circle region area") {
  const auto r = ts::region(sketch({ts::circle_loop(0.5, 0.5, 0.2)}));
  REQUIRE(r->loops().size() == 1);
  CHECK(r->loops()[0].depth == 0);
  const double exact = kPi * 0.04;
  CHECK(std::abs(r->area() - exact) / exact < 0.005);
}

TEST_CASE("tessellation converges quadratically") {
  for (double radius : {0.02, 0.05, 0.2}) {
    const auto g = sketch({ts::circle_loop(0.5, 0.5, radius)});
    const double exact = kPi * radius * radius;
    const double e1 = std::abs(build_region(g, 2, 0.0, 4e-3).area() - exact);
    const double e2 = std::abs(build_region(g, 2, 0.0, 2e-3).area() - exact);
    CHECK(e1 / e2 >= 3.0);
  }
}

TEST_CASE("annulus containment tree") {
  const auto r = ts::region(sketch({ts::rect_loop(0.2, 0.2, 0.8, 0.8), ts::circle_loop(0.5, 0.5, 0.1)}));
  REQUIRE(r->loops().size() == 2);
  CHECK(r->loops()[0].depth == 0);
  CHECK(r->loops()[1].depth == 1);
  CHECK(r->loops()[1].parent == 0);
  CHECK(r->loops()[0].children == std::vector<int>{1});
  CHECK(r->contains({0.25, 0.25}));
  CHECK_FALSE(r->contains({0.5, 0.5}));
  CHECK(r->innermost_loop({0.5, 0.5}) == 1);
  CHECK(r->innermost_loop({0.25, 0.25}) == 0);
  CHECK(r->innermost_loop({0.1, 0.1}) == -1);
  CHECK(r->area() == doctest::Approx(0.36 - kPi * 0.01).epsilon(1e-4));
}

TEST_CASE("self intersections rejected") {
  using geo::Line;
  const geo::LoopGeom bowtie{{Line{{0.2, 0.2}, {0.4, 0.4}}, Line{{0.4, 0.4}, {0.4, 0.2}}, Line{{0.4, 0.2}, {0.2, 0.4}},
                              Line{{0.2, 0.4}, {0.2, 0.2}}}};
  CHECK(code_of([&] { build_region(sketch({bowtie}), 2, 0.0); }) == ErrorCode::SelfIntersecting);
  CHECK(code_of([&] {
          build_region(sketch({ts::circle_loop(0.4, 0.5, 0.1), ts::circle_loop(0.55, 0.5, 0.1)}), 2, 0.0);
        }) == ErrorCode::SelfIntersecting);
  const geo::LoopGeom fold{{Line{{0.2, 0.2}, {0.4, 0.2}}, Line{{0.4, 0.2}, {0.3, 0.2}}, Line{{0.3, 0.2}, {0.2, 0.2}}}};
  CHECK(code_of([&] { build_region(sketch({fold}), 2, 0.0); }) == ErrorCode::SelfIntersecting);
}

TEST_CASE("extrude intervals") {
  geo::ExtrudeParams p;
  p.e1 = 0.2;
  CHECK(extrude_interval(p, 0.1).lo == doctest::Approx(0.1));
  CHECK(extrude_interval(p, 0.1).hi == doctest::Approx(0.3));
  p.e1 = -0.2;
  CHECK(extrude_interval(p, 0.1).lo == doctest::Approx(-0.1));
  CHECK(extrude_interval(p, 0.1).hi == doctest::Approx(0.1));
  p.sides = geo::ExtrudeSides::Symmetric;
  CHECK(extrude_interval(p, 0.0).lo == doctest::Approx(-0.2));
  CHECK(extrude_interval(p, 0.0).hi == doctest::Approx(0.2));
  p.sides = geo::ExtrudeSides::TwoSided;
  p.e1 = 0.2;
  p.e2 = 0.05;
  CHECK(extrude_interval(p, 0.0).lo == doctest::Approx(-0.05));
  CHECK(extrude_interval(p, 0.0).hi == doctest::Approx(0.2));
  p.e1 = 0.0;
  CHECK(code_of([&] { extrude_interval(p, 0.0); }) == ErrorCode::ZeroDepth);
  geo::ExtrudeParams cut;
  cut.e1 = 0.1;
  cut.op = geo::ExtrudeOp::Remove;
  CHECK(code_of([&] { extrude(Solid(), ts::region(sketch({ts::circle_loop(0.5, 0.5, 0.1)})), cut, 0.0); }) ==
        ErrorCode::RemoveFromEmpty);
}

TEST_CASE("cuboid membership and volume") {
  const Solid s = Solid().unite(ts::box({-0.2, -0.1, 0.0}, {0.2, 0.1, 0.3}));
  CHECK(s.contains({0.0, 0.0, 0.15}));
  CHECK_FALSE(s.contains({0.5, 0.0, 0.15}));
  CHECK_FALSE(s.contains({0.0, 0.0, -0.01}));
  const double v = monte_carlo_volume(s, 100000, 1);
  CHECK(std::abs(v - 0.4 * 0.2 * 0.3) / (0.4 * 0.2 * 0.3) < 0.01);
}

TEST_CASE("union idempotence and concentric cut") {
  const Prism outer = ts::box({-0.2, -0.2, 0.0}, {0.2, 0.2, 0.2});
  const Prism inner = ts::box({-0.1, -0.1, 0.0}, {0.1, 0.1, 0.2});
  const Solid a = Solid().unite(outer);
  const Solid aa = a.unite(outer);
  const double va = monte_carlo_volume(a, 100000, 2);
  CHECK(std::abs(monte_carlo_volume(aa, 100000, 2) - va) / va < 0.01);
  const Solid cut = a.subtract(inner);
  const double expect = 0.4 * 0.4 * 0.2 - 0.2 * 0.2 * 0.2;
  CHECK(std::abs(monte_carlo_volume(cut, 100000, 3) - expect) / expect < 0.01);
}

TEST_CASE("membership agrees with analytic annulus away from the surface") {
  const Solid s = washer();
  Rng rng(8);
  int agree = 0, total = 0;
  while (total < 20000) {
    const Vec3 p(rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4), rng.uniform(-0.05, 0.15));
    const double r = std::hypot(p.x(), p.y());
    const double margin = std::min({std::abs(r - 0.3), std::abs(r - 0.12), std::abs(p.z()), std::abs(p.z() - 0.1)});
    if (margin <= kSurfTol) continue;
    const bool truth = r < 0.3 && r > 0.12 && p.z() > 0 && p.z() < 0.1;
    agree += truth == s.contains(p);
    ++total;
  }
  CHECK(agree >= total * 999 / 1000);
}

TEST_CASE("cuboid face sampling is area proportional") {
  const Solid s = Solid().unite(ts::box({-0.25, -0.25, 0.0}, {0.25, 0.25, 0.5}));
  const auto cloud = sample_points(s, 6000, 0);
  int faces[6] = {0, 0, 0, 0, 0, 0};
  for (const auto& p : cloud) {
    if (std::abs(p.x() + 0.25) < 1e-9) ++faces[0];
    else if (std::abs(p.x() - 0.25) < 1e-9) ++faces[1];
    else if (std::abs(p.y() + 0.25) < 1e-9) ++faces[2];
    else if (std::abs(p.y() - 0.25) < 1e-9) ++faces[3];
    else if (std::abs(p.z()) < 1e-9) ++faces[4];
    else if (std::abs(p.z() - 0.5) < 1e-9) ++faces[5];
  }
  const double sigma = std::sqrt(6000.0 * (1.0 / 6) * (5.0 / 6));
  for (int f : faces) CHECK(std::abs(f - 1000.0) <= 3 * sigma);
  CHECK(sample_points(s, 500, 9) == sample_points(s, 500, 9));
}

TEST_CASE("samples satisfy the surface invariant") {
  const Solid s = plate_with_holes();
  for (const auto& f : sample_surface(s, 2000, 5))
    CHECK(s.contains(f.point + kSurfTol * f.normal) != s.contains(f.point - kSurfTol * f.normal));
}

TEST_CASE("fully removed solid is empty") {
  const Prism b = ts::box({-0.1, -0.1, 0.0}, {0.1, 0.1, 0.1});
  const Solid s = Solid().unite(b).subtract(ts::box({-0.2, -0.2, -0.1}, {0.2, 0.2, 0.2}));
  CHECK(code_of([&] { sample_points(s, 100, 0); }) == ErrorCode::EmptySolid);
  CHECK(code_of([&] { render_isometric(Solid()); }) == ErrorCode::EmptySolid);
  CHECK(code_of([&] { render_isometric(s); }) == ErrorCode::EmptySolid);
}

TEST_CASE("isometric cuboid has three shades") {
  const Solid s = Solid().unite(ts::box({-0.2, -0.2, -0.2}, {0.2, 0.2, 0.2}));
  const GrayImage img = render_isometric(s, 128);
  std::set<int> levels;
  for (auto p : img.pixels)
    if (p != 255) levels.insert(p);
  CHECK(levels.size() == 3);
  CHECK(render_isometric(s, 128) == img);
}

TEST_CASE("silhouette matches projected bounds and scales with area") {
  const Camera cam = isometric_camera();
  auto silhouette = [&](double half, int& x0, int& x1, int& y0, int& y1) {
    const Solid s = Solid().unite(ts::box({-half, -half, -half}, {half, half, half}));
    const GrayImage img = render(s, cam, 200, 200);
    x0 = y0 = 1 << 30;
    x1 = y1 = -1;
    std::size_t count = 0;
    for (int j = 0; j < 200; ++j)
      for (int i = 0; i < 200; ++i)
        if (img.at(i, j) != 255) {
          ++count;
          x0 = std::min(x0, i);
          x1 = std::max(x1, i);
          y0 = std::min(y0, j);
          y1 = std::max(y1, j);
        }
    return count;
  };
  int x0, x1, y0, y1;
  const auto small = silhouette(0.1, x0, x1, y0, y1);
  // Projected corners of the cube, in pixels.
  double px0 = 1e9, px1 = -1e9, py0 = 1e9, py1 = -1e9;
  for (int c = 0; c < 8; ++c) {
    const Vec3 v((c & 1) ? 0.1 : -0.1, (c & 2) ? 0.1 : -0.1, (c & 4) ? 0.1 : -0.1);
    const double x = v.dot(cam.right) / (2 * cam.half_extent) * 200 + 100;
    const double y = 100 - v.dot(cam.up) / (2 * cam.half_extent) * 200;
    px0 = std::min(px0, x);
    px1 = std::max(px1, x);
    py0 = std::min(py0, y);
    py1 = std::max(py1, y);
  }
  CHECK(std::abs(x0 - px0) <= 1.0);
  CHECK(std::abs(x1 + 1 - px1) <= 1.0);
  CHECK(std::abs(y0 - py0) <= 1.0);
  CHECK(std::abs(y1 + 1 - py1) <= 1.0);
  const auto big = silhouette(0.2, x0, x1, y0, y1);
  CHECK(std::abs(static_cast<double>(big) / small - 4.0) / 4.0 < 0.02);
}

TEST_CASE("through holes") {
  const Solid cube = Solid().unite(ts::box({-0.2, -0.2, -0.2}, {0.2, 0.2, 0.2}));
  CHECK(count_through_holes(cube) == std::optional<int>(0));
  CHECK(count_through_holes(washer()) == std::optional<int>(1));
  CHECK(count_through_holes_at(plate_with_holes(), kVoxelCoarse) == 3);
  CHECK(count_through_holes_at(plate_with_holes(), kVoxelFine) == 3);
  // A blind pocket is a cavity-free dent, not a tunnel.
  const Solid pocket = cube.subtract(ts::prism(sketch({ts::circle_loop(0.5, 0.5, 0.08)}), 2, 0.0, 0.3));
  CHECK(count_through_holes(pocket) == std::optional<int>(0));
  const Solid cavity = cube.subtract(ts::box({-0.05, -0.05, -0.05}, {0.05, 0.05, 0.05}));
  const auto b = voxel_betti(voxelize(cavity, 64));
  CHECK(b.b0 == 1);
  CHECK(b.b1 == 0);
  CHECK(b.b2 == 1);
}

TEST_CASE("hole counts survive axis permutations") {
  const Solid s = plate_with_holes();
  const Solid w = washer(0);
  for (const auto& t : SignedPermutation::all()) {
    if ((t.perm[0] + t.sign[0] + t.sign[2]) % 3 != 0) continue;  // a spread subset keeps the test quick
    CHECK(count_through_holes(transformed(s, t)) == std::optional<int>(3));
    CHECK(count_through_holes(transformed(w, t)) == std::optional<int>(1));
  }
}

TEST_CASE("symmetry planes") {
  const Solid cube = Solid().unite(ts::box({-0.3, -0.2, -0.1}, {0.3, 0.2, 0.1}));
  CHECK(symmetry_planes(cube) == std::vector<std::string>{"x", "y", "z"});
  const Solid cyl = Solid().unite(ts::prism(sketch({ts::circle_loop(0.5, 0.5, 0.2)}), 2, 0.0, 0.3));
  CHECK(symmetry_planes(cyl) == std::vector<std::string>{"x", "y", "z"});
  const Solid bracket =
      Solid().unite(ts::box({-0.3, -0.1, 0.0}, {0.3, 0.1, 0.05})).unite(ts::box({-0.3, -0.1, 0.0}, {-0.25, 0.1, 0.3}));
  CHECK(symmetry_planes(bracket) == std::vector<std::string>{"y"});
}

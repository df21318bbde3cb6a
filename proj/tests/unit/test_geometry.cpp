#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "../support/tokens.hpp"
#include "cadact/geometry.hpp"
#include "cadact/rng.hpp"

using namespace cadact;
using namespace cadact::geo;
namespace tt = testing_tokens;

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

// Frame built from composed elementary rotations instead of closed forms.
Eigen::Matrix3d euler_frame(int tq, int pq, int gq) {
  const double t = kPi * (tq - 128) / 128.0, p = kPi * (pq - 128) / 128.0, g = kPi * (gq - 128) / 128.0;
  return (Eigen::AngleAxisd(p, Vec3::UnitZ()) * Eigen::AngleAxisd(t, Vec3::UnitY()) * Eigen::AngleAxisd(g, Vec3::UnitZ()))
      .toRotationMatrix();
}

// Signed angle from a to b around c, degrees in (-180, 180].
double turn(const Vec2& c, const Vec2& a, const Vec2& b) {
  const Vec2 u = a - c, v = b - c;
  return std::atan2(u.x() * v.y() - u.y() * v.x(), u.dot(v)) * 180.0 / kPi;
}

}  // namespace

TEST_CASE("normalize") {
  CHECK(normalize(128) == 0.0);
  CHECK(normalize(0) == -1.0);
  CHECK(normalize(255) == 0.9921875);
  CHECK(code_of([] { normalize(256); }) == ErrorCode::OutOfRange);
  CHECK(code_of([] { normalize(-1); }) == ErrorCode::OutOfRange);
  for (int k = 0; k <= 127; ++k) CHECK(normalize(128 + k) == -normalize(128 - k));
  for (int p = 0; p < 255; ++p) CHECK(normalize(p) < normalize(p + 1));
}

TEST_CASE("plane basis examples") {
  const auto b = plane_basis(128, 128, 128, 128, 128, 128);
  CHECK(b.n.isApprox(Vec3(0, 0, 1)));
  CHECK(b.plane_id == Top);
  CHECK(b.offset == 0.0);
  const auto c = plane_basis(128, 128, 128, 128, 128, 192);
  CHECK(c.offset == 0.25);
  CHECK(plane_basis(192, 128, 128, 128, 128, 128).plane_id == Right);
  CHECK(plane_basis(192, 192, 128, 128, 128, 128).plane_id == Front);
}

TEST_CASE("plane basis matches composed rotations") {
  Rng rng(3);
  for (int i = 0; i < 2000; ++i) {
    const int t = static_cast<int>(rng.uniform_int(0, 255)), p = static_cast<int>(rng.uniform_int(0, 255)),
              g = static_cast<int>(rng.uniform_int(0, 255));
    const auto b = plane_basis(t, p, g, 128, 128, 128);
    const Eigen::Matrix3d r = euler_frame(t, p, g);
    CHECK((b.x_axis - r.col(0)).norm() < 1e-12);
    CHECK((b.y_axis - r.col(1)).norm() < 1e-12);
    CHECK((b.n - r.col(2)).norm() < 1e-12);
    CHECK(std::abs(b.n.dot(b.x_axis)) <= 1e-9);
    CHECK(std::abs(b.n.dot(b.y_axis)) <= 1e-9);
    CHECK(std::abs(b.x_axis.dot(b.y_axis)) <= 1e-9);
    Eigen::Matrix3d m;
    m << b.x_axis, b.y_axis, b.n;
    CHECK(std::abs(m.determinant() - 1.0) <= 1e-9);
  }
}

TEST_CASE("plane id ties go to the lowest axis") {
  // theta = pi/2, phi = pi/4: |n_x| == |n_y|.
  const auto b = plane_basis(192, 160, 128, 128, 128, 128);
  CHECK(std::abs(std::abs(b.n.x()) - std::abs(b.n.y())) < 1e-12);
  CHECK(b.plane_id == Right);
}

TEST_CASE("project point examples") {
  const auto top = plane_basis(128, 128, 128, 128, 128, 128);
  const Vec2 p = project_point(128, 128, top, 0.7, Vec3::Zero());
  CHECK(p.x() == 0.5);
  CHECK(p.y() == 0.5);
  const Vec2 q = project_point(255, 128, top, 0.5, Vec3::Zero());
  CHECK(q.x() == doctest::Approx(0.748046875).epsilon(1e-15));
  CHECK(q.y() == 0.5);
  CHECK(code_of([&] { project_point(255, 255, top, 0.5, Vec3(1, 1, 0)); }) == ErrorCode::OffCanvas);
}

TEST_CASE("project point equals 3D construction then orthographic drop") {
  Rng rng(9);
  for (int i = 0; i < 2000; ++i) {
    const int t = static_cast<int>(rng.uniform_int(0, 255)), ph = static_cast<int>(rng.uniform_int(0, 255)),
              g = static_cast<int>(rng.uniform_int(0, 255));
    const auto b = plane_basis(t, ph, g, 128, 128, 128);
    const Vec3 o(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3));
    const double s = rng.uniform(0.1, 0.5);
    const int xq = static_cast<int>(rng.uniform_int(0, 255)), yq = static_cast<int>(rng.uniform_int(0, 255));
    const Eigen::Matrix3d r = euler_frame(t, ph, g);
    const Vec3 world = r * Vec3((xq - 128) / 128.0 * s, (yq - 128) / 128.0 * s, 0.0) + o;
    Vec2 expect;
    int k = 0;
    for (int a = 0; a < 3; ++a)
      if (a != b.plane_id) expect[k++] = world[a];
    expect = 0.5 * expect + Vec2(0.5, 0.5);
    const Vec2 got = project_normalized({normalize(xq), normalize(yq)}, b, s, o);
    CHECK((got - expect).norm() <= 1e-12);
  }
}

TEST_CASE("circle radius") {
  CHECK(circle_radius(128, 1.0) == 0.5);
  CHECK(circle_radius(64, 0.5) == 0.125);
  CHECK(code_of([] { circle_radius(0, 1.0); }) == ErrorCode::OutOfRange);
}

TEST_CASE("arc closed forms") {
  const Vec2 s(0.3, 0.4), e(0.5, 0.4);
  const Arc semi = arc_geometry(s, e, 128, 1);
  CHECK(semi.radius == doctest::Approx(0.1).epsilon(1e-12));
  CHECK((semi.center - Vec2(0.4, 0.4)).norm() < 1e-12);

  const Arc quarter = arc_geometry(Vec2(0.4, 0.5), Vec2(0.6, 0.5), 64, 1);
  CHECK(quarter.radius == doctest::Approx(0.14142135623730950).epsilon(1e-12));
  const double h = std::abs(quarter.center.y() - 0.5);
  CHECK(h == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(quarter.center.y() > 0.5);  // f=1 offsets along +v_perp
  CHECK(arc_geometry(Vec2(0.4, 0.5), Vec2(0.6, 0.5), 64, 0).center.y() < 0.5);

  CHECK(code_of([] { arc_geometry(Vec2(0.5, 0.5), Vec2(0.5, 0.5), 64, 1); }) == ErrorCode::DegenerateChord);
  CHECK(code_of([] { arc_geometry(Vec2(0.4, 0.5), Vec2(0.5, 0.5), 0, 1); }) == ErrorCode::OutOfRange);
}

TEST_CASE("arc radial consistency and sweep recovery") {
  Rng rng(21);
  for (int i = 0; i < 10000; ++i) {
    const Vec2 s(rng.uniform(0.2, 0.8), rng.uniform(0.2, 0.8));
    Vec2 e;
    do {
      e = Vec2(rng.uniform(0.2, 0.8), rng.uniform(0.2, 0.8));
    } while ((e - s).norm() < 1e-3);
    const int aq = static_cast<int>(rng.uniform_int(1, 255));
    const int f = static_cast<int>(rng.uniform_int(0, 1));
    const Arc a = arc_geometry(s, e, aq, f);
    CHECK(std::abs((a.start - a.center).norm() - a.radius) <= 1e-9);
    CHECK(std::abs((a.mid - a.center).norm() - a.radius) <= 1e-9);
    CHECK(std::abs((a.end - a.center).norm() - a.radius) <= 1e-9);
    const double alpha = 180.0 * aq / 128.0;
    const double acc = turn(a.center, a.start, a.mid) + turn(a.center, a.mid, a.end);
    CHECK(std::abs(std::abs(acc) - alpha) <= 1e-6);
    CHECK((acc > 0) == (f == 1));
    CHECK(std::abs(swept_angle_deg(a) - alpha) <= 1e-6);
  }
}

TEST_CASE("three point arc recovers lowered arc") {
  Rng rng(4);
  for (int i = 0; i < 500; ++i) {
    const Vec2 s(rng.uniform(0.3, 0.7), rng.uniform(0.3, 0.7));
    const Vec2 e = s + Vec2(rng.uniform(0.05, 0.2), rng.uniform(-0.2, 0.2));
    const Arc a = arc_geometry(s, e, static_cast<int>(rng.uniform_int(8, 250)), static_cast<int>(rng.uniform_int(0, 1)));
    const Arc b = arc_through(a.start, a.mid, a.end);
    CHECK((b.center - a.center).norm() < 1e-9);
    CHECK(b.flag == a.flag);
    CHECK(b.sweep_deg == doctest::Approx(a.sweep_deg).epsilon(1e-9));
  }
  CHECK(code_of([] { arc_through(Vec2(0, 0), Vec2(0.5, 0.5), Vec2(1, 1)); }) == ErrorCode::DegenerateChord);
}

TEST_CASE("extrude params") {
  CHECK(extrude_params(192, 128, 0, 0, 128).e1 == 0.25);
  CHECK(extrude_params(128, 128, 0, 0, 128).e1 == 0.0);
  const auto p = extrude_params(160, 128, 1, 1, 128);
  CHECK(p.op == ExtrudeOp::Remove);
  CHECK(p.sides == ExtrudeSides::Symmetric);
  CHECK(p.e1 == 0.125);
  CHECK(p.scale_s == 0.5);
  CHECK(code_of([] { extrude_params(160, 128, 3, 0, 128); }) == ErrorCode::OutOfRange);
  CHECK(code_of([] { extrude_params(160, 128, 0, 3, 128); }) == ErrorCode::OutOfRange);
}

TEST_CASE("lower unit square") {
  auto toks = tt::square(64, 192);
  toks.push_back(tt::ext({}));
  const auto seq = seq::parse_sequence(tt::seq(toks));
  const auto low = lower_record(seq.records[0]);
  REQUIRE(low.sketch.loops.size() == 1);
  const auto& prims = low.sketch.loops[0].primitives;
  REQUIRE(prims.size() == 4);
  const auto basis = plane_basis(128, 128, 128, 128, 128, 128);
  const std::vector<Vec2> corners = {project_point(192, 64, basis, 0.5, Vec3::Zero()),
                                     project_point(192, 192, basis, 0.5, Vec3::Zero()),
                                     project_point(64, 192, basis, 0.5, Vec3::Zero()),
                                     project_point(64, 64, basis, 0.5, Vec3::Zero())};
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& l = std::get<Line>(prims[i]);
    CHECK((l.end - corners[i]).norm() < 1e-15);
    CHECK((l.start - corners[(i + 3) % 4]).norm() < 1e-15);
  }
  CHECK((corners[1] - corners[0]).norm() == doctest::Approx(0.25));
  CHECK(((corners[0] + corners[2]) / 2 - canvas_center()).norm() < 1e-15);
}

TEST_CASE("lower circle and closure failures") {
  const auto seq = seq::parse_sequence(tt::seq({tt::circle(128, 128, 64), tt::ext({})}));
  const auto low = lower_record(seq.records[0]);
  REQUIRE(low.sketch.loops.size() == 1);
  CHECK(std::holds_alternative<Circle>(low.sketch.loops[0].primitives[0]));
  CHECK(std::get<Circle>(low.sketch.loops[0].primitives[0]).radius == 0.125);

  SketchGeom broken;
  broken.loops.push_back({{Line{{0.1, 0.1}, {0.2, 0.1}}, Line{{0.2, 0.1}, {0.2, 0.2}}, Line{{0.2, 0.2}, {0.1, 0.1 + 1e-5}}}});
  CHECK(code_of([&] { verify_closure(broken); }) == ErrorCode::OpenLoop);
  std::get<Line>(broken.loops[0].primitives[2]).end = {0.1, 0.1 + 1e-7};
  CHECK_NOTHROW(verify_closure(broken));
}

TEST_CASE("canvas world mapping round trips") {
  for (int k = 0; k < 3; ++k) {
    const Vec2 p(0.3, 0.8);
    const Vec3 w = canvas_to_world(p, k, 0.17);
    CHECK(w[k] == 0.17);
    CHECK((world_to_canvas(w, k) - p).norm() < 1e-15);
  }
}

#pragma once

// Orthographic ray-interval renderer for CSG solids.

#include "cadact/image.hpp"
#include "cadact/solid.hpp"

namespace cadact::kernel {

struct Camera {
  Vec3 right = Vec3::UnitX();
  Vec3 up = Vec3::UnitY();
  Vec3 dir = -Vec3::UnitZ();  // viewing direction, into the scene
  Vec3 center = Vec3::Zero();
  double half_extent = 0.5;  // world distance from frame center to edge
};

// Looking along -(1,1,1)/sqrt(3) with +z projecting upward.
Camera isometric_camera();

// Orthographic view whose screen axes match the sketch canvas of the plane.
Camera plane_camera(int plane_id);

// Re-centers and scales so the material fills `fill` of the frame.
Camera fit_camera(Camera cam, const Solid& solid, double fill = 0.9);

// Shaded solid pixels are written over `img`; other pixels stay untouched.
// Returns the number of pixels covered.
std::size_t render_into(GrayImage& img, const Solid& solid, const Camera& cam);

GrayImage render(const Solid& solid, const Camera& cam, int width, int height, std::uint8_t background = 255);

// Fitted isometric render. Throws EmptySolid.
GrayImage render_isometric(const Solid& solid, int res = 224);

// Gray level used for a face with unit normal n.
std::uint8_t shade(const Vec3& n, const Vec3& view_dir);

}  // namespace cadact::kernel

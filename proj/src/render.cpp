#include "cadact/render.hpp"

#include <algorithm>
#include <cmath>

#include "cadact/error.hpp"

namespace cadact::kernel {

namespace {

struct Fragment {
  std::uint32_t pixel;
  double t;
  float nx, ny, nz;
};

struct Projector {
  const Camera& cam;
  int w, h;
  double depth0;

  Projector(const Camera& c, int width, int height) : cam(c), w(width), h(height), depth0(c.center.dot(c.dir) - 10.0) {}

  // Pixel-space x, y and ray depth t of a world point.
  Vec3 operator()(const Vec3& v) const {
    const Vec3 d = v - cam.center;
    const double s = std::min(w, h);
    const double x = d.dot(cam.right) / (2 * cam.half_extent) * s + 0.5 * w;
    const double y = 0.5 * h - d.dot(cam.up) / (2 * cam.half_extent) * s;
    return {x, y, v.dot(cam.dir) - depth0};
  }

  Vec3 ray_origin(int i, int j) const {
    const double s = std::min(w, h);
    const double x = ((i + 0.5) - 0.5 * w) / s * 2 * cam.half_extent;
    const double y = (0.5 * h - (j + 0.5)) / s * 2 * cam.half_extent;
    return cam.center + cam.right * x + cam.up * y - cam.dir * 10.0;
  }
};

double edge_fn(const Vec3& a, const Vec3& b, double px, double py) {
  return (b.x() - a.x()) * (py - a.y()) - (b.y() - a.y()) * (px - a.x());
}

void raster_triangle(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& n, int w, int h,
                     std::vector<Fragment>& out) {
  const double area = edge_fn(a, b, c.x(), c.y());
  if (std::abs(area) < 1e-12) return;
  const int x0 = std::max(0, static_cast<int>(std::floor(std::min({a.x(), b.x(), c.x()}) - 0.5)));
  const int x1 = std::min(w - 1, static_cast<int>(std::ceil(std::max({a.x(), b.x(), c.x()}))));
  const int y0 = std::max(0, static_cast<int>(std::floor(std::min({a.y(), b.y(), c.y()}) - 0.5)));
  const int y1 = std::min(h - 1, static_cast<int>(std::ceil(std::max({a.y(), b.y(), c.y()}))));
  constexpr double eps = 1e-7;
  for (int j = y0; j <= y1; ++j) {
    for (int i = x0; i <= x1; ++i) {
      const double px = i + 0.5, py = j + 0.5;
      const double w0 = edge_fn(b, c, px, py) / area;
      const double w1 = edge_fn(c, a, px, py) / area;
      const double w2 = edge_fn(a, b, px, py) / area;
      if (w0 < -eps || w1 < -eps || w2 < -eps) continue;
      const double t = w0 * a.z() + w1 * b.z() + w2 * c.z();
      out.push_back({static_cast<std::uint32_t>(j * w + i), t, static_cast<float>(n.x()), static_cast<float>(n.y()),
                     static_cast<float>(n.z())});
    }
  }
}

Vec3 in_plane(const Vec2& v, int axis) {
  switch (axis) {
    case 0: return {0.0, v.x(), v.y()};
    case 1: return {v.x(), 0.0, v.y()};
    default: return {v.x(), v.y(), 0.0};
  }
}

}  // namespace

Camera isometric_camera() {
  Camera c;
  c.dir = -Vec3(1, 1, 1).normalized();
  c.up = (Vec3::UnitZ() - c.dir * c.dir.z()).normalized();
  c.right = c.dir.cross(c.up);
  return c;
}

Camera plane_camera(int plane_id) {
  Camera c;
  c.right = in_plane({1, 0}, plane_id);
  c.up = in_plane({0, 1}, plane_id);
  c.dir = -c.right.cross(c.up);
  c.center = Vec3::Zero();
  c.half_extent = 0.5;
  return c;
}

Camera fit_camera(Camera cam, const Solid& solid, double fill) {
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& sp : solid.leaves()) {
    if (sp.sign < 0) continue;
    const Prism& p = *sp.prism;
    for (const auto& e : p.region->edges()) {
      for (double d : {p.lo, p.hi}) {
        const Vec3 v = geo::canvas_to_world(e.a, p.axis(), d);
        const double x = v.dot(cam.right), y = v.dot(cam.up);
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
      }
    }
  }
  if (xmin > xmax) return cam;
  const double along = cam.center.dot(cam.dir);
  cam.center = cam.right * (0.5 * (xmin + xmax)) + cam.up * (0.5 * (ymin + ymax)) + cam.dir * along;
  const double half = 0.5 * std::max(xmax - xmin, ymax - ymin);
  cam.half_extent = half > 1e-12 ? half / fill : 0.5;
  return cam;
}

std::uint8_t shade(const Vec3& n, const Vec3& view_dir) {
  static const Vec3 light = Vec3(0.3, 0.5, 0.8).normalized();
  Vec3 f = n;
  if (f.dot(view_dir) > 0) f = -f;
  const double lambert = std::max(0.0, f.dot(light));
  return static_cast<std::uint8_t>(std::lround(40.0 + 180.0 * lambert));
}

std::size_t render_into(GrayImage& img, const Solid& solid, const Camera& cam) {
  if (solid.empty()) return 0;
  const int w = img.width, h = img.height;
  const Projector proj(cam, w, h);
  std::vector<Fragment> frags;
  const auto leaves = solid.leaves();

  for (const auto& sp : leaves) {
    const Prism& p = *sp.prism;
    const int k = p.axis();
    for (const auto& e : p.region->edges()) {
      const Vec3 a0 = proj(geo::canvas_to_world(e.a, k, p.lo));
      const Vec3 b0 = proj(geo::canvas_to_world(e.b, k, p.lo));
      const Vec3 b1 = proj(geo::canvas_to_world(e.b, k, p.hi));
      const Vec3 a1 = proj(geo::canvas_to_world(e.a, k, p.hi));
      const Vec2 d = (e.b - e.a).normalized();
      const Vec3 n = in_plane(Vec2(d.y(), -d.x()), k);
      raster_triangle(a0, b0, b1, n, w, h, frags);
      raster_triangle(a0, b1, a1, n, w, h, frags);
    }
  }

  // Caps: intersect each pixel ray with the two cap planes analytically.
  for (const auto& sp : leaves) {
    const Prism& p = *sp.prism;
    const int k = p.axis();
    if (std::abs(cam.dir[k]) < 1e-12) continue;
    const Box3 box = p.box();
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (int c = 0; c < 8; ++c) {
      const Vec3 v((c & 1) ? box.hi.x() : box.lo.x(), (c & 2) ? box.hi.y() : box.lo.y(), (c & 4) ? box.hi.z() : box.lo.z());
      const Vec3 q = proj(v);
      xmin = std::min(xmin, q.x());
      xmax = std::max(xmax, q.x());
      ymin = std::min(ymin, q.y());
      ymax = std::max(ymax, q.y());
    }
    const int i0 = std::max(0, static_cast<int>(std::floor(xmin)) - 1), i1 = std::min(w - 1, static_cast<int>(std::ceil(xmax)));
    const int j0 = std::max(0, static_cast<int>(std::floor(ymin)) - 1), j1 = std::min(h - 1, static_cast<int>(std::ceil(ymax)));
    for (int j = j0; j <= j1; ++j) {
      for (int i = i0; i <= i1; ++i) {
        const Vec3 o = proj.ray_origin(i, j);
        for (double depth : {p.lo, p.hi}) {
          const double t = (depth - o[k]) / cam.dir[k];
          const Vec3 hit = o + cam.dir * t;
          if (!p.region->contains(geo::world_to_canvas(hit, k))) continue;
          Vec3 n = Vec3::Zero();
          n[k] = 1.0;
          frags.push_back({static_cast<std::uint32_t>(j * w + i), t, static_cast<float>(n.x()), static_cast<float>(n.y()),
                           static_cast<float>(n.z())});
        }
      }
    }
  }

  std::sort(frags.begin(), frags.end(), [](const Fragment& a, const Fragment& b) {
    if (a.pixel != b.pixel) return a.pixel < b.pixel;
    return a.t < b.t;
  });

  std::size_t covered = 0;
  for (std::size_t s = 0; s < frags.size();) {
    std::size_t e = s;
    while (e < frags.size() && frags[e].pixel == frags[s].pixel) ++e;
    const int i = static_cast<int>(frags[s].pixel % static_cast<std::uint32_t>(w));
    const int j = static_cast<int>(frags[s].pixel / static_cast<std::uint32_t>(w));
    const Vec3 o = proj.ray_origin(i, j);
    for (std::size_t f = s; f + 1 < e; ++f) {
      const double gap = frags[f + 1].t - frags[f].t;
      if (gap < 1e-9) continue;
      if (solid.contains(o + cam.dir * (frags[f].t + 0.5 * gap))) {
        img.at(i, j) = shade(Vec3(frags[f].nx, frags[f].ny, frags[f].nz), cam.dir);
        ++covered;
        break;
      }
    }
    s = e;
  }
  return covered;
}

GrayImage render(const Solid& solid, const Camera& cam, int width, int height, std::uint8_t background) {
  GrayImage img(width, height, background);
  render_into(img, solid, cam);
  return img;
}

GrayImage render_isometric(const Solid& solid, int res) {
  if (solid.empty()) fail(ErrorCode::EmptySolid, "nothing to render");
  GrayImage img(res, res, 255);
  if (render_into(img, solid, fit_camera(isometric_camera(), solid)) == 0)
    fail(ErrorCode::EmptySolid, "solid renders no pixels");
  return img;
}

}  // namespace cadact::kernel

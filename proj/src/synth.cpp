#include "cadact/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "cadact/actions.hpp"
#include "cadact/error.hpp"
#include "cadact/region.hpp"
#include "cadact/solid.hpp"

namespace cadact::synth {

namespace {

using geo::PixelPoint;
using geo::Vec2;
using seq::LoopSpec;
using seq::PrimitiveKind;
using seq::PrimitiveSpec;

PrimitiveSpec L(int x, int y) { return {PrimitiveKind::Line, x, y}; }
PrimitiveSpec A(int x, int y, int alpha, int flag) { return {PrimitiveKind::Arc, x, y, alpha, flag}; }
PrimitiveSpec C(int x, int y, int r) { return {PrimitiveKind::Circle, x, y, seq::kUnused, seq::kUnused, r}; }

struct QBox {
  int lx, ly, hx, hy;
  int w() const { return hx - lx; }
  int h() const { return hy - ly; }
};

int pick(Rng& rng, int lo, int hi) { return static_cast<int>(rng.uniform_int(lo, std::max(lo, hi))); }

LoopSpec rect(const QBox& b) { return {{L(b.hx, b.ly), L(b.hx, b.hy), L(b.lx, b.hy), L(b.lx, b.ly)}}; }

LoopSpec outer_profile(Rng& rng, const QBox& b) {
  const int mx = b.lx + b.w() / 2 + pick(rng, -b.w() / 6, b.w() / 6);
  const int my = b.ly + b.h() / 2 + pick(rng, -b.h() / 6, b.h() / 6);
  switch (rng.uniform_int(0, 5)) {
    case 0: return rect(b);
    case 1: {
      const int r = std::min(b.w(), b.h()) / 2;
      return {{C(b.lx + b.w() / 2, b.ly + b.h() / 2, r)}};
    }
    case 2: return {{L(b.hx, b.ly), L(b.hx, b.hy), A(b.lx, b.hy, pick(rng, 22, 142), pick(rng, 0, 1)), L(b.lx, b.ly)}};
    case 3: return {{L(b.hx, b.ly), L(b.hx, my), L(mx, my), L(mx, b.hy), L(b.lx, b.hy), L(b.lx, b.ly)}};
    case 4: return {{L(b.hx, b.ly), L(mx, b.hy), L(b.lx, b.ly)}};
    default: {
      const int flag = pick(rng, 0, 1);
      const int cap = b.h() / 2;
      return {{L(b.hx - cap, b.ly), A(b.hx - cap, b.hy, 128, flag), L(b.lx + cap, b.hy), A(b.lx + cap, b.ly, 128, flag)}};
    }
  }
}

LoopSpec hole(Rng& rng, const QBox& inner) {
  if (rng.coin(0.6)) {
    const int rmax = std::min(inner.w(), inner.h()) / 2;
    const int r = rng.coin(0.25) ? pick(rng, 3, 6) : pick(rng, std::max(3, rmax / 3), rmax);
    const int cx = pick(rng, inner.lx + r, inner.hx - r);
    const int cy = pick(rng, inner.ly + r, inner.hy - r);
    return {{C(cx, cy, r)}};
  }
  const int w = pick(rng, std::max(6, inner.w() / 3), inner.w());
  const int h = pick(rng, std::max(6, inner.h() / 3), inner.h());
  const int x = pick(rng, inner.lx, inner.hx - w);
  const int y = pick(rng, inner.ly, inner.hy - h);
  return rect({x, y, x + w, y + h});
}

std::vector<LoopSpec> sketch_loops(Rng& rng) {
  std::vector<LoopSpec> loops;
  const bool two = rng.coin(0.2);
  const int n = two ? 2 : 1;
  const int lo = 24, hi = 232;
  const int slot_w = (hi - lo) / n;
  for (int i = 0; i < n; ++i) {
    const int x0 = lo + i * slot_w;
    const int w = pick(rng, 48, slot_w - 8);
    const int h = pick(rng, 48, hi - lo);
    const int lx = pick(rng, x0, x0 + slot_w - 8 - w);
    const int ly = pick(rng, lo, hi - h);
    const QBox b{lx, ly, lx + w, ly + h};
    loops.push_back(outer_profile(rng, b));
    const int holes = static_cast<int>(rng.uniform_int(0, 2));
    const int margin = 12;
    QBox inner{b.lx + margin, b.ly + margin, b.hx - margin, b.hy - margin};
    if (inner.w() < 12 || inner.h() < 12) continue;
    if (holes == 1) {
      loops.push_back(hole(rng, inner));
    } else if (holes == 2 && inner.w() >= 30) {
      const int split = inner.lx + inner.w() / 2;
      loops.push_back(hole(rng, {inner.lx, inner.ly, split - 3, inner.hy}));
      loops.push_back(hole(rng, {split + 3, inner.ly, inner.hx, inner.hy}));
    }
  }
  return loops;
}

int away_from_center(Rng& rng, int lo, int hi) {
  int q = 128;
  while (std::abs(q - 128) < 8) q = pick(rng, lo, hi);
  return q;
}

seq::ExtrusionRecordRaw random_record(Rng& rng, bool first) {
  seq::ExtrusionRecordRaw r;
  static constexpr std::array<std::array<int, 2>, 4> kOrient = {{{128, 128}, {0, 128}, {192, 192}, {192, 128}}};
  const auto& o = kOrient[rng.index(kOrient.size())];
  r.theta = o[0];
  r.phi = o[1];
  r.gamma = static_cast<int>(64 * rng.uniform_int(0, 3));
  const auto basis = geo::plane_basis(r.theta, r.phi, r.gamma, 128, 128, 128);
  const int off = rng.coin(0.4) ? away_from_center(rng, 72, 184) : 128;
  (basis.plane_id == 0 ? r.px : basis.plane_id == 1 ? r.py : r.pz) = off;
  r.scale = pick(rng, 150, 250);
  r.loops = sketch_loops(rng);
  r.op = first ? 0 : (rng.coin(0.6) ? 2 : 1);
  r.sides = static_cast<int>(rng.uniform_int(0, 2));
  if (r.sides == 2) {
    r.e1 = pick(rng, 140, 230);
    r.e2 = pick(rng, 140, 230);
  } else {
    r.e1 = away_from_center(rng, 30, 230);
  }
  return r;
}

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double t = std::clamp((p - a).dot(ab) / std::max(ab.squaredNorm(), 1e-300), 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

double polygon_gap(const kernel::Polygon& p, const kernel::Polygon& q) {
  double best = 1e300;
  for (const auto& v : p)
    for (std::size_t j = 0; j < q.size(); ++j) best = std::min(best, segment_distance(v, q[j], q[(j + 1) % q.size()]));
  return best;
}

PixelPoint binned(const PixelPoint& p) {
  return {act::unbin_unit(act::bin_unit(p.x())), act::unbin_unit(act::bin_unit(p.y()))};
}

[[noreturn]] void reject(const std::string& why) { fail(ErrorCode::UnsupportedGeometry, why); }

}  // namespace

void check_drawable(const geo::LoweredRecord& rec, const SynthConfig& cfg) {
  for (const auto& loop : rec.sketch.loops) {
    std::vector<std::pair<int, int>> bins;
    for (const auto& prim : loop.primitives) {
      if (const auto* l = std::get_if<geo::Line>(&prim)) {
        if ((l->end - l->start).norm() < 0.01) reject("short line");
      } else if (const auto* a = std::get_if<geo::Arc>(&prim)) {
        const double chord = (a->end - a->start).norm();
        const double sag = a->radius * (1.0 - std::cos(a->sweep_deg / 2.0 * M_PI / 180.0));
        if (a->sweep_deg < 30.0 || a->sweep_deg > 200.0 || chord < 0.02 || sag < 0.004) reject("arc out of bounds");
        const auto redrawn = geo::arc_through(binned(a->start), binned(a->mid), binned(a->end));
        if (std::abs(redrawn.sweep_deg - a->sweep_deg) > 2.0) reject("arc unstable at bin resolution");
      } else {
        const auto& c = std::get<geo::Circle>(prim);
        if (c.radius < 0.006) reject("tiny circle");
        bool fits = false;
        for (const Vec2& d : {Vec2(1, 0), Vec2(-1, 0), Vec2(0, 1), Vec2(0, -1)}) {
          const PixelPoint p = c.center + c.radius * d;
          fits |= p.x() >= 0 && p.x() <= 1 && p.y() >= 0 && p.y() <= 1;
        }
        if (!fits) reject("circle radius point off canvas");
      }
      const PixelPoint e = geo::end_point(prim);
      bins.emplace_back(act::bin_unit(e.x()), act::bin_unit(e.y()));
    }
    std::sort(bins.begin(), bins.end());
    if (std::adjacent_find(bins.begin(), bins.end()) != bins.end()) reject("vertices share a bin");
  }

  const auto region = kernel::build_region(rec.sketch, rec.basis.plane_id, rec.basis.offset);
  const auto& loops = region.loops();
  for (std::size_t i = 0; i < loops.size(); ++i)
    for (std::size_t j = i + 1; j < loops.size(); ++j)
      if (polygon_gap(loops[i].polygon, loops[j].polygon) < cfg.min_loop_gap) reject("loops too close");

  for (int l = 0; l < static_cast<int>(loops.size()); ++l) {
    const auto& node = loops[static_cast<std::size_t>(l)];
    if (node.depth % 2 != 0) continue;
    double best = 0.0;
    constexpr int kGrid = 32;
    for (int j = 0; j < kGrid && best < cfg.min_face_clearance; ++j) {
      for (int i = 0; i < kGrid; ++i) {
        const PixelPoint p(node.box.lo.x() + (i + 0.5) / kGrid * (node.box.hi.x() - node.box.lo.x()),
                           node.box.lo.y() + (j + 0.5) / kGrid * (node.box.hi.y() - node.box.lo.y()));
        if (!region.loop_contains(l, p)) continue;
        bool in_child = false;
        for (int c : node.children) in_child |= region.loop_contains(c, p);
        if (!in_child) best = std::max(best, region.boundary_distance(p));
      }
    }
    if (best < cfg.min_face_clearance) reject("face too thin");
  }
}

seq::CadSequence generate_sequence(Rng& rng, const SynthConfig& cfg, std::string source_id) {
  seq::CadSequence out;
  out.source_id = std::move(source_id);
  const int n = static_cast<int>(rng.uniform_int(cfg.min_records, cfg.max_records));
  std::vector<geo::LoweredRecord> lowered;
  for (int k = 0; k < n; ++k) {
    bool placed = false;
    for (int attempt = 0; attempt < cfg.max_attempts && !placed; ++attempt) {
      auto rec = random_record(rng, k == 0);
      try {
        auto low = geo::lower_record(rec);
        check_drawable(low, cfg);
        auto trial = lowered;
        trial.push_back(low);
        const auto solid = kernel::build_solid(trial);
        (void)kernel::sample_points(solid, 64, 0);
        out.records.push_back(std::move(rec));
        lowered = std::move(trial);
        placed = true;
      } catch (const Error&) {
      }
    }
    if (!placed) fail(ErrorCode::UnsupportedGeometry, "could not place record " + std::to_string(k));
  }
  return out;
}

seq::CadSequence generate_sequence(std::uint64_t seed, const SynthConfig& cfg) {
  Rng rng(Rng::mix(seed));
  return generate_sequence(rng, cfg, "synth-" + std::to_string(seed));
}

}  // namespace cadact::synth

#include "cadact/vqa.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <json.hpp>

#include "cadact/error.hpp"
#include "cadact/geometry.hpp"
#include "cadact/region.hpp"
#include "cadact/render.hpp"
#include "cadact/topology.hpp"

namespace cadact::vqa {

namespace {

struct FamilyInfo {
  Family family;
  const char* name;
  std::size_t choices;
};

constexpr std::array<FamilyInfo, kFamilyCount> kFamilies = {{
    {Family::ExtrusionShapePrediction, "extrusion_shape_prediction", 4},
    {Family::ExtrusionCount, "extrusion_count", 4},
    {Family::ExtrusionDepthComparison, "extrusion_depth_comparison", 2},
    {Family::SketchOrdering, "sketch_ordering", 6},
    {Family::SketchIdentification, "sketch_identification", 4},
    {Family::PlaneIdentification, "plane_identification", 3},
    {Family::PrimitiveIdentification, "primitive_identification", 3},
    {Family::SequencePrediction, "sequence_prediction", 3},
    {Family::FrameSequencing, "frame_sequencing", 6},
    {Family::HoleDetection, "hole_detection", 2},
    {Family::SymmetryDetection, "symmetry_detection", 8},
}};

const FamilyInfo& info(Family f) { return kFamilies[static_cast<std::size_t>(f)]; }

}  // namespace

const std::array<Family, kFamilyCount>& all_families() {
  static const std::array<Family, kFamilyCount> fams = [] {
    std::array<Family, kFamilyCount> a{};
    for (std::size_t i = 0; i < kFamilyCount; ++i) a[i] = kFamilies[i].family;
    return a;
  }();
  return fams;
}

std::string_view family_name(Family f) { return info(f).name; }

std::optional<Family> family_from_name(std::string_view name) {
  for (const auto& fi : kFamilies)
    if (name == fi.name) return fi.family;
  return std::nullopt;
}

std::size_t choice_count(Family f) { return info(f).choices; }
double chance_level(Family f) { return 1.0 / static_cast<double>(choice_count(f)); }

// ---------------------------------------------------------------------------
// Oracle renders

GrayImage render_sketch(const seq::ExtrusionRecordRaw& record, int res) {
  const auto low = geo::lower_record(record);
  GrayImage img(res, res, 255);
  for (const auto& loop : low.sketch.loops) {
    for (const auto& prim : loop.primitives) {
      auto pts = kernel::tessellate(prim, 2.0 / res);
      if (std::holds_alternative<geo::Circle>(prim)) pts.push_back(pts.front());
      for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        raster::line(img, raster::to_px(pts[i].x(), res), raster::to_py(pts[i].y(), res), raster::to_px(pts[i + 1].x(), res),
                     raster::to_py(pts[i + 1].y(), res), 0);
    }
  }
  return img;
}

GrayImage render_solid(const kernel::Solid& solid, int res) {
  kernel::Camera cam = kernel::isometric_camera();
  cam.half_extent = 1.0;
  return kernel::render(solid, cam, res, res, 255);
}

kernel::Solid solid_after(const seq::CadSequence& seq, std::size_t records) {
  std::vector<geo::LoweredRecord> low;
  for (std::size_t i = 0; i < std::min(records, seq.records.size()); ++i) low.push_back(geo::lower_record(seq.records[i]));
  return kernel::build_solid(low);
}

double effective_depth(const seq::ExtrusionRecordRaw& record) {
  const auto p = geo::extrude_params(record.e1, record.e2, record.op, record.sides, record.scale);
  switch (p.sides) {
    case geo::ExtrudeSides::OneSided: return std::abs(p.e1);
    case geo::ExtrudeSides::Symmetric: return 2.0 * std::abs(p.e1);
    case geo::ExtrudeSides::TwoSided: return std::abs(p.e1) + std::abs(p.e2);
  }
  return 0.0;
}

namespace {

[[noreturn]] void unmet(const std::string& why) { fail(ErrorCode::PrerequisiteUnmet, why); }

std::string join(const std::vector<std::string>& parts, const char* sep = ",") {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

struct Builder {
  Question q;
  Rng& rng;
  std::string prefix;

  Builder(Family f, const Episode& ep, Rng& r, std::uint64_t seed) : rng(r) {
    q.family = f;
    q.provenance.episode = ep.id;
    q.provenance.seed = seed;
    prefix = ep.id + "-" + std::string(family_name(f)) + "-" + std::to_string(seed) + "-";
  }

  std::string add_image(const std::string& tag, GrayImage img) {
    const std::string name = prefix + tag;
    q.images[name] = std::move(img);
    return name;
  }

  void asset(const std::string& tag, GrayImage img) { q.assets.push_back(add_image(tag, std::move(img))); }

  // Shuffles (choice, correct) pairs into place.
  Question finish(std::vector<std::pair<std::string, bool>> items, bool images) {
    rng.shuffle(items);
    q.choices.clear();
    for (std::size_t i = 0; i < items.size(); ++i) {
      q.choices.push_back(items[i].first);
      if (items[i].second) q.answer_index = static_cast<int>(i);
    }
    q.choices_are_images = images;
    return std::move(q);
  }
};

std::vector<std::vector<int>> permutations3() {
  std::vector<std::vector<int>> out;
  std::vector<int> p{0, 1, 2};
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

std::string order_label(const std::vector<int>& display_order) {
  std::vector<std::string> parts;
  for (int d : display_order) parts.push_back(std::to_string(d + 1));
  return join(parts);
}

// Display labels (1-based) listed from first built to last.
std::vector<std::pair<std::string, bool>> ordering_choices(const std::vector<int>& rank_of_display) {
  std::vector<int> truth(3);
  for (int d = 0; d < 3; ++d) truth[static_cast<std::size_t>(rank_of_display[static_cast<std::size_t>(d)])] = d;
  std::vector<std::pair<std::string, bool>> items;
  for (const auto& p : permutations3()) items.emplace_back(order_label(p), p == truth);
  return items;
}

std::string primitive_kind_of_tag(const std::string& tag) {
  if (tag.rfind("primitive:", 0) == 0) return tag.substr(10);
  return tag;
}

// hl steps tagged with a primitive or an extrusion, in order.
std::vector<std::pair<std::size_t, std::string>> drawing_events(const Episode& ep) {
  std::vector<std::pair<std::size_t, std::string>> out;
  for (const auto& e : ep.hl)
    if (e.tag.rfind("primitive:", 0) == 0 || e.tag == "extrude") out.emplace_back(e.index, primitive_kind_of_tag(e.tag));
  return out;
}

std::vector<std::size_t> extrude_steps(const Episode& ep) {
  std::vector<std::size_t> out;
  for (const auto& e : ep.hl)
    if (e.tag == "extrude") out.push_back(e.index);
  return out;
}

GrayImage frame_at(const Episode& ep, std::size_t step) {
  if (!ep.frame) unmet("episode has no frames");
  return ep.frame(step);
}

std::string plane_label(int id) { return std::string(geo::plane_name(id)); }

const std::vector<std::string>& symmetry_labels() {
  static const std::vector<std::string> labels = {"none", "x", "y", "z", "x,y", "x,z", "y,z", "x,y,z"};
  return labels;
}

std::string symmetry_label(const std::vector<std::string>& planes) { return planes.empty() ? "none" : join(planes); }

// ---------------------------------------------------------------------------
// Families

Question shape_prediction(Builder& b, const Episode& ep) {
  const auto& recs = ep.sequence.records;
  std::vector<std::size_t> order;
  for (std::size_t k = 1; k < recs.size(); ++k) order.push_back(k);
  b.rng.shuffle(order);
  for (std::size_t k : order) {
    std::vector<geo::LoweredRecord> low;
    for (std::size_t i = 0; i <= k; ++i) low.push_back(geo::lower_record(recs[i]));
    auto variant = [&](auto edit) {
      auto copy = low;
      edit(copy.back().params);
      return render_solid(kernel::build_solid(copy));
    };
    std::vector<GrayImage> imgs;
    try {
      imgs.push_back(render_solid(kernel::build_solid(low)));
      imgs.push_back(variant([](geo::ExtrudeParams& p) { p.e1 *= 0.5, p.e2 *= 0.5; }));
      imgs.push_back(variant([](geo::ExtrudeParams& p) { p.e1 *= 2.0, p.e2 *= 2.0; }));
      imgs.push_back(variant([](geo::ExtrudeParams& p) {
        p.op = p.op == geo::ExtrudeOp::Remove ? geo::ExtrudeOp::Union : geo::ExtrudeOp::Remove;
      }));
    } catch (const Error&) {
      continue;
    }
    bool distinct = true;
    for (std::size_t i = 0; i < imgs.size(); ++i)
      for (std::size_t j = i + 1; j < imgs.size(); ++j) distinct &= !(imgs[i] == imgs[j]);
    if (!distinct) continue;
    b.q.prompt =
        "You are given a completed sketch. If the next command is Extrude, which image among the following will result "
        "from it?";
    b.q.provenance.refs = {static_cast<int>(k)};
    b.asset("sketch", render_sketch(recs[k]));
    b.asset("before", render_solid(solid_after(ep.sequence, k)));
    static const char* tags[] = {"true", "half", "double", "flipped"};
    std::vector<std::pair<std::string, bool>> items;
    for (std::size_t i = 0; i < imgs.size(); ++i) items.emplace_back(b.add_image(tags[i], std::move(imgs[i])), i == 0);
    return b.finish(std::move(items), true);
  }
  unmet("no extrusion with four distinguishable outcomes");
}

Question extrusion_count(Builder& b, const Episode& ep) {
  const int n = static_cast<int>(extrude_steps(ep).size());
  if (n < 1) unmet("no extrusions");
  std::vector<int> pool;
  for (int d : {-2, -1, 1, 2})
    if (n + d >= 1) pool.push_back(n + d);
  for (int extra = 3; pool.size() < 3; ++extra) pool.push_back(n + extra);
  b.rng.shuffle(pool);
  pool.resize(3);
  b.q.prompt = "How many extrusions were used in the provided CAD image?";
  b.asset("model", render_solid(solid_after(ep.sequence, ep.sequence.records.size())));
  std::vector<std::pair<std::string, bool>> items{{std::to_string(n), true}};
  for (int v : pool) items.emplace_back(std::to_string(v), false);
  return b.finish(std::move(items), false);
}

Question depth_comparison(Builder& b, const Episode& ep) {
  const auto& recs = ep.sequence.records;
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t i = 0; i < recs.size(); ++i)
    for (std::size_t j = i + 1; j < recs.size(); ++j)
      if (std::abs(effective_depth(recs[i]) - effective_depth(recs[j])) > 1e-9)
        pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));
  if (pairs.empty()) unmet("no pair of extrusions with different depths");
  const auto [i, j] = pairs[b.rng.index(pairs.size())];
  const bool deeper = effective_depth(recs[static_cast<std::size_t>(j)]) > effective_depth(recs[static_cast<std::size_t>(i)]);
  b.q.prompt =
      "You are given two extrusions for the same CAD model and the image of the CAD model. The second extrusion happens "
      "later than the first. Is the second extrusion deeper than the first?";
  b.q.provenance.refs = {i, j};
  b.asset("first", render_sketch(recs[static_cast<std::size_t>(i)]));
  b.asset("second", render_sketch(recs[static_cast<std::size_t>(j)]));
  b.asset("model", render_solid(solid_after(ep.sequence, recs.size())));
  return b.finish({{"Yes", deeper}, {"No", !deeper}}, false);
}

Question sketch_ordering(Builder& b, const Episode& ep) {
  const auto& recs = ep.sequence.records;
  if (recs.size() < 3) unmet("fewer than three sketches");
  std::vector<GrayImage> sketches;
  for (const auto& r : recs) sketches.push_back(render_sketch(r));
  std::vector<int> idx(recs.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  for (int attempt = 0; attempt < 20; ++attempt) {
    b.rng.shuffle(idx);
    std::vector<int> chosen(idx.begin(), idx.begin() + 3);
    // Every displayed sketch must identify a single record.
    bool distinct = true;
    for (int c : chosen)
      for (std::size_t r = 0; r < recs.size(); ++r)
        if (static_cast<int>(r) != c && sketches[r] == sketches[static_cast<std::size_t>(c)]) distinct = false;
    if (!distinct) continue;
    std::vector<int> sorted = chosen;
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> rank(3);
    for (int d = 0; d < 3; ++d)
      rank[static_cast<std::size_t>(d)] =
          static_cast<int>(std::find(sorted.begin(), sorted.end(), chosen[static_cast<std::size_t>(d)]) - sorted.begin());
    b.q.prompt = "Given these sketches from the video, order them to build the CAD object.";
    b.q.provenance.refs = chosen;
    for (int d = 0; d < 3; ++d)
      b.asset("sketch" + std::to_string(d + 1), sketches[static_cast<std::size_t>(chosen[static_cast<std::size_t>(d)])]);
    return b.finish(ordering_choices(rank), false);
  }
  unmet("sketches are not distinguishable");
}

Question sketch_identification(Builder& b, const Episode& ep, const std::vector<const Episode*>& pool) {
  std::vector<GrayImage> own;
  for (const auto& r : ep.sequence.records) own.push_back(render_sketch(r));
  auto known = [&](const GrayImage& g, const std::vector<GrayImage>& set) {
    return std::any_of(set.begin(), set.end(), [&](const GrayImage& o) { return o == g; });
  };
  std::vector<const Episode*> others;
  for (const auto* o : pool)
    if (o && o->id != ep.id) others.push_back(o);
  b.rng.shuffle(others);
  std::vector<GrayImage> distractors;
  for (const auto* o : others) {
    if (distractors.size() == 3) break;
    const auto& rec = o->sequence.records[b.rng.index(o->sequence.records.size())];
    GrayImage g = render_sketch(rec);
    if (known(g, own) || known(g, distractors)) continue;
    distractors.push_back(std::move(g));
  }
  if (distractors.size() < 3) unmet("not enough distinct sketches from other episodes");
  const std::size_t k = b.rng.index(own.size());
  b.q.prompt = "Given an isometric view of a CAD model, select a sketch that was used to build this shape.";
  b.q.provenance.refs = {static_cast<int>(k)};
  b.asset("model", render_solid(solid_after(ep.sequence, ep.sequence.records.size())));
  std::vector<std::pair<std::string, bool>> items{{b.add_image("true", own[k]), true}};
  for (std::size_t i = 0; i < 3; ++i) items.emplace_back(b.add_image("other" + std::to_string(i), distractors[i]), false);
  return b.finish(std::move(items), true);
}

// Step of the last drawing commit of each record.
std::vector<std::size_t> sketch_done_steps(const Episode& ep) {
  std::vector<std::size_t> out;
  std::optional<std::size_t> last;
  for (const auto& [step, kind] : drawing_events(ep)) {
    if (kind == "extrude") {
      if (last) out.push_back(*last);
      last.reset();
    } else {
      last = step;
    }
  }
  return out;
}

Question plane_identification(Builder& b, const Episode& ep) {
  const auto steps = sketch_done_steps(ep);
  if (steps.size() != ep.sequence.records.size()) unmet("sketch steps do not line up with records");
  const std::size_t k = b.rng.index(steps.size());
  const int plane = geo::lower_record(ep.sequence.records[k]).basis.plane_id;
  b.q.prompt = "Given the following sketch and CAD image, which plane are you currently looking at?";
  b.q.provenance.refs = {static_cast<int>(k), static_cast<int>(steps[k])};
  b.asset("frame", frame_at(ep, steps[k]));
  b.asset("model", render_solid(solid_after(ep.sequence, ep.sequence.records.size())));
  std::vector<std::pair<std::string, bool>> items;
  for (int id : {geo::Top, geo::Front, geo::Right}) items.emplace_back(plane_label(id), id == plane);
  return b.finish(std::move(items), false);
}

Question primitive_identification(Builder& b, const Episode& ep) {
  const auto events = drawing_events(ep);
  std::vector<std::string> kinds;
  for (const auto& e : events)
    if (std::find(kinds.begin(), kinds.end(), e.second) == kinds.end()) kinds.push_back(e.second);
  b.rng.shuffle(kinds);
  for (const auto& target : kinds) {
    std::vector<std::size_t> hits, misses;
    for (const auto& [step, kind] : events) (kind == target ? hits : misses).push_back(step);
    if (misses.size() < 2) continue;
    for (int attempt = 0; attempt < 10; ++attempt) {
      const std::size_t t = hits[b.rng.index(hits.size())];
      b.rng.shuffle(misses);
      std::vector<std::size_t> steps{t, misses[0], misses[1]};
      std::vector<GrayImage> imgs;
      for (std::size_t s : steps) imgs.push_back(frame_at(ep, s));
      if (imgs[0] == imgs[1] || imgs[0] == imgs[2] || imgs[1] == imgs[2]) continue;
      b.q.prompt = "Which frame best matches the description of the given CAD primitive: " + target + "?";
      std::vector<std::pair<std::string, bool>> items;
      for (std::size_t i = 0; i < 3; ++i)
        items.emplace_back(b.add_image("step" + std::to_string(steps[i]), std::move(imgs[i])), i == 0);
      b.q.assets.clear();
      Question q = b.finish(std::move(items), true);
      // Steps follow the final choice order so the verifier can read them back.
      for (const auto& c : q.choices) q.provenance.refs.push_back(std::stoi(c.substr(c.rfind("step") + 4)));
      return q;
    }
  }
  unmet("not enough distinct primitive kinds");
}

Question sequence_prediction(Builder& b, const Episode& ep) {
  std::vector<std::pair<std::size_t, std::string>> prims;
  for (const auto& e : ep.hl)
    if (e.tag.rfind("primitive:", 0) == 0) prims.emplace_back(e.index, primitive_kind_of_tag(e.tag));
  if (prims.size() < 2) unmet("fewer than two primitives");
  const std::size_t m = b.rng.index(prims.size() - 1);
  const std::string next = prims[m + 1].second;
  b.q.prompt = "What is the next primitive to draw given this CAD image and UI image?";
  b.q.provenance.refs = {static_cast<int>(prims[m].first)};
  b.asset("frame", frame_at(ep, prims[m].first));
  b.asset("model", render_solid(solid_after(ep.sequence, ep.sequence.records.size())));
  std::vector<std::pair<std::string, bool>> items;
  for (const char* k : {"line", "arc", "circle"}) items.emplace_back(k, next == k);
  return b.finish(std::move(items), false);
}

Question frame_sequencing(Builder& b, const Episode& ep) {
  const std::size_t n = ep.action_count;
  if (n < 9) unmet("episode too short");
  for (int attempt = 0; attempt < 20; ++attempt) {
    std::vector<std::size_t> steps;
    for (std::size_t third = 0; third < 3; ++third) {
      const std::size_t lo = third * n / 3, hi = (third + 1) * n / 3 - 1;
      steps.push_back(lo + b.rng.index(hi - lo + 1));
    }
    std::vector<GrayImage> imgs;
    for (std::size_t s : steps) imgs.push_back(frame_at(ep, s));
    if (imgs[0] == imgs[1] || imgs[0] == imgs[2] || imgs[1] == imgs[2]) continue;
    std::vector<int> display{0, 1, 2};
    b.rng.shuffle(display);
    b.q.prompt = "You are given 3 frames from the same video. What is the order of the frames?";
    std::vector<int> rank(3);
    for (int d = 0; d < 3; ++d) {
      const int src = display[static_cast<std::size_t>(d)];
      rank[static_cast<std::size_t>(d)] = src;
      b.q.provenance.refs.push_back(static_cast<int>(steps[static_cast<std::size_t>(src)]));
      b.asset("frame" + std::to_string(d + 1), imgs[static_cast<std::size_t>(src)]);
    }
    return b.finish(ordering_choices(rank), false);
  }
  unmet("frames are not distinguishable");
}

Question hole_detection(Builder& b, const Episode& ep) {
  const auto solid = solid_after(ep.sequence, ep.sequence.records.size());
  const auto holes = kernel::count_through_holes(solid);
  if (!holes) unmet("hole count is resolution dependent");
  b.q.prompt = "Given this CAD image, is there a hole?";
  b.asset("model", render_solid(solid));
  return b.finish({{"Yes", *holes > 0}, {"No", *holes == 0}}, false);
}

Question symmetry_detection(Builder& b, const Episode& ep) {
  const auto solid = solid_after(ep.sequence, ep.sequence.records.size());
  const auto scores = kernel::symmetry_scores(solid);
  std::vector<std::string> planes;
  static const char* names[] = {"x", "y", "z"};
  for (std::size_t a = 0; a < 3; ++a) {
    if (scores[a] > kernel::kSymmetryTol / 4 && scores[a] < 4 * kernel::kSymmetryTol) unmet("borderline symmetry score");
    if (scores[a] < kernel::kSymmetryTol) planes.emplace_back(names[a]);
  }
  if (planes.empty()) unmet("model has no mirror plane");
  const std::string truth = symmetry_label(planes);
  b.q.prompt = "You are given an image of a CAD model. Across which planes is this CAD model symmetric?";
  b.asset("model", render_solid(solid));
  std::vector<std::pair<std::string, bool>> items;
  for (const auto& l : symmetry_labels()) items.emplace_back(l, l == truth);
  return b.finish(std::move(items), false);
}

}  // namespace

Question generate(Family family, const Episode& episode, const std::vector<const Episode*>& pool, Rng& rng,
                  std::uint64_t seed) {
  if (episode.sequence.records.empty()) unmet("episode has no records");
  Builder b(family, episode, rng, seed);
  switch (family) {
    case Family::ExtrusionShapePrediction: return shape_prediction(b, episode);
    case Family::ExtrusionCount: return extrusion_count(b, episode);
    case Family::ExtrusionDepthComparison: return depth_comparison(b, episode);
    case Family::SketchOrdering: return sketch_ordering(b, episode);
    case Family::SketchIdentification: return sketch_identification(b, episode, pool);
    case Family::PlaneIdentification: return plane_identification(b, episode);
    case Family::PrimitiveIdentification: return primitive_identification(b, episode);
    case Family::SequencePrediction: return sequence_prediction(b, episode);
    case Family::FrameSequencing: return frame_sequencing(b, episode);
    case Family::HoleDetection: return hole_detection(b, episode);
    case Family::SymmetryDetection: return symmetry_detection(b, episode);
  }
  unmet("unknown family");
}

// ---------------------------------------------------------------------------
// Verification: answers recomputed from raw records, raw hl logs and fresh
// renders rather than from the generator's intermediate values.

namespace {

constexpr double kPi = std::numbers::pi;

double raw_norm(int q) { return (q - 128) / 128.0; }

int raw_plane(const seq::ExtrusionRecordRaw& r) {
  const double th = kPi * raw_norm(r.theta), ph = kPi * raw_norm(r.phi);
  const double n[3] = {std::abs(std::sin(th) * std::cos(ph)), std::abs(std::sin(th) * std::sin(ph)), std::abs(std::cos(th))};
  int best = 0;
  for (int i = 1; i < 3; ++i)
    if (n[i] > n[best]) best = i;
  return best;
}

double raw_depth(const seq::ExtrusionRecordRaw& r) {
  const double e1 = std::abs(0.5 * raw_norm(r.e1)), e2 = std::abs(0.5 * raw_norm(r.e2));
  if (r.sides == 1) return 2 * e1;
  if (r.sides == 2) return e1 + e2;
  return e1;
}

// Incremental extrusion loop, separate from kernel::build_solid.
kernel::Solid raw_solid(const seq::CadSequence& seq, std::size_t records) {
  kernel::Solid solid;
  for (std::size_t i = 0; i < records && i < seq.records.size(); ++i) {
    const auto low = geo::lower_record(seq.records[i]);
    auto region = std::make_shared<const kernel::PlanarRegion>(
        kernel::build_region(low.sketch, low.basis.plane_id, low.basis.offset));
    solid = kernel::extrude(solid, std::move(region), low.params, low.basis.offset);
  }
  return solid;
}

bool choice_is(const Question& q, const std::string& expected) {
  if (q.answer_index < 0 || q.answer_index >= static_cast<int>(q.choices.size())) return false;
  if (std::count(q.choices.begin(), q.choices.end(), expected) != 1) return false;
  return q.choices[static_cast<std::size_t>(q.answer_index)] == expected;
}

const GrayImage* image(const Question& q, const std::string& name) {
  auto it = q.images.find(name);
  return it == q.images.end() ? nullptr : &it->second;
}

// Index of the single choice image equal to `img`, or -1.
int matching_choice(const Question& q, const GrayImage& img) {
  int found = -1;
  for (std::size_t i = 0; i < q.choices.size(); ++i) {
    const auto* g = image(q, q.choices[i]);
    if (g && *g == img) {
      if (found >= 0) return -1;
      found = static_cast<int>(i);
    }
  }
  return found;
}

std::string hl_tag_at(const Episode& ep, std::size_t step) {
  for (const auto& e : ep.hl)
    if (e.index == step) return e.tag;
  return "";
}

std::string order_from_ranks(const std::vector<std::size_t>& keys) {
  // keys are in display order; list display labels by ascending key.
  std::vector<int> d{0, 1, 2};
  std::stable_sort(d.begin(), d.end(), [&](int a, int b) { return keys[static_cast<std::size_t>(a)] < keys[static_cast<std::size_t>(b)]; });
  return order_label(d);
}

}  // namespace

bool verify(const Question& q, const Episode& ep) {
  try {
    const auto& recs = ep.sequence.records;
    switch (q.family) {
      case Family::ExtrusionShapePrediction: {
        if (q.provenance.refs.size() != 1) return false;
        const auto k = static_cast<std::size_t>(q.provenance.refs[0]);
        return matching_choice(q, render_solid(raw_solid(ep.sequence, k + 1))) == q.answer_index;
      }
      case Family::ExtrusionCount: return choice_is(q, std::to_string(recs.size()));
      case Family::ExtrusionDepthComparison: {
        if (q.provenance.refs.size() != 2) return false;
        const double a = raw_depth(recs.at(static_cast<std::size_t>(q.provenance.refs[0])));
        const double b = raw_depth(recs.at(static_cast<std::size_t>(q.provenance.refs[1])));
        if (q.provenance.refs[0] >= q.provenance.refs[1] || a == b) return false;
        return choice_is(q, b > a ? "Yes" : "No");
      }
      case Family::SketchOrdering: {
        if (q.assets.size() != 3) return false;
        std::vector<GrayImage> sketches;
        for (const auto& r : recs) sketches.push_back(render_sketch(r));
        std::vector<std::size_t> record_of(3);
        for (std::size_t d = 0; d < 3; ++d) {
          const auto* g = image(q, q.assets[d]);
          if (!g) return false;
          int match = -1;
          for (std::size_t r = 0; r < sketches.size(); ++r)
            if (sketches[r] == *g) {
              if (match >= 0) return false;
              match = static_cast<int>(r);
            }
          if (match < 0) return false;
          record_of[d] = static_cast<std::size_t>(match);
        }
        return choice_is(q, order_from_ranks(record_of));
      }
      case Family::SketchIdentification: {
        int hit = -1;
        for (std::size_t i = 0; i < q.choices.size(); ++i) {
          const auto* g = image(q, q.choices[i]);
          if (!g) return false;
          const bool own = std::any_of(recs.begin(), recs.end(), [&](const auto& r) { return render_sketch(r) == *g; });
          if (own) {
            if (hit >= 0) return false;
            hit = static_cast<int>(i);
          }
        }
        return hit == q.answer_index;
      }
      case Family::PlaneIdentification: {
        if (q.provenance.refs.size() != 2) return false;
        const auto* g = image(q, q.assets.at(0));
        if (!g || !(*g == ep.frame(static_cast<std::size_t>(q.provenance.refs[1])))) return false;
        return choice_is(q, plane_label(raw_plane(recs.at(static_cast<std::size_t>(q.provenance.refs[0])))));
      }
      case Family::PrimitiveIdentification: {
        if (q.provenance.refs.size() != q.choices.size()) return false;
        const std::string target = q.prompt.substr(q.prompt.rfind(": ") + 2, std::string::npos);
        const std::string kind = target.substr(0, target.size() - 1);
        int hit = -1;
        for (std::size_t i = 0; i < q.choices.size(); ++i) {
          const auto step = static_cast<std::size_t>(q.provenance.refs[i]);
          const auto* g = image(q, q.choices[i]);
          if (!g || !(*g == ep.frame(step))) return false;
          if (primitive_kind_of_tag(hl_tag_at(ep, step)) == kind) {
            if (hit >= 0) return false;
            hit = static_cast<int>(i);
          }
        }
        return hit == q.answer_index;
      }
      case Family::SequencePrediction: {
        if (q.provenance.refs.size() != 1) return false;
        const auto step = static_cast<std::size_t>(q.provenance.refs[0]);
        std::size_t m = 0;
        for (const auto& e : ep.hl)
          if (e.index < step && e.tag.rfind("primitive:", 0) == 0) ++m;
        std::vector<seq::PrimitiveKind> flat;
        for (const auto& r : recs)
          for (const auto& l : r.loops)
            for (const auto& p : l.primitives) flat.push_back(p.kind);
        if (m + 1 >= flat.size()) return false;
        return choice_is(q, std::string(seq::to_string(flat[m + 1])));
      }
      case Family::FrameSequencing: {
        if (q.provenance.refs.size() != 3 || q.assets.size() != 3) return false;
        std::vector<std::size_t> steps;
        for (std::size_t d = 0; d < 3; ++d) {
          const auto step = static_cast<std::size_t>(q.provenance.refs[d]);
          const auto* g = image(q, q.assets[d]);
          if (!g || !(*g == ep.frame(step))) return false;
          steps.push_back(step);
        }
        return choice_is(q, order_from_ranks(steps));
      }
      case Family::HoleDetection: {
        const int holes = kernel::count_through_holes_at(raw_solid(ep.sequence, recs.size()), kernel::kVoxelFine);
        return choice_is(q, holes > 0 ? "Yes" : "No");
      }
      case Family::SymmetryDetection: {
        const auto planes = kernel::symmetry_planes(raw_solid(ep.sequence, recs.size()), kernel::kSymmetryTol, 4096, 1);
        return choice_is(q, symmetry_label(planes));
      }
    }
  } catch (const std::exception&) {
    return false;
  }
  return false;
}

std::vector<Question> generate_batch(Family family, const std::vector<Episode>& episodes, std::size_t n,
                                     std::uint64_t seed) {
  std::vector<const Episode*> pool;
  for (const auto& e : episodes) pool.push_back(&e);
  Rng order_rng(Rng::mix(seed ^ (static_cast<std::uint64_t>(family) << 32)));
  std::vector<std::size_t> order(episodes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  order_rng.shuffle(order);

  std::vector<Question> out;
  std::vector<bool> eligible(episodes.size(), true);
  std::size_t cursor = 0, misses = 0;
  while (out.size() < n && misses < order.size()) {
    const std::size_t e = order[cursor++ % order.size()];
    if (!eligible[e]) {
      ++misses;
      continue;
    }
    const std::uint64_t qseed = Rng::mix(seed + 0x9e37 * out.size() + static_cast<std::uint64_t>(family));
    Rng rng(qseed);
    try {
      out.push_back(generate(family, episodes[e], pool, rng, qseed));
      misses = 0;
    } catch (const Error& err) {
      if (err.code() != ErrorCode::PrerequisiteUnmet) throw;
      eligible[e] = false;
      ++misses;
    }
  }
  if (out.empty())
    fail(ErrorCode::InsufficientEpisodes, "no episode supports " + std::string(family_name(family)));
  return out;
}

std::map<Family, FamilyScore> grade(const std::vector<std::optional<int>>& responses,
                                    const std::vector<Question>& questions, std::uint64_t seed) {
  Rng rng(Rng::mix(seed));
  std::map<Family, FamilyScore> out;
  for (std::size_t i = 0; i < questions.size(); ++i) {
    const auto& q = questions[i];
    auto& s = out[q.family];
    const int k = static_cast<int>(q.choices.size());
    std::optional<int> r = i < responses.size() ? responses[i] : std::nullopt;
    if (!r || *r < 0 || *r >= k) {
      r = static_cast<int>(rng.index(static_cast<std::size_t>(k)));
      ++s.fallbacks;
    }
    ++s.questions;
    s.correct += *r == q.answer_index;
    s.chance += 1.0 / k;
  }
  for (auto& [f, s] : out) {
    s.accuracy = static_cast<double>(s.correct) / static_cast<double>(s.questions);
    s.chance /= static_cast<double>(s.questions);
  }
  return out;
}

std::string Question::to_json(const std::string& asset_dir) const {
  nlohmann::ordered_json j;
  auto path = [&](const std::string& name) { return asset_dir + "/" + name + ".pgm"; };
  j["family"] = family_name(family);
  j["prompt"] = prompt;
  j["assets"] = nlohmann::ordered_json::array();
  for (const auto& a : assets) j["assets"].push_back(path(a));
  j["choices"] = nlohmann::ordered_json::array();
  for (const auto& c : choices) j["choices"].push_back(choices_are_images ? path(c) : c);
  j["answer_index"] = answer_index;
  j["provenance"] = {{"episode", provenance.episode}, {"seed", provenance.seed}, {"refs", provenance.refs}};
  return j.dump();
}

}  // namespace cadact::vqa

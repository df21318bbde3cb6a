#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include <json.hpp>

#include "../support/oracles.hpp"
#include "../support/shapes.hpp"
#include "cadact/error.hpp"
#include "cadact/metrics.hpp"

using namespace cadact;
using namespace cadact::metrics;
namespace ts = testing_shapes;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Io;
}

act::ActionVector mv(int x, int y) { return {0, x, y, -1, -1, -1, -1}; }
act::ActionVector key(int k, int n = 1) { return {1, -1, -1, k, n, -1, -1}; }
act::ActionVector typ(int v) { return {3, -1, -1, -1, -1, -1, v}; }
const act::ActionVector kClick{4, -1, -1, -1, -1, -1, -1};

Episode random_episode(Rng& rng, std::size_t n) {
  Episode e;
  for (std::size_t i = 0; i < n; ++i) e.push_back(oracles::random_vector(rng));
  return e;
}

}  // namespace

TEST_CASE("chamfer hand values") {
  const PointCloud p{{0, 0, 0}};
  const PointCloud q{{1, 0, 0}, {0, 2, 0}};
  // p->q: 1; q->p: (1 + 4) / 2.
  CHECK(chamfer(p, q) == 3.5);
  CHECK(chamfer(q, p) == 3.5);
  CHECK(chamfer(q, q) == 0.0);
  CHECK(code_of([&] { chamfer(p, PointCloud{}); }) == ErrorCode::EmptyCloud);
}

TEST_CASE("accelerated chamfer equals the reference") {
  Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    const auto p = oracles::random_cloud(rng, 300), q = oracles::random_cloud(rng, 250);
    const double ref = oracles::chamfer(p, q);
    CHECK(std::abs(chamfer(p, q) - ref) <= 1e-12 * std::max(1.0, ref));
    const KdTree tree(p);
    CHECK(chamfer_bounded(tree, p, q, ref * 2) == chamfer(p, q));
    CHECK(chamfer_bounded(tree, p, q, ref * 0.5) == std::numeric_limits<double>::infinity());
  }
}

TEST_CASE("alignment undoes in-family transforms") {
  Rng rng(8);
  for (int i = 0; i < 20; ++i) {
    const auto p = oracles::random_cloud(rng, 400);
    SimilarityTransform t;
    t.R = oracles::random_signed_permutation(rng);
    t.s = std::exp(rng.uniform(std::log(0.1), std::log(10.0)));
    t.t = Vec3(rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3));
    const auto a = align_pca(p, t.apply(p));
    CHECK(a.cd <= 1e-9);
    // The recovered map sends every transformed point back onto its source.
    const auto back = a.transform.apply(t.apply(p));
    double worst = 0;
    for (std::size_t k = 0; k < p.size(); ++k) worst = std::max(worst, (back[k] - p[k]).norm());
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("alignment handles arbitrary rotations") {
  Rng rng(9);
  for (int i = 0; i < 10; ++i) {
    const auto p = oracles::random_cloud(rng, 400);
    SimilarityTransform t;
    t.R = Eigen::Quaterniond::UnitRandom().toRotationMatrix();
    t.s = 2.5;
    CHECK(align_pca(p, t.apply(p)).cd <= 1e-9);
  }
  CHECK(alignment_candidates(oracles::random_cloud(rng, 50), oracles::random_cloud(rng, 50)).size() == 96);
}

TEST_CASE("degenerate clouds") {
  PointCloud flat;
  for (int i = 0; i < 10; ++i) flat.emplace_back(i, 2 * i, 0);
  CHECK(code_of([&] { align_pca(flat, flat); }) == ErrorCode::DegenerateCloud);
  CHECK(code_of([&] { align_pca(PointCloud{}, flat); }) == ErrorCode::EmptyCloud);
  CHECK(code_of([] { align_pca(PointCloud{{0, 0, 0}, {1, 1, 1}, {0, 1, 0}}, PointCloud{{0, 0, 0}}); }) ==
        ErrorCode::DegenerateCloud);
}

TEST_CASE("accuracy hand values") {
  const Episode gt{mv(500, 250), key(2), kClick, typ(562)};
  CHECK(cmd_accuracy(gt, gt) == 1.0);
  CHECK(param_accuracy(gt, gt) == 1.0);
  const Episode pred{mv(500, 251), key(2), typ(562), typ(561)};
  CHECK(cmd_accuracy(pred, gt) == 0.75);
  // MoveTo half right, key exact, Click mismatched, Type value off.
  CHECK(param_accuracy(pred, gt) == (0.5 + 1.0 + 0.0 + 0.0) / 4);
  Episode flipped = gt;
  flipped[1] = kClick;
  CHECK(cmd_accuracy(flipped, gt) == 0.75);
  CHECK(perfect_matches(pred, gt) == 1);
  CHECK(code_of([&] { cmd_accuracy(Episode{kClick}, gt); }) == ErrorCode::LengthMismatch);
  CHECK(code_of([] { param_accuracy(Episode{}, Episode{}); }) == ErrorCode::EmptyInput);
  CHECK(param_count(0) == 2);
  CHECK(param_count(4) == 0);
}

TEST_CASE("length bins") {
  CHECK(length_bin(0) == LengthBin::Short);
  CHECK(length_bin(119) == LengthBin::Short);
  CHECK(length_bin(120) == LengthBin::Medium);
  CHECK(length_bin(199) == LengthBin::Medium);
  CHECK(length_bin(200) == LengthBin::Long);
}

TEST_CASE("evaluate matches brute-force recomputation") {
  Rng rng(21);
  std::vector<EvalEpisode> eps;
  std::vector<std::pair<oracles::Steps, oracles::Steps>> ref;
  for (int i = 0; i < 40; ++i) {
    EvalEpisode e;
    e.id = std::to_string(i);
    e.gt = random_episode(rng, static_cast<std::size_t>(rng.uniform_int(60, 260)));
    e.pred = oracles::perturbed(rng, e.gt, rng.uniform(0.0, 0.4));
    if (!rng.coin(0.1)) e.cd = rng.uniform(0.0, 0.04);
    ref.emplace_back(e.pred, e.gt);
    eps.push_back(e);
  }
  const auto r = evaluate(eps, 0.02);
  CHECK(r.mu_cmd == oracles::mu_cmd(ref));
  CHECK(r.mu_param == oracles::mu_param(ref));
  double sums[3] = {0, 0, 0}, all = 0;
  std::size_t counts[3] = {0, 0, 0}, success = 0, invalid = 0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const double pct = oracles::perfect_pct(eps[i].pred, eps[i].gt);
    all += pct;
    sums[oracles::bin_of(eps[i].gt.size())] += pct;
    ++counts[oracles::bin_of(eps[i].gt.size())];
    if (!eps[i].cd) ++invalid;
    else success += *eps[i].cd < 0.02;
  }
  CHECK(r.perfect.overall.mean == doctest::Approx(all / 40).epsilon(1e-14));
  CHECK(r.perfect.short_bin.count == counts[0]);
  CHECK(r.perfect.medium_bin.count == counts[1]);
  CHECK(r.perfect.long_bin.count == counts[2]);
  for (int b = 0; b < 3; ++b) {
    if (!counts[b]) continue;
    const auto& s = b == 0 ? r.perfect.short_bin : b == 1 ? r.perfect.medium_bin : r.perfect.long_bin;
    CHECK(s.mean == doctest::Approx(sums[b] / counts[b]).epsilon(1e-14));
  }
  CHECK(r.success_rate == static_cast<double>(success) / 40);
  CHECK(r.invalid_rate == static_cast<double>(invalid) / 40);

  const auto j = nlohmann::json::parse(r.to_json());
  CHECK(j.at("mu_cmd").get<double>() == r.mu_cmd);
  const auto csv = r.to_csv("m");
  CHECK(csv.rfind("model,episodes,mu_cmd_pct", 0) == 0);
  CHECK(csv.find("\nm,40,") != std::string::npos);
}

TEST_CASE("evaluate ground truth against itself") {
  Rng rng(3);
  std::vector<EvalEpisode> eps;
  for (int i = 0; i < 5; ++i) {
    EvalEpisode e;
    e.gt = random_episode(rng, 50);
    e.pred = e.gt;
    e.cd = 0.0;
    eps.push_back(e);
  }
  const auto r = evaluate(eps);
  CHECK(r.mu_cmd == 1.0);
  CHECK(r.mu_param == 1.0);
  CHECK(r.success_rate == 1.0);
  CHECK(r.perfect.overall.min == 100.0);
  CHECK(code_of([] { evaluate({}); }) == ErrorCode::EmptyInput);
}

TEST_CASE("quality filter verdicts") {
  using geo::Vec3;
  const auto a = kernel::Solid().unite(ts::box(Vec3(-0.3, -0.2, -0.1), Vec3(0.3, 0.2, 0.1)));
  // Two small blocks far apart cannot be aligned onto one slab.
  const auto other = kernel::Solid()
                         .unite(ts::box(Vec3(-0.9, -0.1, -0.1), Vec3(-0.7, 0.1, 0.1)))
                         .unite(ts::box(Vec3(0.7, -0.1, -0.1), Vec3(0.9, 0.1, 0.1)));
  const auto same = quality_filter(a, a);
  CHECK(same.kind == Verdict::Kind::Pass);
  CHECK(same.cd < 1e-3);
  CHECK(quality_filter(a, other).kind == Verdict::Kind::Fail);
  CHECK(quality_filter(a, kernel::Solid()).kind == Verdict::Kind::Invalid);
  // A scaled and rotated copy passes after alignment.
  const auto big = kernel::Solid().unite(ts::box(Vec3(-0.2, -0.4, -0.6), Vec3(0.2, 0.4, 0.6), 0));
  CHECK(quality_filter(a, big).pass());
}

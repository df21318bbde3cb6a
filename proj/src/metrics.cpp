#include "cadact/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "cadact/error.hpp"

namespace cadact::metrics {

PointCloud SimilarityTransform::apply(const PointCloud& cloud) const {
  PointCloud out;
  out.reserve(cloud.size());
  for (const auto& p : cloud) out.push_back(apply(p));
  return out;
}

namespace {

struct Frame {
  Vec3 centroid;
  Eigen::Matrix3d axes;  // columns, ascending variance
  double rms = 0.0;
};

Frame pca_frame(const PointCloud& cloud) {
  if (cloud.empty()) fail(ErrorCode::EmptyCloud, "alignment needs points");
  Frame f;
  f.centroid = Vec3::Zero();
  for (const auto& p : cloud) f.centroid += p;
  f.centroid /= static_cast<double>(cloud.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  double ss = 0.0;
  for (const auto& p : cloud) {
    const Vec3 d = p - f.centroid;
    cov += d * d.transpose();
    ss += d.squaredNorm();
  }
  cov /= static_cast<double>(cloud.size());
  f.rms = std::sqrt(ss / static_cast<double>(cloud.size()));
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
  const Vec3 ev = eig.eigenvalues();
  if (cloud.size() < 4 || !(ev(0) > 1e-12 * std::max(ev(2), 1e-300)))
    fail(ErrorCode::DegenerateCloud, "covariance has rank below 3");
  f.axes = eig.eigenvectors();
  return f;
}

}  // namespace

std::vector<Eigen::Matrix3d> alignment_candidates(const PointCloud& gt, const PointCloud& pred) {
  const Frame g = pca_frame(gt);
  const Frame p = pca_frame(pred);
  std::vector<Eigen::Matrix3d> out;
  const auto perms = kernel::SignedPermutation::all();
  out.reserve(2 * perms.size());
  for (const auto& sp : perms) out.push_back(g.axes * sp.matrix() * p.axes.transpose());
  for (const auto& sp : perms) out.push_back(sp.matrix());
  return out;
}

Alignment align_pca(const PointCloud& gt, const PointCloud& pred) {
  const Frame g = pca_frame(gt);
  const Frame p = pca_frame(pred);
  const KdTree gt_tree(gt);
  Alignment best;
  bool have = false;
  for (const auto& R : alignment_candidates(gt, pred)) {
    SimilarityTransform t;
    t.R = R;
    t.s = g.rms / p.rms;
    t.t = g.centroid - t.s * (R * p.centroid);
    const double cd = have ? chamfer_bounded(gt_tree, gt, t.apply(pred), best.cd) : chamfer(gt_tree, gt, t.apply(pred));
    if (!have || cd < best.cd) {
      best = {t, cd};
      have = true;
    }
  }
  return best;
}

int param_count(int cmd) {
  switch (cmd) {
    case 0: return 2;
    case 1: return 2;
    case 2: return 1;
    case 3: return 1;
    default: return 0;
  }
}

namespace {

void check_lengths(const Episode& pred, const Episode& gt) {
  if (pred.size() != gt.size())
    fail(ErrorCode::LengthMismatch, std::to_string(pred.size()) + " predicted vs " + std::to_string(gt.size()) + " steps");
  if (gt.empty()) fail(ErrorCode::EmptyInput, "no steps to score");
}

// Parameter slots of each command in the 7-field vector.
std::vector<int> param_slots(int cmd) {
  switch (cmd) {
    case 0: return {1, 2};
    case 1: return {3, 4};
    case 2: return {5};
    case 3: return {6};
    default: return {};
  }
}

double step_param_score(const act::ActionVector& p, const act::ActionVector& g) {
  if (p[0] != g[0]) return 0.0;
  const auto slots = param_slots(g[0]);
  if (slots.empty()) return 1.0;
  int hits = 0;
  for (int s : slots) hits += p[static_cast<std::size_t>(s)] == g[static_cast<std::size_t>(s)];
  return static_cast<double>(hits) / static_cast<double>(slots.size());
}

Episode padded(const Episode& pred, std::size_t n) {
  Episode out(pred.begin(), pred.begin() + static_cast<std::ptrdiff_t>(std::min(n, pred.size())));
  act::ActionVector miss;
  miss.fill(-2);
  out.resize(n, miss);
  return out;
}

}  // namespace

double cmd_accuracy(const Episode& pred, const Episode& gt) {
  check_lengths(pred, gt);
  std::size_t hits = 0;
  for (std::size_t t = 0; t < gt.size(); ++t) hits += pred[t][0] == gt[t][0];
  return static_cast<double>(hits) / static_cast<double>(gt.size());
}

double param_accuracy(const Episode& pred, const Episode& gt) {
  check_lengths(pred, gt);
  double sum = 0.0;
  for (std::size_t t = 0; t < gt.size(); ++t) sum += step_param_score(pred[t], gt[t]);
  return sum / static_cast<double>(gt.size());
}

std::size_t perfect_matches(const Episode& pred, const Episode& gt) {
  std::size_t hits = 0;
  for (std::size_t t = 0; t < std::min(pred.size(), gt.size()); ++t) hits += pred[t] == gt[t];
  return hits;
}

LengthBin length_bin(std::size_t n) {
  if (n < 120) return LengthBin::Short;
  if (n < 200) return LengthBin::Medium;
  return LengthBin::Long;
}

std::string_view to_string(LengthBin b) {
  switch (b) {
    case LengthBin::Short: return "short";
    case LengthBin::Medium: return "medium";
    case LengthBin::Long: return "long";
  }
  return "?";
}

namespace {

PercentStats summarize(const std::vector<double>& v) {
  PercentStats s;
  s.count = v.size();
  if (v.empty()) return s;
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  s.min = *std::min_element(v.begin(), v.end());
  s.max = *std::max_element(v.begin(), v.end());
  return s;
}

}  // namespace

PerfectReport perfect_sequence_stats(const std::vector<EpisodePair>& episodes) {
  if (episodes.empty()) fail(ErrorCode::EmptyInput, "no episodes");
  std::vector<double> all, bins[3];
  std::size_t hits = 0, steps = 0;
  for (const auto& e : episodes) {
    if (e.gt.empty()) fail(ErrorCode::EmptyInput, "episode without ground-truth steps");
    const std::size_t m = perfect_matches(e.pred, e.gt);
    const double pct = 100.0 * static_cast<double>(m) / static_cast<double>(e.gt.size());
    all.push_back(pct);
    bins[static_cast<int>(length_bin(e.gt.size()))].push_back(pct);
    hits += m;
    steps += e.gt.size();
  }
  PerfectReport r;
  r.overall = summarize(all);
  r.short_bin = summarize(bins[0]);
  r.medium_bin = summarize(bins[1]);
  r.long_bin = summarize(bins[2]);
  r.pooled = 100.0 * static_cast<double>(hits) / static_cast<double>(steps);
  return r;
}

std::string_view to_string(Verdict::Kind k) {
  switch (k) {
    case Verdict::Kind::Pass: return "pass";
    case Verdict::Kind::Fail: return "fail";
    case Verdict::Kind::Invalid: return "invalid";
  }
  return "?";
}

Verdict quality_filter(const kernel::Solid& target, const kernel::Solid& rebuilt, const FilterConfig& cfg) {
  Verdict v;
  if (rebuilt.empty()) {
    v.reason = "rebuilt solid is empty";
    return v;
  }
  try {
    const auto P = kernel::sample_points(target, cfg.samples, cfg.seed);
    const auto Q = kernel::sample_points(rebuilt, cfg.samples, cfg.seed);
    v.cd = align_pca(P, Q).cd;
  } catch (const Error& e) {
    v.reason = e.what();
    return v;
  }
  v.kind = v.cd < cfg.threshold ? Verdict::Kind::Pass : Verdict::Kind::Fail;
  return v;
}

EvalReport evaluate(const std::vector<EvalEpisode>& episodes, double threshold) {
  if (episodes.empty()) fail(ErrorCode::EmptyInput, "no episodes to evaluate");
  EvalReport r;
  r.episodes = episodes.size();
  r.threshold = threshold;
  double cmd_hits = 0.0, param_sum = 0.0;
  std::size_t steps = 0;
  std::vector<EpisodePair> pairs;
  std::vector<double> cds;
  std::size_t success = 0, invalid = 0;
  for (const auto& e : episodes) {
    if (e.gt.empty()) fail(ErrorCode::EmptyInput, "episode " + e.id + " has no steps");
    const Episode pred = padded(e.pred, e.gt.size());
    cmd_hits += cmd_accuracy(pred, e.gt) * static_cast<double>(e.gt.size());
    param_sum += param_accuracy(pred, e.gt) * static_cast<double>(e.gt.size());
    steps += e.gt.size();
    pairs.push_back({e.pred, e.gt});
    if (!e.cd) {
      ++invalid;
      continue;
    }
    cds.push_back(*e.cd);
    success += *e.cd < threshold;
  }
  r.mu_cmd = cmd_hits / static_cast<double>(steps);
  r.mu_param = param_sum / static_cast<double>(steps);
  r.perfect = perfect_sequence_stats(pairs);
  const double n = static_cast<double>(episodes.size());
  r.success_rate = static_cast<double>(success) / n;
  r.invalid_rate = static_cast<double>(invalid) / n;
  if (!cds.empty()) {
    r.mean_cd = std::accumulate(cds.begin(), cds.end(), 0.0) / static_cast<double>(cds.size());
    std::sort(cds.begin(), cds.end());
    const std::size_t m = cds.size() / 2;
    r.median_cd = cds.size() % 2 ? cds[m] : 0.5 * (cds[m - 1] + cds[m]);
  }
  return r;
}

namespace {

nlohmann::ordered_json stats_json(const PercentStats& s) {
  return {{"count", s.count}, {"mean", s.mean}, {"min", s.min}, {"max", s.max}};
}

}  // namespace

std::string EvalReport::to_json() const {
  nlohmann::ordered_json j;
  j["episodes"] = episodes;
  j["mu_cmd"] = mu_cmd;
  j["mu_param"] = mu_param;
  j["perfect_actions"] = {{"overall", stats_json(perfect.overall)},
                          {"short", stats_json(perfect.short_bin)},
                          {"medium", stats_json(perfect.medium_bin)},
                          {"long", stats_json(perfect.long_bin)},
                          {"pooled", perfect.pooled}};
  j["mean_cd"] = mean_cd;
  j["median_cd"] = median_cd;
  j["success_rate"] = success_rate;
  j["invalid_rate"] = invalid_rate;
  j["cd_threshold"] = threshold;
  return j.dump(2) + "\n";
}

std::string EvalReport::to_csv(const std::string& model) const {
  std::string out =
      "model,episodes,mu_cmd_pct,mu_param_pct,perfect_mean_pct,perfect_min_pct,perfect_max_pct,perfect_short_pct,"
      "perfect_medium_pct,perfect_long_pct,success_rate_pct,mean_cd,median_cd,invalid_pct\n";
  char buf[512];
  std::snprintf(buf, sizeof buf, "%s,%zu,%.4f,%.4f,%.4f,%.4f,%.4f,%.4f,%.4f,%.4f,%.4f,%.6g,%.6g,%.4f\n", model.c_str(),
                episodes, 100 * mu_cmd, 100 * mu_param, perfect.overall.mean, perfect.overall.min, perfect.overall.max,
                perfect.short_bin.mean, perfect.medium_bin.mean, perfect.long_bin.mean, 100 * success_rate, mean_cd,
                median_cd, 100 * invalid_rate);
  return out + buf;
}

}  // namespace cadact::metrics

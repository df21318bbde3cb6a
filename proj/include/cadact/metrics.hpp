#pragma once

// Evaluation: aligned Chamfer distance, action accuracies, perfect-action
// statistics by episode length and the geometric quality filter.

#include <optional>
#include <string>
#include <vector>

#include "cadact/actions.hpp"
#include "cadact/chamfer.hpp"
#include "cadact/image.hpp"
#include "cadact/solid.hpp"

namespace cadact::metrics {

struct SimilarityTransform {
  Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
  double s = 1.0;
  Vec3 t = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return s * (R * p) + t; }
  PointCloud apply(const PointCloud& cloud) const;
  bool proper() const { return R.determinant() > 0; }
};

struct Alignment {
  SimilarityTransform transform;
  double cd = 0.0;
};

// Searches signed axis permutations between the PCA frames (and between the
// world frames) of the two clouds with RMS scale matching, returning the
// transform of `pred` onto `gt` with the smallest Chamfer distance.
// Throws EmptyCloud, DegenerateCloud.
Alignment align_pca(const PointCloud& gt, const PointCloud& pred);

// Candidate rotations tried by align_pca, in search order.
std::vector<Eigen::Matrix3d> alignment_candidates(const PointCloud& gt, const PointCloud& pred);

using Episode = std::vector<act::ActionVector>;

// Number of parameters of a command: MoveTo 2, PressKey 2, Scroll 1, Type 1, Click 0.
int param_count(int cmd);

// Throws LengthMismatch (different lengths) and EmptyInput (T = 0).
double cmd_accuracy(const Episode& pred, const Episode& gt);
// A matching Click counts as fully correct.
double param_accuracy(const Episode& pred, const Episode& gt);

// Steps compared against the ground truth length; missing predictions miss.
std::size_t perfect_matches(const Episode& pred, const Episode& gt);

enum class LengthBin { Short, Medium, Long };
LengthBin length_bin(std::size_t gt_length);  // [0,120) [120,200) [200,inf)
std::string_view to_string(LengthBin b);

struct PercentStats {
  std::size_t count = 0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct PerfectReport {
  PercentStats overall;  // mean over episodes of per-episode percentages
  PercentStats short_bin, medium_bin, long_bin;
  double pooled = 0.0;  // total exact steps / total ground-truth steps, percent
};

struct EpisodePair {
  Episode pred;
  Episode gt;
};

// Throws EmptyInput.
PerfectReport perfect_sequence_stats(const std::vector<EpisodePair>& episodes);

struct FilterConfig {
  std::size_t samples = 4096;
  std::uint64_t seed = 0;
  double threshold = 0.02;
};

struct Verdict {
  enum class Kind { Pass, Fail, Invalid };
  Kind kind = Kind::Invalid;
  double cd = 0.0;
  std::string reason;

  bool pass() const { return kind == Kind::Pass; }
};

std::string_view to_string(Verdict::Kind k);

Verdict quality_filter(const kernel::Solid& target, const kernel::Solid& rebuilt, const FilterConfig& cfg = {});

struct EvalEpisode {
  std::string id;
  Episode pred;
  Episode gt;
  std::optional<double> cd;  // aligned CD; absent when the prediction is invalid
};

struct EvalReport {
  std::size_t episodes = 0;
  double mu_cmd = 0.0;    // pooled over steps, shorter predictions padded with misses
  double mu_param = 0.0;
  PerfectReport perfect;
  double mean_cd = 0.0;   // over valid predictions
  double median_cd = 0.0;
  double success_rate = 0.0;  // CD below threshold, over all episodes
  double invalid_rate = 0.0;
  double threshold = 0.02;

  std::string to_json() const;
  std::string to_csv(const std::string& model = "pred") const;
};

EvalReport evaluate(const std::vector<EvalEpisode>& episodes, double threshold = 0.02);

// Hook for image-embedding similarity filters; no implementation ships.
class ExternalSimilarity {
 public:
  virtual ~ExternalSimilarity() = default;
  virtual double similarity(const GrayImage& a, const GrayImage& b) = 0;
};

}  // namespace cadact::metrics

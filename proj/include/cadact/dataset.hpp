#pragma once

// Episode pipeline (parse, compile, simulate, filter, persist) and the
// dataset-level stats / eval / vqa / validate commands.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cadact/compiler.hpp"
#include "cadact/metrics.hpp"
#include "cadact/sequence.hpp"
#include "cadact/sim.hpp"

namespace cadact::dataset {

namespace fs = std::filesystem;

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const fs::path& path);

// First 16 hex digits of sha256(source_id, seed).
std::string episode_id(const std::string& source_id, std::uint64_t seed);

struct BuildConfig {
  fs::path input;
  fs::path output;
  std::uint64_t seed = 0;
  int workers = 1;
  int frame_width = 224;
  int frame_height = 224;
  double threshold = 0.02;
  bool delays = true;
  bool jitter = true;
  bool zoom = true;
  bool visibility = true;
  bool render_frames = true;
  std::size_t cloud_samples = 4096;
};

// In-memory result of running one sequence through the pipeline.
struct EpisodeResult {
  std::string id;
  std::string source_id;
  std::string status;  // completed, terminated, parse_error, invalid_sequence, compile_error
  std::string error;
  std::string sequence_text;
  std::vector<geo::LoweredRecord> lowered;
  act::ActionProgram program;
  sim::EpisodeTrace trace;
  kernel::Solid oracle;
  metrics::Verdict verdict;
};

EpisodeResult process_sequence(const seq::CadSequence& seq, const BuildConfig& cfg);
EpisodeResult failed_episode(const std::string& source_id, const std::string& status, const std::string& error,
                             const std::string& text, std::uint64_t seed);

// Writes the episode directory; the manifest goes last.
void write_episode(const fs::path& dir, const EpisodeResult& ep, const BuildConfig& cfg);

// Throws ChecksumMismatch / Io when a referenced file is missing or altered.
void verify_episode(const fs::path& dir);

struct BuildSummary {
  std::size_t episodes = 0;
  std::size_t built = 0;
  std::size_t skipped = 0;  // valid manifests found from an earlier run
  std::size_t passed = 0;
  std::map<std::string, std::size_t> status_counts;
  std::vector<std::string> episode_ids;

  double success_rate() const { return episodes ? static_cast<double>(passed) / static_cast<double>(episodes) : 0.0; }
  // Run counts (built, skipped) vary with resumption and stay out of summary.json.
  std::string to_json(bool run_counts = true) const;
};

BuildSummary cmd_build(const BuildConfig& cfg);

struct ManifestView {
  fs::path dir;
  std::string id;
  std::string source_id;
  std::string status;
  std::string sequence_text;
  std::size_t action_count = 0;
  std::string verdict;
  double cd = 0.0;
};

// Episode directories holding a manifest, sorted by id.
std::vector<ManifestView> list_episodes(const fs::path& root);

struct JsonlEpisode {
  std::vector<act::ActionVector> vectors;
  std::vector<act::HlEvent> hl;
  std::vector<double> dt;
};
JsonlEpisode read_actions(const fs::path& path);

struct DatasetStats {
  std::map<std::string, std::size_t> commands;
  std::map<std::size_t, std::size_t> lengths;  // bucket start (width 20) -> episodes
  std::array<std::size_t, 10> move_x{}, move_y{};
  std::array<std::size_t, 20> type_values{};   // [-1,1] in 0.1 steps
  std::size_t scroll_up = 0, scroll_down = 0;
  std::map<std::string, std::size_t> keys;
  std::map<int, std::size_t> tab_counts;       // count field of tab presses -> actions
  std::size_t episodes = 0;

  double scroll_up_fraction() const;
  double scroll_down_fraction() const;
  // CSV files keyed by file name.
  std::map<std::string, std::string> to_csv() const;
};

DatasetStats stats_from_episodes(const std::vector<JsonlEpisode>& episodes);
// Throws EmptyDataset.
DatasetStats cmd_stats(const fs::path& root);

// Predictions directory holds <id>/actions.jsonl for every ground-truth id.
// Throws IdMismatch.
metrics::EvalReport cmd_eval(const fs::path& pred_root, const fs::path& gt_root, double threshold = 0.02);

struct VqaSummary {
  std::map<std::string, std::size_t> written;  // family -> questions
  std::map<std::string, std::string> skipped;  // family -> reason
};

// Writes <out>/<family>.json and the image assets under <out>/assets.
// Explicitly requested families that cannot be generated throw
// InsufficientEpisodes; with an empty list unsatisfiable families are skipped.
VqaSummary cmd_vqa(const fs::path& root, const fs::path& out, std::size_t per_family, std::uint64_t seed,
                   const std::vector<std::string>& families = {});

struct ValidateLine {
  std::size_t line_number = 0;
  std::string source_id;
  bool ok = false;
  std::vector<std::string> problems;
};

std::vector<ValidateLine> validate_cadseq(const fs::path& path);

}  // namespace cadact::dataset

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "cadact/dataset.hpp"
#include "cadact/error.hpp"
#include "cadact/synth.hpp"

using namespace cadact;
namespace fs = std::filesystem;

namespace {

std::uint64_t env_seed() {
  const char* s = std::getenv("CADACT_SEED");
  if (!s || !*s) return 0;
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    fail(ErrorCode::Config, std::string("CADACT_SEED is not an unsigned integer: ") + s);
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sketch-and-extrude sequences to UI action episodes"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed;

  dataset::BuildConfig bc;
  bool no_delays = false, no_jitter = false, no_zoom = false, no_visibility = false, no_frames = false;
  auto* build = app.add_subcommand("build", "Compile, simulate, filter and persist episodes");
  build->add_option("-i,--input", bc.input, "Sequence file, one sequence per line")->required();
  build->add_option("-o,--output", bc.output, "Output dataset directory")->required();
  build->add_option("--seed", seed, "Seed (falls back to CADACT_SEED, then 0)");
  build->add_option("-j,--workers", bc.workers, "Worker threads")->capture_default_str();
  build->add_option("--width", bc.frame_width, "Frame width")->capture_default_str();
  build->add_option("--height", bc.frame_height, "Frame height")->capture_default_str();
  build->add_option("--threshold", bc.threshold, "Chamfer threshold of the quality filter")->capture_default_str();
  build->add_option("--samples", bc.cloud_samples, "Surface samples per cloud")->capture_default_str();
  build->add_flag("--no-delays", no_delays, "Fixed inter-action delay");
  build->add_flag("--no-jitter", no_jitter, "Click region centers instead of random interior points");
  build->add_flag("--no-zoom", no_zoom, "Never zoom around small features");
  build->add_flag("--no-visibility", no_visibility, "Keep planes and parts visible while sketching");
  build->add_flag("--no-frames", no_frames, "Skip keyframe rendering");

  fs::path stats_root, stats_out;
  auto* stats = app.add_subcommand("stats", "Action statistics as CSV files");
  stats->add_option("dataset", stats_root, "Dataset directory")->required();
  stats->add_option("-o,--out", stats_out, "Output directory (default <dataset>/stats)");

  fs::path pred_root, gt_root, eval_out;
  double eval_threshold = 0.02;
  std::string model = "model";
  auto* eval = app.add_subcommand("eval", "Score predicted action files against a dataset");
  eval->add_option("--pred", pred_root, "Directory of <episode>/actions.jsonl predictions")->required();
  eval->add_option("--gt", gt_root, "Ground-truth dataset directory")->required();
  eval->add_option("-o,--out", eval_out, "Directory for eval.json and eval.csv (default: stdout only)");
  eval->add_option("--threshold", eval_threshold, "Chamfer success threshold")->capture_default_str();
  eval->add_option("--model", model, "Model name in the CSV row")->capture_default_str();

  fs::path vqa_root, vqa_out;
  std::size_t per_family = 200;
  std::vector<std::string> families;
  auto* vqa = app.add_subcommand("vqa", "Generate multiple-choice questions");
  vqa->add_option("dataset", vqa_root, "Dataset directory")->required();
  vqa->add_option("-o,--out", vqa_out, "Output directory")->required();
  vqa->add_option("-n,--per-family", per_family, "Questions per family")->capture_default_str();
  vqa->add_option("--seed", seed, "Seed (falls back to CADACT_SEED, then 0)");
  vqa->add_option("-f,--family", families, "Restrict to these families");

  fs::path validate_input;
  auto* validate = app.add_subcommand("validate", "Check a sequence file line by line");
  validate->add_option("input", validate_input, "Sequence file")->required();

  std::size_t synth_count = 10;
  fs::path synth_out;
  auto* synth_cmd = app.add_subcommand("synth", "Write randomly generated sequences");
  synth_cmd->add_option("-n,--count", synth_count, "Number of sequences")->capture_default_str();
  synth_cmd->add_option("-o,--out", synth_out, "Output file (default stdout)");
  synth_cmd->add_option("--seed", seed, "First seed (falls back to CADACT_SEED, then 0)");

  CLI11_PARSE(app, argc, argv);

  try {
    const std::uint64_t s = seed ? *seed : env_seed();
    if (build->parsed()) {
      bc.seed = s;
      bc.delays = !no_delays;
      bc.jitter = !no_jitter;
      bc.zoom = !no_zoom;
      bc.visibility = !no_visibility;
      bc.render_frames = !no_frames;
      const auto summary = dataset::cmd_build(bc);
      std::cout << summary.to_json();
    } else if (stats->parsed()) {
      const auto st = dataset::cmd_stats(stats_root);
      const fs::path out = stats_out.empty() ? stats_root / "stats" : stats_out;
      fs::create_directories(out);
      for (const auto& [name, csv] : st.to_csv()) write_text(out / name, csv);
      std::cout << "wrote " << st.to_csv().size() << " CSV files for " << st.episodes << " episodes to " << out.string()
                << "\n";
    } else if (eval->parsed()) {
      const auto report = dataset::cmd_eval(pred_root, gt_root, eval_threshold);
      if (!eval_out.empty()) {
        fs::create_directories(eval_out);
        write_text(eval_out / "eval.json", report.to_json());
        write_text(eval_out / "eval.csv", report.to_csv(model));
      }
      std::cout << report.to_json();
    } else if (vqa->parsed()) {
      const auto summary = dataset::cmd_vqa(vqa_root, vqa_out, per_family, s, families);
      for (const auto& [f, n] : summary.written) std::cout << f << ": " << n << " questions\n";
      for (const auto& [f, why] : summary.skipped) std::cout << f << ": skipped (" << why << ")\n";
    } else if (validate->parsed()) {
      std::size_t bad = 0;
      for (const auto& line : dataset::validate_cadseq(validate_input)) {
        if (line.ok) continue;
        ++bad;
        for (const auto& p : line.problems) std::cout << "line " << line.line_number << " (" << line.source_id << "): " << p << "\n";
      }
      std::cout << (bad ? std::to_string(bad) + " invalid line(s)\n" : "ok\n");
      return bad ? 1 : 0;
    } else if (synth_cmd->parsed()) {
      std::string text;
      for (std::size_t i = 0; i < synth_count; ++i) text += seq::serialize_sequence(synth::generate_sequence(s + i)) + "\n";
      if (synth_out.empty())
        std::cout << text;
      else
        write_text(synth_out, text);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::Config ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

#include "cadact/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <openssl/evp.h>

#include <json.hpp>

#include "cadact/error.hpp"
#include "cadact/render.hpp"
#include "cadact/vqa.hpp"

namespace cadact::dataset {

using ojson = nlohmann::ordered_json;
using kernel::PointCloud;

std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    fail(ErrorCode::Io, "sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Write-then-rename so a crash never leaves a truncated file under the final name.
void write_atomic(const fs::path& path, std::string_view bytes) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::Io, "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorCode::Io, "short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string frame_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06zu.pgm", i);
  return buf;
}

std::string cloud_text(const PointCloud& cloud) {
  std::string out;
  char buf[96];
  for (const auto& p : cloud) {
    std::snprintf(buf, sizeof buf, "%.9g %.9g %.9g\n", p.x(), p.y(), p.z());
    out += buf;
  }
  return out;
}

PointCloud parse_cloud(const std::string& text) {
  PointCloud out;
  std::istringstream in(text);
  double x, y, z;
  while (in >> x >> y >> z) out.emplace_back(x, y, z);
  if (!in.eof()) fail(ErrorCode::Io, "malformed point cloud");
  return out;
}

std::uint64_t id_seed(const std::string& id) { return std::stoull(id, nullptr, 16); }

kernel::Camera target_camera() {
  kernel::Camera cam = kernel::isometric_camera();
  cam.half_extent = 1.0;
  return cam;
}

}  // namespace

std::string sha256_file(const fs::path& path) { return sha256_hex(read_file(path)); }

std::string episode_id(const std::string& source_id, std::uint64_t seed) {
  return sha256_hex(source_id + '\n' + std::to_string(seed)).substr(0, 16);
}

EpisodeResult failed_episode(const std::string& source_id, const std::string& status, const std::string& error,
                             const std::string& text, std::uint64_t seed) {
  EpisodeResult ep;
  ep.id = episode_id(source_id, seed);
  ep.source_id = source_id;
  ep.status = status;
  ep.error = error;
  ep.sequence_text = text;
  ep.verdict.reason = error;
  return ep;
}

EpisodeResult process_sequence(const seq::CadSequence& sequence, const BuildConfig& cfg) {
  const std::string text = seq::serialize_sequence(sequence);
  const auto report = seq::validate(sequence);
  if (!report.ok())
    return failed_episode(sequence.source_id, "invalid_sequence", report.violations.front().message, text, cfg.seed);

  EpisodeResult ep;
  ep.id = episode_id(sequence.source_id, cfg.seed);
  ep.source_id = sequence.source_id;
  ep.sequence_text = text;
  try {
    ep.lowered = geo::lower_sequence(sequence);
  } catch (const Error& e) {
    return failed_episode(sequence.source_id, "invalid_sequence", e.what(), text, cfg.seed);
  }
  try {
    compile::CompileConfig cc;
    cc.delays = cfg.delays;
    cc.jitter = cfg.jitter;
    cc.zoom = cfg.zoom;
    cc.visibility = cfg.visibility;
    Rng rng(Rng::mix(cfg.seed ^ id_seed(ep.id)));
    ep.program = compile::compile_lowered(ep.lowered, cc, rng);
    ep.oracle = kernel::build_solid(ep.lowered);
  } catch (const Error& e) {
    return failed_episode(sequence.source_id, "compile_error", e.what(), text, cfg.seed);
  }

  sim::RunConfig rc;
  rc.frame = {cfg.frame_width, cfg.frame_height};
  rc.render_frames = cfg.render_frames;
  ep.trace = sim::run(ep.program, rc);
  if (ep.trace.completed()) {
    ep.status = "completed";
    ep.verdict = metrics::quality_filter(ep.oracle, ep.trace.final_doc.solid, {cfg.cloud_samples, 0, cfg.threshold});
    ep.error = ep.verdict.reason;
  } else {
    ep.status = "terminated";
    ep.error = ep.trace.reason;
    ep.verdict.reason = ep.trace.reason;
  }
  return ep;
}

void write_episode(const fs::path& dir, const EpisodeResult& ep, const BuildConfig& cfg) {
  if (fs::exists(dir)) fs::remove_all(dir);
  fs::create_directories(dir);

  ojson files = ojson::object();
  auto put = [&](const std::string& name, const std::string& bytes) {
    write_atomic(dir / name, bytes);
    return ojson{{"path", name}, {"sha256", sha256_hex(bytes)}};
  };
  const bool has_program = !ep.program.actions.empty();
  if (has_program) {
    files["actions"] = put("actions.jsonl", ep.program.to_jsonl());
    if (!ep.oracle.empty()) {
      files["target"] = put("target.pgm", encode_pgm(kernel::render(ep.oracle, target_camera(), cfg.frame_width,
                                                                     cfg.frame_height, 255)));
      try {
        files["cloud"] = put("cloud.xyz", cloud_text(kernel::sample_points(ep.oracle, cfg.cloud_samples, 0)));
      } catch (const Error&) {
      }
    }
    ojson frames = ojson::array();
    if (cfg.render_frames) {
      fs::create_directories(dir / "frames");
      for (std::size_t i = 0; i < ep.trace.steps.size(); ++i) {
        const std::string name = "frames/" + frame_name(i);
        frames.push_back(put(name, encode_pgm(ep.trace.steps[i].frame)));
      }
    }
    files["frames"] = std::move(frames);
  }

  ojson m;
  m["episode_id"] = ep.id;
  m["source_id"] = ep.source_id;
  m["seed"] = cfg.seed;
  m["status"] = ep.status;
  m["error"] = ep.error;
  m["action_count"] = ep.program.actions.size();
  m["steps_executed"] = ep.trace.steps.size();
  m["hl_event_count"] = ep.program.hl_events.size();
  m["verdict"] = {{"kind", metrics::to_string(ep.verdict.kind)}, {"cd", ep.verdict.cd}};
  m["sequence"] = ep.sequence_text;
  m["files"] = std::move(files);
  write_atomic(dir / "manifest.json", m.dump(2) + "\n");
}

namespace {

ojson read_manifest(const fs::path& dir) {
  const fs::path path = dir / "manifest.json";
  if (!fs::exists(path)) fail(ErrorCode::Io, "missing " + path.string());
  try {
    return ojson::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Io, path.string() + ": " + e.what());
  }
}

void check_file(const fs::path& dir, const ojson& entry) {
  const fs::path path = dir / entry.at("path").get<std::string>();
  if (!fs::exists(path)) fail(ErrorCode::Io, "missing " + path.string());
  if (sha256_file(path) != entry.at("sha256").get<std::string>())
    fail(ErrorCode::ChecksumMismatch, path.string() + " does not match its manifest checksum");
}

}  // namespace

void verify_episode(const fs::path& dir) {
  const ojson m = read_manifest(dir);
  try {
    for (const char* key : {"episode_id", "source_id", "status", "action_count", "hl_event_count", "verdict", "files"})
      if (!m.contains(key)) fail(ErrorCode::Io, dir.string() + ": manifest lacks " + key);
    const auto& files = m.at("files");
    for (const char* key : {"actions", "target", "cloud"})
      if (files.contains(key)) check_file(dir, files.at(key));
    if (files.contains("frames"))
      for (const auto& f : files.at("frames")) check_file(dir, f);
    if (files.contains("actions")) {
      const auto steps = act::parse_jsonl(read_file(dir / "actions.jsonl"));
      if (steps.size() != m.at("action_count").get<std::size_t>())
        fail(ErrorCode::ChecksumMismatch, dir.string() + ": action count differs from manifest");
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Io, dir.string() + ": " + e.what());
  }
}

std::string BuildSummary::to_json(bool run_counts) const {
  ojson j;
  j["episodes"] = episodes;
  if (run_counts) {
    j["built"] = built;
    j["skipped"] = skipped;
  }
  j["passed"] = passed;
  j["success_rate"] = success_rate();
  j["status_counts"] = status_counts;
  j["episode_ids"] = episode_ids;
  return j.dump(2) + "\n";
}

namespace {

void check_config(const BuildConfig& cfg) {
  if (cfg.workers < 1) fail(ErrorCode::Config, "workers must be at least 1");
  if (cfg.frame_width < 16 || cfg.frame_height < 16) fail(ErrorCode::Config, "frame resolution below 16 px");
  if (!(cfg.threshold > 0)) fail(ErrorCode::Config, "threshold must be positive");
  if (cfg.cloud_samples < 4) fail(ErrorCode::Config, "cloud sample count below 4");
  if (!fs::is_regular_file(cfg.input)) fail(ErrorCode::Config, "input " + cfg.input.string() + " is not a file");
}

struct Outcome {
  std::string id, status, verdict;
  bool skipped = false;
};

}  // namespace

BuildSummary cmd_build(const BuildConfig& cfg) {
  check_config(cfg);
  auto lines = seq::read_cadseq(cfg.input.string());

  // Distinct source ids keep episode ids distinct.
  std::map<std::string, int> seen;
  for (auto& line : lines) {
    const int k = seen[line.source_id]++;
    if (k == 0) continue;
    line.source_id += "#" + std::to_string(k);
    if (auto* s = std::get_if<seq::CadSequence>(&line.result)) s->source_id = line.source_id;
  }

  fs::create_directories(cfg.output);
  std::vector<Outcome> outcomes(lines.size());
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::optional<std::string> fatal;

  auto work = [&] {
    for (std::size_t i = next++; i < lines.size(); i = next++) {
      const auto& line = lines[i];
      Outcome& o = outcomes[i];
      o.id = episode_id(line.source_id, cfg.seed);
      const fs::path dir = cfg.output / o.id;
      try {
        try {
          verify_episode(dir);
          const ojson m = read_manifest(dir);
          if (m.at("source_id") == line.source_id && m.at("seed") == cfg.seed) {
            o.status = m.at("status").get<std::string>();
            o.verdict = m.at("verdict").at("kind").get<std::string>();
            o.skipped = true;
            continue;
          }
        } catch (const std::exception&) {
        }
        EpisodeResult ep;
        if (const auto* e = std::get_if<Error>(&line.result)) {
          ep = failed_episode(line.source_id, "parse_error", e->what(), line.text, cfg.seed);
        } else {
          try {
            ep = process_sequence(std::get<seq::CadSequence>(line.result), cfg);
          } catch (const Error& e) {
            ep = failed_episode(line.source_id, "compile_error", e.what(), line.text, cfg.seed);
          }
        }
        write_episode(dir, ep, cfg);
        o.status = ep.status;
        o.verdict = std::string(metrics::to_string(ep.verdict.kind));
      } catch (const std::exception& e) {
        std::lock_guard lock(err_mu);
        if (!fatal) fatal = e.what();
      }
    }
  };
  const int n_threads = std::min<int>(cfg.workers, static_cast<int>(std::max<std::size_t>(lines.size(), 1)));
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (fatal) fail(ErrorCode::Io, *fatal);

  BuildSummary s;
  s.episodes = outcomes.size();
  for (const auto& o : outcomes) {
    (o.skipped ? s.skipped : s.built) += 1;
    s.status_counts[o.status] += 1;
    s.passed += o.verdict == "pass";
    s.episode_ids.push_back(o.id);
  }
  write_atomic(cfg.output / "summary.json", s.to_json(false));
  return s;
}

std::vector<ManifestView> list_episodes(const fs::path& root) {
  if (!fs::is_directory(root)) fail(ErrorCode::Io, root.string() + " is not a directory");
  std::vector<ManifestView> out;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (!entry.is_directory() || !fs::exists(entry.path() / "manifest.json")) continue;
    const ojson m = read_manifest(entry.path());
    ManifestView v;
    v.dir = entry.path();
    try {
      v.id = m.at("episode_id").get<std::string>();
      v.source_id = m.at("source_id").get<std::string>();
      v.status = m.at("status").get<std::string>();
      v.sequence_text = m.value("sequence", "");
      v.action_count = m.at("action_count").get<std::size_t>();
      v.verdict = m.at("verdict").at("kind").get<std::string>();
      v.cd = m.at("verdict").at("cd").get<double>();
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::Io, entry.path().string() + ": " + e.what());
    }
    out.push_back(std::move(v));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return out;
}

JsonlEpisode read_actions(const fs::path& path) {
  JsonlEpisode ep;
  const auto steps = act::parse_jsonl(read_file(path));
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& s = steps[i];
    if (s.index != i) fail(ErrorCode::MalformedVector, path.string() + ": step index " + std::to_string(s.index) +
                                                           " out of order");
    if (!act::well_formed(s.vector)) fail(ErrorCode::MalformedVector, path.string() + ": bad vector at step " +
                                                                          std::to_string(i));
    ep.vectors.push_back(s.vector);
    ep.dt.push_back(s.dt);
    if (s.hl) ep.hl.push_back({i, *s.hl});
  }
  return ep;
}

// ---------------------------------------------------------------------------
// Stats

double DatasetStats::scroll_up_fraction() const {
  const std::size_t n = scroll_up + scroll_down;
  return n ? static_cast<double>(scroll_up) / static_cast<double>(n) : 0.0;
}

double DatasetStats::scroll_down_fraction() const {
  const std::size_t n = scroll_up + scroll_down;
  return n ? static_cast<double>(scroll_down) / static_cast<double>(n) : 0.0;
}

DatasetStats stats_from_episodes(const std::vector<JsonlEpisode>& episodes) {
  if (episodes.empty()) fail(ErrorCode::EmptyDataset, "no episodes");
  DatasetStats s;
  for (int c = 0; c < act::kCmdCount; ++c) s.commands[std::string(act::cmd_name(static_cast<act::Cmd>(c)))] = 0;
  for (const auto& ep : episodes) {
    ++s.episodes;
    ++s.lengths[ep.vectors.size() / 20 * 20];
    for (const auto& v : ep.vectors) {
      const auto cmd = static_cast<act::Cmd>(v[0]);
      ++s.commands[std::string(act::cmd_name(cmd))];
      switch (cmd) {
        case act::Cmd::MoveTo:
          ++s.move_x[static_cast<std::size_t>(v[1] / 100)];
          ++s.move_y[static_cast<std::size_t>(v[2] / 100)];
          break;
        case act::Cmd::PressKey: {
          ++s.keys[std::string(act::key_name(static_cast<act::Key>(v[3])))];
          if (v[3] == static_cast<int>(act::Key::Tab)) ++s.tab_counts[v[4]];
          break;
        }
        case act::Cmd::Scroll: (v[5] >= 500 ? s.scroll_up : s.scroll_down) += 1; break;
        case act::Cmd::Type: ++s.type_values[static_cast<std::size_t>(v[6] / 50)]; break;
        case act::Cmd::Click: break;
      }
    }
  }
  return s;
}

std::map<std::string, std::string> DatasetStats::to_csv() const {
  std::map<std::string, std::string> out;
  char buf[128];
  std::size_t total = 0;
  for (const auto& [k, n] : commands) total += n;

  std::string c = "command,count,fraction\n";
  for (const auto& [k, n] : commands) {
    std::snprintf(buf, sizeof buf, "%s,%zu,%.6f\n", k.c_str(), n, total ? static_cast<double>(n) / total : 0.0);
    c += buf;
  }
  out["commands.csv"] = c;

  std::string l = "length_from,length_to,episodes\n";
  for (const auto& [b, n] : lengths) l += std::to_string(b) + "," + std::to_string(b + 19) + "," + std::to_string(n) + "\n";
  out["lengths.csv"] = l;

  std::string m = "bin_from,bin_to,x_count,y_count\n";
  for (std::size_t i = 0; i < move_x.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.1f,%.1f,%zu,%zu\n", i / 10.0, (i + 1) / 10.0, move_x[i], move_y[i]);
    m += buf;
  }
  out["moveto.csv"] = m;

  std::string t = "value_from,value_to,count\n";
  for (std::size_t i = 0; i < type_values.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.1f,%.1f,%zu\n", -1.0 + i / 10.0, -1.0 + (i + 1) / 10.0, type_values[i]);
    t += buf;
  }
  out["type_values.csv"] = t;

  std::snprintf(buf, sizeof buf, "direction,count,fraction\nup,%zu,%.6f\ndown,%zu,%.6f\n", scroll_up,
                scroll_up_fraction(), scroll_down, scroll_down_fraction());
  out["scroll.csv"] = buf;

  std::string k = "key,count\n";
  for (const auto& [name, n] : keys) k += name + "," + std::to_string(n) + "\n";
  out["keys.csv"] = k;

  std::string tb = "tab_presses,actions\n";
  for (const auto& [n, count] : tab_counts) tb += std::to_string(n) + "," + std::to_string(count) + "\n";
  out["tabs.csv"] = tb;
  return out;
}

DatasetStats cmd_stats(const fs::path& root) {
  std::vector<JsonlEpisode> eps;
  for (const auto& v : list_episodes(root))
    if (fs::exists(v.dir / "actions.jsonl")) eps.push_back(read_actions(v.dir / "actions.jsonl"));
  if (eps.empty()) fail(ErrorCode::EmptyDataset, root.string() + " holds no episodes with actions");
  return stats_from_episodes(eps);
}

// ---------------------------------------------------------------------------
// Eval

metrics::EvalReport cmd_eval(const fs::path& pred_root, const fs::path& gt_root, double threshold) {
  std::vector<ManifestView> gt;
  for (auto& v : list_episodes(gt_root))
    if (v.status == "completed" && fs::exists(v.dir / "actions.jsonl")) gt.push_back(std::move(v));
  if (gt.empty()) fail(ErrorCode::EmptyDataset, gt_root.string() + " holds no completed episodes");
  if (!fs::is_directory(pred_root)) fail(ErrorCode::Io, pred_root.string() + " is not a directory");

  std::set<std::string> gt_ids, pred_ids;
  for (const auto& v : gt) gt_ids.insert(v.id);
  for (const auto& entry : fs::directory_iterator(pred_root))
    if (entry.is_directory() && fs::exists(entry.path() / "actions.jsonl")) pred_ids.insert(entry.path().filename().string());
  if (gt_ids != pred_ids) {
    std::string missing;
    for (const auto& id : gt_ids)
      if (!pred_ids.count(id)) missing += " -" + id;
    for (const auto& id : pred_ids)
      if (!gt_ids.count(id)) missing += " +" + id;
    fail(ErrorCode::IdMismatch, "prediction ids differ from ground truth:" + missing);
  }

  std::vector<metrics::EvalEpisode> episodes;
  for (const auto& v : gt) {
    metrics::EvalEpisode e;
    e.id = v.id;
    e.gt = read_actions(v.dir / "actions.jsonl").vectors;
    const std::string pred_text = read_file(pred_root / v.id / "actions.jsonl");
    std::vector<act::JsonlStep> steps;
    try {
      steps = act::parse_jsonl(pred_text);
    } catch (const Error&) {
    }
    for (const auto& s : steps) e.pred.push_back(s.vector);
    try {
      sim::RunConfig rc;
      rc.render_frames = false;
      const auto trace = sim::run_vectors(e.pred, rc);
      if (trace.completed() && !trace.final_doc.solid.empty() && fs::exists(v.dir / "cloud.xyz")) {
        const auto gt_cloud = parse_cloud(read_file(v.dir / "cloud.xyz"));
        const auto pred_cloud = kernel::sample_points(trace.final_doc.solid, gt_cloud.size(), 0);
        e.cd = metrics::align_pca(gt_cloud, pred_cloud).cd;
      }
    } catch (const Error&) {
      e.cd.reset();
    }
    episodes.push_back(std::move(e));
  }
  return metrics::evaluate(episodes, threshold);
}

// ---------------------------------------------------------------------------
// VQA

namespace {

std::vector<vqa::Episode> load_vqa_episodes(const fs::path& root) {
  std::vector<vqa::Episode> out;
  for (const auto& v : list_episodes(root)) {
    if (v.status != "completed" || v.verdict != "pass") continue;
    const auto parsed = seq::parse_file_text(v.sequence_text);
    if (parsed.size() != 1 || !std::holds_alternative<seq::CadSequence>(parsed[0].result)) continue;
    const auto actions = read_actions(v.dir / "actions.jsonl");
    vqa::Episode e;
    e.id = v.id;
    e.sequence = std::get<seq::CadSequence>(parsed[0].result);
    e.sequence.source_id = v.source_id;
    e.hl = actions.hl;
    e.action_count = actions.vectors.size();
    const fs::path frames = v.dir / "frames";
    auto vectors = std::make_shared<std::vector<act::ActionVector>>(actions.vectors);
    e.frame = [frames, vectors](std::size_t i) {
      const fs::path p = frames / frame_name(i);
      return fs::exists(p) ? read_pgm(p) : sim::frame_after(*vectors, i);
    };
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace

VqaSummary cmd_vqa(const fs::path& root, const fs::path& out, std::size_t per_family, std::uint64_t seed,
                   const std::vector<std::string>& families) {
  if (per_family == 0) fail(ErrorCode::Config, "questions per family must be positive");
  std::vector<vqa::Family> wanted;
  for (const auto& name : families) {
    const auto f = vqa::family_from_name(name);
    if (!f) fail(ErrorCode::Config, "unknown question family " + name);
    wanted.push_back(*f);
  }
  const bool explicit_list = !wanted.empty();
  if (!explicit_list) wanted.assign(vqa::all_families().begin(), vqa::all_families().end());

  const auto episodes = load_vqa_episodes(root);
  if (episodes.empty()) fail(ErrorCode::InsufficientEpisodes, root.string() + " holds no passing episodes");

  fs::create_directories(out / "assets");
  VqaSummary summary;
  for (const auto f : wanted) {
    const std::string name(vqa::family_name(f));
    std::vector<vqa::Question> qs;
    try {
      qs = vqa::generate_batch(f, episodes, per_family, seed);
    } catch (const Error& e) {
      if (explicit_list || e.code() != ErrorCode::InsufficientEpisodes) throw;
      summary.skipped[name] = e.what();
      continue;
    }
    std::string body = "[\n";
    for (std::size_t i = 0; i < qs.size(); ++i) {
      for (const auto& [img_name, img] : qs[i].images) write_atomic(out / "assets" / (img_name + ".pgm"), encode_pgm(img));
      body += "  " + qs[i].to_json("assets") + (i + 1 < qs.size() ? ",\n" : "\n");
    }
    body += "]\n";
    write_atomic(out / (name + ".json"), body);
    summary.written[name] = qs.size();
  }
  return summary;
}

// ---------------------------------------------------------------------------
// Validate

std::vector<ValidateLine> validate_cadseq(const fs::path& path) {
  std::vector<ValidateLine> out;
  for (const auto& line : seq::read_cadseq(path.string())) {
    ValidateLine v;
    v.line_number = line.line_number;
    v.source_id = line.source_id;
    if (const auto* e = std::get_if<Error>(&line.result)) {
      v.problems.push_back(e->what());
    } else {
      const auto& s = std::get<seq::CadSequence>(line.result);
      for (const auto& viol : seq::validate(s).violations)
        v.problems.push_back("record " + std::to_string(viol.record) + ": " + viol.message);
      if (v.problems.empty()) {
        try {
          (void)kernel::build_solid(geo::lower_sequence(s));
        } catch (const Error& e) {
          v.problems.push_back(e.what());
        }
      }
    }
    v.ok = v.problems.empty();
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace cadact::dataset

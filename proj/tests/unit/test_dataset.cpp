#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "../support/episodes.hpp"
#include "cadact/dataset.hpp"
#include "cadact/error.hpp"

using namespace cadact;
using namespace cadact::dataset;
namespace te = testing_episodes;
using nlohmann::json;

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

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Relative path -> bytes for every regular file under root.
std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = slurp(e.path());
  return out;
}

BuildConfig small_config(const fs::path& in, const fs::path& out) {
  BuildConfig cfg;
  cfg.input = in;
  cfg.output = out;
  cfg.seed = 17;
  cfg.frame_width = cfg.frame_height = 32;
  cfg.cloud_samples = 512;
  return cfg;
}

}  // namespace

TEST_CASE("sha256 known vectors") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(episode_id("a", 1) == sha256_hex("a\n1").substr(0, 16));
  CHECK(episode_id("a", 1) != episode_id("a", 2));
}

TEST_CASE("build, verify, resume") {
  const auto root = te::fresh_dir("build");
  const fs::path in = root / "seqs.cadseq";
  te::write_cadseq(in, 100, 4);
  {
    std::ofstream app(in, std::ios::app);
    app << "broken|0,1,2\n";
  }
  auto cfg = small_config(in, root / "a");
  const auto s = cmd_build(cfg);
  CHECK(s.episodes == 5);
  CHECK(s.built == 5);
  CHECK(s.status_counts.at("completed") == 4);
  CHECK(s.status_counts.at("parse_error") == 1);
  CHECK(s.passed == 4);

  const auto eps = list_episodes(cfg.output);
  REQUIRE(eps.size() == 5);
  for (std::size_t i = 0; i + 1 < eps.size(); ++i) CHECK(eps[i].id < eps[i + 1].id);
  for (const auto& e : eps) {
    CHECK_NOTHROW(verify_episode(e.dir));
    const auto m = json::parse(slurp(e.dir / "manifest.json"));
    CHECK(m.at("episode_id") == e.id);
    CHECK(e.id == episode_id(e.source_id, 17));
    if (e.status != "completed") continue;
    const auto acts = read_actions(e.dir / "actions.jsonl");
    CHECK(acts.vectors.size() == m.at("action_count").get<std::size_t>());
    CHECK(m.at("files").at("frames").size() == acts.vectors.size());
    CHECK(m.at("files").at("cloud").at("sha256") == sha256_hex(slurp(e.dir / "cloud.xyz")));
  }

  // Same inputs with more workers give the same bytes.
  auto cfg2 = cfg;
  cfg2.output = root / "b";
  cfg2.workers = 3;
  cmd_build(cfg2);
  const auto ta = tree(cfg.output);
  CHECK(ta == tree(cfg2.output));

  // Resume rebuilds only what is missing or damaged.
  fs::remove_all(eps[0].dir);
  std::ofstream(eps[1].dir / "target.pgm", std::ios::app) << "x";
  const auto r = cmd_build(cfg);
  CHECK(r.built == 2);
  CHECK(r.skipped == 3);
  CHECK(tree(cfg.output) == ta);
}

TEST_CASE("tampered files are detected") {
  const auto root = te::fresh_dir("tamper");
  te::write_cadseq(root / "s.cadseq", 3, 1);
  auto cfg = small_config(root / "s.cadseq", root / "out");
  cfg.render_frames = false;
  cmd_build(cfg);
  const auto dir = list_episodes(cfg.output).at(0).dir;
  CHECK(json::parse(slurp(dir / "manifest.json")).at("files").at("frames").empty());
  CHECK_FALSE(fs::exists(dir / "frames"));
  auto text = slurp(dir / "cloud.xyz");
  text[0] = text[0] == '1' ? '2' : '1';
  std::ofstream(dir / "cloud.xyz", std::ios::binary) << text;
  CHECK(code_of([&] { verify_episode(dir); }) == ErrorCode::ChecksumMismatch);
  fs::remove(dir / "actions.jsonl");
  CHECK(code_of([&] { verify_episode(dir); }) != ErrorCode::Config);
}

TEST_CASE("bad configuration") {
  const auto root = te::fresh_dir("config");
  auto cfg = small_config(root / "missing.cadseq", root / "out");
  CHECK(code_of([&] { cmd_build(cfg); }) == ErrorCode::Config);
  te::write_cadseq(root / "s.cadseq", 0, 1);
  cfg.input = root / "s.cadseq";
  cfg.workers = 0;
  CHECK(code_of([&] { cmd_build(cfg); }) == ErrorCode::Config);
}

TEST_CASE("stats match a hand tally of the action files") {
  const auto root = te::fresh_dir("stats");
  te::write_cadseq(root / "s.cadseq", 40, 2);
  auto cfg = small_config(root / "s.cadseq", root / "out");
  cfg.render_frames = false;
  cmd_build(cfg);
  const auto st = cmd_stats(cfg.output);

  static const char* kCmd[] = {"MoveTo", "PressKey", "Scroll", "Type", "Click"};
  std::map<std::string, std::size_t> cmds, keys;
  std::map<std::size_t, std::size_t> lengths;
  std::array<std::size_t, 10> mx{}, my{};
  std::array<std::size_t, 20> tv{};
  std::size_t up = 0, down = 0;
  for (const auto& e : list_episodes(cfg.output)) {
    std::istringstream lines(slurp(e.dir / "actions.jsonl"));
    std::string line;
    std::size_t n = 0;
    while (std::getline(lines, line)) {
      const auto a = json::parse(line).at("a").get<std::vector<int>>();
      ++n;
      ++cmds[kCmd[a[0]]];
      if (a[0] == 0) ++mx[a[1] * 10 / 1000], ++my[a[2] * 10 / 1000];
      if (a[0] == 1) ++keys[std::string(act::key_name(static_cast<act::Key>(a[3])))];
      if (a[0] == 2) (a[5] > 499 ? up : down) += 1;
      if (a[0] == 3) ++tv[a[6] * 20 / 1000];
    }
    ++lengths[n - n % 20];
  }
  for (const auto& [k, n] : cmds) CHECK(st.commands.at(k) == n);
  CHECK(st.keys == keys);
  CHECK(st.lengths == lengths);
  CHECK(st.move_x == mx);
  CHECK(st.move_y == my);
  CHECK(st.type_values == tv);
  CHECK(st.scroll_up == up);
  CHECK(st.scroll_down == down);
  CHECK(st.episodes == 2);
  const auto csv = st.to_csv();
  for (const char* f : {"commands.csv", "lengths.csv", "moveto.csv", "type_values.csv", "scroll.csv", "keys.csv", "tabs.csv"})
    CHECK(csv.count(f) == 1);
  CHECK(code_of([&] { cmd_stats(root / "nothing"); }) != ErrorCode::Config);
}

TEST_CASE("eval against copied and altered predictions") {
  const auto root = te::fresh_dir("eval");
  te::write_cadseq(root / "s.cadseq", 60, 3);
  auto cfg = small_config(root / "s.cadseq", root / "gt");
  cfg.render_frames = false;
  cmd_build(cfg);
  const auto eps = list_episodes(cfg.output);
  const fs::path pred = root / "pred";
  std::size_t total = 0;
  for (const auto& e : eps) {
    fs::create_directories(pred / e.id);
    fs::copy_file(e.dir / "actions.jsonl", pred / e.id / "actions.jsonl");
    total += e.action_count;
  }
  const auto same = cmd_eval(pred, cfg.output);
  CHECK(same.mu_cmd == 1.0);
  CHECK(same.mu_param == 1.0);
  CHECK(same.success_rate == 1.0);

  // Replace the first action of one prediction with a command of another kind.
  const fs::path target = pred / eps[0].id / "actions.jsonl";
  auto text = slurp(target);
  const auto first_end = text.find('\n');
  auto j = json::parse(text.substr(0, first_end));
  const int c = j["a"][0].get<int>();
  j["a"] = c == 4 ? std::vector<int>{3, -1, -1, -1, -1, -1, 500} : std::vector<int>{4, -1, -1, -1, -1, -1, -1};
  std::ofstream(target, std::ios::binary) << j.dump() + text.substr(first_end);
  const auto flipped = cmd_eval(pred, cfg.output);
  CHECK(flipped.mu_cmd == static_cast<double>(total - 1) / static_cast<double>(total));

  fs::remove_all(pred / eps[1].id);
  CHECK(code_of([&] { cmd_eval(pred, cfg.output); }) == ErrorCode::IdMismatch);
}

TEST_CASE("validate reports each line") {
  const auto root = te::fresh_dir("validate");
  te::write_cadseq(root / "s.cadseq", 0, 2);
  std::ofstream(root / "s.cadseq", std::ios::app) << "bad|0,1\n";
  const auto lines = validate_cadseq(root / "s.cadseq");
  REQUIRE(lines.size() == 3);
  CHECK(lines[0].ok);
  CHECK(lines[1].ok);
  CHECK_FALSE(lines[2].ok);
  CHECK(lines[2].line_number == 3);
}

TEST_CASE("vqa files from a built dataset") {
  const auto root = te::fresh_dir("vqa");
  te::write_cadseq(root / "s.cadseq", 0, 4);
  auto cfg = small_config(root / "s.cadseq", root / "ds");
  cfg.render_frames = false;
  cmd_build(cfg);
  const auto sum = cmd_vqa(cfg.output, root / "q", 3, 5, {"extrusion_count", "plane_identification"});
  CHECK(sum.written.at("extrusion_count") == 3);
  const auto arr = json::parse(slurp(root / "q" / "extrusion_count.json"));
  REQUIRE(arr.size() == 3);
  for (const auto& q : arr) {
    CHECK(q.at("answer_index").get<std::size_t>() < q.at("choices").size());
    for (const auto& a : q.at("assets")) CHECK(fs::exists(root / "q" / a.get<std::string>()));
  }
  CHECK(code_of([&] { cmd_vqa(cfg.output, root / "q", 3, 5, {"nope"}); }) == ErrorCode::Config);
}

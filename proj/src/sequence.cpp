#include "cadact/sequence.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace cadact::seq {

std::string_view to_string(PrimitiveKind kind) {
  switch (kind) {
    case PrimitiveKind::Line: return "line";
    case PrimitiveKind::Arc: return "arc";
    case PrimitiveKind::Circle: return "circle";
  }
  return "?";
}

namespace {

using FieldMask = std::array<bool, 16>;

FieldMask used_fields(int type) {
  FieldMask m{};
  switch (type) {
    case 0: m[X] = m[Y] = true; break;
    case 1: m[X] = m[Y] = m[Alpha] = m[Flag] = true; break;
    case 2: m[X] = m[Y] = m[Radius] = true; break;
    case 4: break;
    case 5:
      for (int f = Theta; f <= Sides; ++f) m[f] = true;
      break;
    default: break;
  }
  return m;
}

bool known_type(int t) { return t == 0 || t == 1 || t == 2 || t == 4 || t == 5; }

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

RawToken make_token(int type, const FieldMask& used, std::initializer_list<std::pair<int, int>> values) {
  RawToken tok;
  tok.type = type;
  tok.fields.fill(kUnused);
  for (auto [field, value] : values) tok.fields[field] = value;
  (void)used;
  return tok;
}

}  // namespace

std::vector<RawToken> tokenize(std::string_view body) {
  std::vector<RawToken> tokens;
  body = trim(body);
  if (body.empty()) return tokens;
  std::size_t index = 0;
  for (auto chunk : split(body, ';')) {
    chunk = trim(chunk);
    // Accept whitespace as an additional field separator.
    std::vector<int> values;
    std::size_t pos = 0;
    while (pos < chunk.size()) {
      while (pos < chunk.size() && (chunk[pos] == ',' || chunk[pos] == ' ' || chunk[pos] == '\t')) ++pos;
      if (pos >= chunk.size()) break;
      std::size_t end = pos;
      while (end < chunk.size() && chunk[end] != ',' && chunk[end] != ' ' && chunk[end] != '\t') ++end;
      int v = 0;
      const auto field = chunk.substr(pos, end - pos);
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc() || ptr != field.data() + field.size())
        fail(ErrorCode::MalformedToken, "token " + std::to_string(index) + ": not an integer '" + std::string(field) + "'");
      values.push_back(v);
      pos = end;
    }
    if (values.size() != static_cast<std::size_t>(kTokenWidth))
      fail(ErrorCode::MalformedToken,
           "token " + std::to_string(index) + ": expected 17 fields, got " + std::to_string(values.size()));
    RawToken tok;
    tok.type = values[0];
    if (!known_type(tok.type))
      fail(ErrorCode::MalformedToken, "token " + std::to_string(index) + ": undefined command code " + std::to_string(tok.type));
    const FieldMask used = used_fields(tok.type);
    for (int f = 0; f < 16; ++f) {
      const int v = values[static_cast<std::size_t>(f) + 1];
      tok.fields[f] = v;
      if (v < kUnused || v > 255)
        fail(ErrorCode::MalformedToken, "token " + std::to_string(index) + ": field " + std::to_string(f + 1) + " out of range");
      if (!used[f] && v != kUnused)
        fail(ErrorCode::MalformedToken, "token " + std::to_string(index) + ": unused field " + std::to_string(f + 1) + " must be -1");
      if (used[f] && v == kUnused)
        fail(ErrorCode::MalformedToken, "token " + std::to_string(index) + ": missing value for field " + std::to_string(f + 1));
    }
    tokens.push_back(tok);
    ++index;
  }
  return tokens;
}

CadSequence parse_tokens(const std::vector<RawToken>& tokens, std::string source_id) {
  CadSequence seq;
  seq.source_id = std::move(source_id);
  ExtrusionRecordRaw record;
  LoopSpec loop;
  bool pending = false;  // tokens seen since the last extrusion
  for (const auto& tok : tokens) {
    const auto& f = tok.fields;
    switch (tok.type) {
      case 0:
        loop.primitives.push_back({PrimitiveKind::Line, f[X], f[Y]});
        pending = true;
        break;
      case 1:
        loop.primitives.push_back({PrimitiveKind::Arc, f[X], f[Y], f[Alpha], f[Flag]});
        pending = true;
        break;
      case 2:
        loop.primitives.push_back({PrimitiveKind::Circle, f[X], f[Y], kUnused, kUnused, f[Radius]});
        pending = true;
        break;
      case 4:
        record.loops.push_back(std::move(loop));
        loop = {};
        pending = true;
        break;
      case 5:
        record.loops.push_back(std::move(loop));
        loop = {};
        record.theta = f[Theta];
        record.phi = f[Phi];
        record.gamma = f[Gamma];
        record.px = f[Px];
        record.py = f[Py];
        record.pz = f[Pz];
        record.scale = f[Scale];
        record.e1 = f[E1];
        record.e2 = f[E2];
        record.op = f[Op];
        record.sides = f[Sides];
        seq.records.push_back(std::move(record));
        record = {};
        pending = false;
        break;
      default:
        fail(ErrorCode::MalformedToken, "undefined command code " + std::to_string(tok.type));
    }
  }
  if (pending) fail(ErrorCode::DanglingLoop, "loop tokens after the last extrusion");
  if (seq.records.empty()) fail(ErrorCode::EmptySequence, "no extrusion records");
  return seq;
}

CadSequence parse_sequence(std::string_view line, std::string default_id) {
  line = trim(line);
  std::string id = std::move(default_id);
  if (const auto bar = line.find('|'); bar != std::string_view::npos) {
    id = std::string(trim(line.substr(0, bar)));
    line = line.substr(bar + 1);
  }
  return parse_tokens(tokenize(line), std::move(id));
}

std::vector<RawToken> to_tokens(const CadSequence& seq) {
  std::vector<RawToken> out;
  const FieldMask none{};
  for (const auto& rec : seq.records) {
    for (std::size_t li = 0; li < rec.loops.size(); ++li) {
      if (li > 0) out.push_back(make_token(4, none, {}));
      for (const auto& p : rec.loops[li].primitives) {
        switch (p.kind) {
          case PrimitiveKind::Line: out.push_back(make_token(0, none, {{X, p.x}, {Y, p.y}})); break;
          case PrimitiveKind::Arc:
            out.push_back(make_token(1, none, {{X, p.x}, {Y, p.y}, {Alpha, p.alpha}, {Flag, p.flag}}));
            break;
          case PrimitiveKind::Circle:
            out.push_back(make_token(2, none, {{X, p.x}, {Y, p.y}, {Radius, p.radius}}));
            break;
        }
      }
    }
    out.push_back(make_token(5, none,
                             {{Theta, rec.theta}, {Phi, rec.phi}, {Gamma, rec.gamma}, {Px, rec.px}, {Py, rec.py},
                              {Pz, rec.pz}, {Scale, rec.scale}, {E1, rec.e1}, {E2, rec.e2}, {Op, rec.op},
                              {Sides, rec.sides}}));
  }
  return out;
}

std::string serialize_sequence(const CadSequence& seq, bool with_id) {
  std::string out;
  if (with_id && !seq.source_id.empty()) out += seq.source_id + "|";
  bool first = true;
  for (const auto& tok : to_tokens(seq)) {
    if (!first) out += ';';
    first = false;
    out += std::to_string(tok.type);
    for (int v : tok.fields) {
      out += ',';
      out += std::to_string(v);
    }
  }
  return out;
}

std::vector<ParsedLine> parse_file_text(std::string_view text) {
  std::vector<ParsedLine> out;
  std::size_t number = 0;
  for (auto raw : split(text, '\n')) {
    ++number;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    ParsedLine pl;
    pl.line_number = number;
    pl.text = std::string(line);
    pl.source_id = "line:" + std::to_string(number);
    if (const auto bar = line.find('|'); bar != std::string_view::npos) pl.source_id = std::string(trim(line.substr(0, bar)));
    try {
      pl.result = parse_sequence(line, pl.source_id);
    } catch (const Error& e) {
      pl.result = e;
    }
    out.push_back(std::move(pl));
  }
  return out;
}

std::vector<ParsedLine> read_cadseq(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_file_text(ss.str());
}

ValidationReport validate(const CadSequence& seq) {
  ValidationReport report;
  auto add = [&](std::size_t r, std::string msg) { report.violations.push_back({r, std::move(msg)}); };
  auto in_range = [](int v) { return v >= 0 && v <= 255; };
  if (seq.records.empty()) add(0, "sequence has no records");
  for (std::size_t r = 0; r < seq.records.size(); ++r) {
    const auto& rec = seq.records[r];
    if (r == 0 && rec.op != 0) add(r, "first op must be new");
    if (r > 0 && rec.op == 0) add(r, "new op only allowed on the first record");
    if (rec.op < 0 || rec.op > 2) add(r, "op out of range");
    if (rec.sides < 0 || rec.sides > 2) add(r, "sides out of range");
    for (int v : {rec.theta, rec.phi, rec.gamma, rec.px, rec.py, rec.pz, rec.scale, rec.e1, rec.e2})
      if (!in_range(v)) {
        add(r, "extrusion field out of range");
        break;
      }
    if (rec.scale == 0) add(r, "zero sketch scale");
    if (rec.loops.empty()) add(r, "record has no loops");
    for (std::size_t l = 0; l < rec.loops.size(); ++l) {
      const auto& loop = rec.loops[l];
      const std::string where = "loop " + std::to_string(l) + ": ";
      if (loop.primitives.empty()) {
        add(r, where + "empty loop");
        continue;
      }
      const bool has_circle = std::any_of(loop.primitives.begin(), loop.primitives.end(),
                                          [](const PrimitiveSpec& p) { return p.kind == PrimitiveKind::Circle; });
      if (has_circle && loop.primitives.size() != 1) add(r, where + "circle loop arity");
      if (!has_circle && loop.primitives.size() < 2) add(r, where + "line/arc loop arity");
      for (const auto& p : loop.primitives) {
        if (!in_range(p.x) || !in_range(p.y)) add(r, where + "point out of range");
        if (p.kind == PrimitiveKind::Arc) {
          if (p.alpha < 1 || p.alpha > 255) add(r, where + "arc sweep out of range");
          if (p.flag != 0 && p.flag != 1) add(r, where + "arc flag out of range");
        }
        if (p.kind == PrimitiveKind::Circle && (p.radius < 1 || p.radius > 255)) add(r, where + "circle radius out of range");
      }
    }
  }
  return report;
}

std::size_t StatsTable::count(std::string_view category, std::string_view key) const {
  for (const auto& row : rows)
    if (row.category == category && row.key == key) return row.count;
  return 0;
}

std::size_t StatsTable::total(std::string_view category) const {
  std::size_t n = 0;
  for (const auto& row : rows)
    if (row.category == category) n += row.count;
  return n;
}

std::string StatsTable::to_csv() const {
  std::string out = "category,key,count\n";
  for (const auto& row : rows) out += row.category + "," + row.key + "," + std::to_string(row.count) + "\n";
  return out;
}

namespace {

std::string loop_kind(const LoopSpec& loop) {
  bool line = false, arc = false, circle = false;
  for (const auto& p : loop.primitives) {
    line |= p.kind == PrimitiveKind::Line;
    arc |= p.kind == PrimitiveKind::Arc;
    circle |= p.kind == PrimitiveKind::Circle;
  }
  if (circle && !line && !arc) return "CircleLoop";
  if (line && !arc && !circle) return "LineLoop";
  if (arc && !line && !circle) return "ArcLoop";
  if (!line && !arc && !circle) return "EmptyLoop";
  return "MixedLoop";
}

}  // namespace

StatsTable sequence_stats(std::span<const CadSequence> seqs) {
  if (seqs.empty()) fail(ErrorCode::EmptyInput, "no sequences");
  // Ordered maps keep CSV output stable.
  std::map<std::string, std::size_t> primitives{{"Line", 0}, {"Arc", 0}, {"Circle", 0}};
  std::map<std::string, std::size_t> loop_kinds;
  std::map<std::size_t, std::size_t> loops_per_record;
  std::map<std::size_t, std::size_t> records_per_sequence;
  for (const auto& s : seqs) {
    ++records_per_sequence[s.records.size()];
    for (const auto& rec : s.records) {
      ++loops_per_record[rec.loops.size()];
      for (const auto& loop : rec.loops) {
        ++loop_kinds[loop_kind(loop)];
        for (const auto& p : loop.primitives) {
          switch (p.kind) {
            case PrimitiveKind::Line: ++primitives["Line"]; break;
            case PrimitiveKind::Arc: ++primitives["Arc"]; break;
            case PrimitiveKind::Circle: ++primitives["Circle"]; break;
          }
        }
      }
    }
  }
  StatsTable table;
  for (const auto& [k, v] : primitives) table.rows.push_back({"primitive", k, v});
  for (const auto& [k, v] : loop_kinds) table.rows.push_back({"loop_kind", k, v});
  for (const auto& [k, v] : loops_per_record) table.rows.push_back({"loops_per_record", std::to_string(k), v});
  for (const auto& [k, v] : records_per_sequence) table.rows.push_back({"records_per_sequence", std::to_string(k), v});
  return table;
}

}  // namespace cadact::seq

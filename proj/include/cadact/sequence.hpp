#pragma once

// Parsing and validation of quantized sketch-extrude command sequences
// (`.cadseq` text: one sequence per line, 17-wide comma-separated tokens
// joined by ';', optional "<source_id>|" prefix, '#' comment lines).

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cadact/error.hpp"

namespace cadact::seq {

inline constexpr int kUnused = -1;
inline constexpr int kTokenWidth = 17;

enum class TokenType : int { Line = 0, Arc = 1, Circle = 2, LoopSeparator = 4, Extrusion = 5 };

// Field slots following the command code, in file order.
enum Field : int { X = 0, Y, Alpha, Flag, Radius, Theta, Phi, Gamma, Px, Py, Pz, Scale, E1, E2, Op, Sides };

struct RawToken {
  int type = 0;
  std::array<int, 16> fields{};

  bool operator==(const RawToken&) const = default;
};

enum class PrimitiveKind { Line, Arc, Circle };

std::string_view to_string(PrimitiveKind kind);

struct PrimitiveSpec {
  PrimitiveKind kind = PrimitiveKind::Line;
  int x = 0;
  int y = 0;
  int alpha = kUnused;   // arcs only
  int flag = kUnused;    // arcs only
  int radius = kUnused;  // circles only

  bool operator==(const PrimitiveSpec&) const = default;
};

struct LoopSpec {
  std::vector<PrimitiveSpec> primitives;

  bool is_circle() const { return primitives.size() == 1 && primitives.front().kind == PrimitiveKind::Circle; }
  bool operator==(const LoopSpec&) const = default;
};

struct ExtrusionRecordRaw {
  std::vector<LoopSpec> loops;
  int theta = 128, phi = 128, gamma = 128;
  int px = 128, py = 128, pz = 128;
  int scale = 128;
  int e1 = 128, e2 = 128;
  int op = 0;     // 0 new, 1 remove, 2 union
  int sides = 0;  // 0 one-sided, 1 symmetric, 2 two-sided

  bool operator==(const ExtrusionRecordRaw&) const = default;
};

struct CadSequence {
  std::vector<ExtrusionRecordRaw> records;
  std::string source_id;

  bool operator==(const CadSequence&) const = default;
};

// Splits one sequence body into raw tokens; throws MalformedToken.
std::vector<RawToken> tokenize(std::string_view body);

// Groups tokens into loops (t=4) and records (t=5).
// Throws MalformedToken, DanglingLoop, EmptySequence.
CadSequence parse_tokens(const std::vector<RawToken>& tokens, std::string source_id);

// Parses one line; a leading "<id>|" sets the source id, otherwise
// `default_id` is used.
CadSequence parse_sequence(std::string_view line, std::string default_id = "");

std::vector<RawToken> to_tokens(const CadSequence& seq);
std::string serialize_sequence(const CadSequence& seq, bool with_id = true);

// Result of reading one non-comment line of a .cadseq file.
struct ParsedLine {
  std::size_t line_number = 0;
  std::string source_id;
  std::string text;
  std::variant<CadSequence, Error> result;

  bool ok() const { return std::holds_alternative<CadSequence>(result); }
};

// Parses a whole file, quarantining per-line errors.
std::vector<ParsedLine> parse_file_text(std::string_view text);
std::vector<ParsedLine> read_cadseq(const std::string& path);

struct Violation {
  std::size_t record = 0;
  std::string message;

  bool operator==(const Violation&) const = default;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool operator==(const ValidationReport&) const = default;
};

ValidationReport validate(const CadSequence& seq);

struct StatsRow {
  std::string category;
  std::string key;
  std::size_t count = 0;
};

struct StatsTable {
  std::vector<StatsRow> rows;

  std::size_t count(std::string_view category, std::string_view key) const;
  std::size_t total(std::string_view category) const;
  std::string to_csv() const;
};

// Histograms of primitive kinds, loop kinds, loops per record and records
// per sequence. Throws EmptyInput.
StatsTable sequence_stats(std::span<const CadSequence> seqs);

}  // namespace cadact::seq

#pragma once

// Lowered records -> UI action programs.

#include "cadact/actions.hpp"
#include "cadact/geometry.hpp"
#include "cadact/rng.hpp"
#include "cadact/sequence.hpp"

namespace cadact::compile {

struct CompileConfig {
  bool delays = true;      // dt ~ U[0.2, 0.5]; fixed 0.35 otherwise
  bool jitter = true;      // random interior points for region clicks
  bool zoom = true;        // zoom around loops with small primitives
  bool visibility = true;  // part/sketch/plane visibility toggles
  double small_extent = 0.02;
};

inline constexpr double kFixedDelay = 0.35;

// Cross-record bookkeeping mirrored from the simulator's point of view.
struct CompilerState {
  std::size_t record = 0;
  int custom_planes = 0;
  bool planes_visible = true;
  bool sketches_hidden = false;
};

act::ActionProgram compile_record(const geo::LoweredRecord& rec, const CompileConfig& cfg, Rng& rng,
                                  CompilerState& state);
act::ActionProgram compile_record(const geo::LoweredRecord& rec, const CompileConfig& cfg, Rng& rng);

// Appends the Shift+7 isometric-view combo.
void append_eos(act::ActionProgram& prog, const CompileConfig& cfg, Rng& rng);

act::ActionProgram compile_lowered(const std::vector<geo::LoweredRecord>& records, const CompileConfig& cfg, Rng& rng);
act::ActionProgram compile_sequence(const seq::CadSequence& seq, const CompileConfig& cfg, Rng& rng);

}  // namespace cadact::compile

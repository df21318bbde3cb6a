#pragma once

// Random valid multi-extrusion sequences on axis-aligned planes, screened so
// that every loop can be drawn and every face clicked at bin resolution.

#include <cstdint>

#include "cadact/geometry.hpp"
#include "cadact/rng.hpp"
#include "cadact/sequence.hpp"

namespace cadact::synth {

struct SynthConfig {
  int min_records = 2;
  int max_records = 5;
  double min_loop_gap = 0.01;
  double min_face_clearance = 0.006;
  int max_attempts = 400;  // per record
};

seq::CadSequence generate_sequence(std::uint64_t seed, const SynthConfig& cfg = {});
seq::CadSequence generate_sequence(Rng& rng, const SynthConfig& cfg, std::string source_id);

// Screening used by the generator; throws UnsupportedGeometry with a reason.
void check_drawable(const geo::LoweredRecord& rec, const SynthConfig& cfg);

}  // namespace cadact::synth

#pragma once

// Multiple-choice questions generated from episodes with answers computed
// from ground truth, an independent verifier and a grader.

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cadact/actions.hpp"
#include "cadact/image.hpp"
#include "cadact/rng.hpp"
#include "cadact/sequence.hpp"
#include "cadact/solid.hpp"

namespace cadact::vqa {

enum class Family {
  ExtrusionShapePrediction,
  ExtrusionCount,
  ExtrusionDepthComparison,
  SketchOrdering,
  SketchIdentification,
  PlaneIdentification,
  PrimitiveIdentification,
  SequencePrediction,
  FrameSequencing,
  HoleDetection,
  SymmetryDetection,
};

inline constexpr std::size_t kFamilyCount = 11;
const std::array<Family, kFamilyCount>& all_families();
std::string_view family_name(Family f);
std::optional<Family> family_from_name(std::string_view name);
std::size_t choice_count(Family f);
double chance_level(Family f);

struct Episode {
  std::string id;
  seq::CadSequence sequence;
  std::vector<act::HlEvent> hl;
  std::size_t action_count = 0;
  std::function<GrayImage(std::size_t)> frame;  // keyframe after step i
};

struct Provenance {
  std::string episode;
  std::uint64_t seed = 0;
  std::vector<int> refs;  // record or step indices the question was built from
};

struct Question {
  Family family = Family::ExtrusionCount;
  std::string prompt;
  std::vector<std::string> assets;   // image names shown with the prompt
  std::vector<std::string> choices;  // text, or image names when choices_are_images
  bool choices_are_images = false;
  int answer_index = 0;
  Provenance provenance;
  std::map<std::string, GrayImage> images;  // every image named above

  std::string to_json(const std::string& asset_dir = "assets") const;
};

// Throws PrerequisiteUnmet when the episode cannot support the family.
// `pool` supplies other episodes for cross-episode distractors.
Question generate(Family family, const Episode& episode, const std::vector<const Episode*>& pool, Rng& rng,
                  std::uint64_t seed);

// Rebuilds the answer from the episode through a separate path.
bool verify(const Question& q, const Episode& episode);

// Up to n questions of one family drawn round-robin over shuffled episodes.
// Throws InsufficientEpisodes when no episode satisfies the family.
std::vector<Question> generate_batch(Family family, const std::vector<Episode>& episodes, std::size_t n,
                                     std::uint64_t seed);

struct FamilyScore {
  std::size_t questions = 0;
  std::size_t correct = 0;
  std::size_t fallbacks = 0;  // absent or invalid responses replaced at random
  double accuracy = 0.0;
  double chance = 0.0;        // mean of 1/choices over the questions
};

std::map<Family, FamilyScore> grade(const std::vector<std::optional<int>>& responses,
                                    const std::vector<Question>& questions, std::uint64_t seed);

// Oracle helpers shared with the dataset tooling.
GrayImage render_sketch(const seq::ExtrusionRecordRaw& record, int res = 224);
GrayImage render_solid(const kernel::Solid& solid, int res = 224);
kernel::Solid solid_after(const seq::CadSequence& seq, std::size_t records);
double effective_depth(const seq::ExtrusionRecordRaw& record);

}  // namespace cadact::vqa

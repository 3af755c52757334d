#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "vcd/media.hpp"
#include "vcd/metrics.hpp"

namespace vcd {

// Desk-scale synthetic corpus: multi-scene reference videos made of
// procedural textures, positive queries copying whole-scene spans with mild
// noise and brightness jitter, and freshly generated distractor queries.
// Everything derives deterministically from `seed`.
struct SyntheticCorpusSpec {
  int num_references = 200;
  int num_queries_positive = 50;
  int num_distractors = 50;
  Rational fps{24, 1};
  std::uint32_t width = 48;
  std::uint32_t height = 36;
  double scene_len_mean_s = 2.8;
  double scene_len_jitter_s = 0.9;
  int scenes_min = 8;
  int scenes_max = 14;
  int span_scenes_min = 1;
  int span_scenes_max = 2;
  double noise_sigma = 2.0;
  int brightness_jitter = 10;
  // Texture drift per scene, radians swept start to end. Drift is what makes
  // frames at different scene offsets distinguishable, so it controls how
  // much a policy suffers when an attack pushes its picks off their usual
  // positions.
  double drift_min = 1.2;
  double drift_max = 2.2;
  // Fraction of distractor scenes that echo a reference texture (perturbed
  // by echo_mix), mimicking same-background/different-content lookalikes.
  // Echoes set the score level real positives must beat.
  double distractor_echo_prob = 0.5;
  double distractor_echo_mix = 0.8;
  // Scene cuts land at arbitrary frame offsets unless this forces whole
  // seconds; the unaligned default is what separates the targeted attack
  // from the scene structure.
  bool align_scenes_to_seconds = false;
  std::uint64_t seed = 1;
};

// One scene: a slowly drifting combination of two random 8x8 frequency
// patterns. The texture direction rotates from c0 toward c1 by drift_angle
// over the scene, which makes frames at different scene offsets measurably
// different while keeping consecutive frames close.
struct SceneSpec {
  std::uint32_t len_frames = 0;
  std::array<double, 64> c0{};
  std::array<double, 64> c1{};
  double drift_angle = 0.0;
};

struct QueryRecipe {
  int ref_index = 0;
  std::size_t scene_begin = 0;
  std::size_t scene_count = 1;
  double noise_sigma = 0.0;
  int brightness = 0;
  std::uint64_t noise_seed = 0;
};

std::string reference_id(int index);
std::string query_id(int index);  // positives first, then distractors

std::vector<SceneSpec> reference_scenes(const SyntheticCorpusSpec& spec,
                                        int ref_index);
std::vector<SceneSpec> distractor_scenes(const SyntheticCorpusSpec& spec,
                                         int distractor_index);
QueryRecipe positive_query_recipe(const SyntheticCorpusSpec& spec,
                                  int query_index);

FrameSequence render_scenes(const SyntheticCorpusSpec& spec,
                            const std::string& video_id,
                            const std::vector<SceneSpec>& scenes,
                            double noise_sigma = 0.0, int brightness = 0,
                            std::uint64_t noise_seed = 0);

FrameSequence make_reference(const SyntheticCorpusSpec& spec, int ref_index);
FrameSequence make_positive_query(const SyntheticCorpusSpec& spec,
                                  int query_index);
FrameSequence make_distractor(const SyntheticCorpusSpec& spec,
                              int distractor_index);

GroundTruth corpus_ground_truth(const SyntheticCorpusSpec& spec);

struct GeneratedCorpus {
  Manifest manifest;
  GroundTruth gt;
  std::string dir;
};

// Writes videos/<id>.vcdr for every reference and query, manifest.json and
// gt.csv under `dir`.
GeneratedCorpus generate_corpus(const SyntheticCorpusSpec& spec,
                                const std::string& dir, unsigned threads = 1);

}  // namespace vcd

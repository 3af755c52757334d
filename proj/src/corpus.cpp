#include "vcd/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "vcd/parallel.hpp"

namespace fs = std::filesystem;

namespace vcd {
namespace {

// Peak absolute pattern amplitude around mid-gray. Leaves headroom for the
// brightness jitter and noise tails so copies stay clear of saturation.
constexpr double kPatternAmp = 85.0;
constexpr double kPi = 3.14159265358979323846;

std::uint32_t scene_frames(const SyntheticCorpusSpec& spec, Rng& rng) {
  double seconds = rng.uniform(spec.scene_len_mean_s - spec.scene_len_jitter_s,
                               spec.scene_len_mean_s + spec.scene_len_jitter_s);
  seconds = std::max(seconds, 0.25);
  if (spec.align_scenes_to_seconds) {
    seconds = std::max(1.0, std::round(seconds));
  }
  const auto frames =
      static_cast<std::int64_t>(std::llround(seconds * spec.fps.to_double()));
  return static_cast<std::uint32_t>(std::max<std::int64_t>(2, frames));
}

// Rescales c0/c1 jointly so the rendered pattern never exceeds kPatternAmp:
// |sum c(t)_i * basis_i| <= sum hypot(c0_i, c1_i) for every drift angle.
void normalize_amplitude(SceneSpec& scene) {
  double hypot_sum = 0.0;
  for (std::size_t i = 0; i < 64; ++i) {
    hypot_sum += std::hypot(scene.c0[i], scene.c1[i]);
  }
  const double scale = kPatternAmp / hypot_sum;
  for (std::size_t i = 0; i < 64; ++i) {
    scene.c0[i] *= scale;
    scene.c1[i] *= scale;
  }
}

// Draws one scene. Texture families shape the random spectrum mildly: flat
// noise fields, low-frequency-leaning gradients, or axis-boosted bar
// patterns. The shaping stays gentle so scene directions remain spread out
// in coefficient space and unrelated scenes stay dissimilar.
SceneSpec draw_scene(const SyntheticCorpusSpec& spec, Rng& rng) {
  SceneSpec scene;
  scene.len_frames = scene_frames(spec, rng);
  const int family = static_cast<int>(rng.uniform_int(0, 2));
  const int bar_axis_u = rng.uniform01() < 0.5;
  std::array<double, 64> weight{};
  for (int v = 0; v < 8; ++v) {
    for (int u = 0; u < 8; ++u) {
      double w = 1.0;
      if (family == 1) w = 1.0 / std::sqrt(1.0 + u + v);
      if (family == 2 && ((bar_axis_u && v == 0) || (!bar_axis_u && u == 0))) {
        w = 1.6;
      }
      weight[static_cast<std::size_t>(v) * 8 + u] = w;
    }
  }
  weight[0] = 0.0;  // DC carried separately as mid-gray
  for (std::size_t i = 0; i < 64; ++i) {
    scene.c0[i] = weight[i] * rng.normal();
    scene.c1[i] = weight[i] * rng.normal();
  }
  normalize_amplitude(scene);
  scene.drift_angle = rng.uniform(spec.drift_min, spec.drift_max);
  return scene;
}

std::vector<SceneSpec> draw_layout(const SyntheticCorpusSpec& spec,
                                   std::uint64_t seed) {
  Rng rng(seed);
  const int count =
      static_cast<int>(rng.uniform_int(spec.scenes_min, spec.scenes_max));
  std::vector<SceneSpec> scenes;
  scenes.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) scenes.push_back(draw_scene(spec, rng));
  return scenes;
}

// cos(pi*u*(2x+1)/(2*len)) for u in 0..7 — the len-point DCT-II basis
// restricted to the 8 lowest frequencies.
std::vector<double> axis_basis(std::uint32_t len) {
  std::vector<double> basis(static_cast<std::size_t>(len) * 8);
  for (std::uint32_t x = 0; x < len; ++x) {
    for (int u = 0; u < 8; ++u) {
      basis[static_cast<std::size_t>(x) * 8 + u] =
          std::cos(kPi * u * (2.0 * x + 1.0) / (2.0 * len));
    }
  }
  return basis;
}

}  // namespace

std::string reference_id(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "R%04d", index + 1);
  return buf;
}

std::string query_id(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "Q%04d", index + 1);
  return buf;
}

std::vector<SceneSpec> reference_scenes(const SyntheticCorpusSpec& spec,
                                        int ref_index) {
  return draw_layout(spec,
                     derive_seed(spec.seed, "ref:" + std::to_string(ref_index)));
}

std::vector<SceneSpec> distractor_scenes(const SyntheticCorpusSpec& spec,
                                         int distractor_index) {
  Rng rng(derive_seed(spec.seed, "dist:" + std::to_string(distractor_index)));
  const int count =
      static_cast<int>(rng.uniform_int(spec.scenes_min, spec.scenes_max));
  std::vector<SceneSpec> scenes;
  scenes.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    SceneSpec scene = draw_scene(spec, rng);
    if (rng.uniform01() < spec.distractor_echo_prob &&
        spec.num_references > 0) {
      // Echo: lean the texture toward a random reference scene so distractor
      // scores sit just below genuine copies instead of far away.
      const int ref =
          static_cast<int>(rng.uniform_int(0, spec.num_references - 1));
      const std::vector<SceneSpec> source = reference_scenes(spec, ref);
      const SceneSpec& base = source[static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<std::int64_t>(source.size()) - 1))];
      double base_norm = 0.0;
      for (const double v : base.c0) base_norm += v * v;
      base_norm = std::sqrt(base_norm);
      double own_norm = 0.0;
      for (const double v : scene.c0) own_norm += v * v;
      own_norm = std::sqrt(own_norm);
      for (std::size_t k = 0; k < 64; ++k) {
        scene.c0[k] = base.c0[k] / base_norm +
                      spec.distractor_echo_mix * scene.c0[k] / own_norm;
      }
      normalize_amplitude(scene);
    }
    scenes.push_back(std::move(scene));
  }
  return scenes;
}

QueryRecipe positive_query_recipe(const SyntheticCorpusSpec& spec,
                                  int query_index) {
  Rng rng(derive_seed(spec.seed, "query:" + std::to_string(query_index)));
  QueryRecipe recipe;
  recipe.ref_index =
      static_cast<int>(rng.uniform_int(0, spec.num_references - 1));
  const std::size_t scene_total =
      reference_scenes(spec, recipe.ref_index).size();
  const std::size_t span_max = std::min<std::size_t>(
      static_cast<std::size_t>(spec.span_scenes_max), scene_total);
  const std::size_t span_min = std::min<std::size_t>(
      static_cast<std::size_t>(std::max(1, spec.span_scenes_min)), span_max);
  recipe.scene_count = static_cast<std::size_t>(rng.uniform_int(
      static_cast<std::int64_t>(span_min), static_cast<std::int64_t>(span_max)));
  recipe.scene_begin = static_cast<std::size_t>(
      rng.uniform_int(0, static_cast<std::int64_t>(scene_total -
                                                   recipe.scene_count)));
  recipe.noise_sigma = spec.noise_sigma;
  recipe.brightness = static_cast<int>(
      rng.uniform_int(-spec.brightness_jitter, spec.brightness_jitter));
  recipe.noise_seed =
      derive_seed(spec.seed, "noise:" + std::to_string(query_index));
  return recipe;
}

FrameSequence render_scenes(const SyntheticCorpusSpec& spec,
                            const std::string& video_id,
                            const std::vector<SceneSpec>& scenes,
                            double noise_sigma, int brightness,
                            std::uint64_t noise_seed) {
  if (scenes.empty()) throw InvariantError("render_scenes: no scenes");
  FrameSequence seq;
  seq.video_id = video_id;
  seq.width = spec.width;
  seq.height = spec.height;
  seq.fps = spec.fps;

  const std::vector<double> bx = axis_basis(spec.width);
  const std::vector<double> by = axis_basis(spec.height);
  Rng noise(noise_seed);
  const bool noisy = noise_sigma > 0.0;

  std::size_t total = 0;
  for (const auto& s : scenes) total += s.len_frames;
  seq.frames.reserve(total);

  std::array<double, 64> coeff{};
  std::vector<double> row_mix(static_cast<std::size_t>(spec.height) * 8);
  for (const SceneSpec& scene : scenes) {
    for (std::uint32_t t = 0; t < scene.len_frames; ++t) {
      const double angle = scene.drift_angle * t / scene.len_frames;
      const double ca = std::cos(angle), sa = std::sin(angle);
      for (std::size_t i = 0; i < 64; ++i) {
        coeff[i] = scene.c0[i] * ca + scene.c1[i] * sa;
      }
      // row_mix[y][u] = sum_v coeff[v][u] * by[y][v]
      for (std::uint32_t y = 0; y < spec.height; ++y) {
        for (int u = 0; u < 8; ++u) {
          double acc = 0.0;
          for (int v = 0; v < 8; ++v) {
            acc += coeff[static_cast<std::size_t>(v) * 8 + u] *
                   by[static_cast<std::size_t>(y) * 8 + v];
          }
          row_mix[static_cast<std::size_t>(y) * 8 + u] = acc;
        }
      }
      Frame frame(spec.width, spec.height);
      for (std::uint32_t y = 0; y < spec.height; ++y) {
        const double* mix = row_mix.data() + static_cast<std::size_t>(y) * 8;
        for (std::uint32_t x = 0; x < spec.width; ++x) {
          const double* b = bx.data() + static_cast<std::size_t>(x) * 8;
          double value = 0.0;
          for (int u = 0; u < 8; ++u) value += mix[u] * b[u];
          value += 128.0 + brightness;
          if (noisy) value += noise_sigma * noise.normal();
          frame.at(y, x) = static_cast<std::uint8_t>(
              std::clamp<long>(std::lround(value), 0, 255));
        }
      }
      seq.frames.push_back(std::move(frame));
    }
  }
  return seq;
}

FrameSequence make_reference(const SyntheticCorpusSpec& spec, int ref_index) {
  return render_scenes(spec, reference_id(ref_index),
                       reference_scenes(spec, ref_index));
}

FrameSequence make_positive_query(const SyntheticCorpusSpec& spec,
                                  int query_index) {
  const QueryRecipe recipe = positive_query_recipe(spec, query_index);
  const std::vector<SceneSpec> all = reference_scenes(spec, recipe.ref_index);
  const std::vector<SceneSpec> span(
      all.begin() + static_cast<std::ptrdiff_t>(recipe.scene_begin),
      all.begin() +
          static_cast<std::ptrdiff_t>(recipe.scene_begin + recipe.scene_count));
  return render_scenes(spec, query_id(query_index), span, recipe.noise_sigma,
                       recipe.brightness, recipe.noise_seed);
}

FrameSequence make_distractor(const SyntheticCorpusSpec& spec,
                              int distractor_index) {
  return render_scenes(spec,
                       query_id(spec.num_queries_positive + distractor_index),
                       distractor_scenes(spec, distractor_index));
}

GroundTruth corpus_ground_truth(const SyntheticCorpusSpec& spec) {
  GroundTruth gt;
  for (int q = 0; q < spec.num_queries_positive; ++q) {
    const QueryRecipe recipe = positive_query_recipe(spec, q);
    gt.positives.insert({query_id(q), reference_id(recipe.ref_index)});
  }
  return gt;
}

GeneratedCorpus generate_corpus(const SyntheticCorpusSpec& spec,
                                const std::string& dir, unsigned threads) {
  if (spec.num_references < 1 || spec.num_queries_positive < 0 ||
      spec.num_distractors < 0) {
    throw DataError("corpus spec counts out of range");
  }
  if (!spec.fps.positive()) throw DataError("corpus fps must be positive");
  std::error_code ec;
  fs::create_directories(fs::path(dir) / "videos", ec);
  if (ec) throw DataError("cannot create corpus directory " + dir);

  GeneratedCorpus out;
  out.dir = dir;
  const int total_queries = spec.num_queries_positive + spec.num_distractors;
  out.manifest.entries.resize(
      static_cast<std::size_t>(spec.num_references + total_queries));

  parallel_for(
      static_cast<std::size_t>(spec.num_references + total_queries), threads,
      [&](std::size_t i) {
        FrameSequence seq;
        ManifestEntry entry;
        if (i < static_cast<std::size_t>(spec.num_references)) {
          seq = make_reference(spec, static_cast<int>(i));
          entry.role = "reference";
        } else {
          const int q = static_cast<int>(i) - spec.num_references;
          if (q < spec.num_queries_positive) {
            seq = make_positive_query(spec, q);
          } else {
            seq = make_distractor(spec, q - spec.num_queries_positive);
            entry.distractor = true;
          }
          entry.role = "query";
        }
        entry.video_id = seq.video_id;
        entry.path = "videos/" + seq.video_id + ".vcdr";
        save_video((fs::path(dir) / entry.path).string(), seq);
        out.manifest.entries[i] = std::move(entry);
      });

  out.gt = corpus_ground_truth(spec);
  save_manifest((fs::path(dir) / "manifest.json").string(), out.manifest);
  write_ground_truth_csv_file((fs::path(dir) / "gt.csv").string(), out.gt);
  return out;
}

}  // namespace vcd

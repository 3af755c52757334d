#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "vcd/corpus.hpp"
#include "vcd/descriptor.hpp"
#include "vcd/match.hpp"

using namespace vcd;
namespace fs = std::filesystem;

namespace {

SyntheticCorpusSpec small_spec(std::uint64_t seed) {
  SyntheticCorpusSpec spec;
  spec.num_references = 5;
  spec.num_queries_positive = 3;
  spec.num_distractors = 2;
  spec.width = 48;
  spec.height = 36;
  spec.scenes_min = 3;
  spec.scenes_max = 5;
  spec.scene_len_mean_s = 1.2;
  spec.scene_len_jitter_s = 0.4;
  spec.seed = seed;
  return spec;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return data;
}

std::string scratch(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("vcd_corpus_" + tag);
  fs::remove_all(dir);
  return dir.string();
}

}  // namespace

TEST_CASE("corpus counts and ground truth size") {
  const SyntheticCorpusSpec spec = small_spec(99);
  const GeneratedCorpus corpus = generate_corpus(spec, scratch("counts"));
  CHECK(corpus.manifest.entries.size() == 10);  // 5 refs + 3 + 2 queries
  CHECK(corpus.gt.positives.size() == 3);
  int refs = 0, queries = 0, distractors = 0;
  for (const auto& e : corpus.manifest.entries) {
    if (e.role == "reference") ++refs;
    if (e.role == "query") ++queries;
    if (e.distractor) ++distractors;
  }
  CHECK(refs == 5);
  CHECK(queries == 5);
  CHECK(distractors == 2);
  for (const auto& e : corpus.manifest.entries) {
    CHECK(fs::exists(fs::path(corpus.dir) / e.path));
  }
}

TEST_CASE("same seed reproduces the corpus byte for byte") {
  const SyntheticCorpusSpec spec = small_spec(1234);
  const GeneratedCorpus a = generate_corpus(spec, scratch("rep_a"), 1);
  const GeneratedCorpus b = generate_corpus(spec, scratch("rep_b"), 4);
  for (const auto& e : a.manifest.entries) {
    const std::string file_a = read_file(fs::path(a.dir) / e.path);
    const std::string file_b = read_file(fs::path(b.dir) / e.path);
    CHECK(file_a == file_b);
  }
  CHECK(read_file(fs::path(a.dir) / "gt.csv") ==
        read_file(fs::path(b.dir) / "gt.csv"));
  CHECK(read_file(fs::path(a.dir) / "manifest.json") ==
        read_file(fs::path(b.dir) / "manifest.json"));

  const GeneratedCorpus c = generate_corpus(small_spec(1235),
                                            scratch("rep_c"), 1);
  bool any_differ = false;
  for (const auto& e : a.manifest.entries) {
    if (fs::exists(fs::path(c.dir) / e.path) &&
        read_file(fs::path(a.dir) / e.path) !=
            read_file(fs::path(c.dir) / e.path)) {
      any_differ = true;
      break;
    }
  }
  CHECK(any_differ);
}

TEST_CASE("positive queries copy their source scenes") {
  const SyntheticCorpusSpec spec = small_spec(7);
  for (int q = 0; q < spec.num_queries_positive; ++q) {
    const QueryRecipe recipe = positive_query_recipe(spec, q);
    const FrameSequence query = make_positive_query(spec, q);
    const FrameSequence ref = make_reference(spec, recipe.ref_index);
    const std::vector<SceneSpec> scenes =
        reference_scenes(spec, recipe.ref_index);
    std::size_t offset = 0;
    for (std::size_t s = 0; s < recipe.scene_begin; ++s) {
      offset += scenes[s].len_frames;
    }
    // Same span length.
    std::size_t span_frames = 0;
    for (std::size_t s = recipe.scene_begin;
         s < recipe.scene_begin + recipe.scene_count; ++s) {
      span_frames += scenes[s].len_frames;
    }
    REQUIRE(query.frames.size() == span_frames);
    // Pixels match the source up to noise and brightness jitter.
    double total_abs = 0.0;
    std::size_t count = 0;
    for (std::size_t f = 0; f < query.frames.size(); ++f) {
      const Frame& qf = query.frames[f];
      const Frame& rf = ref.frames[offset + f];
      for (std::size_t i = 0; i < qf.pixels.size(); ++i) {
        total_abs += std::abs(static_cast<double>(qf.pixels[i]) -
                              static_cast<double>(rf.pixels[i]) -
                              recipe.brightness);
        ++count;
      }
    }
    // Residual is the sigma-2 noise (plus rounding), nowhere near a scene
    // difference.
    CHECK(total_abs / static_cast<double>(count) < 3.0);
  }
}

TEST_CASE("corpus separability: positives outrank every distractor pair") {
  SyntheticCorpusSpec spec = small_spec(21);
  spec.num_references = 10;
  spec.num_queries_positive = 5;
  spec.num_distractors = 5;
  const SelectionPolicy policy{PolicyKind::local_max_mid, 30};

  std::vector<DescriptorSet> refs;
  for (int r = 0; r < spec.num_references; ++r) {
    refs.push_back(describe_video(make_reference(spec, r), policy));
  }
  const GroundTruth gt = corpus_ground_truth(spec);

  double min_positive = 2.0;
  for (int q = 0; q < spec.num_queries_positive; ++q) {
    const QueryRecipe recipe = positive_query_recipe(spec, q);
    const DescriptorSet qd =
        describe_video(make_positive_query(spec, q), policy);
    min_positive = std::min(
        min_positive,
        pair_score(qd, refs[static_cast<std::size_t>(recipe.ref_index)],
                   nullptr, 0.0));
  }
  double max_distractor = -2.0;
  for (int d = 0; d < spec.num_distractors; ++d) {
    const DescriptorSet dd = describe_video(make_distractor(spec, d), policy);
    for (const auto& r : refs) {
      max_distractor = std::max(max_distractor,
                                pair_score(dd, r, nullptr, 0.0));
    }
  }
  CHECK(min_positive > max_distractor);
}

TEST_CASE("corpus videos have sane structure") {
  const SyntheticCorpusSpec spec = small_spec(33);
  const FrameSequence ref = make_reference(spec, 0);
  CHECK(ref.width == spec.width);
  CHECK(ref.height == spec.height);
  CHECK(ref.fps == spec.fps);
  const std::vector<SceneSpec> scenes = reference_scenes(spec, 0);
  std::size_t total = 0;
  for (const auto& s : scenes) total += s.len_frames;
  CHECK(ref.frames.size() == total);
  CHECK(scenes.size() >= static_cast<std::size_t>(spec.scenes_min));
  CHECK(scenes.size() <= static_cast<std::size_t>(spec.scenes_max));

  // Pixels stay away from saturation so brightness edits stay lossless.
  for (const auto& f : ref.frames) {
    for (const auto& p : f.pixels) {
      CHECK(p > 10);
      CHECK(p < 245);
    }
  }
}

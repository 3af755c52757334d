#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "vcd/attack.hpp"
#include "vcd/corpus.hpp"
#include "vcd/match.hpp"
#include "vcd/metrics.hpp"
#include "vcd/select.hpp"

namespace vcd {

struct CorpusSource {
  std::string manifest_path;  // existing corpus, or
  std::optional<SyntheticCorpusSpec> synthetic;  // generated into output_dir
  std::string gt_path;  // defaults to gt.csv beside the manifest
};

struct MatcherConfig {
  double beta = 1.0;
  int top_k = 1;
  // "" = raw scores; "distractors" = normalize against the unattacked
  // descriptors of the manifest's distractor queries.
  std::string background;
};

// One bench run: every policy crossed with every attack. Random-blackout
// cells repeat `repeats` times under derived seeds and report mean and
// sample standard deviation.
struct ExperimentConfig {
  CorpusSource corpus;
  std::vector<SelectionPolicy> policies;
  std::vector<AttackSpec> attacks;
  MatcherConfig matcher;
  std::uint64_t seed = 1;
  int repeats = 3;
  std::string output_dir;
  unsigned threads = 1;
  // When false every wall-time field is reported as zero, which makes all
  // outputs byte-comparable across runs and thread counts.
  bool timing = true;
  int dct_block = kDefaultDctBlock;
};

struct RepeatResult {
  std::uint64_t seed = 0;
  double uap = 0.0;
  std::string scores_path;
  std::string report_path;
};

struct CellResult {
  SelectionPolicy policy;
  AttackSpec attack;
  std::vector<RepeatResult> repeats;
  double uap_mean = 0.0;
  double uap_std = 0.0;
  MethodStats stats;  // from the first repeat
};

struct ExperimentResult {
  std::vector<CellResult> cells;
  std::string summary_csv_path;
  std::string summary_json_path;
};

// Seed for one (policy, attack, repeat) cell:
// splitmix64(config.seed ^ fnv1a64("<policy>|<attack>|rep=<k>")).
std::uint64_t cell_seed(std::uint64_t base, const SelectionPolicy& policy,
                        const AttackSpec& attack, int repeat);

// Division-safe throughput; sub-microsecond intervals clamp to 1 ns.
double videos_per_second(std::size_t video_count, double seconds);

class StageTimer {
 public:
  StageTimer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

// JSON document mirroring the config fields; see README for the schema.
ExperimentConfig load_experiment_config(const std::string& path);

}  // namespace vcd

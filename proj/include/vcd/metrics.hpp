#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "vcd/match.hpp"

namespace vcd {

struct GroundTruth {
  std::set<std::pair<std::string, std::string>> positives;
};

// Per-policy pipeline statistics carried into the evaluation report.
struct MethodStats {
  std::uint64_t selected_frames_total = 0;
  double reduction_factor_mean = 0.0;
  std::uint64_t descriptor_bytes = 0;
  double wall_time_seconds = 0.0;
  double videos_per_second = 0.0;
};

struct EvalReport {
  double uap = 0.0;
  std::uint64_t positives_total = 0;
  std::uint64_t predictions_total = 0;
  std::vector<std::string> warnings;
  std::map<std::string, MethodStats> per_method_stats;
};

// Average precision over the pooled ranked list: at each rank holding a
// positive, accumulate TP/rank; divide by the total number of ground-truth
// positives, so positives never retrieved still weigh the denominator.
// The list must be canonical (score desc, lexicographic tiebreak).
double micro_average_precision(const PredictionList& predictions,
                               const GroundTruth& gt);

// CSV with header "query_id,reference_id"; duplicate rows are rejected.
GroundTruth read_ground_truth_csv_file(const std::string& path);
void write_ground_truth_csv_file(const std::string& path,
                                 const GroundTruth& gt);

EvalReport evaluate(const PredictionList& predictions, const GroundTruth& gt,
                    const std::map<std::string, MethodStats>& stats = {});
EvalReport evaluate_run(const std::string& scores_path,
                        const std::string& gt_path,
                        const std::map<std::string, MethodStats>& stats = {});

// Pretty-printed JSON with a fixed key order; identical reports serialize to
// identical bytes.
std::string report_to_json(const EvalReport& report);
void write_report_file(const std::string& path, const EvalReport& report);

}  // namespace vcd

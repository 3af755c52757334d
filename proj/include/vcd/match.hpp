#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "vcd/descriptor.hpp"

namespace vcd {

struct Prediction {
  std::string query_id;
  std::string reference_id;
  double score = 0.0;
};

// Scored query-reference pairs in canonical order: score descending, ties by
// (query_id, reference_id) ascending. At most one entry per pair.
struct PredictionList {
  std::vector<Prediction> entries;

  // Sorts into canonical order and rejects duplicate pairs.
  void canonicalize();
};

// Descriptors of distractor videos used for score normalization.
struct BackgroundPool {
  std::vector<FrameDescriptor> descriptors;
};

struct MatchOptions {
  double beta = 1.0;  // weight of the background subtraction
  int top_k = 1;      // 1 = max over frame pairs; k > 1 = mean of top k
  unsigned threads = 1;
};

// Frame-level scores are cosine similarities; with a pool, each query frame
// is penalized by beta times its best background similarity. The video-level
// score aggregates frame-pair values by max (top_k = 1) or mean of the top k.
// Without a pool the score is symmetric in (query, reference); normalization
// breaks that, since only query frames are penalized.
double pair_score(const DescriptorSet& query, const DescriptorSet& reference,
                  const BackgroundPool* pool, double beta, int top_k = 1);

// Scores every (query, reference) pair; output is canonical and identical
// for any thread count.
PredictionList match_all(const std::vector<DescriptorSet>& queries,
                         const std::vector<DescriptorSet>& references,
                         const BackgroundPool* pool,
                         const MatchOptions& options);

// CSV with header "query_id,reference_id,score"; scores carry 9 significant
// digits.
void write_scores_csv(std::ostream& out, const PredictionList& predictions);
void write_scores_csv_file(const std::string& path,
                           const PredictionList& predictions);
PredictionList read_scores_csv(std::istream& in);
PredictionList read_scores_csv_file(const std::string& path);

}  // namespace vcd

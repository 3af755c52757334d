#include "vcd/match.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "vcd/parallel.hpp"

namespace vcd {
namespace {

bool canonical_less(const Prediction& a, const Prediction& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.query_id != b.query_id) return a.query_id < b.query_id;
  return a.reference_id < b.reference_id;
}

void check_unique_ids(const std::vector<DescriptorSet>& sets,
                      const char* side) {
  std::vector<const std::string*> ids;
  ids.reserve(sets.size());
  for (const auto& s : sets) ids.push_back(&s.video_id);
  std::sort(ids.begin(), ids.end(),
            [](const std::string* a, const std::string* b) { return *a < *b; });
  for (std::size_t i = 1; i < ids.size(); ++i) {
    if (*ids[i] == *ids[i - 1]) {
      throw DataError(std::string("duplicate ") + side + " id: " + *ids[i]);
    }
  }
}

// Best background similarity per query frame; shared across all references.
std::vector<double> background_maxima(const DescriptorSet& query,
                                      const BackgroundPool& pool) {
  std::vector<double> best(query.descriptors.size(), 0.0);
  for (std::size_t i = 0; i < query.descriptors.size(); ++i) {
    double m = -1.0;
    for (const auto& bg : pool.descriptors) {
      m = std::max(m, cosine_similarity(query.descriptors[i], bg));
    }
    best[i] = m;
  }
  return best;
}

double aggregate(const DescriptorSet& query, const DescriptorSet& reference,
                 const std::vector<double>* bg, double beta, int top_k) {
  if (query.descriptors.empty() || reference.descriptors.empty()) {
    throw DataError("pair_score: empty descriptor set");
  }
  if (query.dim() != reference.dim()) {
    throw DataError("pair_score: descriptor dimension mismatch");
  }
  if (top_k <= 1) {
    double best = -2.0;
    for (std::size_t qi = 0; qi < query.descriptors.size(); ++qi) {
      const double penalty = bg ? beta * (*bg)[qi] : 0.0;
      for (const auto& rf : reference.descriptors) {
        best = std::max(
            best, cosine_similarity(query.descriptors[qi], rf) - penalty);
      }
    }
    return best;
  }
  std::vector<double> values;
  values.reserve(query.descriptors.size() * reference.descriptors.size());
  for (std::size_t qi = 0; qi < query.descriptors.size(); ++qi) {
    const double penalty = bg ? beta * (*bg)[qi] : 0.0;
    for (const auto& rf : reference.descriptors) {
      values.push_back(cosine_similarity(query.descriptors[qi], rf) - penalty);
    }
  }
  const std::size_t k =
      std::min<std::size_t>(static_cast<std::size_t>(top_k), values.size());
  std::partial_sort(values.begin(), values.begin() + k, values.end(),
                    std::greater<double>());
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += values[i];
  return sum / static_cast<double>(k);
}

}  // namespace

void PredictionList::canonicalize() {
  std::sort(entries.begin(), entries.end(), canonical_less);
  // Duplicate pairs are not necessarily adjacent in score order, so the
  // uniqueness check sorts the pairs themselves.
  std::vector<std::pair<const std::string*, const std::string*>> pairs;
  pairs.reserve(entries.size());
  for (const auto& e : entries) {
    pairs.emplace_back(&e.query_id, &e.reference_id);
  }
  std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
    if (*a.first != *b.first) return *a.first < *b.first;
    return *a.second < *b.second;
  });
  for (std::size_t i = 1; i < pairs.size(); ++i) {
    if (*pairs[i].first == *pairs[i - 1].first &&
        *pairs[i].second == *pairs[i - 1].second) {
      throw DataError("duplicate prediction pair (" + *pairs[i].first + ", " +
                      *pairs[i].second + ")");
    }
  }
}

double pair_score(const DescriptorSet& query, const DescriptorSet& reference,
                  const BackgroundPool* pool, double beta, int top_k) {
  if (pool && pool->descriptors.empty()) {
    throw DataError("pair_score: background pool is empty");
  }
  if (pool) {
    const std::vector<double> bg = background_maxima(query, *pool);
    return aggregate(query, reference, &bg, beta, top_k);
  }
  return aggregate(query, reference, nullptr, beta, top_k);
}

PredictionList match_all(const std::vector<DescriptorSet>& queries,
                         const std::vector<DescriptorSet>& references,
                         const BackgroundPool* pool,
                         const MatchOptions& options) {
  check_unique_ids(queries, "query");
  check_unique_ids(references, "reference");
  if (pool && pool->descriptors.empty()) {
    throw DataError("match_all: background pool is empty");
  }
  PredictionList list;
  list.entries.resize(queries.size() * references.size());
  parallel_for(queries.size(), options.threads, [&](std::size_t qi) {
    const DescriptorSet& q = queries[qi];
    std::vector<double> bg;
    if (pool) bg = background_maxima(q, *pool);
    for (std::size_t ri = 0; ri < references.size(); ++ri) {
      Prediction& p = list.entries[qi * references.size() + ri];
      p.query_id = q.video_id;
      p.reference_id = references[ri].video_id;
      p.score = aggregate(q, references[ri], pool ? &bg : nullptr,
                          options.beta, options.top_k);
    }
  });
  list.canonicalize();
  return list;
}

void write_scores_csv(std::ostream& out, const PredictionList& predictions) {
  out << "query_id,reference_id,score\n";
  char buf[64];
  for (const auto& e : predictions.entries) {
    if (e.query_id.find_first_of(",\n") != std::string::npos ||
        e.reference_id.find_first_of(",\n") != std::string::npos) {
      throw DataError("video id contains CSV delimiter: " + e.query_id);
    }
    std::snprintf(buf, sizeof(buf), "%.9g", e.score);
    out << e.query_id << ',' << e.reference_id << ',' << buf << '\n';
  }
  if (!out) throw DataError("short write while emitting scores CSV");
}

void write_scores_csv_file(const std::string& path,
                           const PredictionList& predictions) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot create " + path);
  write_scores_csv(out, predictions);
}

PredictionList read_scores_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty scores CSV");
  if (line == "query_id,reference_id,score\r") line.pop_back();
  if (line != "query_id,reference_id,score") {
    throw DataError("scores CSV header mismatch: '" + line + "'");
  }
  PredictionList list;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 == std::string::npos ? 0 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) {
      throw DataError("scores CSV line " + std::to_string(line_no) +
                      " is not 'query,reference,score'");
    }
    Prediction p;
    p.query_id = line.substr(0, c1);
    p.reference_id = line.substr(c1 + 1, c2 - c1 - 1);
    const std::string score = line.substr(c2 + 1);
    char* end = nullptr;
    p.score = std::strtod(score.c_str(), &end);
    if (end == score.c_str() || *end != '\0') {
      throw DataError("bad score on CSV line " + std::to_string(line_no));
    }
    list.entries.push_back(std::move(p));
  }
  list.canonicalize();
  return list;
}

PredictionList read_scores_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return read_scores_csv(in);
}

}  // namespace vcd

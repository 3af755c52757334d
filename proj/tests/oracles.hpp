// Test-only reference implementations. Each oracle follows the defining
// formula directly and stays independent of the library code paths it
// checks.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "vcd/media.hpp"

namespace oracles {

// Mean absolute difference by explicit row/column double loop.
inline double brute_diff(const vcd::Frame& a, const vcd::Frame& b) {
  double sum = 0.0;
  for (std::uint32_t r = 0; r < a.height; ++r) {
    for (std::uint32_t c = 0; c < a.width; ++c) {
      sum += std::abs(static_cast<double>(a.at(r, c)) -
                      static_cast<double>(b.at(r, c)));
    }
  }
  return sum / (static_cast<double>(a.width) * a.height);
}

// Hann weights straight from the formula, normalized.
inline std::vector<double> naive_hanning(int size) {
  std::vector<double> w(static_cast<std::size_t>(size));
  double sum = 0.0;
  for (int k = 0; k < size; ++k) {
    w[static_cast<std::size_t>(k)] =
        0.5 * (1.0 - std::cos(2.0 * M_PI * k / (size - 1)));
    sum += w[static_cast<std::size_t>(k)];
  }
  if (sum <= 0.0) return std::vector<double>(w.size(), 1.0 / size);
  for (double& x : w) x /= sum;
  return w;
}

// O(n*w) convolution over an explicitly edge-replicated copy, accumulated
// from the right so the summation order differs from the implementation.
inline std::vector<double> naive_smooth(const std::vector<double>& values,
                                        int window) {
  const int n = static_cast<int>(values.size());
  int w = window;
  if (w >= 2 * n) w = 2 * n - 1;
  if (w < 2) return values;
  const std::vector<double> weights = naive_hanning(w);
  const int off = w / 2;
  std::vector<double> extended;
  for (int i = 0; i < off; ++i) extended.push_back(values.front());
  extended.insert(extended.end(), values.begin(), values.end());
  for (int i = 0; i < w - off; ++i) extended.push_back(values.back());
  std::vector<double> out(values.size());
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int k = w - 1; k >= 0; --k) {
      acc += weights[static_cast<std::size_t>(k)] *
             extended[static_cast<std::size_t>(i + k)];
    }
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

// Per-index definition check: scan outward for the nearest unequal
// neighbors; plateaus reduce to their midpoint afterwards.
inline std::vector<std::size_t> maxima_by_definition(
    const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<char> is_max(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::ptrdiff_t left = static_cast<std::ptrdiff_t>(i) - 1;
    while (left >= 0 && v[static_cast<std::size_t>(left)] == v[i]) --left;
    std::size_t right = i + 1;
    while (right < n && v[right] == v[i]) ++right;
    if (left < 0 || right >= n) continue;
    if (v[static_cast<std::size_t>(left)] < v[i] && v[right] < v[i]) {
      is_max[i] = 1;
    }
  }
  std::vector<std::size_t> out;
  std::size_t i = 0;
  while (i < n) {
    if (!is_max[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && is_max[j + 1] && v[j + 1] == v[i]) ++j;
    out.push_back((i + j) / 2);
    i = j + 1;
  }
  return out;
}

// Direct O(N^4) orthonormal 2-D DCT-II.
inline std::vector<std::vector<double>> naive_dct2(
    const std::vector<std::vector<double>>& m) {
  const std::size_t n = m.size();
  std::vector<std::vector<double>> out(n, std::vector<double>(n, 0.0));
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t u = 0; u < n; ++u) {
      double acc = 0.0;
      for (std::size_t y = 0; y < n; ++y) {
        for (std::size_t x = 0; x < n; ++x) {
          acc += m[y][x] *
                 std::cos(M_PI * (2.0 * x + 1.0) * u / (2.0 * n)) *
                 std::cos(M_PI * (2.0 * y + 1.0) * v / (2.0 * n));
        }
      }
      const double au = u == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
      const double av = v == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
      out[v][u] = au * av * acc;
    }
  }
  return out;
}

struct ScoredPair {
  std::string query;
  std::string reference;
  double score;
};

// Average precision by per-positive rank counting: every positive found in
// the list contributes (positives at rank <= its rank) / rank, where rank
// counts entries that beat it on (score, query, reference) order.
inline double ap_by_rank_counts(
    const std::vector<ScoredPair>& preds,
    const std::set<std::pair<std::string, std::string>>& positives) {
  const auto beats = [](const ScoredPair& a, const ScoredPair& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.query != b.query) return a.query < b.query;
    return a.reference < b.reference;
  };
  double sum = 0.0;
  for (const auto& p : preds) {
    if (!positives.count({p.query, p.reference})) continue;
    std::size_t rank = 1;
    std::size_t tp = 1;
    for (const auto& q : preds) {
      if (&q == &p) continue;
      if (beats(q, p)) {
        ++rank;
        if (positives.count({q.query, q.reference})) ++tp;
      }
    }
    sum += static_cast<double>(tp) / static_cast<double>(rank);
  }
  return sum / static_cast<double>(positives.size());
}

// Step-interpolated area under the precision-recall curve. With precision
// held constant across each recall increment this integral coincides with
// the discrete AP sum.
inline double pr_step_area(
    std::vector<ScoredPair> preds,
    const std::set<std::pair<std::string, std::string>>& positives) {
  std::sort(preds.begin(), preds.end(),
            [](const ScoredPair& a, const ScoredPair& b) {
              if (a.score != b.score) return a.score > b.score;
              if (a.query != b.query) return a.query < b.query;
              return a.reference < b.reference;
            });
  double area = 0.0;
  double tp = 0.0;
  double prev_recall = 0.0;
  const double total = static_cast<double>(positives.size());
  for (std::size_t k = 0; k < preds.size(); ++k) {
    if (positives.count({preds[k].query, preds[k].reference})) {
      tp += 1.0;
      const double recall = tp / total;
      const double precision = tp / static_cast<double>(k + 1);
      area += precision * (recall - prev_recall);
      prev_recall = recall;
    }
  }
  return area;
}

// Middle-of-second indices evaluated in long double floating point.
inline std::vector<std::uint32_t> per_second_by_float(std::uint32_t n,
                                                      std::int64_t fps_num,
                                                      std::int64_t fps_den) {
  const long double fps = static_cast<long double>(fps_num) / fps_den;
  const auto seconds = static_cast<std::int64_t>(
      std::ceil(static_cast<long double>(n) / fps));
  std::vector<std::uint32_t> out;
  for (std::int64_t s = 0; s < seconds; ++s) {
    const auto idx = static_cast<std::int64_t>(
        std::floor((static_cast<long double>(s) + 0.5L) * fps));
    const auto clamped =
        static_cast<std::uint32_t>(std::min<std::int64_t>(idx, n - 1));
    if (out.empty() || out.back() != clamped) out.push_back(clamped);
  }
  return out;
}

}  // namespace oracles

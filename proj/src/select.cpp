#include "vcd/select.hpp"

#include <algorithm>

namespace vcd {
namespace {

SelectionResult make_result(const FrameSequence& seq, SelectionPolicy policy,
                            std::vector<std::uint32_t> indices) {
  if (indices.empty()) throw InvariantError("selection produced no indices");
  SelectionResult r;
  r.video_id = seq.video_id;
  r.policy = policy;
  r.source_frame_count = static_cast<std::uint32_t>(seq.frames.size());
  r.indices = std::move(indices);
  r.timestamps.reserve(r.indices.size());
  for (const std::uint32_t idx : r.indices) {
    r.timestamps.push_back(static_cast<double>(
        static_cast<std::int64_t>(idx) * seq.fps.den) / seq.fps.num);
  }
  return r;
}

// Frame indices one past each curve maximum: curve index i measures the
// transition between frames i and i+1, and the post-transition frame carries
// the new scene's content.
std::vector<std::uint32_t> maxima_frame_indices(const FrameSequence& seq,
                                                int window_size) {
  if (seq.frames.size() < 2) return {};
  const DiffCurve curve = smooth(compute_curve(seq), window_size);
  std::vector<std::uint32_t> frames;
  for (const std::size_t m : find_local_maxima(curve.smoothed)) {
    frames.push_back(static_cast<std::uint32_t>(m + 1));
  }
  return frames;
}

}  // namespace

const char* policy_kind_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::uniform_per_second:
      return "uniform_per_second";
    case PolicyKind::local_max:
      return "local_max";
    case PolicyKind::local_max_mid:
      return "local_max_mid";
  }
  throw InvariantError("unknown policy kind");
}

PolicyKind policy_kind_from_name(const std::string& name) {
  if (name == "uniform_per_second" || name == "uniform") {
    return PolicyKind::uniform_per_second;
  }
  if (name == "local_max" || name == "local-max") return PolicyKind::local_max;
  if (name == "local_max_mid" || name == "local-max-mid") {
    return PolicyKind::local_max_mid;
  }
  throw DataError("unknown selection policy '" + name + "'");
}

std::string SelectionPolicy::label() const {
  std::string s = policy_kind_name(kind);
  if (kind != PolicyKind::uniform_per_second) {
    s += "_w" + std::to_string(window_size);
  }
  return s;
}

std::vector<std::size_t> find_local_maxima(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> maxima;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[j + 1] == values[i]) ++j;
    if (i > 0 && j + 1 < n && values[i - 1] < values[i] &&
        values[j + 1] < values[i]) {
      maxima.push_back((i + j) / 2);
    }
    i = j + 1;
  }
  return maxima;
}

std::vector<std::uint32_t> per_second_indices(std::uint32_t frame_count,
                                              const Rational& fps) {
  if (frame_count == 0) return {};
  // ceil(n / fps) whole seconds.
  const std::int64_t n = frame_count;
  const std::int64_t seconds = (n * fps.den + fps.num - 1) / fps.num;
  std::vector<std::uint32_t> indices;
  for (std::int64_t s = 0; s < seconds; ++s) {
    const std::int64_t idx =
        std::min(((2 * s + 1) * fps.num) / (2 * fps.den), n - 1);
    if (indices.empty() || indices.back() != static_cast<std::uint32_t>(idx)) {
      indices.push_back(static_cast<std::uint32_t>(idx));
    }
  }
  return indices;
}

SelectionResult select_local_max(const FrameSequence& seq, int window_size) {
  if (seq.frames.empty()) throw InvariantError("selection: empty sequence");
  std::vector<std::uint32_t> indices = maxima_frame_indices(seq, window_size);
  if (indices.empty()) {
    indices.push_back(static_cast<std::uint32_t>(seq.frames.size() / 2));
  }
  return make_result(
      seq, SelectionPolicy{PolicyKind::local_max, window_size},
      std::move(indices));
}

SelectionResult select_local_max_mid(const FrameSequence& seq,
                                     int window_size) {
  if (seq.frames.empty()) throw InvariantError("selection: empty sequence");
  const std::vector<std::uint32_t> maxima =
      maxima_frame_indices(seq, window_size);
  const std::uint32_t n = static_cast<std::uint32_t>(seq.frames.size());
  std::vector<std::uint32_t> indices;
  if (maxima.empty()) {
    indices.push_back(n / 2);
  } else {
    indices.push_back(maxima.front() / 2);
    for (std::size_t j = 0; j + 1 < maxima.size(); ++j) {
      indices.push_back((maxima[j] + maxima[j + 1]) / 2);
    }
    indices.push_back((maxima.back() + n - 1) / 2);
    indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  }
  return make_result(
      seq, SelectionPolicy{PolicyKind::local_max_mid, window_size},
      std::move(indices));
}

SelectionResult select_uniform_per_second(const FrameSequence& seq) {
  if (seq.frames.empty()) throw InvariantError("selection: empty sequence");
  return make_result(
      seq, SelectionPolicy{PolicyKind::uniform_per_second, 0},
      per_second_indices(static_cast<std::uint32_t>(seq.frames.size()),
                         seq.fps));
}

SelectionResult select_frames(const FrameSequence& seq,
                              const SelectionPolicy& policy) {
  switch (policy.kind) {
    case PolicyKind::uniform_per_second:
      return select_uniform_per_second(seq);
    case PolicyKind::local_max:
      return select_local_max(seq, policy.window_size);
    case PolicyKind::local_max_mid:
      return select_local_max_mid(seq, policy.window_size);
  }
  throw InvariantError("unknown policy kind");
}

double reduction_factor(const SelectionResult& result) {
  if (result.indices.empty()) throw InvariantError("empty selection");
  return static_cast<double>(result.source_frame_count) /
         static_cast<double>(result.indices.size());
}

}  // namespace vcd

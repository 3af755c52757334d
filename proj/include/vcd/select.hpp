#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vcd/curve.hpp"
#include "vcd/media.hpp"

namespace vcd {

enum class PolicyKind : std::uint8_t {
  uniform_per_second = 0,
  local_max = 1,
  local_max_mid = 2,
};

const char* policy_kind_name(PolicyKind kind);
PolicyKind policy_kind_from_name(const std::string& name);

struct SelectionPolicy {
  PolicyKind kind = PolicyKind::uniform_per_second;
  int window_size = 0;  // smoothing window; unused for uniform_per_second

  std::string label() const;

  bool operator==(const SelectionPolicy&) const = default;
};

// Frames chosen by a policy, as strictly increasing indices plus their
// timestamps index * fps_den / fps_num.
struct SelectionResult {
  std::string video_id;
  SelectionPolicy policy;
  std::vector<std::uint32_t> indices;
  std::vector<double> timestamps;
  std::uint32_t source_frame_count = 0;
};

// Indices of local maxima. An index is a maximum when its value exceeds the
// nearest unequal neighbor on both sides; a plateau bounded by strictly
// smaller values on both sides yields its midpoint (rounded down). List
// endpoints never qualify.
std::vector<std::size_t> find_local_maxima(const std::vector<double>& values);

// Shared middle-of-second formula: index(s) = min(floor((s + 0.5) * fps),
// n - 1) for each whole second s in [0, ceil(n / fps)), evaluated in exact
// rational arithmetic and deduplicated. blackout_targeted uses the same
// function, which is what makes the targeted attack hit the one-per-second
// baseline exactly.
std::vector<std::uint32_t> per_second_indices(std::uint32_t frame_count,
                                              const Rational& fps);

SelectionResult select_local_max(const FrameSequence& seq, int window_size);
SelectionResult select_local_max_mid(const FrameSequence& seq,
                                     int window_size);
SelectionResult select_uniform_per_second(const FrameSequence& seq);
SelectionResult select_frames(const FrameSequence& seq,
                              const SelectionPolicy& policy);

// source frames divided by selected frames.
double reduction_factor(const SelectionResult& result);

}  // namespace vcd

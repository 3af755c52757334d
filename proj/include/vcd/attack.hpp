#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vcd/media.hpp"

namespace vcd {

enum class AttackKind : std::uint8_t {
  none = 0,
  random_blackout = 1,
  targeted_blackout = 2,
  speed = 3,
};

const char* attack_kind_name(AttackKind kind);
AttackKind attack_kind_from_name(const std::string& name);

// Temporal attack description. Only the fields relevant to `kind` are read:
// p/seed/bleed for random_blackout, bleed for targeted_blackout, factor for
// speed. The speed factor is an exact rational so fps round-trips are exact.
struct AttackSpec {
  AttackKind kind = AttackKind::none;
  double p = 0.0;
  Rational factor{1, 1};
  std::uint64_t seed = 0;
  int bleed = 0;

  std::string label() const;
};

// Each frame is independently replaced by an all-zero frame with probability
// p. Draws come from mt19937_64 seeded with `seed`, one draw per frame in
// frame order, mapped to [0,1) by taking the top 53 bits — fully reproducible
// across platforms. With bleed b > 0 the b frames on each side of a blacked
// frame are blended halfway toward black (pixel -> ceil(pixel/2)); a frame is
// blended at most once and blacked frames stay black.
FrameSequence blackout_random(const FrameSequence& seq, double p,
                              std::uint64_t seed, int bleed = 0);

// Blacks the middle frame of every second; the index set is exactly
// per_second_indices (shared with the one-per-second selection baseline).
FrameSequence blackout_targeted(const FrameSequence& seq, int bleed = 0);

// Frames unchanged; fps is multiplied by the factor and reduced.
FrameSequence speed_change(const FrameSequence& seq, const Rational& factor);

FrameSequence apply_attack(const FrameSequence& seq, const AttackSpec& spec);

}  // namespace vcd

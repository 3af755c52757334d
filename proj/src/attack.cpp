#include "vcd/attack.hpp"

#include <algorithm>
#include <cstdio>

#include "vcd/select.hpp"

namespace vcd {
namespace {

FrameSequence apply_blackouts(FrameSequence seq,
                              const std::vector<std::uint32_t>& blacked,
                              int bleed) {
  std::vector<char> is_black(seq.frames.size(), 0);
  for (const std::uint32_t b : blacked) is_black[b] = 1;
  if (bleed > 0) {
    std::vector<char> is_bled(seq.frames.size(), 0);
    const std::int64_t n = static_cast<std::int64_t>(seq.frames.size());
    for (const std::uint32_t b : blacked) {
      const std::int64_t lo = std::max<std::int64_t>(0, b - bleed);
      const std::int64_t hi = std::min<std::int64_t>(n - 1, b + bleed);
      for (std::int64_t i = lo; i <= hi; ++i) {
        if (!is_black[static_cast<std::size_t>(i)]) {
          is_bled[static_cast<std::size_t>(i)] = 1;
        }
      }
    }
    for (std::size_t i = 0; i < seq.frames.size(); ++i) {
      if (!is_bled[i]) continue;
      for (std::uint8_t& p : seq.frames[i].pixels) {
        p = static_cast<std::uint8_t>((p + 1) >> 1);
      }
    }
  }
  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    if (is_black[i]) {
      std::fill(seq.frames[i].pixels.begin(), seq.frames[i].pixels.end(),
                std::uint8_t{0});
    }
  }
  return seq;
}

}  // namespace

const char* attack_kind_name(AttackKind kind) {
  switch (kind) {
    case AttackKind::none:
      return "none";
    case AttackKind::random_blackout:
      return "random_blackout";
    case AttackKind::targeted_blackout:
      return "targeted_blackout";
    case AttackKind::speed:
      return "speed";
  }
  throw InvariantError("unknown attack kind");
}

AttackKind attack_kind_from_name(const std::string& name) {
  if (name == "none") return AttackKind::none;
  if (name == "random_blackout" || name == "random") {
    return AttackKind::random_blackout;
  }
  if (name == "targeted_blackout" || name == "targeted") {
    return AttackKind::targeted_blackout;
  }
  if (name == "speed") return AttackKind::speed;
  throw DataError("unknown attack kind '" + name + "'");
}

std::string AttackSpec::label() const {
  switch (kind) {
    case AttackKind::none:
      return "none";
    case AttackKind::random_blackout: {
      char buf[48];
      std::snprintf(buf, sizeof(buf), "random_p%.6g", p);
      std::string s(buf);
      if (bleed > 0) s += "_b" + std::to_string(bleed);
      return s;
    }
    case AttackKind::targeted_blackout:
      return bleed > 0 ? "targeted_b" + std::to_string(bleed) : "targeted";
    case AttackKind::speed:
      return "speed_" + std::to_string(factor.num) + "over" +
             std::to_string(factor.den);
  }
  throw InvariantError("unknown attack kind");
}

FrameSequence blackout_random(const FrameSequence& seq, double p,
                              std::uint64_t seed, int bleed) {
  if (p < 0.0 || p > 1.0) {
    throw InvariantError("blackout_random: p outside [0, 1]");
  }
  Rng rng(seed);
  std::vector<std::uint32_t> blacked;
  for (std::uint32_t i = 0; i < seq.frames.size(); ++i) {
    if (rng.uniform01() < p) blacked.push_back(i);
  }
  return apply_blackouts(seq, blacked, bleed);
}

FrameSequence blackout_targeted(const FrameSequence& seq, int bleed) {
  return apply_blackouts(
      seq,
      per_second_indices(static_cast<std::uint32_t>(seq.frames.size()),
                         seq.fps),
      bleed);
}

FrameSequence speed_change(const FrameSequence& seq, const Rational& factor) {
  if (!factor.positive()) {
    throw InvariantError("speed_change: factor must be positive");
  }
  FrameSequence out = seq;
  out.fps = seq.fps * factor;
  return out;
}

FrameSequence apply_attack(const FrameSequence& seq, const AttackSpec& spec) {
  switch (spec.kind) {
    case AttackKind::none:
      return seq;
    case AttackKind::random_blackout:
      return blackout_random(seq, spec.p, spec.seed, spec.bleed);
    case AttackKind::targeted_blackout:
      return blackout_targeted(seq, spec.bleed);
    case AttackKind::speed:
      return speed_change(seq, spec.factor);
  }
  throw InvariantError("unknown attack kind");
}

}  // namespace vcd

#include "vcd/curve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>

namespace vcd {

double interframe_diff(const Frame& prev, const Frame& next) {
  if (prev.width != next.width || prev.height != next.height) {
    throw InvariantError("interframe_diff: frame dimensions differ");
  }
  const std::size_t n = prev.pixels.size();
  const std::uint8_t* a = prev.pixels.data();
  const std::uint8_t* b = next.pixels.data();
  // 32-bit accumulator over bounded chunks keeps the loop in the
  // sum-of-absolute-differences shape the vectorizer turns into psadbw;
  // 255 * 2^16 stays well inside 32 bits.
  std::uint64_t total = 0;
  std::size_t i = 0;
  while (i < n) {
    const std::size_t chunk = std::min<std::size_t>(n - i, std::size_t{1} << 16);
    unsigned int sum = 0;
    for (std::size_t k = 0; k < chunk; ++k) {
      const int d = static_cast<int>(a[i + k]) - static_cast<int>(b[i + k]);
      sum += static_cast<unsigned int>(d < 0 ? -d : d);
    }
    total += sum;
    i += chunk;
  }
  return static_cast<double>(total) / static_cast<double>(n);
}

DiffCurve compute_curve(const FrameSequence& seq) {
  if (seq.frames.empty()) throw InvariantError("compute_curve: no frames");
  DiffCurve curve;
  if (seq.frames.size() < 2) return curve;  // degenerate
  curve.values.resize(seq.frames.size() - 1);
  for (std::size_t i = 0; i + 1 < seq.frames.size(); ++i) {
    curve.values[i] = interframe_diff(seq.frames[i], seq.frames[i + 1]);
  }
  return curve;
}

std::vector<double> hanning_window(int size) {
  if (size < 2) throw InvariantError("hanning_window: size must be >= 2");
  std::vector<double> w(static_cast<std::size_t>(size));
  constexpr double kPi = 3.14159265358979323846;
  for (int k = 0; k <= (size - 1) / 2; ++k) {
    const double v = 0.5 * (1.0 - std::cos(2.0 * kPi * k / (size - 1)));
    w[static_cast<std::size_t>(k)] = v;
    w[static_cast<std::size_t>(size - 1 - k)] = v;
  }
  const double sum = std::accumulate(w.begin(), w.end(), 0.0);
  if (sum <= 0.0) {
    // Only size 2 gets here: raw weights [0, 0] carry no mass.
    std::fill(w.begin(), w.end(), 1.0 / size);
    return w;
  }
  for (double& x : w) x /= sum;
  return w;
}

DiffCurve smooth(DiffCurve curve, int window_size) {
  if (curve.values.empty()) {
    throw InvariantError("smooth: degenerate curve");
  }
  if (window_size < 2) throw InvariantError("smooth: window must be >= 2");
  const int n = static_cast<int>(curve.values.size());
  int w = window_size;
  if (w >= 2 * n) w = 2 * n - 1;  // largest odd value below 2n
  curve.window_size = w;
  if (w < 2) {
    curve.smoothed = curve.values;
    return curve;
  }
  const std::vector<double> weights = hanning_window(w);
  const int off = w / 2;
  curve.smoothed.resize(curve.values.size());
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    double lo = curve.values[static_cast<std::size_t>(
        std::clamp(i - off, 0, n - 1))];
    double hi = lo;
    for (int k = 0; k < w; ++k) {
      const int j = std::clamp(i + k - off, 0, n - 1);
      const double v = curve.values[static_cast<std::size_t>(j)];
      acc += weights[static_cast<std::size_t>(k)] * v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    curve.smoothed[static_cast<std::size_t>(i)] = std::clamp(acc, lo, hi);
  }
  return curve;
}

}  // namespace vcd

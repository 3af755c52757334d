#pragma once

#include <vector>

#include "vcd/media.hpp"

namespace vcd {

// Per-transition interframe difference values for one video.
// values[i] is the mean absolute pixel difference between frames i and i+1,
// so an n-frame video yields n-1 values. A single-frame video produces the
// degenerate empty curve; selection handles that case explicitly.
struct DiffCurve {
  std::vector<double> values;
  std::vector<double> smoothed;  // same length as values once smooth() ran
  int window_size = 0;           // 0 until smoothed

  bool degenerate() const { return values.empty(); }
};

// Mean absolute pixel difference, accumulated in integer arithmetic and
// divided once at the end. Result is in [0, 255].
double interframe_diff(const Frame& prev, const Frame& next);

DiffCurve compute_curve(const FrameSequence& seq);

// Raised-cosine weights w[k] = 0.5*(1 - cos(2*pi*k/(size-1))) normalized to
// unit sum; both endpoints are zero before normalization. The weights are
// mirrored so symmetric taps compare bit-equal. Size 2 is degenerate (both
// raw weights are zero) and falls back to uniform weights.
std::vector<double> hanning_window(int size);

// Same-length convolution with the normalized Hanning window; the curve is
// virtually extended by edge replication. Window alignment: centered on each
// sample, even sizes centered on the half-sample with offset size/2. A
// window >= twice the curve length is clipped to the largest odd value below
// that bound. Each output is clamped to the min/max of its input window so
// smoothing can never escape the data range.
DiffCurve smooth(DiffCurve curve, int window_size);

}  // namespace vcd

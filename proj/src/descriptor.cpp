#include "vcd/descriptor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace vcd {
namespace {

constexpr std::uint16_t kStoreVersion = 1;
constexpr double kPi = 3.14159265358979323846;
constexpr double kFlatNormThreshold = 1e-9;

// Resamples one axis of length `src` to kDescriptorGrid cells. Downscaling
// averages over the exact fractional source interval; upscaling replicates
// by floor(cell * src / grid).
void resample_axis(const double* src, std::size_t src_len, std::size_t stride,
                   double* dst, std::size_t dst_stride) {
  constexpr int g = kDescriptorGrid;
  if (src_len >= g) {
    const double step = static_cast<double>(src_len) / g;
    for (int o = 0; o < g; ++o) {
      const double lo = o * step;
      const double hi = (o + 1) * step;
      const std::size_t first = static_cast<std::size_t>(lo);
      std::size_t last = static_cast<std::size_t>(hi);
      if (last >= src_len) last = src_len - 1;
      double acc = 0.0;
      for (std::size_t s = first; s <= last; ++s) {
        const double cover = std::min(hi, static_cast<double>(s + 1)) -
                             std::max(lo, static_cast<double>(s));
        if (cover > 0.0) acc += cover * src[s * stride];
      }
      dst[o * dst_stride] = acc / step;
    }
  } else {
    for (int o = 0; o < g; ++o) {
      const std::size_t s = (static_cast<std::size_t>(o) * src_len) / g;
      dst[o * dst_stride] = src[s * stride];
    }
  }
}

// 32-point orthonormal DCT-II basis, computed once.
const std::array<double, kDescriptorGrid * kDescriptorGrid>& dct_basis() {
  static const auto table = [] {
    std::array<double, kDescriptorGrid * kDescriptorGrid> t{};
    constexpr int g = kDescriptorGrid;
    for (int u = 0; u < g; ++u) {
      const double a = u == 0 ? std::sqrt(1.0 / g) : std::sqrt(2.0 / g);
      for (int s = 0; s < g; ++s) {
        t[static_cast<std::size_t>(u) * g + s] =
            a * std::cos(kPi * (2 * s + 1) * u / (2.0 * g));
      }
    }
    return t;
  }();
  return table;
}

template <typename T>
void put_le(std::ostream& out, T v) {
  unsigned char buf[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  }
  out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T get_le(std::istream& in, std::uint64_t& offset, const char* what) {
  unsigned char buf[sizeof(T)];
  in.read(reinterpret_cast<char*>(buf), sizeof(T));
  if (static_cast<std::size_t>(in.gcount()) != sizeof(T)) {
    throw ParseError(std::string("truncated ") + what,
                     offset + static_cast<std::uint64_t>(in.gcount()));
  }
  offset += sizeof(T);
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    v |= static_cast<T>(buf[i]) << (8 * i);
  }
  return v;
}

void put_f32(std::ostream& out, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_le<std::uint32_t>(out, bits);
}

float get_f32(std::istream& in, std::uint64_t& offset, const char* what) {
  const std::uint32_t bits = get_le<std::uint32_t>(in, offset, what);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

void put_f64(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_le<std::uint64_t>(out, bits);
}

double get_f64(std::istream& in, std::uint64_t& offset, const char* what) {
  const std::uint64_t bits = get_le<std::uint64_t>(in, offset, what);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

namespace {

// Separable resampling of a w x h double image to the 32x32 grid.
AnalysisGrid resample_to_grid(const std::vector<double>& image, std::size_t w,
                              std::size_t h) {
  constexpr int g = kDescriptorGrid;
  std::vector<double> horiz(h * g);
  for (std::size_t r = 0; r < h; ++r) {
    resample_axis(image.data() + r * w, w, 1, horiz.data() + r * g, 1);
  }
  AnalysisGrid grid{};
  for (int c = 0; c < g; ++c) {
    resample_axis(horiz.data() + c, h, g, grid.data() + c, g);
  }
  return grid;
}

}  // namespace

AnalysisGrid downscale(const Frame& frame) {
  if (frame.width == 0 || frame.height == 0 || frame.pixels.empty()) {
    throw InvariantError("downscale: empty frame");
  }
  std::vector<double> image(frame.pixels.begin(), frame.pixels.end());
  return resample_to_grid(image, frame.width, frame.height);
}

AnalysisGrid prepare_frame(const Frame& frame) {
  if (frame.width == 0 || frame.height == 0 || frame.pixels.empty()) {
    throw InvariantError("prepare_frame: empty frame");
  }
  const std::size_t w = frame.width;
  const std::size_t h = frame.height;
  const std::size_t n = w * h;

  // Centering in integer space: c = (pixel*n - sum) / n. A uniform brightness
  // shift leaves the integer numerator untouched, so everything downstream is
  // bit-identical.
  std::uint64_t sum = 0;
  for (const std::uint8_t p : frame.pixels) sum += p;
  std::vector<double> centered(n);
  const double dn = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::int64_t numer =
        static_cast<std::int64_t>(frame.pixels[i]) *
            static_cast<std::int64_t>(n) -
        static_cast<std::int64_t>(sum);
    centered[i] = static_cast<double>(numer) / dn;
  }
  AnalysisGrid grid = resample_to_grid(centered, w, h);

  double mean = 0.0;
  for (const double v : grid) mean += v;
  mean /= static_cast<double>(grid.size());
  for (double& v : grid) v -= mean;
  return grid;
}

std::vector<double> dct_block_coeffs(const AnalysisGrid& grid, int block) {
  constexpr int g = kDescriptorGrid;
  if (block < 2 || block > g) {
    throw InvariantError("dct_block_coeffs: block out of range");
  }
  const auto& basis = dct_basis();
  // rows: T1[u][y] = sum_x basis[u][x] * grid[y][x]
  std::vector<double> t1(static_cast<std::size_t>(block) * g, 0.0);
  for (int u = 0; u < block; ++u) {
    for (int y = 0; y < g; ++y) {
      double acc = 0.0;
      for (int x = 0; x < g; ++x) {
        acc += basis[static_cast<std::size_t>(u) * g + x] *
               grid[static_cast<std::size_t>(y) * g + x];
      }
      t1[static_cast<std::size_t>(u) * g + y] = acc;
    }
  }
  // cols: C[v][u] = sum_y basis[v][y] * T1[u][y]; emit row-major (v, u)
  // skipping DC.
  std::vector<double> coeffs;
  coeffs.reserve(static_cast<std::size_t>(block) * block - 1);
  for (int v = 0; v < block; ++v) {
    for (int u = 0; u < block; ++u) {
      if (u == 0 && v == 0) continue;
      double acc = 0.0;
      for (int y = 0; y < g; ++y) {
        acc += basis[static_cast<std::size_t>(v) * g + y] *
               t1[static_cast<std::size_t>(u) * g + y];
      }
      coeffs.push_back(acc);
    }
  }
  return coeffs;
}

FrameDescriptor dct_descriptor(const Frame& frame, int block) {
  const std::vector<double> coeffs =
      dct_block_coeffs(prepare_frame(frame), block);
  double norm2 = 0.0;
  for (const double c : coeffs) norm2 += c * c;
  const double norm = std::sqrt(norm2);
  FrameDescriptor d;
  d.vec.resize(coeffs.size());
  if (norm < kFlatNormThreshold) {
    d.flat = true;
    std::fill(d.vec.begin(), d.vec.end(), 0.0f);
  } else {
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      d.vec[i] = static_cast<float>(coeffs[i] / norm);
    }
  }
  return d;
}

double cosine_similarity(const FrameDescriptor& a, const FrameDescriptor& b) {
  if (a.vec.size() != b.vec.size()) {
    throw InvariantError("cosine_similarity: dimension mismatch");
  }
  if (a.flat || b.flat) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < a.vec.size(); ++i) {
    acc += static_cast<double>(a.vec[i]) * static_cast<double>(b.vec[i]);
  }
  return std::clamp(acc, -1.0, 1.0);
}

DescriptorSet describe_selection(const FrameSequence& seq,
                                 const SelectionResult& selection, int block) {
  DescriptorSet set;
  set.video_id = seq.video_id;
  set.policy = selection.policy;
  set.descriptors.reserve(selection.indices.size());
  for (std::size_t i = 0; i < selection.indices.size(); ++i) {
    FrameDescriptor d = dct_descriptor(seq.frames[selection.indices[i]], block);
    d.frame_index = selection.indices[i];
    d.timestamp = selection.timestamps[i];
    set.descriptors.push_back(std::move(d));
  }
  return set;
}

DescriptorSet describe_video(const FrameSequence& seq,
                             const SelectionPolicy& policy, int block) {
  return describe_selection(seq, select_frames(seq, policy), block);
}

std::uint64_t store_size_bytes(const std::vector<DescriptorSet>& sets) {
  std::uint64_t bytes = 4 + 2 + 2 + 4;  // magic, version, dim, video count
  for (const auto& set : sets) {
    bytes += 2 + set.video_id.size() + 1 + 2 + 4;
    for (const auto& d : set.descriptors) {
      bytes += 4 + 8 + 4 * d.vec.size();
    }
  }
  return bytes;
}

void write_store(std::ostream& out, const std::vector<DescriptorSet>& sets) {
  std::size_t dim = 0;
  for (const auto& set : sets) {
    for (const auto& d : set.descriptors) {
      if (dim == 0) dim = d.vec.size();
      if (d.vec.size() != dim) {
        throw InvariantError("descriptor sets mix dimensions");
      }
    }
  }
  if (dim == 0) dim = kDefaultDctBlock * kDefaultDctBlock - 1;
  out.write("VCDS", 4);
  put_le<std::uint16_t>(out, kStoreVersion);
  put_le<std::uint16_t>(out, static_cast<std::uint16_t>(dim));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(sets.size()));
  for (const auto& set : sets) {
    if (set.video_id.size() > 0xffff) {
      throw DataError("video id longer than 65535 bytes");
    }
    put_le<std::uint16_t>(out,
                          static_cast<std::uint16_t>(set.video_id.size()));
    out.write(set.video_id.data(),
              static_cast<std::streamsize>(set.video_id.size()));
    put_le<std::uint8_t>(out, static_cast<std::uint8_t>(set.policy.kind));
    put_le<std::uint16_t>(out,
                          static_cast<std::uint16_t>(set.policy.window_size));
    put_le<std::uint32_t>(out,
                          static_cast<std::uint32_t>(set.descriptors.size()));
    for (const auto& d : set.descriptors) {
      put_le<std::uint32_t>(out, d.frame_index);
      put_f64(out, d.timestamp);
      for (const float v : d.vec) put_f32(out, v);
    }
  }
  if (!out) throw DataError("short write while emitting descriptor store");
}

std::vector<DescriptorSet> read_store(std::istream& in) {
  std::uint64_t offset = 0;
  char magic[4];
  in.read(magic, 4);
  if (in.gcount() != 4 || std::string(magic, 4) != "VCDS") {
    throw ParseError("bad descriptor store magic", 0);
  }
  offset = 4;
  const auto version = get_le<std::uint16_t>(in, offset, "store version");
  if (version != kStoreVersion) {
    throw ParseError("unsupported descriptor store version " +
                         std::to_string(version),
                     4);
  }
  const auto dim = get_le<std::uint16_t>(in, offset, "store dim");
  if (dim == 0 || dim > 4096) {
    throw ParseError("descriptor store dim out of range", 6);
  }
  const auto video_count = get_le<std::uint32_t>(in, offset, "video count");
  std::vector<DescriptorSet> sets;
  sets.reserve(std::min<std::uint32_t>(video_count, 1 << 20));
  for (std::uint32_t v = 0; v < video_count; ++v) {
    DescriptorSet set;
    const auto id_len = get_le<std::uint16_t>(in, offset, "id length");
    set.video_id.resize(id_len);
    in.read(set.video_id.data(), id_len);
    if (static_cast<std::uint16_t>(in.gcount()) != id_len) {
      throw ParseError("truncated video id", offset);
    }
    offset += id_len;
    const auto kind = get_le<std::uint8_t>(in, offset, "policy kind");
    if (kind > 2) throw ParseError("unknown policy kind in store", offset - 1);
    set.policy.kind = static_cast<PolicyKind>(kind);
    set.policy.window_size = get_le<std::uint16_t>(in, offset, "window");
    const auto frame_count = get_le<std::uint32_t>(in, offset, "frame count");
    set.descriptors.reserve(std::min<std::uint32_t>(frame_count, 1 << 20));
    for (std::uint32_t f = 0; f < frame_count; ++f) {
      FrameDescriptor d;
      d.frame_index = get_le<std::uint32_t>(in, offset, "frame index");
      d.timestamp = get_f64(in, offset, "timestamp");
      d.vec.resize(dim);
      double norm2 = 0.0;
      for (std::uint16_t i = 0; i < dim; ++i) {
        d.vec[i] = get_f32(in, offset, "descriptor value");
        norm2 += static_cast<double>(d.vec[i]) * d.vec[i];
      }
      d.flat = norm2 == 0.0;
      if (!set.descriptors.empty() &&
          set.descriptors.back().frame_index >= d.frame_index) {
        throw ParseError("frame indices not strictly increasing", offset);
      }
      set.descriptors.push_back(std::move(d));
    }
    sets.push_back(std::move(set));
  }
  return sets;
}

void write_store_file(const std::string& path,
                      const std::vector<DescriptorSet>& sets) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot create " + path);
  write_store(out, sets);
}

std::vector<DescriptorSet> read_store_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return read_store(in);
}

}  // namespace vcd

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "vcd/media.hpp"
#include "vcd/select.hpp"

namespace vcd {

inline constexpr int kDescriptorGrid = 32;  // analysis raster, 32x32
inline constexpr int kDefaultDctBlock = 8;  // top-left block => 63 dims

// Unit-norm feature vector of one selected frame. Degenerate frames (no AC
// energy, e.g. solid color) are exactly all-zero with flat = true and match
// nothing.
struct FrameDescriptor {
  std::uint32_t frame_index = 0;
  double timestamp = 0.0;
  std::vector<float> vec;
  bool flat = false;
};

struct DescriptorSet {
  std::string video_id;
  SelectionPolicy policy;
  std::vector<FrameDescriptor> descriptors;  // ordered by frame_index

  std::size_t dim() const {
    return descriptors.empty() ? 0 : descriptors.front().vec.size();
  }
};

using AnalysisGrid =
    std::array<double, kDescriptorGrid * kDescriptorGrid>;

// Area-averaged (box) downscale to 32x32: each cell is the mean of its
// source rectangle, with exact fractional coverage. An axis shorter than 32
// upscales by nearest-neighbor replication instead.
AnalysisGrid downscale(const Frame& frame);

// Brightness-free 32x32 raster of a frame: the frame mean is removed with an
// integer-exact formulation (pixel*N - sum, divided once), the result is
// downscaled as above, and the residual grid mean is subtracted. Adding a
// constant to every input pixel leaves the output bit-identical.
AnalysisGrid prepare_frame(const Frame& frame);

// Orthonormal 2-D DCT-II of the grid restricted to the top-left block x block
// coefficients, DC discarded; row-major, block*block - 1 values.
std::vector<double> dct_block_coeffs(const AnalysisGrid& grid, int block);

FrameDescriptor dct_descriptor(const Frame& frame,
                               int block = kDefaultDctBlock);

// Dot product of unit vectors, clamped to [-1, 1]; zero when either side is
// flat. Dimensions must agree.
double cosine_similarity(const FrameDescriptor& a, const FrameDescriptor& b);

DescriptorSet describe_video(const FrameSequence& seq,
                             const SelectionPolicy& policy,
                             int block = kDefaultDctBlock);
DescriptorSet describe_selection(const FrameSequence& seq,
                                 const SelectionResult& selection,
                                 int block = kDefaultDctBlock);

// --- Descriptor store (binary, little-endian) ------------------------------
//
// magic "VCDS", u16 version=1, u16 dim, u32 video count; per video:
// u16 id length + UTF-8 id, u8 policy kind, u16 window, u32 frame count;
// per frame: u32 frame_index, f64 timestamp, dim x f32. Unknown versions are
// rejected.

void write_store(std::ostream& out, const std::vector<DescriptorSet>& sets);
std::vector<DescriptorSet> read_store(std::istream& in);
void write_store_file(const std::string& path,
                      const std::vector<DescriptorSet>& sets);
std::vector<DescriptorSet> read_store_file(const std::string& path);

// Exact serialized size in bytes of the store holding `sets`.
std::uint64_t store_size_bytes(const std::vector<DescriptorSet>& sets);

}  // namespace vcd

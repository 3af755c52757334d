#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vcd/common.hpp"

namespace vcd {

// One decoded grayscale frame. Dimensions are carried per frame so a frame
// can be described independently of the sequence that owns it.
struct Frame {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<std::uint8_t> pixels;  // row-major, height rows x width cols

  Frame() = default;
  Frame(std::uint32_t w, std::uint32_t h, std::uint8_t fill = 0)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

  std::uint8_t at(std::uint32_t row, std::uint32_t col) const {
    return pixels[static_cast<std::size_t>(row) * width + col];
  }
  std::uint8_t& at(std::uint32_t row, std::uint32_t col) {
    return pixels[static_cast<std::size_t>(row) * width + col];
  }
  std::size_t pixel_count() const { return pixels.size(); }

  bool operator==(const Frame&) const = default;
};

// Decoded luma frames of one video plus exact fps metadata.
struct FrameSequence {
  std::string video_id;
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  Rational fps{1, 1};
  std::vector<Frame> frames;

  std::size_t frame_count() const { return frames.size(); }
  double duration_seconds() const {
    return static_cast<double>(frames.size()) * fps.den / fps.num;
  }

  // Throws InvariantError if any frame disagrees with the header.
  void validate() const;
};

struct ManifestEntry {
  std::string video_id;
  std::string path;  // relative paths resolve against the manifest directory
  std::optional<Rational> fps_override;
  std::string role;        // "reference" / "query"; empty when unspecified
  bool distractor = false;
};

struct Manifest {
  std::vector<ManifestEntry> entries;
};

// --- Y4M (YUV4MPEG2) subset ---------------------------------------------
//
// Signature line "YUV4MPEG2" with space-separated tags; W/H/F are required,
// F is "num:den". Colorspaces: Cmono keeps the payload as-is; the C420
// family keeps the Y plane and skips the two quarter-size chroma planes.
// "FRAME" separator lines may carry parameters, skipped up to newline.

struct Y4mHeader {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  Rational fps{1, 1};
  bool mono = false;  // false => C420 family
};

// Incremental reader; parse_y4m is the whole-stream convenience wrapper.
// Only two frames need to be resident to compute a difference curve.
class Y4mReader {
 public:
  explicit Y4mReader(std::istream& in);
  const Y4mHeader& header() const { return header_; }
  // Returns the next frame's luma plane, or nullopt at end of stream.
  std::optional<Frame> next_frame();

 private:
  std::istream& in_;
  Y4mHeader header_;
  std::uint64_t offset_ = 0;
};

FrameSequence parse_y4m(std::istream& in, const std::string& video_id);
void write_y4m(std::ostream& out, const FrameSequence& seq);

// --- PGM image directories -----------------------------------------------

// Loads binary PGM (P5, maxval 255) files with numeric names from `dir`,
// ordered by numeric value; gaps in the numbering are permitted.
FrameSequence load_image_dir(const std::string& dir, const Rational& fps,
                             const std::string& video_id);

// --- Raw grayscale blob ----------------------------------------------------
//
// 16-byte header: magic "VCDR", u16 version=1, u16 width, u16 height,
// u32 frame count, u16 fps numerator, u16 fps denominator, little-endian;
// then frames as width*height bytes each.

FrameSequence read_raw_blob(std::istream& in, const std::string& video_id);
void write_raw_blob(std::ostream& out, const FrameSequence& seq);

// --- Convenience -----------------------------------------------------------

// BT.601 luma: round(0.299 r + 0.587 g + 0.114 b).
std::uint8_t rgb_to_luma(std::uint8_t r, std::uint8_t g, std::uint8_t b);

// Dispatches on extension: .y4m, .vcdr, or a directory of PGM files
// (fps_override required for directories).
FrameSequence load_video(const std::string& path, const std::string& video_id,
                         const std::optional<Rational>& fps_override = {});
FrameSequence load_video(const ManifestEntry& entry,
                         const std::string& base_dir);
void save_video(const std::string& path, const FrameSequence& seq);

Manifest load_manifest(const std::string& path);
void save_manifest(const std::string& path, const Manifest& manifest);

}  // namespace vcd

#include "vcd/media.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace vcd {
namespace {

constexpr std::uint16_t kRawBlobVersion = 1;

void read_exact(std::istream& in, char* buf, std::size_t n,
                std::uint64_t& offset, const char* what) {
  in.read(buf, static_cast<std::streamsize>(n));
  const std::size_t got = static_cast<std::size_t>(in.gcount());
  if (got != n) {
    throw ParseError(std::string("truncated ") + what, offset + got);
  }
  offset += n;
}

void skip_exact(std::istream& in, std::size_t n, std::uint64_t& offset,
                const char* what) {
  in.ignore(static_cast<std::streamsize>(n));
  const std::size_t got = static_cast<std::size_t>(in.gcount());
  if (got != n) {
    throw ParseError(std::string("truncated ") + what, offset + got);
  }
  offset += n;
}

// Reads bytes up to and including '\n'; the newline is not returned.
std::string read_line(std::istream& in, std::uint64_t& offset,
                      const char* what) {
  std::string line;
  for (;;) {
    const int c = in.get();
    if (c == EOF) throw ParseError(std::string("unterminated ") + what, offset);
    ++offset;
    if (c == '\n') return line;
    line.push_back(static_cast<char>(c));
    if (line.size() > 4096) {
      throw ParseError(std::string("overlong ") + what, offset);
    }
  }
}

std::uint32_t parse_u32_tag(const std::string& value, const char* tag,
                            std::uint64_t offset) {
  if (value.empty() ||
      !std::all_of(value.begin(), value.end(),
                   [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    throw ParseError(std::string("bad ") + tag + " tag value '" + value + "'",
                     offset);
  }
  const unsigned long long v = std::stoull(value);
  if (v == 0 || v > 0xffffffffull) {
    throw ParseError(std::string("out-of-range ") + tag + " tag", offset);
  }
  return static_cast<std::uint32_t>(v);
}

template <typename T>
void put_le(std::ostream& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.put(static_cast<char>((v >> (8 * i)) & 0xff));
  }
}

template <typename T>
T get_le(std::istream& in, std::uint64_t& offset, const char* what) {
  unsigned char buf[sizeof(T)];
  read_exact(in, reinterpret_cast<char*>(buf), sizeof(T), offset, what);
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    v |= static_cast<T>(buf[i]) << (8 * i);
  }
  return v;
}

}  // namespace

void FrameSequence::validate() const {
  if (frames.empty()) throw InvariantError("frame sequence is empty");
  if (fps.num < 1 || fps.den < 1) throw InvariantError("non-positive fps");
  for (const Frame& f : frames) {
    if (f.width != width || f.height != height ||
        f.pixels.size() != static_cast<std::size_t>(width) * height) {
      throw InvariantError("frame dimensions disagree with sequence header");
    }
  }
}

Y4mReader::Y4mReader(std::istream& in) : in_(in) {
  const std::string line = read_line(in_, offset_, "Y4M header");
  std::istringstream tokens(line);
  std::string tok;
  tokens >> tok;
  if (tok != "YUV4MPEG2") {
    throw ParseError("missing YUV4MPEG2 signature", 0);
  }
  bool have_w = false, have_h = false, have_f = false;
  std::string colorspace = "C420";  // Y4M default when no C tag is present
  while (tokens >> tok) {
    if (tok.empty()) continue;
    const char key = tok[0];
    const std::string value = tok.substr(1);
    switch (key) {
      case 'W':
        header_.width = parse_u32_tag(value, "W", offset_);
        have_w = true;
        break;
      case 'H':
        header_.height = parse_u32_tag(value, "H", offset_);
        have_h = true;
        break;
      case 'F': {
        const auto colon = value.find(':');
        if (colon == std::string::npos) {
          throw ParseError("F tag is not num:den", offset_);
        }
        const std::uint32_t num =
            parse_u32_tag(value.substr(0, colon), "F numerator", offset_);
        const std::uint32_t den =
            parse_u32_tag(value.substr(colon + 1), "F denominator", offset_);
        header_.fps = Rational(num, den);
        have_f = true;
        break;
      }
      case 'C':
        colorspace = tok;
        break;
      default:
        break;  // I/A/X and friends are irrelevant here
    }
  }
  if (!have_w || !have_h || !have_f) {
    throw ParseError("Y4M header lacks required W/H/F tag", offset_);
  }
  if (colorspace == "Cmono") {
    header_.mono = true;
  } else if (colorspace.rfind("C420", 0) == 0) {
    header_.mono = false;
    if (header_.width % 2 != 0 || header_.height % 2 != 0) {
      throw ParseError("C420 stream with odd dimensions", offset_);
    }
  } else {
    throw ParseError("unsupported colorspace tag " + colorspace, offset_);
  }
}

std::optional<Frame> Y4mReader::next_frame() {
  if (in_.peek() == EOF) return std::nullopt;
  const std::string marker = read_line(in_, offset_, "FRAME marker");
  if (marker.rfind("FRAME", 0) != 0) {
    throw ParseError("expected FRAME marker", offset_ - marker.size() - 1);
  }
  Frame frame(header_.width, header_.height);
  read_exact(in_, reinterpret_cast<char*>(frame.pixels.data()),
             frame.pixels.size(), offset_, "frame payload");
  if (!header_.mono) {
    const std::size_t chroma =
        2 * (static_cast<std::size_t>(header_.width) / 2) *
        (static_cast<std::size_t>(header_.height) / 2);
    skip_exact(in_, chroma, offset_, "chroma payload");
  }
  return frame;
}

FrameSequence parse_y4m(std::istream& in, const std::string& video_id) {
  Y4mReader reader(in);
  FrameSequence seq;
  seq.video_id = video_id;
  seq.width = reader.header().width;
  seq.height = reader.header().height;
  seq.fps = reader.header().fps;
  while (auto frame = reader.next_frame()) {
    seq.frames.push_back(std::move(*frame));
  }
  if (seq.frames.empty()) throw ParseError("Y4M stream contains no frames", 0);
  return seq;
}

void write_y4m(std::ostream& out, const FrameSequence& seq) {
  seq.validate();
  out << "YUV4MPEG2 W" << seq.width << " H" << seq.height << " F"
      << seq.fps.num << ":" << seq.fps.den << " Cmono\n";
  for (const Frame& f : seq.frames) {
    out << "FRAME\n";
    out.write(reinterpret_cast<const char*>(f.pixels.data()),
              static_cast<std::streamsize>(f.pixels.size()));
  }
  if (!out) throw DataError("short write while emitting Y4M");
}

FrameSequence load_image_dir(const std::string& dir, const Rational& fps,
                             const std::string& video_id) {
  if (!fs::is_directory(dir)) throw DataError("not a directory: " + dir);
  std::vector<std::pair<std::uint64_t, fs::path>> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string stem = entry.path().stem().string();
    if (entry.path().extension() != ".pgm" || stem.empty() ||
        stem.size() > 18) {
      continue;
    }
    if (!std::all_of(stem.begin(), stem.end(), [](char c) {
          return std::isdigit(static_cast<unsigned char>(c));
        })) {
      continue;
    }
    files.emplace_back(std::stoull(stem), entry.path());
  }
  if (files.empty()) throw DataError("no numbered .pgm files in " + dir);
  std::sort(files.begin(), files.end());

  FrameSequence seq;
  seq.video_id = video_id;
  seq.fps = fps;
  for (const auto& [number, path] : files) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::uint64_t offset = 0;
    std::string magic;
    in >> magic;
    if (magic != "P5") throw DataError("not a binary PGM (P5): " + path.string());
    const auto next_token = [&] {
      std::string tok;
      for (;;) {
        in >> tok;
        if (!in) throw DataError("truncated PGM header: " + path.string());
        if (tok[0] == '#') {
          std::string rest;
          std::getline(in, rest);
          continue;
        }
        return tok;
      }
    };
    const std::uint32_t w = parse_u32_tag(next_token(), "PGM width", offset);
    const std::uint32_t h = parse_u32_tag(next_token(), "PGM height", offset);
    const std::uint32_t maxval =
        parse_u32_tag(next_token(), "PGM maxval", offset);
    if (maxval != 255) {
      throw DataError("PGM maxval must be 255: " + path.string());
    }
    in.get();  // single whitespace byte after maxval
    Frame frame(w, h);
    in.read(reinterpret_cast<char*>(frame.pixels.data()),
            static_cast<std::streamsize>(frame.pixels.size()));
    if (static_cast<std::size_t>(in.gcount()) != frame.pixels.size()) {
      throw DataError("truncated PGM payload: " + path.string());
    }
    if (seq.frames.empty()) {
      seq.width = w;
      seq.height = h;
    } else if (w != seq.width || h != seq.height) {
      throw DataError("frame dimensions " + std::to_string(w) + "x" +
                      std::to_string(h) + " disagree with " +
                      std::to_string(seq.width) + "x" +
                      std::to_string(seq.height) + " in " + path.string());
    }
    seq.frames.push_back(std::move(frame));
  }
  return seq;
}

FrameSequence read_raw_blob(std::istream& in, const std::string& video_id) {
  std::uint64_t offset = 0;
  char magic[4];
  read_exact(in, magic, 4, offset, "raw blob magic");
  if (std::string(magic, 4) != "VCDR") {
    throw ParseError("bad raw blob magic", 0);
  }
  const auto version = get_le<std::uint16_t>(in, offset, "raw blob version");
  if (version != kRawBlobVersion) {
    throw ParseError("unsupported raw blob version " + std::to_string(version),
                     4);
  }
  const auto width = get_le<std::uint16_t>(in, offset, "raw blob width");
  const auto height = get_le<std::uint16_t>(in, offset, "raw blob height");
  const auto count = get_le<std::uint32_t>(in, offset, "raw blob frame count");
  const auto fps_num = get_le<std::uint16_t>(in, offset, "raw blob fps num");
  const auto fps_den = get_le<std::uint16_t>(in, offset, "raw blob fps den");
  if (width == 0 || height == 0 || count == 0 || fps_num == 0 || fps_den == 0) {
    throw ParseError("raw blob header has zero field", 4);
  }
  FrameSequence seq;
  seq.video_id = video_id;
  seq.width = width;
  seq.height = height;
  seq.fps = Rational(fps_num, fps_den);
  seq.frames.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    Frame frame(width, height);
    read_exact(in, reinterpret_cast<char*>(frame.pixels.data()),
               frame.pixels.size(), offset, "raw blob frame");
    seq.frames.push_back(std::move(frame));
  }
  return seq;
}

void write_raw_blob(std::ostream& out, const FrameSequence& seq) {
  seq.validate();
  if (seq.width > 0xffff || seq.height > 0xffff ||
      seq.frames.size() > 0xffffffffull || seq.fps.num > 0xffff ||
      seq.fps.den > 0xffff) {
    throw DataError("sequence does not fit raw blob header fields");
  }
  out.write("VCDR", 4);
  put_le<std::uint16_t>(out, kRawBlobVersion);
  put_le<std::uint16_t>(out, static_cast<std::uint16_t>(seq.width));
  put_le<std::uint16_t>(out, static_cast<std::uint16_t>(seq.height));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(seq.frames.size()));
  put_le<std::uint16_t>(out, static_cast<std::uint16_t>(seq.fps.num));
  put_le<std::uint16_t>(out, static_cast<std::uint16_t>(seq.fps.den));
  for (const Frame& f : seq.frames) {
    out.write(reinterpret_cast<const char*>(f.pixels.data()),
              static_cast<std::streamsize>(f.pixels.size()));
  }
  if (!out) throw DataError("short write while emitting raw blob");
}

std::uint8_t rgb_to_luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const double y = 0.299 * r + 0.587 * g + 0.114 * b;
  const long v = std::lround(y);
  return static_cast<std::uint8_t>(std::clamp(v, 0l, 255l));
}

FrameSequence load_video(const std::string& path, const std::string& video_id,
                         const std::optional<Rational>& fps_override) {
  if (fs::is_directory(path)) {
    if (!fps_override) {
      throw DataError("image directory input needs an fps override: " + path);
    }
    return load_image_dir(path, *fps_override, video_id);
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  const std::string ext = fs::path(path).extension().string();
  FrameSequence seq;
  if (ext == ".y4m") {
    seq = parse_y4m(in, video_id);
  } else if (ext == ".vcdr") {
    seq = read_raw_blob(in, video_id);
  } else {
    throw DataError("unrecognized video extension '" + ext + "': " + path);
  }
  if (fps_override) seq.fps = *fps_override;
  return seq;
}

FrameSequence load_video(const ManifestEntry& entry,
                         const std::string& base_dir) {
  fs::path p(entry.path);
  if (p.is_relative()) p = fs::path(base_dir) / p;
  return load_video(p.string(), entry.video_id, entry.fps_override);
}

void save_video(const std::string& path, const FrameSequence& seq) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot create " + path);
  const std::string ext = fs::path(path).extension().string();
  if (ext == ".y4m") {
    write_y4m(out, seq);
  } else if (ext == ".vcdr") {
    write_raw_blob(out, seq);
  } else {
    throw DataError("unrecognized video extension '" + ext + "': " + path);
  }
}

Manifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("bad manifest JSON: " + std::string(e.what()));
  }
  Manifest m;
  if (!doc.contains("videos") || !doc["videos"].is_array()) {
    throw DataError("manifest lacks a 'videos' array");
  }
  for (const auto& v : doc["videos"]) {
    ManifestEntry e;
    e.video_id = v.at("id").get<std::string>();
    e.path = v.at("path").get<std::string>();
    if (v.contains("fps_override")) {
      e.fps_override = Rational(v["fps_override"].at("num").get<std::int64_t>(),
                                v["fps_override"].at("den").get<std::int64_t>());
    }
    if (v.contains("role")) e.role = v["role"].get<std::string>();
    if (v.contains("distractor")) e.distractor = v["distractor"].get<bool>();
    m.entries.push_back(std::move(e));
  }
  for (std::size_t i = 0; i < m.entries.size(); ++i) {
    for (std::size_t j = i + 1; j < m.entries.size(); ++j) {
      if (m.entries[i].video_id == m.entries[j].video_id) {
        throw DataError("duplicate video id in manifest: " +
                        m.entries[i].video_id);
      }
    }
  }
  return m;
}

void save_manifest(const std::string& path, const Manifest& manifest) {
  nlohmann::ordered_json doc;
  doc["videos"] = nlohmann::ordered_json::array();
  for (const auto& e : manifest.entries) {
    nlohmann::ordered_json v;
    v["id"] = e.video_id;
    v["path"] = e.path;
    if (e.fps_override) {
      v["fps_override"] = {{"num", e.fps_override->num},
                           {"den", e.fps_override->den}};
    }
    if (!e.role.empty()) v["role"] = e.role;
    if (e.distractor) v["distractor"] = true;
    doc["videos"].push_back(std::move(v));
  }
  std::ofstream out(path);
  if (!out) throw DataError("cannot create manifest " + path);
  out << doc.dump(2) << "\n";
}

}  // namespace vcd

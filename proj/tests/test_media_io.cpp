#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "vcd/common.hpp"
#include "vcd/media.hpp"

using namespace vcd;
namespace fs = std::filesystem;

namespace {

FrameSequence random_sequence(Rng& rng, std::uint32_t max_dim = 16,
                              std::size_t max_frames = 6) {
  FrameSequence seq;
  seq.video_id = "rand";
  seq.width = static_cast<std::uint32_t>(rng.uniform_int(1, max_dim));
  seq.height = static_cast<std::uint32_t>(rng.uniform_int(1, max_dim));
  seq.fps = Rational(rng.uniform_int(1, 60), rng.uniform_int(1, 1001));
  const auto frames = static_cast<std::size_t>(
      rng.uniform_int(1, static_cast<std::int64_t>(max_frames)));
  for (std::size_t i = 0; i < frames; ++i) {
    Frame f(seq.width, seq.height);
    for (auto& p : f.pixels) {
      p = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
    }
    seq.frames.push_back(std::move(f));
  }
  return seq;
}

std::string temp_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("vcd_media_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

void write_pgm(const fs::path& path, std::uint32_t w, std::uint32_t h,
               std::uint8_t fill, const std::string& magic = "P5") {
  std::ofstream out(path, std::ios::binary);
  out << magic << "\n" << w << " " << h << "\n255\n";
  for (std::size_t i = 0; i < static_cast<std::size_t>(w) * h; ++i) {
    out.put(static_cast<char>(fill));
  }
}

}  // namespace

TEST_CASE("y4m minimal mono stream") {
  std::istringstream in(std::string("YUV4MPEG2 W2 H2 F24:1 Cmono\nFRAME\n") +
                        std::string(4, '\0'));
  const FrameSequence seq = parse_y4m(in, "a");
  CHECK(seq.width == 2);
  CHECK(seq.height == 2);
  CHECK(seq.fps == Rational(24, 1));
  REQUIRE(seq.frames.size() == 1);
  CHECK(seq.frames[0].pixels == std::vector<std::uint8_t>{0, 0, 0, 0});
}

TEST_CASE("y4m keeps ntsc fps exact") {
  std::istringstream in(
      std::string("YUV4MPEG2 W2 H2 F30000:1001 Cmono\nFRAME\n") +
      std::string(4, '\x10'));
  const FrameSequence seq = parse_y4m(in, "a");
  CHECK(seq.fps.num == 30000);
  CHECK(seq.fps.den == 1001);
}

TEST_CASE("y4m C420 retains exactly the luma plane") {
  std::string payload;
  for (int i = 0; i < 16; ++i) payload.push_back(static_cast<char>(i));
  for (int i = 0; i < 8; ++i) payload.push_back('\x7f');  // chroma, dropped
  std::istringstream in("YUV4MPEG2 W4 H4 F24:1 C420\nFRAME\n" + payload);
  const FrameSequence seq = parse_y4m(in, "a");
  REQUIRE(seq.frames.size() == 1);
  for (int i = 0; i < 16; ++i) {
    CHECK(seq.frames[0].pixels[static_cast<std::size_t>(i)] == i);
  }

  // The Y plane alone, parsed as mono, is the same frame.
  std::istringstream mono_in("YUV4MPEG2 W4 H4 F24:1 Cmono\nFRAME\n" +
                             payload.substr(0, 16));
  const FrameSequence mono = parse_y4m(mono_in, "a");
  CHECK(mono.frames[0] == seq.frames[0]);
}

TEST_CASE("y4m error cases carry byte offsets") {
  std::istringstream bad_sig("JUNK W2 H2 F24:1\nFRAME\n....");
  CHECK_THROWS_AS(parse_y4m(bad_sig, "a"), ParseError);

  std::istringstream no_fps(std::string("YUV4MPEG2 W2 H2 Cmono\nFRAME\n") +
                            std::string(4, '\0'));
  CHECK_THROWS_AS(parse_y4m(no_fps, "a"), ParseError);

  std::istringstream bad_cs(std::string("YUV4MPEG2 W2 H2 F24:1 C444\nFRAME\n") +
                            std::string(12, '\0'));
  CHECK_THROWS_AS(parse_y4m(bad_cs, "a"), ParseError);

  std::istringstream truncated(
      std::string("YUV4MPEG2 W2 H2 F24:1 Cmono\nFRAME\n") + "\x01\x02");
  try {
    parse_y4m(truncated, "a");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    // header is 28 bytes, FRAME\n is 6, 2 payload bytes arrived
    CHECK(e.offset() == 36);
  }
}

TEST_CASE("y4m C420 luma equals the mono parse on random streams") {
  Rng rng(29);
  for (int trial = 0; trial < 50; ++trial) {
    const std::uint32_t w = 2 * static_cast<std::uint32_t>(rng.uniform_int(1, 8));
    const std::uint32_t h = 2 * static_cast<std::uint32_t>(rng.uniform_int(1, 8));
    const int frames = static_cast<int>(rng.uniform_int(1, 4));
    std::string mono_stream = "YUV4MPEG2 W" + std::to_string(w) + " H" +
                              std::to_string(h) + " F24:1 Cmono\n";
    std::string c420_stream = "YUV4MPEG2 W" + std::to_string(w) + " H" +
                              std::to_string(h) + " F24:1 C420\n";
    for (int f = 0; f < frames; ++f) {
      std::string luma;
      for (std::uint32_t i = 0; i < w * h; ++i) {
        luma.push_back(static_cast<char>(rng.uniform_int(0, 255)));
      }
      std::string chroma;
      for (std::uint32_t i = 0; i < (w / 2) * (h / 2) * 2; ++i) {
        chroma.push_back(static_cast<char>(rng.uniform_int(0, 255)));
      }
      mono_stream += "FRAME\n" + luma;
      c420_stream += "FRAME\n" + luma + chroma;
    }
    std::istringstream mono_in(mono_stream), c420_in(c420_stream);
    const FrameSequence mono = parse_y4m(mono_in, "v");
    const FrameSequence c420 = parse_y4m(c420_in, "v");
    REQUIRE(c420.frames.size() == mono.frames.size());
    for (std::size_t f = 0; f < mono.frames.size(); ++f) {
      CHECK(c420.frames[f] == mono.frames[f]);
    }
  }
}

TEST_CASE("y4m reader streams frame by frame") {
  Rng rng(37);
  const FrameSequence seq = random_sequence(rng);
  std::stringstream buf;
  write_y4m(buf, seq);
  Y4mReader reader(buf);
  CHECK(reader.header().width == seq.width);
  CHECK(reader.header().height == seq.height);
  CHECK(reader.header().fps == seq.fps);
  CHECK(reader.header().mono);
  std::size_t count = 0;
  while (auto frame = reader.next_frame()) {
    REQUIRE(count < seq.frames.size());
    CHECK(*frame == seq.frames[count]);
    ++count;
  }
  CHECK(count == seq.frames.size());
  CHECK(!reader.next_frame().has_value());
}

TEST_CASE("y4m frame parameters after FRAME are skipped") {
  std::istringstream in(
      std::string("YUV4MPEG2 W2 H1 F24:1 Cmono\nFRAME Xsome param\n") + "ab" +
      "FRAME\ncd");
  const FrameSequence seq = parse_y4m(in, "a");
  REQUIRE(seq.frames.size() == 2);
  CHECK(seq.frames[0].pixels == std::vector<std::uint8_t>{'a', 'b'});
  CHECK(seq.frames[1].pixels == std::vector<std::uint8_t>{'c', 'd'});
}

TEST_CASE("y4m round trip preserves pixels, dimensions and fps") {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const FrameSequence seq = random_sequence(rng);
    std::stringstream buf;
    write_y4m(buf, seq);
    const FrameSequence back = parse_y4m(buf, seq.video_id);
    CHECK(back.width == seq.width);
    CHECK(back.height == seq.height);
    CHECK(back.fps == seq.fps);
    REQUIRE(back.frames.size() == seq.frames.size());
    for (std::size_t i = 0; i < seq.frames.size(); ++i) {
      CHECK(back.frames[i] == seq.frames[i]);
    }
  }
}

TEST_CASE("y4m parser survives truncated and mutated tails") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const FrameSequence seq = random_sequence(rng, 8, 4);
    std::stringstream buf;
    write_y4m(buf, seq);
    std::string bytes = buf.str();
    const auto cut =
        static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(
                                                        bytes.size())));
    std::string mangled = bytes.substr(0, cut);
    if (rng.uniform01() < 0.5) {
      // splice garbage instead of plain truncation
      for (int i = 0; i < 8; ++i) {
        mangled.push_back(static_cast<char>(rng.uniform_int(0, 255)));
      }
    }
    std::istringstream in(mangled);
    try {
      const FrameSequence out = parse_y4m(in, "x");
      // A clean prefix can parse; it must contain whole frames only.
      CHECK(out.width == seq.width);
      CHECK(out.frames.size() <= seq.frames.size() + 1);
    } catch (const ParseError&) {
      // expected for most cuts
    }
  }
}

TEST_CASE("pgm directory loads in numeric order with gaps") {
  const std::string dir = temp_dir("pgm_order");
  write_pgm(fs::path(dir) / "000001.pgm", 2, 2, 10);
  write_pgm(fs::path(dir) / "000002.pgm", 2, 2, 20);
  write_pgm(fs::path(dir) / "000004.pgm", 2, 2, 40);
  const FrameSequence seq = load_image_dir(dir, Rational(24, 1), "v");
  REQUIRE(seq.frames.size() == 3);
  CHECK(seq.frames[0].pixels[0] == 10);
  CHECK(seq.frames[1].pixels[0] == 20);
  CHECK(seq.frames[2].pixels[0] == 40);
  CHECK(seq.fps == Rational(24, 1));
}

TEST_CASE("pgm directory errors") {
  const std::string empty = temp_dir("pgm_empty");
  CHECK_THROWS_AS(load_image_dir(empty, Rational(24, 1), "v"), DataError);

  const std::string mixed = temp_dir("pgm_mixed");
  write_pgm(fs::path(mixed) / "1.pgm", 2, 2, 0);
  write_pgm(fs::path(mixed) / "2.pgm", 4, 4, 0);
  try {
    load_image_dir(mixed, Rational(24, 1), "v");
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("2.pgm") != std::string::npos);
  }

  const std::string bad = temp_dir("pgm_bad");
  write_pgm(fs::path(bad) / "1.pgm", 2, 2, 0, "P2");
  CHECK_THROWS_AS(load_image_dir(bad, Rational(24, 1), "v"), DataError);
}

TEST_CASE("rgb_to_luma") {
  CHECK(rgb_to_luma(255, 255, 255) == 255);
  CHECK(rgb_to_luma(0, 0, 0) == 0);
  CHECK(rgb_to_luma(255, 0, 0) == 76);  // 0.299*255 = 76.245
}

TEST_CASE("raw blob round trip and rejection") {
  Rng rng(3);
  const FrameSequence seq = random_sequence(rng);
  std::stringstream buf;
  write_raw_blob(buf, seq);
  const FrameSequence back = read_raw_blob(buf, seq.video_id);
  CHECK(back.width == seq.width);
  CHECK(back.fps == seq.fps);
  REQUIRE(back.frames.size() == seq.frames.size());
  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    CHECK(back.frames[i] == seq.frames[i]);
  }

  std::stringstream bad;
  write_raw_blob(bad, seq);
  std::string bytes = bad.str();
  bytes[4] = 2;  // version
  std::istringstream in(bytes);
  CHECK_THROWS_AS(read_raw_blob(in, "x"), ParseError);
}

TEST_CASE("manifest round trip rejects duplicate ids") {
  const std::string dir = temp_dir("manifest");
  Manifest m;
  m.entries.push_back({"a", "videos/a.vcdr", {}, "reference", false});
  m.entries.push_back({"b", "videos/b.vcdr", Rational(30000, 1001), "query",
                       true});
  const std::string path = (fs::path(dir) / "manifest.json").string();
  save_manifest(path, m);
  const Manifest back = load_manifest(path);
  REQUIRE(back.entries.size() == 2);
  CHECK(back.entries[0].video_id == "a");
  CHECK(back.entries[1].fps_override == Rational(30000, 1001));
  CHECK(back.entries[1].distractor);

  m.entries.push_back({"a", "videos/dup.vcdr", {}, "query", false});
  save_manifest(path, m);
  CHECK_THROWS_AS(load_manifest(path), DataError);
}

TEST_CASE("rational parsing is exact") {
  CHECK(Rational::parse("24") == Rational(24, 1));
  CHECK(Rational::parse("30000/1001") == Rational(30000, 1001));
  CHECK(Rational::parse("1.2") == Rational(6, 5));
  CHECK(Rational::parse("0.5") == Rational(1, 2));
  CHECK_THROWS_AS(Rational::parse("-1"), DataError);
  CHECK_THROWS_AS(Rational::parse("x"), DataError);
}

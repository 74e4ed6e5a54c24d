#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "vidaug/clip.hpp"
#include "vidaug/io.hpp"
#include "vidaug/rng.hpp"

using namespace vidaug;

namespace {

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / "vidaug_test_clip";
  std::filesystem::create_directories(dir);
  return dir;
}

VideoClip random_clip(uint32_t t, uint32_t h, uint32_t w, uint32_t c,
                      SeededRng& rng) {
  VideoClip clip = VideoClip::make(t, h, w, c, "random");
  for (uint8_t& px : clip.frames) px = uint8_t(rng.uniform_int(256));
  return clip;
}

std::string read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("clip invariants") {
  CHECK_THROWS_AS(VideoClip::make(0, 2, 2, 1), ValidationError);
  CHECK_THROWS_AS(VideoClip::make(1, 0, 2, 1), ValidationError);
  CHECK_THROWS_AS(VideoClip::make(1, 2, 2, 2), ValidationError);
  VideoClip clip = VideoClip::make(2, 3, 4, 3);
  CHECK(clip.frames.size() == 2 * 3 * 4 * 3);
}

TEST_CASE("vclip header layout") {
  // magic(4) + version(4) + four u32 dims = 24-byte header.
  auto path = temp_dir() / "tiny.vclip";
  VideoClip clip = VideoClip::make(1, 1, 1, 1, "tiny");
  clip.frames[0] = 255;
  save_clip(clip, path.string());
  std::string bytes = read_bytes(path);
  REQUIRE(bytes.size() == kClipHeaderSize + 1);
  CHECK(bytes.substr(0, 4) == "VCLP");
  CHECK(uint8_t(bytes[4]) == 1);   // version, little-endian
  CHECK(uint8_t(bytes[8]) == 1);   // T
  CHECK(uint8_t(bytes[20]) == 1);  // C
  CHECK(uint8_t(bytes[24]) == 255);
}

TEST_CASE("load_clip reads header-declared dims") {
  auto path = temp_dir() / "dims.vclip";
  VideoClip clip = VideoClip::make(2, 2, 2, 1, "dims");
  for (size_t i = 0; i < clip.frames.size(); ++i) clip.frames[i] = uint8_t(i);
  save_clip(clip, path.string());
  VideoClip loaded = load_clip(path.string());
  CHECK(loaded.t == 2);
  CHECK(loaded.h == 2);
  CHECK(loaded.w == 2);
  CHECK(loaded.c == 1);
  CHECK(loaded.clip_id == "dims");
  CHECK(same_pixels(loaded, clip));
}

TEST_CASE("load_clip error paths") {
  auto dir = temp_dir();

  SUBCASE("bad magic") {
    auto path = dir / "magic.vclip";
    std::ofstream(path, std::ios::binary) << "NOPE" << std::string(24, '\0');
    CHECK_THROWS_AS(load_clip(path.string()), FormatError);
  }
  SUBCASE("bad version") {
    VideoClip clip = VideoClip::make(1, 1, 1, 1);
    auto path = dir / "version.vclip";
    save_clip(clip, path.string());
    std::string bytes = read_bytes(path);
    bytes[4] = 9;
    std::ofstream(path, std::ios::binary) << bytes;
    CHECK_THROWS_AS(load_clip(path.string()), FormatError);
  }
  SUBCASE("zero dimension") {
    VideoClip clip = VideoClip::make(1, 1, 1, 1);
    auto path = dir / "zerodim.vclip";
    save_clip(clip, path.string());
    std::string bytes = read_bytes(path);
    bytes[8] = 0;  // T = 0
    std::ofstream(path, std::ios::binary) << bytes;
    CHECK_THROWS_AS(load_clip(path.string()), ValidationError);
  }
  SUBCASE("truncated payload") {
    VideoClip clip = VideoClip::make(2, 2, 2, 1);
    auto path = dir / "trunc.vclip";
    save_clip(clip, path.string());
    std::string bytes = read_bytes(path);
    bytes.resize(bytes.size() - 3);
    std::ofstream(path, std::ios::binary) << bytes;
    CHECK_THROWS_AS(load_clip(path.string()), TruncationError);
  }
  SUBCASE("trailing bytes") {
    VideoClip clip = VideoClip::make(1, 1, 1, 1);
    auto path = dir / "trailing.vclip";
    save_clip(clip, path.string());
    std::ofstream(path, std::ios::binary | std::ios::app) << "xx";
    CHECK_THROWS_AS(load_clip(path.string()), FormatError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_clip((dir / "absent.vclip").string()), IoError);
  }
}

TEST_CASE("round-trip identity over random clips") {
  SeededRng rng(7);
  auto path = temp_dir() / "roundtrip.vclip";
  for (int i = 0; i < 100; ++i) {
    uint32_t t = 1 + uint32_t(rng.uniform_int(4));
    uint32_t h = 1 + uint32_t(rng.uniform_int(9));
    uint32_t w = 1 + uint32_t(rng.uniform_int(9));
    uint32_t c = rng.bernoulli(0.5) ? 1 : 3;
    VideoClip clip = random_clip(t, h, w, c, rng);
    save_clip(clip, path.string());
    CHECK(same_pixels(load_clip(path.string()), clip));
  }
}

TEST_CASE("two saves produce identical bytes") {
  SeededRng rng(11);
  VideoClip clip = random_clip(8, 16, 16, 3, rng);
  auto a = temp_dir() / "same_a.vclip";
  auto b = temp_dir() / "same_b.vclip";
  save_clip(clip, a.string());
  save_clip(clip, b.string());
  CHECK(read_bytes(a) == read_bytes(b));
}

TEST_CASE("seeded rng determinism") {
  SeededRng a(123456789), b(123456789);
  for (int i = 0; i < 10000; ++i) REQUIRE(a.next_u64() == b.next_u64());

  SeededRng c(1), d(2);
  bool differ = false;
  for (int i = 0; i < 16; ++i) differ |= (c.next_u64() != d.next_u64());
  CHECK(differ);
}

TEST_CASE("rng bounded draws stay in range and fill the range") {
  SeededRng rng(42);
  std::vector<int> seen(7, 0);
  for (int i = 0; i < 7000; ++i) {
    uint64_t v = rng.uniform_int(7);
    REQUIRE(v < 7);
    seen[v]++;
  }
  for (int count : seen) CHECK(count > 800);
  for (int i = 0; i < 1000; ++i) {
    double v = rng.next_double();
    REQUIRE(v >= 0.0);
    REQUIRE(v < 1.0);
  }
}

TEST_CASE("rasterize_masks") {
  SUBCASE("empty box list gives an all-zero mask") {
    BoxTrack track;
    track.clip_id = "x";
    HumanMask mask = rasterize_masks(track, 2, 3, 3, 0.5);
    CHECK(foreground_ratio(mask) == 0.0);
  }
  SUBCASE("full-frame box on every frame gives an all-one mask") {
    BoxTrack track;
    track.clip_id = "x";
    for (uint32_t f = 0; f < 2; ++f) {
      track.boxes.push_back({f, 0, 0, 3, 3, 1.0});
    }
    HumanMask mask = rasterize_masks(track, 2, 3, 3, 0.5);
    CHECK(foreground_ratio(mask) == 1.0);
  }
  SUBCASE("unit box marks exactly one pixel") {
    BoxTrack track;
    track.clip_id = "x";
    track.boxes.push_back({0, 0, 0, 1, 1, 1.0});
    HumanMask mask = rasterize_masks(track, 1, 2, 2, 0.5);
    CHECK(mask.at(0, 0, 0) == 1);
    CHECK(mask.at(0, 0, 1) == 0);
    CHECK(mask.at(0, 1, 0) == 0);
    CHECK(mask.at(0, 1, 1) == 0);
  }
  SUBCASE("score below threshold is skipped") {
    BoxTrack track;
    track.clip_id = "x";
    track.boxes.push_back({0, 0, 0, 2, 2, 0.4});
    HumanMask mask = rasterize_masks(track, 1, 2, 2, 0.5);
    CHECK(foreground_ratio(mask) == 0.0);
  }
  SUBCASE("out-of-bounds box names the entry") {
    BoxTrack track;
    track.clip_id = "bad";
    track.boxes.push_back({0, 0, 0, 5, 2, 1.0});
    CHECK_THROWS_WITH_AS(rasterize_masks(track, 1, 2, 2, 0.5),
                         doctest::Contains("box 0"), ValidationError);
  }
}

TEST_CASE("rasterize_masks is monotone in the box set") {
  SeededRng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const uint32_t t = 2, h = 8, w = 8;
    BoxTrack track;
    track.clip_id = "m";
    auto random_box = [&](uint32_t f) {
      int x0 = int(rng.uniform_int(w));
      int y0 = int(rng.uniform_int(h));
      int x1 = x0 + 1 + int(rng.uniform_int(w - x0));
      int y1 = y0 + 1 + int(rng.uniform_int(h - y0));
      return BoxTrack::Box{f, x0, y0, x1, y1, 1.0};
    };
    for (int i = 0; i < 3; ++i) track.boxes.push_back(random_box(uint32_t(rng.uniform_int(t))));
    HumanMask before = rasterize_masks(track, t, h, w, 0.5);
    track.boxes.push_back(random_box(uint32_t(rng.uniform_int(t))));
    HumanMask after = rasterize_masks(track, t, h, w, 0.5);
    for (size_t i = 0; i < before.mask.size(); ++i) {
      REQUIRE(after.mask[i] >= before.mask[i]);
    }
  }
}

TEST_CASE("foreground_ratio counts exactly") {
  HumanMask mask = HumanMask::zeros(2, 2, 2);
  CHECK(foreground_ratio(mask) == 0.0);
  mask.mask[0] = mask.mask[3] = mask.mask[5] = mask.mask[6] = 1;
  CHECK(foreground_ratio(mask) == 0.5);
  for (auto& v : mask.mask) v = 1;
  CHECK(foreground_ratio(mask) == 1.0);
}

TEST_CASE("soft labels") {
  SoftLabel ok = SoftLabel::one_hot(4, 2);
  CHECK_NOTHROW(ok.validate());
  SoftLabel bad;
  bad.probs = {0.5, 0.6};
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  SoftLabel single;
  single.probs = {1.0};
  CHECK_THROWS_AS(single.validate(), ValidationError);
}

TEST_CASE("box and label files round-trip") {
  auto dir = temp_dir();
  std::map<std::string, BoxTrack> tracks;
  BoxTrack track;
  track.clip_id = "clip_a";
  track.boxes.push_back({0, 1, 2, 5, 7, 0.9});
  track.boxes.push_back({1, 0, 0, 3, 3, 0.4});
  tracks["clip_a"] = track;
  auto box_path = (dir / "boxes.jsonl").string();
  save_box_file(tracks, box_path);
  auto loaded = load_box_file(box_path);
  REQUIRE(loaded.count("clip_a") == 1);
  REQUIRE(loaded["clip_a"].boxes.size() == 2);
  CHECK(loaded["clip_a"].boxes[0].x1 == 5);
  CHECK(loaded["clip_a"].boxes[1].score == doctest::Approx(0.4));

  auto label_path = (dir / "labels.csv").string();
  save_label_file({{"clip_a", 3}, {"clip_b", 0}}, label_path);
  auto labels = load_label_file(label_path);
  CHECK(labels["clip_a"] == 3);
  CHECK(labels["clip_b"] == 0);
}

TEST_CASE("frame strip layout") {
  VideoClip clip = VideoClip::make(8, 4, 5, 1, "strip");
  auto path = (temp_dir() / "strip.pgm").string();
  write_frame_strip(clip, path);
  std::string bytes = read_bytes(path);
  CHECK(bytes.substr(0, 3) == "P5\n");
  CHECK(bytes.find("40 4\n") != std::string::npos);  // width = 8 * 5

  VideoClip color = VideoClip::make(2, 2, 2, 3, "strip3");
  auto ppm = (temp_dir() / "strip.ppm").string();
  write_frame_strip(color, ppm);
  CHECK(read_bytes(ppm).substr(0, 3) == "P6\n");

  write_frame_strip(clip, path);
  CHECK(read_bytes(path) == bytes);
}

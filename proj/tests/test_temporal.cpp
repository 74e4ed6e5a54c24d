#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "vidaug/temporal.hpp"

using namespace vidaug;

namespace {

/// Clip whose frame i is filled with the value i+1, so frame provenance is
/// readable from any pixel.
VideoClip indexed_clip(uint32_t t) {
  VideoClip clip = VideoClip::make(t, 2, 2, 1, "idx");
  for (uint32_t f = 0; f < t; ++f) {
    std::fill(clip.frame_ptr(f), clip.frame_ptr(f) + clip.frame_size(),
              uint8_t(f + 1));
  }
  return clip;
}

std::vector<int> frame_indices(const VideoClip& clip) {
  std::vector<int> out;
  for (uint32_t f = 0; f < clip.t; ++f) out.push_back(clip.frame_ptr(f)[0]);
  return out;
}

}  // namespace

TEST_CASE("t_half") {
  SUBCASE("eight frames keep the first half twice") {
    CHECK(frame_indices(t_half(indexed_clip(8))) ==
          std::vector<int>({1, 2, 3, 4, 1, 2, 3, 4}));
  }
  SUBCASE("two frames") {
    CHECK(frame_indices(t_half(indexed_clip(2))) == std::vector<int>({1, 1}));
  }
  SUBCASE("odd frame count keeps the ceil(t/2) prefix") {
    CHECK(frame_indices(t_half(indexed_clip(3))) == std::vector<int>({1, 2, 1}));
    CHECK(frame_indices(t_half(indexed_clip(5))) ==
          std::vector<int>({1, 2, 3, 1, 2}));
  }
  SUBCASE("single frame is rejected") {
    CHECK_THROWS_AS(t_half(indexed_clip(1)), ValidationError);
  }
  SUBCASE("idempotent for even t") {
    VideoClip once = t_half(indexed_clip(8));
    CHECK(same_pixels(t_half(once), once));
  }
}

TEST_CASE("t_drop") {
  SUBCASE("p = 0 keeps the clip") {
    SeededRng rng(5);
    VideoClip clip = indexed_clip(6);
    CHECK(same_pixels(t_drop(clip, rng, 0.0), clip));
  }
  SUBCASE("p = 1 freezes frame zero") {
    SeededRng rng(5);
    CHECK(frame_indices(t_drop(indexed_clip(5), rng, 1.0)) ==
          std::vector<int>({1, 1, 1, 1, 1}));
  }
  SUBCASE("p outside [0,1] is rejected") {
    SeededRng rng(5);
    CHECK_THROWS_AS(t_drop(indexed_clip(4), rng, 1.5), ValidationError);
  }
  SUBCASE("frozen-seed replay of the chaining rule") {
    // Replay the Bernoulli stream to derive the expected output, then
    // compare: drops repeat the previous *output* frame.
    const uint64_t seed = 12345;
    VideoClip clip = indexed_clip(8);
    SeededRng run_rng(seed);
    VideoClip out = t_drop(clip, run_rng, 0.5);
    SeededRng replay(seed);
    std::vector<int> expected = {1};
    for (uint32_t i = 1; i < 8; ++i) {
      expected.push_back(replay.bernoulli(0.5) ? expected.back() : int(i + 1));
    }
    CHECK(frame_indices(out) == expected);
  }
  SUBCASE("slow-down: [1,2] can become [1,1]") {
    // find a seed whose first draw is a drop
    for (uint64_t seed = 0; seed < 64; ++seed) {
      SeededRng probe(seed);
      if (!probe.bernoulli(0.5)) continue;
      SeededRng rng(seed);
      CHECK(frame_indices(t_drop(indexed_clip(2), rng, 0.5)) ==
            std::vector<int>({1, 1}));
      return;
    }
    FAIL("no dropping seed found in 64 tries");
  }
  SUBCASE("empirical drop rate within 0.02 of p") {
    for (double p : {0.3, 0.5, 0.8}) {
      SeededRng rng(99);
      size_t drops = 0, draws = 0;
      while (draws < 10000) {
        VideoClip out = t_drop(indexed_clip(11), rng, p);
        std::vector<int> idx = frame_indices(out);
        for (size_t i = 1; i < idx.size(); ++i, ++draws) {
          if (idx[i] == idx[i - 1]) ++drops;
        }
      }
      CHECK(std::abs(double(drops) / double(draws) - p) < 0.02);
    }
  }
}

TEST_CASE("t_reverse") {
  SUBCASE("reverses frame order") {
    CHECK(frame_indices(t_reverse(indexed_clip(4))) ==
          std::vector<int>({4, 3, 2, 1}));
  }
  SUBCASE("single frame unchanged") {
    VideoClip clip = indexed_clip(1);
    CHECK(same_pixels(t_reverse(clip), clip));
  }
  SUBCASE("involution") {
    VideoClip clip = indexed_clip(7);
    CHECK(same_pixels(t_reverse(t_reverse(clip)), clip));
  }
}

TEST_CASE("sample_temporal_op") {
  SUBCASE("same seed gives the same op") {
    SeededRng a(3), b(3);
    CHECK(sample_temporal_op(a).kind == sample_temporal_op(b).kind);
  }
  SUBCASE("t_drop draws carry p = 0.5") {
    SeededRng rng(0);
    for (int i = 0; i < 64; ++i) {
      TemporalOp op = sample_temporal_op(rng);
      if (op.kind == TemporalKind::kTDrop) {
        CHECK(op.drop_prob == 0.5);
        return;
      }
    }
    FAIL("t_drop never sampled in 64 draws");
  }
  SUBCASE("uniform over the four kinds within 0.02") {
    SeededRng rng(17);
    std::vector<int> counts(4, 0);
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
      counts[int(sample_temporal_op(rng).kind)]++;
    }
    for (int count : counts) {
      CHECK(std::abs(count / double(draws) - 0.25) < 0.02);
    }
  }
  SUBCASE("empty pool is a configuration error") {
    SeededRng rng(1);
    CHECK_THROWS_AS(sample_temporal_op({}, rng), ConfigError);
  }
}

TEST_CASE("temporal ops permute or duplicate whole frames") {
  SeededRng seeder(41);
  for (int trial = 0; trial < 30; ++trial) {
    VideoClip clip = VideoClip::make(6, 3, 3, 3, "perm");
    for (uint8_t& px : clip.frames) px = uint8_t(seeder.uniform_int(256));
    std::set<std::vector<uint8_t>> input_frames;
    for (uint32_t f = 0; f < clip.t; ++f) {
      input_frames.insert(std::vector<uint8_t>(
          clip.frame_ptr(f), clip.frame_ptr(f) + clip.frame_size()));
    }
    SeededRng rng(trial);
    TemporalOp op = sample_temporal_op(rng);
    VideoClip out = apply_temporal(clip, op, rng);
    REQUIRE(out.t == clip.t);
    REQUIRE(out.h == clip.h);
    REQUIRE(out.w == clip.w);
    REQUIRE(out.c == clip.c);
    for (uint32_t f = 0; f < out.t; ++f) {
      std::vector<uint8_t> frame(out.frame_ptr(f),
                                 out.frame_ptr(f) + out.frame_size());
      REQUIRE(input_frames.count(frame) == 1);
    }
  }
}

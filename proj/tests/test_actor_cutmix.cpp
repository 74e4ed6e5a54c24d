#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "vidaug/actor_cutmix.hpp"
#include "vidaug/util.hpp"

using namespace vidaug;

namespace {

VideoClip random_clip(uint32_t t, uint32_t h, uint32_t w, uint32_t c,
                      SeededRng& rng, const std::string& id = "clip") {
  VideoClip clip = VideoClip::make(t, h, w, c, id);
  for (uint8_t& px : clip.frames) px = uint8_t(rng.uniform_int(256));
  return clip;
}

HumanMask random_mask(uint32_t t, uint32_t h, uint32_t w, SeededRng& rng) {
  HumanMask mask = HumanMask::zeros(t, h, w);
  for (uint8_t& v : mask.mask) v = rng.bernoulli(0.5) ? 1 : 0;
  return mask;
}

HumanMask filled_mask(uint32_t t, uint32_t h, uint32_t w, uint8_t value) {
  HumanMask mask = HumanMask::zeros(t, h, w);
  std::fill(mask.mask.begin(), mask.mask.end(), value);
  return mask;
}

/// Scalar oracle for one output voxel of the background swap:
/// m_a*x_a + (1-m_a)*(1-m_b)*x_b, evaluated in double then written back
/// with the library's pixel convention.
uint8_t swap_oracle(uint8_t ma, uint8_t xa, uint8_t mb, uint8_t xb) {
  double v = double(ma) * xa + (1.0 - ma) * (1.0 - mb) * xb;
  return to_u8(v);
}

}  // namespace

TEST_CASE("actor_cutmix_pair endpoints") {
  SeededRng rng(1);
  VideoClip a = random_clip(2, 4, 4, 3, rng, "a");
  VideoClip b = random_clip(2, 4, 4, 3, rng, "b");

  SUBCASE("full own mask keeps the clip") {
    auto [out_a, out_b] = actor_cutmix_pair(a, filled_mask(2, 4, 4, 1), b,
                                            random_mask(2, 4, 4, rng));
    CHECK(same_pixels(out_a, a));
  }
  SUBCASE("both masks empty swaps the clips") {
    auto [out_a, out_b] = actor_cutmix_pair(a, filled_mask(2, 4, 4, 0), b,
                                            filled_mask(2, 4, 4, 0));
    CHECK(same_pixels(out_a, b));
    CHECK(same_pixels(out_b, a));
  }
  SUBCASE("shape mismatch is rejected") {
    VideoClip small = random_clip(2, 3, 4, 3, rng);
    CHECK_THROWS_AS(actor_cutmix_pair(a, filled_mask(2, 4, 4, 1), small,
                                      filled_mask(2, 3, 4, 1)),
                    ValidationError);
  }
}

TEST_CASE("actor_cutmix_pair 2x2 worked example") {
  // A = [[a1,a2],[a3,a4]], m_A = [[1,0],[0,0]];
  // B = [[b1,b2],[b3,b4]], m_B = [[0,0],[0,1]]
  // -> out_A = [[a1,b2],[b3,0]]
  VideoClip a = VideoClip::make(1, 2, 2, 1, "a");
  a.frames = {11, 12, 13, 14};
  VideoClip b = VideoClip::make(1, 2, 2, 1, "b");
  b.frames = {21, 22, 23, 24};
  HumanMask ma = HumanMask::zeros(1, 2, 2);
  ma.mask = {1, 0, 0, 0};
  HumanMask mb = HumanMask::zeros(1, 2, 2);
  mb.mask = {0, 0, 0, 1};
  auto [out_a, out_b] = actor_cutmix_pair(a, ma, b, mb);
  CHECK(out_a.frames == std::vector<uint8_t>({11, 22, 23, 0}));
  // symmetric side: out_B = [[b1? m_B=0,m_A=1 -> 0, a2],[a3, b4]]
  CHECK(out_b.frames == std::vector<uint8_t>({0, 12, 13, 24}));
}

TEST_CASE("swap equation matches the scalar oracle bit-exactly") {
  SeededRng rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    VideoClip a = random_clip(2, 4, 4, 3, rng, "a");
    VideoClip b = random_clip(2, 4, 4, 3, rng, "b");
    HumanMask ma = random_mask(2, 4, 4, rng);
    HumanMask mb = random_mask(2, 4, 4, rng);
    auto [out_a, out_b] = actor_cutmix_pair(a, ma, b, mb);
    for (uint32_t f = 0; f < 2; ++f) {
      for (uint32_t y = 0; y < 4; ++y) {
        for (uint32_t x = 0; x < 4; ++x) {
          for (uint32_t ch = 0; ch < 3; ++ch) {
            REQUIRE(out_a.at(f, y, x, ch) ==
                    swap_oracle(ma.at(f, y, x), a.at(f, y, x, ch),
                                mb.at(f, y, x), b.at(f, y, x, ch)));
            REQUIRE(out_b.at(f, y, x, ch) ==
                    swap_oracle(mb.at(f, y, x), b.at(f, y, x, ch),
                                ma.at(f, y, x), a.at(f, y, x, ch)));
          }
        }
      }
    }
  }
}

TEST_CASE("actor_cutmix_pair symmetry and human-region preservation") {
  SeededRng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    VideoClip a = random_clip(2, 5, 5, 1, rng, "a");
    VideoClip b = random_clip(2, 5, 5, 1, rng, "b");
    HumanMask ma = random_mask(2, 5, 5, rng);
    HumanMask mb = random_mask(2, 5, 5, rng);
    auto [ab_first, ab_second] = actor_cutmix_pair(a, ma, b, mb);
    auto [ba_first, ba_second] = actor_cutmix_pair(b, mb, a, ma);
    REQUIRE(same_pixels(ab_first, ba_second));
    REQUIRE(same_pixels(ab_second, ba_first));
    for (size_t v = 0; v < ma.mask.size(); ++v) {
      if (ma.mask[v]) REQUIRE(ab_first.frames[v] == a.frames[v]);
    }
  }
}

TEST_CASE("smooth_label") {
  SoftLabel ya = SoftLabel::one_hot(4, 0);
  SoftLabel yb = SoftLabel::one_hot(4, 2);
  MixConfig cfg;  // alpha = 4, smoothing on

  SUBCASE("full mask keeps the own label") {
    auto [label, lambda] = smooth_label(ya, yb, filled_mask(1, 2, 2, 1), cfg);
    CHECK(lambda == 1.0);
    CHECK(label.probs == ya.probs);
  }
  SUBCASE("empty mask takes the partner label") {
    auto [label, lambda] = smooth_label(ya, yb, filled_mask(1, 2, 2, 0), cfg);
    CHECK(lambda == 0.0);
    CHECK(label.probs == yb.probs);
  }
  SUBCASE("half mask with alpha 4") {
    HumanMask mask = HumanMask::zeros(1, 2, 2);
    mask.mask = {1, 1, 0, 0};
    auto [label, lambda] = smooth_label(ya, yb, mask, cfg);
    CHECK(lambda == doctest::Approx(0.9375).epsilon(1e-12));
    CHECK(label.probs[0] == doctest::Approx(0.9375).epsilon(1e-12));
    CHECK(label.probs[2] == doctest::Approx(0.0625).epsilon(1e-12));
  }
  SUBCASE("smoothing off passes the label through") {
    MixConfig off;
    off.smoothing = false;
    auto [label, lambda] = smooth_label(ya, yb, filled_mask(1, 2, 2, 0), off);
    CHECK(lambda == 1.0);
    CHECK(label.probs == ya.probs);
  }
  SUBCASE("output sums to one and lambda is monotone in r") {
    SeededRng rng(3);
    SoftLabel sa, sb;
    sa.probs = {0.1, 0.2, 0.3, 0.4};
    sb.probs = {0.25, 0.25, 0.25, 0.25};
    double prev_lambda = -1.0;
    for (int ones = 0; ones <= 8; ++ones) {
      HumanMask mask = HumanMask::zeros(2, 2, 2);
      for (int i = 0; i < ones; ++i) mask.mask[i] = 1;
      auto [label, lambda] = smooth_label(sa, sb, mask, cfg);
      double sum = 0.0;
      for (double p : label.probs) sum += p;
      REQUIRE(std::abs(sum - 1.0) < 1e-12);
      REQUIRE(lambda >= prev_lambda);
      prev_lambda = lambda;
    }
  }
}

TEST_CASE("actor_cutmix_batch") {
  SeededRng rng(11);
  MixConfig cfg;

  SUBCASE("single element pairs with itself and passes through") {
    VideoClip clip = random_clip(2, 4, 4, 3, rng, "solo");
    HumanMask mask = random_mask(2, 4, 4, rng);
    SoftLabel label = SoftLabel::one_hot(3, 1);
    auto results = actor_cutmix_batch({clip}, {mask}, {label}, cfg);
    REQUIRE(results.size() == 1);
    CHECK(same_pixels(results[0].clip, clip));
    for (size_t k = 0; k < 3; ++k) {
      CHECK(results[0].label.probs[k] == doctest::Approx(label.probs[k]).epsilon(1e-12));
    }
  }
  SUBCASE("two elements match direct pair calls") {
    VideoClip a = random_clip(2, 4, 4, 3, rng, "a");
    VideoClip b = random_clip(2, 4, 4, 3, rng, "b");
    HumanMask ma = random_mask(2, 4, 4, rng);
    HumanMask mb = random_mask(2, 4, 4, rng);
    SoftLabel ya = SoftLabel::one_hot(3, 0), yb = SoftLabel::one_hot(3, 2);
    auto results = actor_cutmix_batch({a, b}, {ma, mb}, {ya, yb}, cfg);
    auto [pair_a, pair_b] = actor_cutmix_pair(a, ma, b, mb);
    REQUIRE(results.size() == 2);
    CHECK(same_pixels(results[0].clip, pair_a));
    CHECK(same_pixels(results[1].clip, pair_b));
    CHECK(results[0].partner_id == "b");
    CHECK(results[1].partner_id == "a");
    auto [expect_a, lambda_a] = smooth_label(ya, yb, ma, cfg);
    CHECK(results[0].lambda == lambda_a);
    CHECK(results[0].label.probs == expect_a.probs);
  }
  SUBCASE("all-zero masks fully swap clips and labels") {
    VideoClip a = random_clip(1, 3, 3, 1, rng, "a");
    VideoClip b = random_clip(1, 3, 3, 1, rng, "b");
    HumanMask zero = filled_mask(1, 3, 3, 0);
    SoftLabel ya = SoftLabel::one_hot(2, 0), yb = SoftLabel::one_hot(2, 1);
    auto results = actor_cutmix_batch({a, b}, {zero, zero}, {ya, yb}, cfg);
    CHECK(same_pixels(results[0].clip, b));
    CHECK(same_pixels(results[1].clip, a));
    CHECK(results[0].lambda == 0.0);
    CHECK(results[0].label.probs == yb.probs);
    CHECK(results[1].label.probs == ya.probs);
  }
  SUBCASE("shape mismatch names the pair") {
    VideoClip a = random_clip(1, 3, 3, 1, rng, "a");
    VideoClip b = random_clip(1, 4, 3, 1, rng, "b");
    CHECK_THROWS_WITH_AS(
        actor_cutmix_batch({a, b}, {filled_mask(1, 3, 3, 1), filled_mask(1, 4, 3, 1)},
                           {SoftLabel::one_hot(2, 0), SoftLabel::one_hot(2, 1)}, cfg),
        doctest::Contains("pair (0,1)"), ValidationError);
  }
}

TEST_CASE("cutmix_pair") {
  SeededRng rng(13);
  VideoClip a = random_clip(2, 4, 4, 3, rng, "a");
  VideoClip b = random_clip(2, 4, 4, 3, rng, "b");

  SUBCASE("full-frame rectangle copies the partner") {
    auto [out, lambda] = cutmix_apply(a, b, CutRect{0, 0, 4, 4});
    CHECK(same_pixels(out, b));
    CHECK(lambda == 0.0);
  }
  SUBCASE("column rectangle replaces half the pixels on a 2x2 frame") {
    VideoClip a2 = random_clip(1, 2, 2, 1, rng, "a2");
    VideoClip b2 = random_clip(1, 2, 2, 1, rng, "b2");
    auto [out, lambda] = cutmix_apply(a2, b2, CutRect{0, 0, 2, 1});
    CHECK(lambda == 0.5);
    CHECK(out.at(0, 0, 0) == b2.at(0, 0, 0));
    CHECK(out.at(0, 1, 0) == b2.at(0, 1, 0));
    CHECK(out.at(0, 0, 1) == a2.at(0, 0, 1));
    CHECK(out.at(0, 1, 1) == a2.at(0, 1, 1));
  }
  SUBCASE("sampled rectangles always replace at least one pixel") {
    for (int trial = 0; trial < 200; ++trial) {
      CutRect rect = sample_cut_rect(4, 4, rng);
      REQUIRE(rect.rh >= 1);
      REQUIRE(rect.rw >= 1);
      REQUIRE(rect.y0 + rect.rh <= 4);
      REQUIRE(rect.x0 + rect.rw <= 4);
      auto [out, lambda] = cutmix_apply(a, b, rect);
      REQUIRE(lambda < 1.0);
      REQUIRE(lambda >= 0.0);
    }
  }
  SUBCASE("same rectangle on every frame") {
    auto [out, lambda] = cutmix_pair(a, b, rng);
    // any pixel replaced in frame 0 must be replaced in frame 1 too
    for (uint32_t y = 0; y < 4; ++y) {
      for (uint32_t x = 0; x < 4; ++x) {
        bool from_b0 = out.at(0, y, x, 0) == b.at(0, y, x, 0) &&
                       out.at(0, y, x, 1) == b.at(0, y, x, 1);
        bool from_b1 = out.at(1, y, x, 0) == b.at(1, y, x, 0) &&
                       out.at(1, y, x, 1) == b.at(1, y, x, 1);
        bool from_a0 = out.at(0, y, x, 0) == a.at(0, y, x, 0);
        // replaced-in-0 implies replaced-in-1 unless A and B collide
        if (from_b0 && !from_a0) REQUIRE(from_b1);
      }
    }
  }
  SUBCASE("shape mismatch is rejected") {
    VideoClip small = random_clip(1, 4, 4, 3, rng);
    CHECK_THROWS_AS(cutmix_pair(a, small, rng), ValidationError);
  }
}

TEST_CASE("background_cutmix_pair") {
  SeededRng rng(17);
  VideoClip a = random_clip(2, 4, 4, 3, rng, "a");
  VideoClip b = random_clip(2, 4, 4, 3, rng, "b");

  SUBCASE("empty own mask keeps the clip") {
    auto [out, ignored] = background_cutmix_pair(a, filled_mask(2, 4, 4, 0), b,
                                                 random_mask(2, 4, 4, rng));
    CHECK(same_pixels(out, a));
  }
  SUBCASE("full masks on both sides copy the partner") {
    auto [out, ignored] = background_cutmix_pair(a, filled_mask(2, 4, 4, 1), b,
                                                 filled_mask(2, 4, 4, 1));
    CHECK(same_pixels(out, b));
  }
  SUBCASE("matches the elementwise complement oracle") {
    for (int trial = 0; trial < 200; ++trial) {
      HumanMask ma = random_mask(2, 4, 4, rng);
      HumanMask mb = random_mask(2, 4, 4, rng);
      auto [out_a, out_b] = background_cutmix_pair(a, ma, b, mb);
      for (uint32_t f = 0; f < 2; ++f) {
        for (uint32_t y = 0; y < 4; ++y) {
          for (uint32_t x = 0; x < 4; ++x) {
            for (uint32_t ch = 0; ch < 3; ++ch) {
              // (1-m_a)*x_a + m_a*m_b*x_b
              double expect = (1.0 - ma.at(f, y, x)) * a.at(f, y, x, ch) +
                              double(ma.at(f, y, x)) * mb.at(f, y, x) *
                                  b.at(f, y, x, ch);
              REQUIRE(out_a.at(f, y, x, ch) == to_u8(expect));
            }
          }
        }
      }
    }
  }
  SUBCASE("mirrored 2x2 worked example") {
    VideoClip a2 = VideoClip::make(1, 2, 2, 1, "a");
    a2.frames = {11, 12, 13, 14};
    VideoClip b2 = VideoClip::make(1, 2, 2, 1, "b");
    b2.frames = {21, 22, 23, 24};
    HumanMask ma = HumanMask::zeros(1, 2, 2);
    ma.mask = {1, 0, 0, 0};
    HumanMask mb = HumanMask::zeros(1, 2, 2);
    mb.mask = {0, 0, 0, 1};
    auto [out, ignored] = background_cutmix_pair(a2, ma, b2, mb);
    // actor cell (0,0): m_b there is 0 -> hole; background kept elsewhere
    CHECK(out.frames == std::vector<uint8_t>({0, 12, 13, 14}));
  }
}

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vidaug/error.hpp"

namespace vidaug {

/// A video clip: T*H*W*C pixel volume, frame-major, row-major,
/// channel-interleaved, 8-bit unsigned storage. Augmentation kernels
/// compute in double and write back with round-half-to-even + clamp.
struct VideoClip {
  uint32_t t = 0;
  uint32_t h = 0;
  uint32_t w = 0;
  uint32_t c = 0;
  std::string clip_id;
  std::vector<uint8_t> frames;

  static VideoClip make(uint32_t t, uint32_t h, uint32_t w, uint32_t c,
                        std::string clip_id = {});

  size_t pixel_count() const { return size_t(t) * h * w * c; }
  size_t frame_size() const { return size_t(h) * w * c; }

  size_t index(uint32_t f, uint32_t y, uint32_t x, uint32_t ch = 0) const {
    return ((size_t(f) * h + y) * w + x) * c + ch;
  }
  uint8_t at(uint32_t f, uint32_t y, uint32_t x, uint32_t ch = 0) const {
    return frames[index(f, y, x, ch)];
  }
  uint8_t* frame_ptr(uint32_t f) { return frames.data() + size_t(f) * frame_size(); }
  const uint8_t* frame_ptr(uint32_t f) const {
    return frames.data() + size_t(f) * frame_size();
  }

  /// t >= 1, spatial dims >= 1, c in {1,3}, payload size consistent.
  void validate() const;
};

/// Pixel-content equality; clip_id is metadata and not compared.
bool same_pixels(const VideoClip& a, const VideoClip& b);

/// Probability vector over K classes.
struct SoftLabel {
  std::vector<double> probs;

  static SoftLabel one_hot(size_t k_classes, size_t index);

  size_t size() const { return probs.size(); }

  /// K >= 2, entries >= 0, sum within 1e-9 of 1.
  void validate() const;
};

/// Cached detector output for one clip: per-frame axis-aligned boxes with
/// confidence scores. Pixel (x, y) is inside a box when x0 <= x < x1 and
/// y0 <= y < y1.
struct BoxTrack {
  struct Box {
    uint32_t frame = 0;
    int32_t x0 = 0, y0 = 0, x1 = 0, y1 = 0;
    double score = 1.0;
  };
  std::string clip_id;
  std::vector<Box> boxes;

  void validate_against(uint32_t t, uint32_t h, uint32_t w) const;
};

/// Binary T*H*W volume marking actor regions (1 = human).
struct HumanMask {
  uint32_t t = 0;
  uint32_t h = 0;
  uint32_t w = 0;
  std::vector<uint8_t> mask;

  static HumanMask zeros(uint32_t t, uint32_t h, uint32_t w);

  size_t index(uint32_t f, uint32_t y, uint32_t x) const {
    return (size_t(f) * h + y) * w + x;
  }
  uint8_t at(uint32_t f, uint32_t y, uint32_t x) const {
    return mask[index(f, y, x)];
  }
  size_t voxels() const { return size_t(t) * h * w; }

  void validate() const;
};

/// Union of all boxes with score >= score_threshold, rasterized per frame.
HumanMask rasterize_masks(const BoxTrack& boxes, uint32_t t, uint32_t h,
                          uint32_t w, double score_threshold = 0.5);

/// Fraction of mask voxels set: sum(m) / (T*H*W).
double foreground_ratio(const HumanMask& mask);

}  // namespace vidaug

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "vidaug/clip.hpp"
#include "vidaug/rng.hpp"

namespace vidaug {

struct MixConfig {
  double alpha = 4.0;     // label-smoothing exponent
  bool smoothing = true;  // when false, labels pass through and lambda = 1
};

struct MixResult {
  VideoClip clip;
  SoftLabel label;
  double lambda = 1.0;
  std::string partner_id;
};

/// Background swap between two clips of equal shape:
///   out_a = m_a * x_a + (1 - m_a) * (1 - m_b) * x_b
/// and symmetrically for b. Pixels where only the partner's actor stood
/// (m_a = 0, m_b = 1) become exactly 0.
std::pair<VideoClip, VideoClip> actor_cutmix_pair(const VideoClip& clip_a,
                                                  const HumanMask& mask_a,
                                                  const VideoClip& clip_b,
                                                  const HumanMask& mask_b);

/// Foreground-ratio label smoothing. With r = foreground_ratio(mask_a):
///   lambda = 1 - |1 - r|^alpha
///   out    = lambda * y_a + (1 - lambda) * y_b
/// With cfg.smoothing off, out = y_a and lambda = 1.
std::pair<SoftLabel, double> smooth_label(const SoftLabel& y_a,
                                          const SoftLabel& y_b,
                                          const HumanMask& mask_a,
                                          const MixConfig& cfg);

/// Mixes element i with element n-1-i (batch reversal). Results are
/// ordered by input index.
std::vector<MixResult> actor_cutmix_batch(const std::vector<VideoClip>& clips,
                                          const std::vector<HumanMask>& masks,
                                          const std::vector<SoftLabel>& labels,
                                          const MixConfig& cfg);

/// Rectangle for the plain-CutMix comparator, same on every frame.
struct CutRect {
  uint32_t y0 = 0, x0 = 0, rh = 1, rw = 1;
};

/// Area fraction from U(0,1) (Beta(1,1)), side lengths proportional to
/// sqrt(fraction) and at least 1 pixel, position uniform. Draw order:
/// fraction, x0, y0.
CutRect sample_cut_rect(uint32_t h, uint32_t w, SeededRng& rng);

/// Replaces the rectangle in a with b's pixels; second return value is
/// the surviving-area ratio 1 - rect_area / (h*w).
std::pair<VideoClip, double> cutmix_apply(const VideoClip& clip_a,
                                          const VideoClip& clip_b,
                                          const CutRect& rect);

std::pair<VideoClip, double> cutmix_pair(const VideoClip& clip_a,
                                         const VideoClip& clip_b,
                                         SeededRng& rng);

/// Complement of the actor swap: background kept, actor region replaced.
///   out_a = (1 - m_a) * x_a + m_a * m_b * x_b
std::pair<VideoClip, VideoClip> background_cutmix_pair(const VideoClip& clip_a,
                                                       const HumanMask& mask_a,
                                                       const VideoClip& clip_b,
                                                       const HumanMask& mask_b);

}  // namespace vidaug

#include "vidaug/actor_cutmix.hpp"

#include <cmath>
#include <sstream>

#include "vidaug/util.hpp"

namespace vidaug {

namespace {

void require_pair_shapes(const VideoClip& a, const HumanMask& ma,
                         const VideoClip& b, const HumanMask& mb) {
  a.validate();
  b.validate();
  ma.validate();
  mb.validate();
  if (a.t != b.t || a.h != b.h || a.w != b.w || a.c != b.c) {
    std::ostringstream os;
    os << "clip shape mismatch: (" << a.t << "," << a.h << "," << a.w << ","
       << a.c << ") vs (" << b.t << "," << b.h << "," << b.w << "," << b.c << ")";
    throw ValidationError(os.str());
  }
  if (ma.t != a.t || ma.h != a.h || ma.w != a.w || mb.t != b.t ||
      mb.h != b.h || mb.w != b.w) {
    throw ValidationError("mask shape does not match its clip");
  }
}

/// One direction of the swap. Masks are binary, so the formula reduces to
/// an exact per-voxel select: keep own actor, take the partner's
/// background, zero where only the partner's actor stood.
VideoClip swap_background(const VideoClip& self, const HumanMask& m_self,
                          const VideoClip& other, const HumanMask& m_other) {
  VideoClip out = self;
  const uint32_t c = self.c;
  const size_t voxels = m_self.voxels();
  for (size_t v = 0; v < voxels; ++v) {
    if (m_self.mask[v]) continue;  // own actor pixels stay in place
    uint8_t* dst = out.frames.data() + v * c;
    if (m_other.mask[v]) {
      for (uint32_t ch = 0; ch < c; ++ch) dst[ch] = 0;
    } else {
      const uint8_t* src = other.frames.data() + v * c;
      for (uint32_t ch = 0; ch < c; ++ch) dst[ch] = src[ch];
    }
  }
  return out;
}

}  // namespace

std::pair<VideoClip, VideoClip> actor_cutmix_pair(const VideoClip& clip_a,
                                                  const HumanMask& mask_a,
                                                  const VideoClip& clip_b,
                                                  const HumanMask& mask_b) {
  require_pair_shapes(clip_a, mask_a, clip_b, mask_b);
  return {swap_background(clip_a, mask_a, clip_b, mask_b),
          swap_background(clip_b, mask_b, clip_a, mask_a)};
}

std::pair<SoftLabel, double> smooth_label(const SoftLabel& y_a,
                                          const SoftLabel& y_b,
                                          const HumanMask& mask_a,
                                          const MixConfig& cfg) {
  y_a.validate();
  y_b.validate();
  mask_a.validate();
  if (y_a.size() != y_b.size()) {
    throw ValidationError("labels have different class counts");
  }
  if (!(cfg.alpha > 0.0)) throw ValidationError("smoothing alpha must be > 0");
  if (!cfg.smoothing) return {y_a, 1.0};
  const double r = foreground_ratio(mask_a);
  const double lambda = 1.0 - std::pow(std::abs(1.0 - r), cfg.alpha);
  SoftLabel out;
  out.probs.resize(y_a.size());
  for (size_t k = 0; k < y_a.size(); ++k) {
    out.probs[k] = lambda * y_a.probs[k] + (1.0 - lambda) * y_b.probs[k];
  }
  return {out, lambda};
}

std::vector<MixResult> actor_cutmix_batch(const std::vector<VideoClip>& clips,
                                          const std::vector<HumanMask>& masks,
                                          const std::vector<SoftLabel>& labels,
                                          const MixConfig& cfg) {
  const size_t n = clips.size();
  if (n == 0) throw ValidationError("empty batch");
  if (masks.size() != n || labels.size() != n) {
    throw ValidationError("clips, masks and labels must have equal length");
  }
  // Validate every pair up front; workers must not throw.
  for (size_t i = 0; i < n; ++i) {
    const size_t j = n - 1 - i;
    try {
      require_pair_shapes(clips[i], masks[i], clips[j], masks[j]);
    } catch (const ValidationError& e) {
      std::ostringstream os;
      os << "pair (" << i << "," << j << "): " << e.what();
      throw ValidationError(os.str());
    }
    labels[i].validate();
  }
  if (!(cfg.alpha > 0.0)) throw ValidationError("smoothing alpha must be > 0");
  std::vector<MixResult> results(n);
  parallel_for(n, [&](size_t i) {
    const size_t j = n - 1 - i;
    MixResult& r = results[i];
    r.clip = swap_background(clips[i], masks[i], clips[j], masks[j]);
    auto [label, lambda] = smooth_label(labels[i], labels[j], masks[i], cfg);
    r.label = std::move(label);
    r.lambda = lambda;
    r.partner_id = clips[j].clip_id;
  });
  return results;
}

CutRect sample_cut_rect(uint32_t h, uint32_t w, SeededRng& rng) {
  const double fraction = rng.next_double();
  const double side = std::sqrt(fraction);
  CutRect rect;
  rect.rw = std::min<uint32_t>(w, std::max<uint32_t>(1, uint32_t(round_half_even(side * w))));
  rect.rh = std::min<uint32_t>(h, std::max<uint32_t>(1, uint32_t(round_half_even(side * h))));
  rect.x0 = uint32_t(rng.uniform_int(w - rect.rw + 1));
  rect.y0 = uint32_t(rng.uniform_int(h - rect.rh + 1));
  return rect;
}

std::pair<VideoClip, double> cutmix_apply(const VideoClip& clip_a,
                                          const VideoClip& clip_b,
                                          const CutRect& rect) {
  clip_a.validate();
  clip_b.validate();
  if (clip_a.t != clip_b.t || clip_a.h != clip_b.h || clip_a.w != clip_b.w ||
      clip_a.c != clip_b.c) {
    throw ValidationError("cutmix clips must share the same shape");
  }
  if (rect.y0 + rect.rh > clip_a.h || rect.x0 + rect.rw > clip_a.w) {
    throw ValidationError("cut rectangle exceeds frame bounds");
  }
  VideoClip out = clip_a;
  for (uint32_t f = 0; f < clip_a.t; ++f) {
    for (uint32_t y = rect.y0; y < rect.y0 + rect.rh; ++y) {
      for (uint32_t x = rect.x0; x < rect.x0 + rect.rw; ++x) {
        for (uint32_t ch = 0; ch < clip_a.c; ++ch) {
          out.frames[out.index(f, y, x, ch)] = clip_b.at(f, y, x, ch);
        }
      }
    }
  }
  const double area = double(rect.rh) * rect.rw;
  const double lambda_area = 1.0 - area / (double(clip_a.h) * clip_a.w);
  return {out, lambda_area};
}

std::pair<VideoClip, double> cutmix_pair(const VideoClip& clip_a,
                                         const VideoClip& clip_b,
                                         SeededRng& rng) {
  return cutmix_apply(clip_a, clip_b, sample_cut_rect(clip_a.h, clip_a.w, rng));
}

std::pair<VideoClip, VideoClip> background_cutmix_pair(const VideoClip& clip_a,
                                                       const HumanMask& mask_a,
                                                       const VideoClip& clip_b,
                                                       const HumanMask& mask_b) {
  require_pair_shapes(clip_a, mask_a, clip_b, mask_b);
  auto replace_actor = [](const VideoClip& self, const HumanMask& m_self,
                          const VideoClip& other, const HumanMask& m_other) {
    VideoClip out = self;
    const uint32_t c = self.c;
    const size_t voxels = m_self.voxels();
    for (size_t v = 0; v < voxels; ++v) {
      if (!m_self.mask[v]) continue;  // background stays
      uint8_t* dst = out.frames.data() + v * c;
      if (m_other.mask[v]) {
        const uint8_t* src = other.frames.data() + v * c;
        for (uint32_t ch = 0; ch < c; ++ch) dst[ch] = src[ch];
      } else {
        for (uint32_t ch = 0; ch < c; ++ch) dst[ch] = 0;
      }
    }
    return out;
  };
  return {replace_actor(clip_a, mask_a, clip_b, mask_b),
          replace_actor(clip_b, mask_b, clip_a, mask_a)};
}

}  // namespace vidaug

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vidaug/actor_cutmix.hpp"
#include "vidaug/clip.hpp"
#include "vidaug/photo_geo.hpp"
#include "vidaug/rng.hpp"
#include "vidaug/temporal.hpp"

namespace vidaug {

/// Weak (standard) augmentation: one horizontal-flip decision, one scale
/// factor and one crop offset per clip, applied to every frame.
struct WeakAugConfig {
  double flip_prob = 0.5;
  double scale_lo = 1.0;
  double scale_hi = 1.25;
  /// Output size; nullopt means crop back to the input size.
  std::optional<std::pair<uint32_t, uint32_t>> crop_size;
};

enum class PolicyMode {
  kStrongAlg1,         // per-batch coin: cross-clip mix or intra-clip cascade
  kIntraCascaded,      // two photo-geo ops then one temporal op, per clip
  kIntraSampleOne,     // fair coin: photo-geo pair or temporal op, per clip
  kCrossOnly,          // cross-clip mix on every batch
  kCascadedIntraCross, // intra cascade then cross-clip mix
  kWeakOnly,
  kPerFrame,           // photo-geo pair with per-frame randomness, no temporal
};

enum class CrossKind { kActorCutMix, kCutMix, kBackgroundCutMix };

struct AugPolicy {
  PolicyMode mode = PolicyMode::kStrongAlg1;
  std::vector<PhotoGeoKind> photo_geo_pool = full_photo_geo_pool();
  std::vector<TemporalKind> temporal_pool = full_temporal_pool();
  MixConfig cross_cfg;
  CrossKind cross_kind = CrossKind::kActorCutMix;
  double branch_prob = 0.5;  // probability of the cross branch in kStrongAlg1
  WeakAugConfig weak;

  /// True when this policy can take a cross-clip branch and therefore
  /// needs human masks.
  bool needs_masks() const;

  void validate() const;
};

std::string policy_mode_name(PolicyMode mode);
PolicyMode policy_mode_from_name(const std::string& name);

/// Policy file schema (JSON): {"mode": str, "photo_geo_pool": [str],
/// "temporal_pool": [str], "alpha": float, "smoothing": bool,
/// "cross_kind": str, "branch_prob": float, "weak": {"flip_prob": float,
/// "scale_range": [lo, hi], "crop_size": [h, w]}}. Every key is optional
/// and defaults to the values above.
AugPolicy parse_policy_json(const std::string& json_text);
AugPolicy load_policy(const std::string& path);
std::string policy_to_json(const AugPolicy& policy);

VideoClip hflip(const VideoClip& clip);
VideoClip resize_nn(const VideoClip& clip, uint32_t out_h, uint32_t out_w);
VideoClip crop(const VideoClip& clip, uint32_t y0, uint32_t x0, uint32_t out_h,
               uint32_t out_w);

/// Draw order per clip: flip decision, scale factor, crop y0, crop x0.
VideoClip weak_augment(const VideoClip& clip, const WeakAugConfig& cfg,
                       SeededRng& rng);

struct AugmentedItem {
  VideoClip clip;
  SoftLabel label;
  double lambda = 1.0;
  int32_t partner_index = -1;  // -1 on the intra path
  bool cross = false;
};

/// Algorithm-1 strong augmentation for one mini-batch. Draws one uniform
/// p; p > 1 - branch_prob sends the whole batch through the cross-clip
/// mix, otherwise each clip independently gets two coherent photo-geo ops
/// followed by one temporal op. Per-clip generators on the intra path use
/// derive_seed(base, i) where base is one draw from rng, so results do not
/// depend on worker scheduling.
std::vector<AugmentedItem> strong_augment_batch(
    const std::vector<VideoClip>& clips, const std::vector<HumanMask>& masks,
    const std::vector<SoftLabel>& labels, const AugPolicy& policy,
    SeededRng& rng);

VideoClip intra_cascaded(const VideoClip& clip, const AugPolicy& policy,
                         SeededRng& rng);

/// Fair coin, then either the photo-geo pair or the temporal op alone.
VideoClip intra_sample_one(const VideoClip& clip, const AugPolicy& policy,
                           SeededRng& rng);

std::vector<AugmentedItem> cascaded_intra_cross(
    const std::vector<VideoClip>& clips, const std::vector<HumanMask>& masks,
    const std::vector<SoftLabel>& labels, const AugPolicy& policy,
    SeededRng& rng);

/// Dispatches on policy.mode; the entry point used by the trainer and the
/// C API. masks may be empty for modes that never cross.
std::vector<AugmentedItem> apply_policy_batch(
    const std::vector<VideoClip>& clips, const std::vector<HumanMask>& masks,
    const std::vector<SoftLabel>& labels, const AugPolicy& policy,
    SeededRng& rng);

}  // namespace vidaug

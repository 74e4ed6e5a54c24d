#include "vidaug/policy.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "vidaug/util.hpp"

namespace vidaug {

bool AugPolicy::needs_masks() const {
  const bool can_cross = mode == PolicyMode::kStrongAlg1 ||
                         mode == PolicyMode::kCrossOnly ||
                         mode == PolicyMode::kCascadedIntraCross;
  return can_cross && cross_kind != CrossKind::kCutMix;
}

void AugPolicy::validate() const {
  if (!(branch_prob >= 0.0 && branch_prob <= 1.0)) {
    throw ConfigError("branch_prob must lie in [0,1]");
  }
  if (!(cross_cfg.alpha > 0.0)) throw ConfigError("alpha must be > 0");
  const bool uses_photo = mode != PolicyMode::kWeakOnly &&
                          mode != PolicyMode::kCrossOnly;
  if (uses_photo && photo_geo_pool.empty()) {
    throw ConfigError("photo_geo_pool must be non-empty for mode " +
                      policy_mode_name(mode));
  }
  const bool uses_temporal = mode == PolicyMode::kStrongAlg1 ||
                             mode == PolicyMode::kIntraCascaded ||
                             mode == PolicyMode::kIntraSampleOne ||
                             mode == PolicyMode::kCascadedIntraCross;
  if (uses_temporal && temporal_pool.empty()) {
    throw ConfigError("temporal_pool must be non-empty for mode " +
                      policy_mode_name(mode));
  }
  if (!(weak.flip_prob >= 0.0 && weak.flip_prob <= 1.0)) {
    throw ConfigError("flip_prob must lie in [0,1]");
  }
  if (!(weak.scale_lo > 0.0 && weak.scale_lo <= weak.scale_hi)) {
    throw ConfigError("scale range must satisfy 0 < lo <= hi");
  }
}

std::string policy_mode_name(PolicyMode mode) {
  switch (mode) {
    case PolicyMode::kStrongAlg1: return "strong_alg1";
    case PolicyMode::kIntraCascaded: return "intra_cascaded";
    case PolicyMode::kIntraSampleOne: return "intra_sample_one";
    case PolicyMode::kCrossOnly: return "cross_only";
    case PolicyMode::kCascadedIntraCross: return "cascaded_intra_cross";
    case PolicyMode::kWeakOnly: return "weak_only";
    case PolicyMode::kPerFrame: return "per_frame";
  }
  throw ConfigError("unknown policy mode");
}

PolicyMode policy_mode_from_name(const std::string& name) {
  for (PolicyMode m : {PolicyMode::kStrongAlg1, PolicyMode::kIntraCascaded,
                       PolicyMode::kIntraSampleOne, PolicyMode::kCrossOnly,
                       PolicyMode::kCascadedIntraCross, PolicyMode::kWeakOnly,
                       PolicyMode::kPerFrame}) {
    if (policy_mode_name(m) == name) return m;
  }
  throw ConfigError("unknown policy mode '" + name + "'");
}

namespace {

std::string cross_kind_name(CrossKind kind) {
  switch (kind) {
    case CrossKind::kActorCutMix: return "actor_cutmix";
    case CrossKind::kCutMix: return "cutmix";
    case CrossKind::kBackgroundCutMix: return "background_cutmix";
  }
  throw ConfigError("unknown cross kind");
}

CrossKind cross_kind_from_name(const std::string& name) {
  for (CrossKind k : {CrossKind::kActorCutMix, CrossKind::kCutMix,
                      CrossKind::kBackgroundCutMix}) {
    if (cross_kind_name(k) == name) return k;
  }
  throw ConfigError("unknown cross kind '" + name + "'");
}

}  // namespace

AugPolicy parse_policy_json(const std::string& json_text) {
  nlohmann::json obj;
  try {
    obj = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("policy JSON parse error: ") + e.what());
  }
  AugPolicy policy;
  try {
    if (obj.contains("mode")) {
      policy.mode = policy_mode_from_name(obj["mode"].get<std::string>());
    }
    if (obj.contains("photo_geo_pool")) {
      policy.photo_geo_pool.clear();
      for (const auto& name : obj["photo_geo_pool"]) {
        policy.photo_geo_pool.push_back(
            photo_geo_kind_from_name(name.get<std::string>()));
      }
    }
    if (obj.contains("temporal_pool")) {
      policy.temporal_pool.clear();
      for (const auto& name : obj["temporal_pool"]) {
        policy.temporal_pool.push_back(
            temporal_kind_from_name(name.get<std::string>()));
      }
    }
    if (obj.contains("alpha")) policy.cross_cfg.alpha = obj["alpha"].get<double>();
    if (obj.contains("smoothing")) {
      policy.cross_cfg.smoothing = obj["smoothing"].get<bool>();
    }
    if (obj.contains("cross_kind")) {
      policy.cross_kind = cross_kind_from_name(obj["cross_kind"].get<std::string>());
    }
    if (obj.contains("branch_prob")) {
      policy.branch_prob = obj["branch_prob"].get<double>();
    }
    if (obj.contains("weak")) {
      const auto& wk = obj["weak"];
      if (wk.contains("flip_prob")) policy.weak.flip_prob = wk["flip_prob"].get<double>();
      if (wk.contains("scale_range")) {
        policy.weak.scale_lo = wk["scale_range"].at(0).get<double>();
        policy.weak.scale_hi = wk["scale_range"].at(1).get<double>();
      }
      if (wk.contains("crop_size") && !wk["crop_size"].is_null()) {
        policy.weak.crop_size = {wk["crop_size"].at(0).get<uint32_t>(),
                                 wk["crop_size"].at(1).get<uint32_t>()};
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("policy JSON field error: ") + e.what());
  }
  policy.validate();
  return policy;
}

AugPolicy load_policy(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open policy file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_policy_json(buf.str());
}

std::string policy_to_json(const AugPolicy& policy) {
  nlohmann::json pool = nlohmann::json::array();
  for (PhotoGeoKind k : policy.photo_geo_pool) pool.push_back(photo_geo_kind_name(k));
  nlohmann::json tpool = nlohmann::json::array();
  for (TemporalKind k : policy.temporal_pool) tpool.push_back(temporal_kind_name(k));
  nlohmann::json weak{{"flip_prob", policy.weak.flip_prob},
                      {"scale_range", {policy.weak.scale_lo, policy.weak.scale_hi}}};
  if (policy.weak.crop_size) {
    weak["crop_size"] = {policy.weak.crop_size->first, policy.weak.crop_size->second};
  }
  nlohmann::json obj{{"mode", policy_mode_name(policy.mode)},
                     {"photo_geo_pool", pool},
                     {"temporal_pool", tpool},
                     {"alpha", policy.cross_cfg.alpha},
                     {"smoothing", policy.cross_cfg.smoothing},
                     {"cross_kind", cross_kind_name(policy.cross_kind)},
                     {"branch_prob", policy.branch_prob},
                     {"weak", weak}};
  return obj.dump(2);
}

VideoClip hflip(const VideoClip& clip) {
  VideoClip out = clip;
  for (uint32_t f = 0; f < clip.t; ++f) {
    for (uint32_t y = 0; y < clip.h; ++y) {
      for (uint32_t x = 0; x < clip.w; ++x) {
        for (uint32_t ch = 0; ch < clip.c; ++ch) {
          out.frames[out.index(f, y, x, ch)] = clip.at(f, y, clip.w - 1 - x, ch);
        }
      }
    }
  }
  return out;
}

VideoClip resize_nn(const VideoClip& clip, uint32_t out_h, uint32_t out_w) {
  if (out_h < 1 || out_w < 1) throw ValidationError("resize target must be positive");
  if (out_h == clip.h && out_w == clip.w) return clip;
  VideoClip out = VideoClip::make(clip.t, out_h, out_w, clip.c, clip.clip_id);
  for (uint32_t y = 0; y < out_h; ++y) {
    uint32_t sy = std::min<uint32_t>(
        clip.h - 1, uint32_t((y + 0.5) * clip.h / out_h));
    for (uint32_t x = 0; x < out_w; ++x) {
      uint32_t sx = std::min<uint32_t>(
          clip.w - 1, uint32_t((x + 0.5) * clip.w / out_w));
      for (uint32_t f = 0; f < clip.t; ++f) {
        for (uint32_t ch = 0; ch < clip.c; ++ch) {
          out.frames[out.index(f, y, x, ch)] = clip.at(f, sy, sx, ch);
        }
      }
    }
  }
  return out;
}

VideoClip crop(const VideoClip& clip, uint32_t y0, uint32_t x0, uint32_t out_h,
               uint32_t out_w) {
  if (y0 + out_h > clip.h || x0 + out_w > clip.w) {
    std::ostringstream os;
    os << "crop " << out_h << "x" << out_w << " at (" << y0 << "," << x0
       << ") exceeds frame " << clip.h << "x" << clip.w;
    throw ValidationError(os.str());
  }
  VideoClip out = VideoClip::make(clip.t, out_h, out_w, clip.c, clip.clip_id);
  for (uint32_t f = 0; f < clip.t; ++f) {
    for (uint32_t y = 0; y < out_h; ++y) {
      const uint8_t* src = clip.frames.data() + clip.index(f, y0 + y, x0, 0);
      uint8_t* dst = out.frames.data() + out.index(f, y, 0, 0);
      std::copy(src, src + size_t(out_w) * clip.c, dst);
    }
  }
  return out;
}

VideoClip weak_augment(const VideoClip& clip, const WeakAugConfig& cfg,
                       SeededRng& rng) {
  clip.validate();
  const auto [crop_h, crop_w] =
      cfg.crop_size.value_or(std::pair<uint32_t, uint32_t>{clip.h, clip.w});
  const bool flip = rng.bernoulli(cfg.flip_prob);
  const double scale = rng.uniform_real(cfg.scale_lo, cfg.scale_hi);
  const uint32_t sh = uint32_t(std::lround(clip.h * scale));
  const uint32_t sw = uint32_t(std::lround(clip.w * scale));
  if (sh < crop_h || sw < crop_w) {
    std::ostringstream os;
    os << "crop " << crop_h << "x" << crop_w << " does not fit scaled frame "
       << sh << "x" << sw;
    throw ValidationError(os.str());
  }
  const uint32_t y0 = uint32_t(rng.uniform_int(sh - crop_h + 1));
  const uint32_t x0 = uint32_t(rng.uniform_int(sw - crop_w + 1));
  VideoClip work = flip ? hflip(clip) : clip;
  work = resize_nn(work, sh, sw);
  if (y0 == 0 && x0 == 0 && crop_h == sh && crop_w == sw) return work;
  return crop(work, y0, x0, crop_h, crop_w);
}

namespace {

SoftLabel blend_labels(const SoftLabel& a, const SoftLabel& b, double lam) {
  SoftLabel out;
  out.probs.resize(a.size());
  for (size_t k = 0; k < a.size(); ++k) {
    out.probs[k] = lam * a.probs[k] + (1.0 - lam) * b.probs[k];
  }
  return out;
}

/// Cross-clip branch shared by the Alg-1 and cross-only modes.
std::vector<AugmentedItem> cross_mix_batch(const std::vector<VideoClip>& clips,
                                           const std::vector<HumanMask>& masks,
                                           const std::vector<SoftLabel>& labels,
                                           const AugPolicy& policy,
                                           SeededRng& rng) {
  const size_t n = clips.size();
  std::vector<AugmentedItem> out(n);
  switch (policy.cross_kind) {
    case CrossKind::kActorCutMix: {
      auto mixed = actor_cutmix_batch(clips, masks, labels, policy.cross_cfg);
      for (size_t i = 0; i < n; ++i) {
        out[i].clip = std::move(mixed[i].clip);
        out[i].label = std::move(mixed[i].label);
        out[i].lambda = mixed[i].lambda;
        out[i].partner_index = int32_t(n - 1 - i);
        out[i].cross = true;
      }
      return out;
    }
    case CrossKind::kCutMix: {
      const uint64_t base = rng.next_u64();
      for (size_t i = 0; i < n; ++i) labels[i].validate();
      parallel_for(n, [&](size_t i) {
        const size_t j = n - 1 - i;
        SeededRng item_rng(derive_seed(base, i));
        auto [clip, lam] = cutmix_pair(clips[i], clips[j], item_rng);
        out[i].clip = std::move(clip);
        out[i].label = blend_labels(labels[i], labels[j], lam);
        out[i].lambda = lam;
        out[i].partner_index = int32_t(j);
        out[i].cross = true;
      });
      return out;
    }
    case CrossKind::kBackgroundCutMix: {
      for (size_t i = 0; i < n; ++i) {
        const size_t j = n - 1 - i;
        auto [mixed, ignored] =
            background_cutmix_pair(clips[i], masks[i], clips[j], masks[j]);
        (void)ignored;
        out[i].clip = std::move(mixed);
        out[i].label = labels[i];
        out[i].lambda = 1.0;
        out[i].partner_index = int32_t(j);
        out[i].cross = true;
      }
      return out;
    }
  }
  throw ConfigError("unknown cross kind");
}

void require_cross_inputs(const std::vector<VideoClip>& clips,
                          const std::vector<HumanMask>& masks,
                          const AugPolicy& policy) {
  if (policy.cross_kind != CrossKind::kCutMix && masks.size() != clips.size()) {
    throw ConfigError("cross-clip augmentation drawn but masks are missing");
  }
}

}  // namespace

VideoClip intra_cascaded(const VideoClip& clip, const AugPolicy& policy,
                         SeededRng& rng) {
  auto [op1, op2] = sample_two_ops(policy.photo_geo_pool, rng);
  VideoClip out = apply_clip_coherent(clip, resolve(op1, rng));
  out = apply_clip_coherent(out, resolve(op2, rng));
  TemporalOp top = sample_temporal_op(policy.temporal_pool, rng);
  return apply_temporal(out, top, rng);
}

VideoClip intra_sample_one(const VideoClip& clip, const AugPolicy& policy,
                           SeededRng& rng) {
  if (rng.bernoulli(0.5)) {
    auto [op1, op2] = sample_two_ops(policy.photo_geo_pool, rng);
    VideoClip out = apply_clip_coherent(clip, resolve(op1, rng));
    return apply_clip_coherent(out, resolve(op2, rng));
  }
  TemporalOp top = sample_temporal_op(policy.temporal_pool, rng);
  return apply_temporal(clip, top, rng);
}

std::vector<AugmentedItem> strong_augment_batch(
    const std::vector<VideoClip>& clips, const std::vector<HumanMask>& masks,
    const std::vector<SoftLabel>& labels, const AugPolicy& policy,
    SeededRng& rng) {
  if (clips.empty()) throw ValidationError("empty batch");
  if (labels.size() != clips.size()) {
    throw ValidationError("clips and labels must have equal length");
  }
  const double p = rng.next_double();
  if (p > 1.0 - policy.branch_prob) {
    require_cross_inputs(clips, masks, policy);
    return cross_mix_batch(clips, masks, labels, policy, rng);
  }
  const uint64_t base = rng.next_u64();
  std::vector<AugmentedItem> out(clips.size());
  parallel_for(clips.size(), [&](size_t i) {
    SeededRng item_rng(derive_seed(base, i));
    out[i].clip = intra_cascaded(clips[i], policy, item_rng);
    out[i].label = labels[i];
  });
  return out;
}

std::vector<AugmentedItem> cascaded_intra_cross(
    const std::vector<VideoClip>& clips, const std::vector<HumanMask>& masks,
    const std::vector<SoftLabel>& labels, const AugPolicy& policy,
    SeededRng& rng) {
  if (clips.empty()) throw ValidationError("empty batch");
  require_cross_inputs(clips, masks, policy);
  const uint64_t base = rng.next_u64();
  std::vector<VideoClip> staged(clips.size());
  parallel_for(clips.size(), [&](size_t i) {
    SeededRng item_rng(derive_seed(base, i));
    staged[i] = intra_cascaded(clips[i], policy, item_rng);
  });
  return cross_mix_batch(staged, masks, labels, policy, rng);
}

std::vector<AugmentedItem> apply_policy_batch(
    const std::vector<VideoClip>& clips, const std::vector<HumanMask>& masks,
    const std::vector<SoftLabel>& labels, const AugPolicy& policy,
    SeededRng& rng) {
  policy.validate();
  if (clips.empty()) throw ValidationError("empty batch");
  if (labels.size() != clips.size()) {
    throw ValidationError("clips and labels must have equal length");
  }
  auto per_clip = [&](auto&& fn) {
    const uint64_t base = rng.next_u64();
    std::vector<AugmentedItem> out(clips.size());
    parallel_for(clips.size(), [&](size_t i) {
      SeededRng item_rng(derive_seed(base, i));
      out[i].clip = fn(clips[i], item_rng);
      out[i].label = labels[i];
    });
    return out;
  };
  switch (policy.mode) {
    case PolicyMode::kStrongAlg1:
      return strong_augment_batch(clips, masks, labels, policy, rng);
    case PolicyMode::kIntraCascaded:
      return per_clip([&](const VideoClip& clip, SeededRng& r) {
        return intra_cascaded(clip, policy, r);
      });
    case PolicyMode::kIntraSampleOne:
      return per_clip([&](const VideoClip& clip, SeededRng& r) {
        return intra_sample_one(clip, policy, r);
      });
    case PolicyMode::kCrossOnly:
      require_cross_inputs(clips, masks, policy);
      return cross_mix_batch(clips, masks, labels, policy, rng);
    case PolicyMode::kCascadedIntraCross:
      return cascaded_intra_cross(clips, masks, labels, policy, rng);
    case PolicyMode::kWeakOnly:
      return per_clip([&](const VideoClip& clip, SeededRng& r) {
        return weak_augment(clip, policy.weak, r);
      });
    case PolicyMode::kPerFrame:
      return per_clip([&](const VideoClip& clip, SeededRng& r) {
        auto [op1, op2] = sample_two_ops(policy.photo_geo_pool, r);
        VideoClip out = apply_clip_per_frame(clip, op1, r);
        return apply_clip_per_frame(out, op2, r);
      });
  }
  throw ConfigError("unknown policy mode");
}

}  // namespace vidaug

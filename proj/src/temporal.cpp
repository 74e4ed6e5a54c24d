#include "vidaug/temporal.hpp"

#include <cstring>

namespace vidaug {

namespace {

void copy_frame(const VideoClip& src, uint32_t from, VideoClip& dst, uint32_t to) {
  std::memcpy(dst.frame_ptr(to), src.frame_ptr(from), src.frame_size());
}

}  // namespace

const std::vector<TemporalKind>& full_temporal_pool() {
  static const std::vector<TemporalKind> pool = {
      TemporalKind::kIdentity, TemporalKind::kTHalf, TemporalKind::kTDrop,
      TemporalKind::kTReverse};
  return pool;
}

std::string temporal_kind_name(TemporalKind kind) {
  switch (kind) {
    case TemporalKind::kIdentity: return "identity";
    case TemporalKind::kTHalf: return "t_half";
    case TemporalKind::kTDrop: return "t_drop";
    case TemporalKind::kTReverse: return "t_reverse";
  }
  throw ValidationError("unknown temporal kind");
}

TemporalKind temporal_kind_from_name(const std::string& name) {
  for (TemporalKind kind : full_temporal_pool()) {
    if (temporal_kind_name(kind) == name) return kind;
  }
  throw ConfigError("unknown temporal op '" + name + "'");
}

VideoClip t_half(const VideoClip& clip) {
  clip.validate();
  if (clip.t < 2) {
    throw ValidationError("t_half needs at least 2 frames, got " +
                          std::to_string(clip.t));
  }
  const uint32_t keep = (clip.t + 1) / 2;
  VideoClip out = clip;
  for (uint32_t i = keep; i < clip.t; ++i) copy_frame(clip, i % keep, out, i);
  return out;
}

VideoClip t_drop(const VideoClip& clip, SeededRng& rng, double p) {
  clip.validate();
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ValidationError("t_drop probability must lie in [0,1]");
  }
  VideoClip out = clip;
  for (uint32_t i = 1; i < clip.t; ++i) {
    if (rng.bernoulli(p)) {
      std::memcpy(out.frame_ptr(i), out.frame_ptr(i - 1), out.frame_size());
    }
  }
  return out;
}

VideoClip t_reverse(const VideoClip& clip) {
  clip.validate();
  VideoClip out = clip;
  for (uint32_t i = 0; i < clip.t; ++i) copy_frame(clip, clip.t - 1 - i, out, i);
  return out;
}

TemporalOp sample_temporal_op(SeededRng& rng) {
  return sample_temporal_op(full_temporal_pool(), rng);
}

TemporalOp sample_temporal_op(const std::vector<TemporalKind>& pool,
                              SeededRng& rng) {
  if (pool.empty()) throw ConfigError("temporal op pool is empty");
  TemporalOp op;
  op.kind = pool[rng.uniform_int(pool.size())];
  op.drop_prob = 0.5;
  return op;
}

VideoClip apply_temporal(const VideoClip& clip, const TemporalOp& op,
                         SeededRng& rng) {
  switch (op.kind) {
    case TemporalKind::kIdentity: return clip;
    case TemporalKind::kTHalf: return t_half(clip);
    case TemporalKind::kTDrop: return t_drop(clip, rng, op.drop_prob);
    case TemporalKind::kTReverse: return t_reverse(clip);
  }
  throw ValidationError("unknown temporal kind");
}

}  // namespace vidaug

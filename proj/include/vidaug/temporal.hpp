#pragma once

#include <string>
#include <vector>

#include "vidaug/clip.hpp"
#include "vidaug/rng.hpp"

namespace vidaug {

enum class TemporalKind { kIdentity, kTHalf, kTDrop, kTReverse };

struct TemporalOp {
  TemporalKind kind = TemporalKind::kIdentity;
  double drop_prob = 0.5;  // used by kTDrop only
};

const std::vector<TemporalKind>& full_temporal_pool();
std::string temporal_kind_name(TemporalKind kind);
TemporalKind temporal_kind_from_name(const std::string& name);

/// Keeps the first ceil(t/2) frames and fills the remaining slots
/// cyclically from that prefix: output frame i = input frame i mod
/// ceil(t/2). Frame count is unchanged. Requires t >= 2.
VideoClip t_half(const VideoClip& clip);

/// Scans frames left to right; each frame i >= 1 is replaced by the
/// previous *output* frame with probability p, so a run of drops freezes
/// the last kept frame. Frame 0 is always kept. One Bernoulli draw per
/// frame i = 1..t-1, in order.
VideoClip t_drop(const VideoClip& clip, SeededRng& rng, double p = 0.5);

/// Output frame i = input frame t-1-i.
VideoClip t_reverse(const VideoClip& clip);

/// Uniform draw over {identity, t_half, t_drop, t_reverse}; a drawn
/// t_drop carries drop_prob = 0.5.
TemporalOp sample_temporal_op(SeededRng& rng);
TemporalOp sample_temporal_op(const std::vector<TemporalKind>& pool,
                              SeededRng& rng);

VideoClip apply_temporal(const VideoClip& clip, const TemporalOp& op,
                         SeededRng& rng);

}  // namespace vidaug

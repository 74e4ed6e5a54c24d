#include "vidaug/clip.hpp"

#include <cmath>
#include <sstream>

namespace vidaug {

VideoClip VideoClip::make(uint32_t t, uint32_t h, uint32_t w, uint32_t c,
                          std::string clip_id) {
  VideoClip clip;
  clip.t = t;
  clip.h = h;
  clip.w = w;
  clip.c = c;
  clip.clip_id = std::move(clip_id);
  clip.frames.assign(size_t(t) * h * w * c, 0);
  clip.validate();
  return clip;
}

void VideoClip::validate() const {
  if (t < 1 || h < 1 || w < 1) {
    std::ostringstream os;
    os << "clip dims must be positive, got t=" << t << " h=" << h << " w=" << w;
    throw ValidationError(os.str());
  }
  if (c != 1 && c != 3) {
    throw ValidationError("channel count must be 1 or 3, got " + std::to_string(c));
  }
  if (frames.size() != pixel_count()) {
    std::ostringstream os;
    os << "payload size " << frames.size() << " does not match dims (expected "
       << pixel_count() << ")";
    throw ValidationError(os.str());
  }
}

bool same_pixels(const VideoClip& a, const VideoClip& b) {
  return a.t == b.t && a.h == b.h && a.w == b.w && a.c == b.c &&
         a.frames == b.frames;
}

SoftLabel SoftLabel::one_hot(size_t k_classes, size_t index) {
  SoftLabel label;
  label.probs.assign(k_classes, 0.0);
  label.probs.at(index) = 1.0;
  return label;
}

void SoftLabel::validate() const {
  if (probs.size() < 2) {
    throw ValidationError("soft label needs K >= 2 classes, got " +
                          std::to_string(probs.size()));
  }
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw ValidationError("soft label entry is negative or NaN");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ValidationError("soft label entries sum to " + std::to_string(sum) +
                          ", expected 1");
  }
}

void BoxTrack::validate_against(uint32_t t, uint32_t h, uint32_t w) const {
  for (size_t i = 0; i < boxes.size(); ++i) {
    const Box& b = boxes[i];
    std::ostringstream os;
    os << "box " << i << " of clip '" << clip_id << "' ";
    if (b.frame >= t) {
      os << "has frame " << b.frame << " outside [0," << t << ")";
      throw ValidationError(os.str());
    }
    if (!(0 <= b.x0 && b.x0 < b.x1 && b.x1 <= int32_t(w))) {
      os << "has x range [" << b.x0 << "," << b.x1 << ") outside [0," << w << "]";
      throw ValidationError(os.str());
    }
    if (!(0 <= b.y0 && b.y0 < b.y1 && b.y1 <= int32_t(h))) {
      os << "has y range [" << b.y0 << "," << b.y1 << ") outside [0," << h << "]";
      throw ValidationError(os.str());
    }
    if (!(b.score >= 0.0 && b.score <= 1.0)) {
      os << "has score " << b.score << " outside [0,1]";
      throw ValidationError(os.str());
    }
  }
}

HumanMask HumanMask::zeros(uint32_t t, uint32_t h, uint32_t w) {
  HumanMask m;
  m.t = t;
  m.h = h;
  m.w = w;
  m.mask.assign(size_t(t) * h * w, 0);
  return m;
}

void HumanMask::validate() const {
  if (t < 1 || h < 1 || w < 1) throw ValidationError("mask dims must be positive");
  if (mask.size() != voxels()) throw ValidationError("mask payload size mismatch");
  for (uint8_t v : mask) {
    if (v > 1) throw ValidationError("mask values must be 0 or 1");
  }
}

HumanMask rasterize_masks(const BoxTrack& boxes, uint32_t t, uint32_t h,
                          uint32_t w, double score_threshold) {
  if (!(score_threshold >= 0.0 && score_threshold <= 1.0)) {
    throw ValidationError("score threshold must lie in [0,1]");
  }
  boxes.validate_against(t, h, w);
  HumanMask m = HumanMask::zeros(t, h, w);
  for (const BoxTrack::Box& b : boxes.boxes) {
    if (b.score < score_threshold) continue;
    for (int32_t y = b.y0; y < b.y1; ++y) {
      uint8_t* row = m.mask.data() + (size_t(b.frame) * h + y) * w;
      for (int32_t x = b.x0; x < b.x1; ++x) row[x] = 1;
    }
  }
  return m;
}

double foreground_ratio(const HumanMask& mask) {
  size_t ones = 0;
  for (uint8_t v : mask.mask) ones += v;
  return static_cast<double>(ones) / static_cast<double>(mask.voxels());
}

}  // namespace vidaug

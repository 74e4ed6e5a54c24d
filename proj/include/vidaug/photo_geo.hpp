#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "vidaug/clip.hpp"
#include "vidaug/rng.hpp"

namespace vidaug {

/// The 14-operation pool. magnitude in [0,1] maps to each kind's physical
/// range (see the table in the README):
///
///   Rotate            angle  = sign * 30 * magnitude degrees
///   ShearX/ShearY     shear  = sign * 0.3 * magnitude
///   TranslateX/Y      offset = sign * 0.3 * magnitude * dim pixels
///   Brightness/Contrast/ColorSaturation/Sharpness
///                     factor = 1 + sign * magnitude   (0 = degenerate,
///                     1 = identity, 2 = doubled effect)
///   Solarize          threshold = 256 * (1 - magnitude)
///   Posterize         bits = 8 - round(4 * magnitude), in [4,8]
///   Identity/AutoContrast/Equalize   no parameter
enum class PhotoGeoKind {
  kIdentity,
  kAutoContrast,
  kEqualize,
  kRotate,
  kSolarize,
  kPosterize,
  kColorSaturation,
  kContrast,
  kBrightness,
  kSharpness,
  kShearX,
  kShearY,
  kTranslateX,
  kTranslateY,
};

/// All fourteen kinds, in enum order.
const std::vector<PhotoGeoKind>& full_photo_geo_pool();

bool is_signed_kind(PhotoGeoKind kind);
bool is_geometric_kind(PhotoGeoKind kind);
std::string photo_geo_kind_name(PhotoGeoKind kind);
PhotoGeoKind photo_geo_kind_from_name(const std::string& name);

struct PhotoGeoOp {
  PhotoGeoKind kind = PhotoGeoKind::kIdentity;
  double magnitude = 0.0;  // in [0,1]
};

/// An op with its randomness frozen. param already includes the sign:
/// angle in degrees for Rotate, shear/translate fraction, enhancement
/// factor, solarize threshold, or posterize bit count. Translate offsets
/// are resolved to pixels at apply time (param * dim), which keeps the
/// same physical shift on every frame of a clip.
struct ResolvedOp {
  PhotoGeoKind kind = PhotoGeoKind::kIdentity;
  int sign = 1;
  double param = 0.0;
};

/// Consumes one sign draw for signed kinds; everything downstream of the
/// returned op is deterministic.
ResolvedOp resolve(const PhotoGeoOp& op, SeededRng& rng);

/// Transforms one frame. src and dst are h*w*c buffers and must not alias.
/// Geometric kinds fill vacated pixels with mid-gray (128); resampling is
/// nearest-neighbor.
void apply_frame(const uint8_t* src, uint8_t* dst, uint32_t h, uint32_t w,
                 uint32_t c, const ResolvedOp& rop);

/// Same resolved op applied to every frame (temporally coherent).
VideoClip apply_clip_coherent(const VideoClip& clip, const ResolvedOp& rop);

/// Ablation baseline: re-resolves the op's randomness independently for
/// each frame.
VideoClip apply_clip_per_frame(const VideoClip& clip, const PhotoGeoOp& op,
                               SeededRng& rng);

/// Two uniform draws from the pool, with replacement, each with a fresh
/// magnitude from U[0,1). Draw order: kind1, magnitude1, kind2, magnitude2.
std::pair<PhotoGeoOp, PhotoGeoOp> sample_two_ops(
    const std::vector<PhotoGeoKind>& pool, SeededRng& rng);

}  // namespace vidaug

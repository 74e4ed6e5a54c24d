#include "vidaug/photo_geo.hpp"

#include <array>
#include <cmath>
#include <cstring>

#include "vidaug/util.hpp"

namespace vidaug {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr uint8_t kFill = 128;  // mid-gray for vacated pixels

double luma(const uint8_t* px, uint32_t c) {
  if (c == 1) return px[0];
  return 0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2];
}

void apply_lut(const uint8_t* src, uint8_t* dst, size_t n,
               const std::array<uint8_t, 256>& lut) {
  for (size_t i = 0; i < n; ++i) dst[i] = lut[src[i]];
}

void kernel_brightness(const uint8_t* src, uint8_t* dst, size_t n, double factor) {
  std::array<uint8_t, 256> lut;
  for (int v = 0; v < 256; ++v) lut[v] = to_u8(factor * v);
  apply_lut(src, dst, n, lut);
}

void kernel_contrast(const uint8_t* src, uint8_t* dst, uint32_t h, uint32_t w,
                     uint32_t c, double factor) {
  // Pivot around the frame's mean luma.
  const size_t pixels = size_t(h) * w;
  double mean = 0.0;
  for (size_t i = 0; i < pixels; ++i) mean += luma(src + i * c, c);
  mean /= double(pixels);
  std::array<uint8_t, 256> lut;
  for (int v = 0; v < 256; ++v) lut[v] = to_u8(mean + factor * (v - mean));
  apply_lut(src, dst, pixels * c, lut);
}

void kernel_color(const uint8_t* src, uint8_t* dst, uint32_t h, uint32_t w,
                  uint32_t c, double factor) {
  if (c == 1) {  // saturation is undefined on grayscale
    std::memcpy(dst, src, size_t(h) * w);
    return;
  }
  const size_t pixels = size_t(h) * w;
  for (size_t i = 0; i < pixels; ++i) {
    const uint8_t* p = src + i * 3;
    double gray = luma(p, 3);
    for (uint32_t ch = 0; ch < 3; ++ch) {
      dst[i * 3 + ch] = to_u8(gray + factor * (p[ch] - gray));
    }
  }
}

void kernel_sharpness(const uint8_t* src, uint8_t* dst, uint32_t h, uint32_t w,
                      uint32_t c, double factor) {
  const size_t n = size_t(h) * w * c;
  if (h < 3 || w < 3) {
    std::memcpy(dst, src, n);
    return;
  }
  // Blend against a 3x3 smoothing of the frame (weights 1 around a 5
  // center, /13); border pixels are left untouched by the smoothing.
  std::memcpy(dst, src, n);
  for (uint32_t y = 1; y + 1 < h; ++y) {
    for (uint32_t x = 1; x + 1 < w; ++x) {
      for (uint32_t ch = 0; ch < c; ++ch) {
        double acc = 0.0;
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            double wgt = (dy == 0 && dx == 0) ? 5.0 : 1.0;
            acc += wgt * src[((y + dy) * size_t(w) + (x + dx)) * c + ch];
          }
        }
        double smooth = acc / 13.0;
        double orig = src[(y * size_t(w) + x) * c + ch];
        dst[(y * size_t(w) + x) * c + ch] = to_u8(smooth + factor * (orig - smooth));
      }
    }
  }
}

void kernel_solarize(const uint8_t* src, uint8_t* dst, size_t n, double threshold) {
  std::array<uint8_t, 256> lut;
  for (int v = 0; v < 256; ++v) {
    lut[v] = (v >= threshold) ? uint8_t(255 - v) : uint8_t(v);
  }
  apply_lut(src, dst, n, lut);
}

void kernel_posterize(const uint8_t* src, uint8_t* dst, size_t n, int bits) {
  const uint8_t keep = uint8_t(0xFF << (8 - bits));
  for (size_t i = 0; i < n; ++i) dst[i] = src[i] & keep;
}

void kernel_autocontrast(const uint8_t* src, uint8_t* dst, uint32_t h,
                         uint32_t w, uint32_t c) {
  const size_t pixels = size_t(h) * w;
  for (uint32_t ch = 0; ch < c; ++ch) {
    uint8_t lo = 255, hi = 0;
    for (size_t i = 0; i < pixels; ++i) {
      uint8_t v = src[i * c + ch];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    std::array<uint8_t, 256> lut;
    if (hi <= lo) {
      for (int v = 0; v < 256; ++v) lut[v] = uint8_t(v);
    } else {
      double scale = 255.0 / (hi - lo);
      for (int v = 0; v < 256; ++v) lut[v] = to_u8((v - lo) * scale);
    }
    for (size_t i = 0; i < pixels; ++i) dst[i * c + ch] = lut[src[i * c + ch]];
  }
}

void kernel_equalize(const uint8_t* src, uint8_t* dst, uint32_t h, uint32_t w,
                     uint32_t c) {
  const size_t pixels = size_t(h) * w;
  for (uint32_t ch = 0; ch < c; ++ch) {
    std::array<uint64_t, 256> hist{};
    for (size_t i = 0; i < pixels; ++i) hist[src[i * c + ch]]++;
    int last = 255;
    while (last > 0 && hist[last] == 0) --last;
    uint64_t step = (pixels - hist[last]) / 255;
    std::array<uint8_t, 256> lut;
    if (step == 0) {
      for (int v = 0; v < 256; ++v) lut[v] = uint8_t(v);
    } else {
      uint64_t n = step / 2;
      for (int v = 0; v < 256; ++v) {
        lut[v] = uint8_t(std::min<uint64_t>(255, n / step));
        n += hist[v];
      }
    }
    for (size_t i = 0; i < pixels; ++i) dst[i * c + ch] = lut[src[i * c + ch]];
  }
}

/// Shared inverse-mapped resampler for the geometric kinds. map(x, y) must
/// return the source coordinates for output pixel (x, y); out-of-bounds
/// sources become mid-gray.
template <typename MapFn>
void inverse_map(const uint8_t* src, uint8_t* dst, uint32_t h, uint32_t w,
                 uint32_t c, MapFn map) {
  for (uint32_t y = 0; y < h; ++y) {
    for (uint32_t x = 0; x < w; ++x) {
      auto [sx, sy] = map(double(x), double(y));
      int64_t ix = int64_t(round_half_even(sx));
      int64_t iy = int64_t(round_half_even(sy));
      uint8_t* out = dst + (size_t(y) * w + x) * c;
      if (ix < 0 || ix >= int64_t(w) || iy < 0 || iy >= int64_t(h)) {
        for (uint32_t ch = 0; ch < c; ++ch) out[ch] = kFill;
      } else {
        const uint8_t* in = src + (size_t(iy) * w + ix) * c;
        for (uint32_t ch = 0; ch < c; ++ch) out[ch] = in[ch];
      }
    }
  }
}

}  // namespace

const std::vector<PhotoGeoKind>& full_photo_geo_pool() {
  static const std::vector<PhotoGeoKind> pool = {
      PhotoGeoKind::kIdentity,     PhotoGeoKind::kAutoContrast,
      PhotoGeoKind::kEqualize,     PhotoGeoKind::kRotate,
      PhotoGeoKind::kSolarize,     PhotoGeoKind::kPosterize,
      PhotoGeoKind::kColorSaturation, PhotoGeoKind::kContrast,
      PhotoGeoKind::kBrightness,   PhotoGeoKind::kSharpness,
      PhotoGeoKind::kShearX,       PhotoGeoKind::kShearY,
      PhotoGeoKind::kTranslateX,   PhotoGeoKind::kTranslateY,
  };
  return pool;
}

bool is_signed_kind(PhotoGeoKind kind) {
  switch (kind) {
    case PhotoGeoKind::kRotate:
    case PhotoGeoKind::kColorSaturation:
    case PhotoGeoKind::kContrast:
    case PhotoGeoKind::kBrightness:
    case PhotoGeoKind::kSharpness:
    case PhotoGeoKind::kShearX:
    case PhotoGeoKind::kShearY:
    case PhotoGeoKind::kTranslateX:
    case PhotoGeoKind::kTranslateY:
      return true;
    default:
      return false;
  }
}

bool is_geometric_kind(PhotoGeoKind kind) {
  switch (kind) {
    case PhotoGeoKind::kRotate:
    case PhotoGeoKind::kShearX:
    case PhotoGeoKind::kShearY:
    case PhotoGeoKind::kTranslateX:
    case PhotoGeoKind::kTranslateY:
      return true;
    default:
      return false;
  }
}

std::string photo_geo_kind_name(PhotoGeoKind kind) {
  switch (kind) {
    case PhotoGeoKind::kIdentity: return "identity";
    case PhotoGeoKind::kAutoContrast: return "auto_contrast";
    case PhotoGeoKind::kEqualize: return "equalize";
    case PhotoGeoKind::kRotate: return "rotate";
    case PhotoGeoKind::kSolarize: return "solarize";
    case PhotoGeoKind::kPosterize: return "posterize";
    case PhotoGeoKind::kColorSaturation: return "color_saturation";
    case PhotoGeoKind::kContrast: return "contrast";
    case PhotoGeoKind::kBrightness: return "brightness";
    case PhotoGeoKind::kSharpness: return "sharpness";
    case PhotoGeoKind::kShearX: return "shear_x";
    case PhotoGeoKind::kShearY: return "shear_y";
    case PhotoGeoKind::kTranslateX: return "translate_x";
    case PhotoGeoKind::kTranslateY: return "translate_y";
  }
  throw ValidationError("unknown photo-geo kind");
}

PhotoGeoKind photo_geo_kind_from_name(const std::string& name) {
  for (PhotoGeoKind kind : full_photo_geo_pool()) {
    if (photo_geo_kind_name(kind) == name) return kind;
  }
  throw ConfigError("unknown photo-geo op '" + name + "'");
}

ResolvedOp resolve(const PhotoGeoOp& op, SeededRng& rng) {
  if (!(op.magnitude >= 0.0 && op.magnitude <= 1.0)) {
    throw ValidationError("op magnitude must lie in [0,1]");
  }
  ResolvedOp rop;
  rop.kind = op.kind;
  rop.sign = is_signed_kind(op.kind) ? rng.sign() : 1;
  const double m = op.magnitude;
  switch (op.kind) {
    case PhotoGeoKind::kRotate:
      rop.param = rop.sign * 30.0 * m;
      break;
    case PhotoGeoKind::kShearX:
    case PhotoGeoKind::kShearY:
    case PhotoGeoKind::kTranslateX:
    case PhotoGeoKind::kTranslateY:
      rop.param = rop.sign * 0.3 * m;
      break;
    case PhotoGeoKind::kColorSaturation:
    case PhotoGeoKind::kContrast:
    case PhotoGeoKind::kBrightness:
    case PhotoGeoKind::kSharpness:
      rop.param = 1.0 + rop.sign * m;
      break;
    case PhotoGeoKind::kSolarize:
      rop.param = 256.0 * (1.0 - m);
      break;
    case PhotoGeoKind::kPosterize:
      rop.param = 8.0 - round_half_even(4.0 * m);
      break;
    case PhotoGeoKind::kIdentity:
    case PhotoGeoKind::kAutoContrast:
    case PhotoGeoKind::kEqualize:
      rop.param = 0.0;
      break;
  }
  return rop;
}

void apply_frame(const uint8_t* src, uint8_t* dst, uint32_t h, uint32_t w,
                 uint32_t c, const ResolvedOp& rop) {
  const size_t n = size_t(h) * w * c;
  switch (rop.kind) {
    case PhotoGeoKind::kIdentity:
      std::memcpy(dst, src, n);
      return;
    case PhotoGeoKind::kBrightness:
      kernel_brightness(src, dst, n, rop.param);
      return;
    case PhotoGeoKind::kContrast:
      kernel_contrast(src, dst, h, w, c, rop.param);
      return;
    case PhotoGeoKind::kColorSaturation:
      kernel_color(src, dst, h, w, c, rop.param);
      return;
    case PhotoGeoKind::kSharpness:
      kernel_sharpness(src, dst, h, w, c, rop.param);
      return;
    case PhotoGeoKind::kSolarize:
      kernel_solarize(src, dst, n, rop.param);
      return;
    case PhotoGeoKind::kPosterize:
      kernel_posterize(src, dst, n, int(rop.param));
      return;
    case PhotoGeoKind::kAutoContrast:
      kernel_autocontrast(src, dst, h, w, c);
      return;
    case PhotoGeoKind::kEqualize:
      kernel_equalize(src, dst, h, w, c);
      return;
    case PhotoGeoKind::kRotate: {
      // Inverse rotation about the frame center.
      const double rad = rop.param * kPi / 180.0;
      const double cs = std::cos(rad), sn = std::sin(rad);
      const double cx = (w - 1) / 2.0, cy = (h - 1) / 2.0;
      inverse_map(src, dst, h, w, c, [&](double x, double y) {
        double dx = x - cx, dy = y - cy;
        return std::pair<double, double>{cs * dx + sn * dy + cx,
                                         -sn * dx + cs * dy + cy};
      });
      return;
    }
    case PhotoGeoKind::kShearX:
      inverse_map(src, dst, h, w, c, [&](double x, double y) {
        return std::pair<double, double>{x + rop.param * y, y};
      });
      return;
    case PhotoGeoKind::kShearY:
      inverse_map(src, dst, h, w, c, [&](double x, double y) {
        return std::pair<double, double>{x, y + rop.param * x};
      });
      return;
    case PhotoGeoKind::kTranslateX: {
      // Positive param shifts content toward +x.
      const double dx = round_half_even(rop.param * w);
      inverse_map(src, dst, h, w, c, [&](double x, double y) {
        return std::pair<double, double>{x - dx, y};
      });
      return;
    }
    case PhotoGeoKind::kTranslateY: {
      const double dy = round_half_even(rop.param * h);
      inverse_map(src, dst, h, w, c, [&](double x, double y) {
        return std::pair<double, double>{x, y - dy};
      });
      return;
    }
  }
}

VideoClip apply_clip_coherent(const VideoClip& clip, const ResolvedOp& rop) {
  clip.validate();
  VideoClip out = clip;
  for (uint32_t f = 0; f < clip.t; ++f) {
    apply_frame(clip.frame_ptr(f), out.frame_ptr(f), clip.h, clip.w, clip.c, rop);
  }
  return out;
}

VideoClip apply_clip_per_frame(const VideoClip& clip, const PhotoGeoOp& op,
                               SeededRng& rng) {
  clip.validate();
  VideoClip out = clip;
  for (uint32_t f = 0; f < clip.t; ++f) {
    ResolvedOp rop = resolve(op, rng);
    apply_frame(clip.frame_ptr(f), out.frame_ptr(f), clip.h, clip.w, clip.c, rop);
  }
  return out;
}

std::pair<PhotoGeoOp, PhotoGeoOp> sample_two_ops(
    const std::vector<PhotoGeoKind>& pool, SeededRng& rng) {
  if (pool.empty()) throw ConfigError("photo-geo op pool is empty");
  PhotoGeoOp a{pool[rng.uniform_int(pool.size())], rng.next_double()};
  PhotoGeoOp b{pool[rng.uniform_int(pool.size())], rng.next_double()};
  return {a, b};
}

}  // namespace vidaug

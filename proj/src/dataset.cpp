#include "vidaug/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "vidaug/io.hpp"
#include "vidaug/rng.hpp"
#include "vidaug/util.hpp"

namespace vidaug {

namespace {

struct Rgb {
  uint8_t r, g, b;
};

// Well-separated mid-range base colors; texture index selects one (mod 8).
constexpr Rgb kPalette[8] = {
    {170, 60, 60}, {60, 170, 60}, {60, 60, 170},   {170, 170, 60},
    {170, 60, 170}, {60, 170, 170}, {150, 150, 150}, {100, 130, 40},
};

constexpr uint8_t kActorValue = 240;

uint8_t gray_of(Rgb c) {
  return to_u8(0.299 * c.r + 0.587 * c.g + 0.114 * c.b);
}

void render_texture(VideoClip& clip, int texture, int jitter) {
  const Rgb base = kPalette[texture % 8];
  // Stripe orientation cycles with the texture index.
  const int ox = (texture % 4 == 0) ? 1 : (texture % 4 == 1) ? 0 : 1;
  const int oy = (texture % 4 == 0) ? 0 : (texture % 4 == 1) ? 1 : (texture % 4 == 2) ? 1 : -1;
  for (uint32_t y = 0; y < clip.h; ++y) {
    for (uint32_t x = 0; x < clip.w; ++x) {
      const int band = ((int(x) * ox + int(y) * oy) / 4) & 1;
      const int delta = (band ? 18 : -18) + jitter;
      uint8_t px[3] = {to_u8(base.r + delta), to_u8(base.g + delta),
                       to_u8(base.b + delta)};
      for (uint32_t f = 0; f < clip.t; ++f) {
        if (clip.c == 1) {
          clip.frames[clip.index(f, y, x, 0)] =
              to_u8(gray_of({px[0], px[1], px[2]}));
        } else {
          for (uint32_t ch = 0; ch < 3; ++ch) {
            clip.frames[clip.index(f, y, x, ch)] = px[ch];
          }
        }
      }
    }
  }
}

/// Class k encodes (axis, speed): axis = k % 4 out of horizontal,
/// vertical and the two diagonals; k < 4 moves slowly, k >= 4 fast.
void motion_for_class(uint32_t k, double* dx, double* dy, double* speed) {
  constexpr double kDiag = 0.70710678118654752440;
  switch (k % 4) {
    case 0: *dx = 1.0; *dy = 0.0; break;
    case 1: *dx = 0.0; *dy = 1.0; break;
    case 2: *dx = kDiag; *dy = kDiag; break;
    default: *dx = -kDiag; *dy = kDiag; break;
  }
  *speed = (k % 8 < 4) ? 1.5 : 4.5;
}

DatasetItem make_clip(const SyntheticDatasetSpec& spec, uint32_t cls,
                      double bias, const std::string& clip_id, SeededRng& rng) {
  DatasetItem item;
  item.label = int(cls);

  // Background texture draw.
  if (rng.bernoulli(bias)) {
    item.texture = int(cls);
  } else {
    uint32_t other = uint32_t(rng.uniform_int(spec.k_classes - 1));
    item.texture = int(other >= cls ? other + 1 : other);
  }
  const int jitter = int(rng.uniform_int(21)) - 10;

  item.clip = VideoClip::make(spec.t, spec.h, spec.w, spec.c, clip_id);
  render_texture(item.clip, item.texture, jitter);

  // Actor trajectory: class axis and speed, random direction sign and
  // start offset, reflecting at the frame borders.
  double dx, dy, speed;
  motion_for_class(cls, &dx, &dy, &speed);
  const int sign = rng.sign();
  dx *= sign * speed;
  dy *= sign * speed;
  const double half = (spec.actor_size - 1) / 2.0;
  const double lo_x = half, hi_x = spec.w - 1 - half;
  const double lo_y = half, hi_y = spec.h - 1 - half;
  double px = spec.w / 2.0 + double(int(rng.uniform_int(11)) - 5);
  double py = spec.h / 2.0 + double(int(rng.uniform_int(11)) - 5);
  px = std::clamp(px, lo_x, hi_x);
  py = std::clamp(py, lo_y, hi_y);

  item.boxes.clip_id = clip_id;
  for (uint32_t f = 0; f < spec.t; ++f) {
    const int cx = int(round_half_even(px));
    const int cy = int(round_half_even(py));
    const int x0 = std::max(0, cx - int(half));
    const int y0 = std::max(0, cy - int(half));
    const int x1 = std::min<int>(spec.w, cx + int(half) + 1);
    const int y1 = std::min<int>(spec.h, cy + int(half) + 1);
    for (int y = y0; y < y1; ++y) {
      for (int x = x0; x < x1; ++x) {
        for (uint32_t ch = 0; ch < spec.c; ++ch) {
          item.clip.frames[item.clip.index(f, y, x, ch)] = kActorValue;
        }
      }
    }
    BoxTrack::Box box;
    box.frame = f;
    box.x0 = std::max(0, x0 - int(spec.box_pad));
    box.y0 = std::max(0, y0 - int(spec.box_pad));
    box.x1 = std::min<int>(spec.w, x1 + int(spec.box_pad));
    box.y1 = std::min<int>(spec.h, y1 + int(spec.box_pad));
    box.score = 1.0;
    item.boxes.boxes.push_back(box);

    px += dx;
    py += dy;
    if (px < lo_x) { px = 2 * lo_x - px; dx = -dx; }
    if (px > hi_x) { px = 2 * hi_x - px; dx = -dx; }
    if (py < lo_y) { py = 2 * lo_y - py; dy = -dy; }
    if (py > hi_y) { py = 2 * hi_y - py; dy = -dy; }
  }
  return item;
}

Dataset make_split(const SyntheticDatasetSpec& spec, uint32_t per_class,
                   double bias, const std::string& prefix, SeededRng& rng) {
  Dataset split;
  split.reserve(size_t(per_class) * spec.k_classes);
  uint32_t index = 0;
  for (uint32_t cls = 0; cls < spec.k_classes; ++cls) {
    for (uint32_t i = 0; i < per_class; ++i, ++index) {
      char id[32];
      std::snprintf(id, sizeof(id), "%s_%05u", prefix.c_str(), index);
      split.push_back(make_clip(spec, cls, bias, id, rng));
    }
  }
  return split;
}

}  // namespace

void SyntheticDatasetSpec::validate() const {
  if (k_classes < 2) throw ValidationError("need at least 2 classes");
  if (t < 1) throw ValidationError("need at least one frame");
  if (c != 1 && c != 3) throw ValidationError("channels must be 1 or 3");
  if (!(scene_bias >= 0.0 && scene_bias <= 1.0)) {
    throw ValidationError("scene_bias must lie in [0,1]");
  }
  if (actor_size < 1 || actor_size >= h || actor_size >= w) {
    throw ValidationError("actor does not fit the frame");
  }
  if (labeled_per_class < 1) throw ValidationError("labeled split is empty");
}

SyntheticBundle generate_synthetic(const SyntheticDatasetSpec& spec) {
  spec.validate();
  const double test_bias =
      spec.test_bias < 0.0 ? 1.0 / spec.k_classes : spec.test_bias;
  SeededRng rng(spec.seed);
  SyntheticBundle bundle;
  bundle.k_classes = spec.k_classes;
  bundle.labeled = make_split(spec, spec.labeled_per_class, spec.scene_bias, "lab", rng);
  bundle.unlabeled =
      make_split(spec, spec.unlabeled_per_class, spec.scene_bias, "unl", rng);
  bundle.test_biased =
      make_split(spec, spec.test_per_class, spec.scene_bias, "tsb", rng);
  bundle.test_decorrelated =
      make_split(spec, spec.test_per_class, test_bias, "tsd", rng);
  return bundle;
}

void save_dataset_dir(const Dataset& dataset, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir + "'");
  std::vector<std::pair<std::string, int>> labels;
  std::map<std::string, BoxTrack> tracks;
  for (const DatasetItem& item : dataset) {
    save_clip(item.clip, (std::filesystem::path(dir) / (item.clip.clip_id + ".vclip")).string());
    labels.emplace_back(item.clip.clip_id, item.label);
    if (!item.boxes.boxes.empty()) tracks[item.clip.clip_id] = item.boxes;
  }
  save_label_file(labels, (std::filesystem::path(dir) / "labels.csv").string());
  save_box_file(tracks, (std::filesystem::path(dir) / "boxes.jsonl").string());
}

Dataset load_dataset_dir(const std::string& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw IoError("'" + dir + "' is not a directory");
  }
  std::vector<std::string> clip_paths;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() == ".vclip") {
      clip_paths.push_back(entry.path().string());
    }
  }
  std::sort(clip_paths.begin(), clip_paths.end());
  if (clip_paths.empty()) throw IoError("no .vclip files in '" + dir + "'");

  auto labels = load_label_file((std::filesystem::path(dir) / "labels.csv").string());
  std::map<std::string, BoxTrack> tracks;
  const std::string box_path = (std::filesystem::path(dir) / "boxes.jsonl").string();
  if (std::filesystem::exists(box_path)) tracks = load_box_file(box_path);

  Dataset dataset;
  dataset.reserve(clip_paths.size());
  for (const std::string& path : clip_paths) {
    DatasetItem item;
    item.clip = load_clip(path);
    auto it = labels.find(item.clip.clip_id);
    if (it == labels.end()) {
      throw ValidationError("clip '" + item.clip.clip_id +
                            "' missing from labels.csv");
    }
    item.label = it->second;
    auto track = tracks.find(item.clip.clip_id);
    if (track != tracks.end()) {
      item.boxes = track->second;
      item.boxes.validate_against(item.clip.t, item.clip.h, item.clip.w);
    } else {
      item.boxes.clip_id = item.clip.clip_id;
    }
    dataset.push_back(std::move(item));
  }
  return dataset;
}

uint32_t dataset_num_classes(const Dataset& dataset) {
  int max_label = -1;
  for (const DatasetItem& item : dataset) {
    max_label = std::max(max_label, item.label);
  }
  return uint32_t(max_label + 1);
}

}  // namespace vidaug

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vidaug/clip.hpp"

namespace vidaug {

struct DatasetItem {
  VideoClip clip;
  int label = 0;
  BoxTrack boxes;
  int texture = -1;  // generator metadata; not persisted
};

using Dataset = std::vector<DatasetItem>;

/// Scene-biased synthetic data: one bright square whose motion pattern
/// (axis and speed) determines the class, composited over a textured
/// background. With probability scene_bias the background texture is the
/// class-assigned one, otherwise a uniform draw over the other K-1
/// textures; test_bias < 0 selects 1/K, which makes texture and class
/// independent. The square's bounding box, padded by box_pad, is emitted
/// as the cached detector track.
struct SyntheticDatasetSpec {
  uint32_t k_classes = 8;
  uint32_t t = 8, h = 32, w = 32, c = 3;
  uint32_t labeled_per_class = 25;
  uint32_t unlabeled_per_class = 225;
  uint32_t test_per_class = 25;
  double scene_bias = 0.9;
  double test_bias = -1.0;
  uint32_t actor_size = 9;
  uint32_t box_pad = 4;
  uint64_t seed = 1;

  void validate() const;
};

struct SyntheticBundle {
  Dataset labeled;
  Dataset unlabeled;
  Dataset test_biased;
  Dataset test_decorrelated;
  uint32_t k_classes = 0;
};

SyntheticBundle generate_synthetic(const SyntheticDatasetSpec& spec);

/// Split directory layout: one .vclip per clip (file stem = clip_id),
/// labels.csv, boxes.jsonl. Clips load in lexicographic filename order.
void save_dataset_dir(const Dataset& dataset, const std::string& dir);
Dataset load_dataset_dir(const std::string& dir);

/// Number of classes spanned by the labels (max index + 1).
uint32_t dataset_num_classes(const Dataset& dataset);

}  // namespace vidaug

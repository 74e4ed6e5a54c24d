#include "vidaug.h"

#include <cstring>
#include <string>

#include "vidaug/actor_cutmix.hpp"
#include "vidaug/clip.hpp"
#include "vidaug/dataset.hpp"
#include "vidaug/io.hpp"
#include "vidaug/policy.hpp"
#include "vidaug/recipes.hpp"
#include "vidaug/ssl.hpp"

/* Opaque handle definitions. Each wraps one core value. */
struct vidaug_clip {
  vidaug::VideoClip value;
};
struct vidaug_boxes {
  std::map<std::string, vidaug::BoxTrack> value;
};
struct vidaug_mask {
  vidaug::HumanMask value;
};
struct vidaug_policy {
  vidaug::AugPolicy value;
};
struct vidaug_dataset {
  vidaug::Dataset value;
};
struct vidaug_model {
  vidaug::Classifier value;
};

namespace {

thread_local std::string g_last_error;

vidaug_status status_of(const vidaug::Error& e) {
  switch (e.code()) {
    case vidaug::ErrorCode::kIo: return VIDAUG_ERR_IO;
    case vidaug::ErrorCode::kFormat: return VIDAUG_ERR_FORMAT;
    case vidaug::ErrorCode::kTruncated: return VIDAUG_ERR_TRUNCATED;
    case vidaug::ErrorCode::kValidation: return VIDAUG_ERR_VALIDATION;
    case vidaug::ErrorCode::kConfig: return VIDAUG_ERR_CONFIG;
    case vidaug::ErrorCode::kNumeric: return VIDAUG_ERR_NUMERIC;
  }
  return VIDAUG_ERR_VALIDATION;
}

/* Runs fn, routing exceptions into status codes + the thread-local
 * message. */
template <typename Fn>
vidaug_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return VIDAUG_OK;
  } catch (const vidaug::Error& e) {
    g_last_error = e.what();
    return status_of(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return VIDAUG_ERR_VALIDATION;
  }
}

vidaug_status invalid_argument(const char* message) {
  g_last_error = message;
  return VIDAUG_ERR_VALIDATION;
}

}  // namespace

extern "C" {

const char* vidaug_version(void) { return "1.0.0"; }

const char* vidaug_last_error(void) { return g_last_error.c_str(); }

vidaug_status vidaug_clip_create(uint32_t t, uint32_t h, uint32_t w, uint32_t c,
                                 const uint8_t* data, const char* clip_id,
                                 vidaug_clip** out) {
  if (!out) return invalid_argument("out is NULL");
  return guarded([&] {
    vidaug::VideoClip clip =
        vidaug::VideoClip::make(t, h, w, c, clip_id ? clip_id : "");
    if (data) std::memcpy(clip.frames.data(), data, clip.frames.size());
    *out = new vidaug_clip{std::move(clip)};
  });
}

vidaug_status vidaug_clip_load(const char* path, vidaug_clip** out) {
  if (!path || !out) return invalid_argument("path/out is NULL");
  return guarded([&] { *out = new vidaug_clip{vidaug::load_clip(path)}; });
}

vidaug_status vidaug_clip_save(const vidaug_clip* clip, const char* path) {
  if (!clip || !path) return invalid_argument("clip/path is NULL");
  return guarded([&] { vidaug::save_clip(clip->value, path); });
}

void vidaug_clip_dims(const vidaug_clip* clip, uint32_t* t, uint32_t* h,
                      uint32_t* w, uint32_t* c) {
  if (!clip) return;
  if (t) *t = clip->value.t;
  if (h) *h = clip->value.h;
  if (w) *w = clip->value.w;
  if (c) *c = clip->value.c;
}

const uint8_t* vidaug_clip_data(const vidaug_clip* clip) {
  return clip ? clip->value.frames.data() : nullptr;
}

size_t vidaug_clip_data_size(const vidaug_clip* clip) {
  return clip ? clip->value.frames.size() : 0;
}

const char* vidaug_clip_id(const vidaug_clip* clip) {
  return clip ? clip->value.clip_id.c_str() : "";
}

vidaug_status vidaug_clip_write_strip(const vidaug_clip* clip, const char* path) {
  if (!clip || !path) return invalid_argument("clip/path is NULL");
  return guarded([&] { vidaug::write_frame_strip(clip->value, path); });
}

void vidaug_clip_free(vidaug_clip* clip) { delete clip; }

vidaug_status vidaug_boxes_load(const char* path, vidaug_boxes** out) {
  if (!path || !out) return invalid_argument("path/out is NULL");
  return guarded([&] { *out = new vidaug_boxes{vidaug::load_box_file(path)}; });
}

void vidaug_boxes_free(vidaug_boxes* boxes) { delete boxes; }

vidaug_status vidaug_rasterize(const vidaug_boxes* boxes, const char* clip_id,
                               uint32_t t, uint32_t h, uint32_t w,
                               double score_threshold, vidaug_mask** out) {
  if (!boxes || !clip_id || !out) return invalid_argument("argument is NULL");
  return guarded([&] {
    auto it = boxes->value.find(clip_id);
    vidaug::BoxTrack empty;
    empty.clip_id = clip_id;
    const vidaug::BoxTrack& track = it == boxes->value.end() ? empty : it->second;
    *out = new vidaug_mask{vidaug::rasterize_masks(track, t, h, w, score_threshold)};
  });
}

void vidaug_mask_dims(const vidaug_mask* mask, uint32_t* t, uint32_t* h,
                      uint32_t* w) {
  if (!mask) return;
  if (t) *t = mask->value.t;
  if (h) *h = mask->value.h;
  if (w) *w = mask->value.w;
}

const uint8_t* vidaug_mask_data(const vidaug_mask* mask) {
  return mask ? mask->value.mask.data() : nullptr;
}

double vidaug_mask_foreground_ratio(const vidaug_mask* mask) {
  return mask ? vidaug::foreground_ratio(mask->value) : 0.0;
}

vidaug_status vidaug_mask_save(const vidaug_mask* mask, const char* path) {
  if (!mask || !path) return invalid_argument("mask/path is NULL");
  return guarded([&] {
    const vidaug::HumanMask& m = mask->value;
    vidaug::VideoClip clip = vidaug::VideoClip::make(m.t, m.h, m.w, 1, "mask");
    clip.frames = m.mask;
    vidaug::save_clip(clip, path);
  });
}

void vidaug_mask_free(vidaug_mask* mask) { delete mask; }

vidaug_status vidaug_policy_load(const char* path, vidaug_policy** out) {
  if (!path || !out) return invalid_argument("path/out is NULL");
  return guarded([&] { *out = new vidaug_policy{vidaug::load_policy(path)}; });
}

vidaug_status vidaug_policy_from_json(const char* json_text,
                                      vidaug_policy** out) {
  if (!json_text || !out) return invalid_argument("json/out is NULL");
  return guarded(
      [&] { *out = new vidaug_policy{vidaug::parse_policy_json(json_text)}; });
}

vidaug_status vidaug_policy_default(const char* mode, vidaug_policy** out) {
  if (!mode || !out) return invalid_argument("mode/out is NULL");
  return guarded([&] {
    vidaug::AugPolicy policy;
    policy.mode = vidaug::policy_mode_from_name(mode);
    policy.validate();
    *out = new vidaug_policy{std::move(policy)};
  });
}

int vidaug_policy_needs_masks(const vidaug_policy* policy) {
  return policy && policy->value.needs_masks() ? 1 : 0;
}

void vidaug_policy_free(vidaug_policy* policy) { delete policy; }

vidaug_status vidaug_augment_batch(const vidaug_policy* policy,
                                   const vidaug_clip* const* clips,
                                   const vidaug_mask* const* masks,
                                   const double* labels, size_t n, size_t k,
                                   uint64_t seed, vidaug_clip** out_clips,
                                   double* out_labels,
                                   vidaug_aug_info* out_info) {
  if (!policy || !clips || !out_clips || n == 0) {
    return invalid_argument("policy/clips/out_clips is NULL or n == 0");
  }
  if (labels && k < 2) return invalid_argument("labels given but k < 2");
  if (!labels && out_labels) {
    return invalid_argument("out_labels requires input labels");
  }
  return guarded([&] {
    std::vector<vidaug::VideoClip> batch;
    batch.reserve(n);
    for (size_t i = 0; i < n; ++i) batch.push_back(clips[i]->value);
    std::vector<vidaug::HumanMask> batch_masks;
    if (masks) {
      batch_masks.reserve(n);
      for (size_t i = 0; i < n; ++i) batch_masks.push_back(masks[i]->value);
    }
    std::vector<vidaug::SoftLabel> batch_labels(n);
    for (size_t i = 0; i < n; ++i) {
      if (labels) {
        batch_labels[i].probs.assign(labels + i * k, labels + (i + 1) * k);
        batch_labels[i].validate();
      } else {
        // Placeholder two-class labels; smoothing still produces a valid
        // lambda for the sidecar.
        batch_labels[i].probs = {1.0, 0.0};
      }
    }
    vidaug::SeededRng rng(seed);
    auto items = vidaug::apply_policy_batch(batch, batch_masks, batch_labels,
                                            policy->value, rng);
    for (size_t i = 0; i < n; ++i) {
      out_clips[i] = new vidaug_clip{std::move(items[i].clip)};
      if (out_labels) {
        for (size_t j = 0; j < k; ++j) {
          out_labels[i * k + j] = items[i].label.probs[j];
        }
      }
      if (out_info) {
        out_info[i].lambda = items[i].lambda;
        out_info[i].partner_index = items[i].partner_index;
        out_info[i].cross_branch = items[i].cross ? 1 : 0;
      }
    }
  });
}

void vidaug_synth_spec_defaults(vidaug_synth_spec* spec) {
  if (!spec) return;
  vidaug::SyntheticDatasetSpec defaults;
  spec->k_classes = defaults.k_classes;
  spec->t = defaults.t;
  spec->h = defaults.h;
  spec->w = defaults.w;
  spec->c = defaults.c;
  spec->labeled_per_class = defaults.labeled_per_class;
  spec->unlabeled_per_class = defaults.unlabeled_per_class;
  spec->test_per_class = defaults.test_per_class;
  spec->scene_bias = defaults.scene_bias;
  spec->test_bias = defaults.test_bias;
  spec->seed = defaults.seed;
}

vidaug_status vidaug_generate_synthetic(const vidaug_synth_spec* spec,
                                        const char* out_dir) {
  if (!spec || !out_dir) return invalid_argument("spec/out_dir is NULL");
  return guarded([&] {
    vidaug::SyntheticDatasetSpec core;
    core.k_classes = spec->k_classes;
    core.t = spec->t;
    core.h = spec->h;
    core.w = spec->w;
    core.c = spec->c;
    core.labeled_per_class = spec->labeled_per_class;
    core.unlabeled_per_class = spec->unlabeled_per_class;
    core.test_per_class = spec->test_per_class;
    core.scene_bias = spec->scene_bias;
    core.test_bias = spec->test_bias;
    core.seed = spec->seed;
    vidaug::SyntheticBundle bundle = vidaug::generate_synthetic(core);
    const std::string root(out_dir);
    vidaug::save_dataset_dir(bundle.labeled, root + "/labeled");
    vidaug::save_dataset_dir(bundle.unlabeled, root + "/unlabeled");
    vidaug::save_dataset_dir(bundle.test_biased, root + "/test_biased");
    vidaug::save_dataset_dir(bundle.test_decorrelated, root + "/test_decorrelated");
  });
}

vidaug_status vidaug_dataset_load(const char* dir, vidaug_dataset** out) {
  if (!dir || !out) return invalid_argument("dir/out is NULL");
  return guarded(
      [&] { *out = new vidaug_dataset{vidaug::load_dataset_dir(dir)}; });
}

size_t vidaug_dataset_size(const vidaug_dataset* dataset) {
  return dataset ? dataset->value.size() : 0;
}

void vidaug_dataset_free(vidaug_dataset* dataset) { delete dataset; }

void vidaug_train_config_defaults(vidaug_train_config* cfg) {
  if (!cfg) return;
  vidaug::TrainConfig defaults;
  cfg->tau = defaults.tau;
  cfg->lambda_u = defaults.lambda_u;
  cfg->batch_labeled = defaults.batch_labeled;
  cfg->batch_unlabeled = defaults.batch_unlabeled;
  cfg->lr = defaults.lr;
  cfg->momentum = defaults.momentum;
  cfg->weight_decay = defaults.weight_decay;
  cfg->epochs = defaults.epochs;
  cfg->seed = defaults.seed;
  cfg->strong_labeled = defaults.strong_labeled ? 1 : 0;
}

vidaug_status vidaug_train(const vidaug_dataset* labeled,
                           const vidaug_dataset* unlabeled,
                           const vidaug_dataset* test_biased,
                           const vidaug_dataset* test_decorrelated,
                           const vidaug_train_config* cfg,
                           const vidaug_policy* policy,
                           const char* metrics_csv_path, vidaug_model** out) {
  if (!labeled || !cfg || !policy || !out) {
    return invalid_argument("labeled/cfg/policy/out is NULL");
  }
  return guarded([&] {
    vidaug::TrainConfig core;
    core.tau = cfg->tau;
    core.lambda_u = cfg->lambda_u;
    core.batch_labeled = cfg->batch_labeled;
    core.batch_unlabeled = cfg->batch_unlabeled;
    core.lr = cfg->lr;
    core.momentum = cfg->momentum;
    core.weight_decay = cfg->weight_decay;
    core.epochs = cfg->epochs;
    core.seed = cfg->seed;
    core.strong_labeled = cfg->strong_labeled != 0;
    static const vidaug::Dataset kEmpty;
    vidaug::TrainResult result = vidaug::train(
        labeled->value, unlabeled ? unlabeled->value : kEmpty,
        test_biased ? test_biased->value : kEmpty,
        test_decorrelated ? test_decorrelated->value : kEmpty, core,
        policy->value);
    if (metrics_csv_path) vidaug::write_metrics_csv(result.log, metrics_csv_path);
    *out = new vidaug_model{std::move(result.model)};
  });
}

vidaug_status vidaug_model_save(const vidaug_model* model, const char* path) {
  if (!model || !path) return invalid_argument("model/path is NULL");
  return guarded([&] { vidaug::save_checkpoint(model->value, path); });
}

vidaug_status vidaug_model_load(const char* path, vidaug_model** out) {
  if (!path || !out) return invalid_argument("path/out is NULL");
  return guarded(
      [&] { *out = new vidaug_model{vidaug::load_checkpoint(path)}; });
}

vidaug_status vidaug_evaluate(const vidaug_model* model,
                              const vidaug_dataset* test_set,
                              double* out_accuracy) {
  if (!model || !test_set || !out_accuracy) {
    return invalid_argument("model/test_set/out_accuracy is NULL");
  }
  return guarded(
      [&] { *out_accuracy = vidaug::evaluate(model->value, test_set->value); });
}

void vidaug_model_free(vidaug_model* model) { delete model; }

const char* vidaug_recipe_names(void) {
  static std::string names = [] {
    std::string joined;
    for (const std::string& name : vidaug::recipe_names()) {
      if (!joined.empty()) joined += ",";
      joined += name;
    }
    return joined;
  }();
  return names.c_str();
}

vidaug_status vidaug_ablate(const char* recipe, const char* out_csv,
                            uint32_t n_seeds, uint64_t base_seed,
                            const char* ckpt_dir) {
  if (!recipe || !out_csv) return invalid_argument("recipe/out_csv is NULL");
  return guarded([&] {
    vidaug::RecipeRun run = vidaug::run_recipe(recipe, n_seeds, base_seed,
                                               ckpt_dir ? ckpt_dir : "");
    vidaug::write_recipe_csv(recipe, n_seeds, run.rows, out_csv);
  });
}

}  // extern "C"

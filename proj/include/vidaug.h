/* C API for the vidaug video-clip augmentation library.
 *
 * All objects are opaque handles created and destroyed by the library.
 * Functions that can fail return vidaug_status; VIDAUG_OK is 0 and
 * vidaug_last_error() describes the most recent failure on the calling
 * thread. Output handle parameters are written only on success.
 */
#ifndef VIDAUG_H
#define VIDAUG_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define VIDAUG_API __attribute__((visibility("default")))

typedef enum vidaug_status {
  VIDAUG_OK = 0,
  VIDAUG_ERR_IO = 1,
  VIDAUG_ERR_FORMAT = 2,
  VIDAUG_ERR_TRUNCATED = 3,
  VIDAUG_ERR_VALIDATION = 4,
  VIDAUG_ERR_CONFIG = 5,
  VIDAUG_ERR_NUMERIC = 6,
} vidaug_status;

VIDAUG_API const char* vidaug_version(void);

/* Message for the last failing call on this thread; empty string if none. */
VIDAUG_API const char* vidaug_last_error(void);

/* ---- clips -------------------------------------------------------- */

typedef struct vidaug_clip vidaug_clip;

/* data may be NULL for an all-zero clip; otherwise it must hold t*h*w*c
 * bytes in frame-major, row-major, channel-interleaved order. */
VIDAUG_API vidaug_status vidaug_clip_create(uint32_t t, uint32_t h, uint32_t w,
                                            uint32_t c, const uint8_t* data,
                                            const char* clip_id,
                                            vidaug_clip** out);
VIDAUG_API vidaug_status vidaug_clip_load(const char* path, vidaug_clip** out);
VIDAUG_API vidaug_status vidaug_clip_save(const vidaug_clip* clip,
                                          const char* path);
VIDAUG_API void vidaug_clip_dims(const vidaug_clip* clip, uint32_t* t,
                                 uint32_t* h, uint32_t* w, uint32_t* c);
VIDAUG_API const uint8_t* vidaug_clip_data(const vidaug_clip* clip);
VIDAUG_API size_t vidaug_clip_data_size(const vidaug_clip* clip);
VIDAUG_API const char* vidaug_clip_id(const vidaug_clip* clip);
/* PGM for single-channel clips, PPM for color; frames laid side by side. */
VIDAUG_API vidaug_status vidaug_clip_write_strip(const vidaug_clip* clip,
                                                 const char* path);
VIDAUG_API void vidaug_clip_free(vidaug_clip* clip);

/* ---- detector boxes and masks ------------------------------------- */

typedef struct vidaug_boxes vidaug_boxes;  /* box tracks for many clips */
typedef struct vidaug_mask vidaug_mask;

VIDAUG_API vidaug_status vidaug_boxes_load(const char* path, vidaug_boxes** out);
VIDAUG_API void vidaug_boxes_free(vidaug_boxes* boxes);

/* Rasterizes the union of boxes with score >= score_threshold for the
 * given clip_id. A clip with no entry in the box file gets an all-zero
 * mask. */
VIDAUG_API vidaug_status vidaug_rasterize(const vidaug_boxes* boxes,
                                          const char* clip_id, uint32_t t,
                                          uint32_t h, uint32_t w,
                                          double score_threshold,
                                          vidaug_mask** out);
VIDAUG_API void vidaug_mask_dims(const vidaug_mask* mask, uint32_t* t,
                                 uint32_t* h, uint32_t* w);
VIDAUG_API const uint8_t* vidaug_mask_data(const vidaug_mask* mask);
VIDAUG_API double vidaug_mask_foreground_ratio(const vidaug_mask* mask);
/* Stores the mask as a single-channel .vclip of 0/1 bytes. */
VIDAUG_API vidaug_status vidaug_mask_save(const vidaug_mask* mask,
                                          const char* path);
VIDAUG_API void vidaug_mask_free(vidaug_mask* mask);

/* ---- augmentation policies ---------------------------------------- */

typedef struct vidaug_policy vidaug_policy;

VIDAUG_API vidaug_status vidaug_policy_load(const char* path,
                                            vidaug_policy** out);
VIDAUG_API vidaug_status vidaug_policy_from_json(const char* json_text,
                                                 vidaug_policy** out);
/* mode is one of: strong_alg1, intra_cascaded, intra_sample_one,
 * cross_only, cascaded_intra_cross, weak_only, per_frame. */
VIDAUG_API vidaug_status vidaug_policy_default(const char* mode,
                                               vidaug_policy** out);
/* Nonzero when the policy can take a cross-clip branch that needs masks. */
VIDAUG_API int vidaug_policy_needs_masks(const vidaug_policy* policy);
VIDAUG_API void vidaug_policy_free(vidaug_policy* policy);

typedef struct vidaug_aug_info {
  double lambda;         /* label weight of the clip's own label */
  int32_t partner_index; /* batch index mixed in, or -1 on the intra path */
  int32_t cross_branch;  /* 1 when the batch took the cross-clip branch */
} vidaug_aug_info;

/* Applies the policy to one batch. masks may be NULL when the policy never
 * crosses; labels is an n*k row-major probability matrix and may be NULL
 * (labels then default to a single-class placeholder and out_labels must
 * be NULL too). out_clips receives n new handles. out_labels (n*k) and
 * out_info (n) are optional. */
VIDAUG_API vidaug_status vidaug_augment_batch(
    const vidaug_policy* policy, const vidaug_clip* const* clips,
    const vidaug_mask* const* masks, const double* labels, size_t n, size_t k,
    uint64_t seed, vidaug_clip** out_clips, double* out_labels,
    vidaug_aug_info* out_info);

/* ---- datasets ------------------------------------------------------ */

typedef struct vidaug_dataset vidaug_dataset;

typedef struct vidaug_synth_spec {
  uint32_t k_classes;
  uint32_t t, h, w, c;
  uint32_t labeled_per_class, unlabeled_per_class, test_per_class;
  double scene_bias;
  double test_bias; /* < 0 selects 1/K (decorrelated) */
  uint64_t seed;
} vidaug_synth_spec;

VIDAUG_API void vidaug_synth_spec_defaults(vidaug_synth_spec* spec);

/* Writes labeled/, unlabeled/, test_biased/ and test_decorrelated/ split
 * directories (clips + labels.csv + boxes.jsonl) under out_dir. */
VIDAUG_API vidaug_status vidaug_generate_synthetic(
    const vidaug_synth_spec* spec, const char* out_dir);

VIDAUG_API vidaug_status vidaug_dataset_load(const char* dir,
                                             vidaug_dataset** out);
VIDAUG_API size_t vidaug_dataset_size(const vidaug_dataset* dataset);
VIDAUG_API void vidaug_dataset_free(vidaug_dataset* dataset);

/* ---- training and evaluation --------------------------------------- */

typedef struct vidaug_model vidaug_model;

typedef struct vidaug_train_config {
  double tau;
  double lambda_u;
  uint32_t batch_labeled, batch_unlabeled;
  double lr, momentum, weight_decay;
  uint32_t epochs;
  uint64_t seed;
  int32_t strong_labeled; /* strong augmentation on the labeled branch */
} vidaug_train_config;

VIDAUG_API void vidaug_train_config_defaults(vidaug_train_config* cfg);

/* unlabeled / test sets may be NULL. When metrics_csv_path is non-NULL the
 * per-epoch log is written there. */
VIDAUG_API vidaug_status vidaug_train(const vidaug_dataset* labeled,
                                      const vidaug_dataset* unlabeled,
                                      const vidaug_dataset* test_biased,
                                      const vidaug_dataset* test_decorrelated,
                                      const vidaug_train_config* cfg,
                                      const vidaug_policy* policy,
                                      const char* metrics_csv_path,
                                      vidaug_model** out);

VIDAUG_API vidaug_status vidaug_model_save(const vidaug_model* model,
                                           const char* path);
VIDAUG_API vidaug_status vidaug_model_load(const char* path,
                                           vidaug_model** out);
VIDAUG_API vidaug_status vidaug_evaluate(const vidaug_model* model,
                                         const vidaug_dataset* test_set,
                                         double* out_accuracy);
VIDAUG_API void vidaug_model_free(vidaug_model* model);

/* ---- ablation recipes ---------------------------------------------- */

/* Comma-separated list of valid recipe names. */
VIDAUG_API const char* vidaug_recipe_names(void);

/* Runs a desk-scale ablation recipe over n_seeds seeds and writes a CSV of
 * mean/std accuracies per variant. ckpt_dir may be NULL; when given, every
 * trained model is checkpointed there. */
VIDAUG_API vidaug_status vidaug_ablate(const char* recipe, const char* out_csv,
                                       uint32_t n_seeds, uint64_t base_seed,
                                       const char* ckpt_dir);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* VIDAUG_H */

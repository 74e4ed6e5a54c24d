#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vidaug/dataset.hpp"
#include "vidaug/policy.hpp"

namespace vidaug {

/// Linear softmax probe over average-pooled clip features. Feature layout:
/// each frame is average-pooled to a 4x4 grid per channel, scaled to
/// [0,1], and flattened in (t, y, x, c) order, so D = t * 16 * c.
struct Classifier {
  size_t k_classes = 0;
  size_t feat_dim = 0;
  std::vector<double> weights;  // K x D, row-major
  std::vector<double> bias;     // K

  static Classifier zeros(size_t k_classes, size_t feat_dim);

  double& weight_at(size_t k, size_t d) { return weights[k * feat_dim + d]; }
  double weight_at(size_t k, size_t d) const { return weights[k * feat_dim + d]; }

  void validate() const;
};

struct TrainConfig {
  double tau = 0.95;
  double lambda_u = 1.0;
  uint32_t batch_labeled = 5;
  uint32_t batch_unlabeled = 5;
  double lr = 0.02;
  double momentum = 0.9;
  double weight_decay = 1e-4;
  uint32_t epochs = 10;
  uint64_t seed = 1;
  bool strong_labeled = false;  // strong augmentation on the labeled branch

  void validate() const;
};

/// Average-pool to 4x4 per frame and channel, scale to [0,1], flatten in
/// (t, y, x, c) order. Requires h >= 4 and w >= 4.
std::vector<double> featurize(const VideoClip& clip);

/// Softmax over W * features + b.
std::vector<double> forward_features(const Classifier& model,
                                     const std::vector<double>& features);
SoftLabel forward(const Classifier& model, const VideoClip& clip);

struct LabeledExample {
  VideoClip clip;
  SoftLabel label;
};

/// Mean cross-entropy of the weakly-augmented batch against its labels.
/// log arguments are clamped at 1e-12. One weak draw per clip, in batch
/// order.
double labeled_loss(const Classifier& model,
                    const std::vector<LabeledExample>& batch,
                    const WeakAugConfig& weak_cfg, SeededRng& rng);

struct ConfidentItem {
  size_t index = 0;    // position within the unlabeled batch
  SoftLabel pseudo;    // one-hot argmax of the weak-view prediction
};

/// Keeps x_j iff max prediction on the weak view reaches tau. Argmax ties
/// resolve to the lowest class index.
std::vector<ConfidentItem> confident_pseudo_labels(
    const Classifier& model, const std::vector<VideoClip>& batch, double tau,
    const WeakAugConfig& weak_cfg, SeededRng& rng);

/// Consistency loss over the confident subset, normalized by the full
/// batch size. The confident clips go through the strong policy as one
/// batch; on a cross branch their pseudo-labels are smoothed by
/// foreground ratio before the cross-entropy.
double unlabeled_loss(const Classifier& model,
                      const std::vector<VideoClip>& batch,
                      const std::vector<HumanMask>& masks,
                      const std::vector<ConfidentItem>& confident,
                      const AugPolicy& policy, SeededRng& rng);

/// Combined objective: labeled + lambda_u * unlabeled. Stream discipline:
/// three sub-seeds are drawn from rng up front (labeled weak draws,
/// pseudo-label weak draws, strong draws, in that order), so the same rng
/// seed always reproduces identical augmentations. With lambda_u = 0 or an
/// empty unlabeled batch the unlabeled streams stay untouched.
double total_loss(const Classifier& model,
                  const std::vector<LabeledExample>& labeled,
                  const std::vector<VideoClip>& unlabeled,
                  const std::vector<HumanMask>& unlabeled_masks,
                  const TrainConfig& cfg, const AugPolicy& policy,
                  SeededRng& rng,
                  const std::vector<HumanMask>& labeled_masks = {});

struct Gradients {
  std::vector<double> weights;  // K x D
  std::vector<double> bias;     // K
};

/// Exact analytic gradient of total_loss at frozen augmentation draws
/// (pseudo-labels are constants), plus weight decay on the weight matrix.
/// Call with a fresh rng seeded like the total_loss evaluation.
Gradients gradient(const Classifier& model,
                   const std::vector<LabeledExample>& labeled,
                   const std::vector<VideoClip>& unlabeled,
                   const std::vector<HumanMask>& unlabeled_masks,
                   const TrainConfig& cfg, const AugPolicy& policy,
                   SeededRng& rng,
                   const std::vector<HumanMask>& labeled_masks = {});

struct EpochMetrics {
  uint32_t epoch = 0;
  uint64_t step = 0;  // global step count at the end of the epoch
  double loss_labeled = 0.0;
  double loss_unlabeled = 0.0;
  double confident_frac = 0.0;
  double lr = 0.0;
  double acc_biased = 0.0;
  double acc_decorrelated = 0.0;
};

struct TrainResult {
  Classifier model;
  std::vector<EpochMetrics> log;
};

/// SGD with momentum, weight decay and per-epoch cosine decay from cfg.lr
/// to 0. One epoch covers the unlabeled set once (the labeled set once in
/// supervised mode). lambda_u = 0 or an empty unlabeled set reduces to the
/// supervised baseline trainer, metric for metric. Deterministic given
/// (data, cfg, policy).
TrainResult train(const Dataset& labeled, const Dataset& unlabeled,
                  const Dataset& test_biased, const Dataset& test_decorrelated,
                  const TrainConfig& cfg, const AugPolicy& policy);

/// Top-1 accuracy; no augmentation is applied at test time.
double evaluate(const Classifier& model, const Dataset& test_set);

// Checkpoint: 16-byte header (magic "VSSL", u32 version=1, u32 K, u32 D)
// followed by little-endian f64 dumps of W (row-major) then b.
void save_checkpoint(const Classifier& model, const std::string& path);
Classifier load_checkpoint(const std::string& path);

/// CSV columns:
/// epoch,step,L_l,L_u,confident_frac,lr,test_acc_biased,test_acc_decorrelated
void write_metrics_csv(const std::vector<EpochMetrics>& log,
                       const std::string& path);

}  // namespace vidaug

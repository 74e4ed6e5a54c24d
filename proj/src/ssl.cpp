#include "vidaug/ssl.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "vidaug/io.hpp"
#include "vidaug/util.hpp"

namespace vidaug {

namespace {

constexpr double kLogEps = 1e-12;
constexpr double kPi = 3.14159265358979323846;

// Salts for deriving independent draw streams from one seed.
constexpr uint64_t kSaltLabeled = 0x4c41424c44535452ull;
constexpr uint64_t kSaltPseudo = 0x50534555444f5452ull;
constexpr uint64_t kSaltStrong = 0x5354524f4e475252ull;

size_t argmax(const std::vector<double>& values) {
  size_t best = 0;
  for (size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

/// Adds loss_coeff times the cross-entropy of (target, probs) to *loss
/// and, when grads is non-null, grad_coeff * dL/dlogits outer features
/// into the gradients. The clamp indicator keeps the gradient exact even
/// when a probability sits below kLogEps. Separate coefficients let the
/// unlabeled term report the plain L_u while folding lambda_u into the
/// gradient.
void accumulate_example(const std::vector<double>& features,
                        const std::vector<double>& probs,
                        const std::vector<double>& target, double loss_coeff,
                        double grad_coeff, double* loss, Gradients* grads) {
  const size_t k_classes = probs.size();
  double ce = 0.0;
  double target_mass = 0.0;  // mass of target classes above the clamp
  for (size_t k = 0; k < k_classes; ++k) {
    ce -= target[k] * std::log(std::max(probs[k], kLogEps));
    if (probs[k] > kLogEps) target_mass += target[k];
  }
  *loss += loss_coeff * ce;
  if (!grads) return;
  const size_t d_dim = features.size();
  for (size_t k = 0; k < k_classes; ++k) {
    double dz = probs[k] * target_mass - (probs[k] > kLogEps ? target[k] : 0.0);
    dz *= grad_coeff;
    if (dz == 0.0) continue;
    grads->bias[k] += dz;
    double* row = grads->weights.data() + k * d_dim;
    for (size_t d = 0; d < d_dim; ++d) row[d] += dz * features[d];
  }
}

struct StepStats {
  double loss_labeled = 0.0;
  double loss_unlabeled = 0.0;
  size_t confident = 0;
};

/// One optimization step's objective (and gradient, when grads != null).
/// Consumes exactly three sub-seeds from rng regardless of branch so the
/// labeled stream is independent of the unlabeled work.
StepStats eval_step(const Classifier& model,
                    const std::vector<LabeledExample>& labeled,
                    const std::vector<VideoClip>& unlabeled,
                    const std::vector<HumanMask>& unlabeled_masks,
                    const TrainConfig& cfg, const AugPolicy& policy,
                    SeededRng& rng, const std::vector<HumanMask>& labeled_masks,
                    Gradients* grads) {
  model.validate();
  cfg.validate();
  const uint64_t seed_labeled = rng.next_u64();
  const uint64_t seed_pseudo = rng.next_u64();
  const uint64_t seed_strong = rng.next_u64();
  StepStats stats;

  if (labeled.empty()) throw ValidationError("labeled batch is empty");
  {
    SeededRng rng_l(derive_seed(seed_labeled, kSaltLabeled));
    const double coeff = 1.0 / double(labeled.size());
    if (cfg.strong_labeled) {
      std::vector<VideoClip> clips;
      std::vector<SoftLabel> labels;
      clips.reserve(labeled.size());
      for (const LabeledExample& ex : labeled) {
        clips.push_back(ex.clip);
        labels.push_back(ex.label);
      }
      auto views = apply_policy_batch(clips, labeled_masks, labels, policy, rng_l);
      for (const AugmentedItem& item : views) {
        auto features = featurize(item.clip);
        auto probs = forward_features(model, features);
        accumulate_example(features, probs, item.label.probs, coeff, coeff,
                           &stats.loss_labeled, grads);
      }
    } else {
      for (const LabeledExample& ex : labeled) {
        auto features = featurize(weak_augment(ex.clip, policy.weak, rng_l));
        auto probs = forward_features(model, features);
        accumulate_example(features, probs, ex.label.probs, coeff, coeff,
                           &stats.loss_labeled, grads);
      }
    }
  }

  if (cfg.lambda_u > 0.0 && !unlabeled.empty()) {
    SeededRng rng_u(derive_seed(seed_pseudo, kSaltPseudo));
    auto confident =
        confident_pseudo_labels(model, unlabeled, cfg.tau, policy.weak, rng_u);
    stats.confident = confident.size();
    if (!confident.empty()) {
      SeededRng rng_s(derive_seed(seed_strong, kSaltStrong));
      std::vector<VideoClip> clips;
      std::vector<HumanMask> masks;
      std::vector<SoftLabel> pseudo;
      clips.reserve(confident.size());
      for (const ConfidentItem& item : confident) {
        clips.push_back(unlabeled[item.index]);
        if (!unlabeled_masks.empty()) masks.push_back(unlabeled_masks[item.index]);
        pseudo.push_back(item.pseudo);
      }
      auto strong = apply_policy_batch(clips, masks, pseudo, policy, rng_s);
      // L_u is reported unscaled (normalizer is the full batch size);
      // lambda_u enters only through the gradient coefficient.
      const double loss_coeff = 1.0 / double(unlabeled.size());
      const double grad_coeff = cfg.lambda_u / double(unlabeled.size());
      for (const AugmentedItem& item : strong) {
        auto features = featurize(item.clip);
        auto probs = forward_features(model, features);
        accumulate_example(features, probs, item.label.probs, loss_coeff,
                           grad_coeff, &stats.loss_unlabeled, grads);
      }
    }
  }
  return stats;
}

void check_finite(const Classifier& model) {
  for (double v : model.weights) {
    if (!std::isfinite(v)) throw NumericError("non-finite classifier weights");
  }
  for (double v : model.bias) {
    if (!std::isfinite(v)) throw NumericError("non-finite classifier bias");
  }
}

void put_f64le(std::string& out, double v) {
  uint64_t bits = std::bit_cast<uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(char((bits >> (8 * i)) & 0xff));
}

double get_f64le(const unsigned char* p) {
  uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= uint64_t(p[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

uint32_t get_u32le(const unsigned char* p) {
  return uint32_t(p[0]) | (uint32_t(p[1]) << 8) | (uint32_t(p[2]) << 16) |
         (uint32_t(p[3]) << 24);
}

/// Reshuffled-on-wrap index stream over a dataset.
class IndexStream {
 public:
  IndexStream(size_t n, uint64_t seed) : order_(n), rng_(seed) {
    for (size_t i = 0; i < n; ++i) order_[i] = i;
    reshuffle();
  }
  size_t next() {
    if (cursor_ == order_.size()) {
      cursor_ = 0;
      reshuffle();
    }
    return order_[cursor_++];
  }

 private:
  void reshuffle() {
    for (size_t i = order_.size(); i > 1; --i) {
      std::swap(order_[i - 1], order_[rng_.uniform_int(i)]);
    }
  }
  std::vector<size_t> order_;
  size_t cursor_ = 0;
  SeededRng rng_;
};

}  // namespace

Classifier Classifier::zeros(size_t k_classes, size_t feat_dim) {
  Classifier model;
  model.k_classes = k_classes;
  model.feat_dim = feat_dim;
  model.weights.assign(k_classes * feat_dim, 0.0);
  model.bias.assign(k_classes, 0.0);
  return model;
}

void Classifier::validate() const {
  if (k_classes < 2) throw ValidationError("classifier needs K >= 2");
  if (feat_dim < 1) throw ValidationError("classifier needs D >= 1");
  if (weights.size() != k_classes * feat_dim || bias.size() != k_classes) {
    throw ValidationError("classifier parameter sizes are inconsistent");
  }
}

void TrainConfig::validate() const {
  if (!(tau > 0.0 && tau <= 1.0)) throw ValidationError("tau must lie in (0,1]");
  if (!(lambda_u >= 0.0)) throw ValidationError("lambda_u must be >= 0");
  if (batch_labeled < 1 || batch_unlabeled < 1) {
    throw ValidationError("batch sizes must be >= 1");
  }
}

std::vector<double> featurize(const VideoClip& clip) {
  clip.validate();
  if (clip.h < 4 || clip.w < 4) {
    throw ValidationError("featurize needs frames of at least 4x4 pixels");
  }
  std::vector<double> features(size_t(clip.t) * 16 * clip.c);
  size_t out = 0;
  for (uint32_t f = 0; f < clip.t; ++f) {
    for (uint32_t i = 0; i < 4; ++i) {
      const uint32_t y0 = i * clip.h / 4, y1 = (i + 1) * clip.h / 4;
      for (uint32_t j = 0; j < 4; ++j) {
        const uint32_t x0 = j * clip.w / 4, x1 = (j + 1) * clip.w / 4;
        for (uint32_t ch = 0; ch < clip.c; ++ch) {
          double sum = 0.0;
          for (uint32_t y = y0; y < y1; ++y) {
            for (uint32_t x = x0; x < x1; ++x) sum += clip.at(f, y, x, ch);
          }
          features[out++] =
              sum / (255.0 * double(y1 - y0) * double(x1 - x0));
        }
      }
    }
  }
  return features;
}

std::vector<double> forward_features(const Classifier& model,
                                     const std::vector<double>& features) {
  model.validate();
  if (features.size() != model.feat_dim) {
    std::ostringstream os;
    os << "feature length " << features.size() << " does not match model D="
       << model.feat_dim;
    throw ValidationError(os.str());
  }
  std::vector<double> logits(model.k_classes);
  for (size_t k = 0; k < model.k_classes; ++k) {
    const double* row = model.weights.data() + k * model.feat_dim;
    double z = model.bias[k];
    for (size_t d = 0; d < model.feat_dim; ++d) z += row[d] * features[d];
    if (!std::isfinite(z)) throw NumericError("non-finite logit");
    logits[k] = z;
  }
  const double zmax = *std::max_element(logits.begin(), logits.end());
  double denom = 0.0;
  for (size_t k = 0; k < model.k_classes; ++k) {
    logits[k] = std::exp(logits[k] - zmax);
    denom += logits[k];
  }
  for (size_t k = 0; k < model.k_classes; ++k) logits[k] /= denom;
  return logits;
}

SoftLabel forward(const Classifier& model, const VideoClip& clip) {
  SoftLabel label;
  label.probs = forward_features(model, featurize(clip));
  return label;
}

double labeled_loss(const Classifier& model,
                    const std::vector<LabeledExample>& batch,
                    const WeakAugConfig& weak_cfg, SeededRng& rng) {
  if (batch.empty()) throw ValidationError("labeled batch is empty");
  double loss = 0.0;
  const double coeff = 1.0 / double(batch.size());
  for (const LabeledExample& ex : batch) {
    ex.label.validate();
    auto features = featurize(weak_augment(ex.clip, weak_cfg, rng));
    auto probs = forward_features(model, features);
    accumulate_example(features, probs, ex.label.probs, coeff, coeff, &loss,
                       nullptr);
  }
  return loss;
}

std::vector<ConfidentItem> confident_pseudo_labels(
    const Classifier& model, const std::vector<VideoClip>& batch, double tau,
    const WeakAugConfig& weak_cfg, SeededRng& rng) {
  if (!(tau > 0.0 && tau <= 1.0)) throw ValidationError("tau must lie in (0,1]");
  std::vector<ConfidentItem> confident;
  for (size_t j = 0; j < batch.size(); ++j) {
    auto probs = forward_features(model, featurize(weak_augment(batch[j], weak_cfg, rng)));
    const size_t best = argmax(probs);
    if (probs[best] >= tau) {
      confident.push_back({j, SoftLabel::one_hot(probs.size(), best)});
    }
  }
  return confident;
}

double unlabeled_loss(const Classifier& model,
                      const std::vector<VideoClip>& batch,
                      const std::vector<HumanMask>& masks,
                      const std::vector<ConfidentItem>& confident,
                      const AugPolicy& policy, SeededRng& rng) {
  if (batch.empty()) throw ValidationError("unlabeled batch is empty");
  if (confident.empty()) return 0.0;
  std::vector<VideoClip> clips;
  std::vector<HumanMask> subset_masks;
  std::vector<SoftLabel> pseudo;
  for (const ConfidentItem& item : confident) {
    clips.push_back(batch.at(item.index));
    if (!masks.empty()) subset_masks.push_back(masks.at(item.index));
    pseudo.push_back(item.pseudo);
  }
  auto strong = apply_policy_batch(clips, subset_masks, pseudo, policy, rng);
  double loss = 0.0;
  const double coeff = 1.0 / double(batch.size());
  for (const AugmentedItem& item : strong) {
    auto features = featurize(item.clip);
    auto probs = forward_features(model, features);
    accumulate_example(features, probs, item.label.probs, coeff, coeff, &loss,
                       nullptr);
  }
  return loss;
}

double total_loss(const Classifier& model,
                  const std::vector<LabeledExample>& labeled,
                  const std::vector<VideoClip>& unlabeled,
                  const std::vector<HumanMask>& unlabeled_masks,
                  const TrainConfig& cfg, const AugPolicy& policy,
                  SeededRng& rng, const std::vector<HumanMask>& labeled_masks) {
  StepStats stats = eval_step(model, labeled, unlabeled, unlabeled_masks, cfg,
                              policy, rng, labeled_masks, nullptr);
  return stats.loss_labeled + cfg.lambda_u * stats.loss_unlabeled;
}

Gradients gradient(const Classifier& model,
                   const std::vector<LabeledExample>& labeled,
                   const std::vector<VideoClip>& unlabeled,
                   const std::vector<HumanMask>& unlabeled_masks,
                   const TrainConfig& cfg, const AugPolicy& policy,
                   SeededRng& rng, const std::vector<HumanMask>& labeled_masks) {
  Gradients grads;
  grads.weights.assign(model.weights.size(), 0.0);
  grads.bias.assign(model.bias.size(), 0.0);
  eval_step(model, labeled, unlabeled, unlabeled_masks, cfg, policy, rng,
            labeled_masks, &grads);
  for (size_t i = 0; i < grads.weights.size(); ++i) {
    grads.weights[i] += cfg.weight_decay * model.weights[i];
    if (!std::isfinite(grads.weights[i])) throw NumericError("non-finite gradient");
  }
  for (double v : grads.bias) {
    if (!std::isfinite(v)) throw NumericError("non-finite gradient");
  }
  return grads;
}

TrainResult train(const Dataset& labeled, const Dataset& unlabeled,
                  const Dataset& test_biased, const Dataset& test_decorrelated,
                  const TrainConfig& cfg, const AugPolicy& policy) {
  cfg.validate();
  policy.validate();
  if (labeled.empty()) throw ValidationError("labeled training set is empty");
  const bool supervised = unlabeled.empty() || cfg.lambda_u == 0.0;

  uint32_t k_classes = std::max(dataset_num_classes(labeled),
                                std::max(dataset_num_classes(test_biased),
                                         dataset_num_classes(test_decorrelated)));
  if (k_classes < 2) throw ValidationError("need at least 2 classes");
  const size_t feat_dim = featurize(labeled.front().clip).size();

  std::vector<LabeledExample> labeled_pool;
  labeled_pool.reserve(labeled.size());
  for (const DatasetItem& item : labeled) {
    labeled_pool.push_back({item.clip, SoftLabel::one_hot(k_classes, item.label)});
  }

  // Masks for clips that can take a cross-clip branch; rasterized once.
  const bool want_masks = policy.needs_masks();
  std::vector<HumanMask> unlabeled_masks;
  std::vector<HumanMask> labeled_masks;
  if (!supervised && want_masks) {
    unlabeled_masks.resize(unlabeled.size());
    parallel_for(unlabeled.size(), [&](size_t i) {
      const DatasetItem& item = unlabeled[i];
      unlabeled_masks[i] =
          rasterize_masks(item.boxes, item.clip.t, item.clip.h, item.clip.w);
    });
  }
  if (cfg.strong_labeled && want_masks) {
    labeled_masks.resize(labeled.size());
    parallel_for(labeled.size(), [&](size_t i) {
      const DatasetItem& item = labeled[i];
      labeled_masks[i] =
          rasterize_masks(item.boxes, item.clip.t, item.clip.h, item.clip.w);
    });
  }

  Classifier model = Classifier::zeros(k_classes, feat_dim);
  std::vector<double> vel_w(model.weights.size(), 0.0);
  std::vector<double> vel_b(model.bias.size(), 0.0);

  IndexStream labeled_stream(labeled.size(), derive_seed(cfg.seed, 0x4c53'4852ull));
  IndexStream unlabeled_stream(std::max<size_t>(1, unlabeled.size()),
                               derive_seed(cfg.seed, 0x554c'4852ull));
  SeededRng step_seeder(derive_seed(cfg.seed, 0x5354'4550ull));

  const size_t steps_per_epoch =
      supervised
          ? (labeled.size() + cfg.batch_labeled - 1) / cfg.batch_labeled
          : (unlabeled.size() + cfg.batch_unlabeled - 1) / cfg.batch_unlabeled;

  TrainResult result;
  uint64_t global_step = 0;
  for (uint32_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr =
        cfg.lr * 0.5 * (1.0 + std::cos(kPi * double(epoch) / double(cfg.epochs)));
    double sum_ll = 0.0, sum_lu = 0.0;
    size_t sum_confident = 0;
    for (size_t s = 0; s < steps_per_epoch; ++s) {
      std::vector<LabeledExample> lb;
      std::vector<HumanMask> lb_masks;
      lb.reserve(cfg.batch_labeled);
      for (uint32_t i = 0; i < cfg.batch_labeled; ++i) {
        const size_t idx = labeled_stream.next();
        lb.push_back(labeled_pool[idx]);
        if (cfg.strong_labeled && want_masks) lb_masks.push_back(labeled_masks[idx]);
      }
      std::vector<VideoClip> ub;
      std::vector<HumanMask> ub_masks;
      if (!supervised) {
        ub.reserve(cfg.batch_unlabeled);
        for (uint32_t i = 0; i < cfg.batch_unlabeled; ++i) {
          const size_t idx = unlabeled_stream.next();
          ub.push_back(unlabeled[idx].clip);
          if (want_masks) ub_masks.push_back(unlabeled_masks[idx]);
        }
      }

      SeededRng step_rng(step_seeder.next_u64());
      Gradients grads;
      grads.weights.assign(model.weights.size(), 0.0);
      grads.bias.assign(model.bias.size(), 0.0);
      StepStats stats;
      try {
        stats = eval_step(model, lb, ub, ub_masks, cfg, policy, step_rng,
                          lb_masks, &grads);
      } catch (const NumericError& e) {
        std::ostringstream os;
        os << "training diverged at epoch " << epoch << " step " << s << ": "
           << e.what();
        throw NumericError(os.str());
      }
      const double step_loss =
          stats.loss_labeled + cfg.lambda_u * stats.loss_unlabeled;
      if (!std::isfinite(step_loss)) {
        std::ostringstream os;
        os << "training diverged at epoch " << epoch << " step " << s;
        throw NumericError(os.str());
      }
      sum_ll += stats.loss_labeled;
      sum_lu += stats.loss_unlabeled;
      sum_confident += stats.confident;

      for (size_t i = 0; i < model.weights.size(); ++i) {
        grads.weights[i] += cfg.weight_decay * model.weights[i];
        vel_w[i] = cfg.momentum * vel_w[i] + grads.weights[i];
        model.weights[i] -= lr * vel_w[i];
      }
      for (size_t k = 0; k < model.bias.size(); ++k) {
        vel_b[k] = cfg.momentum * vel_b[k] + grads.bias[k];
        model.bias[k] -= lr * vel_b[k];
      }
      ++global_step;
    }
    check_finite(model);

    EpochMetrics metrics;
    metrics.epoch = epoch;
    metrics.step = global_step;
    metrics.loss_labeled = sum_ll / double(steps_per_epoch);
    metrics.loss_unlabeled = sum_lu / double(steps_per_epoch);
    metrics.confident_frac =
        supervised ? 0.0
                   : double(sum_confident) /
                         (double(steps_per_epoch) * cfg.batch_unlabeled);
    metrics.lr = lr;
    metrics.acc_biased = test_biased.empty() ? 0.0 : evaluate(model, test_biased);
    metrics.acc_decorrelated =
        test_decorrelated.empty() ? 0.0 : evaluate(model, test_decorrelated);
    result.log.push_back(metrics);
  }
  result.model = std::move(model);
  return result;
}

double evaluate(const Classifier& model, const Dataset& test_set) {
  if (test_set.empty()) throw ValidationError("test set is empty");
  std::vector<uint8_t> hits(test_set.size(), 0);
  parallel_for(test_set.size(), [&](size_t i) {
    auto probs = forward_features(model, featurize(test_set[i].clip));
    hits[i] = int(argmax(probs)) == test_set[i].label ? 1 : 0;
  });
  size_t correct = 0;
  for (uint8_t hit : hits) correct += hit;
  return double(correct) / double(test_set.size());
}

void save_checkpoint(const Classifier& model, const std::string& path) {
  model.validate();
  std::string bytes;
  bytes.reserve(16 + 8 * (model.weights.size() + model.bias.size()));
  bytes.append("VSSL", 4);
  for (uint32_t v : {uint32_t(1), uint32_t(model.k_classes), uint32_t(model.feat_dim)}) {
    for (int i = 0; i < 4; ++i) bytes.push_back(char((v >> (8 * i)) & 0xff));
  }
  for (double v : model.weights) put_f64le(bytes, v);
  for (double v : model.bias) put_f64le(bytes, v);
  std::ofstream out(path + ".tmp", std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + ".tmp' for writing");
  out.write(bytes.data(), std::streamsize(bytes.size()));
  out.close();
  if (!out.good()) throw IoError("write failure on '" + path + "'");
  std::error_code ec;
  std::filesystem::rename(path + ".tmp", path, ec);
  if (ec) throw IoError("cannot rename temp checkpoint onto '" + path + "'");
}

Classifier load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path + "'");
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  if (bytes.size() < 16) throw FormatError("'" + path + "': header truncated");
  const unsigned char* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (std::memcmp(p, "VSSL", 4) != 0) {
    throw FormatError("'" + path + "': bad checkpoint magic");
  }
  const uint32_t version = get_u32le(p + 4);
  if (version != 1) {
    throw FormatError("'" + path + "': unsupported checkpoint version " +
                      std::to_string(version));
  }
  const uint32_t k_classes = get_u32le(p + 8);
  const uint32_t feat_dim = get_u32le(p + 12);
  const size_t expect = 16 + 8 * (size_t(k_classes) * feat_dim + k_classes);
  if (bytes.size() != expect) {
    throw TruncationError("'" + path + "': payload size mismatch");
  }
  Classifier model = Classifier::zeros(k_classes, feat_dim);
  size_t off = 16;
  for (double& v : model.weights) {
    v = get_f64le(p + off);
    off += 8;
  }
  for (double& v : model.bias) {
    v = get_f64le(p + off);
    off += 8;
  }
  model.validate();
  return model;
}

void write_metrics_csv(const std::vector<EpochMetrics>& log,
                       const std::string& path) {
  std::ostringstream os;
  os << "epoch,step,L_l,L_u,confident_frac,lr,test_acc_biased,test_acc_decorrelated\n";
  char buf[256];
  for (const EpochMetrics& m : log) {
    std::snprintf(buf, sizeof(buf), "%u,%llu,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n",
                  m.epoch, (unsigned long long)m.step, m.loss_labeled,
                  m.loss_unlabeled, m.confident_frac, m.lr, m.acc_biased,
                  m.acc_decorrelated);
    os << buf;
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open metrics file '" + path + "'");
  out << os.str();
  if (!out.good()) throw IoError("write failure on '" + path + "'");
}

}  // namespace vidaug

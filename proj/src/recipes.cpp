#include "vidaug/recipes.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace vidaug {

namespace {

struct Variant {
  std::string name;
  bool supervised = false;
  AugPolicy policy;
};

AugPolicy base_policy() {
  AugPolicy policy;
  policy.mode = PolicyMode::kStrongAlg1;
  return policy;
}

AugPolicy intra_with(std::vector<PhotoGeoKind> photo,
                     std::vector<TemporalKind> temporal) {
  AugPolicy policy = base_policy();
  policy.mode = PolicyMode::kIntraCascaded;
  policy.photo_geo_pool = std::move(photo);
  policy.temporal_pool = std::move(temporal);
  return policy;
}

AugPolicy cross_with(CrossKind kind, bool smoothing) {
  AugPolicy policy = base_policy();
  policy.mode = PolicyMode::kCrossOnly;
  policy.cross_kind = kind;
  policy.cross_cfg.smoothing = smoothing;
  return policy;
}

std::vector<Variant> variants_for(const std::string& recipe) {
  const auto identity_photo = std::vector<PhotoGeoKind>{PhotoGeoKind::kIdentity};
  const auto identity_temporal = std::vector<TemporalKind>{TemporalKind::kIdentity};
  std::vector<Variant> variants;
  auto add = [&](std::string name, AugPolicy policy) {
    variants.push_back({std::move(name), false, std::move(policy)});
  };
  auto add_supervised = [&] {
    variants.push_back({"supervised", true, base_policy()});
  };

  if (recipe == "coherence") {
    AugPolicy per_frame = base_policy();
    per_frame.mode = PolicyMode::kPerFrame;
    add("per_frame", per_frame);
    add("coherent", intra_with(full_photo_geo_pool(), identity_temporal));
  } else if (recipe == "temporal") {
    add_supervised();
    add("t_half", intra_with(identity_photo, {TemporalKind::kTHalf}));
    add("t_drop", intra_with(identity_photo, {TemporalKind::kTDrop}));
    add("t_reverse", intra_with(identity_photo, {TemporalKind::kTReverse}));
    add("temporal_all", intra_with(identity_photo, full_temporal_pool()));
  } else if (recipe == "actorcutmix") {
    add_supervised();
    add("cutmix", cross_with(CrossKind::kCutMix, false));
    add("bkg_cutmix", cross_with(CrossKind::kBackgroundCutMix, false));
    add("actorcutmix_nosmooth", cross_with(CrossKind::kActorCutMix, false));
    add("actorcutmix_smooth", cross_with(CrossKind::kActorCutMix, true));
  } else if (recipe == "intra-combine") {
    AugPolicy sample_one = base_policy();
    sample_one.mode = PolicyMode::kIntraSampleOne;
    add("sample_one", sample_one);
    add("cascaded", intra_with(full_photo_geo_pool(), full_temporal_pool()));
  } else if (recipe == "intra-cross") {
    add_supervised();
    add("intra_only", intra_with(full_photo_geo_pool(), full_temporal_pool()));
    AugPolicy cascaded = base_policy();
    cascaded.mode = PolicyMode::kCascadedIntraCross;
    add("cascaded", cascaded);
    add("sample_one", base_policy());  // Alg-1 coin between intra and cross
  } else {
    throw ConfigError("unknown recipe '" + recipe + "'; valid: coherence, "
                      "temporal, actorcutmix, intra-combine, intra-cross");
  }
  return variants;
}

double mean_of(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / double(values.size());
}

double std_of(const std::vector<double>& values, double mean) {
  double sq = 0.0;
  for (double v : values) sq += (v - mean) * (v - mean);
  return std::sqrt(sq / double(values.size()));
}

}  // namespace

const std::vector<std::string>& recipe_names() {
  static const std::vector<std::string> names = {
      "coherence", "temporal", "actorcutmix", "intra-combine", "intra-cross"};
  return names;
}

bool is_recipe(const std::string& name) {
  for (const std::string& n : recipe_names()) {
    if (n == name) return true;
  }
  return false;
}

std::vector<std::string> recipe_variants(const std::string& recipe) {
  std::vector<std::string> names;
  for (const Variant& v : variants_for(recipe)) names.push_back(v.name);
  return names;
}

SyntheticDatasetSpec recipe_dataset_spec(uint64_t seed) {
  SyntheticDatasetSpec spec;  // K=8, 8x32x32x3, 200/1800 split, bias 0.9
  spec.seed = seed;
  return spec;
}

TrainConfig recipe_train_config(uint64_t seed) {
  TrainConfig cfg;
  cfg.seed = seed;
  return cfg;
}

RecipeRun run_recipe(const std::string& recipe, uint32_t n_seeds,
                     uint64_t base_seed, const std::string& ckpt_dir) {
  if (n_seeds < 1) throw ConfigError("need at least one seed");
  const std::vector<Variant> variants = variants_for(recipe);
  RecipeRun run;
  run.biased.assign(variants.size(), {});
  run.decorrelated.assign(variants.size(), {});

  if (!ckpt_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(ckpt_dir, ec);
    if (ec) throw IoError("cannot create checkpoint dir '" + ckpt_dir + "'");
  }

  for (uint32_t s = 0; s < n_seeds; ++s) {
    // All variants of one seed share a dataset, so comparisons are paired.
    SyntheticBundle data = generate_synthetic(recipe_dataset_spec(base_seed + s));
    for (size_t v = 0; v < variants.size(); ++v) {
      const Variant& variant = variants[v];
      TrainConfig cfg = recipe_train_config(base_seed + s);
      static const Dataset kEmpty;
      const Dataset& unlabeled = variant.supervised ? kEmpty : data.unlabeled;
      TrainResult result = train(data.labeled, unlabeled, data.test_biased,
                                 data.test_decorrelated, cfg, variant.policy);
      run.biased[v].push_back(evaluate(result.model, data.test_biased));
      run.decorrelated[v].push_back(
          evaluate(result.model, data.test_decorrelated));
      if (!ckpt_dir.empty()) {
        char name[128];
        std::snprintf(name, sizeof(name), "%s_%s_seed%u.ckpt", recipe.c_str(),
                      variant.name.c_str(), s);
        save_checkpoint(result.model,
                        (std::filesystem::path(ckpt_dir) / name).string());
      }
    }
  }

  for (size_t v = 0; v < variants.size(); ++v) {
    RecipeRow row;
    row.variant = variants[v].name;
    row.acc_biased_mean = mean_of(run.biased[v]);
    row.acc_biased_std = std_of(run.biased[v], row.acc_biased_mean);
    row.acc_decorrelated_mean = mean_of(run.decorrelated[v]);
    row.acc_decorrelated_std = std_of(run.decorrelated[v], row.acc_decorrelated_mean);
    run.rows.push_back(row);
  }
  return run;
}

void write_recipe_csv(const std::string& recipe, uint32_t n_seeds,
                      const std::vector<RecipeRow>& rows,
                      const std::string& path) {
  std::string out =
      "recipe,variant,seeds,acc_biased_mean,acc_biased_std,"
      "acc_decorrelated_mean,acc_decorrelated_std\n";
  char buf[256];
  for (const RecipeRow& row : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%s,%u,%.6f,%.6f,%.6f,%.6f\n",
                  recipe.c_str(), row.variant.c_str(), n_seeds,
                  row.acc_biased_mean, row.acc_biased_std,
                  row.acc_decorrelated_mean, row.acc_decorrelated_std);
    out += buf;
  }
  std::ofstream file(path, std::ios::trunc);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  file << out;
  if (!file.good()) throw IoError("write failure on '" + path + "'");
}

}  // namespace vidaug

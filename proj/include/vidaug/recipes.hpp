#pragma once

#include <string>
#include <vector>

#include "vidaug/dataset.hpp"
#include "vidaug/ssl.hpp"

namespace vidaug {

/// One variant's accuracy over the recipe's seeds (population std, so a
/// single seed reports 0).
struct RecipeRow {
  std::string variant;
  double acc_biased_mean = 0.0;
  double acc_biased_std = 0.0;
  double acc_decorrelated_mean = 0.0;
  double acc_decorrelated_std = 0.0;
};

/// Recipe names: coherence, temporal, actorcutmix, intra-combine,
/// intra-cross.
const std::vector<std::string>& recipe_names();
bool is_recipe(const std::string& name);

/// Variant policies keyed by recipe; "supervised" rows train on the
/// labeled split alone.
std::vector<std::string> recipe_variants(const std::string& recipe);

/// Dataset and trainer settings shared by all recipes, so one command
/// reproduces a table. Seed s of a run uses dataset seed base_seed + s and
/// the same trainer seed.
SyntheticDatasetSpec recipe_dataset_spec(uint64_t seed);
TrainConfig recipe_train_config(uint64_t seed);

struct RecipeRun {
  std::vector<RecipeRow> rows;
  /// Per (variant, seed) accuracies in row-major variant order.
  std::vector<std::vector<double>> biased;
  std::vector<std::vector<double>> decorrelated;
};

/// Trains every variant over n_seeds paired datasets. When ckpt_dir is
/// non-empty each trained model is written to
/// <ckpt_dir>/<recipe>_<variant>_seed<k>.ckpt.
RecipeRun run_recipe(const std::string& recipe, uint32_t n_seeds,
                     uint64_t base_seed, const std::string& ckpt_dir = {});

/// CSV columns: recipe,variant,seeds,acc_biased_mean,acc_biased_std,
/// acc_decorrelated_mean,acc_decorrelated_std
void write_recipe_csv(const std::string& recipe, uint32_t n_seeds,
                      const std::vector<RecipeRow>& rows,
                      const std::string& path);

}  // namespace vidaug

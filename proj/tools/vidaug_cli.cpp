// vidaug command-line tool. Exit codes: 0 success, 1 I/O error,
// 2 validation/configuration error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vidaug.h"

namespace fs = std::filesystem;

namespace {

int exit_code_for(vidaug_status status) {
  if (status == VIDAUG_OK) return 0;
  return status == VIDAUG_ERR_IO ? 1 : 2;
}

int fail(vidaug_status status) {
  std::cerr << "error: " << vidaug_last_error() << "\n";
  return exit_code_for(status);
}

int fail_config(const std::string& message) {
  std::cerr << "error: " << message << "\n";
  return 2;
}

struct ClipDeleter {
  void operator()(vidaug_clip* c) const { vidaug_clip_free(c); }
};
struct MaskDeleter {
  void operator()(vidaug_mask* m) const { vidaug_mask_free(m); }
};
struct BoxesDeleter {
  void operator()(vidaug_boxes* b) const { vidaug_boxes_free(b); }
};
struct PolicyDeleter {
  void operator()(vidaug_policy* p) const { vidaug_policy_free(p); }
};
struct DatasetDeleter {
  void operator()(vidaug_dataset* d) const { vidaug_dataset_free(d); }
};
struct ModelDeleter {
  void operator()(vidaug_model* m) const { vidaug_model_free(m); }
};

using ClipPtr = std::unique_ptr<vidaug_clip, ClipDeleter>;
using MaskPtr = std::unique_ptr<vidaug_mask, MaskDeleter>;
using BoxesPtr = std::unique_ptr<vidaug_boxes, BoxesDeleter>;
using PolicyPtr = std::unique_ptr<vidaug_policy, PolicyDeleter>;
using DatasetPtr = std::unique_ptr<vidaug_dataset, DatasetDeleter>;
using ModelPtr = std::unique_ptr<vidaug_model, ModelDeleter>;

// --- augment ---------------------------------------------------------

struct AugmentArgs {
  std::vector<std::string> inputs;
  std::string out_dir;
  std::string policy_path;
  std::string boxes_path;
  std::string labels_path;
  uint32_t num_classes = 0;
  double threshold = 0.5;
  uint64_t seed = 1;
};

std::map<std::string, int> read_labels_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open label file '" + path + "'");
  std::map<std::string, int> labels;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first && line == "clip_id,class_index") {
      first = false;
      continue;
    }
    first = false;
    auto comma = line.rfind(',');
    if (comma == std::string::npos) {
      throw std::runtime_error("bad label line: " + line);
    }
    labels[line.substr(0, comma)] = std::stoi(line.substr(comma + 1));
  }
  return labels;
}

int run_augment(const AugmentArgs& args) {
  PolicyPtr policy;
  {
    vidaug_policy* raw = nullptr;
    if (auto st = vidaug_policy_load(args.policy_path.c_str(), &raw); st != VIDAUG_OK) {
      return fail(st);
    }
    policy.reset(raw);
  }
  if (vidaug_policy_needs_masks(policy.get()) && args.boxes_path.empty()) {
    return fail_config("policy can take the cross-clip branch; --boxes is required");
  }

  std::vector<ClipPtr> clips;
  for (const std::string& path : args.inputs) {
    vidaug_clip* raw = nullptr;
    if (auto st = vidaug_clip_load(path.c_str(), &raw); st != VIDAUG_OK) {
      return fail(st);
    }
    clips.emplace_back(raw);
  }
  const size_t n = clips.size();

  BoxesPtr boxes;
  std::vector<MaskPtr> masks;
  std::vector<const vidaug_mask*> mask_ptrs;
  if (!args.boxes_path.empty()) {
    vidaug_boxes* raw = nullptr;
    if (auto st = vidaug_boxes_load(args.boxes_path.c_str(), &raw); st != VIDAUG_OK) {
      return fail(st);
    }
    boxes.reset(raw);
    for (const ClipPtr& clip : clips) {
      uint32_t t, h, w, c;
      vidaug_clip_dims(clip.get(), &t, &h, &w, &c);
      vidaug_mask* mask = nullptr;
      if (auto st = vidaug_rasterize(boxes.get(), vidaug_clip_id(clip.get()), t,
                                     h, w, args.threshold, &mask);
          st != VIDAUG_OK) {
        return fail(st);
      }
      masks.emplace_back(mask);
      mask_ptrs.push_back(mask);
    }
  }

  std::vector<double> label_matrix;
  uint32_t k = 0;
  if (!args.labels_path.empty()) {
    std::map<std::string, int> labels;
    try {
      labels = read_labels_csv(args.labels_path);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
    int max_label = 1;
    for (const auto& [id, cls] : labels) max_label = std::max(max_label, cls);
    k = args.num_classes ? args.num_classes : uint32_t(max_label + 1);
    label_matrix.assign(n * k, 0.0);
    for (size_t i = 0; i < n; ++i) {
      auto it = labels.find(vidaug_clip_id(clips[i].get()));
      if (it == labels.end()) {
        return fail_config(std::string("no label for clip '") +
                           vidaug_clip_id(clips[i].get()) + "'");
      }
      if (uint32_t(it->second) >= k) {
        return fail_config("class index exceeds --num-classes");
      }
      label_matrix[i * k + it->second] = 1.0;
    }
  }

  std::vector<const vidaug_clip*> clip_ptrs;
  for (const ClipPtr& clip : clips) clip_ptrs.push_back(clip.get());
  std::vector<vidaug_clip*> out_clips(n, nullptr);
  std::vector<double> out_labels(label_matrix.empty() ? 0 : n * k);
  std::vector<vidaug_aug_info> info(n);
  if (auto st = vidaug_augment_batch(
          policy.get(), clip_ptrs.data(),
          mask_ptrs.empty() ? nullptr : mask_ptrs.data(),
          label_matrix.empty() ? nullptr : label_matrix.data(), n, k,
          args.seed, out_clips.data(),
          out_labels.empty() ? nullptr : out_labels.data(), info.data());
      st != VIDAUG_OK) {
    return fail(st);
  }
  std::vector<ClipPtr> outputs;
  for (vidaug_clip* raw : out_clips) outputs.emplace_back(raw);

  std::error_code ec;
  fs::create_directories(args.out_dir, ec);
  if (ec) {
    std::cerr << "error: cannot create '" << args.out_dir << "'\n";
    return 1;
  }
  for (size_t i = 0; i < n; ++i) {
    const std::string id = vidaug_clip_id(outputs[i].get());
    const fs::path base = fs::path(args.out_dir) / id;
    if (auto st = vidaug_clip_save(outputs[i].get(), (base.string() + ".vclip").c_str());
        st != VIDAUG_OK) {
      return fail(st);
    }
    nlohmann::json sidecar{
        {"clip_id", id},
        {"cross", info[i].cross_branch != 0},
        {"lambda", info[i].lambda},
        {"partner_id", info[i].partner_index >= 0
                           ? vidaug_clip_id(clips[info[i].partner_index].get())
                           : ""},
    };
    if (!out_labels.empty()) {
      sidecar["smoothed_label"] =
          std::vector<double>(out_labels.begin() + i * k,
                              out_labels.begin() + (i + 1) * k);
    }
    std::ofstream side(base.string() + ".json", std::ios::trunc);
    side << sidecar.dump(2) << "\n";
    if (!side.good()) {
      std::cerr << "error: cannot write sidecar for '" << id << "'\n";
      return 1;
    }
  }
  return 0;
}

// --- train ------------------------------------------------------------

struct TrainArgs {
  std::string data_dir;
  std::string policy_path;
  std::string mode = "strong_alg1";
  std::string out_model;
  std::string metrics;
  bool supervised = false;
  vidaug_train_config cfg{};
};

DatasetPtr load_split(const std::string& dir, bool required, int* err) {
  *err = 0;
  if (!fs::is_directory(dir)) {
    if (required) {
      std::cerr << "error: missing dataset split '" << dir << "'\n";
      *err = 1;
    }
    return nullptr;
  }
  vidaug_dataset* raw = nullptr;
  if (auto st = vidaug_dataset_load(dir.c_str(), &raw); st != VIDAUG_OK) {
    *err = fail(st);
    return nullptr;
  }
  return DatasetPtr(raw);
}

int run_train(const TrainArgs& args) {
  PolicyPtr policy;
  {
    vidaug_policy* raw = nullptr;
    vidaug_status st = args.policy_path.empty()
                           ? vidaug_policy_default(args.mode.c_str(), &raw)
                           : vidaug_policy_load(args.policy_path.c_str(), &raw);
    if (st != VIDAUG_OK) return fail(st);
    policy.reset(raw);
  }
  int err = 0;
  DatasetPtr labeled = load_split(args.data_dir + "/labeled", true, &err);
  if (err) return err;
  DatasetPtr unlabeled;
  if (!args.supervised) {
    unlabeled = load_split(args.data_dir + "/unlabeled", false, &err);
    if (err) return err;
  }
  DatasetPtr test_biased = load_split(args.data_dir + "/test_biased", false, &err);
  if (err) return err;
  DatasetPtr test_dec = load_split(args.data_dir + "/test_decorrelated", false, &err);
  if (err) return err;

  vidaug_model* model = nullptr;
  if (auto st = vidaug_train(labeled.get(), unlabeled.get(), test_biased.get(),
                             test_dec.get(), &args.cfg, policy.get(),
                             args.metrics.empty() ? nullptr : args.metrics.c_str(),
                             &model);
      st != VIDAUG_OK) {
    return fail(st);
  }
  ModelPtr owned(model);
  if (!args.out_model.empty()) {
    if (auto st = vidaug_model_save(owned.get(), args.out_model.c_str());
        st != VIDAUG_OK) {
      return fail(st);
    }
  }
  if (test_dec) {
    double acc = 0.0;
    if (vidaug_evaluate(owned.get(), test_dec.get(), &acc) == VIDAUG_OK) {
      std::cout << "test_acc_decorrelated=" << acc << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vidaug: video-clip augmentation and desk-scale SSL harness"};
  app.require_subcommand(1);

  // augment
  AugmentArgs aug;
  CLI::App* cmd_augment =
      app.add_subcommand("augment", "Apply an augmentation policy to clips");
  cmd_augment->add_option("--in", aug.inputs, ".vclip input paths")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_augment->add_option("--out", aug.out_dir, "output directory")->required();
  cmd_augment->add_option("--policy", aug.policy_path, "policy JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_augment->add_option("--boxes", aug.boxes_path, "detector box file (JSONL)")
      ->check(CLI::ExistingFile);
  cmd_augment->add_option("--labels", aug.labels_path, "labels CSV for sidecars")
      ->check(CLI::ExistingFile);
  cmd_augment->add_option("--num-classes", aug.num_classes,
                          "class count for --labels (default max index + 1)");
  cmd_augment->add_option("--threshold", aug.threshold,
                          "detector score threshold")
      ->check(CLI::Range(0.0, 1.0));
  cmd_augment->add_option("--seed", aug.seed, "base seed");

  // rasterize
  std::string ras_boxes, ras_clip, ras_out;
  double ras_threshold = 0.5;
  CLI::App* cmd_rasterize = app.add_subcommand(
      "rasterize", "Rasterize cached detector boxes into a binary mask");
  cmd_rasterize->add_option("--boxes", ras_boxes, "detector box file (JSONL)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_rasterize->add_option("--clip", ras_clip, "clip the boxes belong to")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_rasterize->add_option("--out", ras_out, "output mask (.vclip, c=1, 0/1)")
      ->required();
  cmd_rasterize->add_option("--threshold", ras_threshold, "score threshold")
      ->check(CLI::Range(0.0, 1.0));

  // gen-data
  vidaug_synth_spec spec;
  vidaug_synth_spec_defaults(&spec);
  std::string gen_out;
  CLI::App* cmd_gen =
      app.add_subcommand("gen-data", "Generate the synthetic scene-biased dataset");
  cmd_gen->add_option("--out", gen_out, "output directory")->required();
  cmd_gen->add_option("--classes", spec.k_classes, "number of classes");
  cmd_gen->add_option("--frames", spec.t, "frames per clip");
  cmd_gen->add_option("--height", spec.h, "frame height");
  cmd_gen->add_option("--width", spec.w, "frame width");
  cmd_gen->add_option("--channels", spec.c, "channels (1 or 3)");
  cmd_gen->add_option("--labeled-per-class", spec.labeled_per_class, "");
  cmd_gen->add_option("--unlabeled-per-class", spec.unlabeled_per_class, "");
  cmd_gen->add_option("--test-per-class", spec.test_per_class, "");
  cmd_gen->add_option("--scene-bias", spec.scene_bias,
                      "P(background texture matches the class)")
      ->check(CLI::Range(0.0, 1.0));
  cmd_gen->add_option("--test-bias", spec.test_bias,
                      "bias of the decorrelated test split (<0 means 1/K)");
  cmd_gen->add_option("--seed", spec.seed, "generator seed");

  // train
  TrainArgs tr;
  vidaug_train_config_defaults(&tr.cfg);
  CLI::App* cmd_train = app.add_subcommand("train", "Train the desk-scale classifier");
  cmd_train->add_option("--data", tr.data_dir,
                        "dataset root (labeled/, unlabeled/, test_*/)")
      ->required()
      ->check(CLI::ExistingDirectory);
  cmd_train->add_option("--policy", tr.policy_path, "strong policy JSON")
      ->check(CLI::ExistingFile);
  cmd_train->add_option("--mode", tr.mode,
                        "strong policy mode when --policy is not given");
  cmd_train->add_option("--out-model", tr.out_model, "checkpoint output path");
  cmd_train->add_option("--metrics", tr.metrics, "metrics CSV output path");
  cmd_train->add_flag("--supervised", tr.supervised, "ignore the unlabeled split");
  cmd_train->add_option("--tau", tr.cfg.tau, "pseudo-label threshold");
  cmd_train->add_option("--lambda-u", tr.cfg.lambda_u, "unlabeled loss weight");
  cmd_train->add_option("--batch-labeled", tr.cfg.batch_labeled, "");
  cmd_train->add_option("--batch-unlabeled", tr.cfg.batch_unlabeled, "");
  cmd_train->add_option("--lr", tr.cfg.lr, "initial learning rate");
  cmd_train->add_option("--momentum", tr.cfg.momentum, "");
  cmd_train->add_option("--weight-decay", tr.cfg.weight_decay, "");
  cmd_train->add_option("--epochs", tr.cfg.epochs, "");
  cmd_train->add_option("--seed", tr.cfg.seed, "");
  cmd_train->add_flag("--strong-labeled", tr.cfg.strong_labeled,
                      "strong augmentation on the labeled branch");

  // eval
  std::string eval_model, eval_data;
  CLI::App* cmd_eval = app.add_subcommand("eval", "Evaluate a checkpoint");
  cmd_eval->add_option("--model", eval_model, "checkpoint path")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_eval->add_option("--data", eval_data, "split directory")
      ->required()
      ->check(CLI::ExistingDirectory);

  // ablate
  std::string abl_recipe, abl_csv, abl_ckpt;
  uint32_t abl_seeds = 5;
  uint64_t abl_base_seed = 1;
  CLI::App* cmd_ablate =
      app.add_subcommand("ablate", "Run a desk-scale ablation recipe");
  cmd_ablate->add_option("--recipe", abl_recipe, vidaug_recipe_names())->required();
  cmd_ablate->add_option("--out-csv", abl_csv, "result table")->required();
  cmd_ablate->add_option("--seeds", abl_seeds, "number of seeds");
  cmd_ablate->add_option("--base-seed", abl_base_seed, "first seed");
  cmd_ablate->add_option("--ckpt-dir", abl_ckpt, "write per-run checkpoints here");

  // inspect
  std::string ins_in, ins_out;
  CLI::App* cmd_inspect =
      app.add_subcommand("inspect", "Write a frame-strip image of a clip");
  cmd_inspect->add_option("--in", ins_in, "input .vclip")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_inspect->add_option("--strip-out", ins_out, "output PGM/PPM path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (cmd_augment->parsed()) return run_augment(aug);

  if (cmd_rasterize->parsed()) {
    vidaug_clip* clip_raw = nullptr;
    if (auto st = vidaug_clip_load(ras_clip.c_str(), &clip_raw); st != VIDAUG_OK) {
      return fail(st);
    }
    ClipPtr clip(clip_raw);
    vidaug_boxes* boxes_raw = nullptr;
    if (auto st = vidaug_boxes_load(ras_boxes.c_str(), &boxes_raw); st != VIDAUG_OK) {
      return fail(st);
    }
    BoxesPtr boxes(boxes_raw);
    uint32_t t, h, w, c;
    vidaug_clip_dims(clip.get(), &t, &h, &w, &c);
    vidaug_mask* mask_raw = nullptr;
    if (auto st = vidaug_rasterize(boxes.get(), vidaug_clip_id(clip.get()), t,
                                   h, w, ras_threshold, &mask_raw);
        st != VIDAUG_OK) {
      return fail(st);
    }
    MaskPtr mask(mask_raw);
    if (auto st = vidaug_mask_save(mask.get(), ras_out.c_str()); st != VIDAUG_OK) {
      return fail(st);
    }
    std::cout << "foreground_ratio=" << vidaug_mask_foreground_ratio(mask.get())
              << "\n";
    return 0;
  }

  if (cmd_gen->parsed()) {
    if (auto st = vidaug_generate_synthetic(&spec, gen_out.c_str()); st != VIDAUG_OK) {
      return fail(st);
    }
    return 0;
  }

  if (cmd_train->parsed()) return run_train(tr);

  if (cmd_eval->parsed()) {
    vidaug_model* model_raw = nullptr;
    if (auto st = vidaug_model_load(eval_model.c_str(), &model_raw); st != VIDAUG_OK) {
      return fail(st);
    }
    ModelPtr model(model_raw);
    vidaug_dataset* data_raw = nullptr;
    if (auto st = vidaug_dataset_load(eval_data.c_str(), &data_raw); st != VIDAUG_OK) {
      return fail(st);
    }
    DatasetPtr data(data_raw);
    double acc = 0.0;
    if (auto st = vidaug_evaluate(model.get(), data.get(), &acc); st != VIDAUG_OK) {
      return fail(st);
    }
    char line[64];
    std::snprintf(line, sizeof(line), "accuracy=%.6f\n", acc);
    std::cout << line;
    return 0;
  }

  if (cmd_ablate->parsed()) {
    if (auto st = vidaug_ablate(abl_recipe.c_str(), abl_csv.c_str(), abl_seeds,
                                abl_base_seed,
                                abl_ckpt.empty() ? nullptr : abl_ckpt.c_str());
        st != VIDAUG_OK) {
      return fail(st);
    }
    return 0;
  }

  if (cmd_inspect->parsed()) {
    vidaug_clip* clip_raw = nullptr;
    if (auto st = vidaug_clip_load(ins_in.c_str(), &clip_raw); st != VIDAUG_OK) {
      return fail(st);
    }
    ClipPtr clip(clip_raw);
    if (auto st = vidaug_clip_write_strip(clip.get(), ins_out.c_str());
        st != VIDAUG_OK) {
      return fail(st);
    }
    return 0;
  }
  return 2;
}

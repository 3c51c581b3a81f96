#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "csgan/config.hpp"
#include "csgan/evaluate.hpp"
#include "csgan/trainer.hpp"

namespace fs = std::filesystem;
using namespace csgan;

namespace {

struct CommonFlags {
  std::string config_path;
  std::map<std::string, std::string> overrides;
};

void add_override_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "run configuration file (key = value lines)");
  auto bind = [&f, cmd](const char* flag, const char* key, const char* help) {
    cmd->add_option_function<std::string>(
        flag, [&f, key](const std::string& v) { f.overrides[key] = v; }, help);
  };
  bind("--method", "method", "loss preset: gan, pix2pix, cyclegan, ps2gan, csgan");
  bind("--dataset-root", "dataset.root", "dataset root directory");
  bind("--layout", "dataset.layout", "dataset layout: split-folders or combined-AB");
  bind("--epochs", "train.epochs", "total training epochs");
  bind("--batch-size", "train.batch_size", "batch size");
  bind("--lr", "train.lr", "initial learning rate");
  bind("--lambda", "train.lambda", "cycle-consistency weight (both domains)");
  bind("--mu", "train.mu", "cyclic-synthesized weight (both domains)");
  bind("--seed", "train.seed", "training seed");
  bind("--image-size", "dataset.image_size", "square image side");
  bind("--metrics", "eval.metrics", "comma list from mse,psnr,ssim,lpips");
  bind("--direction", "eval.direction", "AtoB or BtoA");
  bind("--out", "output_dir", "output directory");
  bind("--base-width", "net.base_width", "generator base channel width");
  bind("--res-blocks", "net.n_residual_blocks", "number of residual blocks");
}

RunConfig resolve(const CommonFlags& f) {
  ConfigMap map;
  if (!f.config_path.empty()) map = parse_config_file(f.config_path);
  for (const auto& [k, v] : f.overrides) map[k] = v;
  return run_config_from_map(map);
}

PairedDataset load_split(const RunConfig& cfg, DatasetSplit split) {
  require(!cfg.dataset_root.empty(), "no dataset root configured (dataset.root / --dataset-root)");
  PairedDataset ds = load_paired_dataset(cfg.dataset_root, cfg.layout, split, cfg.image_size, cfg.dataset_name);
  if (cfg.swap_domains)
    for (auto& item : ds.items) std::swap(item.a, item.b);
  return ds;
}

ModelBundle<float> bundle_for(const RunConfig& cfg) { return build_bundle<float>(cfg.gen, cfg.disc); }

int cmd_train(const CommonFlags& f, const std::string& resume) {
  RunConfig cfg = resolve(f);
  fs::create_directories(cfg.output_dir);
  std::ofstream snap(cfg.output_dir + "/config.resolved.txt");
  snap << run_config_to_text(cfg);
  snap.close();
  PairedDataset ds = load_split(cfg, DatasetSplit::train);
  std::cout << "training " << cfg.method << " on " << ds.name << " (" << ds.size() << " pairs, "
            << cfg.train.epochs_total << " epochs)\n";
  TrainHooks hooks;
  hooks.on_epoch = [&](int epoch) {
    if (epoch % 10 == 0 || epoch == cfg.train.epochs_total) std::cout << "epoch " << epoch << " done\n";
  };
  train<float>(cfg.train, cfg.gen, cfg.disc, ds, cfg.output_dir, resume, hooks);
  std::cout << "done; checkpoints and loss.csv in " << cfg.output_dir << '\n';
  return 0;
}

int cmd_eval(const CommonFlags& f, const std::string& checkpoint) {
  RunConfig cfg = resolve(f);
  PairedDataset ds = load_split(cfg, DatasetSplit::test);
  ModelBundle<float> m = bundle_for(cfg);
  load_checkpoint_params(checkpoint, m, model_fingerprint(cfg.gen, cfg.disc, cfg.train.objective));
  std::unique_ptr<FeatureProvider> lpips;
  if (!cfg.lpips_weights.empty()) lpips = load_feature_provider(cfg.lpips_weights);
  MetricReport r = evaluate_dataset(m, ds, cfg.eval_direction, cfg.eval_metrics, lpips.get(), cfg.method);
  fs::create_directories(cfg.output_dir);
  std::ofstream(cfg.output_dir + "/report.csv") << report_csv(r);
  std::ofstream(cfg.output_dir + "/report.md") << report_markdown(r);
  std::cout << report_markdown(r);
  return 0;
}

int cmd_infer(const CommonFlags& f, const std::string& checkpoint, const std::string& input,
              const std::string& output) {
  RunConfig cfg = resolve(f);
  ModelBundle<float> m = bundle_for(cfg);
  load_checkpoint_params(checkpoint, m, model_fingerprint(cfg.gen, cfg.disc, cfg.train.objective));
  ImageU8 img = load_image_rgb(input, cfg.image_size);
  ImageU8 out = translate_image(m, img, cfg.eval_direction);
  save_image_rgb(out, output);
  std::cout << "wrote " << output << '\n';
  return 0;
}

int cmd_grid(const CommonFlags& f, const std::vector<std::string>& checkpoints, int n_samples, int grid_seed,
             const std::string& output) {
  RunConfig cfg = resolve(f);
  require(!checkpoints.empty(), "grid needs at least one checkpoint");
  PairedDataset ds = load_split(cfg, DatasetSplit::test);
  if (n_samples > static_cast<int>(ds.size())) {
    std::cerr << "warning: n_samples clamped to test split size " << ds.size() << '\n';
    n_samples = static_cast<int>(ds.size());
  }
  std::vector<size_t> pick(ds.size());
  std::iota(pick.begin(), pick.end(), size_t{0});
  if (grid_seed >= 0) {
    std::mt19937 rng(static_cast<uint32_t>(grid_seed));
    std::shuffle(pick.begin(), pick.end(), rng);
  }
  pick.resize(n_samples);

  std::vector<ModelBundle<float>> models;
  for (const auto& ck : checkpoints) {
    models.push_back(bundle_for(cfg));
    load_checkpoint_params(ck, models.back(), model_fingerprint(cfg.gen, cfg.disc, cfg.train.objective));
  }

  // rows = samples; columns = input, ground truth, one per checkpoint
  const int side = cfg.image_size;
  const int cols = 2 + static_cast<int>(models.size());
  ImageU8 grid;
  grid.c = 3;
  grid.h = side * n_samples;
  grid.w = side * cols;
  grid.pix.assign(static_cast<size_t>(3) * grid.h * grid.w, 255);
  auto blit = [&](const ImageU8& img, int row, int col) {
    for (int c = 0; c < 3; ++c)
      for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x) grid.at(c, row * side + y, col * side + x) = img.at(c, y, x);
  };
  for (int r = 0; r < n_samples; ++r) {
    const auto& pair = ds.items[pick[r]];
    const ImageU8& input = cfg.eval_direction == Direction::a_to_b ? pair.a : pair.b;
    const ImageU8& truth = cfg.eval_direction == Direction::a_to_b ? pair.b : pair.a;
    blit(input, r, 0);
    blit(truth, r, 1);
    for (size_t mcol = 0; mcol < models.size(); ++mcol)
      blit(translate_image(models[mcol], input, cfg.eval_direction), r, 2 + static_cast<int>(mcol));
  }
  save_image_rgb(grid, output);
  std::cout << "wrote " << output << " (" << n_samples << " rows x " << cols << " columns)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CSGAN bidirectional image-to-image translation"};
  app.require_subcommand(1);

  CommonFlags ftrain, feval, finfer, fgrid;
  std::string resume, checkpoint, input, output = "output.png";
  std::vector<std::string> checkpoints;
  int n_samples = 4, grid_seed = -1;

  auto* train_cmd = app.add_subcommand("train", "train a model");
  add_override_flags(train_cmd, ftrain);
  train_cmd->add_option("--resume", resume, "checkpoint to resume from");

  auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on the test split");
  add_override_flags(eval_cmd, feval);
  eval_cmd->add_option("--checkpoint", checkpoint, "trained checkpoint")->required();

  auto* infer_cmd = app.add_subcommand("infer", "translate a single image");
  add_override_flags(infer_cmd, finfer);
  infer_cmd->add_option("--checkpoint", checkpoint, "trained checkpoint")->required();
  infer_cmd->add_option("--input", input, "input image")->required();
  infer_cmd->add_option("--output", output, "output image path");

  auto* grid_cmd = app.add_subcommand("grid", "qualitative comparison grid");
  add_override_flags(grid_cmd, fgrid);
  grid_cmd->add_option("--checkpoint", checkpoints, "one checkpoint per method column")->required();
  grid_cmd->add_option("--n", n_samples, "number of sample rows");
  grid_cmd->add_option("--grid-seed", grid_seed, "shuffle sample selection (default: first n in sorted order)");
  grid_cmd->add_option("--output", output, "grid image path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train_cmd->parsed()) return cmd_train(ftrain, resume);
    if (eval_cmd->parsed()) return cmd_eval(feval, checkpoint);
    if (infer_cmd->parsed()) return cmd_infer(finfer, checkpoint, input, output);
    if (grid_cmd->parsed()) return cmd_grid(fgrid, checkpoints, n_samples, grid_seed, output);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

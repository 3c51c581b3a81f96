#pragma once

#include <map>
#include <string>

#include "csgan/data.hpp"
#include "csgan/evaluate.hpp"
#include "csgan/trainer.hpp"

namespace csgan {

// Flat key-value run configuration with dotted sections, e.g.
//   dataset.root = /data/cuhk
//   train.epochs = 200
// '#' starts a comment. Flags override file values.
using ConfigMap = std::map<std::string, std::string>;

ConfigMap parse_config_file(const std::string& path);
ConfigMap parse_config_text(const std::string& text);

struct RunConfig {
  std::string dataset_root;
  DatasetLayout layout = DatasetLayout::split_folders;
  std::string dataset_name;
  int image_size = 256;
  bool swap_domains = false;  // which folder plays domain A

  std::string method = "csgan";
  TrainConfig train;
  GeneratorConfig gen;
  DiscriminatorConfig disc;

  std::vector<std::string> eval_metrics = {"mse", "psnr", "ssim", "lpips"};
  Direction eval_direction = Direction::a_to_b;
  std::string lpips_weights;  // empty: LPIPS reported unavailable

  std::string output_dir;
};

// Builds a RunConfig from a key map; rejects unknown keys with the valid set.
RunConfig run_config_from_map(const ConfigMap& map);

// Serialization used for the resolved-config snapshot (parses back losslessly).
std::string run_config_to_text(const RunConfig& cfg);

std::string default_output_root();  // $CSGAN_OUT_DIR or "./runs"

}  // namespace csgan

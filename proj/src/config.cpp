#include "csgan/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace csgan {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

ConfigMap parse_config_text(const std::string& text) {
  ConfigMap map;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected 'key = value'");
    map[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return map;
}

ConfigMap parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_config_text(buf.str());
}

namespace {

const char* kValidKeys[] = {
    "dataset.root",       "dataset.layout",        "dataset.name",         "dataset.image_size",
    "dataset.swap_domains", "method",              "train.epochs",         "train.epochs_constant",
    "train.lr",           "train.beta1",           "train.beta2",          "train.batch_size",
    "train.seed",         "train.init_std",        "train.checkpoint_every", "train.lambda",
    "train.mu",           "train.d_first",         "train.d_steps",        "train.hflip",
    "train.halve_d_loss", "train.image_pool",      "net.base_width",       "net.n_residual_blocks",
    "eval.metrics",       "eval.direction",        "lpips.weights",        "output_dir",
};

bool to_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("config key '" + key + "': expected a boolean, got '" + v + "'");
}

std::vector<std::string> split_csv(const std::string& v) {
  std::vector<std::string> out;
  std::istringstream is(v);
  std::string item;
  while (std::getline(is, item, ','))
    if (!trim(item).empty()) out.push_back(trim(item));
  return out;
}

}  // namespace

RunConfig run_config_from_map(const ConfigMap& map) {
  for (const auto& [k, v] : map) {
    bool known = false;
    for (const char* key : kValidKeys) known |= (k == key);
    if (!known) {
      std::string valid;
      for (const char* key : kValidKeys) valid += std::string(valid.empty() ? "" : ", ") + key;
      throw std::invalid_argument("unknown config key '" + k + "'; valid keys: " + valid);
    }
  }
  RunConfig cfg;
  auto get = [&](const char* k) -> const std::string* {
    auto it = map.find(k);
    return it == map.end() ? nullptr : &it->second;
  };
  auto geti = [&](const char* k, int& dst) {
    if (auto* v = get(k)) dst = std::stoi(*v);
  };
  auto getd = [&](const char* k, double& dst) {
    if (auto* v = get(k)) dst = std::stod(*v);
  };
  auto getb = [&](const char* k, bool& dst) {
    if (auto* v = get(k)) dst = to_bool(*v, k);
  };

  if (auto* v = get("dataset.root")) cfg.dataset_root = *v;
  if (auto* v = get("dataset.layout")) cfg.layout = parse_layout(*v);
  if (auto* v = get("dataset.name")) cfg.dataset_name = *v;
  geti("dataset.image_size", cfg.image_size);
  getb("dataset.swap_domains", cfg.swap_domains);

  if (auto* v = get("method")) cfg.method = *v;
  cfg.train.objective = make_preset(cfg.method);

  geti("train.epochs", cfg.train.epochs_total);
  geti("train.epochs_constant", cfg.train.epochs_constant);
  if (!get("train.epochs_constant")) cfg.train.epochs_constant = std::min(cfg.train.epochs_total, 100);
  getd("train.lr", cfg.train.lr_initial);
  getd("train.beta1", cfg.train.adam_beta1);
  getd("train.beta2", cfg.train.adam_beta2);
  geti("train.batch_size", cfg.train.batch_size);
  if (auto* v = get("train.seed")) cfg.train.seed = static_cast<uint32_t>(std::stoul(*v));
  getd("train.init_std", cfg.train.init_std);
  geti("train.checkpoint_every", cfg.train.checkpoint_every);
  if (auto* v = get("train.lambda")) {
    const double l = std::stod(*v);
    cfg.train.objective.weights.lambda_a = cfg.train.objective.weights.lambda_b = l;
  }
  if (auto* v = get("train.mu")) {
    const double mu = std::stod(*v);
    cfg.train.objective.weights.mu_a = cfg.train.objective.weights.mu_b = mu;
  }
  getb("train.d_first", cfg.train.discriminators_first);
  geti("train.d_steps", cfg.train.d_steps);
  getb("train.hflip", cfg.train.augment_hflip);
  getb("train.halve_d_loss", cfg.train.objective.halve_d_loss);
  getb("train.image_pool", cfg.train.use_image_pool);

  geti("net.base_width", cfg.gen.base_width);
  geti("net.n_residual_blocks", cfg.gen.n_residual_blocks);
  cfg.gen.image_size = cfg.image_size;
  if (cfg.gen.base_width != 64) {
    cfg.disc.widths = {cfg.gen.base_width, cfg.gen.base_width * 2, cfg.gen.base_width * 4, cfg.gen.base_width * 8};
  }
  cfg.disc.in_channels = cfg.train.objective.conditional_d ? 6 : 3;

  if (auto* v = get("eval.metrics")) cfg.eval_metrics = split_csv(*v);
  if (auto* v = get("eval.direction")) cfg.eval_direction = parse_direction(*v);
  if (auto* v = get("lpips.weights")) cfg.lpips_weights = *v;
  if (auto* v = get("output_dir")) cfg.output_dir = *v;
  if (cfg.output_dir.empty()) cfg.output_dir = default_output_root() + "/run";
  return cfg;
}

std::string run_config_to_text(const RunConfig& cfg) {
  std::ostringstream os;
  os.precision(12);
  os << "dataset.root = " << cfg.dataset_root << '\n'
     << "dataset.layout = " << (cfg.layout == DatasetLayout::split_folders ? "split-folders" : "combined-AB") << '\n'
     << "dataset.name = " << cfg.dataset_name << '\n'
     << "dataset.image_size = " << cfg.image_size << '\n'
     << "dataset.swap_domains = " << (cfg.swap_domains ? "true" : "false") << '\n'
     << "method = " << cfg.method << '\n'
     << "train.epochs = " << cfg.train.epochs_total << '\n'
     << "train.epochs_constant = " << cfg.train.epochs_constant << '\n'
     << "train.lr = " << cfg.train.lr_initial << '\n'
     << "train.beta1 = " << cfg.train.adam_beta1 << '\n'
     << "train.beta2 = " << cfg.train.adam_beta2 << '\n'
     << "train.batch_size = " << cfg.train.batch_size << '\n'
     << "train.seed = " << cfg.train.seed << '\n'
     << "train.init_std = " << cfg.train.init_std << '\n'
     << "train.checkpoint_every = " << cfg.train.checkpoint_every << '\n'
     << "train.lambda = " << cfg.train.objective.weights.lambda_a << '\n'
     << "train.mu = " << cfg.train.objective.weights.mu_a << '\n'
     << "train.d_first = " << (cfg.train.discriminators_first ? "true" : "false") << '\n'
     << "train.d_steps = " << cfg.train.d_steps << '\n'
     << "train.hflip = " << (cfg.train.augment_hflip ? "true" : "false") << '\n'
     << "train.halve_d_loss = " << (cfg.train.objective.halve_d_loss ? "true" : "false") << '\n'
     << "train.image_pool = " << (cfg.train.use_image_pool ? "true" : "false") << '\n'
     << "net.base_width = " << cfg.gen.base_width << '\n'
     << "net.n_residual_blocks = " << cfg.gen.n_residual_blocks << '\n';
  os << "eval.metrics = ";
  for (size_t i = 0; i < cfg.eval_metrics.size(); ++i) os << (i ? "," : "") << cfg.eval_metrics[i];
  os << '\n';
  os << "eval.direction = " << (cfg.eval_direction == Direction::a_to_b ? "AtoB" : "BtoA") << '\n';
  if (!cfg.lpips_weights.empty()) os << "lpips.weights = " << cfg.lpips_weights << '\n';
  os << "output_dir = " << cfg.output_dir << '\n';
  return os.str();
}

std::string default_output_root() {
  if (const char* env = std::getenv("CSGAN_OUT_DIR")) return env;
  return "./runs";
}

}  // namespace csgan

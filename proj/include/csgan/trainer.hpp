#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "csgan/adam.hpp"
#include "csgan/checkpoint.hpp"
#include "csgan/data.hpp"
#include "csgan/objectives.hpp"

namespace csgan {

// History buffer of generated images for discriminator updates. Each query
// either passes a fake through or swaps it for a stored one, 50/50.
template <typename T>
class ImagePool {
 public:
  ImagePool(size_t capacity, uint32_t seed) : capacity_(capacity), rng_(seed) {}

  Tensor<T> query(const Tensor<T>& fakes) {
    if (capacity_ == 0) return fakes;
    Tensor<T> out = fakes;
    const size_t img_sz = static_cast<size_t>(fakes.c()) * fakes.h() * fakes.w();
    for (int n = 0; n < fakes.n(); ++n) {
      std::vector<T> img(fakes.data() + n * img_sz, fakes.data() + (n + 1) * img_sz);
      if (store_.size() < capacity_) {
        store_.push_back(std::move(img));
      } else if (std::uniform_int_distribution<int>(0, 1)(rng_)) {
        const size_t j = std::uniform_int_distribution<size_t>(0, store_.size() - 1)(rng_);
        std::swap(img, store_[j]);
        std::copy(img.begin(), img.end(), out.data() + n * img_sz);
      }
    }
    return out;
  }

 private:
  size_t capacity_;
  std::mt19937 rng_;
  std::vector<std::vector<T>> store_;
};

struct TrainConfig {
  int epochs_total = 200;
  int epochs_constant = 100;  // constant-lr phase, then linear decay to 0
  double lr_initial = 2e-4;
  double adam_beta1 = 0.5;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int batch_size = 2;
  uint32_t seed = 1;
  double init_mean = 0.0;
  double init_std = 0.02;
  ObjectiveSpec objective;
  int checkpoint_every = 50;
  bool discriminators_first = false;  // ablation: swap G/D update order
  int d_steps = 1;                    // D updates per G update
  bool augment_hflip = false;
  bool use_image_pool = false;  // pool state is not checkpointed
  int image_pool_size = 50;

  void validate() const {
    require(epochs_constant <= epochs_total, "epochs_constant must not exceed epochs_total");
    require(lr_initial > 0, "lr_initial must be positive");
    require(batch_size >= 1, "batch_size must be >= 1");
    require(init_std > 0, "init_std must be positive");
  }
};

// Epochs are 1-based. Constant for the first epochs_constant epochs, then
// linear decay reaching exactly 0 at epochs_total.
inline double lr_at(int epoch, const TrainConfig& cfg) {
  require(epoch >= 1 && epoch <= cfg.epochs_total, "epoch out of range [1, epochs_total]");
  if (epoch <= cfg.epochs_constant) return cfg.lr_initial;
  const double t = static_cast<double>(epoch - cfg.epochs_constant) /
                   static_cast<double>(cfg.epochs_total - cfg.epochs_constant);
  return cfg.lr_initial * (1.0 - t);
}

inline uint64_t model_fingerprint(const GeneratorConfig& g, const DiscriminatorConfig& d, const ObjectiveSpec& spec) {
  std::ostringstream os;
  os << g.in_channels << ',' << g.out_channels << ',' << g.base_width << ',' << g.n_residual_blocks << ','
     << g.image_size << '|' << d.in_channels << ',' << d.kernel << ',' << d.leaky_slope << ',';
  for (int w : d.widths) os << w << ';';
  os << '|' << method_name(spec.method) << ',' << spec.conditional_d << ',' << spec.bidirectional;
  return fnv1a(os.str());
}

// One joint update on a batch already in model range. Generators first, then
// discriminators (swappable). Returns the losses as seen before each update.
template <typename T>
LossBreakdown training_step(ModelBundle<T>& m, const Tensor<T>& real_a, const Tensor<T>& real_b,
                            const ObjectiveSpec& spec, Adam<T>& opt_g, Adam<T>& opt_d, double lr,
                            bool discriminators_first = false, int d_steps = 1, ImagePool<T>* pool_a = nullptr,
                            ImagePool<T>* pool_b = nullptr) {
  LossBreakdown parts;
  CyclePass<T> pass;

  auto update_g = [&] {
    m.g_ab.zero_grad();
    m.g_ba.zero_grad();
    m.d_a.zero_grad();
    m.d_b.zero_grad();
    parts = generator_losses(m, real_a, real_b, spec, &pass, /*do_backward=*/true);
    opt_g.step(lr);
  };
  auto update_d = [&] {
    CyclePass<T> d_fakes;
    d_fakes.syn_a = (pool_a && spec.bidirectional) ? pool_a->query(pass.syn_a) : pass.syn_a;
    d_fakes.syn_b = pool_b ? pool_b->query(pass.syn_b) : pass.syn_b;
    for (int i = 0; i < d_steps; ++i) {
      // grads polluted by the adversarial backprop of the G pass
      m.d_a.zero_grad();
      m.d_b.zero_grad();
      auto [da, db] = discriminator_losses(m, real_a, real_b, d_fakes, spec, /*do_backward=*/true);
      if (i == 0) {
        parts.d_a = da;
        parts.d_b = db;
        parts.total_d = da + db;
      }
      opt_d.step(lr);
    }
  };

  if (discriminators_first) {
    generator_losses(m, real_a, real_b, spec, &pass, /*do_backward=*/false);
    update_d();
    update_g();
  } else {
    update_g();
    update_d();
  }
  return parts;
}

struct TrainHooks {
  // called after every step with (epoch, step-in-epoch, losses)
  std::function<void(int, int, const LossBreakdown&)> on_step;
  // called after every epoch
  std::function<void(int)> on_epoch;
};

inline std::string loss_csv_header() { return "epoch,step,adv_A,adv_B,cyc_A,cyc_B,cs_A,cs_B,total_G,total_D,lr"; }

inline std::string loss_csv_row(int epoch, int step, const LossBreakdown& l, double lr) {
  std::ostringstream os;
  os.precision(10);
  os << epoch << ',' << step << ',' << l.adv_a << ',' << l.adv_b << ',' << l.cyc_a << ',' << l.cyc_b << ',' << l.cs_a
     << ',' << l.cs_b << ',' << l.total_g << ',' << l.total_d << ',' << lr;
  return os.str();
}

// Full training driver. Deterministic given (cfg.seed, cfg, dataset) on a
// fixed platform. Writes loss.csv (append-only) and periodic checkpoints
// under out_dir; resumes from `resume_checkpoint` when given.
template <typename T>
ModelBundle<T> train(const TrainConfig& cfg, const GeneratorConfig& gen_cfg, const DiscriminatorConfig& disc_cfg,
                     const PairedDataset& ds, const std::string& out_dir, const std::string& resume_checkpoint = "",
                     const TrainHooks& hooks = {}) {
  cfg.validate();
  require(ds.size() > 0, "training dataset is empty");
  std::filesystem::create_directories(out_dir);

  ModelBundle<T> m = build_bundle<T>(gen_cfg, disc_cfg);
  init_bundle(m, static_cast<T>(cfg.init_mean), static_cast<T>(cfg.init_std), cfg.seed);

  auto cat = [](std::vector<ParamView<T>> a, const std::vector<ParamView<T>>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };
  Adam<T> opt_g(cat(m.g_ab.params(), m.g_ba.params()), cat(m.g_ab.grads(), m.g_ba.grads()), cfg.adam_beta1,
                cfg.adam_beta2, cfg.adam_eps);
  Adam<T> opt_d(cat(m.d_a.params(), m.d_b.params()), cat(m.d_a.grads(), m.d_b.grads()), cfg.adam_beta1, cfg.adam_beta2,
                cfg.adam_eps);

  const uint64_t fp = model_fingerprint(gen_cfg, disc_cfg, cfg.objective);
  int start_epoch = 0;
  if (!resume_checkpoint.empty()) start_epoch = load_checkpoint(resume_checkpoint, m, opt_g, opt_d, fp);

  const std::string csv_path = out_dir + "/loss.csv";
  std::ofstream csv(csv_path, start_epoch == 0 ? std::ios::trunc : std::ios::app);
  if (start_epoch == 0) csv << loss_csv_header() << '\n';

  ImagePool<T> pool_a(cfg.use_image_pool ? cfg.image_pool_size : 0, cfg.seed ^ 0xa11ce5u);
  ImagePool<T> pool_b(cfg.use_image_pool ? cfg.image_pool_size : 0, cfg.seed ^ 0xb0bce5u);
  if (start_epoch == 0) save_checkpoint(out_dir + "/ckpt_epoch_0000.bin", m, opt_g, opt_d, 0, fp);

  for (int epoch = start_epoch + 1; epoch <= cfg.epochs_total; ++epoch) {
    const double lr = lr_at(epoch, cfg);
    auto batches = epoch_batches(ds.size(), cfg.batch_size, cfg.seed, epoch);
    int step = 0;
    for (const auto& idx : batches) {
      std::vector<uint8_t> flips;
      const std::vector<uint8_t>* flips_p = nullptr;
      if (cfg.augment_hflip) {
        std::mt19937 r(cfg.seed ^ (static_cast<uint32_t>(epoch) * 2654435761u + static_cast<uint32_t>(step)));
        flips.resize(idx.size());
        for (auto& f : flips) f = static_cast<uint8_t>(r() & 1u);
        flips_p = &flips;
      }
      auto [ra, rb] = ds.batch(idx, flips_p);
      LossBreakdown l;
      try {
        l = training_step(m, ra, rb, cfg.objective, opt_g, opt_d, lr, cfg.discriminators_first, cfg.d_steps,
                          cfg.use_image_pool ? &pool_a : nullptr, cfg.use_image_pool ? &pool_b : nullptr);
      } catch (const std::exception& e) {
        throw std::runtime_error("training aborted at epoch " + std::to_string(epoch) + " step " +
                                 std::to_string(step + 1) + ": " + e.what());
      }
      ++step;
      csv << loss_csv_row(epoch, step, l, lr) << '\n';
      if (hooks.on_step) hooks.on_step(epoch, step, l);
    }
    csv.flush();
    if (!csv) throw std::runtime_error("I/O error writing loss log " + csv_path);
    if (cfg.checkpoint_every > 0 && (epoch % cfg.checkpoint_every == 0 || epoch == cfg.epochs_total)) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "/ckpt_epoch_%04d.bin", epoch);
      save_checkpoint(out_dir + buf, m, opt_g, opt_d, epoch, fp);
    }
    if (hooks.on_epoch) hooks.on_epoch(epoch);
  }
  return m;
}

}  // namespace csgan

#include "wavehide/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "wavehide/rng.hpp"

namespace wavehide {

namespace {

enum SeedPurpose : std::uint64_t {
  kSeedShuffle = 1,
  kSeedAttack = 2,
  kSeedInvertCheck = 3,
  kSeedEval = 4,
};

void check_keys(const nlohmann::json& j,
                std::initializer_list<const char*> allowed,
                const char* where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) {
      if (it.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw std::invalid_argument(std::string("config: unknown key '") +
                                  it.key() + "' in " + where);
    }
  }
}

void validate_config(const TrainConfig& c) {
  if (c.epochs < 0) throw std::invalid_argument("config: epochs must be >= 0");
  if (c.batch_size <= 0 || c.batch_size % 2 != 0) {
    throw std::invalid_argument("config: batch_size must be positive and even");
  }
  if (c.lr0 <= 0.0) throw std::invalid_argument("config: lr0 must be > 0");
  if (c.lr_halving_period <= 0) {
    throw std::invalid_argument("config: lr_halving_period must be > 0");
  }
  if (c.image_size <= 0 || c.image_size % 2 != 0) {
    throw std::invalid_argument("config: image_size must be positive and even");
  }
  if (c.fill_passes < 1) {
    throw std::invalid_argument("config: fill_passes must be >= 1");
  }
}

}  // namespace

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
  check_keys(j,
             {"epochs", "batch_size", "lr0", "lr_halving_period", "stack",
              "image_size", "weights", "curriculum", "dropout_ramp", "mode",
              "fill_neighborhood", "fill_passes", "literal_mse3", "seed"},
             "top level");
  TrainConfig c;
  c.epochs = j.value("epochs", c.epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.lr0 = j.value("lr0", c.lr0);
  c.lr_halving_period = j.value("lr_halving_period", c.lr_halving_period);
  c.image_size = j.value("image_size", c.image_size);
  c.dropout_ramp = j.value("dropout_ramp", c.dropout_ramp);
  c.fill_passes = j.value("fill_passes", c.fill_passes);
  c.literal_mse3 = j.value("literal_mse3", c.literal_mse3);
  c.seed = j.value("seed", c.seed);
  if (j.contains("mode")) c.mode = parse_hide_mode(j.at("mode").get<std::string>());
  if (j.contains("fill_neighborhood")) {
    c.fill_neighborhood =
        parse_neighborhood(j.at("fill_neighborhood").get<std::string>());
  }
  if (j.contains("stack")) {
    const nlohmann::json& s = j.at("stack");
    check_keys(s,
               {"blocks", "channels", "clamp_k", "centered_sigma",
                "dense_layers", "growth"},
               "stack");
    c.stack.blocks = s.value("blocks", c.stack.blocks);
    c.stack.channels = s.value("channels", c.stack.channels);
    c.stack.clamp_k = s.value("clamp_k", c.stack.clamp_k);
    c.stack.centered_sigma = s.value("centered_sigma", c.stack.centered_sigma);
    c.stack.dense_layers = s.value("dense_layers", c.stack.dense_layers);
    c.stack.growth = s.value("growth", c.stack.growth);
  }
  if (j.contains("weights")) {
    const nlohmann::json& w = j.at("weights");
    check_keys(w, {"stego_mse", "stego_ssim", "recovery_mse", "recovery_ssim"},
               "weights");
    c.weights.stego_mse = w.value("stego_mse", c.weights.stego_mse);
    c.weights.stego_ssim = w.value("stego_ssim", c.weights.stego_ssim);
    c.weights.recovery_mse = w.value("recovery_mse", c.weights.recovery_mse);
    c.weights.recovery_ssim =
        w.value("recovery_ssim", c.weights.recovery_ssim);
  }
  if (j.contains("curriculum")) {
    for (const nlohmann::json& a : j.at("curriculum")) {
      c.curriculum.push_back(AttackSpec::from_json(a));
    }
  }
  validate_config(c);
  return c;
}

nlohmann::json TrainConfig::to_json() const {
  nlohmann::json j;
  j["epochs"] = epochs;
  j["batch_size"] = batch_size;
  j["lr0"] = lr0;
  j["lr_halving_period"] = lr_halving_period;
  j["stack"] = {{"blocks", stack.blocks},
                {"channels", stack.channels},
                {"clamp_k", stack.clamp_k},
                {"centered_sigma", stack.centered_sigma},
                {"dense_layers", stack.dense_layers},
                {"growth", stack.growth}};
  j["image_size"] = image_size;
  j["weights"] = {{"stego_mse", weights.stego_mse},
                  {"stego_ssim", weights.stego_ssim},
                  {"recovery_mse", weights.recovery_mse},
                  {"recovery_ssim", weights.recovery_ssim}};
  nlohmann::json cur = nlohmann::json::array();
  for (const AttackSpec& a : curriculum) cur.push_back(a.to_json());
  j["curriculum"] = cur;
  j["dropout_ramp"] = dropout_ramp;
  j["mode"] = hide_mode_name(mode);
  j["fill_neighborhood"] =
      fill_neighborhood == Neighborhood::Four ? "four" : "nine";
  j["fill_passes"] = fill_passes;
  j["literal_mse3"] = literal_mse3;
  j["seed"] = seed;
  return j;
}

double lr_at_epoch(const TrainConfig& config, int epoch) {
  return config.lr0 * std::pow(0.5, epoch / config.lr_halving_period);
}

double dropout_ratio_at_epoch(const TrainConfig& config, int epoch) {
  if (config.epochs <= 1) return 0.1;
  const double t = static_cast<double>(epoch) / (config.epochs - 1);
  return 0.1 + 0.8 * t;
}

namespace {

void check_dataset(const Dataset& data, const TrainConfig& config) {
  if (data.images.empty()) {
    throw std::invalid_argument("train: dataset is empty");
  }
  if (static_cast<int>(data.images.size()) < config.batch_size) {
    throw std::invalid_argument("train: dataset smaller than one batch");
  }
  const PlanarTensor& first = data.images.front();
  if (first.channels() * 4 != config.stack.channels) {
    throw std::invalid_argument(
        "train: stack channels must be 4x the image channels");
  }
  if (first.height() % 2 != 0 || first.width() % 2 != 0) {
    throw std::invalid_argument("train: image sides must be even");
  }
  for (const PlanarTensor& img : data.images) {
    if (!img.same_shape(first)) {
      throw std::invalid_argument("train: images must share one shape");
    }
  }
}

void assert_float_invertibility(const CouplingStack& stack, int channels,
                                int h, int w, std::uint64_t seed, int epoch) {
  std::mt19937_64 rng = make_engine(seed, epoch, 0, kSeedInvertCheck);
  PlanarTensor secret = random_uniform(rng, channels, h, w);
  PlanarTensor cover = random_uniform(rng, channels, h, w);
  StegoResult r = hide(secret, cover, stack, HideMode::Subtract);
  PlanarTensor rec =
      reveal(extract(r.stego, cover, HideMode::Subtract), stack);
  const double p = psnr(rec, secret);
  if (p < 100.0) {
    throw std::runtime_error(
        "float-mode invertibility check failed at epoch " +
        std::to_string(epoch) + ": recovery PSNR " + std::to_string(p));
  }
}

struct PairOutcome {
  double loss = 0.0;
  double psnr_stego = 0.0;
  double psnr_recovery = 0.0;
};

PairOutcome run_training_pair(const TrainConfig& config, CouplingStack& stack,
                              const PlanarTensor& cover_img,
                              const PlanarTensor& secret_img,
                              const AttackSpec* attack, int epoch,
                              std::uint64_t attack_seed, int npairs) {
  ad::Var cover = ad::constant(cover_img);
  ad::Var secret = ad::constant(secret_img);
  ad::Var s_e = encode_secret(secret, stack);
  ad::Var stego = config.mode == HideMode::Subtract ? ad::sub(cover, s_e)
                                                    : ad::add(cover, s_e);
  ad::Var s_e_hat;
  if (attack == nullptr) {
    s_e_hat = extract(stego, cover, config.mode);
  } else {
    switch (attack->kind) {
      case AttackSpec::Kind::Gaussian: {
        ad::Var received =
            attack_gaussian_node(stego, attack->sigma, attack_seed);
        s_e_hat = extract(received, cover, config.mode);
        break;
      }
      case AttackSpec::Kind::Dropout: {
        const double ratio = config.dropout_ramp
                                 ? dropout_ratio_at_epoch(config, epoch)
                                 : attack->ratio;
        DropoutNodeResult r = attack_dropout_node(stego, ratio, attack_seed);
        s_e_hat = field_fill_node(r.attacked, cover, r.mask, config.mode,
                                  config.fill_neighborhood, config.fill_passes);
        break;
      }
      case AttackSpec::Kind::Jpeg: {
        ad::Var received = attack_jpeg_node(stego, attack->qf);
        s_e_hat = extract(received, cover, config.mode);
        break;
      }
    }
  }
  ad::Var recovery = reveal(s_e_hat, stack);
  ad::Var loss = total_loss(cover, stego, secret, recovery, config.weights,
                            config.literal_mse3);
  ad::backward(ad::mul_scalar(loss, 1.0 / npairs));

  PairOutcome out;
  out.loss = loss->value[0];
  out.psnr_stego = psnr(stego->value, cover_img);
  out.psnr_recovery = psnr(recovery->value, secret_img);
  return out;
}

}  // namespace

TrainResult train_range(const TrainConfig& config, const Dataset& data,
                        CouplingStack& stack, AdamState& adam,
                        int start_epoch, int stop_epoch) {
  validate_config(config);
  check_dataset(data, config);
  std::vector<ad::Var> params = stack_parameters(stack);
  if (params.size() != adam.m.size()) {
    throw std::invalid_argument("train: optimizer state does not fit stack");
  }

  const int n = static_cast<int>(data.images.size());
  const int steps_per_epoch = n / config.batch_size;
  const int npairs = config.batch_size / 2;
  const PlanarTensor& first = data.images.front();
  const int end_epoch =
      stop_epoch < 0 ? config.epochs : std::min(stop_epoch, config.epochs);

  TrainResult result;
  for (int epoch = start_epoch; epoch < end_epoch; ++epoch) {
    const double lr = lr_at_epoch(config, epoch);

    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 shuffle_rng = make_engine(config.seed, epoch, 0,
                                              kSeedShuffle);
    std::shuffle(idx.begin(), idx.end(), shuffle_rng);

    EpochLog log;
    log.epoch = epoch;
    log.lr = lr;
    for (int step = 0; step < steps_per_epoch; ++step) {
      zero_grads(params);
      const AttackSpec* attack = nullptr;
      if (!config.curriculum.empty()) {
        const std::size_t global_step =
            static_cast<std::size_t>(epoch) * steps_per_epoch + step;
        attack = &config.curriculum[global_step % config.curriculum.size()];
      }
      for (int p = 0; p < npairs; ++p) {
        const PlanarTensor& cover =
            data.images[idx[step * config.batch_size + p]];
        const PlanarTensor& secret =
            data.images[idx[step * config.batch_size + npairs + p]];
        const std::uint64_t attack_seed = mix_seed(
            config.seed, epoch,
            static_cast<std::uint64_t>(step) * npairs + p, kSeedAttack);
        const PairOutcome out = run_training_pair(
            config, stack, cover, secret, attack, epoch, attack_seed, npairs);
        log.total_loss += out.loss;
        log.psnr_stego += out.psnr_stego;
        log.psnr_recovery += out.psnr_recovery;
      }
      adam_step(params, adam, lr);
    }
    const double total_pairs = static_cast<double>(steps_per_epoch) * npairs;
    log.total_loss /= total_pairs;
    log.psnr_stego /= total_pairs;
    log.psnr_recovery /= total_pairs;
    result.log.push_back(log);

    if ((epoch + 1) % 10 == 0) {
      assert_float_invertibility(stack, first.channels(), first.height(),
                                 first.width(), config.seed, epoch);
    }
  }
  return result;
}

TrainResult train(const TrainConfig& config, const Dataset& data,
                  CouplingStack& stack) {
  std::vector<ad::Var> params = stack_parameters(stack);
  AdamState adam = make_adam_state(params);
  return train_range(config, data, stack, adam, 0);
}

std::string format_metric(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_loss_csv(const std::string& path,
                    const std::vector<EpochLog>& log) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << "epoch,lr,total_loss,psnr_stego,psnr_recovery\n";
  for (const EpochLog& e : log) {
    f << e.epoch << ',' << format_metric(e.lr) << ','
      << format_metric(e.total_loss) << ',' << format_metric(e.psnr_stego)
      << ',' << format_metric(e.psnr_recovery) << '\n';
  }
  if (!f) throw std::runtime_error("write failed on " + path);
}

void save_checkpoint(const std::string& path, const CouplingStack& stack,
                     const AdamState& adam, int next_epoch,
                     const TrainConfig& config) {
  TensorContainer c;
  put_stack(c, stack);
  for (std::size_t i = 0; i < adam.m.size(); ++i) {
    c.put("adam.m." + std::to_string(i), adam.m[i]);
    c.put("adam.v." + std::to_string(i), adam.v[i]);
  }
  c.meta()["checkpoint"] = {{"next_epoch", next_epoch},
                            {"adam_step", adam.step},
                            {"config", config.to_json()}};
  c.save(path);
}

Checkpoint load_checkpoint(const std::string& path) {
  TensorContainer c = TensorContainer::load(path);
  if (!c.meta().contains("checkpoint")) {
    throw std::runtime_error(path + ": not a training checkpoint");
  }
  Checkpoint ck;
  ck.stack = stack_from_container(c);
  const nlohmann::json& meta = c.meta().at("checkpoint");
  ck.next_epoch = meta.at("next_epoch").get<int>();
  ck.config = TrainConfig::from_json(meta.at("config"));
  std::vector<ad::Var> params = stack_parameters(ck.stack);
  ck.adam = make_adam_state(params);
  ck.adam.step = meta.at("adam_step").get<long>();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const PlanarTensor& m = c.get("adam.m." + std::to_string(i));
    const PlanarTensor& v = c.get("adam.v." + std::to_string(i));
    if (!m.same_shape(ck.adam.m[i]) || !v.same_shape(ck.adam.v[i])) {
      throw std::runtime_error(path + ": optimizer tensor shape mismatch");
    }
    ck.adam.m[i] = m;
    ck.adam.v[i] = v;
  }
  return ck;
}

std::vector<EvalRow> evaluate(const CouplingStack& stack, const Dataset& data,
                              const std::vector<AttackSpec>& attacks,
                              const EvalOptions& options) {
  if (data.images.size() < 2) {
    throw std::invalid_argument("evaluate: need at least one cover/secret pair");
  }
  const int npairs = static_cast<int>(data.images.size()) / 2;

  std::vector<EvalRow> rows;
  for (int row = 0; row <= static_cast<int>(attacks.size()); ++row) {
    const AttackSpec* attack = row == 0 ? nullptr : &attacks[row - 1];
    EvalRow r;
    r.attack = attack ? attack->label() : "clean";
    for (int p = 0; p < npairs; ++p) {
      const PlanarTensor& cover = data.images[p];
      const PlanarTensor& secret = data.images[npairs + p];
      StegoResult h = hide(secret, cover, stack, options.mode);
      PlanarTensor transmitted =
          options.float_mode ? h.stego : h.stego_quantized;
      const bool dropout =
          attack && attack->kind == AttackSpec::Kind::Dropout;
      if (dropout && !options.float_mode) {
        transmitted = floor_lift_zeros(transmitted);
      }
      PlanarTensor s_e_hat;
      if (attack) {
        DropoutResult a = apply_attack(
            transmitted, *attack, mix_seed(options.seed, row, p, kSeedEval));
        if (dropout && options.use_fill) {
          DropMask mask = detect_mask(a.attacked);
          s_e_hat = field_fill(a.attacked, cover, mask, options.mode,
                               options.fill_neighborhood, options.fill_passes)
                        .s_e;
        } else {
          s_e_hat = extract(a.attacked, cover, options.mode);
        }
      } else {
        s_e_hat = extract(transmitted, cover, options.mode);
      }
      PlanarTensor recovery = reveal(s_e_hat, stack);
      const MetricReport sm = compare(transmitted, cover);
      const MetricReport rm = compare(recovery, secret);
      r.stego_vs_cover.mse += sm.mse;
      r.stego_vs_cover.psnr_db += sm.psnr_db;
      r.stego_vs_cover.ssim += sm.ssim;
      r.recovery_vs_secret.mse += rm.mse;
      r.recovery_vs_secret.psnr_db += rm.psnr_db;
      r.recovery_vs_secret.ssim += rm.ssim;
    }
    r.stego_vs_cover.mse /= npairs;
    r.stego_vs_cover.psnr_db /= npairs;
    r.stego_vs_cover.ssim /= npairs;
    r.recovery_vs_secret.mse /= npairs;
    r.recovery_vs_secret.psnr_db /= npairs;
    r.recovery_vs_secret.ssim /= npairs;
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace wavehide

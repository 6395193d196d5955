#ifndef WAVEHIDE_TRAINING_HPP
#define WAVEHIDE_TRAINING_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "wavehide/adam.hpp"
#include "wavehide/channel.hpp"
#include "wavehide/coupling.hpp"
#include "wavehide/pipeline.hpp"
#include "wavehide/quality.hpp"

namespace wavehide {

struct TrainConfig {
  int epochs = 130;
  int batch_size = 8;
  double lr0 = 1e-4;
  int lr_halving_period = 30;
  StackConfig stack;
  int image_size = 224;
  LossWeights weights;
  /// Attacks cycled round-robin across steps; empty = clean channel.
  std::vector<AttackSpec> curriculum;
  /// When a dropout step runs with ramping on, its ratio is ignored and the
  /// epoch's position in the run interpolates linearly from 0.1 to 0.9.
  bool dropout_ramp = true;
  HideMode mode = HideMode::Subtract;
  Neighborhood fill_neighborhood = Neighborhood::Nine;
  int fill_passes = 3;
  bool literal_mse3 = false;
  std::uint64_t seed = 0;

  /// Strict parse: any unrecognized key is an error naming the key.
  static TrainConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// lr = lr0 * 0.5^floor(epoch / period).
double lr_at_epoch(const TrainConfig& config, int epoch);
double dropout_ratio_at_epoch(const TrainConfig& config, int epoch);

struct EpochLog {
  int epoch = 0;
  double lr = 0.0;
  double total_loss = 0.0;     // mean over the epoch's pairs
  double psnr_stego = 0.0;     // float stego vs cover, mean over pairs
  double psnr_recovery = 0.0;  // revealed vs secret, mean over pairs
};

/// In-memory dataset; images must share one even-sided shape. Within each
/// batch the first half serve as covers and the second half as secrets.
struct Dataset {
  std::vector<PlanarTensor> images;
};

struct TrainResult {
  std::vector<EpochLog> log;
};

/// Runs epochs [start_epoch, stop_epoch), where stop_epoch < 0 means
/// config.epochs. Identical config, data, stack and optimizer state
/// reproduce the remaining epochs bit-exactly, so a resumed run continues
/// as if never interrupted.
TrainResult train_range(const TrainConfig& config, const Dataset& data,
                        CouplingStack& stack, AdamState& adam,
                        int start_epoch, int stop_epoch = -1);

/// Fresh optimizer, full run.
TrainResult train(const TrainConfig& config, const Dataset& data,
                  CouplingStack& stack);

/// Full-precision decimal form; infinities become the "inf"/"-inf" sentinel
/// used in CSV reports.
std::string format_metric(double v);

void write_loss_csv(const std::string& path, const std::vector<EpochLog>& log);

struct Checkpoint {
  CouplingStack stack;
  AdamState adam;
  int next_epoch = 0;
  TrainConfig config;
};

void save_checkpoint(const std::string& path, const CouplingStack& stack,
                     const AdamState& adam, int next_epoch,
                     const TrainConfig& config);
Checkpoint load_checkpoint(const std::string& path);

struct EvalOptions {
  HideMode mode = HideMode::Subtract;
  bool float_mode = false;  // skip quantization before the channel
  Neighborhood fill_neighborhood = Neighborhood::Nine;
  int fill_passes = 3;
  bool use_fill = true;  // dropout only: restore holes before revealing
  std::uint64_t seed = 0;
};

struct EvalRow {
  std::string attack;  // "clean" or AttackSpec::label()
  MetricReport stego_vs_cover;
  MetricReport recovery_vs_secret;
};

/// One clean row followed by one row per attack; each row averages the
/// dataset's cover/secret pairs.
std::vector<EvalRow> evaluate(const CouplingStack& stack, const Dataset& data,
                              const std::vector<AttackSpec>& attacks,
                              const EvalOptions& options);

}  // namespace wavehide

#endif

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wavehide/channel.hpp"
#include "wavehide/container.hpp"
#include "wavehide/cover_db.hpp"
#include "wavehide/coupling.hpp"
#include "wavehide/hash.hpp"
#include "wavehide/image.hpp"
#include "wavehide/image_io.hpp"
#include "wavehide/pipeline.hpp"
#include "wavehide/quality.hpp"
#include "wavehide/training.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace wavehide;

namespace {

// Companion paths share the output's stem: stego.png -> stego.sidecar.json.
fs::path sibling(const fs::path& p, const char* suffix) {
  fs::path q = p;
  q.replace_extension();
  q += suffix;
  return q;
}

std::string timestamp_utc() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
}

/// Tracks a command's output files (guarding against silent overwrites) and
/// emits the run manifest next to the primary output.
struct Run {
  std::string command;
  std::uint64_t seed = 0;
  bool force = false;
  std::string started = timestamp_utc();
  std::vector<fs::path> outputs;
  json extra = json::object();

  Run(std::string cmd, std::uint64_t seed_, bool force_)
      : command(std::move(cmd)), seed(seed_), force(force_) {}

  void guard(const fs::path& p) const {
    if (!force && fs::exists(p)) {
      throw std::runtime_error("refusing to overwrite '" + p.string() +
                               "' (pass --force)");
    }
  }
  void claim(const fs::path& p) {
    guard(p);
    outputs.push_back(p);
  }
  /// The manifest lives next to the primary output, so claim it first.
  void claim_primary(const fs::path& p) {
    claim(p);
    guard(sibling(p, ".manifest.json"));
  }

  void write_manifest() const {
    json m;
    m["command"] = command;
    m["seed"] = seed;
    m["started"] = started;
    m["finished"] = timestamp_utc();
    json outs = json::array();
    for (const fs::path& p : outputs) outs.push_back(p.string());
    m["outputs"] = outs;
    for (const auto& [k, v] : extra.items()) m[k] = v;
    write_text(sibling(outputs.front(), ".manifest.json"), m.dump(2) + "\n");
  }
};

/// Accepts inline JSON (first character '{' or '[') or a path to a file.
json load_json_arg(const std::string& arg, const char* what) {
  if (!arg.empty() && (arg.front() == '{' || arg.front() == '[')) {
    return json::parse(arg);
  }
  std::ifstream f(arg);
  if (!f) {
    throw std::runtime_error(std::string(what) + ": cannot open '" + arg +
                             "'");
  }
  return json::parse(f);
}

json load_json_file(const std::string& path, const char* what) {
  std::ifstream f(path);
  if (!f) {
    throw std::runtime_error(std::string(what) + ": cannot open '" + path +
                             "'");
  }
  return json::parse(f);
}

PlanarTensor load_image(const std::string& path) {
  return from_pixels(read_png(path));
}

std::string shape_string(const PlanarTensor& t) {
  return std::to_string(t.width()) + "x" + std::to_string(t.height());
}

void require_even_sides(const PlanarTensor& t, const std::string& path) {
  if (t.height() % 2 != 0 || t.width() % 2 != 0) {
    throw std::runtime_error("'" + path + "': dimensions must be even, got " +
                             shape_string(t));
  }
}

struct LoadedModel {
  CouplingStack stack;
  std::string hash;
};

LoadedModel load_model(const std::string& path) {
  if (path.empty()) throw std::runtime_error("--model is required");
  if (!fs::exists(path)) {
    throw std::runtime_error("model '" + path + "' not found");
  }
  return LoadedModel{load_stack(path), sha256_file_hex(path)};
}

struct Sidecar {
  std::string cover_id;
  HideMode mode = HideMode::Subtract;
  std::string model_hash;
  bool is_float = false;
  std::string stego_container;  // relative to the sidecar's directory
};

Sidecar read_sidecar(const fs::path& path) {
  const json j = load_json_file(path.string(), "sidecar");
  Sidecar s;
  s.cover_id = j.at("cover_id").get<std::string>();
  s.mode = parse_hide_mode(j.at("mode").get<std::string>());
  s.model_hash = j.value("model_hash", "");
  s.is_float = j.value("float", false);
  if (s.is_float) s.stego_container = j.at("stego_container").get<std::string>();
  return s;
}

Dataset load_dataset(const std::string& dir, int image_size, int limit) {
  std::vector<std::string> paths = list_pngs(dir);
  if (limit > 0 && static_cast<int>(paths.size()) > limit) paths.resize(limit);
  if (paths.empty()) {
    throw std::runtime_error("no PNG images in '" + dir + "'");
  }
  Dataset data;
  for (const std::string& p : paths) {
    PlanarTensor t = load_image(p);
    if (image_size > 0) {
      if (t.height() < image_size || t.width() < image_size) {
        throw std::runtime_error("'" + p + "' is smaller than the working size " +
                                 std::to_string(image_size));
      }
      t = crop_top_left(t, image_size, image_size);
    }
    if (!t.same_shape(data.images.empty() ? t : data.images.front())) {
      throw std::runtime_error("'" + p + "' (" + shape_string(t) +
                               ") does not match the rest of the dataset (" +
                               shape_string(data.images.front()) + ")");
    }
    require_even_sides(t, p);
    data.images.push_back(std::move(t));
  }
  return data;
}

const char* attack_kind_name(AttackSpec::Kind k) {
  switch (k) {
    case AttackSpec::Kind::Gaussian: return "gaussian";
    case AttackSpec::Kind::Dropout: return "dropout";
    case AttackSpec::Kind::Jpeg: return "jpeg";
  }
  return "?";
}

double attack_level(const AttackSpec& s) {
  switch (s.kind) {
    case AttackSpec::Kind::Gaussian: return s.sigma;
    case AttackSpec::Kind::Dropout: return s.ratio;
    case AttackSpec::Kind::Jpeg: return s.qf;
  }
  return 0.0;
}

std::string format_level(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::vector<AttackSpec> parse_attack_list(const std::string& arg) {
  if (arg.empty()) return {};
  const json j = load_json_arg(arg, "attacks");
  std::vector<AttackSpec> specs;
  if (j.is_array()) {
    for (const json& e : j) specs.push_back(AttackSpec::from_json(e));
  } else {
    specs.push_back(AttackSpec::from_json(j));
  }
  return specs;
}

// ---------------------------------------------------------------------------
// hide

struct HideArgs {
  std::string secret, cover, model, out;
  std::string mode = "subtract";
  bool use_float = false;
  bool use_quantized = false;
  bool force = false;
  std::uint64_t seed = 0;
};

void run_hide(const HideArgs& a) {
  Run run{"hide", a.seed, a.force};

  const LoadedModel model = load_model(a.model);
  const PlanarTensor secret = load_image(a.secret);
  const PlanarTensor cover = load_image(a.cover);
  if (!secret.same_shape(cover)) {
    throw std::runtime_error("secret (" + shape_string(secret) +
                             ") and cover (" + shape_string(cover) +
                             ") dimensions differ");
  }
  require_even_sides(cover, a.cover);
  const HideMode mode = parse_hide_mode(a.mode);

  const StegoResult res = hide(secret, cover, model.stack, mode);

  const fs::path out = a.out;
  const fs::path sidecar = sibling(out, ".sidecar.json");
  const fs::path container = sibling(out, ".f64");
  run.claim_primary(out);
  run.claim(sidecar);
  if (a.use_float) run.claim(container);

  write_png(out.string(), to_pixels(res.stego_quantized));
  if (a.use_float) {
    TensorContainer c;
    c.meta()["kind"] = "stego-image";
    c.meta()["mode"] = hide_mode_name(mode);
    c.meta()["cover_id"] = res.cover_id;
    c.put("stego", res.stego);
    c.save(container.string());
  }

  json side;
  side["format"] = "wavehide-sidecar";
  side["version"] = 1;
  side["cover_id"] = res.cover_id;
  side["mode"] = hide_mode_name(mode);
  side["model_hash"] = model.hash;
  side["float"] = a.use_float;
  if (a.use_float) side["stego_container"] = container.filename().string();
  write_text(sidecar, side.dump(2) + "\n");

  run.extra["model_hash"] = model.hash;
  run.extra["mode"] = hide_mode_name(mode);
  run.extra["cover_id"] = res.cover_id;
  run.write_manifest();
  std::cout << "hide: wrote " << out.string() << '\n';
}

// ---------------------------------------------------------------------------
// reveal

struct RevealArgs {
  std::string stego, sidecar, covers, model, out, reference;
  bool force = false;
  std::uint64_t seed = 0;
};

void run_reveal(const RevealArgs& a) {
  Run run{"reveal", a.seed, a.force};

  const fs::path sidecar_path =
      a.sidecar.empty() ? sibling(a.stego, ".sidecar.json") : fs::path(a.sidecar);
  const Sidecar side = read_sidecar(sidecar_path);

  const LoadedModel model = load_model(a.model);
  if (!side.model_hash.empty() && side.model_hash != model.hash) {
    throw std::runtime_error("model mismatch: the stego was produced with " +
                             side.model_hash + ", '" + a.model + "' hashes to " +
                             model.hash);
  }

  const CoverDatabase db = CoverDatabase::scan(a.covers);
  const PlanarTensor cover = load_image(db.lookup(side.cover_id));

  PlanarTensor stego;
  if (side.is_float) {
    const fs::path cpath = sidecar_path.parent_path() / side.stego_container;
    stego = TensorContainer::load(cpath.string()).get("stego");
  } else {
    stego = load_image(a.stego);
  }
  if (!stego.same_shape(cover)) {
    throw std::runtime_error("stego (" + shape_string(stego) + ") and cover (" +
                             shape_string(cover) + ") dimensions differ");
  }

  const PlanarTensor recovered =
      reveal(extract(stego, cover, side.mode), model.stack);

  run.claim_primary(a.out);
  write_png(a.out, to_pixels(recovered));

  if (!a.reference.empty()) {
    const MetricReport m = compare(recovered, load_image(a.reference));
    std::cout << "recovery vs reference: psnr=" << format_metric(m.psnr_db)
              << " ssim=" << format_metric(m.ssim)
              << " mse=" << format_metric(m.mse) << '\n';
  }

  run.extra["model_hash"] = model.hash;
  run.extra["mode"] = hide_mode_name(side.mode);
  run.extra["cover_id"] = side.cover_id;
  run.write_manifest();
  std::cout << "reveal: wrote " << a.out << '\n';
}

// ---------------------------------------------------------------------------
// attack

struct AttackArgs {
  std::string in, spec, out;
  std::uint64_t seed = 0;
  bool force = false;
};

void run_attack(const AttackArgs& a) {
  Run run{"attack", a.seed, a.force};

  const AttackSpec spec =
      AttackSpec::from_json(load_json_arg(a.spec, "attack spec"));
  PlanarTensor img = load_image(a.in);
  // Dropout marks holes with exact zeros, so pre-existing black pixels are
  // lifted off the floor first; the written image then encodes the mask.
  if (spec.kind == AttackSpec::Kind::Dropout) img = floor_lift_zeros(img);
  const PlanarTensor attacked = apply_attack(img, spec, a.seed).attacked;

  run.claim_primary(a.out);
  write_png(a.out, to_pixels(attacked));

  run.extra["attack"] = spec.to_json();
  run.write_manifest();
  std::cout << "attack: wrote " << a.out << '\n';
}

// ---------------------------------------------------------------------------
// fill

struct FillArgs {
  std::string in, sidecar, covers, out;
  std::string neighborhood = "nine";
  int passes = 3;
  bool force = false;
  std::uint64_t seed = 0;
};

void run_fill(const FillArgs& a) {
  Run run{"fill", a.seed, a.force};

  const fs::path sidecar_path =
      a.sidecar.empty() ? sibling(a.in, ".sidecar.json") : fs::path(a.sidecar);
  const Sidecar side = read_sidecar(sidecar_path);

  const CoverDatabase db = CoverDatabase::scan(a.covers);
  const PlanarTensor cover = load_image(db.lookup(side.cover_id));
  const PlanarTensor received = load_image(a.in);
  if (!received.same_shape(cover)) {
    throw std::runtime_error("received (" + shape_string(received) +
                             ") and cover (" + shape_string(cover) +
                             ") dimensions differ");
  }

  const DropMask mask = detect_mask(received);
  std::size_t holes = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i] == 0.0) ++holes;
  }

  const FillResult fr =
      field_fill(received, cover, mask, side.mode,
                 parse_neighborhood(a.neighborhood), a.passes);
  PlanarTensor repaired = cover;
  const double sign = side.mode == HideMode::Subtract ? -1.0 : 1.0;
  for (std::size_t i = 0; i < repaired.size(); ++i) {
    repaired[i] += sign * fr.s_e[i];
  }

  run.claim_primary(a.out);
  write_png(a.out, to_pixels(repaired));

  run.extra["holes"] = holes;
  run.extra["unfilled"] = fr.unfilled;
  run.extra["neighborhood"] = a.neighborhood;
  run.extra["passes"] = a.passes;
  run.write_manifest();
  std::cout << "fill: wrote " << a.out << " (holes: " << holes
            << ", unfilled: " << fr.unfilled << ")\n";
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateArgs {
  std::string dataset, model, attacks, out;
  std::string mode = "subtract";
  bool use_float = false;
  bool use_quantized = false;
  bool no_fill = false;
  std::string neighborhood = "nine";
  int passes = 3;
  int image_size = 0;
  int limit = 0;
  std::uint64_t seed = 0;
  bool force = false;
};

void run_evaluate(const EvaluateArgs& a) {
  Run run{"evaluate", a.seed, a.force};

  const LoadedModel model = load_model(a.model);
  const Dataset data = load_dataset(a.dataset, a.image_size, a.limit);
  const std::vector<AttackSpec> attacks = parse_attack_list(a.attacks);

  EvalOptions options;
  options.mode = parse_hide_mode(a.mode);
  options.float_mode = a.use_float;
  options.fill_neighborhood = parse_neighborhood(a.neighborhood);
  options.fill_passes = a.passes;
  options.use_fill = !a.no_fill;
  options.seed = a.seed;

  const std::vector<EvalRow> rows = evaluate(model.stack, data, attacks, options);

  run.claim_primary(a.out);
  std::string csv =
      "attack,level,psnr_stego,ssim_stego,psnr_recovery,ssim_recovery\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const EvalRow& r = rows[i];
    const std::string kind =
        i == 0 ? "clean" : attack_kind_name(attacks[i - 1].kind);
    const std::string level =
        i == 0 ? "0" : format_level(attack_level(attacks[i - 1]));
    csv += kind + ',' + level + ',' + format_metric(r.stego_vs_cover.psnr_db) +
           ',' + format_metric(r.stego_vs_cover.ssim) + ',' +
           format_metric(r.recovery_vs_secret.psnr_db) + ',' +
           format_metric(r.recovery_vs_secret.ssim) + '\n';
  }
  write_text(a.out, csv);

  run.extra["model_hash"] = model.hash;
  run.extra["mode"] = a.mode;
  run.extra["float"] = a.use_float;
  run.extra["rows"] = rows.size();
  run.write_manifest();
  std::cout << "evaluate: wrote " << a.out << " (" << rows.size() << " rows)\n";
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
  std::string config, dataset, out, loss_csv, resume, checkpoint;
  int checkpoint_every = 0;
  bool force = false;
  std::uint64_t seed = 0;
  bool seed_given = false;
};

void run_train(const TrainArgs& a) {
  Run run{"train", a.seed, a.force};

  TrainConfig config;
  CouplingStack stack;
  AdamState adam;
  int start_epoch = 0;
  std::string config_hash;

  if (!a.resume.empty()) {
    if (!a.config.empty()) {
      throw std::runtime_error(
          "pass either --config or --resume, not both (the checkpoint carries "
          "its configuration)");
    }
    Checkpoint ck = load_checkpoint(a.resume);
    config = ck.config;
    stack = std::move(ck.stack);
    adam = std::move(ck.adam);
    start_epoch = ck.next_epoch;
    config_hash = sha256_file_hex(a.resume);
  } else {
    if (a.config.empty()) {
      throw std::runtime_error("--config is required (or --resume)");
    }
    config = TrainConfig::from_json(load_json_file(a.config, "config"));
    if (a.seed_given) config.seed = a.seed;
    config_hash = sha256_file_hex(a.config);
    stack = make_coupling_stack(config.stack, config.seed);
    std::vector<ad::Var> params = stack_parameters(stack);
    adam = make_adam_state(params);
  }
  run.seed = config.seed;

  const Dataset data = load_dataset(a.dataset, config.image_size, 0);

  const fs::path out = a.out;
  const fs::path csv =
      a.loss_csv.empty() ? sibling(out, ".loss.csv") : fs::path(a.loss_csv);
  const fs::path ckpt =
      a.checkpoint.empty() ? sibling(out, ".ckpt") : fs::path(a.checkpoint);
  run.claim_primary(out);
  run.claim(csv);
  if (a.checkpoint_every > 0) run.claim(ckpt);

  std::vector<EpochLog> log;
  int epoch = start_epoch;
  while (epoch < config.epochs) {
    const int stop = a.checkpoint_every > 0
                         ? std::min(config.epochs, epoch + a.checkpoint_every)
                         : config.epochs;
    const TrainResult part = train_range(config, data, stack, adam, epoch, stop);
    for (const EpochLog& e : part.log) {
      std::printf("epoch %d: lr=%g loss=%.6g psnr_stego=%.2f psnr_recovery=%.2f\n",
                  e.epoch, e.lr, e.total_loss, e.psnr_stego, e.psnr_recovery);
      std::fflush(stdout);
    }
    log.insert(log.end(), part.log.begin(), part.log.end());
    epoch = stop;
    if (a.checkpoint_every > 0) {
      save_checkpoint(ckpt.string(), stack, adam, epoch, config);
    }
  }

  save_stack(stack, out.string());
  write_loss_csv(csv.string(), log);

  run.extra["config_hash"] = config_hash;
  run.extra["model_hash"] = sha256_file_hex(out.string());
  run.extra["start_epoch"] = start_epoch;
  run.extra["epochs"] = config.epochs;
  run.write_manifest();
  std::cout << "train: wrote " << out.string() << '\n';
}

// ---------------------------------------------------------------------------
// residual-report

struct ResidualArgs {
  std::string stego, cover, out;
  bool force = false;
  std::uint64_t seed = 0;
};

void run_residual_report(const ResidualArgs& a) {
  Run run{"residual-report", a.seed, a.force};

  const PixelImage stego = read_png(a.stego);
  const PixelImage cover = read_png(a.cover);
  if (stego.width != cover.width || stego.height != cover.height) {
    throw std::runtime_error(
        "stego (" + std::to_string(stego.width) + "x" +
        std::to_string(stego.height) + ") and cover (" +
        std::to_string(cover.width) + "x" + std::to_string(cover.height) +
        ") dimensions differ");
  }
  const std::size_t npixels =
      static_cast<std::size_t>(stego.width) * stego.height;

  // Byte-difference statistics per channel. The histogram pairs magnitudes
  // into 128 positive and 128 negative bins and leaves out exact zeros,
  // which makes negating every difference exactly reverse the bins.
  static const char* const kNames[3] = {"R", "G", "B"};
  json channels = json::array();
  for (int ch = 0; ch < 3; ++ch) {
    std::vector<std::int64_t> hist(256, 0);
    double sum = 0.0, sum_sq = 0.0;
    int max_abs = 0;
    for (std::size_t i = 0; i < npixels; ++i) {
      const int d = static_cast<int>(stego.rgb[i * 3 + ch]) -
                    static_cast<int>(cover.rgb[i * 3 + ch]);
      sum += d;
      sum_sq += static_cast<double>(d) * d;
      max_abs = std::max(max_abs, std::abs(d));
      if (d != 0) {
        const int m = (std::abs(d) - 1) / 2;
        ++hist[d > 0 ? 128 + m : 127 - m];
      }
    }
    const double mean = sum / static_cast<double>(npixels);
    const double var = sum_sq / static_cast<double>(npixels) - mean * mean;
    json c;
    c["channel"] = kNames[ch];
    c["mean"] = mean;
    c["std"] = std::sqrt(std::max(var, 0.0));
    c["max_abs"] = max_abs;
    c["histogram"] = hist;
    channels.push_back(std::move(c));
  }

  json report;
  report["width"] = stego.width;
  report["height"] = stego.height;
  report["channels"] = channels;

  run.claim_primary(a.out);
  write_text(a.out, report.dump(2) + "\n");
  run.write_manifest();
  std::cout << "residual-report: wrote " << a.out << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"invertible wavelet-domain image hiding"};
  app.require_subcommand(1);

  HideArgs hide_args;
  {
    CLI::App* c = app.add_subcommand("hide", "embed a secret image in a cover");
    c->add_option("--secret", hide_args.secret, "secret PNG")->required();
    c->add_option("--cover", hide_args.cover, "cover PNG")->required();
    c->add_option("--model", hide_args.model, "model file")->required();
    c->add_option("--out", hide_args.out, "stego PNG to write")->required();
    c->add_option("--mode", hide_args.mode, "subtract|add")
        ->check(CLI::IsMember({"subtract", "add"}));
    CLI::Option* f = c->add_flag("--float", hide_args.use_float,
                                 "also write the unquantized stego tensor");
    c->add_flag("--quantized", hide_args.use_quantized,
                "8-bit transmission (default)")
        ->excludes(f);
    c->add_option("--seed", hide_args.seed, "recorded in the manifest");
    c->add_flag("--force", hide_args.force, "overwrite existing outputs");
    c->callback([&] { run_hide(hide_args); });
  }

  RevealArgs reveal_args;
  {
    CLI::App* c = app.add_subcommand("reveal", "recover the secret from a stego");
    c->add_option("--stego", reveal_args.stego, "stego PNG")->required();
    c->add_option("--sidecar", reveal_args.sidecar,
                  "sidecar JSON (default: next to the stego)");
    c->add_option("--covers", reveal_args.covers, "cover database directory")
        ->required();
    c->add_option("--model", reveal_args.model, "model file")->required();
    c->add_option("--out", reveal_args.out, "recovered PNG to write")->required();
    c->add_option("--reference", reveal_args.reference,
                  "original secret; prints recovery metrics");
    c->add_option("--seed", reveal_args.seed, "recorded in the manifest");
    c->add_flag("--force", reveal_args.force, "overwrite existing outputs");
    c->callback([&] { run_reveal(reveal_args); });
  }

  AttackArgs attack_args;
  {
    CLI::App* c = app.add_subcommand("attack", "distort an image in transit");
    c->add_option("--in", attack_args.in, "input PNG")->required();
    c->add_option("--spec", attack_args.spec,
                  "attack JSON, inline or a file path")
        ->required();
    c->add_option("--out", attack_args.out, "attacked PNG to write")->required();
    c->add_option("--seed", attack_args.seed, "noise/dropout seed");
    c->add_flag("--force", attack_args.force, "overwrite existing outputs");
    c->callback([&] { run_attack(attack_args); });
  }

  FillArgs fill_args;
  {
    CLI::App* c = app.add_subcommand(
        "fill", "repair dropout holes in a received stego");
    c->add_option("--in", fill_args.in, "received PNG with zeroed holes")
        ->required();
    c->add_option("--sidecar", fill_args.sidecar,
                  "sidecar JSON of the original hide");
    c->add_option("--covers", fill_args.covers, "cover database directory")
        ->required();
    c->add_option("--out", fill_args.out, "repaired PNG to write")->required();
    c->add_option("--neighborhood", fill_args.neighborhood, "four|nine")
        ->check(CLI::IsMember({"four", "nine"}));
    c->add_option("--passes", fill_args.passes, "fill iterations")
        ->check(CLI::PositiveNumber);
    c->add_option("--seed", fill_args.seed, "recorded in the manifest");
    c->add_flag("--force", fill_args.force, "overwrite existing outputs");
    c->callback([&] { run_fill(fill_args); });
  }

  EvaluateArgs eval_args;
  {
    CLI::App* c = app.add_subcommand(
        "evaluate", "hide/attack/reveal sweep over a dataset, report CSV");
    c->add_option("--dataset", eval_args.dataset, "directory of PNGs")
        ->required();
    c->add_option("--model", eval_args.model, "model file")->required();
    c->add_option("--attacks", eval_args.attacks,
                  "JSON array of attacks, inline or a file path");
    c->add_option("--out", eval_args.out, "CSV to write")->required();
    c->add_option("--mode", eval_args.mode, "subtract|add")
        ->check(CLI::IsMember({"subtract", "add"}));
    CLI::Option* f = c->add_flag("--float", eval_args.use_float,
                                 "transmit unquantized tensors");
    c->add_flag("--quantized", eval_args.use_quantized,
                "8-bit transmission (default)")
        ->excludes(f);
    c->add_flag("--no-fill", eval_args.no_fill,
                "reveal dropout rows without hole filling");
    c->add_option("--neighborhood", eval_args.neighborhood, "four|nine")
        ->check(CLI::IsMember({"four", "nine"}));
    c->add_option("--passes", eval_args.passes, "fill iterations")
        ->check(CLI::PositiveNumber);
    c->add_option("--image-size", eval_args.image_size,
                  "crop inputs to this square size");
    c->add_option("--limit", eval_args.limit, "use only the first N images");
    c->add_option("--seed", eval_args.seed, "attack seed");
    c->add_flag("--force", eval_args.force, "overwrite existing outputs");
    c->callback([&] { run_evaluate(eval_args); });
  }

  TrainArgs train_args;
  {
    CLI::App* c = app.add_subcommand("train", "fit a model on a dataset");
    c->add_option("--config", train_args.config, "training config JSON");
    c->add_option("--dataset", train_args.dataset, "directory of PNGs")
        ->required();
    c->add_option("--out", train_args.out, "model file to write")->required();
    c->add_option("--loss-csv", train_args.loss_csv,
                  "per-epoch log (default: next to the model)");
    c->add_option("--resume", train_args.resume, "checkpoint to continue from");
    c->add_option("--checkpoint", train_args.checkpoint,
                  "checkpoint path (default: next to the model)");
    c->add_option("--checkpoint-every", train_args.checkpoint_every,
                  "write a checkpoint every N epochs");
    CLI::Option* s =
        c->add_option("--seed", train_args.seed, "overrides the config's seed");
    c->add_flag("--force", train_args.force, "overwrite existing outputs");
    c->callback([&, s] {
      train_args.seed_given = s->count() > 0;
      run_train(train_args);
    });
  }

  ResidualArgs residual_args;
  {
    CLI::App* c = app.add_subcommand(
        "residual-report", "statistics of stego minus cover, as JSON");
    c->add_option("--stego", residual_args.stego, "stego PNG")->required();
    c->add_option("--cover", residual_args.cover, "cover PNG")->required();
    c->add_option("--out", residual_args.out, "report JSON to write")->required();
    c->add_option("--seed", residual_args.seed, "recorded in the manifest");
    c->add_flag("--force", residual_args.force, "overwrite existing outputs");
    c->callback([&] { run_residual_report(residual_args); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "wavehide: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

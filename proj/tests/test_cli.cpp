#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include <json.hpp>

#include "wavehide/coupling.hpp"
#include "wavehide/image.hpp"
#include "wavehide/image_io.hpp"
#include "wavehide/training.hpp"

#include "helpers.hpp"

#ifndef WAVEHIDE_CLI_PATH
#error "WAVEHIDE_CLI_PATH must name the command line binary"
#endif

using namespace wavehide;
namespace fs = std::filesystem;
using nlohmann::json;
using testutil::smooth_image;

namespace {

struct CliRun {
  int status = -1;
  std::string output;  // stdout and stderr interleaved
  bool ok() const { return status == 0; }
};

CliRun cli(const fs::path& dir, const std::string& args) {
  static int counter = 0;
  const fs::path log = dir / ("cli_" + std::to_string(counter++) + ".log");
  const std::string cmd = std::string(WAVEHIDE_CLI_PATH) + " " + args + " > " +
                          log.string() + " 2>&1";
  const int raw = std::system(cmd.c_str());
  CliRun r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  std::ifstream f(log);
  std::stringstream ss;
  ss << f.rdbuf();
  r.output = ss.str();
  return r;
}

std::string read_bytes(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(f.good());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

StackConfig small_stack() {
  StackConfig s;
  s.blocks = 1;
  s.dense_layers = 2;
  s.growth = 8;
  return s;
}

fs::path write_model(const fs::path& dir, std::uint64_t seed,
                     const char* name = "model.whc") {
  const fs::path p = dir / name;
  save_stack(make_coupling_stack(small_stack(), seed), p.string());
  return p;
}

fs::path write_image(const fs::path& dir, const char* name,
                     const PlanarTensor& t) {
  const fs::path p = dir / name;
  write_png(p.string(), to_pixels(t));
  return p;
}

/// Extracts the number following "key=" in a line of program output.
double parse_metric(const std::string& text, const std::string& key) {
  const auto pos = text.find(key + "=");
  REQUIRE(pos != std::string::npos);
  const std::string tail = text.substr(pos + key.size() + 1);
  if (tail.rfind("inf", 0) == 0) return std::numeric_limits<double>::infinity();
  return std::stod(tail);
}

}  // namespace

TEST_CASE("hide writes stego, sidecar and manifest, deterministically") {
  const auto dir = testutil::scratch_dir("cli_hide");
  const fs::path model = write_model(dir, 1);
  const fs::path cover = write_image(dir, "cover.png", smooth_image(16, 16, 10));
  const fs::path secret = write_image(dir, "secret.png", smooth_image(16, 16, 11));
  const fs::path stego = dir / "stego.png";

  const std::string args = "hide --secret " + secret.string() + " --cover " +
                           cover.string() + " --model " + model.string() +
                           " --out " + stego.string();
  const CliRun first = cli(dir, args);
  REQUIRE_MESSAGE(first.ok(), first.output);
  REQUIRE(fs::exists(stego));
  REQUIRE(fs::exists(dir / "stego.sidecar.json"));
  REQUIRE(fs::exists(dir / "stego.manifest.json"));

  const json side = json::parse(read_bytes(dir / "stego.sidecar.json"));
  CHECK(side.at("format") == "wavehide-sidecar");
  CHECK(side.at("mode") == "subtract");
  CHECK(side.at("float") == false);
  CHECK(side.at("cover_id").get<std::string>().size() == 64);

  const json manifest = json::parse(read_bytes(dir / "stego.manifest.json"));
  CHECK(manifest.at("command") == "hide");
  CHECK(manifest.at("model_hash") == side.at("model_hash"));

  // refuses to clobber, then reproduces the bytes under --force
  const std::string stego_bytes = read_bytes(stego);
  const std::string side_bytes = read_bytes(dir / "stego.sidecar.json");
  const CliRun second = cli(dir, args);
  CHECK_FALSE(second.ok());
  CHECK(second.output.find("refusing to overwrite") != std::string::npos);
  CHECK(second.output.find("--force") != std::string::npos);

  const CliRun forced = cli(dir, args + " --force");
  REQUIRE_MESSAGE(forced.ok(), forced.output);
  CHECK(read_bytes(stego) == stego_bytes);
  CHECK(read_bytes(dir / "stego.sidecar.json") == side_bytes);
}

TEST_CASE("the float pipeline recovers the secret through the binary") {
  const auto dir = testutil::scratch_dir("cli_float");
  const fs::path model = write_model(dir, 2);
  const fs::path cover = write_image(dir, "cover.png", smooth_image(16, 16, 20));
  const fs::path secret = write_image(dir, "secret.png", smooth_image(16, 16, 21));
  const fs::path stego = dir / "stego.png";

  const CliRun hide = cli(dir, "hide --float --secret " + secret.string() +
                                   " --cover " + cover.string() + " --model " +
                                   model.string() + " --out " + stego.string());
  REQUIRE_MESSAGE(hide.ok(), hide.output);
  REQUIRE(fs::exists(dir / "stego.f64"));

  const CliRun reveal = cli(
      dir, "reveal --stego " + stego.string() + " --covers " + dir.string() +
               " --model " + model.string() + " --out " +
               (dir / "recovered.png").string() + " --reference " +
               secret.string());
  REQUIRE_MESSAGE(reveal.ok(), reveal.output);
  CHECK(parse_metric(reveal.output, "psnr") > 100.0);
  CHECK(fs::exists(dir / "recovered.png"));
}

TEST_CASE("reveal rejects a model other than the one that hid the secret") {
  const auto dir = testutil::scratch_dir("cli_badmodel");
  const fs::path model = write_model(dir, 3);
  const fs::path other = write_model(dir, 4, "other.whc");
  const fs::path cover = write_image(dir, "cover.png", smooth_image(16, 16, 30));
  const fs::path secret = write_image(dir, "secret.png", smooth_image(16, 16, 31));
  const fs::path stego = dir / "stego.png";

  REQUIRE(cli(dir, "hide --secret " + secret.string() + " --cover " +
                       cover.string() + " --model " + model.string() +
                       " --out " + stego.string())
              .ok());

  const CliRun r = cli(dir, "reveal --stego " + stego.string() + " --covers " +
                               dir.string() + " --model " + other.string() +
                               " --out " + (dir / "rec.png").string());
  CHECK_FALSE(r.ok());
  CHECK(r.output.find("model mismatch") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "rec.png"));
}

TEST_CASE("reveal reports an unknown cover id with the database size") {
  const auto dir = testutil::scratch_dir("cli_nocover");
  const fs::path model = write_model(dir, 5);
  const fs::path cover = write_image(dir, "cover.png", smooth_image(16, 16, 40));
  const fs::path secret = write_image(dir, "secret.png", smooth_image(16, 16, 41));
  const fs::path stego = dir / "stego.png";
  REQUIRE(cli(dir, "hide --secret " + secret.string() + " --cover " +
                       cover.string() + " --model " + model.string() +
                       " --out " + stego.string())
              .ok());

  // a database that holds only an unrelated image
  const fs::path db = dir / "db";
  fs::create_directories(db);
  write_image(db, "unrelated.png", smooth_image(16, 16, 42));

  const CliRun r = cli(dir, "reveal --stego " + stego.string() + " --covers " +
                               db.string() + " --model " + model.string() +
                               " --out " + (dir / "rec.png").string());
  CHECK_FALSE(r.ok());
  CHECK(r.output.find("not found in database of 1 cover(s)") !=
        std::string::npos);
}

TEST_CASE("mismatched image dimensions stop the hide before any output") {
  const auto dir = testutil::scratch_dir("cli_dims");
  const fs::path model = write_model(dir, 6);
  const fs::path cover = write_image(dir, "cover.png", smooth_image(16, 16, 50));
  const fs::path secret = write_image(dir, "secret.png", smooth_image(16, 18, 51));

  const CliRun r = cli(dir, "hide --secret " + secret.string() + " --cover " +
                               cover.string() + " --model " + model.string() +
                               " --out " + (dir / "stego.png").string());
  CHECK_FALSE(r.ok());
  CHECK(r.output.find("dimensions differ") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "stego.png"));
  CHECK_FALSE(fs::exists(dir / "stego.sidecar.json"));
}

TEST_CASE("a zero-sigma attack is a byte-for-byte copy") {
  const auto dir = testutil::scratch_dir("cli_sigma0");
  const fs::path img = write_image(dir, "img.png", smooth_image(16, 16, 60));
  const fs::path out = dir / "attacked.png";

  const CliRun r = cli(dir, "attack --in " + img.string() +
                               " --spec '{\"kind\":\"gaussian\",\"sigma\":0}'" +
                               " --out " + out.string());
  REQUIRE_MESSAGE(r.ok(), r.output);
  CHECK(read_bytes(out) == read_bytes(img));
}

TEST_CASE("the two hide modes leave mirrored byte residuals") {
  const auto dir = testutil::scratch_dir("cli_mirror");
  const fs::path model = write_model(dir, 7);

  // keep every stego value strictly inside (0,1): mid-gray cover, dim secret
  PlanarTensor cover_t = smooth_image(16, 16, 70);
  for (std::size_t i = 0; i < cover_t.size(); ++i) {
    cover_t[i] = 0.4 + 0.2 * cover_t[i];
  }
  PlanarTensor secret_t = smooth_image(16, 16, 71);
  for (std::size_t i = 0; i < secret_t.size(); ++i) secret_t[i] *= 0.25;
  const fs::path cover = write_image(dir, "cover.png", cover_t);
  const fs::path secret = write_image(dir, "secret.png", secret_t);

  for (const char* mode : {"subtract", "add"}) {
    const std::string m(mode);
    REQUIRE(cli(dir, "hide --secret " + secret.string() + " --cover " +
                         cover.string() + " --model " + model.string() +
                         " --mode " + m + " --out " +
                         (dir / ("stego_" + m + ".png")).string())
                .ok());
    REQUIRE(cli(dir, "residual-report --stego " +
                         (dir / ("stego_" + m + ".png")).string() + " --cover " +
                         cover.string() + " --out " +
                         (dir / ("report_" + m + ".json")).string())
                .ok());
  }

  const json sub = json::parse(read_bytes(dir / "report_subtract.json"));
  const json add = json::parse(read_bytes(dir / "report_add.json"));
  for (int ch = 0; ch < 3; ++ch) {
    const json& s = sub.at("channels").at(ch);
    const json& a = add.at("channels").at(ch);
    CHECK(s.at("mean").get<double>() == -a.at("mean").get<double>());
    CHECK(s.at("std").get<double>() == a.at("std").get<double>());
    CHECK(s.at("max_abs") == a.at("max_abs"));
    const auto hs = s.at("histogram").get<std::vector<long long>>();
    const auto ha = a.at("histogram").get<std::vector<long long>>();
    REQUIRE(hs.size() == 256);
    REQUIRE(ha.size() == 256);
    for (int i = 0; i < 256; ++i) CHECK(hs[i] == ha[255 - i]);
  }
}

TEST_CASE("evaluate writes a clean row plus one per requested attack") {
  const auto dir = testutil::scratch_dir("cli_eval");
  const fs::path model = write_model(dir, 8);
  const fs::path data = dir / "data";
  fs::create_directories(data);
  for (int i = 0; i < 4; ++i) {
    write_image(data, ("img" + std::to_string(i) + ".png").c_str(),
                smooth_image(16, 16, 80 + i));
  }

  const fs::path out = dir / "report.csv";
  const CliRun r = cli(
      dir, "evaluate --dataset " + data.string() + " --model " + model.string() +
               " --attacks "
               "'[{\"kind\":\"gaussian\",\"sigma\":5},{\"kind\":\"jpeg\",\"qf\":80}]'"
               " --out " + out.string());
  REQUIRE_MESSAGE(r.ok(), r.output);

  std::ifstream f(out);
  std::string line;
  REQUIRE(std::getline(f, line));
  CHECK(line == "attack,level,psnr_stego,ssim_stego,psnr_recovery,ssim_recovery");
  REQUIRE(std::getline(f, line));
  CHECK(line.rfind("clean,0,", 0) == 0);
  REQUIRE(std::getline(f, line));
  CHECK(line.rfind("gaussian,5,", 0) == 0);
  REQUIRE(std::getline(f, line));
  CHECK(line.rfind("jpeg,80,", 0) == 0);
  CHECK_FALSE(std::getline(f, line));
}

TEST_CASE("training resumed from a checkpoint matches the uninterrupted run") {
  const auto dir = testutil::scratch_dir("cli_train");
  const fs::path data = dir / "data";
  fs::create_directories(data);
  for (int i = 0; i < 4; ++i) {
    write_image(data, ("img" + std::to_string(i) + ".png").c_str(),
                smooth_image(8, 8, 90 + i));
  }

  const json cfg = {{"epochs", 4},
                    {"batch_size", 2},
                    {"lr0", 1e-3},
                    {"image_size", 8},
                    {"seed", 77},
                    {"stack", {{"blocks", 1}, {"dense_layers", 2}, {"growth", 8}}}};
  const fs::path cfg_path = dir / "config.json";
  std::ofstream(cfg_path) << cfg.dump(2);

  const CliRun whole = cli(
      dir, "train --config " + cfg_path.string() + " --dataset " + data.string() +
               " --out " + (dir / "whole.whc").string());
  REQUIRE_MESSAGE(whole.ok(), whole.output);
  CHECK(whole.output.find("epoch 0:") != std::string::npos);
  CHECK(whole.output.find("epoch 3:") != std::string::npos);
  REQUIRE(fs::exists(dir / "whole.loss.csv"));

  // first two epochs through the library, saved as a checkpoint
  const TrainConfig config = TrainConfig::from_json(cfg);
  Dataset ds;
  for (const std::string& p : list_pngs(data.string())) {
    ds.images.push_back(from_pixels(read_png(p)));
  }
  CouplingStack stack = make_coupling_stack(config.stack, config.seed);
  auto params = stack_parameters(stack);
  AdamState adam = make_adam_state(params);
  train_range(config, ds, stack, adam, 0, 2);
  const fs::path ck = dir / "mid.ckpt";
  save_checkpoint(ck.string(), stack, adam, 2, config);

  const CliRun resumed = cli(
      dir, "train --resume " + ck.string() + " --dataset " + data.string() +
               " --out " + (dir / "resumed.whc").string());
  REQUIRE_MESSAGE(resumed.ok(), resumed.output);
  CHECK(resumed.output.find("epoch 2:") != std::string::npos);
  CHECK(resumed.output.find("epoch 0:") == std::string::npos);

  CHECK(read_bytes(dir / "resumed.whc") == read_bytes(dir / "whole.whc"));

  // a different seed gives a different model
  const CliRun reseeded = cli(
      dir, "train --config " + cfg_path.string() + " --dataset " + data.string() +
               " --seed 78 --out " + (dir / "reseeded.whc").string());
  REQUIRE_MESSAGE(reseeded.ok(), reseeded.output);
  CHECK(read_bytes(dir / "reseeded.whc") != read_bytes(dir / "whole.whc"));

  // config and resume together are refused
  const CliRun both = cli(
      dir, "train --config " + cfg_path.string() + " --resume " + ck.string() +
               " --dataset " + data.string() + " --out " +
               (dir / "both.whc").string());
  CHECK_FALSE(both.ok());
  CHECK(both.output.find("not both") != std::string::npos);
}

TEST_CASE("an unknown key in the training config is named in the error") {
  const auto dir = testutil::scratch_dir("cli_badcfg");
  const fs::path data = dir / "data";
  fs::create_directories(data);
  write_image(data, "img.png", smooth_image(8, 8, 95));

  const fs::path cfg = dir / "bad.json";
  std::ofstream(cfg) << R"({"epochs": 2, "learning_rate": 0.1})";
  const CliRun r = cli(dir, "train --config " + cfg.string() + " --dataset " +
                               data.string() + " --out " +
                               (dir / "m.whc").string());
  CHECK_FALSE(r.ok());
  CHECK(r.output.find("unknown key 'learning_rate'") != std::string::npos);
}

TEST_CASE("a corrupted sidecar fails with the position of the parse error") {
  const auto dir = testutil::scratch_dir("cli_badside");
  const fs::path model = write_model(dir, 9);
  const fs::path cover = write_image(dir, "cover.png", smooth_image(16, 16, 96));
  const fs::path secret = write_image(dir, "secret.png", smooth_image(16, 16, 97));
  const fs::path stego = dir / "stego.png";
  REQUIRE(cli(dir, "hide --secret " + secret.string() + " --cover " +
                       cover.string() + " --model " + model.string() +
                       " --out " + stego.string())
              .ok());

  std::ofstream(dir / "stego.sidecar.json", std::ios::trunc)
      << "{\"cover_id\": }\n";
  const CliRun r = cli(dir, "reveal --stego " + stego.string() + " --covers " +
                               dir.string() + " --model " + model.string() +
                               " --out " + (dir / "rec.png").string());
  CHECK_FALSE(r.ok());
  CHECK(r.output.find("line 1") != std::string::npos);
  CHECK(r.output.find("column") != std::string::npos);
}

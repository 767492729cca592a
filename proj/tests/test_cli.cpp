#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "bpj/data.hpp"
#include "bpj/model_io.hpp"

#ifndef BPJ_CLI_PATH
#error "BPJ_CLI_PATH must point at the CLI binary"
#endif

using namespace bpj;

namespace {

namespace fs = std::filesystem;

int run_cli(const std::string& args) {
  std::string cmd = std::string(BPJ_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

fs::path scratch() {
  auto dir = fs::temp_directory_path() / "bpj_cli_scratch";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("cli trains and writes artifacts") {
  auto dir = scratch() / "run_small";
  fs::remove_all(dir);
  int code = run_cli("run --epochs 2 --seed 5 --output-dir " + dir.string());
  CHECK(code == 0);
  CHECK(fs::exists(dir / "loss_curve.csv"));
  CHECK(fs::exists(dir / "report.json"));
  CHECK(fs::exists(dir / "model.json"));
  CHECK_NOTHROW(load_model(dir / "model.json"));
}

TEST_CASE("cli flags override config files") {
  auto dir = scratch();
  auto config_path = dir / "override.json";
  {
    std::ofstream out(config_path);
    out << R"({"epochs": 50, "output_dir": ")" << (dir / "cfg_out").string()
        << R"("})";
  }
  auto out_dir = dir / "flag_out";
  fs::remove_all(out_dir);
  fs::remove_all(dir / "cfg_out");
  int code = run_cli("run --config " + config_path.string() +
                     " --epochs 1 --output-dir " + out_dir.string());
  CHECK(code == 0);
  CHECK(fs::exists(out_dir / "report.json"));
  CHECK_FALSE(fs::exists(dir / "cfg_out"));

  std::ifstream curve(out_dir / "loss_curve.csv");
  std::string line;
  int lines = 0;
  while (std::getline(curve, line)) ++lines;
  CHECK(lines == 2);
}

TEST_CASE("cli rejects invalid configurations") {
  auto dir = scratch();
  auto bad_path = dir / "bad.json";
  {
    std::ofstream out(bad_path);
    out << R"({"epoch": 5})";
  }
  CHECK(run_cli("run --config " + bad_path.string()) == 2);
  CHECK(run_cli("run --config " + (dir / "missing.json").string()) == 2);
  CHECK(run_cli("run --algorithm kernel_backprojection --epochs 1") == 2);
  CHECK(run_cli("run --algorithm warp_drive") == 2);
  CHECK(run_cli("run --nonsense-flag") == 2);
  CHECK(run_cli("") == 2);
}

TEST_CASE("cli kernel run accepts the paired flags") {
  auto dir = scratch() / "kernel_run";
  fs::remove_all(dir);
  int code = run_cli(
      "run --algorithm kernel_backprojection --kernel rbf --epochs 1 "
      "--output-dir " + dir.string());
  CHECK(code == 0);
  Model model = load_model(dir / "model.json");
  CHECK(model.kernel.has_value());
}

TEST_CASE("cli gradcheck reports pass and fail") {
  CHECK(run_cli("gradcheck --trials 5 --seed 3") == 0);
  CHECK(run_cli("gradcheck --trials 3 --tolerance 0") == 1);
  CHECK(run_cli("gradcheck --trials 0") == 2);
  CHECK(run_cli("gradcheck --max-dim 50") == 2);
}

TEST_CASE("cli datagen output feeds csv runs and grids") {
  auto dir = scratch();
  auto csv = dir / "gen.csv";
  CHECK(run_cli("datagen --generator three_blobs --dataset-seed 4 --out " +
                csv.string()) == 0);
  Dataset data = load_dataset_csv(csv);
  CHECK(data.n() == 300);
  CHECK(data.n_classes == 3);

  auto run_dir = dir / "csv_run";
  fs::remove_all(run_dir);
  CHECK(run_cli("run --generator csv --data-csv " + csv.string() +
                " --epochs 1 --output-dir " + run_dir.string()) == 0);

  auto grid_path = dir / "grid.csv";
  CHECK(run_cli("grid --model " + (run_dir / "model.json").string() +
                " --data-csv " + csv.string() + " --resolution 3 --out " +
                grid_path.string()) == 0);
  std::ifstream grid(grid_path);
  std::string line;
  int lines = 0;
  while (std::getline(grid, line)) ++lines;
  CHECK(lines == 10);

  CHECK(run_cli("grid --model " + (run_dir / "model.json").string() +
                " --bounds -2 2 -2 2 --resolution 2 --out " +
                grid_path.string()) == 0);
  CHECK(run_cli("grid --resolution 3 --out " + grid_path.string()) == 2);
}

#include "distsense/config.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunResult {
  int exit_code = -1;
  std::string stdout_text;
};

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "distsense_cli_tests";
  fs::create_directories(dir);
  return dir;
}

RunResult run_cli(const std::string& args) {
  const fs::path out = scratch_dir() / "stdout.txt";
  const std::string cmd = std::string(DISTSENSE_CLI_PATH) + " " + args +
                          " > " + out.string() + " 2> /dev/null";
  const int status = std::system(cmd.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  result.stdout_text = ss.str();
  return result;
}

fs::path write_config(const std::string& name, const json& j) {
  const fs::path path = scratch_dir() / name;
  std::ofstream out(path);
  out << j.dump(2);
  return path;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("bounds command tabulates the hierarchy") {
  const fs::path cfg = write_config(
      "bounds.json", json{{"weights", {0.5, -0.5}},
                          {"n_total", 10.0},
                          {"scheme_kind", "two-group"}});
  const RunResult r = run_cli("bounds --config " + cfg.string());
  REQUIRE(r.exit_code == 0);
  CHECK(r.stdout_text.find("name,value,formula_ref") != std::string::npos);
  CHECK(r.stdout_text.find("sql,0.025,") != std::string::npos);
  CHECK(r.stdout_text.find("product_squeezed,0.00208333333333,") !=
        std::string::npos);
  CHECK(r.stdout_text.find("proposed,0.00208333333333,") !=
        std::string::npos);
  CHECK(r.stdout_text.find("heisenberg_envelope,0.0025,") !=
        std::string::npos);
  CHECK(r.stdout_text.find("scheme_qcrb,0.00208333333") != std::string::npos);
  CHECK(r.stdout_text.find("scheme_homodyne_ccrb,0.0020833333") !=
        std::string::npos);
}

TEST_CASE("bounds command on a single mode") {
  const fs::path cfg = write_config(
      "bounds1.json", json{{"weights", {1.0}},
                           {"n_total", 1.0},
                           {"scheme_kind", "product-squeezed"}});
  const RunResult r = run_cli("bounds --config " + cfg.string());
  REQUIRE(r.exit_code == 0);
  CHECK(r.stdout_text.find("sql,0.25,") != std::string::npos);
  CHECK(r.stdout_text.find("product_squeezed,0.0625,") != std::string::npos);
}

TEST_CASE("config errors exit with code 2") {
  SECTION("zero weight") {
    const fs::path cfg = write_config(
        "bad_weight.json", json{{"weights", {0.0}},
                                {"n_total", 1.0},
                                {"scheme_kind", "two-group"}});
    CHECK(run_cli("bounds --config " + cfg.string()).exit_code == 2);
  }
  SECTION("missing file") {
    CHECK(run_cli("bounds --config /nonexistent.json").exit_code == 2);
  }
  SECTION("malformed JSON") {
    const fs::path path = scratch_dir() / "broken.json";
    std::ofstream(path) << "{not json";
    CHECK(run_cli("bounds --config " + path.string()).exit_code == 2);
  }
  SECTION("unknown scheme kind") {
    const fs::path cfg = write_config(
        "bad_kind.json", json{{"weights", {0.5, -0.5}},
                              {"n_total", 1.0},
                              {"scheme_kind", "telepathy"}});
    CHECK(run_cli("bounds --config " + cfg.string()).exit_code == 2);
  }
  SECTION("sweep needs exactly two modes") {
    const fs::path cfg = write_config(
        "bad_sweep.json",
        json{{"weights", {0.5, -0.3, 0.2}},
             {"n_total", 10.0},
             {"scheme_kind", "two-group"},
             {"sweep", {{"ratios", {1.0}}}}});
    const fs::path out = scratch_dir() / "never.csv";
    CHECK(run_cli("sweep --config " + cfg.string() + " --out " +
                  out.string())
              .exit_code == 2);
  }
  SECTION("missing subcommand arguments") {
    CHECK(run_cli("sweep").exit_code == 2);
  }
}

TEST_CASE("sweep command emits a deterministic CSV") {
  const fs::path cfg = write_config(
      "sweep.json", json{{"weights", {0.5, -0.5}},
                         {"n_total", 10.0},
                         {"scheme_kind", "two-group"},
                         {"sweep", {{"ratios", {1.0}}, {"restarts", 8}}}});
  const fs::path out = scratch_dir() / "sweep.csv";
  REQUIRE(run_cli("sweep --config " + cfg.string() + " --out " +
                  out.string())
              .exit_code == 0);
  const std::string first = slurp(out);
  CHECK(first.find("ratio,qcrb,theta_opt,r1,r2,a1,a2,converged") !=
        std::string::npos);
  CHECK(first.find("\n1,0.00208333") != std::string::npos);
  CHECK(first.find(",1\n") != std::string::npos);  // converged flag

  REQUIRE(run_cli("sweep --config " + cfg.string() + " --out " +
                  out.string())
              .exit_code == 0);
  CHECK(slurp(out) == first);
}

TEST_CASE("simulate command emits a parseable report") {
  const fs::path cfg = write_config(
      "simulate.json",
      json{{"weights", {0.5, -0.5}},
           {"n_total", 10.0},
           {"scheme_kind", "two-group"},
           {"simulate", {{"nu", 2000}, {"batches", 24}, {"seed", 1}}}});
  const fs::path out = scratch_dir() / "simulate.json.out";
  REQUIRE(run_cli("simulate --config " + cfg.string() + " --out " +
                  out.string())
              .exit_code == 0);
  const std::string first = slurp(out);
  const json report = json::parse(first);
  CHECK(report.at("nu") == 2000);
  CHECK(report.at("batches") == 24);
  CHECK(report.at("seed") == 1);
  CHECK(report.at("var_ratio_to_crb").get<double>() > 0.2);
  CHECK(report.at("var_ratio_to_crb").get<double>() < 3.0);
  CHECK(report.at("crb").get<double>() ==
        Catch::Approx(1.0 / 480.0).epsilon(1e-9));
  CHECK(report.at("bias").get<double>() >= 0.0);

  // the emitted file re-parses under the report schema
  const distsense::SaturabilityReport parsed =
      distsense::parse_simulate_report(report);
  CHECK(parsed.nu == 2000);
  CHECK(parsed.batches == 24);
  CHECK(parsed.crb == Catch::Approx(1.0 / 480.0).epsilon(1e-9));

  SECTION("same seed gives identical bytes") {
    const fs::path out2 = scratch_dir() / "simulate2.json.out";
    REQUIRE(run_cli("simulate --config " + cfg.string() + " --out " +
                    out2.string())
                .exit_code == 0);
    CHECK(slurp(out2) == first);
  }

  SECTION("displacement schemes are a config error") {
    const fs::path bad = write_config(
        "simulate_bad.json",
        json{{"weights", {0.5, -0.5}},
             {"n_total", 10.0},
             {"scheme_kind", "coherent-product"},
             {"simulate", {{"nu", 100}, {"batches", 4}}}});
    const fs::path out3 = scratch_dir() / "never.json.out";
    CHECK(run_cli("simulate --config " + bad.string() + " --out " +
                  out3.string())
              .exit_code == 2);
  }
}

TEST_CASE("numerical failures exit with code 3") {
  // one-sided squeezed probe: the opposite-sign combination lies outside
  // the information matrix support
  const double n = std::sinh(0.8) * std::sinh(0.8);
  const fs::path cfg = write_config(
      "exit3.json",
      json{{"weights", {0.5, -0.5}},
           {"n_total", n},
           {"scheme_kind", "custom-two-mode"},
           {"custom", {{"r1", 0.8}, {"r2", 0.0}}}});
  CHECK(run_cli("bounds --config " + cfg.string()).exit_code == 3);
}

TEST_CASE("custom energy budget must match the parameters") {
  const fs::path cfg = write_config(
      "bad_energy.json",
      json{{"weights", {0.5, -0.5}},
           {"n_total", 3.0},
           {"scheme_kind", "custom-two-mode"},
           {"custom", {{"r1", 0.1}, {"r2", 0.1}}}});
  CHECK(run_cli("bounds --config " + cfg.string()).exit_code == 2);
}

TEST_CASE("thread budget does not change results") {
  const fs::path cfg = write_config(
      "threads.json",
      json{{"weights", {0.5, -0.5}},
           {"n_total", 10.0},
           {"scheme_kind", "two-group"},
           {"simulate", {{"nu", 1500}, {"batches", 16}, {"seed", 3}}}});
  const fs::path out1 = scratch_dir() / "threads1.json.out";
  const fs::path out2 = scratch_dir() / "threads2.json.out";
  REQUIRE(std::system(("DISTSENSE_THREADS=1 " + std::string(DISTSENSE_CLI_PATH) +
                       " simulate --config " + cfg.string() + " --out " +
                       out1.string() + " > /dev/null 2>&1")
                          .c_str()) == 0);
  REQUIRE(std::system(("DISTSENSE_THREADS=4 " + std::string(DISTSENSE_CLI_PATH) +
                       " simulate --config " + cfg.string() + " --out " +
                       out2.string() + " > /dev/null 2>&1")
                          .c_str()) == 0);
  CHECK(slurp(out1) == slurp(out2));
}

TEST_CASE("noon command prints the comparison table") {
  const RunResult r = run_cli("noon --n 4");
  REQUIRE(r.exit_code == 0);
  CHECK(r.stdout_text.find("kind,n_bar,") != std::string::npos);
  CHECK(r.stdout_text.find("noon,4,2,2,-4,16,-16,0.0625") !=
        std::string::npos);
  CHECK(r.stdout_text.find("nnoo,4,2,2,4,16,16,0.0625") != std::string::npos);

  CHECK(run_cli("noon --n 0").exit_code == 2);
}

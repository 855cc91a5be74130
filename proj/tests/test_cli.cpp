// End-to-end checks of the command-line binary (path injected at compile
// time). Each case spawns the real executable and inspects its artifacts.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;

std::string cli_bin() { return VERSOR_CLI_BIN; }

struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() /
          ("versor-cli-" +
           std::to_string(
               std::chrono::steady_clock::now().time_since_epoch().count()));
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

struct RunResult {
  int exit_code = -1;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

RunResult run_cli(const Scratch& s, const std::string& args) {
  const std::string out = s.path("stdout.txt"), err = s.path("stderr.txt");
  const std::string cmd =
      cli_bin() + " " + args + " > " + out + " 2> " + err;
  const int raw = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = raw < 0 ? raw : WEXITSTATUS(raw);
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

}  // namespace

TEST_CASE("selftest subcommand exits clean and writes a summary") {
  Scratch s;
  const auto r = run_cli(s, "selftest --out " + s.path("self.json"));
  INFO(r.err);
  REQUIRE(r.exit_code == 0);
  const auto j = nlohmann::json::parse(slurp(s.path("self.json")));
  CHECK(j["failed"] == 0);
  CHECK(j["total"].get<int>() >= 25);
  CHECK(j["version"] == "0.1.0");
  CHECK(j["first_failure"].is_null());
}

TEST_CASE("corrupt-table negative control fails by name") {
  Scratch s;
  const auto r =
      run_cli(s, "selftest --corrupt-cayley --out " + s.path("self.json"));
  CHECK(r.exit_code != 0);
  CHECK(r.err.find("engine equivalence") != std::string::npos);
  const auto j = nlohmann::json::parse(slurp(s.path("self.json")));
  CHECK(j["first_failure"] == "engine equivalence");
}

TEST_CASE("snake generation is deterministic and scores MCC 1") {
  Scratch s;
  std::ofstream(s.path("snake.cfg")) << "samples = 60\ngrid = 12\n";
  const std::string gen_args = "gen snake --seed 21 --config " +
                               s.path("snake.cfg") + " --out ";
  REQUIRE(run_cli(s, gen_args + s.path("a.jsonl")).exit_code == 0);
  REQUIRE(run_cli(s, gen_args + s.path("b.jsonl")).exit_code == 0);
  CHECK(slurp(s.path("a.jsonl")) == slurp(s.path("b.jsonl")));
  CHECK(!slurp(s.path("a.jsonl")).empty());

  const auto ev = run_cli(s, "eval snake --dataset " + s.path("a.jsonl"));
  REQUIRE(ev.exit_code == 0);
  const auto j = nlohmann::json::parse(ev.out);
  CHECK(j["mcc"] == 1.0);
  CHECK(j["samples"] == 60);
  CHECK(j["version"] == "0.1.0");
}

TEST_CASE("explicit flags beat config file entries") {
  Scratch s;
  std::ofstream(s.path("snake.cfg")) << "samples = 10\nseed = 5\n";
  const auto r = run_cli(s, "gen snake --seed 77 --config " +
                                s.path("snake.cfg") + " --out " +
                                s.path("a.jsonl"));
  REQUIRE(r.exit_code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["seed"] == 77);    // flag wins
  CHECK(j["samples"] == 10); // file fills the rest
}

TEST_CASE("nbody pipeline: gen, train, eval, determinism") {
  Scratch s;
  std::ofstream(s.path("nb.cfg")) << "trajectories = 3\nsteps = 40\n";
  const auto gen = run_cli(s, "gen nbody --seed 13 --config " + s.path("nb.cfg") +
                                  " --out " + s.path("nb.jsonl"));
  INFO(gen.err);
  REQUIRE(gen.exit_code == 0);
  {
    const auto j = nlohmann::json::parse(gen.out);
    CHECK(j["trajectories"] == 3);
    CHECK(j["seed"] == 13);
  }

  // First dataset line is the meta record.
  std::ifstream data(s.path("nb.jsonl"));
  std::string meta_line;
  std::getline(data, meta_line);
  const auto meta = nlohmann::json::parse(meta_line);
  CHECK(meta["seed"] == 13);
  CHECK(meta["version"] == "0.1.0");
  CHECK(meta.contains("config_hash"));

  const std::string train_args = "train nbody --dataset " + s.path("nb.jsonl") +
                                 " --epochs 2 --seed 4 --out ";
  const auto tr = run_cli(s, train_args + s.path("m.ckpt"));
  INFO(tr.err);
  REQUIRE(tr.exit_code == 0);
  {
    const auto j = nlohmann::json::parse(tr.out);
    CHECK(j["parameters"] == 6720);
    CHECK(j["diverged_epoch"] == -1);
    CHECK(j["final_mse"].get<double>() > 0);
  }
  CHECK(fs::exists(s.path("m.ckpt")));
  CHECK(fs::exists(s.path("m.ckpt.manifest")));
  const auto hist = nlohmann::json::parse(slurp(s.path("m.ckpt.history.json")));
  CHECK(hist["epoch_mse"].size() == 2);
  CHECK(hist["seed"] == 4);

  const std::string eval_args = "eval nbody --dataset " + s.path("nb.jsonl") +
                                " --checkpoint " + s.path("m.ckpt") + " --out ";
  const auto e1 = run_cli(s, eval_args + s.path("e1.json"));
  INFO(e1.err);
  REQUIRE(e1.exit_code == 0);
  const auto m1 = nlohmann::json::parse(slurp(s.path("e1.json")));
  CHECK(m1["teacher_forcing_mse"].get<double>() > 0);
  CHECK(m1["rollout_mse"].get<double>() >= 0);
  CHECK(m1["energy_drift_pct"].get<double>() >= 0);
  CHECK(m1["rollout_finite"] == true);
  CHECK(m1.contains("config_hash"));

  // Identical invocation, identical artifact.
  REQUIRE(run_cli(s, eval_args + s.path("e2.json")).exit_code == 0);
  CHECK(slurp(s.path("e1.json")) == slurp(s.path("e2.json")));

  // Retraining with the same seed reproduces the checkpoint bits.
  REQUIRE(run_cli(s, train_args + s.path("m2.ckpt")).exit_code == 0);
  CHECK(slurp(s.path("m.ckpt")) == slurp(s.path("m2.ckpt")));
}

TEST_CASE("benchmark subcommands emit parseable CSV") {
  Scratch s;
  const auto bp = run_cli(s, "bench-product --seed 3 --batches 1,4 --out " +
                                 s.path("p.csv"));
  REQUIRE(bp.exit_code == 0);
  const std::string csv = slurp(s.path("p.csv"));
  CHECK(csv.find("engine,batch,median_ns,mad_count,intensity\n") !=
        std::string::npos);
  CHECK(csv.find("# seed=3") != std::string::npos);
  CHECK(csv.find("naive,1,") != std::string::npos);
  CHECK(csv.find("bitmask,4,") != std::string::npos);
  const auto j = nlohmann::json::parse(bp.out);
  CHECK(j["modeled_op_ratio_naive_over_bitmask"] == doctest::Approx(6.4));

  const auto br = run_cli(s, "bench-rra --seed 3 --lengths 32,64,128 --out " +
                                 s.path("r.csv"));
  REQUIRE(br.exit_code == 0);
  const std::string rcsv = slurp(s.path("r.csv"));
  CHECK(rcsv.find("length,median_ns,mean_ns,p95_ns\n") != std::string::npos);
  CHECK(rcsv.find("# slope=") != std::string::npos);
  const auto rj = nlohmann::json::parse(br.out);
  CHECK(rj["loglog_slope"].is_number());
}

TEST_CASE("invalid invocations fail with a message") {
  Scratch s;
  CHECK(run_cli(s, "gen teapot --out " + s.path("x")).exit_code != 0);
  CHECK(run_cli(s, "gen nbody").exit_code != 0);  // missing required --out
  const auto tr = run_cli(s, "train snake --dataset x --out y");
  CHECK(tr.exit_code != 0);
  CHECK(tr.err.find("closed-form") != std::string::npos);
  CHECK(run_cli(s, "eval nbody --dataset missing.jsonl --checkpoint nope")
            .exit_code != 0);
  CHECK(run_cli(s, "bench-product --engine warp-drive").exit_code != 0);
}

// Command-line front end: invariant selftest, product/scan benchmarks,
// dataset generation, training and evaluation. Every artifact embeds the
// seed, a hash of the resolved configuration, and the artifact version.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "versor/bench/bench.hpp"
#include "versor/bench/selftest.hpp"
#include "versor/common/errors.hpp"
#include "versor/common/rng.hpp"
#include "versor/model/checkpoint.hpp"
#include "versor/model/nbody_model.hpp"
#include "versor/model/train.hpp"
#include "versor/tasks/nbody.hpp"
#include "versor/tasks/serialize.hpp"
#include "versor/tasks/snake.hpp"

namespace {

using versor::ContractError;
using versor::real;
using versor::Rng;
namespace tasks = versor::tasks;
namespace nn = versor::nn;
namespace bench = versor::bench;
using json = nlohmann::ordered_json;

// Optional key=value configuration file; '#' starts a comment. Explicit
// command-line flags win over file entries.
std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::map<std::string, std::string> out;
  if (path.empty()) return out;
  std::ifstream in(path);
  if (!in) throw ContractError("config file not readable: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    const auto strip = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      if (a == std::string::npos) return std::string();
      const auto b = s.find_last_not_of(" \t\r");
      return s.substr(a, b - a + 1);
    };
    if (strip(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ContractError("config line " + std::to_string(lineno) +
                          " is not key=value: " + line);
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));
    if (key.empty())
      throw ContractError("config line " + std::to_string(lineno) +
                          " has an empty key");
    out[key] = value;
  }
  return out;
}

template <typename T>
T parse_value(const std::string& key, const std::string& text) {
  std::istringstream is(text);
  T v{};
  if (!(is >> v) || !(is >> std::ws).eof())
    throw ContractError("config value for '" + key + "' is malformed: " + text);
  return v;
}

// Applies a config-file entry unless the flag was given explicitly.
template <typename T>
void fill_from(const std::map<std::string, std::string>& cfg,
               const CLI::Option* opt, const char* key, T& into) {
  if (opt && opt->count() > 0) return;
  if (const auto it = cfg.find(key); it != cfg.end())
    into = parse_value<T>(key, it->second);
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ContractError("cannot open output file: " + path);
  out << content;
  if (!out) throw ContractError("short write: " + path);
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty())
    std::cout << content;
  else
    write_text(out_path, content);
}

std::string canonical_kv(const std::string& cmd,
                         const std::map<std::string, std::string>& kv) {
  std::ostringstream os;
  os << cmd;
  for (const auto& [k, v] : kv) os << ' ' << k << '=' << v;
  return os.str();
}

// --- selftest ---

struct SelftestArgs {
  std::uint64_t seed = 1;
  std::string out;
  bool corrupt_cayley = false;
};

int cmd_selftest(const SelftestArgs& a) {
  bench::SelftestOptions opts;
  opts.seed = a.seed;
  opts.corrupt_cayley = a.corrupt_cayley;
  const auto checks = bench::run_selftest(opts);
  emit(a.out, bench::selftest_json(checks, opts));
  const std::string first = bench::first_failure(checks);
  if (!first.empty()) {
    std::cerr << "selftest: FAILED at '" << first << "'\n";
    return 1;
  }
  if (!a.out.empty())
    std::cout << "selftest: " << checks.size() << " checks passed\n";
  return 0;
}

// --- bench-product ---

struct BenchProductArgs {
  std::uint64_t seed = 1;
  std::string engine;
  std::string out;
  std::vector<int> batches{1, 64, 512};
};

int cmd_bench_product(const BenchProductArgs& a) {
  static const std::vector<std::string> kEngines{
      "", "naive", "bitmask", "matrix-iso", "matrix-iso-core"};
  if (std::find(kEngines.begin(), kEngines.end(), a.engine) == kEngines.end())
    throw ContractError("unknown engine: " + a.engine);

  std::map<std::string, std::string> kv{{"seed", std::to_string(a.seed)},
                                        {"engine", a.engine}};
  {
    std::ostringstream b;
    for (std::size_t i = 0; i < a.batches.size(); ++i)
      b << (i ? "," : "") << a.batches[i];
    kv["batches"] = b.str();
  }
  const std::string hash =
      tasks::config_hash_hex(canonical_kv("bench-product", kv));

  const auto reports = bench::bench_product(a.seed, a.batches, a.engine);
  emit(a.out, bench::product_csv(reports, a.seed, hash));

  if (!a.out.empty()) {
    // Measured ratios are informational; hardware decides them.
    json j;
    j["version"] = tasks::kArtifactVersion;
    j["seed"] = a.seed;
    j["config_hash"] = hash;
    j["csv"] = a.out;
    j["modeled_op_ratio_naive_over_bitmask"] = 32768.0 / 5120.0;
    const auto median_of = [&](const std::string& engine) -> double {
      double best = 0;
      int best_batch = -1;
      for (const auto& r : reports)
        if (r.engine == engine && r.batch > best_batch) {
          best = r.median_ns;
          best_batch = r.batch;
        }
      return best_batch < 0 ? 0.0 : best;
    };
    const double naive = median_of("naive"), bitmask = median_of("bitmask");
    const double full = median_of("matrix-iso"), core = median_of("matrix-iso-core");
    if (naive > 0 && bitmask > 0)
      j["measured_latency_ratio_naive_over_bitmask"] = naive / bitmask;
    if (bitmask > 0 && full > 0)
      j["measured_latency_ratio_bitmask_over_matrix_iso"] = bitmask / full;
    if (bitmask > 0 && core > 0)
      j["measured_latency_ratio_bitmask_over_matrix_iso_core"] = bitmask / core;
    std::cout << j.dump(2) << "\n";
  }
  return 0;
}

// --- bench-rra ---

struct BenchRraArgs {
  std::uint64_t seed = 1;
  std::string out;
  std::vector<int> lengths{128, 256, 512, 1024, 2048, 4096, 8192};
};

int cmd_bench_rra(const BenchRraArgs& a) {
  std::map<std::string, std::string> kv{{"seed", std::to_string(a.seed)}};
  {
    std::ostringstream l;
    for (std::size_t i = 0; i < a.lengths.size(); ++i)
      l << (i ? "," : "") << a.lengths[i];
    kv["lengths"] = l.str();
  }
  const std::string hash = tasks::config_hash_hex(canonical_kv("bench-rra", kv));

  const bench::RraBenchResult result = bench::bench_rra(a.seed, a.lengths);
  emit(a.out, bench::rra_csv(result, a.seed, hash));

  if (!a.out.empty()) {
    json j;
    j["version"] = tasks::kArtifactVersion;
    j["seed"] = a.seed;
    j["config_hash"] = hash;
    j["csv"] = a.out;
    j["loglog_slope"] = result.slope;
    std::cout << j.dump(2) << "\n";
  }
  return 0;
}

// --- gen ---

struct GenArgs {
  std::string task;
  std::uint64_t seed = 1;
  std::string out;
  std::string config_path;
};

int cmd_gen(const GenArgs& a, const CLI::Option* seed_opt) {
  if (a.out.empty()) throw ContractError("gen requires --out");
  const auto cfg = read_config_file(a.config_path);
  std::uint64_t seed = a.seed;
  fill_from(cfg, seed_opt, "seed", seed);

  if (a.task == "nbody") {
    tasks::NBodyConfig c;
    c.seed = seed;
    fill_from<int>(cfg, nullptr, "trajectories", c.n_trajectories);
    fill_from<int>(cfg, nullptr, "steps", c.steps);
    fill_from<int>(cfg, nullptr, "bodies", c.n_bodies);
    fill_from<real>(cfg, nullptr, "g", c.g);
    fill_from<real>(cfg, nullptr, "epsilon", c.epsilon);
    fill_from<real>(cfg, nullptr, "dt", c.dt);
    fill_from<real>(cfg, nullptr, "heavy_mass", c.heavy_mass);
    fill_from<real>(cfg, nullptr, "light_mass", c.light_mass);

    const auto dataset = tasks::generate_dataset(c);
    tasks::write_nbody_jsonl(a.out, dataset, c);

    json j;
    j["version"] = tasks::kArtifactVersion;
    j["seed"] = seed;
    j["config_hash"] = tasks::config_hash_hex(tasks::nbody_config_json(c));
    j["task"] = "nbody";
    j["trajectories"] = dataset.size();
    j["frames_per_trajectory"] = dataset.empty() ? 0 : dataset[0].frames.size();
    j["path"] = a.out;
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  if (a.task == "snake") {
    int grid = 16, samples = 1000;
    double broken_fraction = 0.5;
    fill_from<int>(cfg, nullptr, "grid", grid);
    fill_from<int>(cfg, nullptr, "samples", samples);
    fill_from<double>(cfg, nullptr, "broken_fraction", broken_fraction);
    if (grid < 8) throw ContractError("snake grid must be >= 8");
    if (samples < 1) throw ContractError("snake samples must be >= 1");
    if (broken_fraction < 0 || broken_fraction > 1)
      throw ContractError("broken_fraction must be in [0, 1]");

    std::vector<tasks::SnakeSample> out;
    int broken_count = 0;
    for (int i = 0; i < samples; ++i) {
      Rng item(Rng::derive_seed(seed, static_cast<std::uint64_t>(i)));
      const bool broken = item.uniform() < broken_fraction;
      broken_count += broken ? 1 : 0;
      out.push_back(tasks::gen_snake(grid, broken, item));
    }
    tasks::write_snake_jsonl(a.out, out, seed);

    std::map<std::string, std::string> kv{
        {"seed", std::to_string(seed)},
        {"grid", std::to_string(grid)},
        {"samples", std::to_string(samples)},
        {"broken_fraction", std::to_string(broken_fraction)}};
    json j;
    j["version"] = tasks::kArtifactVersion;
    j["seed"] = seed;
    j["config_hash"] = tasks::config_hash_hex(canonical_kv("gen snake", kv));
    j["task"] = "snake";
    j["samples"] = samples;
    j["broken"] = broken_count;
    j["grid"] = grid;
    j["path"] = a.out;
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  throw ContractError("unknown task for gen: " + a.task +
                      " (expected nbody or snake)");
}

// --- train ---

struct TrainArgs {
  std::string task;
  std::string dataset;
  std::string out;
  std::string config_path;
  int epochs = 200;
  std::uint64_t seed = 0;
};

// Global average over every predicted entry, no tape. Baseline for reporting
// improvement over the initialization.
real dataset_mse(const nn::RraParams& params,
                 const std::vector<nn::Sequence>& seqs) {
  double err = 0;
  std::size_t count = 0;
  for (const auto& s : seqs) {
    const nn::RraResult r = nn::rra_forward(s.features, params);
    for (std::size_t k = 0; k < s.targets.a.size(); ++k) {
      const double d =
          static_cast<double>(r.predictions.a[k] - s.targets.a[k]);
      err += d * d;
      ++count;
    }
  }
  if (count == 0) throw ContractError("dataset produced no target entries");
  return static_cast<real>(err / static_cast<double>(count));
}

int cmd_train(const TrainArgs& a, const CLI::Option* epochs_opt,
              const CLI::Option* seed_opt) {
  if (a.task == "snake")
    throw ContractError(
        "snake needs no training: the connectivity rule is closed-form; "
        "run 'eval snake' directly");
  if (a.task != "nbody") throw ContractError("unknown task for train: " + a.task);
  if (a.dataset.empty()) throw ContractError("train requires --dataset");
  if (a.out.empty()) throw ContractError("train requires --out");

  const auto cfg = read_config_file(a.config_path);
  nn::TrainConfig tc;
  tc.epochs = a.epochs;
  tc.seed = a.seed;
  fill_from(cfg, epochs_opt, "epochs", tc.epochs);
  fill_from(cfg, seed_opt, "seed", tc.seed);
  fill_from<int>(cfg, nullptr, "batch", tc.batch);
  fill_from<real>(cfg, nullptr, "lr", tc.lr);
  fill_from<real>(cfg, nullptr, "weight_decay", tc.weight_decay);
  fill_from<bool>(cfg, nullptr, "cosine_schedule", tc.cosine_schedule);
  fill_from<bool>(cfg, nullptr, "normalize", tc.normalize);
  fill_from<bool>(cfg, nullptr, "log_progress", tc.log_progress);

  tasks::NBodyConfig data_cfg;
  const auto dataset = tasks::read_nbody_jsonl(a.dataset, &data_cfg);

  nn::NBodyModelConfig mc;
  mc.n_bodies = data_cfg.n_bodies;
  fill_from<int>(cfg, nullptr, "window", mc.window);
  fill_from<int>(cfg, nullptr, "segment_len", mc.segment_len);
  fill_from<int>(cfg, nullptr, "segment_stride", mc.segment_stride);

  std::map<std::string, std::string> kv{
      {"dataset", a.dataset},
      {"epochs", std::to_string(tc.epochs)},
      {"batch", std::to_string(tc.batch)},
      {"lr", tasks::format_real(static_cast<double>(tc.lr))},
      {"weight_decay", tasks::format_real(static_cast<double>(tc.weight_decay))},
      {"cosine_schedule", tc.cosine_schedule ? "1" : "0"},
      {"normalize", tc.normalize ? "1" : "0"},
      {"seed", std::to_string(tc.seed)},
      {"window", std::to_string(mc.window)},
      {"segment_len", std::to_string(mc.segment_len)},
      {"segment_stride", std::to_string(mc.segment_stride)}};
  const std::string hash = tasks::config_hash_hex(canonical_kv("train nbody", kv));

  Rng rng(tc.seed);
  nn::NBodyModel model = nn::make_nbody_model(mc, rng);
  nn::fit_standardizers(dataset, model);
  const auto seqs = nn::build_sequences(dataset, model);

  const real initial_mse = dataset_mse(model.params, seqs);
  const nn::TrainResult result = nn::train_rra(model.params, seqs, tc);

  nn::write_checkpoint(a.out, nn::pack_nbody_model(model), tc.seed, hash);

  json history;
  history["version"] = tasks::kArtifactVersion;
  history["seed"] = tc.seed;
  history["config_hash"] = hash;
  history["epochs"] = tc.epochs;
  history["diverged_epoch"] = result.diverged_epoch;
  history["initial_mse"] = static_cast<double>(initial_mse);
  history["epoch_mse"] = json::array();
  for (real v : result.epoch_mse)
    history["epoch_mse"].push_back(static_cast<double>(v));
  write_text(a.out + ".history.json", history.dump(2) + "\n");

  json j;
  j["version"] = tasks::kArtifactVersion;
  j["seed"] = tc.seed;
  j["config_hash"] = hash;
  j["task"] = "nbody";
  j["parameters"] = model.params.parameter_count();
  j["sequences"] = seqs.size();
  j["initial_mse"] = static_cast<double>(initial_mse);
  j["final_mse"] = result.epoch_mse.empty()
                       ? nullptr
                       : json(static_cast<double>(result.epoch_mse.back()));
  j["diverged_epoch"] = result.diverged_epoch;
  j["checkpoint"] = a.out;
  j["history"] = a.out + ".history.json";
  std::cout << j.dump(2) << "\n";
  return result.diverged_epoch >= 0 ? 1 : 0;
}

// --- eval ---

struct EvalArgs {
  std::string task;
  std::string dataset;
  std::string checkpoint;
  std::string out;
  std::string config_path;
  std::uint64_t seed = 0;
};

int cmd_eval(const EvalArgs& a, const CLI::Option* seed_opt) {
  if (a.dataset.empty()) throw ContractError("eval requires --dataset");
  const auto cfg = read_config_file(a.config_path);
  std::uint64_t seed = a.seed;
  fill_from(cfg, seed_opt, "seed", seed);

  if (a.task == "snake") {
    tasks::DatasetMeta meta;
    const auto samples = tasks::read_snake_jsonl(a.dataset, &meta);
    std::vector<tasks::SnakeLabel> pred, truth;
    for (const auto& s : samples) {
      pred.push_back(tasks::snake_connectivity_algebraic(s));
      truth.push_back(s.label);
    }
    std::map<std::string, std::string> kv{{"dataset", a.dataset},
                                          {"seed", std::to_string(seed)}};
    json j;
    j["version"] = tasks::kArtifactVersion;
    j["seed"] = seed;
    j["config_hash"] = tasks::config_hash_hex(canonical_kv("eval snake", kv));
    j["dataset_seed"] = meta.seed;
    j["samples"] = samples.size();
    j["mcc"] = tasks::mcc(pred, truth);
    emit(a.out, j.dump(2) + "\n");
    if (!a.out.empty()) std::cout << j.dump(2) << "\n";
    return 0;
  }

  if (a.task != "nbody") throw ContractError("unknown task for eval: " + a.task);
  if (a.checkpoint.empty()) throw ContractError("eval nbody requires --checkpoint");

  tasks::NBodyConfig data_cfg;
  const auto dataset = tasks::read_nbody_jsonl(a.dataset, &data_cfg);
  std::uint64_t ckpt_seed = 0;
  std::string ckpt_hash;
  const nn::NBodyModel model = nn::unpack_nbody_model(
      nn::read_checkpoint(a.checkpoint, &ckpt_seed, &ckpt_hash));

  const auto seqs = nn::build_sequences(dataset, model);
  const real teacher_mse = dataset_mse(model.params, seqs);

  int horizon = 50;
  fill_from<int>(cfg, nullptr, "horizon", horizon);
  const int window = model.config.window;
  double rollout_err = 0, drift_sum = 0;
  int evaluated = 0;
  bool finite = true;
  for (const auto& traj : dataset) {
    if (static_cast<int>(traj.frames.size()) <= window) continue;
    const int h = std::min<int>(horizon,
                                static_cast<int>(traj.frames.size()) - window);
    const std::span<const tasks::Frame> init(traj.frames.data(), window);
    const auto pred = nn::rollout(model, init, h);
    for (const auto& frame : pred)
      for (const auto& body : frame)
        for (real v : body) finite = finite && std::isfinite(v);
    const std::span<const tasks::Frame> truth(traj.frames.data() + window, h);
    rollout_err += static_cast<double>(nn::frames_mse(pred, truth));

    // Drift of the predicted continuation, anchored at the last true frame.
    tasks::Trajectory cont;
    cont.masses = traj.masses;
    cont.frames.push_back(traj.frames[window - 1]);
    cont.frames.insert(cont.frames.end(), pred.begin(), pred.end());
    drift_sum += static_cast<double>(
        tasks::energy_drift(cont, data_cfg.g, data_cfg.epsilon));
    ++evaluated;
  }
  if (evaluated == 0)
    throw ContractError("no trajectory is longer than the model window");

  std::map<std::string, std::string> kv{{"dataset", a.dataset},
                                        {"checkpoint", a.checkpoint},
                                        {"horizon", std::to_string(horizon)},
                                        {"seed", std::to_string(seed)}};
  json j;
  j["version"] = tasks::kArtifactVersion;
  j["seed"] = seed;
  j["config_hash"] = tasks::config_hash_hex(canonical_kv("eval nbody", kv));
  j["checkpoint_seed"] = ckpt_seed;
  j["checkpoint_config_hash"] = ckpt_hash;
  j["trajectories"] = evaluated;
  j["horizon"] = horizon;
  j["teacher_forcing_mse"] = static_cast<double>(teacher_mse);
  j["rollout_mse"] = rollout_err / evaluated;
  j["energy_drift_pct"] = drift_sum / evaluated;
  j["rollout_finite"] = finite;
  emit(a.out, j.dump(2) + "\n");
  if (!a.out.empty()) std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"versor: conformal geometric algebra compute library tools"};
  app.require_subcommand(1);

  SelftestArgs selftest;
  auto* sub_self = app.add_subcommand("selftest", "run every invariant check");
  sub_self->add_option("--seed", selftest.seed, "check sampling seed");
  sub_self->add_option("--out", selftest.out, "write the JSON summary here");
  sub_self->add_flag("--corrupt-cayley", selftest.corrupt_cayley,
                     "negative-control hook: corrupt the product table");

  BenchProductArgs bp;
  auto* sub_bp = app.add_subcommand("bench-product",
                                    "geometric-product microbenchmark (CSV)");
  sub_bp->add_option("--seed", bp.seed, "operand seed");
  sub_bp->add_option("--engine", bp.engine,
                     "naive | bitmask | matrix-iso | matrix-iso-core "
                     "(default: all)");
  sub_bp->add_option("--out", bp.out, "CSV path (default: stdout)");
  sub_bp->add_option("--batches", bp.batches, "batch sizes")->delimiter(',');

  BenchRraArgs br;
  auto* sub_br = app.add_subcommand("bench-rra",
                                    "recurrence scan latency over lengths");
  sub_br->add_option("--seed", br.seed, "input seed");
  sub_br->add_option("--out", br.out, "CSV path (default: stdout)");
  sub_br->add_option("--lengths", br.lengths, "sequence lengths")
      ->delimiter(',');

  GenArgs gen;
  auto* sub_gen = app.add_subcommand("gen", "generate a JSONL dataset");
  sub_gen->add_option("task", gen.task, "nbody | snake")->required();
  auto* gen_seed = sub_gen->add_option("--seed", gen.seed, "generation seed");
  sub_gen->add_option("--out", gen.out, "JSONL path")->required();
  sub_gen->add_option("--config", gen.config_path, "key=value file");

  TrainArgs train;
  auto* sub_train = app.add_subcommand("train", "train the recurrent model");
  sub_train->add_option("task", train.task, "nbody")->required();
  sub_train->add_option("--dataset", train.dataset, "JSONL dataset path");
  sub_train->add_option("--out", train.out, "checkpoint path");
  auto* train_epochs = sub_train->add_option("--epochs", train.epochs, "epochs");
  auto* train_seed = sub_train->add_option("--seed", train.seed, "training seed");
  sub_train->add_option("--config", train.config_path, "key=value file");

  EvalArgs eval;
  auto* sub_eval = app.add_subcommand("eval", "evaluate on a dataset");
  sub_eval->add_option("task", eval.task, "nbody | snake")->required();
  sub_eval->add_option("--dataset", eval.dataset, "JSONL dataset path");
  sub_eval->add_option("--checkpoint", eval.checkpoint,
                       "trained checkpoint (nbody)");
  sub_eval->add_option("--out", eval.out, "metrics JSON path (default: stdout)");
  auto* eval_seed = sub_eval->add_option("--seed", eval.seed, "evaluation seed");
  sub_eval->add_option("--config", eval.config_path, "key=value file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sub_self->parsed()) return cmd_selftest(selftest);
    if (sub_bp->parsed()) return cmd_bench_product(bp);
    if (sub_br->parsed()) return cmd_bench_rra(br);
    if (sub_gen->parsed()) return cmd_gen(gen, gen_seed);
    if (sub_train->parsed()) return cmd_train(train, train_epochs, train_seed);
    if (sub_eval->parsed()) return cmd_eval(eval, eval_seed);
  } catch (const std::exception& e) {
    std::cerr << "versor: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

#include "versor/tasks/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "versor/common/errors.hpp"

namespace versor::tasks {

namespace {

using nlohmann::json;

void append_record(std::string& out, const char* key, const std::string& v,
                   bool first = false) {
  if (!first) out += ',';
  out += '"';
  out += key;
  out += "\":";
  out += v;
}

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ContractError("serialize: cannot open " + path + " for writing");
  return f;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ContractError("serialize: cannot open " + path);
  return f;
}

std::string meta_line(std::uint64_t seed, const std::string& hash) {
  std::string s = "{";
  append_record(s, "seed", std::to_string(seed), true);
  append_record(s, "config_hash", quoted(hash));
  append_record(s, "version", quoted(kArtifactVersion));
  s += '}';
  return s;
}

DatasetMeta parse_meta(const std::string& line) {
  const json j = json::parse(line);
  DatasetMeta m;
  m.seed = j.at("seed").get<std::uint64_t>();
  m.config_hash = j.at("config_hash").get<std::string>();
  m.version = j.at("version").get<std::string>();
  return m;
}

}  // namespace

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string config_hash_hex(const std::string& canonical) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string nbody_config_json(const NBodyConfig& c) {
  std::string s = "{";
  append_record(s, "n_bodies", std::to_string(c.n_bodies), true);
  append_record(s, "g", format_real(c.g));
  append_record(s, "epsilon", format_real(c.epsilon));
  append_record(s, "dt", format_real(c.dt));
  append_record(s, "steps", std::to_string(c.steps));
  append_record(s, "n_trajectories", std::to_string(c.n_trajectories));
  append_record(s, "heavy_mass", format_real(c.heavy_mass));
  append_record(s, "light_mass", format_real(c.light_mass));
  append_record(s, "seed", std::to_string(c.seed));
  s += '}';
  return s;
}

void write_nbody_jsonl(const std::string& path,
                       const std::vector<Trajectory>& dataset,
                       const NBodyConfig& config) {
  std::ofstream f = open_out(path);
  const std::string cfg = nbody_config_json(config);
  f << meta_line(config.seed, config_hash_hex(cfg)) << '\n';
  for (const Trajectory& t : dataset) {
    std::string s = "{\"masses\":[";
    for (std::size_t i = 0; i < t.masses.size(); ++i) {
      if (i) s += ',';
      s += format_real(t.masses[i]);
    }
    s += "],\"frames\":[";
    for (std::size_t fr = 0; fr < t.frames.size(); ++fr) {
      if (fr) s += ',';
      s += '[';
      for (std::size_t b = 0; b < t.frames[fr].size(); ++b) {
        if (b) s += ',';
        s += '[';
        for (int k = 0; k < 4; ++k) {
          if (k) s += ',';
          s += format_real(t.frames[fr][b][k]);
        }
        s += ']';
      }
      s += ']';
    }
    s += "],\"config\":";
    s += cfg;
    s += '}';
    f << s << '\n';
  }
}

std::vector<Trajectory> read_nbody_jsonl(const std::string& path,
                                         NBodyConfig* config_out,
                                         DatasetMeta* meta_out) {
  std::ifstream f = open_in(path);
  std::string line;
  if (!std::getline(f, line))
    throw ContractError("read_nbody_jsonl: empty file " + path);
  const DatasetMeta meta = parse_meta(line);
  if (meta_out) *meta_out = meta;

  std::vector<Trajectory> out;
  bool config_read = false;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    Trajectory t;
    t.masses = j.at("masses").get<std::vector<real>>();
    for (const json& frame : j.at("frames")) {
      Frame fr;
      for (const json& body : frame)
        fr.push_back({body.at(0).get<real>(), body.at(1).get<real>(),
                      body.at(2).get<real>(), body.at(3).get<real>()});
      t.frames.push_back(std::move(fr));
    }
    if (config_out && !config_read) {
      const json c = j.at("config");
      config_out->n_bodies = c.at("n_bodies").get<int>();
      config_out->g = c.at("g").get<real>();
      config_out->epsilon = c.at("epsilon").get<real>();
      config_out->dt = c.at("dt").get<real>();
      config_out->steps = c.at("steps").get<int>();
      config_out->n_trajectories = c.at("n_trajectories").get<int>();
      config_out->heavy_mass = c.at("heavy_mass").get<real>();
      config_out->light_mass = c.at("light_mass").get<real>();
      config_out->seed = c.at("seed").get<std::uint64_t>();
      config_read = true;
    }
    out.push_back(std::move(t));
  }
  return out;
}

void write_snake_jsonl(const std::string& path,
                       const std::vector<SnakeSample>& samples,
                       std::uint64_t seed) {
  std::ofstream f = open_out(path);
  std::string canonical = "snake:" + std::to_string(seed) + ":" +
                          std::to_string(samples.size());
  f << meta_line(seed, config_hash_hex(canonical)) << '\n';
  for (const SnakeSample& s : samples) {
    std::string line = "{";
    append_record(line, "grid", std::to_string(s.grid), true);
    line += ",\"path\":[";
    for (std::size_t i = 0; i < s.path.size(); ++i) {
      if (i) line += ',';
      line += '[' + std::to_string(s.path[i][0]) + ',' +
              std::to_string(s.path[i][1]) + ']';
    }
    line += ']';
    append_record(line, "label", quoted(s.label == SnakeLabel::kBroken
                                            ? "broken"
                                            : "connected"));
    append_record(line, "gap_index", s.gap_index < 0
                                         ? std::string("null")
                                         : std::to_string(s.gap_index));
    line += '}';
    f << line << '\n';
  }
}

std::vector<SnakeSample> read_snake_jsonl(const std::string& path,
                                          DatasetMeta* meta_out) {
  std::ifstream f = open_in(path);
  std::string line;
  if (!std::getline(f, line))
    throw ContractError("read_snake_jsonl: empty file " + path);
  const DatasetMeta meta = parse_meta(line);
  if (meta_out) *meta_out = meta;

  std::vector<SnakeSample> out;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    SnakeSample s;
    s.grid = j.at("grid").get<int>();
    for (const json& p : j.at("path"))
      s.path.push_back({p.at(0).get<int>(), p.at(1).get<int>()});
    s.label = j.at("label").get<std::string>() == "broken"
                  ? SnakeLabel::kBroken
                  : SnakeLabel::kConnected;
    s.gap_index = j.at("gap_index").is_null() ? -1 : j.at("gap_index").get<int>();
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace versor::tasks

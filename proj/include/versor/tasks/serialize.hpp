#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "versor/tasks/nbody.hpp"
#include "versor/tasks/snake.hpp"

namespace versor::tasks {

inline constexpr const char* kArtifactVersion = "0.1.0";

// First line of every dataset file; identifies how the rest was produced.
struct DatasetMeta {
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string version;
};

// Shortest-fixed-width float text: 17 significant digits round-trip any
// double exactly.
std::string format_real(double v);

// FNV-1a 64 over a canonical string, as 16 hex characters.
std::string config_hash_hex(const std::string& canonical);

// Canonical JSON of an N-body configuration, also the hashing preimage.
std::string nbody_config_json(const NBodyConfig& c);

// JSON Lines datasets. Line 1 is the meta record
// {"seed":...,"config_hash":"...","version":"..."}; each further line is one
// sample with a fixed field order.
void write_nbody_jsonl(const std::string& path,
                       const std::vector<Trajectory>& dataset,
                       const NBodyConfig& config);
std::vector<Trajectory> read_nbody_jsonl(const std::string& path,
                                         NBodyConfig* config_out = nullptr,
                                         DatasetMeta* meta_out = nullptr);

void write_snake_jsonl(const std::string& path,
                       const std::vector<SnakeSample>& samples,
                       std::uint64_t seed);
std::vector<SnakeSample> read_snake_jsonl(const std::string& path,
                                          DatasetMeta* meta_out = nullptr);

}  // namespace versor::tasks

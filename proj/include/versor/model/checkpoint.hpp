#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "versor/model/nbody_model.hpp"

namespace versor::nn {

struct NamedArray {
  std::string name;
  int rows = 0, cols = 0;
  std::vector<real> data;
};

// Flat little-endian binary of named double arrays, magic "VSRCKPT1".
// A human-readable manifest (names, shapes, seed, config hash, version) is
// written next to it as <path>.manifest.
void write_checkpoint(const std::string& path,
                      const std::vector<NamedArray>& arrays,
                      std::uint64_t seed, const std::string& config_hash);

std::vector<NamedArray> read_checkpoint(const std::string& path,
                                        std::uint64_t* seed_out = nullptr,
                                        std::string* config_hash_out = nullptr);

// N-body model packing: weight matrices plus both standardizers.
std::vector<NamedArray> pack_nbody_model(const NBodyModel& model);
NBodyModel unpack_nbody_model(const std::vector<NamedArray>& arrays);

}  // namespace versor::nn

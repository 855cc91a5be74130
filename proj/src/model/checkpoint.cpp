#include "versor/model/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "versor/common/errors.hpp"
#include "versor/tasks/serialize.hpp"

namespace versor::nn {

namespace {

constexpr char kMagic[8] = {'V', 'S', 'R', 'C', 'K', 'P', 'T', '1'};

template <typename T>
void put(std::ofstream& f, T v) {
  f.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::ifstream& f) {
  T v{};
  f.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!f) throw ContractError("checkpoint: truncated file");
  return v;
}

Matrix to_matrix(const NamedArray& a) {
  Matrix m(a.rows, a.cols);
  m.a = a.data;
  return m;
}

const NamedArray& find(const std::vector<NamedArray>& arrays,
                       const std::string& name) {
  for (const auto& a : arrays)
    if (a.name == name) return a;
  throw ContractError("checkpoint: missing array " + name);
}

}  // namespace

void write_checkpoint(const std::string& path,
                      const std::vector<NamedArray>& arrays,
                      std::uint64_t seed, const std::string& config_hash) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ContractError("checkpoint: cannot open " + path);
  f.write(kMagic, sizeof kMagic);
  put<std::uint64_t>(f, seed);
  put<std::uint32_t>(f, static_cast<std::uint32_t>(config_hash.size()));
  f.write(config_hash.data(), static_cast<std::streamsize>(config_hash.size()));
  put<std::uint32_t>(f, static_cast<std::uint32_t>(arrays.size()));
  for (const auto& a : arrays) {
    if (static_cast<std::size_t>(a.rows) * a.cols != a.data.size())
      throw ContractError("checkpoint: shape mismatch in " + a.name);
    put<std::uint32_t>(f, static_cast<std::uint32_t>(a.name.size()));
    f.write(a.name.data(), static_cast<std::streamsize>(a.name.size()));
    put<std::int32_t>(f, a.rows);
    put<std::int32_t>(f, a.cols);
    f.write(reinterpret_cast<const char*>(a.data.data()),
            static_cast<std::streamsize>(a.data.size() * sizeof(real)));
  }
  if (!f) throw ContractError("checkpoint: write failed for " + path);

  std::ofstream man(path + ".manifest");
  if (!man) throw ContractError("checkpoint: cannot open manifest for " + path);
  man << "version " << tasks::kArtifactVersion << '\n';
  man << "seed " << seed << '\n';
  man << "config_hash " << config_hash << '\n';
  for (const auto& a : arrays)
    man << "array " << a.name << ' ' << a.rows << ' ' << a.cols << '\n';
}

std::vector<NamedArray> read_checkpoint(const std::string& path,
                                        std::uint64_t* seed_out,
                                        std::string* config_hash_out) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ContractError("checkpoint: cannot open " + path);
  char magic[8];
  f.read(magic, sizeof magic);
  if (!f || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw ContractError("checkpoint: bad magic in " + path);

  const auto seed = get<std::uint64_t>(f);
  if (seed_out) *seed_out = seed;
  const auto hash_len = get<std::uint32_t>(f);
  std::string hash(hash_len, '\0');
  f.read(hash.data(), hash_len);
  if (!f) throw ContractError("checkpoint: truncated file");
  if (config_hash_out) *config_hash_out = hash;

  const auto count = get<std::uint32_t>(f);
  std::vector<NamedArray> arrays;
  arrays.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    NamedArray a;
    const auto name_len = get<std::uint32_t>(f);
    a.name.resize(name_len);
    f.read(a.name.data(), name_len);
    a.rows = get<std::int32_t>(f);
    a.cols = get<std::int32_t>(f);
    if (a.rows < 0 || a.cols < 0 || a.rows > (1 << 20) || a.cols > (1 << 20))
      throw ContractError("checkpoint: implausible shape in " + path);
    a.data.resize(static_cast<std::size_t>(a.rows) * a.cols);
    f.read(reinterpret_cast<char*>(a.data.data()),
           static_cast<std::streamsize>(a.data.size() * sizeof(real)));
    if (!f) throw ContractError("checkpoint: truncated file");
    arrays.push_back(std::move(a));
  }
  return arrays;
}

std::vector<NamedArray> pack_nbody_model(const NBodyModel& model) {
  const auto mat = [](const char* name, const Matrix& m) {
    return NamedArray{name, m.rows, m.cols, m.a};
  };
  const auto vec = [](const char* name, const std::vector<real>& v) {
    return NamedArray{name, 1, static_cast<int>(v.size()), v};
  };
  std::vector<real> cfg{
      static_cast<real>(model.config.window),
      static_cast<real>(model.config.n_bodies),
      static_cast<real>(model.config.segment_len),
      static_cast<real>(model.config.segment_stride)};
  return {mat("lift", model.params.lift),
          mat("w_bivector", model.params.w_bivector),
          mat("readout", model.params.readout),
          vec("feature_mean", model.feature_std.mean),
          vec("feature_std", model.feature_std.stddev),
          vec("target_mean", model.target_std.mean),
          vec("target_std", model.target_std.stddev),
          vec("model_config", cfg)};
}

NBodyModel unpack_nbody_model(const std::vector<NamedArray>& arrays) {
  NBodyModel m;
  const auto& cfg = find(arrays, "model_config").data;
  if (cfg.size() != 4) throw ContractError("checkpoint: bad model_config");
  m.config.window = static_cast<int>(cfg[0]);
  m.config.n_bodies = static_cast<int>(cfg[1]);
  m.config.segment_len = static_cast<int>(cfg[2]);
  m.config.segment_stride = static_cast<int>(cfg[3]);
  m.params.lift = to_matrix(find(arrays, "lift"));
  m.params.w_bivector = to_matrix(find(arrays, "w_bivector"));
  m.params.readout = to_matrix(find(arrays, "readout"));
  m.feature_std.mean = find(arrays, "feature_mean").data;
  m.feature_std.stddev = find(arrays, "feature_std").data;
  m.target_std.mean = find(arrays, "target_mean").data;
  m.target_std.stddev = find(arrays, "target_std").data;
  return m;
}

}  // namespace versor::nn

#include "versor/bench/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <sstream>

#include "versor/algebra/cayley.hpp"
#include "versor/algebra/engines.hpp"
#include "versor/common/errors.hpp"
#include "versor/common/rng.hpp"
#include "versor/matiso/matiso.hpp"
#include "versor/model/rra.hpp"
#include "versor/tasks/serialize.hpp"

namespace versor::bench {
namespace {

// Fold kernel outputs into a volatile so the optimizer cannot drop the work.
volatile double g_sink = 0;

double now_ns() {
  const auto t = std::chrono::steady_clock::now().time_since_epoch();
  return static_cast<double>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(t).count());
}

double percentile(const std::vector<double>& sorted, double q) {
  const auto n = sorted.size();
  const auto idx = static_cast<std::size_t>(
      std::min<double>(static_cast<double>(n) - 1,
                       std::ceil(q * static_cast<double>(n)) - 1));
  return sorted[idx];
}

// Modeled per-product accounting. The byte figures assume one float32 operand
// pair per op plus, for the table engine, two int32 metadata words; dividing
// ops by bytes gives the intensity column.
struct OpModel {
  std::uint64_t mads, bytes;
};

OpModel modeled_ops(const std::string& engine) {
  if (engine == "naive") return {32 * 32 * 32, 32 * 32 * 32 * 16};  // dim^3
  if (engine == "bitmask") return {5 * 32 * 32, 5 * 32 * 32 * 8};   // n dim^2
  if (engine == "matrix-iso" || engine == "matrix-iso-core")
    return {256, 1024};  // 64 complex MADs, 4 real ops / 4 bytes each
  return {0, 0};
}

}  // namespace

BenchReport time_kernel(std::string engine, int batch, int reps,
                        const std::function<void()>& fn, int warmup) {
  reps = std::max(reps, 30);
  for (int i = 0; i < warmup; ++i) fn();
  std::vector<double> times(static_cast<std::size_t>(reps));
  for (auto& t : times) {
    const double t0 = now_ns();
    fn();
    t = now_ns() - t0;
  }
  std::sort(times.begin(), times.end());

  BenchReport r;
  r.engine = std::move(engine);
  r.batch = batch;
  r.repetitions = reps;
  r.median_ns = reps % 2 ? times[reps / 2]
                         : 0.5 * (times[reps / 2 - 1] + times[reps / 2]);
  double sum = 0;
  for (double t : times) sum += t;
  r.mean_ns = sum / reps;
  r.p95_ns = percentile(times, 0.95);
  const OpModel m = modeled_ops(r.engine);
  r.mad_count = m.mads;
  r.bytes_modeled = m.bytes;
  r.intensity = m.bytes ? static_cast<double>(m.mads) / static_cast<double>(m.bytes)
                        : 0.0;
  return r;
}

std::vector<BenchReport> bench_product(std::uint64_t seed,
                                       std::span<const int> batches,
                                       const std::string& engine_filter) {
  constexpr int kPool = 256;  // operand pairs cycled through per repetition
  const Signature& sig = cl41();
  const std::uint32_t dim = sig.dim();

  Rng rng(seed);
  std::vector<real> pool_a(kPool * dim), pool_b(kPool * dim);
  for (auto& v : pool_a) v = static_cast<real>(rng.normal());
  for (auto& v : pool_b) v = static_cast<real>(rng.normal());

  const CayleyTable table(sig);
  std::vector<Multivector> mv_a, mv_b;
  std::vector<matiso::Mat4C> mat_a(kPool), mat_b(kPool);
  for (int p = 0; p < kPool; ++p) {
    Multivector a(sig), b(sig);
    std::memcpy(a.data(), &pool_a[p * dim], dim * sizeof(real));
    std::memcpy(b.data(), &pool_b[p * dim], dim * sizeof(real));
    mat_a[p] = matiso::rho(a);
    mat_b[p] = matiso::rho(b);
    mv_a.push_back(std::move(a));
    mv_b.push_back(std::move(b));
  }
  const auto& inv_map = matiso::IsoBasis::instance().inverse_map();

  const bool all = engine_filter.empty();
  std::vector<BenchReport> reports;
  for (int batch : batches) {
    if (batch < 1) throw ContractError("bench_product: batch must be >= 1");
    const auto pair = [&](int i) { return i % kPool; };

    if (all || engine_filter == "naive")
      reports.push_back(time_kernel("naive", batch, 30, [&] {
        real out[32];
        double acc = 0;
        for (int i = 0; i < batch; ++i) {
          const int p = pair(i);
          std::memset(out, 0, sizeof out);
          gp_naive_kernel(table, &pool_a[p * dim], &pool_b[p * dim], out);
          acc += out[0];
        }
        g_sink = acc;
      }));

    if (all || engine_filter == "bitmask")
      reports.push_back(time_kernel("bitmask", batch, 30, [&] {
        real out[32];
        double acc = 0;
        for (int i = 0; i < batch; ++i) {
          const int p = pair(i);
          std::memset(out, 0, sizeof out);
          gp_bitmask_kernel(sig, &pool_a[p * dim], &pool_b[p * dim], out);
          acc += out[0];
        }
        g_sink = acc;
      }));

    if (all || engine_filter == "matrix-iso")
      reports.push_back(time_kernel("matrix-iso", batch, 30, [&] {
        // Full engine path: both operands mapped in, product, coefficients
        // mapped back out through the linear blade map.
        double acc = 0;
        for (int i = 0; i < batch; ++i) {
          const int p = pair(i);
          const matiso::Mat4C prod =
              matiso::mat4c_mul(matiso::rho(mv_a[p]), matiso::rho(mv_b[p]));
          real flat[32], out[32];
          for (int k = 0; k < 16; ++k) {
            flat[2 * k] = prod.m[k].real();
            flat[2 * k + 1] = prod.m[k].imag();
          }
          for (int r = 0; r < 32; ++r) {
            real c = 0;
            for (int k = 0; k < 32; ++k) c += inv_map[r * 32 + k] * flat[k];
            out[r] = c;
          }
          acc += out[0];
        }
        g_sink = acc;
      }));

    if (all || engine_filter == "matrix-iso-core")
      reports.push_back(time_kernel("matrix-iso-core", batch, 30, [&] {
        double acc = 0;
        for (int i = 0; i < batch; ++i) {
          const int p = pair(i);
          const matiso::Mat4C prod =
              matiso::mat4c_mul(mat_a[p], mat_b[p]);
          acc += prod.m[0].real();
        }
        g_sink = acc;
      }));
  }
  return reports;
}

RraBenchResult bench_rra(std::uint64_t seed, std::span<const int> lengths,
                         int reps) {
  if (lengths.size() < 2)
    throw ContractError("bench_rra: need at least two lengths for a slope");

  constexpr int kDIn = 16;
  Rng rng(seed);
  nn::RraParams params = nn::RraParams::init(kDIn, 4, rng);

  RraBenchResult result;
  std::vector<double> log_l, log_t;
  for (int length : lengths) {
    if (length < 1) throw ContractError("bench_rra: length must be >= 1");
    nn::Matrix features(length, kDIn);
    // Quarter-scale inputs keep generator magnitudes in the regime where a
    // normalized scan of any depth holds its norm.
    for (auto& v : features.a) v = static_cast<real>(rng.normal(0.0, 0.25));
    const BenchReport r =
        time_kernel("rra", length, reps,
                    [&] { g_sink = nn::rra_checksum_scan(features, params); },
                    2);
    result.points.push_back({length, r.median_ns, r.mean_ns, r.p95_ns});
    log_l.push_back(std::log(static_cast<double>(length)));
    log_t.push_back(std::log(r.median_ns));
  }
  result.slope = fit_loglog_slope(log_l, log_t);
  return result;
}

double fit_loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw ContractError("fit_loglog_slope: need matching series, length >= 2");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

std::string meta_comment(std::uint64_t seed, const std::string& config_hash) {
  std::ostringstream os;
  os << "# seed=" << seed << " config_hash=" << config_hash
     << " version=" << tasks::kArtifactVersion << "\n";
  return os.str();
}

}  // namespace

std::string product_csv(std::span<const BenchReport> reports,
                        std::uint64_t seed, const std::string& config_hash) {
  std::ostringstream os;
  os << meta_comment(seed, config_hash);
  os << "engine,batch,median_ns,mad_count,intensity\n";
  for (const auto& r : reports)
    os << r.engine << ',' << r.batch << ',' << tasks::format_real(r.median_ns)
       << ',' << r.mad_count << ',' << tasks::format_real(r.intensity) << "\n";
  return os.str();
}

std::string rra_csv(const RraBenchResult& result, std::uint64_t seed,
                    const std::string& config_hash) {
  std::ostringstream os;
  os << meta_comment(seed, config_hash);
  os << "length,median_ns,mean_ns,p95_ns\n";
  for (const auto& p : result.points)
    os << p.length << ',' << tasks::format_real(p.median_ns) << ','
       << tasks::format_real(p.mean_ns) << ',' << tasks::format_real(p.p95_ns)
       << "\n";
  os << "# slope=" << tasks::format_real(result.slope) << "\n";
  return os.str();
}

std::vector<BenchReport> parse_product_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  bool saw_header = false;
  std::vector<BenchReport> out;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!saw_header) {
      if (line != "engine,batch,median_ns,mad_count,intensity")
        throw ContractError("parse_product_csv: unexpected header: " + line);
      saw_header = true;
      continue;
    }
    std::istringstream row(line);
    std::string field;
    BenchReport r;
    if (!std::getline(row, r.engine, ',') || !std::getline(row, field, ','))
      throw ContractError("parse_product_csv: truncated row: " + line);
    r.batch = std::stoi(field);
    if (!std::getline(row, field, ','))
      throw ContractError("parse_product_csv: truncated row: " + line);
    r.median_ns = std::stod(field);
    if (!std::getline(row, field, ','))
      throw ContractError("parse_product_csv: truncated row: " + line);
    r.mad_count = std::stoull(field);
    if (!std::getline(row, field))
      throw ContractError("parse_product_csv: truncated row: " + line);
    r.intensity = std::stod(field);
    r.bytes_modeled =
        r.intensity > 0
            ? static_cast<std::uint64_t>(
                  std::llround(static_cast<double>(r.mad_count) / r.intensity))
            : 0;
    out.push_back(std::move(r));
  }
  if (!saw_header) throw ContractError("parse_product_csv: missing header");
  return out;
}

}  // namespace versor::bench

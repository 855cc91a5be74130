#include "versor/bench/selftest.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <utility>

#include "json.hpp"
#include "versor/ad/grad_check.hpp"
#include "versor/ad/tape.hpp"
#include "versor/algebra/cayley.hpp"
#include "versor/algebra/engines.hpp"
#include "versor/algebra/grade_pairs.hpp"
#include "versor/algebra/op_count.hpp"
#include "versor/common/rng.hpp"
#include "versor/conformal/conformal.hpp"
#include "versor/matiso/matiso.hpp"
#include "versor/model/checkpoint.hpp"
#include "versor/model/gpa.hpp"
#include "versor/model/init.hpp"
#include "versor/model/nbody_model.hpp"
#include "versor/model/rra.hpp"
#include "versor/tasks/nbody.hpp"
#include "versor/tasks/serialize.hpp"
#include "versor/tasks/snake.hpp"

namespace versor::bench {
namespace {

using CheckFn = std::function<std::pair<bool, std::string>()>;

std::string fmt(const char* pattern, double a, double b = 0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

Multivector random_mv(Rng& rng, real scale = real(1)) {
  Multivector m(cl41());
  for (std::uint32_t k = 0; k < m.dim(); ++k)
    m[k] = static_cast<real>(rng.normal(0.0, scale));
  return m;
}

double max_abs_diff(const Multivector& a, const Multivector& b) {
  double worst = 0;
  for (std::uint32_t k = 0; k < a.dim(); ++k)
    worst = std::max(worst, std::abs(static_cast<double>(a[k] - b[k])));
  return worst;
}

std::filesystem::path scratch_path(const char* stem) {
  const auto nonce = std::chrono::steady_clock::now().time_since_epoch().count();
  return std::filesystem::temp_directory_path() /
         (std::string("versor-") + stem + "-" + std::to_string(nonce));
}

}  // namespace

std::vector<SelfCheck> run_selftest(const SelftestOptions& opts) {
  const Signature& sig = cl41();
  CayleyTable session_table(sig);
  if (opts.corrupt_cayley) session_table.corrupt_entry(3, 5);

  std::vector<SelfCheck> checks;
  const auto run = [&](const char* name, const CheckFn& fn) {
    SelfCheck c;
    c.name = name;
    try {
      auto [ok, detail] = fn();
      c.pass = ok;
      c.detail = std::move(detail);
    } catch (const std::exception& e) {
      c.pass = false;
      c.detail = std::string("unexpected exception: ") + e.what();
    }
    checks.push_back(std::move(c));
  };

  // --- algebra core ---

  run("engine equivalence", [&]() -> std::pair<bool, std::string> {
    // Basis pairs against the session table, exactly.
    for (std::uint32_t i = 0; i < sig.dim(); ++i)
      for (std::uint32_t j = 0; j < sig.dim(); ++j) {
        const Multivector p = geometric_product_naive(
            Multivector::basis_blade(sig, i), Multivector::basis_blade(sig, j),
            session_table);
        Multivector expect(sig);
        expect[i ^ j] = geometric_product_bitmask(
            Multivector::basis_blade(sig, i),
            Multivector::basis_blade(sig, j))[i ^ j];
        if (max_abs_diff(p, expect) != 0.0)
          return {false, fmt("basis pair (%g, %g) disagrees",
                             static_cast<double>(i), static_cast<double>(j))};
      }
    // Random operands across all three engines.
    Rng rng(Rng::derive_seed(opts.seed, 11));
    double worst = 0;
    for (int t = 0; t < 100; ++t) {
      const Multivector a = random_mv(rng), b = random_mv(rng);
      const Multivector nv = geometric_product_naive(a, b, session_table);
      const Multivector bm = geometric_product_bitmask(a, b);
      const Multivector mi = matiso::product_via_iso(a, b);
      worst = std::max({worst, max_abs_diff(nv, bm), max_abs_diff(bm, mi)});
    }
    return {worst < 1e-10, fmt("max cross-engine delta %.3g (tol 1e-10)", worst)};
  });

  run("generator squares match the metric", [&]() -> std::pair<bool, std::string> {
    for (int g = 0; g < sig.n(); ++g) {
      const Multivector e = Multivector::basis_blade(sig, 1u << g);
      const Multivector sq = geometric_product_bitmask(e, e);
      if (sq[0] != static_cast<real>(sig.diag(g)))
        return {false, fmt("e_%g squares to %g", g + 1.0,
                           static_cast<double>(sq[0]))};
    }
    return {true, "e_i^2 = metric diagonal for all generators"};
  });

  run("reversion is an anti-automorphism", [&]() -> std::pair<bool, std::string> {
    Rng rng(Rng::derive_seed(opts.seed, 12));
    double worst = 0;
    for (int t = 0; t < 50; ++t) {
      const Multivector a = random_mv(rng), b = random_mv(rng);
      worst = std::max(worst, max_abs_diff(reverse(a * b),
                                           reverse(b) * reverse(a)));
    }
    return {worst < 1e-12, fmt("max |rev(ab) - rev(b)rev(a)| %.3g", worst)};
  });

  run("product associativity", [&]() -> std::pair<bool, std::string> {
    Rng rng(Rng::derive_seed(opts.seed, 13));
    double worst = 0;
    for (int t = 0; t < 50; ++t) {
      const Multivector a = random_mv(rng), b = random_mv(rng),
                        c = random_mv(rng);
      worst = std::max(worst, max_abs_diff((a * b) * c, a * (b * c)));
    }
    return {worst < 1e-10, fmt("max |(ab)c - a(bc)| %.3g", worst)};
  });

  run("product distributivity", [&]() -> std::pair<bool, std::string> {
    Rng rng(Rng::derive_seed(opts.seed, 14));
    double worst = 0;
    for (int t = 0; t < 50; ++t) {
      const Multivector a = random_mv(rng), b = random_mv(rng),
                        c = random_mv(rng);
      worst = std::max(worst, max_abs_diff(a * (b + c), a * b + a * c));
    }
    return {worst < 1e-12, fmt("max |a(b+c) - ab - ac| %.3g", worst)};
  });

  run("scalar product fast path", [&]() -> std::pair<bool, std::string> {
    Rng rng(Rng::derive_seed(opts.seed, 15));
    double worst = 0;
    for (int t = 0; t < 50; ++t) {
      const Multivector a = random_mv(rng), b = random_mv(rng);
      const double full = static_cast<double>((a * reverse(b))[0]);
      worst = std::max(
          worst, std::abs(full - static_cast<double>(scalar_product_fast(a, b))));
    }
    return {worst < 1e-12, fmt("max |fast - <a rev(b)>_0| %.3g", worst)};
  });

  run("grade-2 pair table", [&]() -> std::pair<bool, std::string> {
    const Grade2Pairs pairs = build_grade2_pairs(sig);
    Rng rng(Rng::derive_seed(opts.seed, 16));
    double worst = 0;
    for (int t = 0; t < 20; ++t) {
      const Multivector a = random_mv(rng), b = random_mv(rng);
      const Multivector direct = grade_project(a * reverse(b), 2);
      std::vector<real> via(pairs.masks.size(), real(0));
      for (const auto& e : pairs.entries) via[e.slot] += e.w * a[e.p] * b[e.q];
      for (std::size_t s = 0; s < pairs.masks.size(); ++s)
        worst = std::max(worst, std::abs(static_cast<double>(
                                    via[s] - direct[pairs.masks[s]])));
    }
    return {worst < 1e-12, fmt("max sparse-vs-dense delta %.3g", worst)};
  });

  run("blade norm signs", [&]() -> std::pair<bool, std::string> {
    for (std::uint32_t k = 0; k < sig.dim(); ++k) {
      const Multivector e = Multivector::basis_blade(sig, k);
      const real direct = (e * reverse(e))[0];
      if (direct != sig.blade_norm_sign(k))
        return {false, fmt("blade %g: sign table %g disagrees",
                           static_cast<double>(k),
                           static_cast<double>(sig.blade_norm_sign(k)))};
    }
    return {true, "<E rev(E)>_0 matches the precomputed signs for all 32 blades"};
  });

  // --- conformal layer ---

  run("lifted points are null", [&]() -> std::pair<bool, std::string> {
    Rng rng(Rng::derive_seed(opts.seed, 21));
    double worst = 0;
    for (int t = 0; t < 200; ++t) {
      const real x[3] = {static_cast<real>(rng.uniform(-10, 10)),
                         static_cast<real>(rng.uniform(-10, 10)),
                         static_cast<real>(rng.uniform(-10, 10))};
      worst = std::max(worst, std::abs(static_cast<double>(
                                  scalar_norm(cga::lift(x)))));
    }
    return {worst < 1e-10, fmt("max |<X rev(X)>_0| %.3g (tol 1e-10)", worst)};
  });

  run("embedding encodes distance", [&]() -> std::pair<bool, std::string> {
    Rng rng(Rng::derive_seed(opts.seed, 22));
    double worst = 0;
    for (int t = 0; t < 200; ++t) {
      real x[3], y[3];
      double d2 = 0;
      for (int k = 0; k < 3; ++k) {
        x[k] = static_cast<real>(rng.uniform(-10, 10));
        y[k] = static_cast<real>(rng.uniform(-10, 10));
        d2 += static_cast<double>(x[k] - y[k]) * (x[k] - y[k]);
      }
      const double inner =
          static_cast<double>(cga::conformal_inner(cga::lift(x), cga::lift(y)));
      worst = std::max(worst, std::abs(inner + 0.5 * d2));
    }
    return {worst < 1e-10, fmt("max |X.Y + d^2/2| %.3g (tol 1e-10)", worst)};
  });

  run("translator transports lifted points", [&]() -> std::pair<bool, std::string> {
    Rng rng(Rng::derive_seed(opts.seed, 23));
    double worst = 0;
    for (int t = 0; t < 50; ++t) {
      real x[3], d[3], moved[3];
      for (int k = 0; k < 3; ++k) {
        x[k] = static_cast<real>(rng.uniform(-5, 5));
        d[k] = static_cast<real>(rng.uniform(-5, 5));
        moved[k] = x[k] + d[k];
      }
      const Multivector out = cga::sandwich(cga::translator(d), cga::lift(x));
      worst = std::max(worst, max_abs_diff(out, cga::lift(moved)));
    }
    return {worst < 1e-10, fmt("max |T X rev(T) - lift(x+t)| %.3g", worst)};
  });

  run("cayley rotors are unit", [&]() -> std::pair<bool, std::string> {
    Rng rng(Rng::derive_seed(opts.seed, 24));
    double worst = 0;
    for (int t = 0; t < 200; ++t) {
      cga::Bivector b;
      for (auto& v : b.b) v = static_cast<real>(rng.uniform(-0.5, 0.5));
      const double n =
          static_cast<double>(cga::cayley_rotor(b).scalar_norm());
      worst = std::max(worst, std::abs(n - 1.0));
    }
    return {worst < 1e-9, fmt("max |<R rev(R)>_0 - 1| %.3g (tol 1e-9)", worst)};
  });

  run("cayley rejects its singular shell", [&]() -> std::pair<bool, std::string> {
    cga::Bivector b;
    for (std::size_t s = 0; s < cga::bivector_basis().size(); ++s)
      if (cga::bivector_basis()[s].cls == cga::BivectorClass::Dilation)
        b.b[s] = real(2);  // K^2 = +1 direction, eigenvalue of B at -2
    try {
      (void)cga::cayley_rotor(b);
      return {false, "singular bivector was accepted"};
    } catch (const CayleySingularError&) {
      return {true, "dilation coefficient 2 raises CayleySingularError"};
    }
  });

  run("sandwich preserves scalar norm", [&]() -> std::pair<bool, std::string> {
    Rng rng(Rng::derive_seed(opts.seed, 25));
    double worst = 0;
    for (int t = 0; t < 200; ++t) {
      cga::Bivector b;
      for (auto& v : b.b) v = static_cast<real>(rng.uniform(-0.5, 0.5));
      const cga::Rotor r = cga::cayley_rotor(b);
      const Multivector x = random_mv(rng);
      const double before = static_cast<double>(scalar_norm(x));
      const double after = static_cast<double>(scalar_norm(cga::sandwich(r, x)));
      worst = std::max(worst, std::abs(after - before));
    }
    return {worst < 1e-9, fmt("max norm change %.3g (tol 1e-9)", worst)};
  });

  run("multivector inverse", [&]() -> std::pair<bool, std::string> {
    Rng rng(Rng::derive_seed(opts.seed, 26));
    double worst = 0;
    int tested = 0;
    while (tested < 50) {
      const Multivector a = random_mv(rng);
      Multivector left(sig), right(sig);
      try {
        const Multivector inv = cga::mv_inverse(a);
        left = a * inv;
        right = inv * a;
      } catch (const SingularError&) {
        continue;  // resample near-singular draws
      }
      ++tested;
      const Multivector one = Multivector::scalar(sig, real(1));
      worst = std::max({worst, max_abs_diff(left, one), max_abs_diff(right, one)});
    }
    return {worst < 1e-9, fmt("max |a a^-1 - 1| %.3g (tol 1e-9)", worst)};
  });

  // --- matrix isomorphism ---

  run("rho is a homomorphism", [&]() -> std::pair<bool, std::string> {
    Rng rng(Rng::derive_seed(opts.seed, 31));
    double worst = 0;
    for (int t = 0; t < 50; ++t) {
      const Multivector a = random_mv(rng), b = random_mv(rng);
      const matiso::Mat4C lhs = matiso::rho(a * b);
      const matiso::Mat4C rhs = matiso::mat4c_mul(matiso::rho(a), matiso::rho(b));
      for (int k = 0; k < 16; ++k)
        worst = std::max(worst, std::abs(lhs.m[k] - rhs.m[k]));
    }
    return {worst < 1e-10, fmt("max |rho(ab) - rho(a)rho(b)| %.3g", worst)};
  });

  run("rho round trip", [&]() -> std::pair<bool, std::string> {
    Rng rng(Rng::derive_seed(opts.seed, 32));
    double worst = 0;
    for (int t = 0; t < 50; ++t) {
      const Multivector a = random_mv(rng);
      worst = std::max(worst, max_abs_diff(matiso::rho_inverse(matiso::rho(a)), a));
    }
    return {worst < 1e-12, fmt("max round-trip delta %.3g", worst)};
  });

  run("matrix inverse flags singular input", [&]() -> std::pair<bool, std::string> {
    matiso::Mat4C m;  // rank 1
    m.at(0, 0) = matiso::cplx(1, 0);
    try {
      (void)matiso::mat4c_inverse(m);
      return {false, "rank-1 matrix was inverted"};
    } catch (const SingularError&) {
      return {true, "rank-1 matrix raises SingularError"};
    }
  });

  run("instrumented operation counts", [&]() -> std::pair<bool, std::string> {
#if defined(VERSOR_ENABLE_COUNTERS) && VERSOR_ENABLE_COUNTERS
    Rng rng(Rng::derive_seed(opts.seed, 33));
    const Multivector a = random_mv(rng), b = random_mv(rng);
    OpCounters& c = op_counters();
    c.reset();
    (void)geometric_product_bitmask(a, b);
    const auto bitmask = c.bitmask_ops;
    c.reset();
    (void)geometric_product_naive(a, b, session_table);
    const auto naive = c.naive_mads;
    c.reset();
    (void)scalar_product_fast(a, b);
    const auto fast = c.scalar_fast_mads;
    c.reset();
    (void)matiso::mat4c_mul(matiso::rho(a), matiso::rho(b));
    const auto core = c.matiso_core_flops;
    c.reset();
    if (bitmask != 5120 || naive != 1024 || fast != 32 || core != 256)
      return {false, fmt("bitmask %g naive %g", static_cast<double>(bitmask),
                         static_cast<double>(naive)) +
                         fmt(" scalar %g matiso %g", static_cast<double>(fast),
                             static_cast<double>(core))};
    return {true, "bitmask 5120, naive 1024, scalar fast 32, matiso core 256"};
#else
    return {true, "counters compiled out (VERSOR_ENABLE_COUNTERS=0)"};
#endif
  });

  // --- autodiff ---

  run("dense op gradients", [&]() -> std::pair<bool, std::string> {
    Rng rng(Rng::derive_seed(opts.seed, 41));
    std::vector<double> theta(12);
    for (auto& v : theta) v = rng.normal(0.0, 0.5);
    const ad::DiffFn f = [&](std::span<const double> x) {
      ad::Tape tape(sig);
      std::vector<real> va(x.begin(), x.begin() + 6), vb(x.begin() + 6, x.end());
      const ad::NodeId a = tape.leaf(va, 2, 3);
      const ad::NodeId b = tape.leaf(vb, 3, 2);
      const ad::NodeId prod = tape.matmul(a, b);
      const ad::NodeId sum = tape.add(prod, tape.scale(prod, real(0.5)));
      std::vector<real> tgt(4, real(0.25));
      const ad::NodeId root = tape.mse(sum, tape.constant(tgt, 2, 2));
      tape.backward(root);
      ad::EvalResult r;
      r.value = static_cast<double>(tape.scalar_val(root));
      for (real g : tape.grad(a)) r.grad.push_back(static_cast<double>(g));
      for (real g : tape.grad(b)) r.grad.push_back(static_cast<double>(g));
      return r;
    };
    const double err = ad::grad_check(f, theta);
    return {err < 1e-4, fmt("worst relative error %.3g (tol 1e-4)", err)};
  });

  run("geometric product gradient", [&]() -> std::pair<bool, std::string> {
    Rng rng(Rng::derive_seed(opts.seed, 42));
    std::vector<double> theta(64);
    for (auto& v : theta) v = rng.normal(0.0, 0.5);
    const ad::DiffFn f = [&](std::span<const double> x) {
      ad::Tape tape(sig);
      std::vector<real> va(x.begin(), x.begin() + 32), vb(x.begin() + 32, x.end());
      const ad::NodeId a = tape.leaf(va, 1, 32);
      const ad::NodeId b = tape.leaf(vb, 1, 32);
      const ad::NodeId prod = tape.gp(a, tape.rev(b));
      const ad::NodeId root = tape.scalar_norm(tape.grade_proj(prod, 2));
      tape.backward(root);
      ad::EvalResult r;
      r.value = static_cast<double>(tape.scalar_val(root));
      for (real g : tape.grad(a)) r.grad.push_back(static_cast<double>(g));
      for (real g : tape.grad(b)) r.grad.push_back(static_cast<double>(g));
      return r;
    };
    const double err = ad::grad_check(f, theta);
    return {err < 1e-4, fmt("worst relative error %.3g (tol 1e-4)", err)};
  });

  run("normalize and inverse gradients", [&]() -> std::pair<bool, std::string> {
    Rng rng(Rng::derive_seed(opts.seed, 43));
    std::vector<double> theta(32);
    for (std::size_t k = 0; k < theta.size(); ++k)
      theta[k] = (k == 0 ? 2.0 : 0.0) + rng.normal(0.0, 0.1);
    const ad::DiffFn f = [&](std::span<const double> x) {
      ad::Tape tape(sig);
      std::vector<real> vx(x.begin(), x.end());
      const ad::NodeId a = tape.leaf(vx, 1, 32);
      const ad::NodeId n = tape.normalize(a);
      const ad::NodeId root = tape.scalar_norm(tape.sub(n, tape.inverse(a)));
      tape.backward(root);
      ad::EvalResult r;
      r.value = static_cast<double>(tape.scalar_val(root));
      for (real g : tape.grad(a)) r.grad.push_back(static_cast<double>(g));
      return r;
    };
    const double err = ad::grad_check(f, theta);
    return {err < 1e-4, fmt("worst relative error %.3g (tol 1e-4)", err)};
  });

  run("attention op gradients", [&]() -> std::pair<bool, std::string> {
    Rng rng(Rng::derive_seed(opts.seed, 44));
    std::vector<double> theta(2 * 32);
    for (auto& v : theta) v = rng.normal(0.0, 0.3);
    const ad::DiffFn f = [&](std::span<const double> x) {
      ad::Tape tape(sig);
      std::vector<real> vq(x.begin(), x.begin() + 32), vk(x.begin() + 32, x.end());
      const ad::NodeId q = tape.leaf(vq, 1, 32);
      const ad::NodeId k = tape.leaf(vk, 1, 32);
      const ad::NodeId score =
          tape.add(tape.pair_scalar(q, k),
                   tape.scale(tape.pair_bivmag(q, k), real(0.5)));
      const ad::NodeId soft = tape.softmax_rows(score);
      std::vector<real> tgt{real(1)};
      const ad::NodeId root = tape.mse(soft, tape.constant(tgt, 1, 1));
      tape.backward(root);
      ad::EvalResult r;
      r.value = static_cast<double>(tape.scalar_val(root));
      for (real g : tape.grad(q)) r.grad.push_back(static_cast<double>(g));
      for (real g : tape.grad(k)) r.grad.push_back(static_cast<double>(g));
      return r;
    };
    const double err = ad::grad_check(f, theta);
    return {err < 1e-4, fmt("worst relative error %.3g (tol 1e-4)", err)};
  });

  run("adjoint norm along a rotor chain", [&]() -> std::pair<bool, std::string> {
    Rng rng(Rng::derive_seed(opts.seed, 45));
    cga::Bivector b;
    for (std::size_t s = 0; s < cga::bivector_basis().size(); ++s)
      if (cga::bivector_basis()[s].cls == cga::BivectorClass::SpatialRotation)
        b.b[s] = static_cast<real>(rng.uniform(-0.5, 0.5));
    const cga::Rotor rot = cga::cayley_rotor(b);

    ad::Tape tape(sig);
    std::vector<real> vx(32);
    for (auto& v : vx) v = static_cast<real>(rng.normal());
    ad::NodeId x = tape.leaf(vx, 1, 32);
    const ad::NodeId r_node = tape.constant(rot.mv().coeffs(), 1, 32);
    const ad::NodeId r_rev = tape.rev(r_node);
    for (int t = 0; t < 500; ++t) x = tape.gp(tape.gp(r_node, x), r_rev);

    std::vector<real> g(32);
    double gn = 0;
    for (auto& v : g) {
      v = static_cast<real>(rng.normal());
      gn += static_cast<double>(v) * v;
    }
    const ad::NodeId root = tape.matmul(x, tape.constant(g, 32, 1));
    tape.backward(root);
    // The x leaf was the first node pushed, so its id is 0.
    double xn = 0;
    for (real v : tape.grad(0)) xn += static_cast<double>(v) * v;
    const double got = std::sqrt(xn) / std::sqrt(gn);
    return {std::abs(got - 1.0) < 1e-6,
            fmt("adjoint norm ratio %.12g after 500 sandwiches", got)};
  });

  // --- model layer ---

  run("initialization keeps product variance flat", [&]() -> std::pair<bool, std::string> {
    Rng rng(Rng::derive_seed(opts.seed, 51));
    const real sigma_w = static_cast<real>(std::sqrt(1.0 / 32.0));
    double sum = 0, sum2 = 0;
    std::size_t n = 0;
    for (int t = 0; t < 5000; ++t) {
      const Multivector x = random_mv(rng);
      const Multivector w = random_mv(rng, sigma_w);
      const Multivector y = x * w;
      for (std::uint32_t k = 0; k < y.dim(); ++k) {
        sum += static_cast<double>(y[k]);
        sum2 += static_cast<double>(y[k]) * y[k];
        ++n;
      }
    }
    const double var = sum2 / n - (sum / n) * (sum / n);
    return {std::abs(var - 1.0) < 0.15,
            fmt("empirical output variance %.4g (want 1 +/- 0.15)", var)};
  });

  run("attention rows are stochastic", [&]() -> std::pair<bool, std::string> {
    Rng rng(Rng::derive_seed(opts.seed, 52));
    nn::GpaParams params = nn::GpaParams::init(6, rng);
    nn::Matrix tokens(5, 6);
    for (auto& v : tokens.a) v = static_cast<real>(rng.normal());
    const nn::GpaResult res = nn::gpa_forward(tokens, params);
    double worst = 0;
    for (int i = 0; i < res.attention.rows; ++i) {
      double row = 0;
      for (int j = 0; j < res.attention.cols; ++j) {
        if (res.attention.at(i, j) < 0) return {false, "negative attention weight"};
        row += static_cast<double>(res.attention.at(i, j));
      }
      worst = std::max(worst, std::abs(row - 1.0));
    }
    return {worst < 1e-12, fmt("max |row sum - 1| %.3g", worst)};
  });

  run("attention tape matches plain forward", [&]() -> std::pair<bool, std::string> {
    Rng rng(Rng::derive_seed(opts.seed, 53));
    nn::GpaParams params = nn::GpaParams::init(6, rng);
    nn::Matrix tokens(4, 6);
    for (auto& v : tokens.a) v = static_cast<real>(rng.normal());
    const nn::GpaResult plain = nn::gpa_forward(tokens, params);
    ad::Tape tape(sig);
    const nn::GpaGraph g = nn::gpa_build_graph(tape, tokens, params);
    double worst = 0;
    const auto& out = tape.val(g.out);
    for (std::size_t k = 0; k < out.size(); ++k)
      worst = std::max(worst,
                       std::abs(static_cast<double>(out[k] - plain.out.a[k])));
    return {worst < 1e-10, fmt("max taped-vs-plain delta %.3g", worst)};
  });

  run("recurrent scan stays on the manifold", [&]() -> std::pair<bool, std::string> {
    Rng rng(Rng::derive_seed(opts.seed, 54));
    nn::RraParams params = nn::RraParams::init(8, 2, rng);
    nn::Matrix features(1000, 8);
    for (auto& v : features.a) v = static_cast<real>(rng.normal(0.0, 0.25));
    const nn::RraResult res = nn::rra_forward(features, params);
    double worst = 0;
    for (int t = 0; t < res.states.rows; ++t) {
      real n = 0;
      for (int k = 0; k < 32; ++k)
        n += sig.blade_norm_sign(k) * res.states.at(t, k) * res.states.at(t, k);
      worst = std::max(worst, std::abs(static_cast<double>(n) - 1.0));
    }
    return {worst < 1e-9, fmt("max |norm - 1| %.3g over 1000 steps", worst)};
  });

  run("recurrent tape matches plain scan", [&]() -> std::pair<bool, std::string> {
    Rng rng(Rng::derive_seed(opts.seed, 55));
    nn::RraParams params = nn::RraParams::init(5, 3, rng);
    nn::Matrix features(8, 5);
    for (auto& v : features.a) v = static_cast<real>(rng.normal(0.0, 0.5));
    const nn::RraResult plain = nn::rra_forward(features, params);
    ad::Tape tape(sig);
    const nn::RraGraph g = nn::rra_build_graph(tape, features, params);
    double worst = 0;
    const auto& pred = tape.val(g.predictions);
    for (std::size_t k = 0; k < pred.size(); ++k)
      worst = std::max(
          worst, std::abs(static_cast<double>(pred[k] - plain.predictions.a[k])));
    return {worst < 1e-10, fmt("max taped-vs-plain delta %.3g", worst)};
  });

  run("incremental scanner matches batch scan", [&]() -> std::pair<bool, std::string> {
    Rng rng(Rng::derive_seed(opts.seed, 56));
    nn::RraParams params = nn::RraParams::init(6, 2, rng);
    nn::Matrix features(40, 6);
    for (auto& v : features.a) v = static_cast<real>(rng.normal(0.0, 0.3));
    const nn::RraResult batch = nn::rra_forward(features, params);
    nn::RraScanner scan(params);
    double worst = 0;
    for (int t = 0; t < features.rows; ++t) {
      scan.step(features.row(t));
      for (int k = 0; k < 32; ++k)
        worst = std::max(worst, std::abs(static_cast<double>(
                                    scan.state()[k] - batch.states.at(t, k))));
    }
    return {worst < 1e-12, fmt("max state delta %.3g", worst)};
  });

  // --- tasks ---

  run("n-body energy conservation", [&]() -> std::pair<bool, std::string> {
    tasks::NBodyConfig cfg;
    cfg.steps = 60;
    cfg.n_trajectories = 1;
    cfg.seed = Rng::derive_seed(opts.seed, 61);
    const auto ds = tasks::generate_dataset(cfg);
    const double drift =
        static_cast<double>(tasks::energy_drift(ds[0], cfg.g, cfg.epsilon));
    return {drift <= 1.0, fmt("energy drift %.4g%% (gate 1%%)", drift)};
  });

  run("n-body generation is deterministic", [&]() -> std::pair<bool, std::string> {
    tasks::NBodyConfig cfg;
    cfg.steps = 30;
    cfg.n_trajectories = 2;
    cfg.seed = Rng::derive_seed(opts.seed, 62);
    const auto a = tasks::generate_dataset(cfg);
    const auto b = tasks::generate_dataset(cfg);
    for (std::size_t t = 0; t < a.size(); ++t)
      for (std::size_t f = 0; f < a[t].frames.size(); ++f)
        for (std::size_t body = 0; body < a[t].frames[f].size(); ++body)
          for (int k = 0; k < 4; ++k)
            if (a[t].frames[f][body][k] != b[t].frames[f][body][k])
              return {false, "re-generation differs"};
    return {true, "identical configs give bit-identical trajectories"};
  });

  run("snake generator contract", [&]() -> std::pair<bool, std::string> {
    Rng rng(Rng::derive_seed(opts.seed, 63));
    for (int t = 0; t < 100; ++t) {
      const bool broken = (t % 2) == 1;
      const tasks::SnakeSample s = tasks::gen_snake(12, broken, rng);
      // Breaking removes one interior pixel from a >= grid walk.
      if (static_cast<int>(s.path.size()) < 12 - (broken ? 1 : 0))
        return {false, "path shorter than grid"};
      for (std::size_t i = 1; i < s.path.size(); ++i) {
        const int dr = std::abs(s.path[i][0] - s.path[i - 1][0]);
        const int dc = std::abs(s.path[i][1] - s.path[i - 1][1]);
        const int cheb = std::max(dr, dc);
        const bool at_gap = broken && static_cast<int>(i) == s.gap_index;
        if (!at_gap && cheb != 1) return {false, "non-adjacent consecutive pixels"};
        if (at_gap && cheb < 2) return {false, "gap neighbors still adjacent"};
      }
      if (broken == (s.label == tasks::SnakeLabel::kConnected))
        return {false, "label does not match construction"};
    }
    return {true, "100 samples: adjacency, gap separation, labels all consistent"};
  });

  run("algebraic connectivity rule", [&]() -> std::pair<bool, std::string> {
    Rng rng(Rng::derive_seed(opts.seed, 64));
    std::vector<tasks::SnakeLabel> pred, truth;
    for (int t = 0; t < 200; ++t) {
      const tasks::SnakeSample s = tasks::gen_snake(12, (t % 2) == 1, rng);
      pred.push_back(tasks::snake_connectivity_algebraic(s));
      truth.push_back(s.label);
    }
    const double m = tasks::mcc(pred, truth);
    return {m == 1.0, fmt("MCC %.6g on 200 mixed samples (want 1)", m)};
  });

  run("dataset serialization round trip", [&]() -> std::pair<bool, std::string> {
    tasks::NBodyConfig cfg;
    cfg.steps = 20;
    cfg.n_trajectories = 2;
    cfg.seed = Rng::derive_seed(opts.seed, 65);
    const auto ds = tasks::generate_dataset(cfg);
    const auto p1 = scratch_path("jsonl-a");
    const auto p2 = scratch_path("jsonl-b");
    tasks::write_nbody_jsonl(p1.string(), ds, cfg);
    tasks::NBodyConfig cfg_back;
    const auto back = tasks::read_nbody_jsonl(p1.string(), &cfg_back);
    tasks::write_nbody_jsonl(p2.string(), back, cfg_back);
    std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
    const std::string s1((std::istreambuf_iterator<char>(f1)), {});
    const std::string s2((std::istreambuf_iterator<char>(f2)), {});
    std::filesystem::remove(p1);
    std::filesystem::remove(p2);
    return {!s1.empty() && s1 == s2, s1 == s2 ? "rewrite is byte-identical"
                                              : "rewrite differs"};
  });

  run("checkpoint round trip", [&]() -> std::pair<bool, std::string> {
    Rng rng(Rng::derive_seed(opts.seed, 66));
    nn::NBodyModelConfig mc;
    nn::NBodyModel model = nn::make_nbody_model(mc, rng);
    const auto path = scratch_path("ckpt");
    nn::write_checkpoint(path.string(), nn::pack_nbody_model(model), opts.seed,
                         "selftest");
    const nn::NBodyModel back =
        nn::unpack_nbody_model(nn::read_checkpoint(path.string()));
    const bool manifest = std::filesystem::exists(path.string() + ".manifest");
    std::filesystem::remove(path);
    std::filesystem::remove(path.string() + ".manifest");
    if (back.params.lift.a != model.params.lift.a ||
        back.params.w_bivector.a != model.params.w_bivector.a ||
        back.params.readout.a != model.params.readout.a)
      return {false, "weights differ after round trip"};
    if (!manifest) return {false, "manifest sidecar missing"};
    return {true, "weights and standardizers identical; manifest present"};
  });

  return checks;
}

std::string first_failure(std::span<const SelfCheck> checks) {
  for (const auto& c : checks)
    if (!c.pass) return c.name;
  return "";
}

std::string selftest_json(std::span<const SelfCheck> checks,
                          const SelftestOptions& opts) {
  nlohmann::ordered_json j;
  j["version"] = tasks::kArtifactVersion;
  j["seed"] = opts.seed;
  j["config_hash"] = tasks::config_hash_hex(
      "selftest seed=" + std::to_string(opts.seed) +
      " corrupt_cayley=" + (opts.corrupt_cayley ? "1" : "0"));
  j["total"] = checks.size();
  int passed = 0;
  for (const auto& c : checks) passed += c.pass ? 1 : 0;
  j["passed"] = passed;
  j["failed"] = static_cast<int>(checks.size()) - passed;
  const std::string first = first_failure(checks);
  if (first.empty())
    j["first_failure"] = nullptr;
  else
    j["first_failure"] = first;
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : checks)
    j["checks"].push_back(
        {{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  return j.dump(2) + "\n";
}

}  // namespace versor::bench

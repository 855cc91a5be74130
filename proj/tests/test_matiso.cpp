#include <doctest.h>

#include <cmath>

#include "support/helpers.hpp"
#include "versor/algebra/engines.hpp"
#include "versor/algebra/op_count.hpp"
#include "versor/algebra/signature.hpp"
#include "versor/common/errors.hpp"
#include "versor/matiso/matiso.hpp"

using namespace versor;
using namespace versor::matiso;
using testsup::max_abs_diff;
using testsup::random_mv;

namespace {

double mat_diff(const Mat4C& a, const Mat4C& b) {
  double worst = 0.0;
  for (int k = 0; k < 16; ++k)
    worst = std::max(worst, static_cast<double>(std::abs(a.m[k] - b.m[k])));
  return worst;
}

Mat4C random_mat(Rng& rng) {
  Mat4C m;
  for (auto& v : m.m)
    v = cplx(static_cast<real>(rng.uniform(-1, 1)),
             static_cast<real>(rng.uniform(-1, 1)));
  return m;
}

}  // namespace

TEST_CASE("generator images satisfy the Cl(4,1) relations exactly") {
  const auto g = build_generators();
  const Mat4C id = Mat4C::identity();
  const int metric[5] = {1, 1, 1, 1, -1};

  for (int a = 0; a < 5; ++a) {
    // Squares reproduce the metric.
    const Mat4C sq = mat4c_mul(g[a], g[a]);
    CHECK(mat_diff(sq, id * cplx(static_cast<real>(metric[a]))) == 0.0);
    // Distinct generators anticommute.
    for (int b = a + 1; b < 5; ++b) {
      const Mat4C anti = mat4c_mul(g[a], g[b]) + mat4c_mul(g[b], g[a]);
      CHECK(mat_diff(anti, Mat4C{}) == 0.0);
    }
  }

  // Entries stay in {0, +-1, +-i}: the representation is exact in floating
  // point, so all identity checks above can demand equality.
  for (const auto& gen : g)
    for (const auto& v : gen.m) {
      const double re = std::abs(static_cast<double>(v.real()));
      const double im = std::abs(static_cast<double>(v.imag()));
      CHECK((re == 0.0 || re == 1.0));
      CHECK((im == 0.0 || im == 1.0));
      CHECK(re * im == 0.0);
    }
}

TEST_CASE("rho is linear and maps the identity") {
  CHECK(mat_diff(rho(Multivector::scalar(cl41(), real(1))), Mat4C::identity()) == 0.0);

  Rng rng(43);
  const Multivector a = random_mv(rng, cl41());
  const Multivector b = random_mv(rng, cl41());
  const Mat4C lhs = rho(a + b * real(2));
  const Mat4C rhs = rho(a) + rho(b) * cplx(2);
  CHECK(mat_diff(lhs, rhs) <= 1e-14);
}

TEST_CASE("rho is an algebra homomorphism") {
  Rng rng(47);
  for (int rep = 0; rep < 50; ++rep) {
    const Multivector a = random_mv(rng, cl41());
    const Multivector b = random_mv(rng, cl41());
    const Mat4C lhs = rho(a * b);
    const Mat4C rhs = mat4c_mul(rho(a), rho(b));
    CHECK(mat_diff(lhs, rhs) <= 1e-12);
  }
}

TEST_CASE("rho_inverse round-trips in both directions") {
  Rng rng(53);
  for (int rep = 0; rep < 50; ++rep) {
    const Multivector a = random_mv(rng, cl41());
    CHECK(max_abs_diff(rho_inverse(rho(a)), a) <= 1e-12);
  }
  // The blade images span all of Mat(4,C), so arbitrary matrices round-trip
  // the other way too.
  for (int rep = 0; rep < 20; ++rep) {
    const Mat4C m = random_mat(rng);
    CHECK(mat_diff(rho(rho_inverse(m)), m) <= 1e-12);
  }
}

TEST_CASE("product_via_iso agrees with the other engines") {
  Rng rng(59);
  for (int rep = 0; rep < 100; ++rep) {
    const Multivector a = random_mv(rng, cl41());
    const Multivector b = random_mv(rng, cl41());
    CHECK(max_abs_diff(product_via_iso(a, b), a * b) <= 1e-10);
  }
}

TEST_CASE("mat4c_inverse inverts well-conditioned matrices") {
  Rng rng(61);
  for (int rep = 0; rep < 50; ++rep) {
    const Mat4C m = random_mat(rng);
    const Mat4C id = mat4c_mul(m, mat4c_inverse(m));
    CHECK(mat_diff(id, Mat4C::identity()) <= 1e-10);
  }
}

TEST_CASE("mat4c_inverse rejects singular and near-singular input") {
  // Exactly singular: a zero row.
  Mat4C z = Mat4C::identity();
  for (int c = 0; c < 4; ++c) z.at(2, c) = cplx(0);
  CHECK_THROWS_AS(mat4c_inverse(z), SingularError);

  // Numerically singular relative to the Hadamard bound: two nearly
  // proportional rows.
  Mat4C near = Mat4C::identity();
  for (int c = 0; c < 4; ++c) near.at(3, c) = near.at(2, c) * cplx(real(1), real(0));
  near.at(3, 3) += cplx(real(1e-15));
  CHECK_THROWS_AS(mat4c_inverse(near), SingularError);
}

TEST_CASE("rho rejects other signatures") {
  const Signature s3({1, 1, 1});
  Rng rng(67);
  const Multivector a = random_mv(rng, s3);
  CHECK_THROWS_AS(rho(a), ContractError);
}

#if VERSOR_ENABLE_COUNTERS
TEST_CASE("isomorphism core costs 256 real FLOPs per product") {
  Rng rng(71);
  const Multivector a = random_mv(rng, cl41());
  const Multivector b = random_mv(rng, cl41());
  (void)product_via_iso(a, b);  // warm the static basis tables
  op_counters().reset();
  (void)product_via_iso(a, b);
  CHECK(op_counters().matiso_core_flops == 256);
}
#endif

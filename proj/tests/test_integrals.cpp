#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "nisto/integrals.h"
#include "nisto/oracle.h"
#include "nisto/special.h"

using namespace nisto;

namespace {

OracleResult triple_oracle(const StoParams& p1, const StoParams& p1p, const KernelParams& kernel,
                           double tol = 1e-9) {
  OracleConfig oc;
  oc.target_tol = tol;
  oc.radial_order = 24;
  oc.angular_order = 16;
  const double y = p1.zeta + p1p.zeta + kernel.xi;
  const auto f = [&](const Vec3& r) {
    return sto_eval(p1, r) * sto_eval(p1p, r) * kernel_eval(kernel, r);
  };
  std::vector<Vec3> centers;
  std::vector<double> scales;
  const Vec3 pts[] = {p1.center, p1p.center, kernel.center};
  const double scl[] = {1.0 / p1.zeta, 1.0 / p1p.zeta, 3.0 / y};
  for (int i = 0; i < 3; ++i) {
    bool dup = false;
    for (const Vec3& c : centers) dup = dup || c == pts[i];
    if (!dup) {
      centers.push_back(pts[i]);
      scales.push_back(scl[i]);
    }
  }
  return integrate_3d(f, centers, oc, scales);
}

}  // namespace

TEST_CASE("one-center closed form reproduces hydrogenic expectation values") {
  const KernelIndex coulomb{0.0, 0, 0};
  const IntegralValue v1s = one_center_integral({1.0, 0, 0}, 1.0, {1.0, 0, 0}, 1.0, coulomb, 0.0);
  CHECK(v1s.method == IntegralMethod::ClosedForm);
  CHECK(v1s.converged);
  CHECK(v1s.value == doctest::Approx(1.0).epsilon(1e-12));

  const IntegralValue v2p = one_center_integral({2.0, 1, 0}, 0.5, {2.0, 1, 0}, 0.5, coulomb, 0.0);
  CHECK(v2p.value == doctest::Approx(0.25).epsilon(1e-12));

  const KernelIndex unit{1.0, 0, 0};
  const IntegralValue norm1 = one_center_integral({1.0, 0, 0}, 0.8, {1.0, 0, 0}, 0.8, unit, 0.0);
  CHECK(norm1.value == doctest::Approx(1.0).epsilon(1e-12));
  const IntegralValue norm2 = one_center_integral({2.7, 2, 1}, 1.4, {2.7, 2, 1}, 1.4, unit, 0.0);
  CHECK(norm2.value == doctest::Approx(1.0).epsilon(1e-12));

  const IntegralValue zero = one_center_integral({1.0, 0, 0}, 1.0, {2.0, 1, 0}, 1.0, coulomb, 0.0);
  CHECK(zero.value == 0.0);
  CHECK(zero.converged);
}

TEST_CASE("one-center closed form rejects divergent radial exponents") {
  CHECK_THROWS_AS(one_center_integral({0.3, 0, 0}, 1.0, {0.2, 0, 0}, 1.0, {-0.5, 0, 0}, 0.4),
                  DomainError);
  CHECK_THROWS_AS(one_center_integral({0.2, 0, 0}, 1.0, {0.2, 0, 0}, 1.0, {-0.45, 0, 0}, 0.4),
                  DomainError);
  CHECK_THROWS_AS(one_center_integral({1.0, 0, 0}, -1.0, {1.0, 0, 0}, 1.0, {0.0, 0, 0}, 0.0),
                  DomainError);
  CHECK_THROWS_AS(one_center_integral({1.0, 0, 0}, 1.0, {1.0, 0, 0}, 1.0, {0.0, 0, 0}, -0.1),
                  DomainError);
}

TEST_CASE("one-center closed form matches the 3D oracle on noninteger indices") {
  struct Angular {
    int l1, m1, l1p, m1p, nu, sigma;
  };
  const Angular combos[] = {
      {0, 0, 0, 0, 0, 0}, {1, 0, 1, 0, 0, 0},  {1, 0, 1, 0, 2, 0},
      {1, 1, 1, -1, 2, -2}, {2, 0, 1, 0, 1, 0}, {2, 2, 2, 2, 0, 0},
  };
  const double mus[] = {0.0, 0.6, 1.3};
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> un(0.6, 3.2);
  std::uniform_real_distribution<double> uz(0.7, 2.2);
  std::uniform_real_distribution<double> ux(0.2, 1.4);
  int idx = 0;
  for (const Angular& ang : combos) {
    const OrbitalIndex p1{un(rng), ang.l1, ang.m1};
    const OrbitalIndex p1p{un(rng), ang.l1p, ang.m1p};
    const double zeta1 = uz(rng);
    const double zeta1p = uz(rng);
    const KernelIndex q{mus[idx % 3], ang.nu, ang.sigma};
    const double xi = ux(rng);
    ++idx;
    const IntegralValue closed = one_center_integral(p1, zeta1, p1p, zeta1p, q, xi);
    const Vec3 a(0.3, -0.2, 0.5);
    const OracleResult ref =
        triple_oracle({p1, zeta1, a}, {p1p, zeta1p, a}, {q, xi, a}, 1e-11);
    REQUIRE(std::abs(ref.value) > 1e-6);
    CHECK(closed.value == doctest::Approx(ref.value).epsilon(1e-7));
  }
}

TEST_CASE("kernel as orbital carries the index over and guards its domain") {
  const Vec3 g(0.0, 0.0, 1.0);
  const StoParams kq = kernel_as_orbital({0.0, 1, -1}, 0.5, g);
  CHECK(kq.index.n_star == 0.0);
  CHECK(kq.index.l == 1);
  CHECK(kq.index.m == -1);
  CHECK(kq.zeta == 0.5);
  CHECK(kq.center == g);
  CHECK_THROWS_AS(kernel_as_orbital({0.0, 0, 0}, 0.0, g), DomainError);
  CHECK_THROWS_AS(kernel_as_orbital({-0.7, 0, 0}, 1.0, g), DomainError);
}

TEST_CASE("modified overlap is the kernel-normalized overlap") {
  const StoParams p{{1.3, 0, 0}, 1.1, Vec3(0, 0, 0)};
  const Vec3 g(0, 0, 1.5);

  const IntegralValue plain = overlap_nisto(p, kernel_as_orbital({0.0, 0, 0}, 0.5, g));
  const IntegralValue m0 = modified_overlap(p, {0.0, 0, 0}, 0.5, g);
  CHECK(m0.value == doctest::Approx(plain.value).epsilon(1e-12));

  const IntegralValue plain1 = overlap_nisto(p, kernel_as_orbital({1.0, 0, 0}, 0.5, g));
  const IntegralValue m1 = modified_overlap(p, {1.0, 0, 0}, 0.5, g);
  CHECK(m1.value == doctest::Approx(std::sqrt(2.0) * plain1.value).epsilon(1e-12));

  const IntegralValue plain2 = overlap_nisto(p, kernel_as_orbital({0.7, 0, 0}, 1.3, g));
  const IntegralValue m2 = modified_overlap(p, {0.7, 0, 0}, 1.3, g);
  const double pref = std::exp(0.5 * log_gamma(2.4) - 1.2 * std::log(2.6));
  CHECK(m2.value == doctest::Approx(pref * plain2.value).epsilon(1e-12));
}

TEST_CASE("overlap uses the closed form on one center and quadrature across two") {
  const StoParams p{{1.7, 1, 0}, 1.3, Vec3(0.2, 0.1, -0.4)};
  const IntegralValue self = overlap_nisto(p, p);
  CHECK(self.method == IntegralMethod::ClosedForm);
  CHECK(self.value == doctest::Approx(1.0).epsilon(1e-12));

  const StoParams q{{2.4, 1, 1}, 0.9, p.center};
  CHECK(overlap_nisto(p, q).value == 0.0);

  const StoParams a{{1.0, 0, 0}, 1.0, Vec3(0, 0, 0)};
  const StoParams b{{1.0, 0, 0}, 1.0, Vec3(0, 0, 2)};
  const IntegralValue s = overlap_nisto(a, b);
  const double expected = std::exp(-2.0) * (1.0 + 2.0 + 4.0 / 3.0);
  CHECK(s.method == IntegralMethod::Oracle);
  CHECK(s.converged);
  CHECK(s.value == doctest::Approx(expected).epsilon(1e-9));

  const StoParams bare{{0.0, 0, 0}, 0.0, Vec3(0, 0, 2)};
  CHECK_THROWS_AS(overlap_nisto(a, bare), DomainError);
}

TEST_CASE("shared-orbital two-center integral hits the exact far-field potential") {
  const StoParams p1{{1.0, 0, 0}, 1.0, Vec3(0, 0, 0)};
  const KernelParams coulomb{{0.0, 0, 0}, 0.0, Vec3(0, 0, 5)};
  const IntegralValue v = two_center_integral(TwoCenterVariant::OrbitalsShared, p1, p1, coulomb);
  const double R = 5.0;
  const double expected = (1.0 - std::exp(-2.0 * R) * (1.0 + R)) / R;
  CHECK(v.method == IntegralMethod::ClosedForm);
  CHECK(v.converged);
  CHECK(v.value == doctest::Approx(expected).epsilon(1e-9));

  const StoParams p1p{{1.0, 0, 0}, 1.3, Vec3(0, 0, 0)};
  const KernelParams unit{{1.0, 0, 0}, 0.0, Vec3(0.7, -0.4, 2.1)};
  const IntegralValue n = two_center_integral(TwoCenterVariant::OrbitalsShared, p1, p1p, unit);
  const double s = sto_inner_same_center(p1.index, p1.zeta, p1p.index, p1p.zeta);
  CHECK(n.value == doctest::Approx(s).epsilon(1e-9));

  CHECK_THROWS_AS(two_center_integral(TwoCenterVariant::OrbitalsShared, p1,
                                      StoParams{{1.0, 0, 0}, 1.0, Vec3(0, 0, 1)}, coulomb),
                  DomainError);
}

TEST_CASE("shared-kernel two-center series converges to the oracle") {
  const StoParams pa{{1.0, 0, 0}, 1.0, Vec3(0, 0, 0)};
  const StoParams pc{{1.0, 0, 0}, 1.0, Vec3(0, 0, 2)};
  const KernelParams coulomb{{0.0, 0, 0}, 0.0, Vec3(0, 0, 2)};

  IntegralConfig cfg;
  cfg.truncation_N = 16;
  const IntegralValue v = two_center_integral(TwoCenterVariant::KernelShared, pa, pc, coulomb, cfg);
  CHECK(v.method == IntegralMethod::SeriesN);
  CHECK(v.truncation_N == 16);
  REQUIRE(static_cast<int>(v.convergence.size()) == 16);

  const OracleResult ref = triple_oracle(pa, pc, coulomb, 1e-9);
  const double err16 = std::abs(v.convergence[15] - ref.value);
  const double err8 = std::abs(v.convergence[7] - ref.value);
  CHECK(err16 <= 5e-4);
  CHECK(err16 <= err8 + 1e-12);
}

TEST_CASE("shared-kernel series on a degenerate geometry reduces to the closed form") {
  const Vec3 g(0.1, 0.2, 0.3);
  const StoParams p1{{2.2, 0, 0}, 1.1, g};
  const StoParams p1p{{1.4, 0, 0}, 0.9, g};
  const KernelParams k{{0.5, 0, 0}, 0.7, g};
  const IntegralValue series = two_center_integral(TwoCenterVariant::KernelShared, p1, p1p, k);
  const IntegralValue closed =
      one_center_integral(p1.index, p1.zeta, p1p.index, p1p.zeta, k.index, k.xi);
  CHECK(series.method == IntegralMethod::SeriesN);
  CHECK(series.converged);
  CHECK(series.value == doctest::Approx(closed.value).epsilon(5e-6));

  const StoParams q1{{2.0, 0, 0}, 1.1, g};
  const StoParams q1p{{1.0, 0, 0}, 0.9, g};
  const IntegralValue embed = two_center_integral(TwoCenterVariant::KernelShared, q1, q1p, k);
  const IntegralValue embed_closed =
      one_center_integral(q1.index, q1.zeta, q1p.index, q1p.zeta, k.index, k.xi);
  CHECK(embed.value == doctest::Approx(embed_closed.value).epsilon(1e-8));

  CHECK_THROWS_AS(two_center_integral(TwoCenterVariant::KernelShared, p1, p1p,
                                      KernelParams{{0.0, 0, 0}, 0.0, Vec3(9, 9, 9)}),
                  DomainError);
}

TEST_CASE("three-center expansions about bra and kernel agree with the oracle") {
  const StoParams pa{{1.0, 0, 0}, 1.0, Vec3(0, 0, 0)};
  const StoParams pc{{1.0, 0, 0}, 1.0, Vec3(0, 0, 2)};
  const KernelParams coulomb{{0.0, 0, 0}, 0.0, Vec3(0, 0, 3)};

  IntegralConfig cfg;
  cfg.truncation_N = 16;
  const IntegralValue bra =
      three_center_integral(pa, pc, coulomb, ThreeCenterPath::AboutBra, cfg);
  const IntegralValue ker =
      three_center_integral(pa, pc, coulomb, ThreeCenterPath::AboutKernel, cfg);
  CHECK(bra.method == IntegralMethod::SeriesN);
  CHECK(ker.method == IntegralMethod::SeriesN);

  const OracleResult ref = triple_oracle(pa, pc, coulomb, 1e-9);
  CHECK(std::abs(bra.value - ref.value) <= 2e-4);
  CHECK(std::abs(ker.value - ref.value) <= 2e-4);
  CHECK(std::abs(bra.value - ker.value) <= 2e-4);

  const double bra8 = std::abs(bra.convergence[7] - ref.value);
  const double ker8 = std::abs(ker.convergence[7] - ref.value);
  CHECK(std::abs(bra.value - ref.value) <= bra8 + 1e-10);
  CHECK(std::abs(ker.value - ref.value) <= ker8 + 1e-10);
}

TEST_CASE("three-center degenerate geometries route to the specialized forms") {
  const StoParams pa{{1.2, 0, 0}, 1.0, Vec3(0, 0, 0)};
  const StoParams same_a{{1.5, 1, 0}, 0.8, pa.center};
  const KernelParams k{{0.0, 0, 0}, 0.3, Vec3(0, 0, 2)};

  const IntegralValue routed =
      three_center_integral(pa, same_a, k, ThreeCenterPath::AboutKernel);
  const IntegralValue direct =
      two_center_integral(TwoCenterVariant::OrbitalsShared, pa, same_a, k);
  CHECK(routed.value == direct.value);

  const StoParams at_g{{1.5, 1, 0}, 0.8, k.center};
  const IntegralValue routed_kg = three_center_integral(pa, at_g, k, ThreeCenterPath::AboutBra);
  const IntegralValue direct_kg =
      two_center_integral(TwoCenterVariant::KernelShared, pa, at_g, k);
  CHECK(routed_kg.value == direct_kg.value);

  const IntegralValue routed_ag = three_center_integral(at_g, pa, k, ThreeCenterPath::AboutBra);
  CHECK(routed_ag.value == direct_kg.value);

  const KernelParams k0{{0.0, 0, 0}, 0.0, pa.center};
  const IntegralValue routed_one = three_center_integral(pa, same_a, k0, ThreeCenterPath::AboutBra);
  CHECK(routed_one.method == IntegralMethod::ClosedForm);
  CHECK(routed_one.value ==
        one_center_integral(pa.index, pa.zeta, same_a.index, same_a.zeta, k0.index, k0.xi).value);
}

TEST_CASE("Yukawa screening goes continuously to the Coulomb limit") {
  const OrbitalIndex o1{1.4, 0, 0};
  const IntegralValue c0 = one_center_integral(o1, 1.0, o1, 1.2, {0.0, 0, 0}, 0.0);
  const IntegralValue c1 = one_center_integral(o1, 1.0, o1, 1.2, {0.0, 0, 0}, 1e-6);
  CHECK(c1.value == doctest::Approx(c0.value).epsilon(1e-4));

  const StoParams p1{{1.0, 0, 0}, 1.0, Vec3(0, 0, 0)};
  const StoParams p2{{2.1, 1, 0}, 0.9, Vec3(0, 0, 0)};
  const Vec3 g(0, 0, 2.5);
  const IntegralValue t0 = two_center_integral(TwoCenterVariant::OrbitalsShared, p1, p2,
                                               {{0.0, 0, 0}, 0.0, g});
  const IntegralValue t1 = two_center_integral(TwoCenterVariant::OrbitalsShared, p1, p2,
                                               {{0.0, 0, 0}, 1e-6, g});
  CHECK(t1.value == doctest::Approx(t0.value).epsilon(1e-4));

  const StoParams pc{{1.0, 0, 0}, 1.1, Vec3(0, 0, 1.5)};
  IntegralConfig cfg;
  cfg.truncation_N = 10;
  const IntegralValue y0 = three_center_integral(p1, pc, {{0.0, 0, 0}, 0.0, Vec3(0, 0, 3)},
                                                 ThreeCenterPath::AboutBra, cfg);
  const IntegralValue y1 = three_center_integral(p1, pc, {{0.0, 0, 0}, 1e-6, Vec3(0, 0, 3)},
                                                 ThreeCenterPath::AboutBra, cfg);
  CHECK(y1.value == doctest::Approx(y0.value).epsilon(1e-4));
}

TEST_CASE("m-summed squared integrals are rotation invariant") {
  const Vec3 a(0, 0, 0);
  const Vec3 g0(1.1, -0.6, 1.7);
  const Mat3 rot = Eigen::AngleAxisd(0.7, Vec3(1, 2, 3).normalized()).toRotationMatrix();

  double sum0 = 0.0;
  double sum1 = 0.0;
  for (int m = -1; m <= 1; ++m) {
    const StoParams bra{{2.3, 1, m}, 1.0, a};
    const StoParams ket{{1.0, 0, 0}, 1.2, a};
    const KernelParams k0{{0.0, 0, 0}, 0.0, g0};
    const KernelParams k1{{0.0, 0, 0}, 0.0, rot * g0};
    sum0 += std::pow(two_center_integral(TwoCenterVariant::OrbitalsShared, bra, ket, k0).value, 2);
    sum1 += std::pow(two_center_integral(TwoCenterVariant::OrbitalsShared, bra, ket, k1).value, 2);
  }
  CHECK(sum1 == doctest::Approx(sum0).epsilon(1e-9));
}

TEST_CASE("repeated evaluations are bitwise identical") {
  const StoParams pa{{1.0, 0, 0}, 1.0, Vec3(0, 0, 0)};
  const StoParams pc{{1.3, 1, 0}, 0.8, Vec3(0, 0, 1.7)};
  const KernelParams k{{0.0, 0, 0}, 0.2, Vec3(0.4, 0.9, 2.6)};
  IntegralConfig cfg;
  cfg.truncation_N = 8;
  const IntegralValue v1 = three_center_integral(pa, pc, k, ThreeCenterPath::AboutBra, cfg);
  const IntegralValue v2 = three_center_integral(pa, pc, k, ThreeCenterPath::AboutBra, cfg);
  CHECK(v1.value == v2.value);
  REQUIRE(v1.convergence.size() == v2.convergence.size());
  for (std::size_t i = 0; i < v1.convergence.size(); ++i) {
    CHECK(v1.convergence[i] == v2.convergence[i]);
  }
}

TEST_CASE("integral config bounds are enforced") {
  const StoParams pa{{1.0, 0, 0}, 1.0, Vec3(0, 0, 0)};
  const KernelParams k{{0.0, 0, 0}, 0.0, Vec3(0, 0, 2)};
  IntegralConfig bad;
  bad.truncation_N = 0;
  CHECK_THROWS_AS(two_center_integral(TwoCenterVariant::OrbitalsShared, pa, pa, k, bad),
                  DomainError);
  bad.truncation_N = 31;
  CHECK_THROWS_AS(two_center_integral(TwoCenterVariant::OrbitalsShared, pa, pa, k, bad),
                  DomainError);

  const GeometryTriple t = make_geometry(Vec3(0, 0, 0), Vec3(0, 0, 2), Vec3(0, 3, 2));
  CHECK(t.R_ca == doctest::Approx(2.0));
  CHECK(t.R_cg == doctest::Approx(3.0));
  CHECK(t.R_ag == doctest::Approx(std::sqrt(13.0)));
}

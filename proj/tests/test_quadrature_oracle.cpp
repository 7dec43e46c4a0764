#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <cstring>

#include "nisto/basis.h"
#include "nisto/oracle.h"
#include "nisto/quadrature.h"

using namespace nisto;

namespace {

// Closed-form 1s-1s overlap for equal zeta: e^{-zeta R}(1 + zeta R + (zeta R)^2/3).
double overlap_1s_1s(double zeta, double R) {
  const double x = zeta * R;
  return std::exp(-x) * (1.0 + x + x * x / 3.0);
}

StoParams sto_1s(double zeta, const Vec3& center) {
  StoParams p;
  p.index = {1.0, 0, 0};
  p.zeta = zeta;
  p.center = center;
  return p;
}

}  // namespace

TEST_CASE("graded_panels converges geometrically on an endpoint singularity") {
  auto err = [](int depth) {
    Vec x, w;
    graded_panels(0.0, 1.0, depth, 16, x, w);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) sum += w[i] / std::sqrt(x[i]);
    return std::abs(sum - 2.0);
  };
  CHECK(err(16) < 0.1 * err(8));
  CHECK(err(40) < 1e-2 * err(24));
  CHECK(err(60) < 1e-9);
}

TEST_CASE("radial_rule integrates gamma-type integrands") {
  Vec r, w;
  for (double r_m : {0.5, 1.0, 3.0}) {
    radial_rule(20, r_m, r, w);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < r.size(); ++i) {
      sum += w[i] * std::pow(r[i], 2.6) * std::exp(-1.7 * r[i]);
    }
    const double expect = std::tgamma(3.6) / std::pow(1.7, 3.6);
    CHECK(sum == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("sphere_grid weights sum to the sphere area") {
  const auto g = sphere_grid(12, 24);
  CHECK(g.weights.sum() == doctest::Approx(four_pi).epsilon(1e-13));
  for (Eigen::Index i = 0; i < g.dirs.rows(); ++i) {
    CHECK(g.dirs.row(i).norm() == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("partition_weights sum to one and localize near their center") {
  const std::vector<Vec3> centers = {Vec3(0, 0, 0), Vec3(0, 0, 2), Vec3(1.5, 0, 1)};
  for (const Vec3& p : {Vec3(0.3, 0.1, -0.2), Vec3(0.5, 0.5, 1.7), Vec3(4.0, -1.0, 0.0)}) {
    const Vec w = partition_weights(centers, p, 3);
    CHECK(w.sum() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(w.minCoeff() >= 0.0);
  }
  const Vec near_a = partition_weights(centers, Vec3(0.0, 0.0, 0.05), 3);
  CHECK(near_a[0] > 0.999);
}

TEST_CASE("block_sum is accurate and independent of the worker count") {
  auto f = [](std::int64_t i) { return 1.0 / double(i + 1) / double(i + 1); };
  double serial = 0.0;
  for (std::int64_t i = 0; i < 50000; ++i) serial += f(i);
  const double blocked = block_sum(50000, f);
  CHECK(blocked == doctest::Approx(serial).epsilon(1e-13));
  setenv("NISTO_THREADS", "4", 1);
  const double threaded = block_sum(50000, f);
  unsetenv("NISTO_THREADS");
  CHECK(std::memcmp(&threaded, &blocked, sizeof(double)) == 0);
}

TEST_CASE("integrate_3d normalizes a 1s density") {
  const auto p = sto_1s(1.0, Vec3::Zero());
  OracleConfig cfg;
  cfg.radial_order = 12;
  cfg.angular_order = 6;
  cfg.target_tol = 1e-12;
  const auto res = integrate_3d(
      [&](const Vec3& x) {
        const double v = sto_eval(p, x);
        return v * v;
      },
      {p.center}, cfg, {1.0});
  CHECK(res.converged);
  CHECK(res.value == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(res.error_estimate <= 1e-12);
  CHECK(res.evaluations > 0);
}

TEST_CASE("integrate_3d reproduces the same-center closed-form overlap") {
  const auto a = sto_1s(1.0, Vec3::Zero());
  StoParams b = a;
  b.index.n_star = 2.0;
  OracleConfig cfg;
  cfg.radial_order = 12;
  cfg.angular_order = 6;
  const auto res = integrate_3d(
      [&](const Vec3& x) { return sto_eval(a, x) * sto_eval(b, x); }, {a.center}, cfg, {1.0});
  CHECK(res.value == doctest::Approx(0.8660254).epsilon(1e-7));
}

TEST_CASE("integrate_3d two-center overlap matches the closed form") {
  const auto a = sto_1s(1.0, Vec3::Zero());
  const auto b = sto_1s(1.0, Vec3(0.0, 0.0, 2.0));
  OracleConfig cfg;
  cfg.radial_order = 14;
  cfg.angular_order = 10;
  const auto res = integrate_3d(
      [&](const Vec3& x) { return sto_eval(a, x) * sto_eval(b, x); }, {a.center, b.center}, cfg,
      {1.0, 1.0});
  CHECK(res.value == doctest::Approx(overlap_1s_1s(1.0, 2.0)).epsilon(1e-9));
}

TEST_CASE("integrate_3d self-consistency regression suite") {
  // Twenty-plus integrals spanning noninteger n*, l > 0, unequal zeta, and
  // one to three centers; each must converge with a small level difference.
  OracleConfig cfg;
  cfg.radial_order = 12;
  cfg.angular_order = 8;
  cfg.target_tol = 1e-8;
  int cases = 0;
  for (double n_star : {0.8, 1.0, 1.6, 2.4}) {
    for (double zeta : {0.6, 1.2}) {
      StoParams p;
      p.index = {n_star, n_star >= 1.6 ? 1 : 0, 0};
      p.zeta = zeta;
      const auto res = integrate_3d(
          [&](const Vec3& x) {
            const double v = sto_eval(p, x);
            return v * v;
          },
          {p.center}, cfg, {1.0 / zeta});
      CHECK(res.converged);
      CHECK(res.value == doctest::Approx(1.0).epsilon(1e-7));
      ++cases;
    }
  }
  for (double R : {1.0, 2.0, 3.5, 6.0}) {
    const auto a = sto_1s(1.0, Vec3::Zero());
    const auto b = sto_1s(1.0, Vec3(0.0, 0.0, R));
    const auto res = integrate_3d(
        [&](const Vec3& x) { return sto_eval(a, x) * sto_eval(b, x); }, {a.center, b.center}, cfg,
        {1.0, 1.0});
    CHECK(res.converged);
    CHECK(res.value == doctest::Approx(overlap_1s_1s(1.0, R)).epsilon(1e-6));
    ++cases;
  }
  OracleConfig cfg_kernel = cfg;
  cfg_kernel.target_tol = 1e-7;
  cfg_kernel.max_refinements = 4;
  for (double R : {1.5, 2.5}) {
    const auto a = sto_1s(0.9, Vec3::Zero());
    const auto b = sto_1s(1.3, Vec3(0.0, 0.0, R));
    const Vec3 third(1.0, 0.0, 0.5 * R);
    KernelParams coulomb;
    coulomb.index = {0.0, 0, 0};
    coulomb.center = third;
    const auto res = integrate_3d(
        [&](const Vec3& x) { return sto_eval(a, x) * sto_eval(b, x) * kernel_eval(coulomb, x); },
        {a.center, b.center, third}, cfg_kernel, {1.0 / 0.9, 1.0 / 1.3, 1.0});
    CHECK(res.converged);
    CHECK(std::isfinite(res.value));
    ++cases;
  }
  for (double R : {1.0, 2.0}) {
    for (double xi : {0.3, 1.0}) {
      const auto a = sto_1s(1.0, Vec3::Zero());
      const auto b = sto_1s(1.0, Vec3(0.0, 0.0, R));
      KernelParams yukawa;
      yukawa.index = {0.0, 0, 0};
      yukawa.xi = xi;
      const auto res = integrate_3d(
          [&](const Vec3& x) { return sto_eval(a, x) * sto_eval(b, x) * kernel_eval(yukawa, x); },
          {a.center, b.center}, cfg_kernel, {1.0, 1.0});
      CHECK(res.converged);
      CHECK(std::isfinite(res.value));
      ++cases;
    }
  }
  for (double zeta : {0.7, 1.0}) {
    StoParams p;
    p.index = {1.3, 2, 1};
    p.zeta = zeta;
    const auto res = integrate_3d(
        [&](const Vec3& x) {
          const double v = sto_eval(p, x);
          return v * v;
        },
        {p.center}, cfg, {1.0 / zeta});
    CHECK(res.converged);
    CHECK(res.value == doctest::Approx(1.0).epsilon(1e-7));
    ++cases;
  }
  CHECK(cases == 20);
}

TEST_CASE("spheroidal overlap anchor cases") {
  OracleConfig cfg;
  cfg.radial_order = 16;
  cfg.target_tol = 1e-12;
  const auto a = sto_1s(1.0, Vec3::Zero());
  SUBCASE("R = 2 equals the closed form to 1e-10") {
    const auto b = sto_1s(1.0, Vec3(0.0, 0.0, 2.0));
    const auto res = overlap_two_center_spheroidal(a, b, cfg);
    CHECK(res.converged);
    CHECK(res.value == doctest::Approx(overlap_1s_1s(1.0, 2.0)).epsilon(1e-10));
  }
  SUBCASE("identical orbitals approach unity as R -> 0") {
    const auto b = sto_1s(1.0, Vec3(0.0, 0.0, 1e-4));
    const auto res = overlap_two_center_spheroidal(a, b, cfg);
    CHECK(res.value == doctest::Approx(1.0).epsilon(1e-7));
  }
  SUBCASE("R = 20 overlap decays below 1e-6") {
    const auto b = sto_1s(1.0, Vec3(0.0, 0.0, 20.0));
    const auto res = overlap_two_center_spheroidal(a, b, cfg);
    CHECK(std::abs(res.value) < 1e-6);
  }
  SUBCASE("coincident centers are rejected") {
    CHECK_THROWS_AS(overlap_two_center_spheroidal(a, a, cfg), DomainError);
  }
}

TEST_CASE("spheroidal and 3D paths agree off-axis with noninteger n*") {
  StoParams a;
  a.index = {1.4, 1, 1};
  a.zeta = 1.1;
  a.center = Vec3(0.2, -0.3, 0.1);
  StoParams b;
  b.index = {2.6, 2, -1};
  b.zeta = 0.8;
  b.center = Vec3(-0.9, 1.0, 1.6);
  OracleConfig cfg;
  cfg.radial_order = 16;
  cfg.target_tol = 1e-11;
  const auto sph = overlap_two_center_spheroidal(a, b, cfg);
  OracleConfig cfg3;
  cfg3.radial_order = 14;
  cfg3.angular_order = 12;
  const auto o3 = integrate_3d(
      [&](const Vec3& x) { return sto_eval(a, x) * sto_eval(b, x); }, {a.center, b.center}, cfg3,
      {1.0 / a.zeta, 1.0 / b.zeta});
  CHECK(sph.converged);
  CHECK(std::abs(sph.value - o3.value) <=
        std::max(1e-9, sph.error_estimate + o3.error_estimate));
}

TEST_CASE("6D Monte Carlo reproduces the same-center 1s-1s repulsion") {
  const auto a = sto_1s(1.0, Vec3::Zero());
  OracleConfig cfg;
  cfg.mc_samples = 400000;
  cfg.seed = 42;
  KernelParams coulomb;
  coulomb.index = {0.0, 0, 0};
  const auto res = integrate_6d_mc(
      [&](const Vec3& x1, const Vec3& x2) {
        KernelParams k = coulomb;
        k.center = x1;
        return kernel_eval(k, x2);
      },
      a, a, cfg);
  CHECK(std::abs(res.value - 0.625) <= 3.0 * res.error_estimate);
  CHECK(res.error_estimate < 5e-3);
}

TEST_CASE("6D Monte Carlo constant kernel factorizes to unity") {
  const auto a = sto_1s(1.2, Vec3::Zero());
  const auto b = sto_1s(0.8, Vec3(0.0, 0.0, 1.0));
  OracleConfig cfg;
  cfg.mc_samples = 64000;
  const auto res = integrate_6d_mc(
      [](const Vec3&, const Vec3&) { return 1.0; }, a, b, cfg);
  CHECK(res.value == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(res.error_estimate == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("6D Monte Carlo point-charge limit at R = 10") {
  const auto a = sto_1s(1.0, Vec3::Zero());
  const auto b = sto_1s(1.0, Vec3(0.0, 0.0, 10.0));
  OracleConfig cfg;
  cfg.mc_samples = 200000;
  cfg.seed = 3;
  const auto res = integrate_6d_mc(
      [](const Vec3& x1, const Vec3& x2) { return 1.0 / (x2 - x1).norm(); }, a, b, cfg);
  CHECK(res.value == doctest::Approx(0.1).epsilon(1e-2));
  CHECK(std::abs(res.value - 0.1) < 1e-3);
}

TEST_CASE("6D Monte Carlo is bit-reproducible for a fixed seed") {
  const auto a = sto_1s(1.0, Vec3::Zero());
  StoParams b;
  b.index = {1.8, 1, 0};
  b.zeta = 1.5;
  b.center = Vec3(0.0, 0.0, 1.2);
  OracleConfig cfg;
  cfg.mc_samples = 64000;
  cfg.seed = 99;
  auto run = [&]() {
    return integrate_6d_mc(
        [](const Vec3& x1, const Vec3& x2) { return 1.0 / (x2 - x1).norm(); }, a, b, cfg);
  };
  const auto r1 = run();
  const auto r2 = run();
  CHECK(std::memcmp(&r1.value, &r2.value, sizeof(double)) == 0);
  CHECK(std::memcmp(&r1.error_estimate, &r2.error_estimate, sizeof(double)) == 0);
  OracleConfig cfg2 = cfg;
  cfg2.seed = 100;
  const auto r3 = integrate_6d_mc(
      [](const Vec3& x1, const Vec3& x2) { return 1.0 / (x2 - x1).norm(); }, a, b, cfg2);
  CHECK(r3.value != r1.value);
}

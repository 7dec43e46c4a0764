#include "nisto/oracle.h"

#include <cmath>
#include <random>

#include "nisto/special.h"

namespace nisto {

namespace {

double grid_integral(const std::function<double(const Vec3&)>& f, const Grid3& grid) {
  return block_sum(std::int64_t(grid.points.size()), [&](std::int64_t i) {
    return grid.weights[i] * f(grid.points[i]);
  });
}

}  // namespace

OracleResult integrate_3d(const std::function<double(const Vec3&)>& f,
                          const std::vector<Vec3>& centers, const OracleConfig& cfg,
                          const std::vector<double>& scales) {
  OracleResult res;
  double prev = 0.0;
  bool have_prev = false;
  for (int level = 0; level <= cfg.max_refinements; ++level) {
    const int radial = cfg.radial_order + 6 * level;
    const int ntheta = cfg.angular_order + 4 * level;
    const Grid3 grid = molecular_grid(centers, scales, radial, ntheta, cfg.partition_sharpness);
    const double value = grid_integral(f, grid);
    res.evaluations += std::int64_t(grid.points.size());
    if (have_prev) {
      res.value = value;
      res.error_estimate = std::abs(value - prev);
      if (res.error_estimate <= cfg.target_tol) {
        res.converged = true;
        return res;
      }
    } else {
      res.value = value;
    }
    prev = value;
    have_prev = true;
  }
  res.converged = false;
  res.message = "integrate_3d: refinement levels still differ by more than target_tol";
  return res;
}

OracleResult overlap_two_center_spheroidal(const StoParams& p, const StoParams& q,
                                           const OracleConfig& cfg) {
  const double R = (q.center - p.center).norm();
  if (R == 0.0) {
    throw DomainError(
        "overlap_two_center_spheroidal: centers coincide; use sto_inner_same_center");
  }
  const int nphi = 2 * (p.index.l + q.index.l) + 2;

  OracleResult res;
  double prev = 0.0;
  bool have_prev = false;
  for (int level = 0; level <= cfg.max_refinements; ++level) {
    const int order = cfg.radial_order + 6 * level;
    const SpheroidalGrid grid = spheroidal_grid(p.center, q.center, p.zeta + q.zeta, order, nphi);
    const double sum = block_sum(std::int64_t(grid.points.size()), [&](std::int64_t i) {
      return grid.weights[i] * sto_eval(p, grid.points[i]) * sto_eval(q, grid.points[i]);
    });
    res.evaluations += std::int64_t(grid.points.size());
    if (have_prev) {
      res.value = sum;
      res.error_estimate = std::abs(sum - prev);
      if (res.error_estimate <= cfg.target_tol) {
        res.converged = true;
        return res;
      }
    } else {
      res.value = sum;
    }
    prev = sum;
    have_prev = true;
  }
  res.converged = false;
  res.message = "overlap_two_center_spheroidal: levels still differ by more than target_tol";
  return res;
}

namespace {

// Uniform double in [0, 1) from the top 53 bits of the generator output, so
// results do not depend on library distribution internals.
double uniform01(std::mt19937_64& rng) {
  return double(rng() >> 11) * 0x1.0p-53;
}

double normal01(std::mt19937_64& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * pi * u2);
}

// Marsaglia-Tsang gamma sampler, shape >= 1.
double gamma_draw(std::mt19937_64& rng, double shape) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double x = normal01(rng);
    const double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    const double v = t * t * t;
    const double uu = uniform01(rng);
    if (uu < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(uu) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

// Draws a point from the normalized density |chi|^2: gamma-distributed
// radius, direction rejection-sampled against |S_lm|^2.
Vec3 density_draw(std::mt19937_64& rng, const StoParams& p) {
  const double r = gamma_draw(rng, 2.0 * p.index.n_star + 1.0) / (2.0 * p.zeta);
  const int l = p.index.l;
  const int m = p.index.m;
  double ct = 0.0, phi = 0.0;
  if (l == 0) {
    ct = 2.0 * uniform01(rng) - 1.0;
    phi = 2.0 * pi * uniform01(rng);
  } else {
    const double bound = 2.0 * (2.0 * l + 1.0);
    for (;;) {
      ct = 2.0 * uniform01(rng) - 1.0;
      phi = 2.0 * pi * uniform01(rng);
      const double s = sph_real(l, m, ct, phi);
      if (bound * uniform01(rng) < four_pi * s * s) break;
    }
  }
  const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
  return p.center + r * Vec3(st * std::cos(phi), st * std::sin(phi), ct);
}

}  // namespace

OracleResult integrate_6d_mc(const std::function<double(const Vec3&, const Vec3&)>& kernel_factor,
                             const StoParams& a, const StoParams& b, const OracleConfig& cfg) {
  validate_orbital(a.index);
  validate_orbital(b.index);
  if (cfg.mc_samples < 64) throw DomainError("integrate_6d_mc: need at least 64 samples");
  std::mt19937_64 rng(cfg.seed);
  constexpr int nbatch = 64;
  const std::int64_t per_batch = cfg.mc_samples / nbatch;
  Vec batch_mean(nbatch);
  double half_se = 0.0;
  OracleResult res;
  for (int batch = 0; batch < nbatch; ++batch) {
    double sum = 0.0;
    for (std::int64_t i = 0; i < per_batch; ++i) {
      const Vec3 x1 = density_draw(rng, a);
      const Vec3 x2 = density_draw(rng, b);
      sum += kernel_factor(x1, x2);
    }
    batch_mean[batch] = sum / double(per_batch);
    if (batch == nbatch / 2 - 1) {
      const auto head = batch_mean.head(nbatch / 2);
      const double m = head.mean();
      half_se = std::sqrt((head.array() - m).square().sum() / (nbatch / 2 - 1) / (nbatch / 2));
    }
  }
  res.evaluations = per_batch * nbatch;
  res.value = batch_mean.mean();
  const double var = (batch_mean.array() - res.value).square().sum() / (nbatch - 1);
  res.error_estimate = std::sqrt(var / nbatch);
  if (res.error_estimate > half_se) {
    res.message = "integrate_6d_mc: standard error did not shrink between half and full runs";
  }
  return res;
}

}  // namespace nisto

#include "nisto/integrals.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>

#include "nisto/gaunt.h"
#include "nisto/oracle.h"
#include "nisto/quadrature.h"
#include "nisto/special.h"

namespace nisto {
namespace {

// Centers compare exactly; degenerate-geometry routing and the expansion
// cache quantization then agree on what "same center" means.
bool same_point(const Vec3& u, const Vec3& v) {
  return u.x() == v.x() && u.y() == v.y() && u.z() == v.z();
}

void check_config(const IntegralConfig& cfg) {
  if (cfg.truncation_N < 1 || cfg.truncation_N > 30) {
    throw DomainError("integral config: truncation_N must be in [1, 30]");
  }
  if (!(cfg.series_rel_tol > 0.0)) {
    throw DomainError("integral config: series_rel_tol must be positive");
  }
  if (cfg.spheroidal_order < 4) {
    throw DomainError("integral config: spheroidal_order must be at least 4");
  }
  if (!(cfg.quad_rel_tol > 0.0)) {
    throw DomainError("integral config: quad_rel_tol must be positive");
  }
}

// Declares a truncated series converged when the last step is small against
// the largest partial; the absolute floor keeps exact zeros convergent.
void finish_series(IntegralValue& out, double rel_tol) {
  const auto n = out.convergence.size();
  out.value = n ? out.convergence.back() : 0.0;
  if (n < 2) return;
  double scale = 0.0;
  for (double p : out.convergence) scale = std::max(scale, std::abs(p));
  const double step = std::abs(out.convergence[n - 1] - out.convergence[n - 2]);
  if (step > rel_tol * scale + 1e-15) {
    out.converged = false;
    out.message = "series step " + std::to_string(step) + " above tolerance at N = " +
                  std::to_string(out.truncation_N) + "; raise truncation_N";
  }
}

// Partial sums of <proj D | h> over the whole pyramid, ordered by principal
// index so the history matches the residual curve of the table.
IntegralValue contract_full(const ExpansionTable& table, const Vec& kernel_overlaps,
                            const IntegralConfig& cfg) {
  IntegralValue out;
  out.method = IntegralMethod::SeriesN;
  out.truncation_N = table.truncation_N;
  out.convergence.reserve(table.truncation_N);
  double sum = 0.0;
  for (int n = 1; n <= table.truncation_N; ++n) {
    for (int l = 0; l < n; ++l) {
      for (int m = -l; m <= l; ++m) {
        const int p = pyramid_index(n, l, m);
        sum += table.ortho_projections[p] * kernel_overlaps[p];
      }
    }
    out.convergence.push_back(sum);
  }
  finish_series(out, cfg.series_rel_tol);
  return out;
}

// Same contraction when the kernel sits at the expansion center: only the
// (l, m) = (nu, sigma) block couples, and the radial factors are moments of
// r^{mu*-1} e^{-xi r} against the orthonormal radial functions.
IntegralValue contract_kernel_block(const ExpansionTable& table, const KernelParams& kernel,
                                    const IntegralConfig& cfg) {
  const int N = table.truncation_N;
  const int nu = kernel.index.nu;
  const double mu = kernel.index.mu_star;
  IntegralValue out;
  out.method = IntegralMethod::SeriesN;
  out.truncation_N = N;
  out.convergence.reserve(N);
  Vec radial;
  if (nu + 1 <= N) {
    const double xi = kernel.xi;
    radial = laguerre_radial_moments(table.z, nu, N - 1 - nu, xi, [mu, xi](double r) {
      return std::exp((mu - 1.0) * std::log(r) - xi * r);
    });
    radial *= std::sqrt(four_pi / (2.0 * nu + 1.0));
  }
  double sum = 0.0;
  for (int n = 1; n <= N; ++n) {
    if (n >= nu + 1) {
      sum += table.ortho_projections[pyramid_index(n, nu, kernel.index.sigma)] * radial[n - 1 - nu];
    }
    out.convergence.push_back(sum);
  }
  finish_series(out, cfg.series_rel_tol);
  if (nu + 1 > N) {
    out.converged = false;
    out.message = "truncation_N below the kernel angular index; no pyramid term couples";
  }
  return out;
}

// <sum_t w_t chi_t(z, r_a) | h(xi, r_g)> on a prolate-spheroidal grid about
// the segment a-g.  The phi rule is exact for the trigonometric-polynomial
// angular dependence; the volume element absorbs the focal singularities of
// mild negative powers.
double density_kernel_quad(const OneCenterDensity& den, const Vec3& a, const KernelParams& kernel,
                           int order) {
  int lmax = 0;
  for (const auto& t : den.terms) lmax = std::max(lmax, t.index.l);
  const int nphi = 2 * (lmax + kernel.index.nu) + 2;
  const SpheroidalGrid grid = spheroidal_grid(a, kernel.center, den.z + kernel.xi, order, nphi);
  std::vector<StoParams> chis;
  chis.reserve(den.terms.size());
  for (const auto& t : den.terms) chis.push_back({t.index, den.z, a});
  return block_sum(static_cast<std::int64_t>(grid.points.size()), [&](std::int64_t i) {
    const Vec3& pt = grid.points[i];
    double d = 0.0;
    for (std::size_t t = 0; t < chis.size(); ++t) d += den.terms[t].weight * sto_eval(chis[t], pt);
    return grid.weights[i] * d * kernel_eval(kernel, pt);
  });
}

// Same-center <chi_{n l m}(z) | h^{q*}(xi)>: the angular integral is a
// Kronecker delta and the radial integral a Gamma ratio.
double kernel_overlap_same_center(const OrbitalIndex& p, double z, const KernelParams& kernel) {
  if (p.l != kernel.index.nu || p.m != kernel.index.sigma) return 0.0;
  const double s = p.n_star + kernel.index.mu_star;
  if (!(s > 0.0)) {
    throw DomainError("kernel overlap diverges: n* + mu* must be positive on a shared center");
  }
  return std::sqrt(four_pi / (2.0 * kernel.index.nu + 1.0)) *
         std::exp(std::log(sto_norm(p.n_star, z)) + log_gamma(s) -
                  s * std::log(z + kernel.xi));
}

// The kernel-overlap vector of the AboutBra contraction depends only on the
// expansion scale, the two foci, the kernel, and the grid; molecules reuse it
// across orbital pairs, so it is cached like the expansion tables.
const Vec& cached_kernel_overlaps(double z, const Vec3& a, const KernelParams& kernel, int N,
                                  int order) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%.12e|%.12e,%.12e,%.12e|%.12e,%d,%d,%.12e|%.12e,%.12e,%.12e|%d,%d",
                z, a.x(), a.y(), a.z(), kernel.index.mu_star, kernel.index.nu, kernel.index.sigma,
                kernel.xi, kernel.center.x(), kernel.center.y(), kernel.center.z(), N, order);
  static std::mutex lock;
  static std::map<std::string, std::unique_ptr<const Vec>> cache;
  {
    std::lock_guard<std::mutex> guard(lock);
    const auto it = cache.find(buf);
    if (it != cache.end()) return *it->second;
  }
  const int nphi = 2 * (N - 1 + kernel.index.nu) + 2;
  const SpheroidalGrid grid = spheroidal_grid(a, kernel.center, z + kernel.xi, order, nphi);
  auto overlaps = std::make_unique<const Vec>(
      pyramid_projections(z, a, N, grid.points, grid.weights,
                          [&kernel](const Vec3& pt) { return kernel_eval(kernel, pt); }));
  std::lock_guard<std::mutex> guard(lock);
  return *cache.emplace(buf, std::move(overlaps)).first->second;
}

IntegralValue quad_pair_result(double v_lo, double v_hi, double rel_tol) {
  IntegralValue out;
  out.method = IntegralMethod::ClosedForm;
  out.convergence = {v_lo, v_hi};
  out.value = v_hi;
  const double diff = std::abs(v_hi - v_lo);
  if (diff > rel_tol * std::abs(v_hi) + 1e-14) {
    out.converged = false;
    out.message = "kernel-overlap quadrature levels differ by " + std::to_string(diff);
  }
  return out;
}

}  // namespace

GeometryTriple make_geometry(const Vec3& a, const Vec3& c, const Vec3& g) {
  GeometryTriple t;
  t.a = a;
  t.c = c;
  t.g = g;
  t.R_ca = (c - a).norm();
  t.R_ag = (a - g).norm();
  t.R_cg = (c - g).norm();
  return t;
}

StoParams kernel_as_orbital(const KernelIndex& q, double xi, const Vec3& center) {
  validate_kernel(q);
  if (!(xi > 0.0)) {
    throw DomainError("kernel_as_orbital: the kernel is an orbital factor only for xi > 0");
  }
  if (!(q.mu_star > -0.5)) {
    throw DomainError("kernel_as_orbital: mu* must exceed -1/2 for a normalizable factor");
  }
  return {{q.mu_star, q.nu, q.sigma}, xi, center};
}

IntegralValue overlap_nisto(const StoParams& p, const StoParams& q_like, const IntegralConfig& cfg) {
  check_config(cfg);
  if (!(p.zeta > 0.0) || !(q_like.zeta > 0.0)) {
    throw DomainError("overlap_nisto: both factors need a positive scale; a Coulomb kernel (xi = 0) "
                      "cannot sit in an overlap slot");
  }
  if (same_point(p.center, q_like.center)) {
    IntegralValue out;
    out.value = (p.index.l == q_like.index.l && p.index.m == q_like.index.m)
                    ? sto_inner_same_center(p.index, p.zeta, q_like.index, q_like.zeta)
                    : 0.0;
    return out;
  }
  OracleConfig oc;
  oc.radial_order = cfg.spheroidal_order;
  oc.target_tol = cfg.quad_rel_tol;
  const OracleResult r = overlap_two_center_spheroidal(p, q_like, oc);
  IntegralValue out;
  out.method = IntegralMethod::Oracle;
  out.value = r.value;
  out.converged = r.converged;
  out.message = r.message;
  out.convergence = {r.value - r.error_estimate, r.value};
  return out;
}

IntegralValue modified_overlap(const StoParams& p, const KernelIndex& q, double xi, const Vec3& g,
                               const IntegralConfig& cfg) {
  const StoParams kq = kernel_as_orbital(q, xi, g);
  IntegralValue out = overlap_nisto(p, kq, cfg);
  const double prefactor =
      std::exp(0.5 * log_gamma(2.0 * q.mu_star + 1.0) - (q.mu_star + 0.5) * std::log(2.0 * xi));
  out.value *= prefactor;
  for (double& v : out.convergence) v *= prefactor;
  return out;
}

IntegralValue kernel_overlap(const StoParams& p, const KernelParams& kernel,
                             const IntegralConfig& cfg) {
  check_config(cfg);
  validate_orbital(p.index);
  validate_kernel(kernel.index);
  if (!(p.zeta > 0.0)) throw DomainError("kernel_overlap: orbital scale must be positive");
  if (!(kernel.xi >= 0.0)) throw DomainError("kernel_overlap: xi must be nonnegative");
  if (same_point(p.center, kernel.center)) {
    IntegralValue out;
    out.value = kernel_overlap_same_center(p.index, p.zeta, kernel);
    return out;
  }
  OneCenterDensity den;
  den.z = p.zeta;
  den.terms = {{p.index, 1.0}};
  const double v_lo = density_kernel_quad(den, p.center, kernel, cfg.spheroidal_order);
  const double v_hi = density_kernel_quad(den, p.center, kernel, cfg.spheroidal_order + 6);
  return quad_pair_result(v_lo, v_hi, cfg.quad_rel_tol);
}

IntegralValue one_center_integral(const OrbitalIndex& p1, double zeta1, const OrbitalIndex& p1p,
                                  double zeta1p, const KernelIndex& q, double xi) {
  validate_orbital(p1);
  validate_orbital(p1p);
  validate_kernel(q);
  if (!(zeta1 > 0.0) || !(zeta1p > 0.0)) {
    throw DomainError("one_center_integral: orbital scales must be positive");
  }
  if (!(xi >= 0.0)) throw DomainError("one_center_integral: xi must be nonnegative");
  IntegralValue out;
  const double gnt = gaunt_real(p1.l, p1.m, p1p.l, p1p.m, q.nu, q.sigma);
  if (gnt == 0.0) return out;
  const double s = p1.n_star + p1p.n_star + q.mu_star;
  if (!(s > 0.0)) {
    throw DomainError("one_center_integral diverges: n1* + n1'* + mu* must be positive");
  }
  const double y = zeta1 + zeta1p + xi;
  const double x1 = 2.0 * zeta1 / y;
  const double x1p = 2.0 * zeta1p / y;
  out.value = gnt / std::sqrt(2.0 * q.nu + 1.0) *
              std::exp(log_gamma(s) - 0.5 * log_gamma(2.0 * p1.n_star + 1.0) -
                       0.5 * log_gamma(2.0 * p1p.n_star + 1.0) + (p1.n_star + 0.5) * std::log(x1) +
                       (p1p.n_star + 0.5) * std::log(x1p) + (1.0 - q.mu_star) * std::log(y));
  return out;
}

IntegralValue two_center_integral(TwoCenterVariant variant, const StoParams& p1,
                                  const StoParams& p1p, const KernelParams& kernel,
                                  const IntegralConfig& cfg) {
  check_config(cfg);
  validate_orbital(p1.index);
  validate_orbital(p1p.index);
  validate_kernel(kernel.index);
  if (variant == TwoCenterVariant::OrbitalsShared) {
    if (!same_point(p1.center, p1p.center)) {
      throw DomainError("two_center_integral OrbitalsShared: both orbitals must share a center");
    }
    if (same_point(p1.center, kernel.center)) {
      return one_center_integral(p1.index, p1.zeta, p1p.index, p1p.zeta, kernel.index, kernel.xi);
    }
    const OneCenterDensity den =
        expand_one_center_product(p1.index, p1p.index, p1.zeta, p1p.zeta);
    const double v_lo = density_kernel_quad(den, p1.center, kernel, cfg.spheroidal_order);
    const double v_hi = density_kernel_quad(den, p1.center, kernel, cfg.spheroidal_order + 6);
    return quad_pair_result(v_lo, v_hi, cfg.quad_rel_tol);
  }
  if (!same_point(p1p.center, kernel.center)) {
    throw DomainError("two_center_integral KernelShared: the ket must sit on the kernel center");
  }
  const auto table =
      expand_product_density(p1, p1p, kernel.center, cfg.truncation_N, cfg.expansion);
  return contract_kernel_block(*table, kernel, cfg);
}

IntegralValue three_center_integral(const StoParams& p1, const StoParams& p1p,
                                    const KernelParams& kernel, ThreeCenterPath path,
                                    const IntegralConfig& cfg) {
  check_config(cfg);
  const Vec3& a = p1.center;
  const Vec3& c = p1p.center;
  const Vec3& g = kernel.center;
  if (same_point(a, c)) {
    if (same_point(a, g)) {
      return one_center_integral(p1.index, p1.zeta, p1p.index, p1p.zeta, kernel.index, kernel.xi);
    }
    return two_center_integral(TwoCenterVariant::OrbitalsShared, p1, p1p, kernel, cfg);
  }
  if (same_point(c, g)) {
    return two_center_integral(TwoCenterVariant::KernelShared, p1, p1p, kernel, cfg);
  }
  if (same_point(a, g)) {
    return two_center_integral(TwoCenterVariant::KernelShared, p1p, p1, kernel, cfg);
  }
  validate_orbital(p1.index);
  validate_orbital(p1p.index);
  validate_kernel(kernel.index);
  if (path == ThreeCenterPath::AboutBra) {
    const auto table = expand_product_density(p1, p1p, a, cfg.truncation_N, cfg.expansion);
    const Vec& overlaps =
        cached_kernel_overlaps(table->z, a, kernel, cfg.truncation_N, cfg.spheroidal_order);
    return contract_full(*table, overlaps, cfg);
  }
  const auto table = expand_product_density(p1, p1p, g, cfg.truncation_N, cfg.expansion);
  return contract_kernel_block(*table, kernel, cfg);
}

IntegralValue kernel_matrix_element(const StoParams& p1, const StoParams& p1p,
                                    const KernelParams& kernel, const IntegralConfig& cfg) {
  return three_center_integral(p1, p1p, kernel, ThreeCenterPath::AboutBra, cfg);
}

}  // namespace nisto

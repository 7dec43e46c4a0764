#include "nisto/basis.h"

#include <cmath>
#include <string>

#include "nisto/special.h"

namespace nisto {

void validate_orbital(const OrbitalIndex& p) {
  if (!(p.n_star > 0.0)) {
    throw DomainError("orbital index requires n* > 0, got " + std::to_string(p.n_star));
  }
  validate_angular({p.l, p.m});
}

void validate_kernel(const KernelIndex& q) {
  validate_angular({q.nu, q.sigma});
}

double sto_norm(double n_star, double zeta) {
  if (!(n_star > -0.5)) {
    throw DomainError("sto_norm: r^{2 n* } not integrable near 0 unless n* > -1/2");
  }
  if (!(zeta > 0.0)) throw DomainError("sto_norm: zeta must be positive");
  return std::exp((n_star + 0.5) * std::log(2.0 * zeta) - 0.5 * log_gamma(2.0 * n_star + 1.0));
}

double sto_radial(double n_star, double zeta, double r) {
  if (r == 0.0) {
    if (n_star < 1.0) {
      throw SingularityError("sto_radial: r^{n*-1} singular at r = 0 for n* < 1");
    }
    return n_star == 1.0 ? sto_norm(n_star, zeta) : 0.0;
  }
  return sto_norm(n_star, zeta) * std::exp((n_star - 1.0) * std::log(r) - zeta * r);
}

double sto_eval(const StoParams& p, const Vec3& point) {
  validate_angular({p.index.l, p.index.m});
  const Vec3 d = point - p.center;
  const double r = d.norm();
  const double radial = sto_radial(p.index.n_star, p.zeta, r);
  if (r == 0.0) {
    return p.index.l == 0 ? radial * sph_real(0, 0, 1.0, 0.0) : 0.0;
  }
  return radial * sph_real_dir(p.index.l, p.index.m, d);
}

std::complex<double> sto_eval_complex(const StoParams& p, const Vec3& point) {
  validate_angular({p.index.l, p.index.m});
  const Vec3 d = point - p.center;
  const double r = d.norm();
  const double radial = sto_radial(p.index.n_star, p.zeta, r);
  if (r == 0.0) {
    return p.index.l == 0 ? radial * sph_complex(0, 0, 1.0, 0.0) : 0.0;
  }
  const double cos_theta = d.z() / r;
  const double phi = std::atan2(d.y(), d.x());
  return radial * sph_complex(p.index.l, p.index.m, cos_theta, phi);
}

double kernel_eval(const KernelParams& q, const Vec3& point) {
  validate_kernel(q.index);
  if (q.xi < 0.0) throw DomainError("kernel_eval: xi must be nonnegative");
  const Vec3 d = point - q.center;
  const double r = d.norm();
  const double pref = std::sqrt(four_pi / (2.0 * q.index.nu + 1.0));
  if (r == 0.0) {
    if (q.index.mu_star < 1.0) {
      throw SingularityError("kernel_eval: r^{mu*-1} singular at r = 0 for mu* < 1");
    }
    if (q.index.mu_star > 1.0 || q.index.nu > 0) return 0.0;
    return pref * sph_real(0, 0, 1.0, 0.0);
  }
  const double radial = std::exp((q.index.mu_star - 1.0) * std::log(r) - q.xi * r);
  return pref * radial * sph_real_dir(q.index.nu, q.index.sigma, d);
}

double sto_inner_same_center(const OrbitalIndex& p, double zeta,
                             const OrbitalIndex& pp, double zeta_p) {
  validate_angular({p.l, p.m});
  validate_angular({pp.l, pp.m});
  if (!(p.n_star > -0.5) || !(pp.n_star > -0.5)) {
    throw DomainError("sto_inner_same_center: factors must be normalizable, n* > -1/2");
  }
  if (!(zeta > 0.0) || !(zeta_p > 0.0)) {
    throw DomainError("sto_inner_same_center: screening constants must be positive");
  }
  if (p.l != pp.l || p.m != pp.m) return 0.0;
  const double t = (zeta - zeta_p) / (zeta + zeta_p);
  const double log_ratio = log_gamma(p.n_star + pp.n_star + 1.0) -
                           0.5 * log_gamma(2.0 * p.n_star + 1.0) -
                           0.5 * log_gamma(2.0 * pp.n_star + 1.0);
  return std::exp(log_ratio + (p.n_star + 0.5) * std::log1p(t) +
                  (pp.n_star + 0.5) * std::log1p(-t));
}

}  // namespace nisto

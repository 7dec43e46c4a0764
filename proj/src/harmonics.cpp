#include "nisto/harmonics.h"

#include <cmath>

#include "nisto/special.h"

namespace nisto {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779;  // 1/√(2π)
constexpr double kInvSqrtPi = 0.5641895835477562869;   // 1/√π

double phi_factor(int m, double phi) {
  if (m == 0) return kInvSqrt2Pi;
  if (m > 0) return std::cos(m * phi) * kInvSqrtPi;
  return std::sin(-m * phi) * kInvSqrtPi;
}

}  // namespace

void validate_angular(const AngularIndex& a) {
  if (a.l < 0) throw DomainError("angular index requires l >= 0");
  if (std::abs(a.m) > a.l) throw DomainError("angular index requires |m| <= l");
}

double sph_real(int l, int m, double cos_theta, double phi) {
  validate_angular({l, m});
  return legendre_norm(l, std::abs(m), cos_theta) * phi_factor(m, phi);
}

std::complex<double> sph_complex(int l, int m, double cos_theta, double phi) {
  validate_angular({l, m});
  const double radial = legendre_norm(l, std::abs(m), cos_theta) * kInvSqrt2Pi;
  return {radial * std::cos(m * phi), radial * std::sin(m * phi)};
}

double sph_real_dir(int l, int m, const Vec3& v) {
  const double r = v.norm();
  if (r == 0.0) {
    if (l == 0) return kInvSqrt2Pi * legendre_norm(0, 0, 1.0);
    throw DomainError("direction harmonic undefined at the origin for l > 0");
  }
  const double cos_theta = v.z() / r;
  const double phi = (v.x() == 0.0 && v.y() == 0.0) ? 0.0 : std::atan2(v.y(), v.x());
  return sph_real(l, m, cos_theta, phi);
}

void sph_real_all(int lmax, double cos_theta, double phi, Vec& values) {
  Mat table;
  legendre_norm_table(lmax, cos_theta, table);
  values.resize(lm_count(lmax));
  for (int l = 0; l <= lmax; ++l) {
    for (int m = -l; m <= l; ++m) {
      values[lm_pack(l, m)] = table(l, std::abs(m)) * phi_factor(m, phi);
    }
  }
}

}  // namespace nisto

#pragma once

#include <complex>

#include "nisto/core.h"

namespace nisto {

struct AngularIndex {
  int l = 0;
  int m = 0;
};

enum class HarmonicKind { Complex, Real };

void validate_angular(const AngularIndex& a);

// Packed index for (l, m) with l <= lmax: lm_pack(l, m) = l*l + l + m.
inline int lm_pack(int l, int m) { return l * l + l + m; }
inline int lm_count(int lmax) { return (lmax + 1) * (lmax + 1); }

// Real spherical harmonic S_lm(θ, φ) = P̄_l|m|(cosθ) Φ_m(φ) with
// Φ_0 = 1/√(2π), Φ_m = cos(mφ)/√π (m > 0), Φ_m = sin(|m|φ)/√π (m < 0).
double sph_real(int l, int m, double cos_theta, double phi);

// Complex spherical harmonic Y_lm = P̄_l|m|(cosθ) e^{imφ}/√(2π); no
// Condon-Shortley factor, so Y*_lm = Y_{l,-m} exactly.
std::complex<double> sph_complex(int l, int m, double cos_theta, double phi);

// Real harmonic at a direction given by a (not necessarily unit) vector.
double sph_real_dir(int l, int m, const Vec3& v);

// Fills values[lm_pack(l, m)] = S_lm(cosθ, φ) for all l <= lmax.
void sph_real_all(int lmax, double cos_theta, double phi, Vec& values);

}  // namespace nisto

#pragma once

#include <complex>

#include "nisto/core.h"
#include "nisto/harmonics.h"

namespace nisto {

// Noninteger principal index n* > 0; n* < l + 1 is allowed.
struct OrbitalIndex {
  double n_star = 1.0;
  int l = 0;
  int m = 0;
};

// Kernel index q = (mu*, nu, sigma); Coulomb is (0, 0, 0).
struct KernelIndex {
  double mu_star = 0.0;
  int nu = 0;
  int sigma = 0;
};

struct StoParams {
  OrbitalIndex index;
  double zeta = 1.0;
  Vec3 center = Vec3::Zero();
};

struct KernelParams {
  KernelIndex index;
  double xi = 0.0;
  Vec3 center = Vec3::Zero();
};

void validate_orbital(const OrbitalIndex& p);
void validate_kernel(const KernelIndex& q);

// Radial normalization (2 zeta)^{n*+1/2} [Gamma(2n*+1)]^{-1/2}.  Defined for
// any normalizable exponent n* > -1/2, which admits kernels rewritten as
// orbital factors; physical orbitals additionally require n* > 0 and are
// checked at the API entry points via validate_orbital.
double sto_norm(double n_star, double zeta);

// Radial part N r^{n*-1} e^{-zeta r}; throws SingularityError at r = 0 when
// n* < 1.
double sto_radial(double n_star, double zeta, double r);

// chi_{n*lm}(zeta, r) = N r^{n*-1} e^{-zeta r} S_lm(theta, phi) with the real
// harmonic S_lm.  At the center the value is 0 for n* > 1 and, by convention,
// also for l > 0; n* < 1 throws.
double sto_eval(const StoParams& p, const Vec3& point);

// Same orbital with the complex harmonic Y_lm in place of S_lm.
std::complex<double> sto_eval_complex(const StoParams& p, const Vec3& point);

// h^{q*}(xi, r) = sqrt(4 pi/(2 nu + 1)) r^{mu*-1} e^{-xi r} S_{nu sigma}.
// Coulomb (0,0,0) with xi = 0 gives exactly 1/r.
double kernel_eval(const KernelParams& q, const Vec3& point);

// Analytic same-center inner product
//   <chi_{n* l m}(zeta) | chi_{n'* l' m'}(zeta')>
//     = delta_{ll'} delta_{mm'} Gamma(n*+n'*+1)/sqrt(Gamma(2n*+1) Gamma(2n'*+1))
//       (1+t)^{n*+1/2} (1-t)^{n'*+1/2},  t = (zeta - zeta')/(zeta + zeta').
double sto_inner_same_center(const OrbitalIndex& p, double zeta,
                             const OrbitalIndex& pp, double zeta_p);

}  // namespace nisto

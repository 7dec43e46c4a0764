#pragma once

#include "nisto/core.h"

namespace nisto {

// Angular coupling coefficient for real spherical harmonics:
//   gaunt_real = sqrt(4 pi) * ∫ S_{l1 m1} S_{l2 m2} S_{nu sigma} dΩ.
// Exact selection rules short-circuit to zero: triangle rule
// |l1 - l2| <= nu <= l1 + l2, parity l1 + l2 + nu even, and the analytic
// azimuthal coupling of m1, m2, sigma.  Nonzero values come from the exact
// azimuthal factor times a Gauss-Legendre theta integral sized so the
// polynomial integrand is integrated exactly.  Results are cached; the cache
// is safe for concurrent lookups.
double gaunt_real(int l1, int m1, int l2, int m2, int nu, int sigma);

}  // namespace nisto

#pragma once

#include "nisto/core.h"

namespace nisto {

// Gamma function for positive real argument.
double gamma_real(double x);

// log Gamma(x), x > 0.
double log_gamma(double x);

// Normalized associated Legendre function P̄_lm(x) with
// ∫_{-1}^{1} P̄_lm(x)^2 dx = 1.  Requires 0 <= m <= l and |x| <= 1.
double legendre_norm(int l, int m, double x);

// Fills the lower triangle table[l][m] = P̄_lm(x) for all l <= lmax.
// `table` is resized to (lmax+1) x (lmax+1); entries with m > l are zero.
void legendre_norm_table(int lmax, double x, Mat& table);

// Orthonormal radial functions spanning {r^L e^{-beta r}, ..., r^{L+kmax} e^{-beta r}}
// under the measure r^2 dr:
//   psi_k(r) = sqrt((2 beta)^3 k! / (k + 2L + 2)!) (2 beta r)^L e^{-beta r}
//              L_k^{(2L+2)}(2 beta r),  k = 0..kmax.
// Evaluated by a scaled three-term recurrence that never overflows.
// `out` is resized to (kmax+1) x r.size(); row k holds psi_k at the given radii.
void laguerre_orthonormal(double beta, int L, int kmax, const Vec& r, Mat& out);

// Gauss-Legendre nodes and weights on [-1, 1], exact for polynomials of
// degree 2n - 1.  Newton iteration on the Legendre recurrence; deterministic.
void gauss_legendre(int n, Vec& nodes, Vec& weights);

}  // namespace nisto

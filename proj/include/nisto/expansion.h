#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <vector>

#include "nisto/basis.h"
#include "nisto/core.h"

namespace nisto {

// Integer-index pyramid n = 1..N, l = 0..n-1, m = -l..l in lexicographic
// (n, l, m) order; pyramid_size(N) = N (N + 1) (2N + 1) / 6.
int pyramid_size(int truncation_N);
int pyramid_index(int n, int l, int m);

// One term of a finite same-center rewrite: weight times
// chi_{n* l m}(z, r) about the shared center.
struct OneCenterTerm {
  OrbitalIndex index;
  double weight = 0.0;
};

// Exact finite expansion of a same-center orbital product: the product
// chi*_{p1}(zeta1, r) chi_{p1'}(zeta1', r) equals
// sum_t terms[t].weight * chi_{terms[t].index}(z, r) with z = zeta1 + zeta1'
// and principal index n* = n1* + n1'* - 1 in every term.
struct OneCenterDensity {
  double z = 0.0;
  std::vector<OneCenterTerm> terms;
};

OneCenterDensity expand_one_center_product(const OrbitalIndex& p1, const OrbitalIndex& p1p,
                                           double zeta1, double zeta1p);

// Where the two factors of a projected product density sit relative to the
// expansion center; recorded for traceability, the projected object itself
// does not depend on it.
enum class Arrangement { SameCenter, BraAtCenter, KetAtCenter, Displaced };

// L2 projection of the product chi*_{p1}(zeta1, r - a) chi_{p1'}(zeta1', r - c)
// onto the integer-index STO pyramid chi_{nlm}(z, r - g), n <= truncation_N,
// z = zeta1 + zeta1'.  The density D satisfies
//   D(r) = sum_p coefficients[p] chi_p(z, r - g) + residual,
// with ||residual||_2 = residual_l2 and coefficients solving the per-(l,m)
// normal equations G w = b.
struct ExpansionTable {
  StoParams bra;
  StoParams ket;
  Vec3 expansion_center = Vec3::Zero();
  double z = 0.0;
  int truncation_N = 0;
  Arrangement arrangement = Arrangement::Displaced;
  Vec coefficients;
  // Projections of D onto the orthonormal radial functions psi_k(z, L=l)
  // S_lm spanning the same pyramid space, stored at
  // pyramid_index(k + l + 1, l, m).  Any linear functional of the projected
  // density contracts stably against these, and partial sums over n give the
  // exactly nonincreasing residual curve.
  Vec ortho_projections;
  double density_norm2 = 0.0;   // <D | D>
  double residual_l2 = 0.0;
  double gram_condition = 0.0;  // worst condition number over (l, m) blocks
  bool regularized = false;     // Tikhonov fallback engaged on some block
  bool exact = false;           // finite same-center rewrite embeds in the pyramid
};

struct ExpansionConfig {
  int radial_order = 18;
  int ntheta = 0;  // 0: max(16, truncation_N + 8)
  int partition_sharpness = 3;
  double condition_limit = 1e12;
};

// Tables are immutable and cached by (indices, scales, geometry quantized at
// 1e-12, truncation, grid settings); repeated requests share one table.
std::shared_ptr<const ExpansionTable> expand_product_density(const StoParams& p1,
                                                             const StoParams& p1p, const Vec3& g,
                                                             int truncation_N,
                                                             const ExpansionConfig& cfg = {});

// residual_l2 for every truncation 1..truncation_N from nested solves of one
// table, so the curve is nonincreasing by the projection property.
Vec residual_curve(const StoParams& p1, const StoParams& p1p, const Vec3& g, int truncation_N,
                   const ExpansionConfig& cfg = {});

// Same-center Gram matrix of the pyramid block with angular index l:
// G_{nn'} = Gamma(n + n' + 1) / sqrt(Gamma(2n+1) Gamma(2n'+1)) for
// n, n' = l+1..N.  Independent of the common scale z.
Mat pyramid_gram_block(int truncation_N, int l);

// Projections <psi_k(z, L=l) S_lm(dir) | f> about `center` for the whole
// pyramid (stored at pyramid_index(k + l + 1, l, m)), accumulated on the
// supplied grid with one harmonic table and one Laguerre recurrence per
// point.
Vec pyramid_projections(double z, const Vec3& center, int truncation_N,
                        const std::vector<Vec3>& points, const Vec& weights,
                        const std::function<double(const Vec3&)>& f);

// Radial moments <psi_k(z, L) | f> = int psi_k(z, L; r) f(r) r^2 dr for
// k = 0..kmax; `extra_decay` describes the exponential falloff of f beyond
// any power, so the quadrature map can be scaled.
Vec laguerre_radial_moments(double z, int L, int kmax, double extra_decay,
                            const std::function<double(double)>& f);

// Separable table for a spherically symmetric two-particle kernel
// h^{q*}(xi, r_12) about a shared origin O:
//   h(xi, |r1 - r2|) = sum_{L <= lmax} sum_{M} sum_{k k'}
//       psi_k(|r1 - O|) S_LM(1) block(L)[k, k'] psi_k'(|r2 - O|) S_LM(2)
// where psi_k are the orthonormal Laguerre-type radial functions at scale
// beta spanning the same space as the integer-index STO family chi(beta).
// block(L) includes the 4 pi / (2L + 1) angular prefactor of the Legendre
// expansion and is symmetric; blocks are built lazily per L.
class KernelExpansion {
 public:
  KernelExpansion(const KernelIndex& q, double xi, const Vec3& origin, double beta, int n_pair,
                  int lmax, int radial_order = 16);

  const Vec3& origin() const { return origin_; }
  double beta() const { return beta_; }
  double xi() const { return xi_; }
  int n_pair() const { return n_pair_; }
  int lmax() const { return lmax_; }

  const Mat& block(int L) const;

  // Legendre radial component f_L(r1, r2) of the kernel, so that
  // h(xi, r_12) = sum_L (2L+1)/(4 pi) ... is folded as
  // h = sum_{L M} f_L(r1, r2) * (4 pi / (2L+1)) S_LM(1) S_LM(2).
  double radial_component(int L, double r1, double r2) const;

 private:
  KernelIndex q_;
  double xi_ = 0.0;
  Vec3 origin_ = Vec3::Zero();
  double beta_ = 1.0;
  int n_pair_ = 0;
  int lmax_ = 0;
  int radial_order_ = 16;
  mutable std::vector<std::unique_ptr<Mat>> blocks_;
  mutable std::unique_ptr<std::mutex> lock_;
};

struct KernelExpansionConfig {
  double beta = 0.0;  // 0: xi + 2
  int n_pair = 40;
  int lmax = 8;
  int radial_order = 16;
};

// Only spherically symmetric kernels (nu = 0) are supported; nu > 0 throws
// DomainError.
KernelExpansion expand_kernel_two_particle(const KernelIndex& q, double xi, const Vec3& origin,
                                           const KernelExpansionConfig& cfg = {});

}  // namespace nisto

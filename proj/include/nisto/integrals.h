#pragma once

#include <string>
#include <vector>

#include "nisto/basis.h"
#include "nisto/core.h"
#include "nisto/expansion.h"

namespace nisto {

enum class IntegralMethod { ClosedForm, SeriesN, Oracle };

struct IntegralValue {
  double value = 0.0;
  IntegralMethod method = IntegralMethod::ClosedForm;
  int truncation_N = 0;             // series truncation; 0 for non-series results
  std::vector<double> convergence;  // partial values by N, or refinement levels
  bool converged = true;
  std::string message;
};

struct GeometryTriple {
  Vec3 a = Vec3::Zero();
  Vec3 c = Vec3::Zero();
  Vec3 g = Vec3::Zero();
  double R_ca = 0.0;
  double R_ag = 0.0;
  double R_cg = 0.0;
};
GeometryTriple make_geometry(const Vec3& a, const Vec3& c, const Vec3& g);

struct IntegralConfig {
  int truncation_N = 12;         // series truncation, capped at 30
  double series_rel_tol = 1e-6;  // successive-partial convergence declaration
  int spheroidal_order = 20;     // kernel-overlap quadrature order
  double quad_rel_tol = 1e-8;    // two-level quadrature agreement target
  ExpansionConfig expansion;
};

// The kernel index read as an orbital: chi_{q*}(xi, r) with n* = mu*, l = nu,
// m = sigma.  Requires xi > 0 and mu* > -1/2 to be normalizable; the kernel
// function itself is sqrt(4pi/(2nu+1)) Gamma(2mu*+1)^{1/2} / (2xi)^{mu*+1/2}
// times this orbital.
StoParams kernel_as_orbital(const KernelIndex& q, double xi, const Vec3& center);

// Overlap S of two STO-like factors.  Same-center pairs use the closed form;
// displaced pairs use prolate-spheroidal quadrature with refinement.
IntegralValue overlap_nisto(const StoParams& p, const StoParams& q_like,
                            const IntegralConfig& cfg = {});

// Modified overlap Lambda(z, xi; R_ag) = Gamma(2mu*+1)^{1/2} / (2xi)^{mu*+1/2}
// times the overlap of chi_{p}(z, r_a) with the kernel-index orbital at g.
IntegralValue modified_overlap(const StoParams& p, const KernelIndex& q, double xi, const Vec3& g,
                               const IntegralConfig& cfg = {});

// <chi_p(zeta, r_a) | h^{q*}(xi, r_g)>, the physical kernel overlap, by
// direct spheroidal quadrature of the product; valid at xi = 0.
IntegralValue kernel_overlap(const StoParams& p, const KernelParams& kernel,
                             const IntegralConfig& cfg = {});

// Closed form for all three factors on one center:
//   <chi*_{p1}(zeta1) chi_{p1'}(zeta1') h^{q*}(xi)>
//     = (2nu+1)^{-1/2} GauntValue Gamma(n1*+n1'*+mu*)
//       / sqrt(Gamma(2n1*+1) Gamma(2n1'*+1))
//       x1^{n1*+1/2} x1'^{n1'*+1/2} y^{1-mu*},
// with y = zeta1 + zeta1' + xi, x1 = 2 zeta1 / y, x1' = 2 zeta1' / y.
// Throws when n1* + n1'* + mu* <= 0 (divergent radial integral).
IntegralValue one_center_integral(const OrbitalIndex& p1, double zeta1, const OrbitalIndex& p1p,
                                  double zeta1p, const KernelIndex& q, double xi);

// Two-center kernel integrals:
//   OrbitalsShared: both orbitals at a, kernel displaced at g; exact finite
//     same-center rewrite contracted with per-term kernel overlaps.
//   KernelShared: bra at a, ket and kernel both at g; projected expansion
//     about g contracted with the closed-form radial factor, truncated series.
enum class TwoCenterVariant { OrbitalsShared, KernelShared };
IntegralValue two_center_integral(TwoCenterVariant variant, const StoParams& p1,
                                  const StoParams& p1p, const KernelParams& kernel,
                                  const IntegralConfig& cfg = {});

// Three distinct centers.  AboutBra expands the product density about the bra
// center and contracts with kernel overlaps; AboutKernel expands about the
// kernel center and contracts with the closed-form radial factor.  Degenerate
// geometries route to the specialized operations.
enum class ThreeCenterPath { AboutBra, AboutKernel };
IntegralValue three_center_integral(const StoParams& p1, const StoParams& p1p,
                                    const KernelParams& kernel, ThreeCenterPath path,
                                    const IntegralConfig& cfg = {});

// Geometry-routing front door: picks the one-, two-, or three-center
// evaluation for <chi*_{p1} chi_{p1'} h^{q*}>.
IntegralValue kernel_matrix_element(const StoParams& p1, const StoParams& p1p,
                                    const KernelParams& kernel, const IntegralConfig& cfg = {});

}  // namespace nisto

#pragma once

#include <functional>
#include <vector>

#include "nisto/core.h"

namespace nisto {

// Composite Gauss-Legendre on [a, b] with `order` nodes per panel and panels
// geometrically graded (ratio 1/2, `depth` halvings) toward both endpoints,
// so integrable algebraic endpoint singularities converge fast.
void graded_panels(double a, double b, int depth, int order, Vec& x, Vec& w);

// Semi-infinite radial rule: sum_i w_i f(r_i) approximates the integral of
// f(r) dr over [0, inf).  Rational map r = r_m x/(1-x) over graded panels in
// x, so both the r = 0 cusp region and the exponential tail are resolved.
// Weights do not include the r^2 Jacobian.
void radial_rule(int order, double r_m, Vec& r, Vec& w);

// Unit-sphere product grid: Gauss-Legendre in cos(theta) (ntheta nodes) by
// uniform midpoint in phi (nphi nodes).  Weights sum to 4 pi.  Exact for
// products of spherical harmonics with combined cos(theta) degree
// <= 2 ntheta - 1 and azimuthal frequency < nphi.
struct SphereGrid {
  Mat dirs;     // npts x 3 unit vectors
  Vec weights;  // npts
};
SphereGrid sphere_grid(int ntheta, int nphi);

// Fuzzy-cell partition weights at `point` among `centers`: iterated
// polynomial switching function f(mu) = 1.5 mu - 0.5 mu^3, `iterations`
// passes, normalized so the weights sum to 1.
Vec partition_weights(const std::vector<Vec3>& centers, const Vec3& point, int iterations);

// Multicenter grid: per-center spherical grids (radial_rule x sphere_grid)
// with fuzzy-cell weights folded in.  `scales` gives the per-center radial
// map parameter r_m (1/zeta_max of the functions peaked there); empty means
// r_m = 1 for every center.
struct Grid3 {
  std::vector<Vec3> points;
  Vec weights;
};
Grid3 molecular_grid(const std::vector<Vec3>& centers, const std::vector<double>& scales,
                     int radial_order, int ntheta, int partition_iterations);

// Prolate spheroidal product grid between foci a and b: graded
// Gauss-Legendre panels in the radial-like and angular-like spheroidal
// variables, uniform nphi azimuthal nodes.  Weights include the full volume
// element, so sum_i w_i f(x_i) approximates the integral of f over 3-space
// for integrands decaying like exp(-decay * (r_a + r_b) / 2).
struct SpheroidalGrid {
  std::vector<Vec3> points;
  Vec weights;
};
SpheroidalGrid spheroidal_grid(const Vec3& a, const Vec3& b, double decay, int order, int nphi);

// Sums f(i) for i in [0, n) in fixed-size blocks; block partial sums are
// combined in index order, so the result is independent of whether blocks
// run serially or on the NISTO_THREADS worker pool.
double block_sum(std::int64_t n, const std::function<double(std::int64_t)>& f);

}  // namespace nisto

#pragma once

#include <string>
#include <vector>

#include "nisto/basis.h"
#include "nisto/core.h"
#include "nisto/integrals.h"

namespace nisto {

struct Nucleus {
  double charge = 1.0;
  Vec3 position = Vec3::Zero();
};

// Immutable after validation.  MO coefficients are real (complex-harmonic
// input files are transformed to the real basis at load time); columns are
// orbitals.  Occupancies f_i lie in (0, 1], the first n_closed of them
// exactly 1, and the electron count is 2 sum f_i.
struct Molecule {
  std::string name;
  std::vector<Nucleus> nuclei;
  std::vector<StoParams> basis;
  Mat mo_coefficients;
  Vec occupancies;
  int n_closed = 0;
  int n_open = 0;
};

double nuclear_charge(const Molecule& mol);
double electron_count(const Molecule& mol);

// Overlap matrix of the basis: closed form on shared centers, spheroidal
// quadrature across centers.
Mat basis_gram(const std::vector<StoParams>& basis, const IntegralConfig& cfg = {});

// Structural and normalization checks; throws SchemaError on shape
// mismatches and DomainError on out-of-range values or MO columns whose
// Gram norm misses 1 by more than norm_tol.
void validate_molecule(const Molecule& mol, double norm_tol = 1e-6);

// Copy with each MO column scaled to unit Gram norm.
Molecule renormalized(Molecule mol, const IntegralConfig& cfg = {});

// One summand of the orbital density |u_i|^2 = sum C_{p i} C_{p' i}
// chi_p chi_{p'}: indices into the basis plus the coefficient product.
struct MoProductTerm {
  int p = 0;
  int pp = 0;
  double weight = 0.0;
};
std::vector<MoProductTerm> mo_density_terms(const Molecule& mol, int i);

// h_i = <u_i | h^{q*}(xi, r_g) | u_i>: the density terms contracted with
// geometry-routed kernel matrix elements.  Convergence flags of the
// underlying series aggregate into the result.
IntegralValue h_i_matrix_element(const Molecule& mol, int i, const KernelParams& kernel,
                                 const IntegralConfig& cfg = {});

struct PotentialSample {
  Vec3 point = Vec3::Zero();
  KernelIndex kernel;
  double xi = 0.0;
  double nuclear_part = 0.0;
  double electronic_part = 0.0;
  double total = 0.0;  // nuclear_part - electronic_part
  bool converged = true;
  std::string message;
};

// phi(g) = sum_b Z_b h^{q*}(xi, r_bg) - 2 sum_i f_i h_i^{q*}(xi, r_og).
// Evaluating a singular kernel on top of a nucleus throws SingularityError.
PotentialSample potential_at(const Molecule& mol, const Vec3& g, const KernelIndex& q, double xi,
                             const IntegralConfig& cfg = {});

std::vector<PotentialSample> potential_grid(const Molecule& mol, const std::vector<Vec3>& points,
                                            const KernelIndex& q, double xi,
                                            const IntegralConfig& cfg = {});

}  // namespace nisto

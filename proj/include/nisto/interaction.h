#pragma once

#include <string>

#include "nisto/core.h"
#include "nisto/expansion.h"
#include "nisto/integrals.h"
#include "nisto/molecule.h"

namespace nisto {

// Two molecules in one frame.  `origin` anchors the two-particle kernel
// factorization; accuracy of the electron-electron term depends on it, so it
// is explicit scene data rather than a hidden default.
struct Scene {
  Molecule a;
  Molecule b;
  KernelIndex kernel;
  double xi = 0.0;
  Vec3 origin = Vec3::Zero();
};

// Mean nuclear position, falling back to the mean basis center for
// nucleus-free fragments.
Vec3 molecular_centroid(const Molecule& mol);

// Scene with the default origin: the midpoint of the two centroids.
Scene make_scene(Molecule a, Molecule b, const KernelIndex& q, double xi);

struct TermMeta {
  bool converged = true;
  std::string message;
};

struct EnergyBreakdown {
  double u1 = 0.0;  // nuclei(A) - nuclei(B)
  double u2 = 0.0;  // electrons(A) - nuclei(B)
  double u3 = 0.0;  // nuclei(A) - electrons(B)
  double u4 = 0.0;  // electrons(A) - electrons(B)
  double total = 0.0;
  TermMeta meta_u2;
  TermMeta meta_u3;
  TermMeta meta_u4;
  // Largest change in any orbital-pair element when the pair basis is cut to
  // half rank; the truncation probe behind meta_u4.
  double u4_pair_tail = 0.0;
};

struct InteractionConfig {
  KernelExpansionConfig pair;    // two-particle table: beta = 0 resolves to xi + 1
  IntegralConfig integrals;      // electron-nuclear matrix elements
  int density_radial_order = 30; // orbital-density projection grids
  int density_ntheta = 20;
  int partition_sharpness = 3;
};

// Sum over nucleus pairs of Z_b Z_b' h^{q*}(xi, R_bb').
double u1_nuclear(const Scene& scene);

struct ElectronNuclearTerms {
  double u2 = 0.0;
  double u3 = 0.0;
  TermMeta meta_u2;
  TermMeta meta_u3;
};

// U2 = -2 sum_{b' in B} sum_{i in A} Z_b' f_i h_i(xi, R_b'); U3 with roles
// swapped.
ElectronNuclearTerms u2_u3_electron_nuclear(const Scene& scene,
                                            const InteractionConfig& cfg = {});

struct ElectronElectronTerm {
  double u4 = 0.0;
  TermMeta meta;
  double pair_tail = 0.0;
};

// U4 = 4 sum_{i in A} sum_{i' in B} f_i f_i' h_{i'i}, with h_{i'i} assembled
// from per-molecule orbital-density projections onto the shared-origin pair
// basis contracted through the kernel table blocks.
ElectronElectronTerm u4_electron_electron(const Scene& scene, const InteractionConfig& cfg = {});

EnergyBreakdown interaction_energy(const Scene& scene, const InteractionConfig& cfg = {});

}  // namespace nisto

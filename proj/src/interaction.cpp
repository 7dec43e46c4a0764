#include "nisto/interaction.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "nisto/harmonics.h"
#include "nisto/quadrature.h"
#include "nisto/special.h"

namespace nisto {
namespace {

constexpr int kChunk = 4096;

// Unique basis centers with the largest local radial map scale 1/zeta, so
// the per-center grids cover the slowest local decay.
std::vector<Vec3> unique_centers(const Molecule& mol, std::vector<double>& scales) {
  std::vector<Vec3> centers;
  scales.clear();
  for (const StoParams& p : mol.basis) {
    bool found = false;
    for (std::size_t i = 0; i < centers.size(); ++i) {
      if (centers[i] == p.center) {
        scales[i] = std::max(scales[i], 1.0 / p.zeta);
        found = true;
      }
    }
    if (!found) {
      centers.push_back(p.center);
      scales.push_back(1.0 / p.zeta);
    }
  }
  return centers;
}

// Per MO and per L: the (n_pair x (2L+1)) projections
// J[k, M+L] = <|u_i|^2 psi_k(beta, L; r_O) S_LM(dir_O)>, accumulated over a
// molecular grid about the basis centers (psi_k S_LM is smooth everywhere,
// so the origin needs no grid of its own).
using PairProjection = std::vector<Mat>;

std::vector<PairProjection> density_projections(const Molecule& mol, const Vec3& origin,
                                                double beta, int n_pair, int lmax,
                                                const InteractionConfig& cfg) {
  const int n_mos = static_cast<int>(mol.occupancies.size());
  std::vector<PairProjection> out(n_mos);
  for (int i = 0; i < n_mos; ++i) {
    out[i].resize(lmax + 1);
    for (int L = 0; L <= lmax; ++L) out[i][L] = Mat::Zero(n_pair, 2 * L + 1);
  }
  if (n_mos == 0 || mol.basis.empty()) return out;

  std::vector<double> scales;
  std::vector<Vec3> centers = unique_centers(mol, scales);
  // The pair functions oscillate fastest around the origin, so it gets its
  // own partition cell; without one, grid spheres of an off-origin molecule
  // sweep through that zone and the angular rule cannot follow psi_k there.
  bool origin_covered = false;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    if (centers[i] == origin) {
      scales[i] = std::max(scales[i], 1.0 / beta);
      origin_covered = true;
    }
  }
  if (!origin_covered) {
    centers.push_back(origin);
    scales.push_back(1.0 / beta);
  }
  // The grid must resolve the oscillation of the highest pair function, whose
  // node count grows with n_pair, so the radial order tracks it.
  const int radial_order = std::max(cfg.density_radial_order, n_pair + 16);
  const Grid3 grid = molecular_grid(centers, scales, radial_order, cfg.density_ntheta,
                                    cfg.partition_sharpness);
  const int nb = static_cast<int>(mol.basis.size());
  const std::int64_t npts = static_cast<std::int64_t>(grid.points.size());

  Vec sval(lm_count(lmax));
  Mat svals(lm_count(lmax), kChunk);
  Mat basis_vals(nb, kChunk);
  Mat psi;
  for (std::int64_t start = 0; start < npts; start += kChunk) {
    const int m = static_cast<int>(std::min<std::int64_t>(kChunk, npts - start));
    Vec radii(m);
    for (int j = 0; j < m; ++j) {
      const Vec3& pt = grid.points[start + j];
      const Vec3 d = pt - origin;
      const double r = d.norm();
      radii[j] = r;
      if (r == 0.0) {
        svals.col(j).setZero();
        svals(0, j) = sph_real(0, 0, 1.0, 0.0);
      } else {
        sph_real_all(lmax, d.z() / r, std::atan2(d.y(), d.x()), sval);
        svals.col(j).head(sval.size()) = sval;
      }
      for (int p = 0; p < nb; ++p) basis_vals(p, j) = sto_eval(mol.basis[p], pt);
    }
    const Mat u = mol.mo_coefficients.transpose() * basis_vals.leftCols(m);
    Mat weighted(n_mos, m);
    for (int i = 0; i < n_mos; ++i) {
      for (int j = 0; j < m; ++j) {
        weighted(i, j) = grid.weights[start + j] * u(i, j) * u(i, j);
      }
    }
    for (int L = 0; L <= lmax; ++L) {
      laguerre_orthonormal(beta, L, n_pair - 1, radii, psi);
      for (int M = -L; M <= L; ++M) {
        const Vec angular = svals.row(lm_pack(L, M)).head(m).transpose();
        for (int i = 0; i < n_mos; ++i) {
          out[i][L].col(M + L) +=
              psi * weighted.row(i).transpose().cwiseProduct(angular);
        }
      }
    }
  }
  return out;
}

// h_{i i'} = sum_{L M} J_A[i]^T block(L) J_B[i'] with the pair basis cut to
// the leading `rank` radial functions.
Mat pair_elements(const std::vector<PairProjection>& ja, const std::vector<PairProjection>& jb,
                  const KernelExpansion& table, int rank) {
  const int na = static_cast<int>(ja.size());
  const int nb = static_cast<int>(jb.size());
  Mat h = Mat::Zero(na, nb);
  for (int L = 0; L <= table.lmax(); ++L) {
    const Mat& block = table.block(L);
    for (int i = 0; i < na; ++i) {
      const Mat left = block.topLeftCorner(rank, rank) * ja[i][L].topRows(rank);
      for (int ip = 0; ip < nb; ++ip) {
        double s = 0.0;
        for (int M = 0; M < 2 * L + 1; ++M) {
          s += left.col(M).dot(jb[ip][L].col(M).head(rank));
        }
        h(i, ip) += s;
      }
    }
  }
  return h;
}

void check_scene(const Scene& scene) {
  validate_kernel(scene.kernel);
  if (!(scene.xi >= 0.0)) throw DomainError("scene: xi must be nonnegative");
  for (const Nucleus& na : scene.a.nuclei) {
    for (const Nucleus& nb : scene.b.nuclei) {
      if (na.position == nb.position) {
        throw SingularityError("scene: coincident nuclei between the two molecules");
      }
    }
  }
}

}  // namespace

Vec3 molecular_centroid(const Molecule& mol) {
  Vec3 sum = Vec3::Zero();
  if (!mol.nuclei.empty()) {
    for (const Nucleus& nuc : mol.nuclei) sum += nuc.position;
    return sum / static_cast<double>(mol.nuclei.size());
  }
  if (!mol.basis.empty()) {
    for (const StoParams& p : mol.basis) sum += p.center;
    return sum / static_cast<double>(mol.basis.size());
  }
  return sum;
}

Scene make_scene(Molecule a, Molecule b, const KernelIndex& q, double xi) {
  Scene scene;
  scene.origin = 0.5 * (molecular_centroid(a) + molecular_centroid(b));
  scene.a = std::move(a);
  scene.b = std::move(b);
  scene.kernel = q;
  scene.xi = xi;
  return scene;
}

double u1_nuclear(const Scene& scene) {
  check_scene(scene);
  double u1 = 0.0;
  for (const Nucleus& nb : scene.b.nuclei) {
    for (const Nucleus& na : scene.a.nuclei) {
      u1 += nb.charge * na.charge *
            kernel_eval({scene.kernel, scene.xi, na.position}, nb.position);
    }
  }
  return u1;
}

ElectronNuclearTerms u2_u3_electron_nuclear(const Scene& scene, const InteractionConfig& cfg) {
  check_scene(scene);
  ElectronNuclearTerms out;
  const auto attract = [&cfg](const Molecule& electrons, const Molecule& nuclei,
                              const KernelIndex& q, double xi, TermMeta& meta) {
    double sum = 0.0;
    for (const Nucleus& nuc : nuclei.nuclei) {
      for (int i = 0; i < electrons.occupancies.size(); ++i) {
        const IntegralValue hi =
            h_i_matrix_element(electrons, i, {q, xi, nuc.position}, cfg.integrals);
        sum += nuc.charge * electrons.occupancies[i] * hi.value;
        if (!hi.converged && meta.converged) {
          meta.converged = false;
          meta.message = hi.message;
        }
      }
    }
    return -2.0 * sum;
  };
  out.u2 = attract(scene.a, scene.b, scene.kernel, scene.xi, out.meta_u2);
  out.u3 = attract(scene.b, scene.a, scene.kernel, scene.xi, out.meta_u3);
  return out;
}

ElectronElectronTerm u4_electron_electron(const Scene& scene, const InteractionConfig& cfg) {
  check_scene(scene);
  ElectronElectronTerm out;
  const int na = static_cast<int>(scene.a.occupancies.size());
  const int nb = static_cast<int>(scene.b.occupancies.size());
  if (na == 0 || nb == 0) {
    out.meta.message = "a molecule has no electrons";
    return out;
  }
  const KernelExpansion table =
      expand_kernel_two_particle(scene.kernel, scene.xi, scene.origin, cfg.pair);
  const auto ja = density_projections(scene.a, scene.origin, table.beta(), table.n_pair(),
                                      table.lmax(), cfg);
  const auto jb = density_projections(scene.b, scene.origin, table.beta(), table.n_pair(),
                                      table.lmax(), cfg);
  const Mat h = pair_elements(ja, jb, table, table.n_pair());
  for (int i = 0; i < na; ++i) {
    for (int ip = 0; ip < nb; ++ip) {
      out.u4 += 4.0 * scene.a.occupancies[i] * scene.b.occupancies[ip] * h(i, ip);
    }
  }
  if (table.n_pair() >= 2) {
    const Mat h_half = pair_elements(ja, jb, table, table.n_pair() / 2);
    out.pair_tail = (h - h_half).cwiseAbs().maxCoeff();
  }
  out.meta.converged = out.pair_tail <= std::max(1e-6, 1e-3 * std::abs(out.u4));
  if (!out.meta.converged) {
    out.meta.message =
        "pair-basis tail " + std::to_string(out.pair_tail) + "; raise n_pair";
  }
  return out;
}

EnergyBreakdown interaction_energy(const Scene& scene, const InteractionConfig& cfg) {
  validate_molecule(scene.a);
  validate_molecule(scene.b);
  EnergyBreakdown e;
  e.u1 = u1_nuclear(scene);
  const ElectronNuclearTerms en = u2_u3_electron_nuclear(scene, cfg);
  e.u2 = en.u2;
  e.u3 = en.u3;
  e.meta_u2 = en.meta_u2;
  e.meta_u3 = en.meta_u3;
  const ElectronElectronTerm ee = u4_electron_electron(scene, cfg);
  e.u4 = ee.u4;
  e.meta_u4 = ee.meta;
  e.u4_pair_tail = ee.pair_tail;
  e.total = e.u1 + e.u2 + e.u3 + e.u4;
  return e;
}

}  // namespace nisto

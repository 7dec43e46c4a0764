#include "nisto/molecule.h"

#include <cmath>
#include <string>

namespace nisto {
namespace {

void check_orbital_index(const Molecule& mol, int i) {
  if (i < 0 || i >= mol.occupancies.size()) {
    throw DomainError("molecule: orbital index " + std::to_string(i) + " out of range");
  }
}

}  // namespace

double nuclear_charge(const Molecule& mol) {
  double z = 0.0;
  for (const Nucleus& nuc : mol.nuclei) z += nuc.charge;
  return z;
}

double electron_count(const Molecule& mol) { return 2.0 * mol.occupancies.sum(); }

Mat basis_gram(const std::vector<StoParams>& basis, const IntegralConfig& cfg) {
  const int nb = static_cast<int>(basis.size());
  Mat g(nb, nb);
  for (int p = 0; p < nb; ++p) {
    for (int q = p; q < nb; ++q) {
      g(p, q) = overlap_nisto(basis[p], basis[q], cfg).value;
      g(q, p) = g(p, q);
    }
  }
  return g;
}

void validate_molecule(const Molecule& mol, double norm_tol) {
  for (const Nucleus& nuc : mol.nuclei) {
    if (!(nuc.charge > 0.0)) throw DomainError("molecule: nuclear charges must be positive");
  }
  for (const StoParams& p : mol.basis) {
    validate_orbital(p.index);
    if (!(p.zeta > 0.0)) throw DomainError("molecule: basis scales must be positive");
  }
  const int nb = static_cast<int>(mol.basis.size());
  const int n = static_cast<int>(mol.occupancies.size());
  if (mol.n_closed < 0 || mol.n_open < 0 || mol.n_closed + mol.n_open != n) {
    throw SchemaError("molecule: n_closed + n_open must equal the occupancy count");
  }
  if (n > 0 && (mol.mo_coefficients.rows() != nb || mol.mo_coefficients.cols() != n)) {
    throw SchemaError("molecule: coefficient matrix must be basis x orbitals");
  }
  for (int i = 0; i < n; ++i) {
    const double f = mol.occupancies[i];
    if (!(f > 0.0) || f > 1.0) {
      throw DomainError("molecule: occupancy of orbital " + std::to_string(i) +
                        " must lie in (0, 1]");
    }
    if (i < mol.n_closed && f != 1.0) {
      throw DomainError("molecule: closed-shell orbital " + std::to_string(i) +
                        " must have occupancy 1");
    }
  }
  if (n == 0) return;
  const Mat g = basis_gram(mol.basis);
  for (int i = 0; i < n; ++i) {
    const double norm2 = mol.mo_coefficients.col(i).dot(g * mol.mo_coefficients.col(i));
    if (std::abs(norm2 - 1.0) > norm_tol) {
      throw DomainError("molecule: orbital " + std::to_string(i) + " has Gram norm " +
                        std::to_string(std::sqrt(std::abs(norm2))) +
                        "; renormalize or fix the coefficients");
    }
  }
}

Molecule renormalized(Molecule mol, const IntegralConfig& cfg) {
  if (mol.occupancies.size() == 0) return mol;
  const Mat g = basis_gram(mol.basis, cfg);
  for (int i = 0; i < mol.mo_coefficients.cols(); ++i) {
    const double norm2 = mol.mo_coefficients.col(i).dot(g * mol.mo_coefficients.col(i));
    if (!(norm2 > 0.0)) {
      throw DomainError("molecule: orbital " + std::to_string(i) + " has nonpositive Gram norm");
    }
    mol.mo_coefficients.col(i) /= std::sqrt(norm2);
  }
  return mol;
}

std::vector<MoProductTerm> mo_density_terms(const Molecule& mol, int i) {
  check_orbital_index(mol, i);
  const int nb = static_cast<int>(mol.basis.size());
  std::vector<MoProductTerm> terms;
  terms.reserve(static_cast<std::size_t>(nb) * nb);
  for (int p = 0; p < nb; ++p) {
    for (int pp = 0; pp < nb; ++pp) {
      const double w = mol.mo_coefficients(p, i) * mol.mo_coefficients(pp, i);
      if (w != 0.0) terms.push_back({p, pp, w});
    }
  }
  return terms;
}

IntegralValue h_i_matrix_element(const Molecule& mol, int i, const KernelParams& kernel,
                                 const IntegralConfig& cfg) {
  check_orbital_index(mol, i);
  const int nb = static_cast<int>(mol.basis.size());
  IntegralValue out;
  for (int p = 0; p < nb; ++p) {
    for (int pp = p; pp < nb; ++pp) {
      const double c = mol.mo_coefficients(p, i) * mol.mo_coefficients(pp, i);
      const double w = (p == pp) ? c : 2.0 * c;
      if (w == 0.0) continue;
      const IntegralValue term = kernel_matrix_element(mol.basis[p], mol.basis[pp], kernel, cfg);
      out.value += w * term.value;
      out.truncation_N = std::max(out.truncation_N, term.truncation_N);
      if (term.method == IntegralMethod::SeriesN) out.method = IntegralMethod::SeriesN;
      if (!term.converged && out.converged) {
        out.converged = false;
        out.message = "basis pair (" + std::to_string(p) + ", " + std::to_string(pp) +
                      "): " + term.message;
      }
    }
  }
  return out;
}

PotentialSample potential_at(const Molecule& mol, const Vec3& g, const KernelIndex& q, double xi,
                             const IntegralConfig& cfg) {
  validate_kernel(q);
  if (!(xi >= 0.0)) throw DomainError("potential_at: xi must be nonnegative");
  PotentialSample s;
  s.point = g;
  s.kernel = q;
  s.xi = xi;
  for (const Nucleus& nuc : mol.nuclei) {
    s.nuclear_part += nuc.charge * kernel_eval({q, xi, nuc.position}, g);
  }
  for (int i = 0; i < mol.occupancies.size(); ++i) {
    const IntegralValue hi = h_i_matrix_element(mol, i, {q, xi, g}, cfg);
    s.electronic_part += 2.0 * mol.occupancies[i] * hi.value;
    if (!hi.converged && s.converged) {
      s.converged = false;
      s.message = "orbital " + std::to_string(i) + ": " + hi.message;
    }
  }
  s.total = s.nuclear_part - s.electronic_part;
  return s;
}

std::vector<PotentialSample> potential_grid(const Molecule& mol, const std::vector<Vec3>& points,
                                            const KernelIndex& q, double xi,
                                            const IntegralConfig& cfg) {
  std::vector<PotentialSample> rows;
  rows.reserve(points.size());
  for (const Vec3& g : points) rows.push_back(potential_at(mol, g, q, xi, cfg));
  return rows;
}

}  // namespace nisto

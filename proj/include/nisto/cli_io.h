#pragma once

#include <iosfwd>
#include <string>

#include "nisto/interaction.h"

namespace nisto {

// Command-line configuration shared by the subcommands.  Resolved values are
// echoed into every JSON artifact so a result file identifies the run that
// produced it.
struct RunConfig {
  KernelIndex kernel;
  double xi = 0.0;
  int truncation_N = 12;
  int n_pair = 40;
  int lmax = 8;
  int alpha_tag = 1;  // orthonormal-family tag, one of {1, 0, -1, -2}
  double tol = 1e-6;
  std::uint64_t seed = 1;
  bool has_origin = false;
  Vec3 origin = Vec3::Zero();
  bool allow_warn = false;
  bool renormalize = false;
};

void validate_run_config(const RunConfig& cfg);

IntegralConfig to_integral_config(const RunConfig& cfg);
InteractionConfig to_interaction_config(const RunConfig& cfg);

// Molecule files are JSON documents
//   {name, harmonics: "real"|"complex",
//    nuclei: [{Z, xyz: [x, y, z]}],
//    basis:  [{center_idx, n_star, l, m, zeta}],
//    mos:    [{coeffs: [...], occupancy}]}
// with center_idx a 0-based nucleus index.  Complex-harmonic files carry
// coefficients as numbers or [re, im] pairs; they are rewritten onto the real
// harmonic basis at load, which requires every |m| > 0 entry to have a -m
// partner and the combined coefficients to come out real.  Schema violations
// throw SchemaError naming the offending field.
Molecule parse_molecule_json(const std::string& text, const std::string& source,
                             bool renormalize = false);
Molecule load_molecule(const std::string& path, bool renormalize = false);
std::string molecule_to_json(const Molecule& mol);

// Shortest decimal form that round-trips a double; all CSV cells use it so
// artifacts are byte-stable across runs.
std::string format_double(double v);

// Dispatches {integral, potential-grid, interact, convergence, oracle} and
// returns the process exit status: 0 success, 2 usage/input errors, 3 an
// unconverged result without --allow-warn.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nisto

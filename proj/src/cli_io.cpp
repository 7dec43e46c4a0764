#include "nisto/cli_io.h"

#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nisto/expansion.h"
#include "nisto/oracle.h"

namespace nisto {
namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;

bool same_point(const Vec3& u, const Vec3& v) {
  return u.x() == v.x() && u.y() == v.y() && u.z() == v.z();
}

// ---------------------------------------------------------------------------
// Molecule JSON schema
// ---------------------------------------------------------------------------

const json& require_field(const json& j, const char* key, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end()) throw SchemaError(where + ": missing field '" + key + "'");
  return *it;
}

double require_number(const json& j, const char* key, const std::string& where) {
  const json& v = require_field(j, key, where);
  if (!v.is_number()) throw SchemaError(where + "." + key + ": expected a number");
  return v.get<double>();
}

int require_int(const json& j, const char* key, const std::string& where) {
  const json& v = require_field(j, key, where);
  if (!v.is_number_integer()) throw SchemaError(where + "." + key + ": expected an integer");
  return v.get<int>();
}

Vec3 require_vec3(const json& j, const char* key, const std::string& where) {
  const json& v = require_field(j, key, where);
  if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() ||
      !v[2].is_number()) {
    throw SchemaError(where + "." + key + ": expected [x, y, z]");
  }
  return Vec3(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
}

std::complex<double> coefficient_entry(const json& v, const std::string& where, bool complex_ok) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (complex_ok && v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  throw SchemaError(where + (complex_ok ? ": expected a number or [re, im]"
                                        : ": expected a real number"));
}

// Rewrites MO coefficients given on complex harmonics Y_lm onto the real
// basis S_lm.  With this library's phase convention, for m > 0
//   Y_{l,+m} = (S_{l,+m} + i S_{l,-m}) / sqrt(2)
//   Y_{l,-m} = (S_{l,+m} - i S_{l,-m}) / sqrt(2)
// so the pair (c_{+m}, c_{-m}) maps to ((c_+ + c_-)/sqrt(2),
// i (c_+ - c_-)/sqrt(2)) on the same two basis slots.
Mat combine_complex_mos(const std::vector<StoParams>& basis, const std::vector<int>& center_idx,
                        const std::vector<std::vector<std::complex<double>>>& raw,
                        const std::string& source) {
  const int nb = static_cast<int>(basis.size());
  const int n = static_cast<int>(raw.size());
  std::vector<int> partner(nb, -1);
  for (int p = 0; p < nb; ++p) {
    if (basis[p].index.m == 0) continue;
    for (int q = 0; q < nb; ++q) {
      if (center_idx[q] == center_idx[p] && basis[q].index.l == basis[p].index.l &&
          basis[q].index.m == -basis[p].index.m &&
          basis[q].index.n_star == basis[p].index.n_star && basis[q].zeta == basis[p].zeta) {
        partner[p] = q;
        break;
      }
    }
    if (partner[p] < 0) {
      throw SchemaError(source + ": basis[" + std::to_string(p) +
                        "]: complex-harmonic entry with m != 0 needs a matching -m entry");
    }
  }

  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  Mat c = Mat::Zero(nb, n);
  for (int i = 0; i < n; ++i) {
    double scale = 1.0;
    for (int p = 0; p < nb; ++p) scale = std::max(scale, std::abs(raw[i][p]));
    for (int p = 0; p < nb; ++p) {
      const int m = basis[p].index.m;
      std::complex<double> a;
      if (m == 0) {
        a = raw[i][p];
      } else if (m > 0) {
        a = (raw[i][p] + raw[i][partner[p]]) * inv_sqrt2;
      } else {
        a = std::complex<double>(0.0, 1.0) * (raw[i][partner[p]] - raw[i][p]) * inv_sqrt2;
      }
      if (std::abs(a.imag()) > 1e-10 * scale) {
        throw SchemaError(source + ": mos[" + std::to_string(i) +
                          "]: complex-harmonic coefficients do not combine to a real orbital");
      }
      c(p, i) = a.real();
    }
  }
  return c;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// ---------------------------------------------------------------------------
// Flag parsing
// ---------------------------------------------------------------------------

struct RawFlags {
  std::string kernel = "0,0,0,0";
  int truncation = 12;
  int n_pair = 40;
  int lmax = 8;
  int alpha = 1;
  double tol = 1e-6;
  std::uint64_t seed = 1;
  std::string origin;
  bool allow_warn = false;
  bool renormalize = false;
};

void add_common_flags(CLI::App* sub, RawFlags& f) {
  sub->add_option("--kernel", f.kernel, "Kernel index and screening as mu,nu,sigma,xi")
      ->capture_default_str();
  sub->add_option("--truncation", f.truncation, "Series truncation N, 1..30")
      ->capture_default_str();
  sub->add_option("--n-pair", f.n_pair, "Radial size of the two-particle pair basis")
      ->capture_default_str();
  sub->add_option("--lmax", f.lmax, "Angular cutoff of the two-particle pair basis")
      ->capture_default_str();
  sub->add_option("--alpha", f.alpha, "Orthonormal-family tag: 1, 0, -1 or -2")
      ->capture_default_str();
  sub->add_option("--tol", f.tol, "Relative tolerance for series convergence")
      ->capture_default_str();
  sub->add_option("--seed", f.seed, "Seed for Monte Carlo oracles")->capture_default_str();
  sub->add_option("--origin", f.origin, "Expansion origin override as x,y,z");
  sub->add_flag("--allow-warn", f.allow_warn, "Exit 0 even when a result did not converge");
  sub->add_flag("--renormalize", f.renormalize,
                "Rescale MO columns to unit Gram norm when loading molecules");
}

RunConfig resolve_config(const RawFlags& f) {
  RunConfig cfg;
  {
    double mu = 0.0, xi = 0.0;
    int nu = 0, sigma = 0, used = -1;
    if (std::sscanf(f.kernel.c_str(), "%lf ,%d ,%d ,%lf %n", &mu, &nu, &sigma, &xi, &used) != 4 ||
        used != static_cast<int>(f.kernel.size())) {
      throw DomainError("--kernel: expected mu,nu,sigma,xi");
    }
    cfg.kernel = {mu, nu, sigma};
    cfg.xi = xi;
  }
  if (!f.origin.empty()) {
    double x = 0.0, y = 0.0, z = 0.0;
    int used = -1;
    if (std::sscanf(f.origin.c_str(), "%lf ,%lf ,%lf %n", &x, &y, &z, &used) != 3 ||
        used != static_cast<int>(f.origin.size())) {
      throw DomainError("--origin: expected x,y,z");
    }
    cfg.has_origin = true;
    cfg.origin = Vec3(x, y, z);
  }
  cfg.truncation_N = f.truncation;
  cfg.n_pair = f.n_pair;
  cfg.lmax = f.lmax;
  cfg.alpha_tag = f.alpha;
  cfg.tol = f.tol;
  cfg.seed = f.seed;
  cfg.allow_warn = f.allow_warn;
  cfg.renormalize = f.renormalize;
  validate_run_config(cfg);
  return cfg;
}

json config_json(const RunConfig& cfg) {
  json j;
  j["kernel"] = {{"mu_star", cfg.kernel.mu_star},
                 {"nu", cfg.kernel.nu},
                 {"sigma", cfg.kernel.sigma},
                 {"xi", cfg.xi}};
  j["truncation"] = cfg.truncation_N;
  j["n_pair"] = cfg.n_pair;
  j["lmax"] = cfg.lmax;
  j["alpha"] = cfg.alpha_tag;
  j["tol"] = cfg.tol;
  j["seed"] = cfg.seed;
  if (cfg.has_origin) {
    j["origin"] = {cfg.origin.x(), cfg.origin.y(), cfg.origin.z()};
  } else {
    j["origin"] = nullptr;
  }
  j["allow_warn"] = cfg.allow_warn;
  j["renormalize"] = cfg.renormalize;
  return j;
}

void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(out_path, std::ios::binary);
  if (!file) throw SchemaError(out_path + ": cannot open output file");
  file << text;
}

// ---------------------------------------------------------------------------
// Named integral cases shared by `integral` and `oracle`
// ---------------------------------------------------------------------------

struct NamedCase {
  const char* name;
  const char* summary;
  StoParams p1;
  StoParams p1p;
  Vec3 g;
};

const std::vector<NamedCase>& case_registry() {
  static const std::vector<NamedCase> cases = {
      {"one_center", "both orbitals and the kernel on one center",
       {{2.5, 1, 0}, 1.2, Vec3(0, 0, 0)}, {{1.8, 1, 0}, 0.9, Vec3(0, 0, 0)}, Vec3(0, 0, 0)},
      {"two_center_kernel", "orbitals on separate centers, kernel on the ket center",
       {{1.0, 0, 0}, 1.2, Vec3(0, 0, 0)}, {{1.5, 0, 0}, 0.9, Vec3(0, 0, 1.5)}, Vec3(0, 0, 1.5)},
      {"two_center_orbitals", "orbitals sharing a center, kernel displaced",
       {{1.0, 0, 0}, 1.1, Vec3(0, 0, 0)}, {{1.3, 0, 0}, 0.7, Vec3(0, 0, 0)}, Vec3(0, 0, 2)},
      {"three_center_demo", "orbitals on two centers, kernel on a third",
       {{1.0, 0, 0}, 1.0, Vec3(0, 0, 0)}, {{1.0, 0, 0}, 1.0, Vec3(0, 0, 2)}, Vec3(0, 0, 3)},
  };
  return cases;
}

const NamedCase& find_case(const std::string& name) {
  std::string known;
  for (const NamedCase& c : case_registry()) {
    if (name == c.name) return c;
    known += std::string(known.empty() ? "" : ", ") + c.name;
  }
  throw DomainError("--case: unknown case '" + name + "' (known: " + known +
                    ", pair_repulsion_mc)");
}

OracleResult oracle_triple(const NamedCase& c, const KernelParams& kernel, std::uint64_t seed) {
  std::vector<Vec3> centers;
  std::vector<double> scales;
  const auto add = [&](const Vec3& at, double scale) {
    for (std::size_t i = 0; i < centers.size(); ++i) {
      if (same_point(centers[i], at)) {
        scales[i] = std::max(scales[i], scale);
        return;
      }
    }
    centers.push_back(at);
    scales.push_back(scale);
  };
  add(c.p1.center, 1.0 / c.p1.zeta);
  add(c.p1p.center, 1.0 / c.p1p.zeta);
  add(kernel.center, kernel.xi > 0.0 ? 1.0 / kernel.xi : 1.0);

  OracleConfig oc;
  oc.seed = seed;
  const StoParams p1 = c.p1;
  const StoParams p1p = c.p1p;
  return integrate_3d(
      [&p1, &p1p, &kernel](const Vec3& x) {
        return sto_eval(p1, x) * sto_eval(p1p, x) * kernel_eval(kernel, x);
      },
      centers, oc, scales);
}

std::string method_label(IntegralMethod m) {
  switch (m) {
    case IntegralMethod::ClosedForm: return "closed_form";
    case IntegralMethod::SeriesN: return "series";
    case IntegralMethod::Oracle: return "oracle";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int run_integral(const RunConfig& cfg, const std::string& case_name, std::ostream& out,
                 std::ostream& err) {
  const NamedCase& c = find_case(case_name);
  const KernelParams kernel{cfg.kernel, cfg.xi, c.g};
  const IntegralConfig ic = to_integral_config(cfg);

  std::vector<std::pair<std::string, IntegralValue>> rows;
  const bool three_distinct = !same_point(c.p1.center, c.p1p.center) &&
                              !same_point(c.p1p.center, c.g) && !same_point(c.p1.center, c.g);
  if (three_distinct) {
    rows.emplace_back("series_about_bra",
                      three_center_integral(c.p1, c.p1p, kernel, ThreeCenterPath::AboutBra, ic));
    rows.emplace_back(
        "series_about_kernel",
        three_center_integral(c.p1, c.p1p, kernel, ThreeCenterPath::AboutKernel, ic));
  } else {
    const IntegralValue v = kernel_matrix_element(c.p1, c.p1p, kernel, ic);
    rows.emplace_back(method_label(v.method), v);
  }
  const OracleResult orc = oracle_triple(c, kernel, cfg.seed);

  char line[160];
  out << "case: " << c.name << " (" << c.summary << ")\n";
  std::snprintf(line, sizeof line,
                "bra:    n*=%g l=%d m=%d zeta=%g at (%g, %g, %g)\n", c.p1.index.n_star,
                c.p1.index.l, c.p1.index.m, c.p1.zeta, c.p1.center.x(), c.p1.center.y(),
                c.p1.center.z());
  out << line;
  std::snprintf(line, sizeof line,
                "ket:    n*=%g l=%d m=%d zeta=%g at (%g, %g, %g)\n", c.p1p.index.n_star,
                c.p1p.index.l, c.p1p.index.m, c.p1p.zeta, c.p1p.center.x(), c.p1p.center.y(),
                c.p1p.center.z());
  out << line;
  std::snprintf(line, sizeof line, "kernel: mu*=%g nu=%d sigma=%d xi=%g at (%g, %g, %g)\n",
                cfg.kernel.mu_star, cfg.kernel.nu, cfg.kernel.sigma, cfg.xi, c.g.x(), c.g.y(),
                c.g.z());
  out << line;
  std::snprintf(line, sizeof line, "%-22s %-24s %-14s %s\n", "method", "value", "vs_oracle",
                "converged");
  out << line;

  bool all_converged = true;
  for (const auto& [label, v] : rows) {
    std::snprintf(line, sizeof line, "%-22s %-24.15e %-14.3e %s\n", label.c_str(), v.value,
                  v.value - orc.value, v.converged ? "yes" : "no");
    out << line;
    all_converged = all_converged && v.converged;
  }
  std::snprintf(line, sizeof line, "%-22s %-24.15e %-14s %s (err est %.1e)\n", "oracle_3d",
                orc.value, "--", orc.converged ? "yes" : "no", orc.error_estimate);
  out << line;
  all_converged = all_converged && orc.converged;

  if (!all_converged && !cfg.allow_warn) {
    err << "error: a method did not converge (rerun with --allow-warn to ignore)\n";
    return 3;
  }
  return 0;
}

int run_oracle(const RunConfig& cfg, const std::string& case_name, const std::string& out_path,
               std::ostream& out, std::ostream& err) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["command"] = "oracle";
  doc["config"] = config_json(cfg);
  doc["case"] = case_name;

  OracleResult res;
  if (case_name == "pair_repulsion_mc") {
    const StoParams a{{1.0, 0, 0}, 1.0, Vec3(0, 0, 0)};
    const StoParams b{{1.0, 0, 0}, 1.0, Vec3(0, 0, 2)};
    const KernelParams kernel{cfg.kernel, cfg.xi, Vec3(0, 0, 0)};
    OracleConfig oc;
    oc.seed = cfg.seed;
    res = integrate_6d_mc(
        [&kernel](const Vec3& x1, const Vec3& x2) { return kernel_eval(kernel, x1 - x2); }, a, b,
        oc);
  } else {
    const NamedCase& c = find_case(case_name);
    res = oracle_triple(c, KernelParams{cfg.kernel, cfg.xi, c.g}, cfg.seed);
  }
  doc["value"] = res.value;
  doc["error_estimate"] = res.error_estimate;
  doc["evaluations"] = res.evaluations;
  doc["converged"] = res.converged;
  if (!res.message.empty()) doc["message"] = res.message;

  emit(doc.dump(2) + "\n", out_path, out);
  if (!res.converged && !cfg.allow_warn) {
    err << "error: oracle did not converge (rerun with --allow-warn to ignore)\n";
    return 3;
  }
  return 0;
}

struct GridAxis {
  double lo = 0.0;
  double hi = 0.0;
  int n = 1;
};

GridAxis parse_axis(const std::string& text, const char* flag) {
  GridAxis axis;
  int used = -1;
  if (std::sscanf(text.c_str(), "%lf ,%lf ,%d %n", &axis.lo, &axis.hi, &axis.n, &used) != 3 ||
      used != static_cast<int>(text.size())) {
    throw DomainError(std::string(flag) + ": expected lo,hi,count");
  }
  if (axis.n < 1) throw DomainError(std::string(flag) + ": count must be at least 1");
  if (axis.n == 1 && axis.hi != axis.lo) {
    throw DomainError(std::string(flag) + ": a single-point axis needs lo == hi");
  }
  return axis;
}

std::vector<double> axis_values(const GridAxis& axis) {
  std::vector<double> v(axis.n);
  for (int i = 0; i < axis.n; ++i) {
    v[i] = axis.n == 1 ? axis.lo : axis.lo + (axis.hi - axis.lo) * i / (axis.n - 1);
  }
  return v;
}

int run_potential_grid(const RunConfig& cfg, const std::string& molecule_path,
                       const GridAxis& gx, const GridAxis& gy, const GridAxis& gz,
                       const std::string& out_path, std::ostream& out, std::ostream& err) {
  const Molecule mol = load_molecule(molecule_path, cfg.renormalize);

  std::vector<Vec3> points;
  points.reserve(static_cast<std::size_t>(gx.n) * gy.n * gz.n);
  for (const double x : axis_values(gx)) {
    for (const double y : axis_values(gy)) {
      for (const double z : axis_values(gz)) points.emplace_back(x, y, z);
    }
  }

  const std::vector<PotentialSample> samples =
      potential_grid(mol, points, cfg.kernel, cfg.xi, to_integral_config(cfg));

  std::string csv = "x,y,z,nuclear,electronic,total\n";
  int unconverged = 0;
  for (const PotentialSample& s : samples) {
    csv += format_double(s.point.x()) + "," + format_double(s.point.y()) + "," +
           format_double(s.point.z()) + "," + format_double(s.nuclear_part) + "," +
           format_double(s.electronic_part) + "," + format_double(s.total) + "\n";
    if (!s.converged) ++unconverged;
  }
  emit(csv, out_path, out);

  if (unconverged > 0 && !cfg.allow_warn) {
    err << "error: " << unconverged
        << " grid point(s) did not converge (rerun with --allow-warn to ignore)\n";
    return 3;
  }
  return 0;
}

int run_interact(const RunConfig& cfg, const std::string& path_a, const std::string& path_b,
                 const std::string& out_path, std::ostream& out, std::ostream& err) {
  Molecule a = load_molecule(path_a, cfg.renormalize);
  Molecule b = load_molecule(path_b, cfg.renormalize);

  Scene scene = make_scene(std::move(a), std::move(b), cfg.kernel, cfg.xi);
  if (cfg.has_origin) scene.origin = cfg.origin;

  const EnergyBreakdown e = interaction_energy(scene, to_interaction_config(cfg));

  RunConfig resolved = cfg;
  resolved.has_origin = true;
  resolved.origin = scene.origin;

  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["command"] = "interact";
  doc["config"] = config_json(resolved);
  doc["molecule_a"] = {{"name", scene.a.name},
                       {"nuclear_charge", nuclear_charge(scene.a)},
                       {"electron_count", electron_count(scene.a)}};
  doc["molecule_b"] = {{"name", scene.b.name},
                       {"nuclear_charge", nuclear_charge(scene.b)},
                       {"electron_count", electron_count(scene.b)}};
  doc["energy"] = {{"u1", e.u1}, {"u2", e.u2}, {"u3", e.u3}, {"u4", e.u4}, {"total", e.total}};

  const bool converged =
      e.meta_u2.converged && e.meta_u3.converged && e.meta_u4.converged;
  json messages = json::array();
  for (const std::string& m : {e.meta_u2.message, e.meta_u3.message, e.meta_u4.message}) {
    if (!m.empty()) messages.push_back(m);
  }
  doc["convergence"] = {{"converged", converged},
                        {"u4_pair_tail", e.u4_pair_tail},
                        {"messages", messages}};

  emit(doc.dump(2) + "\n", out_path, out);

  if (!converged && !cfg.allow_warn) {
    err << "error: an interaction term did not converge (rerun with --allow-warn to ignore)\n";
    return 3;
  }
  return 0;
}

int run_convergence(const RunConfig& cfg, const std::string& range, double separation,
                    double zeta1, double zeta2, const std::string& out_path, std::ostream& out) {
  int lo = 0, hi = 0, used = -1;
  if (std::sscanf(range.c_str(), "%d ..%d %n", &lo, &hi, &used) != 2 ||
      used != static_cast<int>(range.size())) {
    throw DomainError("--N: expected a range like 2..16");
  }
  if (lo < 1 || hi < lo || hi > 30) throw DomainError("--N: range must lie in 1..30");
  if (!(separation > 0.0)) throw DomainError("--separation: must be positive");
  if (!(zeta1 > 0.0) || !(zeta2 > 0.0)) throw DomainError("--zeta1/--zeta2: must be positive");

  const StoParams p1{{1.0, 0, 0}, zeta1, Vec3(0, 0, 0)};
  const StoParams p1p{{1.0, 0, 0}, zeta2, Vec3(0, 0, separation)};
  const Vec3 g = cfg.has_origin ? cfg.origin : Vec3(0, 0, separation / 2.0);

  const Vec curve = residual_curve(p1, p1p, g, hi, to_integral_config(cfg).expansion);

  std::string csv = "N,residual_l2\n";
  for (int n = lo; n <= hi; ++n) {
    csv += std::to_string(n) + "," + format_double(curve[n - 1]) + "\n";
  }
  emit(csv, out_path, out);
  return 0;
}

}  // namespace

// ---------------------------------------------------------------------------
// Public surface
// ---------------------------------------------------------------------------

void validate_run_config(const RunConfig& cfg) {
  validate_kernel(cfg.kernel);
  if (!(cfg.xi >= 0.0)) throw DomainError("--kernel: xi must be nonnegative");
  if (cfg.truncation_N < 1 || cfg.truncation_N > 30) {
    throw DomainError("--truncation: must lie in [1, 30]");
  }
  if (cfg.n_pair < 1 || cfg.n_pair > 200) throw DomainError("--n-pair: must lie in [1, 200]");
  if (cfg.lmax < 0 || cfg.lmax > 30) throw DomainError("--lmax: must lie in [0, 30]");
  if (cfg.alpha_tag > 1 || cfg.alpha_tag < -2) {
    throw DomainError("--alpha: must be one of 1, 0, -1, -2");
  }
  if (!(cfg.tol > 0.0)) throw DomainError("--tol: must be positive");
}

IntegralConfig to_integral_config(const RunConfig& cfg) {
  IntegralConfig ic;
  ic.truncation_N = cfg.truncation_N;
  ic.series_rel_tol = cfg.tol;
  return ic;
}

InteractionConfig to_interaction_config(const RunConfig& cfg) {
  InteractionConfig xc;
  xc.integrals = to_integral_config(cfg);
  xc.pair.n_pair = cfg.n_pair;
  xc.pair.lmax = cfg.lmax;
  return xc;
}

Molecule parse_molecule_json(const std::string& text, const std::string& source,
                             bool renormalize) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(source + ": " + e.what());
  }
  if (!doc.is_object()) throw SchemaError(source + ": expected a JSON object");

  Molecule mol;
  mol.name = doc.value("name", std::string{});
  const std::string harmonics = doc.value("harmonics", std::string{"real"});
  if (harmonics != "real" && harmonics != "complex") {
    throw SchemaError(source + ": harmonics must be \"real\" or \"complex\"");
  }

  const json& nuclei = require_field(doc, "nuclei", source);
  if (!nuclei.is_array()) throw SchemaError(source + ": nuclei: expected an array");
  for (std::size_t i = 0; i < nuclei.size(); ++i) {
    const std::string where = source + ": nuclei[" + std::to_string(i) + "]";
    const double z = require_number(nuclei[i], "Z", where);
    if (!(z > 0.0)) throw SchemaError(where + ".Z: must be positive");
    mol.nuclei.push_back({z, require_vec3(nuclei[i], "xyz", where)});
  }
  if (mol.nuclei.empty()) throw SchemaError(source + ": nuclei: must not be empty");

  const json& basis = require_field(doc, "basis", source);
  if (!basis.is_array()) throw SchemaError(source + ": basis: expected an array");
  std::vector<int> center_idx;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const std::string where = source + ": basis[" + std::to_string(i) + "]";
    const int ci = require_int(basis[i], "center_idx", where);
    if (ci < 0 || ci >= static_cast<int>(mol.nuclei.size())) {
      throw SchemaError(where + ".center_idx: no nucleus with index " + std::to_string(ci));
    }
    StoParams p;
    p.index.n_star = require_number(basis[i], "n_star", where);
    p.index.l = require_int(basis[i], "l", where);
    p.index.m = require_int(basis[i], "m", where);
    p.zeta = require_number(basis[i], "zeta", where);
    p.center = mol.nuclei[ci].position;
    try {
      validate_orbital(p.index);
      if (!(p.zeta > 0.0)) throw DomainError("zeta must be positive");
    } catch (const NistoError& e) {
      throw SchemaError(where + ": " + e.what());
    }
    mol.basis.push_back(p);
    center_idx.push_back(ci);
  }

  const json& mos = require_field(doc, "mos", source);
  if (!mos.is_array()) throw SchemaError(source + ": mos: expected an array");
  const int n = static_cast<int>(mos.size());
  const int nb = static_cast<int>(mol.basis.size());
  std::vector<std::vector<std::complex<double>>> raw(n);
  mol.occupancies = Vec::Zero(n);
  for (int i = 0; i < n; ++i) {
    const std::string where = source + ": mos[" + std::to_string(i) + "]";
    const json& coeffs = require_field(mos[i], "coeffs", where);
    if (!coeffs.is_array() || static_cast<int>(coeffs.size()) != nb) {
      throw SchemaError(where + ".coeffs: expected an array of length " + std::to_string(nb));
    }
    for (int p = 0; p < nb; ++p) {
      raw[i].push_back(coefficient_entry(coeffs[p],
                                         where + ".coeffs[" + std::to_string(p) + "]",
                                         harmonics == "complex"));
    }
    const double f = require_number(mos[i], "occupancy", where);
    if (!(f > 0.0) || f > 1.0) throw SchemaError(where + ".occupancy: must lie in (0, 1]");
    mol.occupancies[i] = f;
  }
  mol.n_closed = 0;
  while (mol.n_closed < n && mol.occupancies[mol.n_closed] == 1.0) ++mol.n_closed;
  mol.n_open = n - mol.n_closed;

  if (harmonics == "complex") {
    mol.mo_coefficients = combine_complex_mos(mol.basis, center_idx, raw, source);
  } else {
    mol.mo_coefficients = Mat::Zero(nb, n);
    for (int i = 0; i < n; ++i) {
      for (int p = 0; p < nb; ++p) mol.mo_coefficients(p, i) = raw[i][p].real();
    }
  }

  if (renormalize && n > 0) mol = renormalized(std::move(mol));
  validate_molecule(mol);
  return mol;
}

Molecule load_molecule(const std::string& path, bool renormalize) {
  return parse_molecule_json(slurp(path), path, renormalize);
}

std::string molecule_to_json(const Molecule& mol) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["name"] = mol.name;
  doc["harmonics"] = "real";
  doc["nuclei"] = json::array();
  for (const Nucleus& nuc : mol.nuclei) {
    doc["nuclei"].push_back(
        {{"Z", nuc.charge}, {"xyz", {nuc.position.x(), nuc.position.y(), nuc.position.z()}}});
  }
  doc["basis"] = json::array();
  for (const StoParams& p : mol.basis) {
    int ci = -1;
    for (std::size_t b = 0; b < mol.nuclei.size(); ++b) {
      if (same_point(mol.nuclei[b].position, p.center)) {
        ci = static_cast<int>(b);
        break;
      }
    }
    if (ci < 0) throw SchemaError("molecule_to_json: basis center is not a nucleus position");
    doc["basis"].push_back({{"center_idx", ci},
                            {"n_star", p.index.n_star},
                            {"l", p.index.l},
                            {"m", p.index.m},
                            {"zeta", p.zeta}});
  }
  doc["mos"] = json::array();
  for (int i = 0; i < mol.occupancies.size(); ++i) {
    json coeffs = json::array();
    for (int p = 0; p < mol.mo_coefficients.rows(); ++p) {
      coeffs.push_back(mol.mo_coefficients(p, i));
    }
    doc["mos"].push_back({{"coeffs", coeffs}, {"occupancy", mol.occupancies[i]}});
  }
  return doc.dump(2) + "\n";
}

std::string format_double(double v) {
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multicenter molecular integrals over Slater-type orbitals with noninteger "
               "principal indices"};
  app.require_subcommand(1);

  RawFlags f_integral, f_potential, f_interact, f_convergence, f_oracle;

  CLI::App* s_integral =
      app.add_subcommand("integral", "Compute one named integral with every method");
  std::string integral_case = "three_center_demo";
  s_integral->add_option("--case", integral_case, "one_center, two_center_kernel, "
                                                  "two_center_orbitals or three_center_demo")
      ->capture_default_str();
  add_common_flags(s_integral, f_integral);

  CLI::App* s_potential = app.add_subcommand(
      "potential-grid", "Electrostatic potential of a molecule on a rectangular grid (CSV)");
  std::string potential_molecule;
  std::string gx = "0,0,1", gy = "0,0,1", gz = "0,0,1";
  std::string potential_out;
  s_potential->add_option("molecule", potential_molecule, "Molecule JSON file")->required();
  s_potential->add_option("--grid-x", gx, "Axis spec lo,hi,count")->capture_default_str();
  s_potential->add_option("--grid-y", gy, "Axis spec lo,hi,count")->capture_default_str();
  s_potential->add_option("--grid-z", gz, "Axis spec lo,hi,count")->capture_default_str();
  s_potential->add_option("--out", potential_out, "Write CSV here instead of stdout");
  add_common_flags(s_potential, f_potential);

  CLI::App* s_interact = app.add_subcommand(
      "interact", "Interaction energy U1 + U2 + U3 + U4 of two molecules (JSON)");
  std::string interact_a, interact_b, interact_out;
  s_interact->add_option("molecule_a", interact_a, "First molecule JSON file")->required();
  s_interact->add_option("molecule_b", interact_b, "Second molecule JSON file")->required();
  s_interact->add_option("--out", interact_out, "Write JSON here instead of stdout");
  add_common_flags(s_interact, f_interact);

  CLI::App* s_convergence = app.add_subcommand(
      "convergence", "Residual of a two-center product expansion versus truncation (CSV)");
  std::string conv_range = "2..16", convergence_out;
  double conv_separation = 2.0, conv_zeta1 = 1.0, conv_zeta2 = 1.0;
  s_convergence->add_option("--N", conv_range, "Truncation range like 2..16")
      ->capture_default_str();
  s_convergence->add_option("--separation", conv_separation, "Distance between the 1s centers")
      ->capture_default_str();
  s_convergence->add_option("--zeta1", conv_zeta1, "Scale of the first 1s orbital")
      ->capture_default_str();
  s_convergence->add_option("--zeta2", conv_zeta2, "Scale of the second 1s orbital")
      ->capture_default_str();
  s_convergence->add_option("--out", convergence_out, "Write CSV here instead of stdout");
  add_common_flags(s_convergence, f_convergence);

  CLI::App* s_oracle = app.add_subcommand(
      "oracle", "Brute-force reference value for a named integral case (JSON)");
  std::string oracle_case = "three_center_demo", oracle_out;
  s_oracle->add_option("--case", oracle_case, "A named integral case or pair_repulsion_mc")
      ->capture_default_str();
  s_oracle->add_option("--out", oracle_out, "Write JSON here instead of stdout");
  add_common_flags(s_oracle, f_oracle);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (s_integral->parsed()) {
      return run_integral(resolve_config(f_integral), integral_case, out, err);
    }
    if (s_potential->parsed()) {
      return run_potential_grid(resolve_config(f_potential), potential_molecule,
                                parse_axis(gx, "--grid-x"), parse_axis(gy, "--grid-y"),
                                parse_axis(gz, "--grid-z"), potential_out, out, err);
    }
    if (s_interact->parsed()) {
      return run_interact(resolve_config(f_interact), interact_a, interact_b, interact_out, out,
                          err);
    }
    if (s_convergence->parsed()) {
      return run_convergence(resolve_config(f_convergence), conv_range, conv_separation,
                             conv_zeta1, conv_zeta2, convergence_out, out);
    }
    if (s_oracle->parsed()) {
      return run_oracle(resolve_config(f_oracle), oracle_case, oracle_out, out, err);
    }
  } catch (const NistoError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace nisto

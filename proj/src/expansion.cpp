#include "nisto/expansion.h"

#include <cmath>
#include <cstdio>
#include <map>
#include <string>

#include "nisto/gaunt.h"
#include "nisto/quadrature.h"
#include "nisto/special.h"

namespace nisto {

int pyramid_size(int truncation_N) {
  if (truncation_N < 1) throw DomainError("pyramid_size: truncation must be at least 1");
  return truncation_N * (truncation_N + 1) * (2 * truncation_N + 1) / 6;
}

int pyramid_index(int n, int l, int m) {
  if (n < 1 || l < 0 || l > n - 1 || std::abs(m) > l) {
    throw DomainError("pyramid_index: need n >= 1, l <= n-1, |m| <= l");
  }
  return (n - 1) * n * (2 * n - 1) / 6 + l * l + l + m;
}

OneCenterDensity expand_one_center_product(const OrbitalIndex& p1, const OrbitalIndex& p1p,
                                           double zeta1, double zeta1p) {
  validate_orbital(p1);
  validate_orbital(p1p);
  if (!(zeta1 > 0.0) || !(zeta1p > 0.0)) {
    throw DomainError("expand_one_center_product: screening constants must be positive");
  }
  OneCenterDensity den;
  den.z = zeta1 + zeta1p;
  const double n_star = p1.n_star + p1p.n_star - 1.0;
  const double norm_ratio_log = std::log(sto_norm(p1.n_star, zeta1)) +
                                std::log(sto_norm(p1p.n_star, zeta1p));
  for (int l = std::abs(p1.l - p1p.l); l <= p1.l + p1p.l; ++l) {
    for (int m = -l; m <= l; ++m) {
      const double g = gaunt_real(p1.l, p1.m, p1p.l, p1p.m, l, m);
      if (g == 0.0) continue;
      const double w =
          std::exp(norm_ratio_log - std::log(sto_norm(n_star, den.z))) * g / std::sqrt(four_pi);
      den.terms.push_back({{n_star, l, m}, w});
    }
  }
  return den;
}

Mat pyramid_gram_block(int truncation_N, int l) {
  const int sz = truncation_N - l;
  if (sz < 1) throw DomainError("pyramid_gram_block: need l <= N - 1");
  Mat G(sz, sz);
  for (int i = 0; i < sz; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double n = l + 1 + i;
      const double np = l + 1 + j;
      const double v = std::exp(log_gamma(n + np + 1.0) - 0.5 * log_gamma(2.0 * n + 1.0) -
                                0.5 * log_gamma(2.0 * np + 1.0));
      G(i, j) = v;
      G(j, i) = v;
    }
  }
  return G;
}

Vec laguerre_radial_moments(double z, int L, int kmax, double extra_decay,
                            const std::function<double(double)>& f) {
  if (!(z > 0.0)) throw DomainError("laguerre_radial_moments: scale must be positive");
  if (kmax < 0 || L < 0) throw DomainError("laguerre_radial_moments: bad indices");
  const int order = std::max(20, kmax + 8);
  Vec r, wr;
  radial_rule(order, (L + kmax + 2.0) / (z + std::max(0.0, extra_decay)), r, wr);
  Mat psi;
  laguerre_orthonormal(z, L, kmax, r, psi);
  Vec g(r.size());
  for (Eigen::Index i = 0; i < r.size(); ++i) g[i] = wr[i] * r[i] * r[i] * f(r[i]);
  return psi * g;
}

Vec pyramid_projections(double z, const Vec3& center, int truncation_N,
                        const std::vector<Vec3>& points, const Vec& weights,
                        const std::function<double(const Vec3&)>& f) {
  if (!(z > 0.0)) throw DomainError("pyramid_projections: scale must be positive");
  const int N = truncation_N;
  Vec bt = Vec::Zero(pyramid_size(N));
  const int lm_total = lm_count(N - 1);

  constexpr Eigen::Index chunk = 4096;
  const Eigen::Index npts = Eigen::Index(points.size());
  Mat svals(lm_total, chunk);
  Vec point_svals;
  Vec radii(chunk), wf(chunk), scaled(chunk);
  Mat psi;
  for (Eigen::Index start = 0; start < npts; start += chunk) {
    const Eigen::Index len = std::min(chunk, npts - start);
    for (Eigen::Index i = 0; i < len; ++i) {
      const Vec3 d = points[size_t(start + i)] - center;
      const double r = d.norm();
      radii[i] = r;
      if (r == 0.0) {
        wf[i] = 0.0;
        svals.col(i).setZero();
        continue;
      }
      wf[i] = weights[start + i] * f(points[size_t(start + i)]);
      const double cos_theta = d.z() / r;
      const double phi = (d.x() == 0.0 && d.y() == 0.0) ? 0.0 : std::atan2(d.y(), d.x());
      sph_real_all(N - 1, cos_theta, phi, point_svals);
      svals.col(i) = point_svals;
    }
    for (int l = 0; l <= N - 1; ++l) {
      laguerre_orthonormal(z, l, N - 1 - l, radii.head(len), psi);
      for (int m = -l; m <= l; ++m) {
        scaled.head(len) = wf.head(len).cwiseProduct(svals.row(lm_pack(l, m)).head(len).transpose());
        const Vec block = psi.leftCols(len) * scaled.head(len);
        for (int k = 0; k <= N - 1 - l; ++k) bt[pyramid_index(k + l + 1, l, m)] += block[k];
      }
    }
  }
  return bt;
}

namespace {

// Expansion of the unit-norm STO radial parts R_n(z), n = l+1..N, in the
// orthonormal functions psi_k(z, L=l): C(row n-l-1, col k) = <psi_k | R_n>.
Mat chi_in_laguerre(double z, int l, int N) {
  const int sz = N - l;
  Mat C(sz, sz);
  for (int i = 0; i < sz; ++i) {
    const double n = l + 1 + i;
    const Vec m = laguerre_radial_moments(z, l, sz - 1, z, [&](double r) {
      return sto_radial(n, z, r);
    });
    C.row(i) = m.transpose();
  }
  return C;
}

struct BlockSolve {
  Vec w;
  double condition = 0.0;
  bool regularized = false;
};

// Coefficients in the chi basis from the chi-basis projections b, solving
// G w = b per (l, m) block through the Gram eigendecomposition.
BlockSolve solve_pyramid(int N, const Vec& b, double condition_limit) {
  BlockSolve out;
  out.w = Vec::Zero(pyramid_size(N));
  for (int l = 0; l <= N - 1; ++l) {
    const Mat G = pyramid_gram_block(N, l);
    Eigen::SelfAdjointEigenSolver<Mat> es(G);
    const Vec ev = es.eigenvalues();
    const double emax = ev.maxCoeff();
    const double emin = ev.minCoeff();
    const double cond = emax / std::max(emin, 1e-300);
    out.condition = std::max(out.condition, cond);
    const bool reg = !(emin > 0.0) || cond > condition_limit;
    out.regularized = out.regularized || reg;
    const double lambda = reg ? 1e-14 * emax : 0.0;
    const int sz = N - l;
    Vec bb(sz);
    for (int m = -l; m <= l; ++m) {
      for (int k = 0; k < sz; ++k) bb[k] = b[pyramid_index(l + 1 + k, l, m)];
      const Vec y = es.eigenvectors().transpose() * bb;
      const Vec ww = es.eigenvectors() * (y.array() / (ev.array() + lambda)).matrix();
      for (int k = 0; k < sz; ++k) out.w[pyramid_index(l + 1 + k, l, m)] = ww[k];
    }
  }
  return out;
}

struct ProjectionData {
  Vec bt;  // orthonormal-basis projections, pyramid layout
  double norm2 = 0.0;
};

ProjectionData project_on_grid(const StoParams& bra, const StoParams& ket, const Vec3& g, double z,
                               int N, const std::vector<Vec3>& points, const Vec& weights) {
  ProjectionData data;
  const auto density = [&](const Vec3& p) { return sto_eval(bra, p) * sto_eval(ket, p); };
  data.bt = pyramid_projections(z, g, N, points, weights, density);
  data.norm2 = block_sum(std::int64_t(points.size()), [&](std::int64_t i) {
    const double d = density(points[i]);
    return weights[i] * d * d;
  });
  return data;
}

ProjectionData project_same_center(const StoParams& bra, const StoParams& ket, int N) {
  const OneCenterDensity den =
      expand_one_center_product(bra.index, ket.index, bra.zeta, ket.zeta);
  ProjectionData data;
  data.bt = Vec::Zero(pyramid_size(N));
  for (const OneCenterTerm& t : den.terms) {
    const Vec m = laguerre_radial_moments(den.z, t.index.l, N - 1 - t.index.l, den.z,
                                          [&](double r) {
                                            return sto_radial(t.index.n_star, den.z, r);
                                          });
    for (int k = 0; k <= N - 1 - t.index.l; ++k) {
      data.bt[pyramid_index(k + t.index.l + 1, t.index.l, t.index.m)] += t.weight * m[k];
    }
    for (const OneCenterTerm& u : den.terms) {
      if (t.index.l != u.index.l || t.index.m != u.index.m) continue;
      data.norm2 += t.weight * u.weight * sto_inner_same_center(t.index, den.z, u.index, den.z);
    }
  }
  return data;
}

int default_ntheta(int N) { return std::max(16, N + 8); }

std::string table_key(const StoParams& p1, const StoParams& p1p, const Vec3& g, int N,
                      const ExpansionConfig& cfg) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "%.12e,%d,%d,%.12e,%.12e,%.12e,%.12e|%.12e,%d,%d,%.12e,%.12e,%.12e,%.12e|"
                "%.12e,%.12e,%.12e|%d|%d,%d,%d,%.3e",
                p1.index.n_star, p1.index.l, p1.index.m, p1.zeta, p1.center.x(), p1.center.y(),
                p1.center.z(), p1p.index.n_star, p1p.index.l, p1p.index.m, p1p.zeta,
                p1p.center.x(), p1p.center.y(), p1p.center.z(), g.x(), g.y(), g.z(), N,
                cfg.radial_order, cfg.ntheta, cfg.partition_sharpness, cfg.condition_limit);
  return buf;
}

// Residual of the nested orthonormal projection after keeping every entry
// with principal index n <= N.
double residual_at(const Vec& bt, double norm2, int N) {
  double captured = 0.0;
  const int count = pyramid_size(N);
  for (int p = 0; p < count; ++p) captured += bt[p] * bt[p];
  return std::sqrt(std::max(0.0, norm2 - captured));
}

ExpansionTable build_table(const StoParams& p1, const StoParams& p1p, const Vec3& g, int N,
                           const ExpansionConfig& cfg) {
  validate_orbital(p1.index);
  validate_orbital(p1p.index);
  if (N < 1) throw DomainError("expand_product_density: truncation must be at least 1");

  ExpansionTable table;
  table.bra = p1;
  table.ket = p1p;
  table.expansion_center = g;
  table.z = p1.zeta + p1p.zeta;
  table.truncation_N = N;

  const bool bra_at_g = (p1.center - g).squaredNorm() == 0.0;
  const bool ket_at_g = (p1p.center - g).squaredNorm() == 0.0;
  const bool shared_ac = (p1.center - p1p.center).squaredNorm() == 0.0;

  ProjectionData data;
  if (shared_ac && bra_at_g) {
    table.arrangement = Arrangement::SameCenter;
    data = project_same_center(p1, p1p, N);
    const double n_prod = p1.index.n_star + p1p.index.n_star - 1.0;
    table.exact = std::abs(n_prod - std::round(n_prod)) < 1e-12 && std::round(n_prod) >= 1.0 &&
                  int(std::round(n_prod)) <= N;
  } else if (shared_ac || bra_at_g || ket_at_g) {
    table.arrangement = shared_ac ? Arrangement::Displaced
                        : bra_at_g ? Arrangement::BraAtCenter
                                   : Arrangement::KetAtCenter;
    const Vec3 displaced = shared_ac ? p1.center : (bra_at_g ? p1p.center : p1.center);
    const double decay = table.z + p1.zeta + p1p.zeta;
    const int lsum = p1.index.l + p1p.index.l;
    const int nphi = 2 * std::max(N - 1 + lsum, 2 * lsum) + 2;
    const SpheroidalGrid grid = spheroidal_grid(g, displaced, decay, cfg.radial_order, nphi);
    data = project_on_grid(p1, p1p, g, table.z, N, grid.points, grid.weights);
  } else {
    table.arrangement = Arrangement::Displaced;
    const std::vector<Vec3> centers{p1.center, p1p.center, g};
    const std::vector<double> scales{1.0 / p1.zeta, 1.0 / p1p.zeta, 1.0 / table.z};
    const int ntheta = cfg.ntheta > 0 ? cfg.ntheta : default_ntheta(N);
    const Grid3 grid =
        molecular_grid(centers, scales, cfg.radial_order, ntheta, cfg.partition_sharpness);
    data = project_on_grid(p1, p1p, g, table.z, N, grid.points, grid.weights);
  }

  // chi-basis projections recovered from the orthonormal ones (psi_k lies in
  // the span of R_{l+1}..R_{k+l+1}, so the map is exact on the pyramid).
  Vec b_chi = Vec::Zero(pyramid_size(N));
  for (int l = 0; l <= N - 1; ++l) {
    const Mat C = chi_in_laguerre(table.z, l, N);
    const int sz = N - l;
    Vec btb(sz);
    for (int m = -l; m <= l; ++m) {
      for (int k = 0; k < sz; ++k) btb[k] = data.bt[pyramid_index(k + l + 1, l, m)];
      const Vec bb = C * btb;
      for (int k = 0; k < sz; ++k) b_chi[pyramid_index(l + 1 + k, l, m)] = bb[k];
    }
  }

  const BlockSolve solve = solve_pyramid(N, b_chi, cfg.condition_limit);
  table.coefficients = solve.w;
  table.ortho_projections = data.bt;
  table.density_norm2 = data.norm2;
  table.gram_condition = solve.condition;
  table.regularized = solve.regularized;
  table.residual_l2 = residual_at(data.bt, data.norm2, N);
  return table;
}

std::mutex& cache_lock() {
  static std::mutex m;
  return m;
}

std::map<std::string, std::shared_ptr<const ExpansionTable>>& table_cache() {
  static std::map<std::string, std::shared_ptr<const ExpansionTable>> cache;
  return cache;
}

}  // namespace

std::shared_ptr<const ExpansionTable> expand_product_density(const StoParams& p1,
                                                             const StoParams& p1p, const Vec3& g,
                                                             int truncation_N,
                                                             const ExpansionConfig& cfg) {
  const std::string key = table_key(p1, p1p, g, truncation_N, cfg);
  {
    std::lock_guard<std::mutex> guard(cache_lock());
    const auto it = table_cache().find(key);
    if (it != table_cache().end()) return it->second;
  }
  auto table = std::make_shared<const ExpansionTable>(build_table(p1, p1p, g, truncation_N, cfg));
  std::lock_guard<std::mutex> guard(cache_lock());
  return table_cache().emplace(key, std::move(table)).first->second;
}

Vec residual_curve(const StoParams& p1, const StoParams& p1p, const Vec3& g, int truncation_N,
                   const ExpansionConfig& cfg) {
  const auto table = expand_product_density(p1, p1p, g, truncation_N, cfg);
  Vec curve(truncation_N);
  for (int N = 1; N <= truncation_N; ++N) {
    curve[N - 1] = residual_at(table->ortho_projections, table->density_norm2, N);
  }
  return curve;
}

namespace {

// Unnormalized Legendre polynomial P_L from the normalized table entry.
double legendre_plain(int L, double x) {
  return legendre_norm(L, 0, x) * std::sqrt(2.0 / (2.0 * L + 1.0));
}

}  // namespace

KernelExpansion::KernelExpansion(const KernelIndex& q, double xi, const Vec3& origin, double beta,
                                 int n_pair, int lmax, int radial_order)
    : q_(q),
      xi_(xi),
      origin_(origin),
      beta_(beta),
      n_pair_(n_pair),
      lmax_(lmax),
      radial_order_(radial_order),
      blocks_(size_t(lmax) + 1),
      lock_(std::make_unique<std::mutex>()) {
  validate_kernel(q);
  if (q.nu != 0) {
    throw DomainError(
        "KernelExpansion: only spherically symmetric kernels (nu = 0) are supported");
  }
  if (!(q.mu_star > -0.5)) {
    throw DomainError("KernelExpansion: kernel exponent must satisfy mu* > -1/2");
  }
  if (xi < 0.0) throw DomainError("KernelExpansion: xi must be nonnegative");
  if (!(beta > 0.0)) throw DomainError("KernelExpansion: scale beta must be positive");
  if (n_pair < 1) throw DomainError("KernelExpansion: need at least one radial function");
  if (lmax < 0 || radial_order < 4) throw DomainError("KernelExpansion: bad table sizes");
}

double KernelExpansion::radial_component(int L, double r1, double r2) const {
  if (L < 0) throw DomainError("radial_component: L must be nonnegative");
  if (!(r1 > 0.0) || !(r2 > 0.0)) {
    throw DomainError("radial_component: radii must be positive");
  }
  if (q_.mu_star == 0.0 && xi_ == 0.0) {
    const double lo = std::min(r1, r2);
    const double hi = std::max(r1, r2);
    return std::pow(lo / hi, double(L)) / hi;
  }
  if (q_.mu_star == 1.0 && xi_ == 0.0) return L == 0 ? 1.0 : 0.0;
  const double ulo = std::abs(r1 - r2);
  const double uhi = r1 + r2;
  Vec u, wu;
  graded_panels(ulo, uhi, 4, std::max(16, L + 8), u, wu);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double c = (r1 * r1 + r2 * r2 - u[i] * u[i]) / (2.0 * r1 * r2);
    const double h = std::exp((q_.mu_star - 1.0) * std::log(u[i]) - xi_ * u[i]);
    sum += wu[i] * u[i] * h * legendre_plain(L, std::clamp(c, -1.0, 1.0));
  }
  return (2.0 * L + 1.0) / (2.0 * r1 * r2) * sum;
}

const Mat& KernelExpansion::block(int L) const {
  if (L < 0 || L > lmax_) throw DomainError("KernelExpansion::block: L out of range");
  std::lock_guard<std::mutex> guard(*lock_);
  if (blocks_[size_t(L)]) return *blocks_[size_t(L)];

  const int kmax = n_pair_ - 1;
  // The outer integrand oscillates with up to kmax radial nodes, so the rule
  // size must stay ahead of n_pair.
  const int order = std::max(radial_order_, 2 * n_pair_);
  Vec r1, wr1;
  radial_rule(order, (L + n_pair_ + 2) / (2.0 * beta_), r1, wr1);
  Vec s, ws;
  graded_panels(0.0, 1.0, 6, order, s, ws);

  Mat psi1;
  laguerre_orthonormal(beta_, L, kmax, r1, psi1);

  Mat M = Mat::Zero(n_pair_, n_pair_);
  Vec col(s.size());
  Mat psi2;
  for (Eigen::Index i = 0; i < r1.size(); ++i) {
    const Vec r2 = s * r1[i];
    laguerre_orthonormal(beta_, L, kmax, r2, psi2);
    for (Eigen::Index j = 0; j < s.size(); ++j) {
      col[j] = ws[j] * r1[i] * r2[j] * r2[j] * radial_component(L, r1[i], r2[j]);
    }
    const Vec v2 = psi2 * col;
    M.noalias() += (wr1[i] * r1[i] * r1[i]) * psi1.col(i) * v2.transpose();
  }
  const double pref = four_pi / (2.0 * L + 1.0);
  blocks_[size_t(L)] = std::make_unique<Mat>(pref * (M + M.transpose()));
  return *blocks_[size_t(L)];
}

KernelExpansion expand_kernel_two_particle(const KernelIndex& q, double xi, const Vec3& origin,
                                           const KernelExpansionConfig& cfg) {
  const double beta = cfg.beta > 0.0 ? cfg.beta : xi + 2.0;
  return KernelExpansion(q, xi, origin, beta, cfg.n_pair, cfg.lmax, cfg.radial_order);
}

}  // namespace nisto

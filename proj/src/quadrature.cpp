#include "nisto/quadrature.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "nisto/special.h"

namespace nisto {

void graded_panels(double a, double b, int depth, int order, Vec& x, Vec& w) {
  if (!(b > a)) throw DomainError("graded_panels: need b > a");
  if (depth < 0 || order < 1) throw DomainError("graded_panels: bad depth or order");
  std::vector<double> breaks;
  breaks.push_back(0.0);
  for (int j = depth; j >= 1; --j) breaks.push_back(std::ldexp(0.5, -j));
  breaks.push_back(0.5);
  for (int j = 1; j <= depth; ++j) breaks.push_back(1.0 - std::ldexp(0.5, -j));
  breaks.push_back(1.0);
  Vec gx, gw;
  gauss_legendre(order, gx, gw);
  const int npanels = int(breaks.size()) - 1;
  x.resize(npanels * order);
  w.resize(npanels * order);
  for (int p = 0; p < npanels; ++p) {
    const double lo = a + (b - a) * breaks[p];
    const double hi = a + (b - a) * breaks[p + 1];
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    for (int i = 0; i < order; ++i) {
      x[p * order + i] = mid + half * gx[i];
      w[p * order + i] = half * gw[i];
    }
  }
}

void radial_rule(int order, double r_m, Vec& r, Vec& w) {
  if (!(r_m > 0.0)) throw DomainError("radial_rule: map scale must be positive");
  Vec x, wx;
  graded_panels(0.0, 1.0, 6, order, x, wx);
  r.resize(x.size());
  w.resize(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double u = x[i];
    const double den = 1.0 - u;
    r[i] = r_m * u / den;
    w[i] = wx[i] * r_m / (den * den);
  }
}

SphereGrid sphere_grid(int ntheta, int nphi) {
  if (ntheta < 1 || nphi < 1) throw DomainError("sphere_grid: orders must be positive");
  Vec ct, wt;
  gauss_legendre(ntheta, ct, wt);
  SphereGrid g;
  g.dirs.resize(ntheta * nphi, 3);
  g.weights.resize(ntheta * nphi);
  const double dphi = 2.0 * pi / nphi;
  for (int i = 0; i < ntheta; ++i) {
    const double st = std::sqrt(std::max(0.0, 1.0 - ct[i] * ct[i]));
    for (int j = 0; j < nphi; ++j) {
      const double phi = (j + 0.5) * dphi;
      const int k = i * nphi + j;
      g.dirs(k, 0) = st * std::cos(phi);
      g.dirs(k, 1) = st * std::sin(phi);
      g.dirs(k, 2) = ct[i];
      g.weights[k] = wt[i] * dphi;
    }
  }
  return g;
}

Vec partition_weights(const std::vector<Vec3>& centers, const Vec3& point, int iterations) {
  const int nc = int(centers.size());
  Vec cell = Vec::Ones(nc);
  if (nc == 1) return cell;
  for (int a = 0; a < nc; ++a) {
    const double ra = (point - centers[a]).norm();
    for (int b = 0; b < nc; ++b) {
      if (b == a) continue;
      const double rb = (point - centers[b]).norm();
      const double rab = (centers[a] - centers[b]).norm();
      if (rab == 0.0) throw DomainError("partition_weights: coincident centers");
      double mu = (ra - rb) / rab;
      for (int it = 0; it < iterations; ++it) mu = 1.5 * mu - 0.5 * mu * mu * mu;
      cell[a] *= 0.5 * (1.0 - mu);
    }
  }
  const double total = cell.sum();
  if (total <= 0.0) throw DomainError("partition_weights: degenerate partition");
  return cell / total;
}

Grid3 molecular_grid(const std::vector<Vec3>& centers, const std::vector<double>& scales,
                     int radial_order, int ntheta, int partition_iterations) {
  if (centers.empty()) throw DomainError("molecular_grid: need at least one center");
  if (!scales.empty() && scales.size() != centers.size()) {
    throw DomainError("molecular_grid: scales must be empty or match centers");
  }
  const int nphi = 2 * ntheta;
  const SphereGrid ang = sphere_grid(ntheta, nphi);
  Grid3 grid;
  std::vector<double> wvec;
  for (size_t c = 0; c < centers.size(); ++c) {
    Vec r, wr;
    radial_rule(radial_order, scales.empty() ? 1.0 : scales[c], r, wr);
    grid.points.reserve(grid.points.size() + r.size() * ang.weights.size());
    for (Eigen::Index i = 0; i < r.size(); ++i) {
      const double shell_w = wr[i] * r[i] * r[i];
      for (Eigen::Index j = 0; j < ang.weights.size(); ++j) {
        const Vec3 p = centers[c] + r[i] * ang.dirs.row(j).transpose();
        double w = shell_w * ang.weights[j];
        if (centers.size() > 1) {
          w *= partition_weights(centers, p, partition_iterations)[int(c)];
        }
        grid.points.push_back(p);
        wvec.push_back(w);
      }
    }
  }
  grid.weights = Eigen::Map<const Vec>(wvec.data(), Eigen::Index(wvec.size()));
  return grid;
}

SpheroidalGrid spheroidal_grid(const Vec3& a, const Vec3& b, double decay, int order, int nphi) {
  const Vec3 ab = b - a;
  const double R = ab.norm();
  if (R == 0.0) throw DomainError("spheroidal_grid: foci coincide");
  if (decay <= 0.0) throw DomainError("spheroidal_grid: decay must be positive");
  if (nphi < 1) throw DomainError("spheroidal_grid: nphi must be positive");
  const Vec3 axis = ab / R;
  const Vec3 helper = std::abs(axis.z()) < 0.9 ? Vec3(0.0, 0.0, 1.0) : Vec3(1.0, 0.0, 0.0);
  const Vec3 e1 = helper.cross(axis).normalized();
  const Vec3 e2 = axis.cross(e1);
  const Vec3 mid = 0.5 * (a + b);
  const double dphi = 2.0 * pi / nphi;
  const double s = 4.0 / (R * decay);

  Vec eta, weta, u, wu;
  graded_panels(-1.0, 1.0, 6, order, eta, weta);
  graded_panels(0.0, 1.0, 6, order, u, wu);

  SpheroidalGrid grid;
  grid.points.reserve(size_t(u.size()) * size_t(eta.size()) * size_t(nphi));
  std::vector<double> wvec;
  wvec.reserve(grid.points.capacity());
  for (Eigen::Index iu = 0; iu < u.size(); ++iu) {
    const double den = 1.0 - u[iu];
    const double xi_hat = 1.0 + s * u[iu] / den;
    const double jac_xi = wu[iu] * s / (den * den);
    for (Eigen::Index ie = 0; ie < eta.size(); ++ie) {
      const double et = eta[ie];
      const double vol =
          std::pow(0.5 * R, 3) * (xi_hat * xi_hat - et * et) * jac_xi * weta[ie] * dphi;
      const double z_loc = 0.5 * R * xi_hat * et;
      const double rho =
          0.5 * R * std::sqrt(std::max(0.0, (xi_hat * xi_hat - 1.0) * (1.0 - et * et)));
      for (int j = 0; j < nphi; ++j) {
        const double phi = (j + 0.5) * dphi;
        grid.points.push_back(mid + z_loc * axis + rho * (std::cos(phi) * e1 + std::sin(phi) * e2));
        wvec.push_back(vol);
      }
    }
  }
  grid.weights = Eigen::Map<const Vec>(wvec.data(), Eigen::Index(wvec.size()));
  return grid;
}

namespace {

int worker_count() {
  const char* env = std::getenv("NISTO_THREADS");
  if (env == nullptr) return 1;
  const int n = std::atoi(env);
  return std::max(1, n);
}

}  // namespace

double block_sum(std::int64_t n, const std::function<double(std::int64_t)>& f) {
  constexpr std::int64_t block = 1024;
  const std::int64_t nblocks = (n + block - 1) / block;
  Vec partial = Vec::Zero(std::max<std::int64_t>(nblocks, 1));
  const int workers = worker_count();
  auto run_block = [&](std::int64_t b) {
    const std::int64_t lo = b * block;
    const std::int64_t hi = std::min(n, lo + block);
    double s = 0.0;
    for (std::int64_t i = lo; i < hi; ++i) s += f(i);
    partial[b] = s;
  };
  if (workers == 1 || nblocks <= 1) {
    for (std::int64_t b = 0; b < nblocks; ++b) run_block(b);
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::int64_t> next{0};
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back([&]() {
        for (std::int64_t b = next.fetch_add(1); b < nblocks; b = next.fetch_add(1)) {
          run_block(b);
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  double total = 0.0;
  for (std::int64_t b = 0; b < nblocks; ++b) total += partial[b];
  return total;
}

}  // namespace nisto

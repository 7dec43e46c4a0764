#include "nisto/special.h"

#include <cmath>

namespace nisto {

double gamma_real(double x) {
  if (!(x > 0.0)) {
    throw DomainError("gamma_real: argument must be positive, got " + std::to_string(x));
  }
  return std::tgamma(x);
}

double log_gamma(double x) {
  if (!(x > 0.0)) {
    throw DomainError("log_gamma: argument must be positive, got " + std::to_string(x));
  }
  return std::lgamma(x);
}

namespace {

void check_legendre_args(int l, int m, double x) {
  if (l < 0 || m < 0 || m > l) {
    throw DomainError("legendre_norm: require 0 <= m <= l");
  }
  if (std::abs(x) > 1.0) {
    throw DomainError("legendre_norm: |x| must be <= 1, got " + std::to_string(x));
  }
}

}  // namespace

void legendre_norm_table(int lmax, double x, Mat& table) {
  check_legendre_args(lmax, 0, x);
  table.setZero(lmax + 1, lmax + 1);
  const double s = std::sqrt(std::max(0.0, 1.0 - x * x));
  table(0, 0) = std::sqrt(0.5);
  for (int m = 0; m < lmax; ++m) {
    table(m + 1, m + 1) = std::sqrt((2.0 * m + 3.0) / (2.0 * m + 2.0)) * s * table(m, m);
    table(m + 1, m) = std::sqrt(2.0 * m + 3.0) * x * table(m, m);
  }
  for (int m = 0; m <= lmax; ++m) {
    for (int l = m + 2; l <= lmax; ++l) {
      const double a = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
      const double b =
          std::sqrt((double(l - 1) * (l - 1) - double(m) * m) / (4.0 * double(l - 1) * (l - 1) - 1.0));
      table(l, m) = a * (x * table(l - 1, m) - b * table(l - 2, m));
    }
  }
}

double legendre_norm(int l, int m, double x) {
  check_legendre_args(l, m, x);
  Mat table;
  legendre_norm_table(l, x, table);
  return table(l, m);
}

void laguerre_orthonormal(double beta, int L, int kmax, const Vec& r, Mat& out) {
  if (beta <= 0.0) throw DomainError("laguerre_orthonormal: beta must be positive");
  if (L < 0 || kmax < 0) throw DomainError("laguerre_orthonormal: L and kmax must be nonnegative");
  const int alpha = 2 * L + 2;
  out.resize(kmax + 1, r.size());
  const double n0 = std::sqrt(std::pow(2.0 * beta, 3) * std::exp(-log_gamma(alpha + 1.0)));
  for (Eigen::Index j = 0; j < r.size(); ++j) {
    const double x = 2.0 * beta * r[j];
    // v_k = norm_k * x^L e^{-x/2} L_k^{(alpha)}(x); the shared base factor keeps
    // every iterate bounded, so the recurrence is overflow-safe for any x.
    const double base = (L == 0) ? std::exp(-0.5 * x)
                                 : std::exp(L * std::log(std::max(x, 1e-300)) - 0.5 * x);
    double vkm2 = n0 * base;
    out(0, j) = vkm2;
    if (kmax == 0) continue;
    double vkm1 = std::sqrt(1.0 / (1.0 + alpha)) * (1.0 + alpha - x) * vkm2;
    out(1, j) = vkm1;
    for (int k = 2; k <= kmax; ++k) {
      const double r1 = std::sqrt(double(k) / (k + alpha));
      const double r2 = std::sqrt(double(k) * (k - 1) / (double(k + alpha) * (k + alpha - 1)));
      const double vk =
          r1 * (2.0 * k - 1.0 + alpha - x) / k * vkm1 - r2 * (k - 1.0 + alpha) / k * vkm2;
      out(k, j) = vk;
      vkm2 = vkm1;
      vkm1 = vk;
    }
  }
}

void gauss_legendre(int n, Vec& nodes, Vec& weights) {
  if (n < 1) throw DomainError("gauss_legendre: need at least one node");
  nodes.resize(n);
  weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) nodes[half - 1] = 0.0;
}

}  // namespace nisto

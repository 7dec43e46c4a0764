#include "nisto/gaunt.h"

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <mutex>
#include <unordered_map>

#include "nisto/harmonics.h"
#include "nisto/special.h"

namespace nisto {

namespace {

struct PhiComponent {
  std::complex<double> coeff;
  int freq;
};

// Φ_m(φ) written as a sum of c·e^{i k φ} terms.
std::array<PhiComponent, 2> phi_components(int m, int& count) {
  constexpr double inv_sqrt_2pi = 0.3989422804014326779;
  constexpr double half_inv_sqrt_pi = 0.28209479177387814346;
  if (m == 0) {
    count = 1;
    return {{{{inv_sqrt_2pi, 0.0}, 0}, {}}};
  }
  count = 2;
  if (m > 0) {
    return {{{{half_inv_sqrt_pi, 0.0}, m}, {{half_inv_sqrt_pi, 0.0}, -m}}};
  }
  return {{{{0.0, -half_inv_sqrt_pi}, -m}, {{0.0, half_inv_sqrt_pi}, m}}};
}

// ∫_0^{2π} Φ_{m1} Φ_{m2} Φ_{m3} dφ, exactly: only exponent combinations
// summing to zero survive, each contributing 2π.
double phi_triple_integral(int m1, int m2, int m3) {
  int n1 = 0, n2 = 0, n3 = 0;
  const auto c1 = phi_components(m1, n1);
  const auto c2 = phi_components(m2, n2);
  const auto c3 = phi_components(m3, n3);
  std::complex<double> sum = 0.0;
  for (int a = 0; a < n1; ++a) {
    for (int b = 0; b < n2; ++b) {
      for (int c = 0; c < n3; ++c) {
        if (c1[a].freq + c2[b].freq + c3[c].freq == 0) {
          sum += c1[a].coeff * c2[b].coeff * c3[c].coeff;
        }
      }
    }
  }
  return 2.0 * pi * sum.real();
}

double theta_triple_integral(int l1, int am1, int l2, int am2, int nu, int asigma) {
  // The integrand is a polynomial of degree l1 + l2 + nu once the azimuthal
  // selection rules hold (|m1| + |m2| + |sigma| is then even).
  const int npts = (l1 + l2 + nu) / 2 + 1;
  Vec x, w;
  gauss_legendre(npts, x, w);
  const int lmax = std::max(l1, std::max(l2, nu));
  Mat table;
  double sum = 0.0;
  for (int i = 0; i < npts; ++i) {
    legendre_norm_table(lmax, x[i], table);
    sum += w[i] * table(l1, am1) * table(l2, am2) * table(nu, asigma);
  }
  return sum;
}

std::uint64_t pack_key(int l1, int m1, int l2, int m2, int nu, int sigma) {
  auto field = [](int v) { return std::uint64_t(v + 128) & 0x3ff; };
  return field(l1) | field(m1) << 10 | field(l2) << 20 | field(m2) << 30 |
         field(nu) << 40 | field(sigma) << 50;
}

}  // namespace

double gaunt_real(int l1, int m1, int l2, int m2, int nu, int sigma) {
  validate_angular({l1, m1});
  validate_angular({l2, m2});
  validate_angular({nu, sigma});
  if (nu < std::abs(l1 - l2) || nu > l1 + l2) return 0.0;
  if ((l1 + l2 + nu) % 2 != 0) return 0.0;
  const double phi_int = phi_triple_integral(m1, m2, sigma);
  if (phi_int == 0.0) return 0.0;

  static std::mutex cache_mutex;
  static std::unordered_map<std::uint64_t, double> cache;
  const std::uint64_t key = pack_key(l1, m1, l2, m2, nu, sigma);
  {
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  const double value = std::sqrt(four_pi) * phi_int *
                       theta_triple_integral(l1, std::abs(m1), l2, std::abs(m2), nu, std::abs(sigma));
  std::lock_guard<std::mutex> lock(cache_mutex);
  cache.emplace(key, value);
  return value;
}

}  // namespace nisto

#include "mfe/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "mfe/errors.hpp"

namespace mfe {
namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Xoshiro256::Xoshiro256(std::uint64_t seed) {
  for (auto& word : s_) word = splitmix64(seed);
}

Xoshiro256::result_type Xoshiro256::operator()() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Xoshiro256::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

Field random_band_limited(const TorusGrid& grid, Xoshiro256& rng, int max_mode, double amplitude) {
  if (max_mode < 1 || max_mode >= grid.resolution() / 2) {
    throw BadParameter("random_band_limited: max_mode must lie in [1, N/2)");
  }
  struct Mode {
    int m1, m2;
    double c, s;
  };
  std::vector<Mode> modes;
  // half-plane of wave vectors so each real mode appears once
  for (int m1 = 0; m1 <= max_mode; ++m1) {
    for (int m2 = -max_mode; m2 <= max_mode; ++m2) {
      if (m1 == 0 && m2 <= 0) continue;
      const double damp = 1.0 + m1 * m1 + m2 * m2;
      const double c = rng.uniform(-amplitude, amplitude) / damp;
      const double s = rng.uniform(-amplitude, amplitude) / damp;
      modes.push_back({m1, m2, c, s});
    }
  }
  // c cos(p1 + p2) + s sin(p1 + p2) = cos p1 (c cos p2 + s sin p2) + sin p1 (s cos p2 - c sin p2),
  // so the sum separates into one 1-D pass per direction
  const int n = grid.resolution();
  const double k0 = 2.0 * std::numbers::pi / grid.side_length();
  const auto cols = static_cast<std::size_t>(2 * max_mode + 1);
  std::vector<double> cos_t(cols * n), sin_t(cols * n);
  for (int m = -max_mode; m <= max_mode; ++m) {
    for (int i = 0; i < n; ++i) {
      const double phase = k0 * m * grid.coordinate(i);
      cos_t[(m + max_mode) * n + i] = std::cos(phase);
      sin_t[(m + max_mode) * n + i] = std::sin(phase);
    }
  }
  auto at = [&](const std::vector<double>& t, int m, int i) { return t[(m + max_mode) * n + i]; };
  Field out(grid);
  std::vector<double> a(n), b(n);
  std::size_t k = 0;
  for (int m1 = 0; m1 <= max_mode; ++m1) {
    std::fill(a.begin(), a.end(), 0.0);
    std::fill(b.begin(), b.end(), 0.0);
    for (int m2 = -max_mode; m2 <= max_mode; ++m2) {
      if (m1 == 0 && m2 <= 0) continue;
      const Mode& md = modes[k++];
      for (int j = 0; j < n; ++j) {
        a[j] += md.c * at(cos_t, m2, j) + md.s * at(sin_t, m2, j);
        b[j] += md.s * at(cos_t, m2, j) - md.c * at(sin_t, m2, j);
      }
    }
    for (int i = 0; i < n; ++i) {
      const double c1 = at(cos_t, m1, i), s1 = at(sin_t, m1, i);
      for (int j = 0; j < n; ++j) out(i, j) += c1 * a[j] + s1 * b[j];
    }
  }
  return out;
}

}  // namespace mfe

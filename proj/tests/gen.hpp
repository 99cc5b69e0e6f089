#pragma once

// Small hand-rolled generators for the property tests. Every case is driven by
// a (seed, case index) pair so a failure can be replayed from the message.

#include <cmath>
#include <cstdint>
#include <vector>

#include "cvtf/fock.hpp"

namespace gen {

struct Rng {
  std::uint64_t state;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : state(seed ^ (0x9E3779B97F4A7C15ull * (stream + 1))) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  double uniform() { return (next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int integer(int lo, int hi) { return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1)); }
  bool coin(double p = 0.5) { return uniform() < p; }
};

// random probability vector; some entries zeroed to get sparse supports
inline std::vector<double> simplex(Rng& r, int n, double zero_prob = 0.3) {
  std::vector<double> p(static_cast<std::size_t>(n));
  double sum = 0.0;
  for (auto& x : p) {
    x = r.coin(zero_prob) ? 0.0 : -std::log(1.0 - r.uniform());
    sum += x;
  }
  if (sum == 0.0) {
    p[static_cast<std::size_t>(r.integer(0, n - 1))] = 1.0;
    return p;
  }
  for (auto& x : p) x /= sum;
  return p;
}

inline cvtf::SchmidtSpectrum spectrum(Rng& r, int max_M) {
  return cvtf::SchmidtSpectrum::make(simplex(r, r.integer(0, max_M) + 1));
}

inline cvtf::BipartiteSpectrum grid(Rng& r, int max_M) {
  const int d = r.integer(0, max_M) + 1;
  const auto p = simplex(r, d * d);
  cvtf::RMatrix g(d, d);
  for (int i = 0; i < d * d; ++i) g(i / d, i % d) = p[static_cast<std::size_t>(i)];
  return cvtf::BipartiteSpectrum::make(std::move(g));
}

inline double noise(Rng& r) {
  // mix of small, moderate and exact-zero noise
  const int k = r.integer(0, 9);
  if (k == 0) return 0.0;
  if (k < 4) return r.uniform(0.0, 0.2);
  return r.uniform(0.0, 2.0);
}

// random operator on d levels (not hermitian)
inline cvtf::CMatrix op(Rng& r, int d) {
  cvtf::CMatrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = {r.uniform(-1, 1), r.uniform(-1, 1)};
  return m;
}

// random density matrix of rank <= d
inline cvtf::CMatrix density(Rng& r, int d) {
  const auto a = op(r, d);
  cvtf::CMatrix rho = a * a.adjoint();
  return rho / rho.trace().real();
}

}  // namespace gen

#pragma once

#include <cstdint>
#include <random>

#include "entlab/types.hpp"

// Seeded randomness for sampling experiments.  Every scan cell derives its
// own stream from (base seed, cell ids...) so results are independent of
// evaluation order and thread count, and a rerun with the same seed
// reproduces the exact same draws.

namespace entlab {

// SplitMix64 step; used both as a seed mixer and to derive substreams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministically combine a base seed with stream ids (dim index, grid
// index, sample index, ...) into a fresh seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> ids) {
  std::uint64_t s = base;
  std::uint64_t h = splitmix64(s);
  for (std::uint64_t id : ids) {
    s ^= id + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h = splitmix64(s);
  }
  return h;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed), seed_base_(seed) {}

  Rng substream(std::initializer_list<std::uint64_t> ids) const {
    return Rng(derive_seed(seed_base_, ids));
  }

  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(gen_);
  }

  double gaussian() { return std::normal_distribution<double>(0.0, 1.0)(gen_); }

  std::uint64_t integer(std::uint64_t n) {  // uniform in [0, n)
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(gen_);
  }

  cxd cgaussian() { return cxd(gaussian(), gaussian()); }

  // Complex Ginibre matrix, i.i.d. standard complex Gaussians.
  cmat ginibre(Eigen::Index rows, Eigen::Index cols);

  // GUE-like Hermitian matrix, optionally rescaled to unit operator norm.
  cmat hermitian(Eigen::Index dim, bool unit_norm = false);

  // Haar-distributed unitary (QR of a Ginibre matrix with phase fix).
  cmat unitary(Eigen::Index dim);

  // Random density matrix: G G^dag / tr, G of shape dim x rank.
  cmat density(Eigen::Index dim, Eigen::Index rank);

  // Haar-random unit vector.
  cvec pure_state(Eigen::Index dim);

  // Random contraction 0 <= X <= 1: Haar-conjugated uniform spectrum.
  cmat psd_contraction(Eigen::Index dim);

 private:
  std::mt19937_64 gen_;
  std::uint64_t seed_base_;
};

}  // namespace entlab

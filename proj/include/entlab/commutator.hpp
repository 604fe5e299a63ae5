#pragma once

#include <optional>
#include <vector>

#include "entlab/operators.hpp"
#include "entlab/rng.hpp"

// Laboratory for the commutator trace-norm bound: for 0 <= A <= B with
// tr A = p and tr B = 1,  ||[A, log B]||_1 <= c * h(p).  The proven constant
// is 11 (2 in finite dimensions); the interval-partition decomposition below
// reproduces the proof's bookkeeping term by term so each piece can be
// audited numerically.

namespace entlab {

// f(p) = sqrt(p) * log(1/p) for 0 < p <= e^-2, and 2/e beyond; the envelope
// used by the far-block bound.  Maximum 2/e, attained from p = e^-2 on.
double spectral_weight_f(double p);

struct DominatedPair {
  cmat a;    // 0 <= A <= B
  cmat b;    // density operator
  double p;  // tr A, in (0,1)
};

enum class SpectrumProfile { uniform, geometric, two_scale };

// Draw B with the requested spectral profile (Haar eigenbasis), X with
// 0 <= X <= 1, and set A = B^{1/2} X B^{1/2} rescaled (by scaling X, never A,
// so domination is preserved) to tr A = p.  Retries the X draw when the
// rescale would push X past 1; errors after `retries` attempts.
DominatedPair sample_dominated_pair(Rng& rng, Eigen::Index dim, double p,
                                    SpectrumProfile profile, double geometric_ratio = 0.0,
                                    int retries = 64);

// ||[A, log B]||_1 with the logarithm restricted to supp(B).
double commutator_trace_norm(const cmat& a, const cmat& b, double floor = kSupportFloor);

// Interval partition of the proof: spectrum of B is split into
// I_k = [p^{k+1}, p^k), the dual-optimal contraction H* is the spectral sign
// of -i[A, log B], and the total W = ||[A, log B]||_1 decomposes into block
// sums.  V merges adjacent blocks, V' undoes the double count, W'' collects
// pairs at block distance >= 2:  W = V - V' + W''.
struct PartitionDecomposition {
  double p;                      // tr A
  std::vector<int> block_ids;    // sorted distinct interval indices (set K)
  std::vector<int> block_of;     // interval index per supported eigenvalue of B
  Eigen::MatrixXcd w_blocks;     // W_{kl} indexed by position in block_ids
  double trace_norm;             // ||[A, log B]||_1 on the support
  double w_total;                // sum of all W_{kl} (= trace_norm at H*)
  double v_total;                // merged-projector sum V
  double v_prime;                // double-count correction V'
  double w_far;                  // |k - l| >= 2 part W''
  double bound_far;              // 6 sqrt(p) f(p)
  double bound_v;                // 4 p log(1/p)
  double bound_v_prime;          // p log(1/p)
  double bound_total;            // 6 sqrt(p) f(p) + 5 p log(1/p)
};

PartitionDecomposition partition_decompose(const cmat& a, const cmat& b,
                                           double floor = kSupportFloor);

// Interval index k with p^{k+1} <= lambda < p^k (k = -1 exactly at lambda = 1).
int interval_index(double lambda, double p);

// --- sampled-bound scans -----------------------------------------------------

struct ScanWitness {
  cmat a, b;
  double p = 0.0;
  double ratio = 0.0;
  Eigen::Index dim = 0;
  std::uint64_t sample_seed = 0;
};

struct ScanCell {
  Eigen::Index dim;
  double p;
  int samples;
  double max_ratio;
  double mean_ratio;
};

struct ScanReport {
  std::vector<ScanCell> cells;
  double global_max = 0.0;
  ScanWitness witness;
  long hard_violations = 0;  // ratio > hard_c
  long soft_violations = 0;  // ratio > soft_c
  double hard_c = 11.0;
  double soft_c = 2.0;
};

// Draw `samples` dominated pairs per (dim, p) cell, cycling the spectral
// profiles, and track ratio = ||[A, log B]||_1 / h(p).  Deterministic for a
// given seed independent of `threads`.
ScanReport ratio_scan(const std::vector<Eigen::Index>& dims, const std::vector<double>& p_grid,
                      int samples, std::uint64_t seed, int threads = 1, double hard_c = 11.0,
                      double soft_c = 2.0);

// --- auxiliary interval inequalities ----------------------------------------

// ||[A, log B]||_1 <= log(b_hi/b_lo) * tr A for PSD A and B with
// spec(B) in [b_lo, b_hi].  Returns the worst slack found (negative = all
// instances satisfied the bound by that margin).
struct InequalityScan {
  double worst_margin;  // max over samples of (lhs - rhs); <= 0 means pass
  double max_lhs;
  long violations;
};

InequalityScan interval_log_commutator_scan(Rng& rng, Eigen::Index dim, double b_lo, double b_hi,
                                       int samples);

// Frobenius-norm spectral-gap estimate: ||A X - X B||_F <=
// max(a_hi - b_lo, b_hi - a_lo) * ||X||_F for Hermitian A, B with spectra in
// the given intervals.
InequalityScan gap_commutator_scan(Rng& rng, Eigen::Index dim, double a_lo, double a_hi, double b_lo,
                              double b_hi, int samples);

}  // namespace entlab

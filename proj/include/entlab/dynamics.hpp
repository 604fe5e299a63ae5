#pragma once

#include <vector>

#include "entlab/hamiltonian.hpp"
#include "entlab/lattice.hpp"
#include "entlab/operators.hpp"

// Exact Heisenberg evolution, locality (light-cone) bound scans, and the
// area-law bound on how fast evolution can change the entropy of a region.

namespace entlab {

// e^{-iht} a e^{iht}, exact through the eigendecomposition of h.  The
// EigenSystem overload lets a time grid reuse one decomposition.
cmat heisenberg_evolve(const cmat& h, double t, const cmat& a);
cmat heisenberg_evolve(const EigenSystem& es, double t, const cmat& a);

// An operator together with the sites it acts on; `op` lives on the listed
// factors in listed order and is padded with identity elsewhere.
struct LocalOperator {
  Region support;
  cmat op;
};

// Interaction strength entering the strict light-cone bound: the largest
// over sites v of  sum over terms containing v of  norm * size * e^{mu*diam}.
double interaction_strength(const Potential& pot, double mu);

// The strict-locality commutator bound 2 na nb |X| exp(2 s |t| - mu d).
double lr_strict_bound(double norm_a, double norm_b, long x_size, double s, double mu, double t,
                       long dist);

// The kernel-form bound 2 na nb |X| |Y| K(d) exp(2 lambda |t|) / lambda.
double lr_kernel_bound(double norm_a, double norm_b, long x_size, long y_size,
                       double kernel_at_d, double lambda, double t);

// Smallest multiple of e^{-mu d} that dominates the pairwise interaction
// sums of the potential, indexed by distance (a valid kernel input below).
std::vector<double> dominating_exponential_kernel(const Potential& pot, double mu);

// Hypothesis of the kernel-form bound: for every site pair (v, w), the total
// norm of terms containing both is at most kernel[d(v, w)].
struct KernelDomination {
  bool ok;
  double worst_margin;  // min over pairs of kernel - interaction sum
  long v, w;            // pair attaining the worst margin
};
KernelDomination kernel_domination_check(const Potential& pot, const std::vector<double>& kernel);

struct LrRow {
  double t;
  double bound_strict;
  double bound_kernel;  // NaN when no kernel was supplied
  bool vacuous;         // every supplied bound exceeds the trivial cap
  double exact_norm;    // NaN when skipped as vacuous
  bool violation;
};

struct LrReport {
  std::vector<LrRow> rows;
  long dist;            // distance between the two supports
  double norm_a, norm_b;
  double trivial_cap;   // 2 na nb, what any commutator norm satisfies anyway
  double s, mu;
  double lambda;        // kernel reproducing constant (NaN without kernel)
  int violations;
  double max_ratio;     // max exact/bound over the computed rows
};

// Scan ||[evolved a, b]|| against the locality bounds over a time grid.  The
// strength s comes from the potential; pass a kernel (values by distance) to
// also evaluate the kernel-form bound, whose domination hypothesis is
// enforced.  Rows where no supplied bound beats the trivial cap skip the
// exact norm and are flagged vacuous.
LrReport lr_check(const Potential& pot, const LocalOperator& a, const LocalOperator& b,
                  const std::vector<double>& t_grid, double mu,
                  const std::vector<double>& kernel = {});

// Largest provable entropy rate through a term acting across a cut with
// smaller-side dimension n: hard commutator constant times n^2 h(1/n^2),
// which is below 11 (2 ln n + 1).
double incremental_entangling_factor(double n_min);

struct RealtimeRate {
  double rate;        // d/dt of the region entropy, nats per unit time
  double bound;       // profile-exact chain: sum_r M(r) * factor(r) * ||h(r)||
  double area_bound;  // cap chain C * A with C independent of system size
  double area;
  std::vector<double> contributions;  // per potential term (empty on fallback)
  double interior_max;  // largest |contribution| among one-side terms
  bool fd_fallback;     // rank-deficient region marginal: rate from differences
};

// Entropy rate of `region` for the pure state psi evolving under the
// potential, summed term by term; terms inside one side contribute nothing,
// so the rate is carried by the cut-crossing terms and scales with the cut
// area, not the volume.
RealtimeRate realtime_entropy_rate(const Potential& pot, const cvec& psi, const Region& region,
                                   double floor = kSupportFloor);

}  // namespace entlab

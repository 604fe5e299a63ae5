#pragma once

#include <functional>
#include <vector>

#include "entlab/operators.hpp"
#include "entlab/rng.hpp"

// Entropy-rate laboratory.  Mixing rates: how fast the entropy of a mixture
// p rho1 + (1-p) rho2 can change when only rho2 evolves unitarily.
// Entangling rates: how fast the entanglement entropy of a pure state on
// a|A|B|b can change under an interaction supported on A x B.  The two are
// tied by an exact extension identity implemented below.

namespace entlab {

struct TwoStateEnsemble {
  double p;    // weight of the fixed state rho1
  cmat rho1;   // held fixed
  cmat rho2;   // evolves under the probe Hamiltonian
};

// d/dt S(p rho1 + (1-p) e^{-iHt} rho2 e^{iHt}) at t = 0, evaluated in closed
// form as +i (1-p) tr( H [rho2, log rho_bar] ) with the support-restricted log.
double mixing_rate(const TwoStateEnsemble& ens, const cmat& h, double floor = kSupportFloor);

struct MaxRateResult {
  double value;
  cmat op;  // the optimal norm-one Hermitian probe
};

// Maximum of the mixing rate over ||H|| <= 1; equals the trace norm of
// i (1-p) [rho2, log rho_bar], attained at its spectral sign.
MaxRateResult max_mixing_rate(const TwoStateEnsemble& ens, double floor = kSupportFloor);

// Many-state version: each rho_i evolves under its own h_i.  Identical h_i
// give a global rotation of the average, so the rate is then zero.
double ensemble_mixing_rate(const std::vector<double>& weights, const std::vector<cmat>& states,
                            const std::vector<cmat>& hams, double floor = kSupportFloor);

// Concavity/subadditivity window for the mixture entropy along an evolution:
// sum_i q_i S(rho_i) <= S(rho_bar(t)) <= sum_i q_i S(rho_i) + h(p).  Returns
// the worst margins over the time grid (>= 0 means the window held).
struct MixingWindow {
  double lower_margin;
  double upper_margin;
};
MixingWindow total_mixing_check(const TwoStateEnsemble& ens, const cmat& h, const dvec& times);

// Central finite-difference probe with one Richardson step.  For a smooth
// trajectory the coarse/fine error ratio sits near 4.
struct FdProbe {
  double coarse;        // symmetric difference at dt
  double fine;          // at dt/2
  double extrapolated;  // (4 fine - coarse) / 3
  double ratio;         // |coarse - extrapolated| / |fine - extrapolated|
};
FdProbe rate_finite_difference(const std::function<double(double)>& f, double dt = 1e-4);

// --- entangling rates --------------------------------------------------------

// Four-factor split a|A|B|b of a pure state; the interaction acts on A x B,
// the ancillas a and b are spectators (either may be trivial, dim 1).
struct BipartiteSetting {
  Layout layout;  // {dim a, dim A, dim B, dim b}

  Eigen::Index dim_a() const { return layout[0]; }
  Eigen::Index dim_A() const { return layout[1]; }
  Eigen::Index dim_B() const { return layout[2]; }
  Eigen::Index dim_b() const { return layout[3]; }
  Eigen::Index total_dim() const { return layout_dim(layout); }
};

// d/dt S(rho_aA) at t = 0 under H = 1_a x h_AB x 1_b:
// +i tr( H [ P_psi, log(rho_aA) x 1_Bb ] ).
double entangling_rate(const cvec& psi, const BipartiteSetting& s, const cmat& h_ab,
                       double floor = kSupportFloor);

// Maximum of the entangling rate over ||h_AB|| <= 1 for a fixed state.
MaxRateResult max_entangling_rate_operator(const cvec& psi, const BipartiteSetting& s,
                                           double floor = kSupportFloor);

// Entropy of the marginal on the kept factors.
double subsystem_entropy(const cvec& psi, const Layout& layout, const std::vector<int>& keep);

// Exact reduction of an entangling rate to a mixing rate: for the two-factor
// grouping {m, n} of the same state, the ensemble with weight 1/n^2 on the
// evolved projector and the rest on the fixed complement
//   mu = ( rho_first x 1/n - P/n^2 ) / (1 - 1/n^2)
// has average rho_first x 1/n, and n^2 * mixing_rate equals the entangling
// rate for any probe supported anywhere on the full space.
TwoStateEnsemble entangling_extension(const cvec& psi, const Layout& two_factor);

// Total entanglement change under a unitary on A x B, against the cap
// 2 log min(dim A, dim B).
struct EntropyChange {
  double before;
  double after;
  double change;
  double cap;
};
EntropyChange entangling_total_check(const cvec& psi, const BipartiteSetting& s, const cmat& u_ab);

// --- state optimization ------------------------------------------------------

struct OptimizeResult {
  double value;       // best entangling rate found
  cvec psi;           // maximizing state
  double grad_norm;   // Riemannian gradient norm at the end
  int iterations;     // total ascent steps across restarts
  int restarts;
};

// Riemannian gradient ascent on the unit sphere for the entangling rate at
// fixed h_AB, using the analytic gradient (commutator term plus the
// log-derivative backflow through rho_aA).  Seeded multi-start.
OptimizeResult maximize_entangling_rate(const BipartiteSetting& s, const cmat& h_ab, int restarts,
                                        std::uint64_t seed, int max_iter = 400, double tol = 1e-9);

// Wirtinger gradient of the rate at psi (before tangent projection); exposed
// for finite-difference validation.
cvec entangling_rate_gradient(const cvec& psi, const BipartiteSetting& s, const cmat& h_ab,
                              double floor = kSupportFloor);

// --- superposition bookkeeping ----------------------------------------------

// For branches with mutually orthogonal marginals on the kept factors,
// S(marginal of sum_i sqrt(w_i) branch_i) = sum_i w_i S_i + H(w).
struct SuperpositionCheck {
  double lhs;
  double rhs;
  double gap;       // |lhs - rhs|
  bool orthogonal;  // marginals (and branches) pairwise orthogonal
};
SuperpositionCheck superposition_entropy_check(const std::vector<cvec>& branches,
                                               const dvec& weights, const Layout& layout,
                                               const std::vector<int>& keep);

}  // namespace entlab

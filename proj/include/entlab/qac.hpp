#pragma once

#include <vector>

#include "entlab/dynamics.hpp"
#include "entlab/hamiltonian.hpp"
#include "entlab/lattice.hpp"
#include "entlab/operators.hpp"

// Adiabatic continuation along gapped Hamiltonian paths: a spectral filter
// that inverts energy differences outside the gap while staying smooth
// inside, the exact transport generator it induces, quasi-local truncations
// of that generator, and ground-state transport with entropy bookkeeping.

namespace entlab {

// A gapped path ran into a point where the gap fell under the filter scale.
struct path_error : lab_error {
  using lab_error::lab_error;
};

// Odd spectral weight W with W(omega) = -1/omega exactly beyond the gap
// scale delta, rounded off inside the gap by a smooth even bump so that
// W(0) = 0.  Its time profile decays faster than any power, which is what
// makes the induced transport generator quasi-local.
class FilterFunction {
 public:
  FilterFunction(double delta, double sharpness);

  double delta() const { return delta_; }
  double sharpness() const { return sharpness_; }

  // Smooth even bump: exp(sharpness * (1 - 1/(1 - x^2))) on (-1, 1), zero
  // outside, equal to 1 at x = 0.
  double bump(double x) const;

  // W(omega) = -(1 - bump(omega/delta)) / omega, odd, zero at zero.
  double weight(double omega) const;

  // Time profile F(t) = (1/pi) (int_0^delta bump(w/delta) sin(w t)/w dw
  // - pi/2) for t > 0, extended oddly; obtained by panel quadrature.
  double time_profile(double t) const;

 private:
  double delta_;
  double sharpness_;
};

FilterFunction build_filter(double delta, double sharpness = 6.0);

// Least-squares slope of log max|F| per window against log t over
// [t_lo, t_hi]: windowed maxima ride over the zeros of the oscillation, so
// the fit sees the envelope.
double filter_decay_exponent(const FilterFunction& filter, double t_lo = 5.0, double t_hi = 50.0,
                             int windows = 9);

// Linear interpolation between two potentials on the same lattice:
// H(s) = (1-s) H0 + s H1, with the constant derivative H1 - H0.
struct QAPath {
  Potential h0;
  Potential h1;
  double gap_floor;
};

QAPath make_path(Potential h0, Potential h1, double gap_floor = 1e-6);

// Transverse-field chain with the field ramped g0 -> g1 at fixed coupling.
QAPath tfim_path(const Torus& lattice, double j, double g0, double g1, double gap_floor = 1e-6);

// Term-level mixture (1-s) h0 + s h1; near-zero weights drop their terms.
Potential path_potential(const QAPath& path, double s);

// The s-derivative as a potential: the h1 terms plus the negated h0 terms.
Potential path_derivative(const QAPath& path);

// Exact transport generator at parameter s: in the eigenbasis of H(s),
// K_ij = -i W(E_i - E_j) (dH)_ij.  The weight is pinned by the defining
// identity  i K |gs(s)> = d/ds |gs(s)>  via first-order perturbation theory,
// which the tests enforce.  Throws path_error when the gap at s falls under
// the filter scale.
cmat qac_generator(const QAPath& path, double s, const FilterFunction& filter);

// Same spectral construction for an arbitrary Hamiltonian and argument.
cmat filtered_generator(const cmat& h, const cmat& dh, const FilterFunction& filter);

// Quasi-local slices of the per-center generator.  With Lambda_r the ball
// around the center joined with the support of the center's derivative
// terms, and G_r the generator built from H(s) restricted to Lambda_r,
//   k_0 = G_0,   k_r = G_r - G_{r-1},
// so the k_r telescope back to the full per-center generator once the ball
// covers the lattice.  Each k_r lives on the Lambda_r factors.
struct TruncatedGenerators {
  std::vector<cmat> slices;          // k_r on the factors of support[r]
  std::vector<Region> support;       // Lambda_r, sorted site ids
  std::vector<double> norms;         // operator norm of each slice
  double decay_exponent;             // log-log slope of norms for r >= 2
};

TruncatedGenerators truncated_generators(const QAPath& path, double s,
                                         const FilterFunction& filter, long center, int r_max);

struct TransportStep {
  double s;
  double gap;
  double fidelity;  // |<gs(s) | psi(s)>|
  double entropy;   // region entropy of psi(s), nats
  double ds_rate;   // d/ds of that entropy under the generator
};

struct TransportResult {
  std::vector<TransportStep> trace;
  double constant_c;            // entropy-rate constant from the slice norms
  double area;
  double entropy_change;        // S(end) - S(0)
  double fidelity_final;
  int rate_violations;          // steps with |ds_rate| > constant_c * area
  double max_unitarity_defect;  // worst ||U^dag U - 1|| over the trace
  bool aborted;                 // gap fell below the filter scale mid-path
  double last_valid_s;
  cmat u_final;
};

// Integrate dU/ds = i K(s) U from the ground state of H(0) with a
// fixed-step 4th-order scheme, re-unitarizing each step by polar
// decomposition.  Records gap, fidelity against the instantaneous ground
// state, region entropy and its rate; the entropy-rate cap constant_c * area
// comes from the truncated-generator norms sampled along the path.
TransportResult transport(const QAPath& path, const FilterFunction& filter, const Region& region,
                          int steps = 200);

}  // namespace entlab

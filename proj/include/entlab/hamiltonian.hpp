#pragma once

#include <string>
#include <utility>
#include <vector>

#include "entlab/lattice.hpp"
#include "entlab/operators.hpp"

// Quasi-local lattice Hamiltonians: interaction terms attached to sites of a
// torus, dense assembly for desk-scale dimensions, spectral-gap bookkeeping,
// radial decompositions, and a Jordan-Wigner toolbox for fermionic presets.

namespace entlab {

cmat pauli(char which);  // 'I', 'X', 'Y', 'Z'

struct PotentialTerm {
  std::vector<long> sites;  // distinct site ids; op factors follow this order
  cmat op;                  // Hermitian, dim = local_dim^sites.size()
  std::string label;
};

class Potential {
 public:
  Potential(Torus lattice, Eigen::Index local_dim);

  void add_term(std::vector<long> sites, cmat op, std::string label = "");

  const std::vector<PotentialTerm>& terms() const { return terms_; }
  const Torus& lattice() const { return lattice_; }
  Eigen::Index local_dim() const { return local_dim_; }
  Eigen::Index site_count() const { return lattice_.site_count(); }
  Eigen::Index total_dim() const;  // local_dim^sites; throws past the dense cap

  cmat assemble() const;            // sum of embedded terms
  double term_norm_sum() const;     // sum over terms of the operator norm
  double max_term_range() const;    // largest pairwise distance inside a term
  std::vector<double> term_norms() const;

 private:
  Torus lattice_;
  Eigen::Index local_dim_;
  std::vector<PotentialTerm> terms_;
};

// --- presets -----------------------------------------------------------------

// Transverse-field Ising model on the torus: -j sum_<vw> Z_v Z_w - g sum_v X_v.
Potential tfim(const Torus& lattice, double j, double g);

// Anisotropic Heisenberg exchange: sum_<vw> (jx XX + jy YY + jz ZZ).
Potential heisenberg(const Torus& lattice, double jx, double jy, double jz);

// Spin form of the Hubbard model with explicit parity strings, carried by the
// one-dimensional chain of modes so every term records its support.
// assemble() agrees with hubbard_hamiltonian on the same lattice.
Potential hubbard_jw_potential(const Torus& lattice, double t_hop, double u, double mu);

struct PresetParams {
  double j = 1.0, g = 1.0;             // tfim
  double jx = 1.0, jy = 1.0, jz = 1.0; // heisenberg
  double t = 1.0, u = 0.0, mu = 0.0;   // hubbard_jw
};

// Name dispatch over the presets above; unknown names are rejected.
Potential preset_potential(const std::string& name, const Torus& lattice,
                           const PresetParams& params = {});

// --- spectra -----------------------------------------------------------------

struct GapInfo {
  double ground_energy;
  Eigen::Index ground_degeneracy;  // levels within tol of the ground energy
  double gap;                      // first level above the ground cluster
  dvec lowest;                     // a few lowest levels for reporting
};
GapInfo spectral_gap(const cmat& h, double degeneracy_tol = 1e-8, Eigen::Index report = 6);

// Gap data for an assumed ground multiplicity q: the gap is the step from
// level q-1 to level q, the spread is the width of the lowest q levels.
struct SpectralData {
  dvec values;         // full spectrum, ascending
  Eigen::Index q;      // assumed ground multiplicity
  double delta;        // E_q - E_{q-1}
  double spread;       // E_{q-1} - E_0
  bool gapped;         // delta above the floor
};
SpectralData spectral_data(const cmat& h, Eigen::Index q, double gap_floor = 1e-8);

// --- radial structure --------------------------------------------------------

// Group terms by their enclosing radius around a center site (max distance
// from the center to any site of the term) and sum term norms per radius.
struct RadialProfile {
  long center;
  std::vector<double> norm_by_radius;  // index = radius
  double decay_exponent;               // LS slope of ln(norm) vs ln(r), r >= 1
};
RadialProfile quasi_local_decompose(const Potential& pot, long center);

// --- lattice symmetries ------------------------------------------------------

// Unit shift along one axis as a permutation on the full Hilbert space.
cmat translation_operator(const Torus& lattice, int axis, Eigen::Index local_dim);

// --- Jordan-Wigner toolbox ---------------------------------------------------

// Annihilator of mode j among n ordered modes:
// c_j = (Z x ... x Z) x |0><1| x 1 x ... x 1  (j leading Z factors).
cmat jw_annihilator(Eigen::Index n_modes, Eigen::Index j);
cmat jw_number(Eigen::Index n_modes, Eigen::Index j);
cmat jw_total_number(Eigen::Index n_modes);

// Boustrophedon mode order for a 2d torus (row by row, alternating
// direction); the identity order for 1d.
std::vector<long> snake_order(const Torus& lattice);

// -t sum_edges (c_i^+ c_j + c_j^+ c_i) over the given mode pairs.
cmat hopping_hamiltonian(Eigen::Index n_modes,
                         const std::vector<std::pair<Eigen::Index, Eigen::Index>>& edges,
                         double t_hop);

// Spinful Hubbard model on the lattice via the snake order; modes come in
// (site, spin) pairs, interleaved spin-up/spin-down:
//   -t sum_<vw>s (c^+_{vs} c_{ws} + h.c.) + u sum_v n_{v,up} n_{v,down}
//   - mu sum_{vs} n_{vs}.
cmat hubbard_hamiltonian(const Torus& lattice, double t_hop, double u, double mu);

}  // namespace entlab

#pragma once

#include <string>
#include <vector>

#include "entlab/types.hpp"

// Periodic lattice geometry: the torus Z_L^nu with the l1 metric, balls,
// region boundaries, distance-to-cut profiles and reproducing-kernel
// constants.  Sites are integer ids; coordinate 0 is the most significant
// digit (id = (...(x0*L + x1)*L + x2)...), matching the tensor-factor order
// used for operators.

namespace entlab {

struct Torus {
  int nu;  // spatial dimension
  int L;   // linear size

  Torus(int nu_, int L_);

  long site_count() const { return sites_; }
  std::vector<int> coords(long site) const;
  long site(const std::vector<int>& coords) const;

  // l1 distance with wrap-around: sum_i min(|dx_i|, L - |dx_i|).
  int distance(long a, long b) const;

  // All sites within distance r of center (sorted ids).
  std::vector<long> ball(long center, int r) const;

  // Distance-1 neighbours (2*nu of them, deduplicated when L <= 2).
  std::vector<long> neighbors(long site) const;

 private:
  long sites_;
};

// A region is a sorted list of distinct site ids; its complement is implied.
using Region = std::vector<long>;

Region make_region(const Torus& t, std::vector<long> sites);

// Parse a CLI region literal: either an axis-aligned slab "a..b" (one range
// per axis, joined by 'x', e.g. "0..2x0..5") or an explicit coordinate list
// "(x,y),(x,y),..." ("(x)" tuples for nu=1 may drop the parens: "0,1,4").
Region parse_region(const Torus& t, const std::string& text);

struct BoundaryData {
  Region inner;  // sites of the region with a neighbour outside
  Region outer;  // sites outside with a neighbour inside
  long area;     // max(|inner|, |outer|)
};

// Rejects empty and full regions (no cut to speak of).
BoundaryData boundary_and_area(const Torus& t, const Region& region);

struct CutProfile {
  std::vector<int> m;            // per site: distance to the boundary of its own side
  std::vector<long> counts;      // counts[r] = #{v : m(v) <= r}, r = 0..max m
  std::vector<long> cap;         // 2*A*(2r+1)^nu alongside, clamped to site count scale
  long area;
};

// m(v) = dd(v, inner boundary) on the region side, dd(v, outer boundary) on
// the complement side; counts[r] is monotone and capped by 2*A*(2r+1)^nu.
CutProfile boundary_profile(const Torus& t, const Region& region);

struct ReproducingReport {
  double lambda;        // smallest constant with sum_x K(d(v,x))K(d(x,w)) <= lambda K(d(v,w))
  long witness_site;    // w achieving the max ratio against v = 0
  std::vector<double> ratios;  // ratio per w (v = 0 by translation invariance)
};

// K is indexed by distance 0..max distance on the torus; K must be positive.
ReproducingReport reproducing_constant(const Torus& t, const std::vector<double>& kernel);

// Kernel by distance for K(d) = exp(-mu d), length = torus diameter + 1.
std::vector<double> exponential_kernel(const Torus& t, double mu);

}  // namespace entlab

#include "entlab/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace entlab {

namespace {

// Each nearest-neighbour bond once, anchored at its lower end along the
// generating axis: (v, v + e_axis).  The anchor-first listing keeps per-site
// term decompositions uniform across a translation-invariant potential.
std::vector<std::pair<long, long>> canonical_edges(const Torus& t) {
  std::set<std::pair<long, long>> seen;
  std::vector<std::pair<long, long>> out;
  for (long v = 0; v < t.site_count(); ++v) {
    const auto c = t.coords(v);
    for (int axis = 0; axis < t.nu; ++axis) {
      auto cw = c;
      cw[static_cast<size_t>(axis)] = (cw[static_cast<size_t>(axis)] + 1) % t.L;
      const long w = t.site(cw);
      if (w == v) continue;
      const auto key = std::minmax(v, w);
      if (seen.insert({key.first, key.second}).second) out.push_back({v, w});
    }
  }
  return out;
}

Eigen::Index checked_power(Eigen::Index base, Eigen::Index count) {
  Eigen::Index dim = 1;
  for (Eigen::Index i = 0; i < count; ++i) {
    if (dim > kDimCap / base) throw capacity_error("dense Hilbert space exceeds the size cap");
    dim *= base;
  }
  return dim;
}

}  // namespace

cmat pauli(char which) {
  cmat m(2, 2);
  switch (which) {
    case 'I': m << 1, 0, 0, 1; break;
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, cxd(0, -1), cxd(0, 1), 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: throw parameter_error("pauli: unknown label");
  }
  return m;
}

Potential::Potential(Torus lattice, Eigen::Index local_dim)
    : lattice_(std::move(lattice)), local_dim_(local_dim) {
  if (local_dim_ < 2) throw dimension_error("Potential: local dimension must be >= 2");
}

void Potential::add_term(std::vector<long> sites, cmat op, std::string label) {
  if (sites.empty()) throw parameter_error("Potential: term needs at least one site");
  std::set<long> distinct(sites.begin(), sites.end());
  if (distinct.size() != sites.size()) throw parameter_error("Potential: repeated site in term");
  for (long s : sites)
    if (s < 0 || s >= lattice_.site_count()) throw dimension_error("Potential: site out of range");
  Eigen::Index dim = 1;
  for (size_t i = 0; i < sites.size(); ++i) dim *= local_dim_;
  if (op.rows() != op.cols() || op.rows() != dim)
    throw dimension_error("Potential: operator does not match its site list");
  if (!is_hermitian(op, kHermitianWarnTol))
    throw parameter_error("Potential: interaction terms must be Hermitian");
  terms_.push_back(PotentialTerm{std::move(sites), std::move(op), std::move(label)});
}

Eigen::Index Potential::total_dim() const {
  return checked_power(local_dim_, lattice_.site_count());
}

cmat Potential::assemble() const {
  const Eigen::Index dim = total_dim();
  const Layout layout(static_cast<size_t>(lattice_.site_count()), local_dim_);
  cmat h = cmat::Zero(dim, dim);
  for (const auto& term : terms_) {
    std::vector<int> slots;
    slots.reserve(term.sites.size());
    for (long s : term.sites) slots.push_back(static_cast<int>(s));
    h += embed(term.op, slots, layout);
  }
  return h;
}

double Potential::term_norm_sum() const {
  double sum = 0.0;
  for (const auto& term : terms_) sum += operator_norm(term.op);
  return sum;
}

std::vector<double> Potential::term_norms() const {
  std::vector<double> out;
  out.reserve(terms_.size());
  for (const auto& term : terms_) out.push_back(operator_norm(term.op));
  return out;
}

double Potential::max_term_range() const {
  double range = 0.0;
  for (const auto& term : terms_)
    for (size_t i = 0; i < term.sites.size(); ++i)
      for (size_t j = i + 1; j < term.sites.size(); ++j)
        range = std::max(range,
                         static_cast<double>(lattice_.distance(term.sites[i], term.sites[j])));
  return range;
}

Potential tfim(const Torus& lattice, double j, double g) {
  Potential pot(lattice, 2);
  const cmat zz = tensor_product(pauli('Z'), pauli('Z'));
  for (const auto& [v, w] : canonical_edges(lattice))
    pot.add_term({v, w}, -j * zz, "zz");
  for (long v = 0; v < lattice.site_count(); ++v) pot.add_term({v}, -g * pauli('X'), "x");
  return pot;
}

Potential heisenberg(const Torus& lattice, double jx, double jy, double jz) {
  Potential pot(lattice, 2);
  const cmat exchange = jx * tensor_product(pauli('X'), pauli('X')) +
                        jy * tensor_product(pauli('Y'), pauli('Y')) +
                        jz * tensor_product(pauli('Z'), pauli('Z'));
  for (const auto& [v, w] : canonical_edges(lattice)) pot.add_term({v, w}, exchange, "exchange");
  return pot;
}

Potential hubbard_jw_potential(const Torus& lattice, double t_hop, double u, double mu) {
  const std::vector<long> order = snake_order(lattice);
  const Eigen::Index n_sites = lattice.site_count();
  const Eigen::Index n_modes = 2 * n_sites;
  checked_power(2, n_modes);

  std::vector<Eigen::Index> position(static_cast<size_t>(n_sites));
  for (Eigen::Index p = 0; p < n_sites; ++p)
    position[static_cast<size_t>(order[static_cast<size_t>(p)])] = p;
  auto mode = [&](long site, int spin) { return 2 * position[static_cast<size_t>(site)] + spin; };

  // Hopping between modes a < b maps to -t/2 (X Z..Z X + Y Z..Z Y) on the
  // interval [a, b]; the interior Z's are the fermion parity string.
  auto string_hop = [&](Eigen::Index a, Eigen::Index b) {
    std::vector<cmat> xs, ys;
    xs.push_back(pauli('X'));
    ys.push_back(pauli('Y'));
    for (Eigen::Index k = a + 1; k < b; ++k) {
      xs.push_back(pauli('Z'));
      ys.push_back(pauli('Z'));
    }
    xs.push_back(pauli('X'));
    ys.push_back(pauli('Y'));
    return cmat(-0.5 * t_hop * (tensor_chain(xs) + tensor_chain(ys)));
  };

  Potential pot(Torus(1, static_cast<int>(n_modes)), 2);
  cmat occupation(2, 2);
  occupation << 0, 0, 0, 1;

  for (const auto& [v, w] : canonical_edges(lattice)) {
    for (int spin = 0; spin < 2; ++spin) {
      Eigen::Index a = mode(v, spin), b = mode(w, spin);
      if (a > b) std::swap(a, b);
      std::vector<long> span;
      for (Eigen::Index k = a; k <= b; ++k) span.push_back(static_cast<long>(k));
      pot.add_term(std::move(span), string_hop(a, b), "hop");
    }
  }
  if (u != 0.0)
    for (long v = 0; v < n_sites; ++v) {
      const long up = static_cast<long>(mode(v, 0)), down = static_cast<long>(mode(v, 1));
      pot.add_term({up, down}, u * tensor_product(occupation, occupation), "pair");
    }
  if (mu != 0.0)
    for (Eigen::Index k = 0; k < n_modes; ++k)
      pot.add_term({static_cast<long>(k)}, -mu * occupation, "chemical");
  return pot;
}

Potential preset_potential(const std::string& name, const Torus& lattice,
                           const PresetParams& params) {
  if (name == "tfim") return tfim(lattice, params.j, params.g);
  if (name == "heisenberg") return heisenberg(lattice, params.jx, params.jy, params.jz);
  if (name == "hubbard_jw") return hubbard_jw_potential(lattice, params.t, params.u, params.mu);
  throw parameter_error("preset_potential: unknown preset '" + name + "'");
}

GapInfo spectral_gap(const cmat& h, double degeneracy_tol, Eigen::Index report) {
  const EigenSystem es = eigh(h);
  const Eigen::Index n = es.values.size();
  GapInfo info;
  info.ground_energy = es.values[0];
  Eigen::Index deg = 1;
  while (deg < n && es.values[deg] - info.ground_energy <= degeneracy_tol) ++deg;
  info.ground_degeneracy = deg;
  info.gap = (deg < n) ? es.values[deg] - info.ground_energy : 0.0;
  info.lowest = es.values.head(std::min(report, n));
  return info;
}

SpectralData spectral_data(const cmat& h, Eigen::Index q, double gap_floor) {
  if (q < 1) throw parameter_error("spectral_data: ground multiplicity must be >= 1");
  const EigenSystem es = eigh(h);
  if (q >= es.values.size())
    throw dimension_error("spectral_data: multiplicity must leave room for an excited level");
  SpectralData data;
  data.values = es.values;
  data.q = q;
  data.delta = es.values[q] - es.values[q - 1];
  data.spread = es.values[q - 1] - es.values[0];
  data.gapped = data.delta > gap_floor;
  return data;
}

RadialProfile quasi_local_decompose(const Potential& pot, long center) {
  if (center < 0 || center >= pot.lattice().site_count())
    throw dimension_error("quasi_local_decompose: center out of range");
  RadialProfile profile;
  profile.center = center;
  // A term belongs to the cluster of its anchor (first listed) site, so the
  // per-site clusters partition the potential; the radius of a term is the
  // farthest site it touches, measured from the anchor.
  for (const auto& term : pot.terms()) {
    if (term.sites.front() != center) continue;
    long radius = 0;
    for (long s : term.sites)
      radius = std::max(radius, static_cast<long>(pot.lattice().distance(center, s)));
    if (static_cast<size_t>(radius) >= profile.norm_by_radius.size())
      profile.norm_by_radius.resize(static_cast<size_t>(radius) + 1, 0.0);
    profile.norm_by_radius[static_cast<size_t>(radius)] += operator_norm(term.op);
  }
  // Least-squares slope of ln(norm) against ln(r) over populated radii >= 1.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int pts = 0;
  for (size_t r = 1; r < profile.norm_by_radius.size(); ++r) {
    if (profile.norm_by_radius[r] <= 0.0) continue;
    const double x = std::log(static_cast<double>(r));
    const double y = std::log(profile.norm_by_radius[r]);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++pts;
  }
  const double var = pts * sxx - sx * sx;
  profile.decay_exponent = (pts >= 2 && var > 1e-12)
                               ? (pts * sxy - sx * sy) / var
                               : std::numeric_limits<double>::quiet_NaN();
  return profile;
}

cmat translation_operator(const Torus& lattice, int axis, Eigen::Index local_dim) {
  if (axis < 0 || axis >= lattice.nu) throw parameter_error("translation_operator: bad axis");
  const Eigen::Index n = lattice.site_count();
  const Eigen::Index dim = checked_power(local_dim, n);

  // Site permutation: shift coordinates by +1 along the axis.
  std::vector<long> image(static_cast<size_t>(n));
  for (long v = 0; v < n; ++v) {
    auto c = lattice.coords(v);
    c[static_cast<size_t>(axis)] = (c[static_cast<size_t>(axis)] + 1) % lattice.L;
    image[static_cast<size_t>(v)] = lattice.site(c);
  }

  cmat t = cmat::Zero(dim, dim);
  std::vector<Eigen::Index> digits(static_cast<size_t>(n));
  for (Eigen::Index in = 0; in < dim; ++in) {
    Eigen::Index rest = in;
    for (long v = n - 1; v >= 0; --v) {  // site 0 is the most significant digit
      digits[static_cast<size_t>(v)] = rest % local_dim;
      rest /= local_dim;
    }
    Eigen::Index out = 0;
    std::vector<Eigen::Index> moved(static_cast<size_t>(n));
    for (long v = 0; v < n; ++v) moved[static_cast<size_t>(image[static_cast<size_t>(v)])] =
        digits[static_cast<size_t>(v)];
    for (long v = 0; v < n; ++v) out = out * local_dim + moved[static_cast<size_t>(v)];
    t(out, in) = 1.0;
  }
  return t;
}

cmat jw_annihilator(Eigen::Index n_modes, Eigen::Index j) {
  if (n_modes < 1 || j < 0 || j >= n_modes) throw dimension_error("jw_annihilator: mode out of range");
  checked_power(2, n_modes);
  cmat lower(2, 2);
  lower << 0, 1, 0, 0;  // |0><1|
  std::vector<cmat> chain;
  chain.reserve(static_cast<size_t>(n_modes));
  for (Eigen::Index k = 0; k < n_modes; ++k) {
    if (k < j) chain.push_back(pauli('Z'));
    else if (k == j) chain.push_back(lower);
    else chain.push_back(pauli('I'));
  }
  return tensor_chain(chain);
}

cmat jw_number(Eigen::Index n_modes, Eigen::Index j) {
  if (n_modes < 1 || j < 0 || j >= n_modes) throw dimension_error("jw_number: mode out of range");
  const Layout layout(static_cast<size_t>(n_modes), 2);
  cmat n(2, 2);
  n << 0, 0, 0, 1;  // (1 - Z)/2
  return embed(n, {static_cast<int>(j)}, layout);
}

cmat jw_total_number(Eigen::Index n_modes) {
  const Eigen::Index dim = checked_power(2, n_modes);
  cmat total = cmat::Zero(dim, dim);
  for (Eigen::Index j = 0; j < n_modes; ++j) total += jw_number(n_modes, j);
  return total;
}

std::vector<long> snake_order(const Torus& lattice) {
  const long n = lattice.site_count();
  std::vector<long> order;
  order.reserve(static_cast<size_t>(n));
  if (lattice.nu == 1) {
    for (long v = 0; v < n; ++v) order.push_back(v);
    return order;
  }
  if (lattice.nu == 2) {
    const long l = lattice.L;
    for (long r = 0; r < l; ++r) {
      for (long c = 0; c < l; ++c) {
        const long col = (r % 2 == 0) ? c : l - 1 - c;
        order.push_back(r * l + col);
      }
    }
    return order;
  }
  throw parameter_error("snake_order: defined for 1d and 2d lattices");
}

cmat hopping_hamiltonian(Eigen::Index n_modes,
                         const std::vector<std::pair<Eigen::Index, Eigen::Index>>& edges,
                         double t_hop) {
  const Eigen::Index dim = checked_power(2, n_modes);
  cmat h = cmat::Zero(dim, dim);
  for (const auto& [i, j] : edges) {
    if (i == j) throw parameter_error("hopping_hamiltonian: self-edge");
    const cmat ci = jw_annihilator(n_modes, i);
    const cmat cj = jw_annihilator(n_modes, j);
    const cmat hop = ci.adjoint() * cj;
    h -= t_hop * (hop + hop.adjoint());
  }
  return h;
}

cmat hubbard_hamiltonian(const Torus& lattice, double t_hop, double u, double mu) {
  const std::vector<long> order = snake_order(lattice);
  const Eigen::Index n_sites = lattice.site_count();
  const Eigen::Index n_modes = 2 * n_sites;
  const Eigen::Index dim = checked_power(2, n_modes);

  // Mode index of (site, spin): interleaved along the snake.
  std::vector<Eigen::Index> position(static_cast<size_t>(n_sites));
  for (Eigen::Index p = 0; p < n_sites; ++p) position[static_cast<size_t>(order[static_cast<size_t>(p)])] = p;
  auto mode = [&](long site, int spin) {
    return 2 * position[static_cast<size_t>(site)] + spin;
  };

  std::vector<std::pair<Eigen::Index, Eigen::Index>> edges;
  for (const auto& [v, w] : canonical_edges(lattice)) {
    edges.push_back({mode(v, 0), mode(w, 0)});
    edges.push_back({mode(v, 1), mode(w, 1)});
  }
  cmat h = hopping_hamiltonian(n_modes, edges, t_hop);
  for (long v = 0; v < n_sites; ++v)
    h += u * jw_number(n_modes, mode(v, 0)) * jw_number(n_modes, mode(v, 1));
  if (mu != 0.0) h -= mu * jw_total_number(n_modes);
  (void)dim;
  return h;
}

}  // namespace entlab

#include "entlab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace entlab {

namespace {

constexpr double kHardDominationConstant = 11.0;  // trace-norm commutator cap

double term_diameter(const Torus& t, const std::vector<long>& sites) {
  double diam = 0.0;
  for (size_t i = 0; i < sites.size(); ++i)
    for (size_t j = i + 1; j < sites.size(); ++j)
      diam = std::max(diam, static_cast<double>(t.distance(sites[i], sites[j])));
  return diam;
}

long torus_diameter(const Torus& t) {
  long diam = 0;
  for (long v = 0; v < t.site_count(); ++v) diam = std::max(diam, static_cast<long>(t.distance(0, v)));
  return diam;
}

// Norm of the terms containing both v and w (all terms containing v if v == w).
double pair_interaction_sum(const Potential& pot, const std::vector<double>& norms, long v, long w) {
  double sum = 0.0;
  for (size_t k = 0; k < pot.terms().size(); ++k) {
    const auto& sites = pot.terms()[k].sites;
    const bool has_v = std::find(sites.begin(), sites.end(), v) != sites.end();
    const bool has_w = std::find(sites.begin(), sites.end(), w) != sites.end();
    if (has_v && has_w) sum += norms[k];
  }
  return sum;
}

void check_local_operator(const Potential& pot, const LocalOperator& lo, const char* who) {
  if (lo.support.empty()) throw parameter_error(std::string(who) + ": empty support");
  std::set<long> distinct(lo.support.begin(), lo.support.end());
  if (distinct.size() != lo.support.size())
    throw parameter_error(std::string(who) + ": repeated site in support");
  for (long s : lo.support)
    if (s < 0 || s >= pot.lattice().site_count())
      throw dimension_error(std::string(who) + ": support site out of range");
  Eigen::Index dim = 1;
  for (size_t i = 0; i < lo.support.size(); ++i) dim *= pot.local_dim();
  if (lo.op.rows() != lo.op.cols() || lo.op.rows() != dim)
    throw dimension_error(std::string(who) + ": operator does not match its support");
}

std::vector<int> to_slots(const Region& region) {
  std::vector<int> slots;
  slots.reserve(region.size());
  for (long s : region) slots.push_back(static_cast<int>(s));
  return slots;
}

}  // namespace

cmat heisenberg_evolve(const EigenSystem& es, double t, const cmat& a) {
  if (a.rows() != a.cols() || a.rows() != es.values.size())
    throw dimension_error("heisenberg_evolve: operator does not match the Hamiltonian");
  // In the eigenbasis the conjugation is entrywise: w_ij -> e^{-i(E_i-E_j)t} w_ij.
  cmat w = es.vectors.adjoint() * a * es.vectors;
  for (Eigen::Index i = 0; i < w.rows(); ++i)
    for (Eigen::Index j = 0; j < w.cols(); ++j)
      w(i, j) *= std::exp(cxd(0.0, -(es.values[i] - es.values[j]) * t));
  return es.vectors * w * es.vectors.adjoint();
}

cmat heisenberg_evolve(const cmat& h, double t, const cmat& a) {
  return heisenberg_evolve(eigh(h), t, a);
}

double interaction_strength(const Potential& pot, double mu) {
  const std::vector<double> norms = pot.term_norms();
  double best = 0.0;
  for (long v = 0; v < pot.lattice().site_count(); ++v) {
    double sum = 0.0;
    for (size_t k = 0; k < pot.terms().size(); ++k) {
      const auto& sites = pot.terms()[k].sites;
      if (std::find(sites.begin(), sites.end(), v) == sites.end()) continue;
      sum += norms[k] * static_cast<double>(sites.size()) *
             std::exp(mu * term_diameter(pot.lattice(), sites));
    }
    best = std::max(best, sum);
  }
  return best;
}

double lr_strict_bound(double norm_a, double norm_b, long x_size, double s, double mu, double t,
                       long dist) {
  return 2.0 * norm_a * norm_b * static_cast<double>(x_size) *
         std::exp(2.0 * s * std::abs(t) - mu * static_cast<double>(dist));
}

double lr_kernel_bound(double norm_a, double norm_b, long x_size, long y_size,
                       double kernel_at_d, double lambda, double t) {
  if (lambda <= 0.0) throw parameter_error("lr_kernel_bound: lambda must be positive");
  return 2.0 * norm_a * norm_b * static_cast<double>(x_size) * static_cast<double>(y_size) *
         kernel_at_d * std::exp(2.0 * lambda * std::abs(t)) / lambda;
}

std::vector<double> dominating_exponential_kernel(const Potential& pot, double mu) {
  const Torus& t = pot.lattice();
  const std::vector<double> norms = pot.term_norms();
  double scale = 0.0;
  for (long v = 0; v < t.site_count(); ++v)
    for (long w = v; w < t.site_count(); ++w) {
      const double sum = pair_interaction_sum(pot, norms, v, w);
      if (sum > 0.0) scale = std::max(scale, sum * std::exp(mu * t.distance(v, w)));
    }
  std::vector<double> kernel(static_cast<size_t>(torus_diameter(t)) + 1);
  for (size_t d = 0; d < kernel.size(); ++d)
    kernel[d] = scale * std::exp(-mu * static_cast<double>(d));
  return kernel;
}

KernelDomination kernel_domination_check(const Potential& pot, const std::vector<double>& kernel) {
  const Torus& t = pot.lattice();
  if (static_cast<long>(kernel.size()) <= torus_diameter(t))
    throw dimension_error("kernel_domination_check: kernel shorter than the lattice diameter");
  const std::vector<double> norms = pot.term_norms();
  KernelDomination result{true, std::numeric_limits<double>::infinity(), 0, 0};
  for (long v = 0; v < t.site_count(); ++v)
    for (long w = v; w < t.site_count(); ++w) {
      const double margin =
          kernel[static_cast<size_t>(t.distance(v, w))] - pair_interaction_sum(pot, norms, v, w);
      if (margin < result.worst_margin) {
        result.worst_margin = margin;
        result.v = v;
        result.w = w;
      }
    }
  result.ok = result.worst_margin >= -1e-12;
  return result;
}

LrReport lr_check(const Potential& pot, const LocalOperator& a, const LocalOperator& b,
                  const std::vector<double>& t_grid, double mu,
                  const std::vector<double>& kernel) {
  check_local_operator(pot, a, "lr_check(a)");
  check_local_operator(pot, b, "lr_check(b)");
  for (long s : a.support)
    if (std::find(b.support.begin(), b.support.end(), s) != b.support.end())
      throw parameter_error("lr_check: supports overlap");
  if (t_grid.empty()) throw parameter_error("lr_check: empty time grid");

  LrReport report;
  report.mu = mu;
  report.s = interaction_strength(pot, mu);
  report.norm_a = operator_norm(a.op);
  report.norm_b = operator_norm(b.op);
  report.trivial_cap = 2.0 * report.norm_a * report.norm_b;
  report.lambda = std::numeric_limits<double>::quiet_NaN();
  report.violations = 0;
  report.max_ratio = 0.0;

  long dist = std::numeric_limits<long>::max();
  for (long x : a.support)
    for (long y : b.support) dist = std::min(dist, static_cast<long>(pot.lattice().distance(x, y)));
  report.dist = dist;

  const bool with_kernel = !kernel.empty();
  if (with_kernel) {
    const KernelDomination dom = kernel_domination_check(pot, kernel);
    if (!dom.ok)
      throw parameter_error("lr_check: kernel does not dominate the pairwise interaction sums");
    report.lambda = reproducing_constant(pot.lattice(), kernel).lambda;
  }

  const Layout layout(static_cast<size_t>(pot.lattice().site_count()), pot.local_dim());
  const cmat a_full = embed(a.op, to_slots(a.support), layout);
  const cmat b_full = embed(b.op, to_slots(b.support), layout);
  const EigenSystem es = eigh(pot.assemble());

  const double tol = 1e-9;
  for (double t : t_grid) {
    LrRow row;
    row.t = t;
    row.bound_strict = lr_strict_bound(report.norm_a, report.norm_b,
                                       static_cast<long>(a.support.size()), report.s, mu, t, dist);
    row.bound_kernel = with_kernel
                           ? lr_kernel_bound(report.norm_a, report.norm_b,
                                             static_cast<long>(a.support.size()),
                                             static_cast<long>(b.support.size()),
                                             kernel[static_cast<size_t>(dist)], report.lambda, t)
                           : std::numeric_limits<double>::quiet_NaN();
    const bool strict_active = row.bound_strict < report.trivial_cap;
    const bool kernel_active = with_kernel && row.bound_kernel < report.trivial_cap;
    row.vacuous = !strict_active && !kernel_active;
    row.exact_norm = std::numeric_limits<double>::quiet_NaN();
    row.violation = false;
    if (!row.vacuous) {
      const cmat evolved = heisenberg_evolve(es, t, a_full);
      row.exact_norm = operator_norm(evolved * b_full - b_full * evolved);
      if (strict_active) {
        report.max_ratio = std::max(report.max_ratio, row.exact_norm / row.bound_strict);
        if (row.exact_norm > row.bound_strict + tol) row.violation = true;
      }
      if (kernel_active) {
        report.max_ratio = std::max(report.max_ratio, row.exact_norm / row.bound_kernel);
        if (row.exact_norm > row.bound_kernel + tol) row.violation = true;
      }
      if (row.violation) ++report.violations;
    }
    report.rows.push_back(row);
  }
  return report;
}

double incremental_entangling_factor(double n_min) {
  if (n_min < 1.0) throw parameter_error("incremental_entangling_factor: dimension below one");
  if (n_min == 1.0) return 0.0;  // nothing on one side: the term cannot entangle
  const double nsq = n_min * n_min;
  // n^2 h(1/n^2) = ln(n^2) + (n^2 - 1) ln(n^2/(n^2-1)), evaluated stably.
  const double value = std::log(nsq) - (nsq - 1.0) * std::log1p(-1.0 / nsq);
  return kHardDominationConstant * value;
}

RealtimeRate realtime_entropy_rate(const Potential& pot, const cvec& psi, const Region& region,
                                   double floor) {
  const Torus& torus = pot.lattice();
  const Eigen::Index n_sites = torus.site_count();
  const Layout layout(static_cast<size_t>(n_sites), pot.local_dim());
  if (psi.size() != layout_dim(layout))
    throw dimension_error("realtime_entropy_rate: state does not match the lattice");
  if (std::abs(psi.norm() - 1.0) > 1e-8)
    throw parameter_error("realtime_entropy_rate: state is not normalized");

  Region keep = region;
  std::sort(keep.begin(), keep.end());
  const CutProfile profile = boundary_profile(torus, keep);  // validates the bipartition
  const std::vector<int> keep_slots = to_slots(keep);

  RealtimeRate result;
  result.area = static_cast<double>(profile.area);
  result.fd_fallback = false;
  result.interior_max = 0.0;
  result.rate = 0.0;

  // State-independent area-law caps, grouped by cluster radius.  A cluster of
  // radius r crossing the cut has at most (2r+1)^nu sites, so its smaller cut
  // side has dimension at most d^((2r+1)^nu / 2); its anchor lies within r of
  // the boundary, so at most M(r) anchors contribute.
  std::vector<double> radius_norm;  // max over anchors of summed term norms
  {
    std::vector<std::vector<double>> per_anchor(static_cast<size_t>(n_sites));
    const std::vector<double> norms = pot.term_norms();
    for (size_t k = 0; k < pot.terms().size(); ++k) {
      const auto& sites = pot.terms()[k].sites;
      const long anchor = sites.front();
      long radius = 0;
      for (long s : sites)
        radius = std::max(radius, static_cast<long>(torus.distance(anchor, s)));
      auto& bucket = per_anchor[static_cast<size_t>(anchor)];
      if (static_cast<size_t>(radius) >= bucket.size()) bucket.resize(static_cast<size_t>(radius) + 1, 0.0);
      bucket[static_cast<size_t>(radius)] += norms[k];
    }
    for (const auto& bucket : per_anchor) {
      if (bucket.size() > radius_norm.size()) radius_norm.resize(bucket.size(), 0.0);
      for (size_t r = 0; r < bucket.size(); ++r) radius_norm[r] = std::max(radius_norm[r], bucket[r]);
    }
  }
  auto sites_within = [&](long r) {
    const auto& counts = profile.counts;
    if (counts.empty()) return static_cast<long>(0);
    const size_t idx = std::min(static_cast<size_t>(r), counts.size() - 1);
    return counts[idx];
  };
  result.bound = 0.0;
  result.area_bound = 0.0;
  const double nu = static_cast<double>(torus.nu);
  const double ln_d = std::log(static_cast<double>(pot.local_dim()));
  for (size_t r = 1; r < radius_norm.size(); ++r) {
    if (radius_norm[r] <= 0.0) continue;
    const double ball_sites = std::pow(2.0 * static_cast<double>(r) + 1.0, nu);
    const double half_side = std::floor(ball_sites / 2.0);
    const double factor = incremental_entangling_factor(std::exp(half_side * ln_d));
    result.bound += static_cast<double>(sites_within(static_cast<long>(r))) * factor * radius_norm[r];
    result.area_bound += 2.0 * result.area * ball_sites * factor * radius_norm[r];
  }

  // The rate itself: reduced state of the region, then one inner product per
  // term against log(rho) tensor identity.
  const cmat rho = reduced_density(psi, layout, keep_slots);
  const EigenSystem spectrum = eigh(rho);
  if (spectrum.values[0] < floor) {
    // Rank-deficient marginal: the support-log form is singular, so take a
    // symmetric difference quotient of the entropy under the full evolution.
    result.fd_fallback = true;
    const EigenSystem es = eigh(pot.assemble());
    const double dt = 1e-5;
    auto entropy_at = [&](double t) {
      cvec evolved = es.vectors.adjoint() * psi;
      for (Eigen::Index i = 0; i < evolved.size(); ++i)
        evolved[i] *= std::exp(cxd(0.0, -es.values[i] * t));
      evolved = es.vectors * evolved;
      return von_neumann_entropy(reduced_density(evolved, layout, keep_slots), floor);
    };
    result.rate = (entropy_at(dt) - entropy_at(-dt)) / (2.0 * dt);
    return result;
  }

  const cmat log_rho = hermitian_log_support(rho, floor);
  const cvec m_psi = embed(log_rho, keep_slots, layout) * psi;
  for (const auto& term : pot.terms()) {
    const cvec h_psi = embed(term.op, to_slots(term.sites), layout) * psi;
    const double contribution = -2.0 * m_psi.dot(h_psi).imag();
    result.contributions.push_back(contribution);
    result.rate += contribution;

    bool any_inside = false, any_outside = false;
    for (long s : term.sites) {
      if (std::binary_search(keep.begin(), keep.end(), s)) any_inside = true;
      else any_outside = true;
    }
    if (!(any_inside && any_outside))
      result.interior_max = std::max(result.interior_max, std::abs(contribution));
  }
  return result;
}

}  // namespace entlab

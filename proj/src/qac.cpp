#include "entlab/qac.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace entlab {

namespace {

// 16-point Gauss-Legendre nodes and weights on [-1, 1].
constexpr int kGlOrder = 16;
constexpr double kGlNode[kGlOrder / 2] = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
    0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499};
constexpr double kGlWeight[kGlOrder / 2] = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

template <typename F>
double gauss_panel(F&& f, double lo, double hi) {
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  double sum = 0.0;
  for (int i = 0; i < kGlOrder / 2; ++i)
    sum += kGlWeight[i] * (f(mid - half * kGlNode[i]) + f(mid + half * kGlNode[i]));
  return half * sum;
}

long torus_diameter(const Torus& t) {
  long diam = 0;
  for (long v = 0; v < t.site_count(); ++v) diam = std::max(diam, static_cast<long>(t.distance(0, v)));
  return diam;
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double var = sxx - sx * sx / n;
  if (var <= 1e-12) return std::numeric_limits<double>::quiet_NaN();
  return (sxy - sx * sy / n) / var;
}

// Assemble the terms of `pot` whose sites all lie in the sorted set `lambda`,
// as an operator on the lambda factors only.
cmat assemble_on(const Potential& pot, const Region& lambda) {
  const Layout layout(lambda.size(), pot.local_dim());
  cmat h = cmat::Zero(layout_dim(layout), layout_dim(layout));
  for (const auto& term : pot.terms()) {
    std::vector<int> slots;
    slots.reserve(term.sites.size());
    bool inside = true;
    for (long s : term.sites) {
      const auto it = std::lower_bound(lambda.begin(), lambda.end(), s);
      if (it == lambda.end() || *it != s) {
        inside = false;
        break;
      }
      slots.push_back(static_cast<int>(it - lambda.begin()));
    }
    if (inside) h += embed(term.op, slots, layout);
  }
  return h;
}

cmat spectral_generator(const EigenSystem& es, const cmat& dh, const FilterFunction& filter) {
  cmat m = es.vectors.adjoint() * dh * es.vectors;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      m(i, j) *= cxd(0.0, -filter.weight(es.values[i] - es.values[j]));
  return es.vectors * m * es.vectors.adjoint();
}

// Polar re-unitarization by Newton-Schulz: for X already close to unitary,
// X (3 - X^dag X)/2 squares the distance to the unitary polar factor.
cmat polar_unitary(cmat x) {
  for (int pass = 0; pass < 3; ++pass) {
    const cmat gram = x.adjoint() * x;
    const double defect = (gram - cmat::Identity(x.rows(), x.cols())).norm();
    if (defect < 1e-14) break;
    x = 0.5 * x * (3.0 * cmat::Identity(x.rows(), x.cols()) - gram);
  }
  return x;
}

std::vector<int> region_slots(const Region& sorted) {
  std::vector<int> slots;
  slots.reserve(sorted.size());
  for (long s : sorted) slots.push_back(static_cast<int>(s));
  return slots;
}

}  // namespace

FilterFunction::FilterFunction(double delta, double sharpness)
    : delta_(delta), sharpness_(sharpness) {
  if (!(delta > 0.0)) throw parameter_error("filter: gap scale must be positive");
  if (!(sharpness >= 0.1 && sharpness <= 50.0))
    throw parameter_error("filter: sharpness outside the stable range [0.1, 50]");
}

double FilterFunction::bump(double x) const {
  if (std::abs(x) >= 1.0) return 0.0;
  return std::exp(sharpness_ * (1.0 - 1.0 / (1.0 - x * x)));
}

double FilterFunction::weight(double omega) const {
  if (omega == 0.0) return 0.0;
  const double x = omega / delta_;
  if (std::abs(x) >= 1.0) return -1.0 / omega;
  // -(1 - bump)/omega with the cancellation done by expm1.
  return std::expm1(sharpness_ * (1.0 - 1.0 / (1.0 - x * x))) / omega;
}

double FilterFunction::time_profile(double t) const {
  if (t == 0.0) return 0.0;
  if (t < 0.0) return -time_profile(-t);
  // (1/pi) (int_0^1 bump(x) sin(x delta t)/x dx - pi/2); enough panels to
  // resolve the oscillation.
  const int panels = std::max(8, static_cast<int>(std::ceil(delta_ * t / 2.0)) + 4);
  auto integrand = [&](double x) { return bump(x) * std::sin(x * delta_ * t) / x; };
  double integral = 0.0;
  for (int p = 0; p < panels; ++p)
    integral += gauss_panel(integrand, static_cast<double>(p) / panels,
                            static_cast<double>(p + 1) / panels);
  return (integral - M_PI / 2.0) / M_PI;
}

FilterFunction build_filter(double delta, double sharpness) {
  return FilterFunction(delta, sharpness);
}

double filter_decay_exponent(const FilterFunction& filter, double t_lo, double t_hi, int windows) {
  if (!(t_lo > 0.0 && t_hi > t_lo)) throw parameter_error("filter decay: bad time window");
  if (windows < 2) throw parameter_error("filter decay: need at least two windows");
  const int samples_per_window = 40;
  std::vector<double> log_t, log_f;
  const double width = (t_hi - t_lo) / windows;
  for (int w = 0; w < windows; ++w) {
    const double lo = t_lo + w * width;
    double peak = 0.0;
    for (int i = 0; i < samples_per_window; ++i) {
      const double t = lo + width * (i + 0.5) / samples_per_window;
      peak = std::max(peak, std::abs(filter.time_profile(t)));
    }
    if (peak < 1e-300) continue;
    log_t.push_back(std::log(lo + width / 2));
    log_f.push_back(std::log(peak));
  }
  if (log_t.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  return least_squares_slope(log_t, log_f);
}

QAPath make_path(Potential h0, Potential h1, double gap_floor) {
  if (h0.lattice().nu != h1.lattice().nu || h0.lattice().L != h1.lattice().L)
    throw parameter_error("path endpoints live on different lattices");
  if (h0.local_dim() != h1.local_dim())
    throw parameter_error("path endpoints have different local dimensions");
  if (!(gap_floor > 0.0)) throw parameter_error("path gap floor must be positive");
  return QAPath{std::move(h0), std::move(h1), gap_floor};
}

QAPath tfim_path(const Torus& lattice, double j, double g0, double g1, double gap_floor) {
  return make_path(tfim(lattice, j, g0), tfim(lattice, j, g1), gap_floor);
}

Potential path_potential(const QAPath& path, double s) {
  Potential out(path.h0.lattice(), path.h0.local_dim());
  for (const auto& term : path.h0.terms())
    if (std::abs(1.0 - s) > 1e-15) out.add_term(term.sites, (1.0 - s) * term.op, term.label);
  for (const auto& term : path.h1.terms())
    if (std::abs(s) > 1e-15) out.add_term(term.sites, s * term.op, term.label);
  return out;
}

Potential path_derivative(const QAPath& path) {
  // h1 - h0, with terms on identical site sets merged so that couplings held
  // fixed along the path drop out instead of lingering as canceling pairs
  // (their phantom support would otherwise widen every truncation ball).
  std::vector<std::pair<std::vector<long>, cmat>> merged;
  auto accumulate = [&](const std::vector<long>& sites, const cmat& op) {
    for (auto& entry : merged)
      if (entry.first == sites) {
        entry.second += op;
        return;
      }
    merged.emplace_back(sites, op);
  };
  for (const auto& term : path.h1.terms()) accumulate(term.sites, term.op);
  for (const auto& term : path.h0.terms()) accumulate(term.sites, -term.op);
  Potential out(path.h0.lattice(), path.h0.local_dim());
  for (const auto& entry : merged)
    if (entry.second.norm() > 1e-13) out.add_term(entry.first, entry.second);
  return out;
}

cmat filtered_generator(const cmat& h, const cmat& dh, const FilterFunction& filter) {
  if (h.rows() != h.cols() || dh.rows() != dh.cols() || h.rows() != dh.rows())
    throw dimension_error("filtered_generator: mismatched operators");
  return spectral_generator(eigh(h), dh, filter);
}

cmat qac_generator(const QAPath& path, double s, const FilterFunction& filter) {
  const EigenSystem es = eigh(path_potential(path, s).assemble());
  const double gap = es.values[1] - es.values[0];
  const double threshold = std::max(path.gap_floor, filter.delta());
  if (gap < threshold)
    throw path_error("gap " + std::to_string(gap) + " below the filter scale at s=" +
                     std::to_string(s));
  return spectral_generator(es, path_derivative(path).assemble(), filter);
}

TruncatedGenerators truncated_generators(const QAPath& path, double s,
                                         const FilterFunction& filter, long center, int r_max) {
  const Torus& torus = path.h0.lattice();
  if (center < 0 || center >= torus.site_count())
    throw dimension_error("truncated_generators: center off the lattice");
  if (r_max < 0 || r_max > torus_diameter(torus))
    throw parameter_error("truncated_generators: ball exceeds the lattice");

  const Potential pot_s = path_potential(path, s);
  const Potential deriv = path_derivative(path);
  // The center's own derivative terms; their support joins every ball.
  Region dh_support;
  Potential dh_center(torus, path.h0.local_dim());
  for (const auto& term : deriv.terms()) {
    if (term.sites.front() != center) continue;
    dh_center.add_term(term.sites, term.op, term.label);
    for (long site : term.sites) dh_support.push_back(site);
  }
  std::sort(dh_support.begin(), dh_support.end());
  dh_support.erase(std::unique(dh_support.begin(), dh_support.end()), dh_support.end());

  TruncatedGenerators out;
  cmat prev;        // generator on the previous shell's factors
  Region prev_set;  // its support
  for (int r = 0; r <= r_max; ++r) {
    Region lambda = torus.ball(center, r);
    lambda.insert(lambda.end(), dh_support.begin(), dh_support.end());
    std::sort(lambda.begin(), lambda.end());
    lambda.erase(std::unique(lambda.begin(), lambda.end()), lambda.end());

    if (r > 0 && lambda == prev_set) {
      // The ball stopped growing: nothing new can appear.
      out.slices.push_back(cmat::Zero(prev.rows(), prev.cols()));
      out.support.push_back(lambda);
      out.norms.push_back(0.0);
      continue;
    }

    const cmat h_res = assemble_on(pot_s, lambda);
    const cmat a_res = assemble_on(dh_center, lambda);
    const cmat gen = spectral_generator(eigh(h_res), a_res, filter);

    cmat slice = gen;
    if (r > 0) {
      // Lift the previous generator into the current factors and subtract.
      std::vector<int> slots;
      for (long site : prev_set)
        slots.push_back(static_cast<int>(
            std::lower_bound(lambda.begin(), lambda.end(), site) - lambda.begin()));
      const Layout layout(lambda.size(), path.h0.local_dim());
      slice -= embed(prev, slots, layout);
    }
    out.slices.push_back(slice);
    out.support.push_back(lambda);
    out.norms.push_back(operator_norm(slice));
    prev = gen;
    prev_set = lambda;
  }

  std::vector<double> log_r, log_n;
  for (int r = 2; r <= r_max; ++r)
    if (out.norms[static_cast<size_t>(r)] > 1e-300) {
      log_r.push_back(std::log(static_cast<double>(r)));
      log_n.push_back(std::log(out.norms[static_cast<size_t>(r)]));
    }
  out.decay_exponent = log_r.size() >= 2 ? least_squares_slope(log_r, log_n)
                                         : std::numeric_limits<double>::quiet_NaN();
  return out;
}

TransportResult transport(const QAPath& path, const FilterFunction& filter, const Region& region,
                          int steps) {
  if (steps < 1) throw parameter_error("transport: need at least one step");
  const Torus& torus = path.h0.lattice();
  const Layout layout(static_cast<size_t>(torus.site_count()), path.h0.local_dim());
  Region keep = region;
  std::sort(keep.begin(), keep.end());
  const CutProfile profile = boundary_profile(torus, keep);
  const std::vector<int> keep_slots = region_slots(keep);
  const double threshold = std::max(path.gap_floor, filter.delta());

  TransportResult result;
  result.area = static_cast<double>(profile.area);
  result.aborted = false;
  result.rate_violations = 0;
  result.max_unitarity_defect = 0.0;

  // Entropy-rate cap from the quasi-local slices of the generator: sample the
  // slice norms along the path, cap the number of cut-crossing centers at
  // radius r by the profile count, and weight each by its entangling
  // capacity.  Translation invariance lets one center stand for all.
  const int r_max = static_cast<int>(torus_diameter(torus));
  std::vector<double> worst_norm;
  std::vector<size_t> lambda_size;
  std::vector<long> lambda_radius;  // actual support radius of slice r
  for (int i = 0; i <= 10; ++i) {
    const TruncatedGenerators tg =
        truncated_generators(path, static_cast<double>(i) / 10.0, filter, 0, r_max);
    if (worst_norm.size() < tg.norms.size()) worst_norm.resize(tg.norms.size(), 0.0);
    if (lambda_size.size() < tg.support.size()) lambda_size.resize(tg.support.size(), 0);
    if (lambda_radius.size() < tg.support.size()) lambda_radius.resize(tg.support.size(), 0);
    for (size_t r = 0; r < tg.norms.size(); ++r) {
      worst_norm[r] = std::max(worst_norm[r], tg.norms[r]);
      lambda_size[r] = std::max(lambda_size[r], tg.support[r].size());
      for (long site : tg.support[r])
        lambda_radius[r] =
            std::max(lambda_radius[r], static_cast<long>(torus.distance(0, site)));
    }
  }
  auto sites_within = [&](long r) {
    const auto& counts = profile.counts;
    return counts[std::min(static_cast<size_t>(r), counts.size() - 1)];
  };
  const double ln_d = std::log(static_cast<double>(path.h0.local_dim()));
  double cap_total = 0.0;
  for (size_t r = 0; r < worst_norm.size(); ++r) {
    // A slice confined to one site can never straddle the cut.
    if (worst_norm[r] <= 0.0 || lambda_radius[r] == 0) continue;
    const double half_side = std::floor(static_cast<double>(lambda_size[r]) / 2.0);
    cap_total += static_cast<double>(sites_within(lambda_radius[r])) *
                 incremental_entangling_factor(std::exp(half_side * ln_d)) * worst_norm[r];
  }
  result.constant_c = cap_total / result.area;

  const cmat dh = path_derivative(path).assemble();
  const double ds = 1.0 / steps;
  auto checked_eigh = [&](double s) {
    EigenSystem es = eigh(path_potential(path, s).assemble());
    if (es.values[1] - es.values[0] < threshold) throw path_error("gap collapse");
    return es;
  };
  auto generator_at = [&](const EigenSystem& es) { return spectral_generator(es, dh, filter); };

  EigenSystem es_cur = checked_eigh(0.0);  // an invalid start is a hard error
  const cvec psi0 = es_cur.vectors.col(0);
  cmat u = cmat::Identity(psi0.size(), psi0.size());
  cmat k_cur = generator_at(es_cur);

  auto record = [&](double s, const EigenSystem& es, const cmat& k) {
    const cvec psi = u * psi0;
    const cmat rho = reduced_density(psi, layout, keep_slots);
    TransportStep step;
    step.s = s;
    step.gap = es.values[1] - es.values[0];
    step.fidelity = std::abs(cxd(es.vectors.col(0).dot(psi)));
    step.entropy = von_neumann_entropy(rho);
    const cvec m_psi = embed(hermitian_log_support(rho), keep_slots, layout) * psi;
    step.ds_rate = 2.0 * m_psi.dot(k * psi).imag();
    if (std::abs(step.ds_rate) > cap_total + 1e-9) ++result.rate_violations;
    result.max_unitarity_defect = std::max(
        result.max_unitarity_defect,
        (u.adjoint() * u - cmat::Identity(u.rows(), u.cols())).norm());
    result.trace.push_back(step);
  };

  double s = 0.0;
  record(s, es_cur, k_cur);
  result.last_valid_s = s;
  for (int k = 0; k < steps; ++k) {
    EigenSystem es_mid, es_next;
    try {
      es_mid = checked_eigh(s + ds / 2);
      es_next = checked_eigh(s + ds);
    } catch (const path_error&) {
      result.aborted = true;
      break;
    }
    const cmat k_mid = generator_at(es_mid);
    const cmat k_next = generator_at(es_next);
    const cxd i_unit(0.0, 1.0);
    const cmat f1 = i_unit * (k_cur * u);
    const cmat f2 = i_unit * (k_mid * (u + (ds / 2) * f1));
    const cmat f3 = i_unit * (k_mid * (u + (ds / 2) * f2));
    const cmat f4 = i_unit * (k_next * (u + ds * f3));
    u = polar_unitary(u + (ds / 6) * (f1 + 2.0 * f2 + 2.0 * f3 + f4));
    s += ds;
    es_cur = es_next;
    k_cur = k_next;
    record(s, es_cur, k_cur);
    result.last_valid_s = s;
  }

  result.entropy_change = result.trace.back().entropy - result.trace.front().entropy;
  result.fidelity_final = result.trace.back().fidelity;
  result.u_final = u;
  return result;
}

}  // namespace entlab

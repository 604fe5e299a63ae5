#include "entlab/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace entlab {

namespace {

using RowMat = Eigen::Matrix<cxd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// View a state on {m, n} as the m x n coefficient matrix of the split
// (most-significant factor first, so rows index the first factor).
Eigen::Map<const RowMat> as_matrix(const cvec& psi, Eigen::Index m, Eigen::Index n) {
  return Eigen::Map<const RowMat>(psi.data(), m, n);
}

cvec flatten(const RowMat& m) {
  return Eigen::Map<const cvec>(m.data(), m.size());
}

void check_state(const cvec& psi, Eigen::Index dim, const char* who) {
  if (psi.size() != dim) throw dimension_error(std::string(who) + ": state has wrong dimension");
  if (std::abs(psi.norm() - 1.0) > 1e-6)
    throw parameter_error(std::string(who) + ": state is not normalized");
}

cmat evolve_density(const EigenSystem& es, const cmat& rho, double t) {
  cvec phases(es.values.size());
  for (Eigen::Index i = 0; i < phases.size(); ++i)
    phases[i] = std::exp(cxd(0.0, -es.values[i] * t));
  const cmat u = es.vectors * phases.asDiagonal() * es.vectors.adjoint();
  return u * rho * u.adjoint();
}

// Value (and optionally the Wirtinger gradient) of the entangling rate for a
// precomputed full-space probe; m x n is the aA x Bb grouping.
struct RateWork {
  double value = 0.0;
  cvec grad;
};

RateWork rate_and_grad(const cvec& psi, Eigen::Index m, Eigen::Index n, const cmat& h_full,
                       double floor, bool want_grad) {
  const auto psi_mat = as_matrix(psi, m, n);
  const cmat rho = psi_mat * psi_mat.adjoint();
  const EigenSystem es = eigh(rho);

  // Support-restricted log of the marginal.
  dvec log_lam = dvec::Zero(m);
  std::vector<bool> in_support(static_cast<size_t>(m), false);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (es.values[i] >= floor) {
      log_lam[i] = std::log(es.values[i]);
      in_support[static_cast<size_t>(i)] = true;
    }
  }
  cmat logm = cmat::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    if (in_support[static_cast<size_t>(i)])
      logm += log_lam[i] * es.vectors.col(i) * es.vectors.col(i).adjoint();

  const cvec h_psi = h_full * psi;
  const cvec m_psi = flatten(logm * psi_mat);
  RateWork out;
  out.value = -2.0 * m_psi.dot(h_psi).imag();
  if (!want_grad) return out;

  // Commutator part: i (M H - H M) psi.
  const cvec m_h_psi = flatten(logm * as_matrix(h_psi, m, n));
  const cvec h_m_psi = h_full * m_psi;
  // Backflow through the marginal: i D[tr_Bb [H, P]] acting on the aA side,
  // with D the log derivative at rho in its eigenbasis.
  const auto h_psi_mat = as_matrix(h_psi, m, n);
  const cmat r = h_psi_mat * psi_mat.adjoint() - psi_mat * h_psi_mat.adjoint();
  cmat r_tilde = es.vectors.adjoint() * r * es.vectors;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      double k = 0.0;
      if (in_support[static_cast<size_t>(i)] && in_support[static_cast<size_t>(j)]) {
        const double li = es.values[i], lj = es.values[j];
        k = (std::abs(li - lj) <= 1e-12 * std::max({li, lj, 1.0}))
                ? 1.0 / li
                : (std::log(li) - std::log(lj)) / (li - lj);
      }
      r_tilde(i, j) *= k;
    }
  }
  const cmat d_r = es.vectors * r_tilde * es.vectors.adjoint();
  const cvec backflow = flatten(d_r * psi_mat);
  out.grad = cxd(0, 1) * (m_h_psi - h_m_psi) + cxd(0, 1) * backflow;
  return out;
}

void check_setting(const BipartiteSetting& s, const cmat& h_ab) {
  if (s.layout.size() != 4) throw dimension_error("bipartite setting: need exactly 4 factors");
  for (Eigen::Index d : s.layout)
    if (d < 1) throw dimension_error("bipartite setting: factor dimensions must be >= 1");
  if (h_ab.rows() != h_ab.cols() || h_ab.rows() != s.dim_A() * s.dim_B())
    throw dimension_error("bipartite setting: interaction must act on A x B");
}

}  // namespace

double mixing_rate(const TwoStateEnsemble& ens, const cmat& h, double floor) {
  if (ens.rho1.rows() != ens.rho2.rows() || ens.rho1.rows() != h.rows() ||
      h.rows() != h.cols() || ens.rho1.rows() != ens.rho1.cols())
    throw dimension_error("mixing_rate: operator dimensions disagree");
  if (!(ens.p >= 0.0) || !(ens.p <= 1.0)) throw parameter_error("mixing_rate: weight outside [0, 1]");
  const cmat rho_bar = ens.p * ens.rho1 + (1.0 - ens.p) * ens.rho2;
  const cmat log_bar = hermitian_log_support(rho_bar, floor);
  return -2.0 * (1.0 - ens.p) * (h * ens.rho2 * log_bar).trace().imag();
}

MaxRateResult max_mixing_rate(const TwoStateEnsemble& ens, double floor) {
  const cmat rho_bar = ens.p * ens.rho1 + (1.0 - ens.p) * ens.rho2;
  const cmat log_bar = hermitian_log_support(rho_bar, floor);
  const cmat g =
      cxd(0, 1) * (1.0 - ens.p) * (ens.rho2 * log_bar - log_bar * ens.rho2);
  return MaxRateResult{trace_norm(g), sign_matrix(g)};
}

double ensemble_mixing_rate(const std::vector<double>& weights, const std::vector<cmat>& states,
                            const std::vector<cmat>& hams, double floor) {
  if (weights.empty() || weights.size() != states.size() || weights.size() != hams.size())
    throw parameter_error("ensemble_mixing_rate: need matching, nonempty weights/states/probes");
  double wsum = 0.0;
  for (double w : weights) {
    if (w < -1e-12) throw parameter_error("ensemble_mixing_rate: negative weight");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-10)
    throw parameter_error("ensemble_mixing_rate: weights must sum to 1");
  cmat rho_bar = cmat::Zero(states[0].rows(), states[0].cols());
  for (size_t i = 0; i < weights.size(); ++i) rho_bar += weights[i] * states[i];
  const cmat log_bar = hermitian_log_support(rho_bar, floor);
  double rate = 0.0;
  for (size_t i = 0; i < weights.size(); ++i)
    rate += -2.0 * weights[i] * (hams[i] * states[i] * log_bar).trace().imag();
  return rate;
}

MixingWindow total_mixing_check(const TwoStateEnsemble& ens, const cmat& h, const dvec& times) {
  const EigenSystem es = eigh(h);
  const double s1 = von_neumann_entropy(ens.rho1);
  const double s2 = von_neumann_entropy(ens.rho2);
  const double avg = ens.p * s1 + (1.0 - ens.p) * s2;
  const double width = binary_entropy(ens.p);
  MixingWindow win{std::numeric_limits<double>::infinity(),
                   std::numeric_limits<double>::infinity()};
  for (Eigen::Index i = 0; i < times.size(); ++i) {
    const cmat moved = evolve_density(es, ens.rho2, times[i]);
    const double s = von_neumann_entropy(ens.p * ens.rho1 + (1.0 - ens.p) * moved);
    win.lower_margin = std::min(win.lower_margin, s - avg);
    win.upper_margin = std::min(win.upper_margin, avg + width - s);
  }
  return win;
}

FdProbe rate_finite_difference(const std::function<double(double)>& f, double dt) {
  if (!(dt > 0.0)) throw parameter_error("rate_finite_difference: need dt > 0");
  FdProbe probe;
  probe.coarse = (f(dt) - f(-dt)) / (2.0 * dt);
  probe.fine = (f(dt / 2.0) - f(-dt / 2.0)) / dt;
  probe.extrapolated = (4.0 * probe.fine - probe.coarse) / 3.0;
  const double fine_err = std::abs(probe.fine - probe.extrapolated);
  probe.ratio = std::abs(probe.coarse - probe.extrapolated) /
                std::max(fine_err, std::numeric_limits<double>::min());
  return probe;
}

double entangling_rate(const cvec& psi, const BipartiteSetting& s, const cmat& h_ab,
                       double floor) {
  check_setting(s, h_ab);
  check_state(psi, s.total_dim(), "entangling_rate");
  const cmat h_full = embed(h_ab, {1, 2}, s.layout);
  return rate_and_grad(psi, s.dim_a() * s.dim_A(), s.dim_B() * s.dim_b(), h_full, floor, false)
      .value;
}

cvec entangling_rate_gradient(const cvec& psi, const BipartiteSetting& s, const cmat& h_ab,
                              double floor) {
  check_setting(s, h_ab);
  check_state(psi, s.total_dim(), "entangling_rate_gradient");
  const cmat h_full = embed(h_ab, {1, 2}, s.layout);
  return rate_and_grad(psi, s.dim_a() * s.dim_A(), s.dim_B() * s.dim_b(), h_full, floor, true)
      .grad;
}

MaxRateResult max_entangling_rate_operator(const cvec& psi, const BipartiteSetting& s,
                                           double floor) {
  if (s.layout.size() != 4) throw dimension_error("bipartite setting: need exactly 4 factors");
  check_state(psi, s.total_dim(), "max_entangling_rate_operator");
  const Eigen::Index m = s.dim_a() * s.dim_A();
  const Eigen::Index n = s.dim_B() * s.dim_b();
  const auto psi_mat = as_matrix(psi, m, n);
  const cmat rho = psi_mat * psi_mat.adjoint();
  const cmat logm = hermitian_log_support(rho, floor);
  const cvec m_psi = flatten(logm * psi_mat);
  // [P, M x 1] = psi (M psi)^+ - (M psi) psi^+; reduce to the interaction slots.
  const cmat comm = psi * m_psi.adjoint() - m_psi * psi.adjoint();
  const cmat t_ab = partial_trace(comm, s.layout, {1, 2});
  const cmat k = cxd(0, 1) * t_ab;
  return MaxRateResult{trace_norm(k), sign_matrix(k)};
}

double subsystem_entropy(const cvec& psi, const Layout& layout, const std::vector<int>& keep) {
  return von_neumann_entropy(reduced_density(psi, layout, keep));
}

TwoStateEnsemble entangling_extension(const cvec& psi, const Layout& two_factor) {
  if (two_factor.size() != 2) throw dimension_error("entangling_extension: need a 2-factor grouping");
  const Eigen::Index m = two_factor[0], n = two_factor[1];
  if (n < 2) throw parameter_error("entangling_extension: second factor must be nontrivial");
  check_state(psi, m * n, "entangling_extension");
  const auto psi_mat = as_matrix(psi, m, n);
  const cmat rho_first = psi_mat * psi_mat.adjoint();
  const cmat tau = tensor_product(rho_first, cmat::Identity(n, n) / static_cast<double>(n));
  const cmat proj = psi * psi.adjoint();
  const double w2 = 1.0 / static_cast<double>(n * n);
  TwoStateEnsemble ens;
  ens.p = 1.0 - w2;
  ens.rho1 = (tau - w2 * proj) / (1.0 - w2);
  ens.rho2 = proj;
  return ens;
}

EntropyChange entangling_total_check(const cvec& psi, const BipartiteSetting& s,
                                     const cmat& u_ab) {
  check_setting(s, u_ab);
  check_state(psi, s.total_dim(), "entangling_total_check");
  if ((u_ab.adjoint() * u_ab - cmat::Identity(u_ab.rows(), u_ab.cols())).norm() > 1e-8)
    throw parameter_error("entangling_total_check: interaction unitary is not unitary");
  const cmat u_full = embed(u_ab, {1, 2}, s.layout);
  EntropyChange out;
  out.before = subsystem_entropy(psi, s.layout, {0, 1});
  const cvec moved = u_full * psi;
  out.after = subsystem_entropy(moved, s.layout, {0, 1});
  out.change = out.after - out.before;
  out.cap = 2.0 * std::log(static_cast<double>(std::min(s.dim_A(), s.dim_B())));
  return out;
}

OptimizeResult maximize_entangling_rate(const BipartiteSetting& s, const cmat& h_ab, int restarts,
                                        std::uint64_t seed, int max_iter, double tol) {
  check_setting(s, h_ab);
  if (restarts < 1) throw parameter_error("maximize_entangling_rate: need restarts >= 1");
  const Eigen::Index m = s.dim_a() * s.dim_A();
  const Eigen::Index n = s.dim_B() * s.dim_b();
  const cmat h_full = embed(h_ab, {1, 2}, s.layout);
  Rng base(seed);

  OptimizeResult best;
  best.value = -std::numeric_limits<double>::infinity();
  best.restarts = restarts;
  best.iterations = 0;

  for (int r = 0; r < restarts; ++r) {
    Rng rng = base.substream({static_cast<std::uint64_t>(r)});
    cvec psi = rng.pure_state(s.total_dim());
    RateWork cur = rate_and_grad(psi, m, n, h_full, kSupportFloor, true);
    double gnorm = 0.0;
    for (int iter = 0; iter < max_iter; ++iter) {
      cvec g = cur.grad - psi * psi.dot(cur.grad);  // tangent (and phase) projection
      gnorm = g.norm();
      if (gnorm < tol) break;
      const cvec u = g / gnorm;
      ++best.iterations;
      bool accepted = false;
      for (double theta = 0.5; theta > 1e-9; theta *= 0.5) {
        cvec cand = std::cos(theta) * psi + std::sin(theta) * u;
        cand.normalize();
        RateWork probe = rate_and_grad(cand, m, n, h_full, kSupportFloor, false);
        if (probe.value > cur.value + 1e-4 * theta * gnorm) {
          psi = std::move(cand);
          probe.grad = rate_and_grad(psi, m, n, h_full, kSupportFloor, true).grad;
          cur = std::move(probe);
          accepted = true;
          break;
        }
      }
      if (!accepted) break;
    }
    if (cur.value > best.value) {
      best.value = cur.value;
      best.psi = psi;
      best.grad_norm = gnorm;
    }
  }
  return best;
}

SuperpositionCheck superposition_entropy_check(const std::vector<cvec>& branches,
                                               const dvec& weights, const Layout& layout,
                                               const std::vector<int>& keep) {
  if (branches.empty() || static_cast<Eigen::Index>(branches.size()) != weights.size())
    throw parameter_error("superposition_entropy_check: branches and weights disagree");
  const Eigen::Index dim = layout_dim(layout);
  for (const auto& b : branches) check_state(b, dim, "superposition_entropy_check");
  if (std::abs(weights.sum() - 1.0) > 1e-8 || weights.minCoeff() < 0.0)
    throw parameter_error("superposition_entropy_check: weights must form a distribution");

  // The additivity hypothesis needs pairwise orthogonal marginals on BOTH
  // sides of the cut; one-sided orthogonality leaves cross terms in the
  // other marginal and the identity fails.
  std::vector<int> complement;
  for (int slot = 0; slot < static_cast<int>(layout.size()); ++slot)
    if (std::find(keep.begin(), keep.end(), slot) == keep.end()) complement.push_back(slot);

  std::vector<cmat> marginals, co_marginals;
  marginals.reserve(branches.size());
  for (const auto& b : branches) {
    marginals.push_back(reduced_density(b, layout, keep));
    co_marginals.push_back(reduced_density(b, layout, complement));
  }

  SuperpositionCheck out;
  out.orthogonal = true;
  for (size_t i = 0; i < branches.size(); ++i) {
    for (size_t j = i + 1; j < branches.size(); ++j) {
      if (std::abs(branches[i].dot(branches[j])) > 1e-8) out.orthogonal = false;
      if (std::abs((marginals[i] * marginals[j]).trace()) > 1e-10) out.orthogonal = false;
      if (std::abs((co_marginals[i] * co_marginals[j]).trace()) > 1e-10) out.orthogonal = false;
    }
  }

  cvec combined = cvec::Zero(dim);
  for (size_t i = 0; i < branches.size(); ++i)
    combined += std::sqrt(weights[static_cast<Eigen::Index>(i)]) * branches[i];
  combined.normalize();
  out.lhs = subsystem_entropy(combined, layout, keep);
  const std::vector<double> weight_vec(weights.data(), weights.data() + weights.size());
  out.rhs = shannon_entropy(weight_vec);
  for (size_t i = 0; i < branches.size(); ++i)
    out.rhs += weights[static_cast<Eigen::Index>(i)] * von_neumann_entropy(marginals[i]);
  out.gap = std::abs(out.lhs - out.rhs);
  return out;
}

}  // namespace entlab

#include "entlab/commutator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

namespace entlab {

namespace {

constexpr double kTwoOverE = 2.0 / 2.718281828459045235360287471352662498;

// Slice rows `ri` and columns `ci` out of m.
cmat submatrix(const cmat& m, const std::vector<Eigen::Index>& ri,
               const std::vector<Eigen::Index>& ci) {
  cmat out(static_cast<Eigen::Index>(ri.size()), static_cast<Eigen::Index>(ci.size()));
  for (size_t r = 0; r < ri.size(); ++r)
    for (size_t c = 0; c < ci.size(); ++c) out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = m(ri[r], ci[c]);
  return out;
}

dvec profile_spectrum(Rng& rng, Eigen::Index dim, double p, SpectrumProfile profile,
                      double geometric_ratio) {
  dvec lam(dim);
  switch (profile) {
    case SpectrumProfile::uniform:
      // Flat Dirichlet: normalized exponentials (log1p keeps the draw finite).
      for (Eigen::Index i = 0; i < dim; ++i) lam[i] = -std::log1p(-rng.uniform());
      break;
    case SpectrumProfile::geometric: {
      const double r = geometric_ratio > 0.0 ? geometric_ratio : p;
      double w = 1.0;
      for (Eigen::Index i = 0; i < dim; ++i, w *= r) lam[i] = w;
      break;
    }
    case SpectrumProfile::two_scale:
      // Two clusters separated by a factor p.
      for (Eigen::Index i = 0; i < dim; ++i) {
        const double base = (i < (dim + 1) / 2) ? 1.0 : p;
        lam[i] = base * (1.0 + 0.05 * rng.uniform());  // slight spread within each cluster
      }
      break;
  }
  lam /= lam.sum();
  return lam;
}

}  // namespace

double spectral_weight_f(double p) {
  if (!(p > 0.0) || p > 1.0) throw parameter_error("spectral_weight_f: need p in (0, 1]");
  const double e_minus_2 = std::exp(-2.0);
  if (p <= e_minus_2) return std::sqrt(p) * std::log(1.0 / p);
  return kTwoOverE;
}

DominatedPair sample_dominated_pair(Rng& rng, Eigen::Index dim, double p, SpectrumProfile profile,
                                    double geometric_ratio, int retries) {
  if (dim < 2) throw dimension_error("sample_dominated_pair: need dim >= 2");
  if (!(p > 0.0) || !(p < 1.0)) throw parameter_error("sample_dominated_pair: need p in (0, 1)");

  const dvec lam = profile_spectrum(rng, dim, p, profile, geometric_ratio);
  const cmat u = rng.unitary(dim);
  const cmat b = u * lam.asDiagonal() * u.adjoint();
  const cmat sqrt_b = u * lam.cwiseSqrt().asDiagonal() * u.adjoint();

  for (int attempt = 0; attempt < retries; ++attempt) {
    const cmat x = rng.psd_contraction(dim);
    const cmat a0 = sqrt_b * x * sqrt_b;
    const double t0 = a0.trace().real();
    if (t0 <= 0.0) continue;
    const double s = p / t0;
    // Rescale X, not A: s*X must stay a contraction or domination breaks.
    Eigen::SelfAdjointEigenSolver<cmat> es(x, Eigen::EigenvaluesOnly);
    if (s * es.eigenvalues().maxCoeff() <= 1.0) {
      cmat a = s * a0;
      a = 0.5 * (a + a.adjoint().eval());
      return DominatedPair{std::move(a), b, p};
    }
  }
  throw numeric_error("sample_dominated_pair: rescaled contraction exceeded 1 on every retry");
}

double commutator_trace_norm(const cmat& a, const cmat& b, double floor) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols())
    throw dimension_error("commutator_trace_norm: square operators of equal dimension required");
  // Restrict A to supp(B) before commuting: for 0 <= A <= B the discarded
  // blocks vanish identically, and keeping them would pollute the norm with
  // floor-level noise amplified by the logarithm.
  const EigenSystem es = eigh(b);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < es.values.size(); ++i)
    if (es.values[i] >= floor) keep.push_back(i);
  if (keep.empty()) return 0.0;
  const Eigen::Index n = static_cast<Eigen::Index>(keep.size());
  cmat vs(b.rows(), n);
  dvec log_lam(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    vs.col(j) = es.vectors.col(keep[static_cast<size_t>(j)]);
    log_lam[j] = std::log(es.values[keep[static_cast<size_t>(j)]]);
  }
  cmat at = vs.adjoint() * a * vs;
  at = 0.5 * (at + at.adjoint().eval());
  const cmat c = at * log_lam.asDiagonal() - log_lam.asDiagonal() * at;
  return trace_norm(c);
}

int interval_index(double lambda, double p) {
  if (!(lambda > 0.0)) throw parameter_error("interval_index: need lambda > 0");
  if (!(p > 0.0) || !(p < 1.0)) throw parameter_error("interval_index: need p in (0, 1)");
  int k = static_cast<int>(std::ceil(std::log(lambda) / std::log(p))) - 1;
  // Float guard: enforce p^{k+1} <= lambda < p^k exactly as computed by pow.
  for (int i = 0; i < 4 && lambda >= std::pow(p, k); ++i) --k;
  for (int i = 0; i < 4 && lambda < std::pow(p, k + 1); ++i) ++k;
  return k;
}

PartitionDecomposition partition_decompose(const cmat& a, const cmat& b, double floor) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols())
    throw dimension_error("partition_decompose: square operators of equal dimension required");
  const double p = a.trace().real();
  if (!(p > 0.0) || !(p < 1.0))
    throw parameter_error("partition_decompose: need tr A in (0, 1)");

  // Work in the eigenbasis of B, restricted to its support.
  const EigenSystem es = eigh(b);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < es.values.size(); ++i)
    if (es.values[i] >= floor) keep.push_back(i);
  if (keep.empty()) throw numeric_error("partition_decompose: B has empty support");
  const Eigen::Index n = static_cast<Eigen::Index>(keep.size());

  cmat vs(b.rows(), n);
  dvec lam(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    vs.col(j) = es.vectors.col(keep[static_cast<size_t>(j)]);
    lam[j] = es.values[keep[static_cast<size_t>(j)]];
  }
  cmat at = vs.adjoint() * a * vs;
  at = 0.5 * (at + at.adjoint().eval());
  const dvec log_lam = lam.array().log();

  // Dual-optimal contraction: H* = sign(-i [A, log B]), so that
  // i tr(log B [A, H*]) recovers the full trace norm.
  const cmat la = log_lam.asDiagonal() * at;
  const cmat al = at * log_lam.asDiagonal();
  const cmat comm = cxd(0, -1) * (al - la);  // Hermitian
  const cmat hstar = sign_matrix(comm);

  PartitionDecomposition out;
  out.p = p;
  out.trace_norm = trace_norm(comm);

  // Interval blocks.
  out.block_of.resize(static_cast<size_t>(n));
  std::map<int, std::vector<Eigen::Index>> blocks;
  for (Eigen::Index i = 0; i < n; ++i) {
    const int k = interval_index(lam[i], p);
    out.block_of[static_cast<size_t>(i)] = k;
    blocks[k].push_back(i);
  }
  for (const auto& [k, idx] : blocks) out.block_ids.push_back(k);

  const Eigen::Index nb = static_cast<Eigen::Index>(out.block_ids.size());
  auto idx_of = [&](int k) -> const std::vector<Eigen::Index>& { return blocks.at(k); };
  auto log_block = [&](const std::vector<Eigen::Index>& idx) {
    dvec d(static_cast<Eigen::Index>(idx.size()));
    for (size_t i = 0; i < idx.size(); ++i) d[static_cast<Eigen::Index>(i)] = log_lam[idx[i]];
    return d;
  };

  // W_{kl} = i tr( logB_k A_{kl} H*_{lk} - H*_{lk} A_{kl} logB_l ).
  out.w_blocks.resize(nb, nb);
  cxd w_sum = 0;
  for (Eigen::Index bk = 0; bk < nb; ++bk) {
    for (Eigen::Index bl = 0; bl < nb; ++bl) {
      const auto& ik = idx_of(out.block_ids[static_cast<size_t>(bk)]);
      const auto& il = idx_of(out.block_ids[static_cast<size_t>(bl)]);
      const cmat akl = submatrix(at, ik, il);
      const cmat hlk = submatrix(hstar, il, ik);
      const dvec lk = log_block(ik);
      const dvec ll = log_block(il);
      const cxd t1 = (lk.asDiagonal() * akl * hlk).trace();
      const cxd t2 = (hlk * akl * ll.asDiagonal()).trace();
      const cxd w = cxd(0, 1) * (t1 - t2);
      out.w_blocks(bk, bl) = w;
      w_sum += w;
    }
  }
  out.w_total = w_sum.real();

  // V: each block merged with its right neighbour when that interval is
  // populated; V' removes the resulting double count of the neighbour's
  // diagonal; W'' collects everything at interval distance >= 2.
  auto has_block = [&](int k) { return blocks.count(k) != 0; };
  cxd v_sum = 0, vp_sum = 0, far_sum = 0;
  for (Eigen::Index bk = 0; bk < nb; ++bk) {
    const int k = out.block_ids[static_cast<size_t>(bk)];
    std::vector<Eigen::Index> q = idx_of(k);
    if (has_block(k + 1)) {
      const auto& nxt = idx_of(k + 1);
      q.insert(q.end(), nxt.begin(), nxt.end());
    }
    const cmat aq = submatrix(at, q, q);
    const cmat hq = submatrix(hstar, q, q);
    const dvec lq = log_block(q);
    v_sum += cxd(0, 1) * (lq.asDiagonal() * (aq * hq - hq * aq)).trace();
  }
  for (Eigen::Index bk = 0; bk < nb; ++bk) {
    const int k = out.block_ids[static_cast<size_t>(bk)];
    if (has_block(k + 1)) {
      const Eigen::Index bn = bk + 1;  // block_ids is sorted, k+1 present => next slot
      vp_sum += out.w_blocks(bn, bn);
    }
  }
  for (Eigen::Index bk = 0; bk < nb; ++bk)
    for (Eigen::Index bl = 0; bl < nb; ++bl)
      if (std::abs(out.block_ids[static_cast<size_t>(bk)] - out.block_ids[static_cast<size_t>(bl)]) >= 2)
        far_sum += out.w_blocks(bk, bl);
  out.v_total = v_sum.real();
  out.v_prime = vp_sum.real();
  out.w_far = far_sum.real();

  const double log_inv_p = std::log(1.0 / p);
  out.bound_far = 6.0 * std::sqrt(p) * spectral_weight_f(p);
  out.bound_v = 4.0 * p * log_inv_p;
  out.bound_v_prime = p * log_inv_p;
  out.bound_total = out.bound_far + out.bound_v + out.bound_v_prime;
  return out;
}

ScanReport ratio_scan(const std::vector<Eigen::Index>& dims, const std::vector<double>& p_grid,
                      int samples, std::uint64_t seed, int threads, double hard_c, double soft_c) {
  if (dims.empty() || p_grid.empty() || samples < 1)
    throw parameter_error("ratio_scan: need nonempty dims, p grid, and samples >= 1");
  ScanReport report;
  report.hard_c = hard_c;
  report.soft_c = soft_c;

  struct CellJob {
    size_t di, pi;
  };
  std::vector<CellJob> jobs;
  for (size_t di = 0; di < dims.size(); ++di)
    for (size_t pi = 0; pi < p_grid.size(); ++pi) jobs.push_back({di, pi});
  report.cells.resize(jobs.size());

  std::atomic<size_t> next{0};
  std::mutex merge_mutex;
  Rng base(seed);

  auto worker = [&]() {
    ScanWitness local_best;
    long local_hard = 0, local_soft = 0;
    for (;;) {
      const size_t j = next.fetch_add(1);
      if (j >= jobs.size()) break;
      const auto [di, pi] = jobs[j];
      const Eigen::Index dim = dims[di];
      const double p = p_grid[pi];
      ScanCell cell{dim, p, samples, 0.0, 0.0};
      const double hp = binary_entropy(p);
      for (int s = 0; s < samples; ++s) {
        Rng rng = base.substream({static_cast<std::uint64_t>(di), static_cast<std::uint64_t>(pi),
                                  static_cast<std::uint64_t>(s)});
        const auto profile = static_cast<SpectrumProfile>(s % 3);
        const DominatedPair pair = sample_dominated_pair(rng, dim, p, profile);
        const double ratio = commutator_trace_norm(pair.a, pair.b) / hp;
        cell.mean_ratio += ratio;
        if (ratio > cell.max_ratio) cell.max_ratio = ratio;
        if (ratio > hard_c) ++local_hard;
        if (ratio > soft_c) ++local_soft;
        if (ratio > local_best.ratio) {
          local_best = ScanWitness{pair.a, pair.b, p, ratio, dim,
                                   derive_seed(seed, {static_cast<std::uint64_t>(di),
                                                      static_cast<std::uint64_t>(pi),
                                                      static_cast<std::uint64_t>(s)})};
        }
      }
      cell.mean_ratio /= samples;
      report.cells[j] = cell;  // distinct slots, no race
    }
    std::lock_guard<std::mutex> lock(merge_mutex);
    report.hard_violations += local_hard;
    report.soft_violations += local_soft;
    if (local_best.ratio > report.witness.ratio) report.witness = local_best;
  };

  const int nthreads = std::max(1, std::min<int>(threads, static_cast<int>(jobs.size())));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  report.global_max = report.witness.ratio;
  return report;
}

InequalityScan interval_log_commutator_scan(Rng& rng, Eigen::Index dim, double b_lo, double b_hi,
                                       int samples) {
  if (!(b_lo > 0.0) || !(b_hi > b_lo))
    throw parameter_error("interval_log_commutator_scan: need 0 < b_lo < b_hi");
  InequalityScan out{-std::numeric_limits<double>::infinity(), 0.0, 0};
  const double log_ratio = std::log(b_hi / b_lo);
  for (int s = 0; s < samples; ++s) {
    dvec spec(dim);
    for (Eigen::Index i = 0; i < dim; ++i) spec[i] = b_lo + rng.uniform() * (b_hi - b_lo);
    const cmat u = rng.unitary(dim);
    const cmat b = u * spec.asDiagonal() * u.adjoint();
    const cmat a = (0.25 + 1.75 * rng.uniform()) * rng.density(dim, dim);
    const double lhs = commutator_trace_norm(a, b, b_lo * 0.5);
    const double rhs = log_ratio * a.trace().real();
    const double margin = lhs - rhs;
    out.worst_margin = std::max(out.worst_margin, margin);
    out.max_lhs = std::max(out.max_lhs, lhs);
    if (margin > 1e-10 * std::max(1.0, rhs)) ++out.violations;
  }
  return out;
}

InequalityScan gap_commutator_scan(Rng& rng, Eigen::Index dim, double a_lo, double a_hi, double b_lo,
                              double b_hi, int samples) {
  if (!(a_hi >= a_lo) || !(b_hi >= b_lo))
    throw parameter_error("gap_commutator_scan: degenerate spectral intervals");
  InequalityScan out{-std::numeric_limits<double>::infinity(), 0.0, 0};
  const double constant = std::max(a_hi - b_lo, b_hi - a_lo);
  for (int s = 0; s < samples; ++s) {
    dvec sa(dim), sb(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      sa[i] = a_lo + rng.uniform() * (a_hi - a_lo);
      sb[i] = b_lo + rng.uniform() * (b_hi - b_lo);
    }
    const cmat ua = rng.unitary(dim);
    const cmat ub = rng.unitary(dim);
    const cmat a = ua * sa.asDiagonal() * ua.adjoint();
    const cmat b = ub * sb.asDiagonal() * ub.adjoint();
    const cmat x = rng.ginibre(dim, dim);
    const double lhs = (a * x - x * b).norm();
    const double rhs = constant * x.norm();
    const double margin = lhs - rhs;
    out.worst_margin = std::max(out.worst_margin, margin);
    out.max_lhs = std::max(out.max_lhs, lhs);
    if (margin > 1e-10 * std::max(1.0, rhs)) ++out.violations;
  }
  return out;
}

}  // namespace entlab

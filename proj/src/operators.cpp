#include "entlab/operators.hpp"

#include <atomic>
#include <iostream>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "entlab/rng.hpp"

namespace entlab {

namespace {

std::atomic<std::uint64_t> g_asymmetry_warnings{0};

Layout default_layout(Eigen::Index dim) { return Layout{dim}; }

void check_square(const cmat& m, const char* who) {
  if (m.rows() != m.cols()) throw dimension_error(std::string(who) + ": matrix not square");
  if (m.rows() == 0) throw dimension_error(std::string(who) + ": empty matrix");
}

void check_layout(const cmat& m, const Layout& layout, const char* who) {
  if (layout_dim(layout) != m.rows())
    throw dimension_error(std::string(who) + ": layout does not match matrix dimension");
}

// Strides for a most-significant-first layout.
std::vector<Eigen::Index> strides_of(const Layout& layout) {
  std::vector<Eigen::Index> s(layout.size());
  Eigen::Index acc = 1;
  for (int i = int(layout.size()) - 1; i >= 0; --i) {
    s[size_t(i)] = acc;
    acc *= layout[size_t(i)];
  }
  return s;
}

void check_subset(const std::vector<int>& subset, size_t nfactors, const char* who) {
  if (subset.empty()) throw parameter_error(std::string(who) + ": empty factor list");
  for (size_t i = 0; i < subset.size(); ++i) {
    if (subset[i] < 0 || size_t(subset[i]) >= nfactors)
      throw dimension_error(std::string(who) + ": factor index out of range");
    if (i > 0 && subset[i] <= subset[i - 1])
      throw parameter_error(std::string(who) + ": factor indices must be strictly increasing");
  }
}

}  // namespace

HermitianOperator::HermitianOperator(cmat m) : HermitianOperator(std::move(m), Layout{}) {}

HermitianOperator::HermitianOperator(cmat m, Layout layout) {
  check_square(m, "HermitianOperator");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (asym > kHermitianWarnTol * scale) {
    ++g_asymmetry_warnings;
    std::cerr << "[entlab] warning: symmetrizing operator with asymmetry " << asym << "\n";
  }
  m_ = 0.5 * (m + m.adjoint());
  layout_ = layout.empty() ? default_layout(m_.rows()) : std::move(layout);
  check_layout(m_, layout_, "HermitianOperator");
}

std::uint64_t HermitianOperator::asymmetry_warnings() { return g_asymmetry_warnings.load(); }
void HermitianOperator::reset_asymmetry_warnings() { g_asymmetry_warnings.store(0); }

DensityOperator::DensityOperator(cmat m) : DensityOperator(std::move(m), Layout{}) {}

DensityOperator::DensityOperator(cmat m, Layout layout) {
  check_square(m, "DensityOperator");
  m_ = 0.5 * (m + m.adjoint());
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-8)
    throw numeric_error("DensityOperator: input is not Hermitian");
  layout_ = layout.empty() ? default_layout(m_.rows()) : std::move(layout);
  check_layout(m_, layout_, "DensityOperator");
  validate();
}

void DensityOperator::validate() {
  const double tr_err = std::abs(m_.trace() - cxd(1.0, 0.0));
  if (tr_err > 1e-10) throw numeric_error("DensityOperator: trace differs from 1 by " + std::to_string(tr_err));
  Eigen::SelfAdjointEigenSolver<cmat> es(m_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10)
    throw numeric_error("DensityOperator: negative eigenvalue " + std::to_string(es.eigenvalues().minCoeff()));
}

PureState::PureState(cvec v, Layout layout) {
  if (v.size() == 0) throw dimension_error("PureState: empty vector");
  const double n = v.norm();
  if (std::abs(n - 1.0) > 1e-8) throw numeric_error("PureState: norm differs from 1 by " + std::to_string(std::abs(n - 1.0)));
  v_ = v / n;  // renormalize the residual 1e-8
  layout_ = layout.empty() ? Layout{v_.size()} : std::move(layout);
  if (layout_dim(layout_) != v_.size()) throw dimension_error("PureState: layout does not match vector dimension");
}

// --- products ----------------------------------------------------------------

cmat tensor_product(const cmat& a, const cmat& b) {
  if (a.rows() * b.rows() > kDimCap || a.cols() * b.cols() > kDimCap)
    throw capacity_error("tensor_product: result exceeds dimension cap");
  cmat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

cvec tensor_product(const cvec& a, const cvec& b) {
  if (a.size() * b.size() > kDimCap) throw capacity_error("tensor_product: result exceeds dimension cap");
  cvec out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

cmat tensor_chain(const std::vector<cmat>& factors) {
  if (factors.empty()) throw parameter_error("tensor_chain: no factors");
  cmat out = factors.front();
  for (size_t i = 1; i < factors.size(); ++i) out = tensor_product(out, factors[i]);
  return out;
}

cmat identity(Eigen::Index dim) { return cmat::Identity(dim, dim); }

cmat embed(const cmat& op, const std::vector<int>& slots, const Layout& layout) {
  check_square(op, "embed");
  // Slots may come in any order (the op factors follow the listed order);
  // they only need to be distinct and in range.
  if (slots.empty()) throw parameter_error("embed: empty factor list");
  for (size_t i = 0; i < slots.size(); ++i) {
    if (slots[i] < 0 || size_t(slots[i]) >= layout.size())
      throw dimension_error("embed: factor index out of range");
    for (size_t j = 0; j < i; ++j)
      if (slots[j] == slots[i]) throw parameter_error("embed: repeated factor index");
  }
  Eigen::Index slot_dim = 1;
  for (int s : slots) slot_dim *= layout[size_t(s)];
  if (slot_dim != op.rows()) throw dimension_error("embed: operator does not match slot dimensions");

  const Eigen::Index full = layout_dim(layout);
  const auto strides = strides_of(layout);

  // Enumerate the slot subsystem and the complement separately; the full
  // index is base(complement) + offset(slot config).
  std::vector<int> rest;
  for (size_t f = 0; f < layout.size(); ++f)
    if (std::find(slots.begin(), slots.end(), int(f)) == slots.end()) rest.push_back(int(f));

  std::vector<Eigen::Index> slot_offsets(static_cast<size_t>(slot_dim));
  {
    std::vector<Eigen::Index> idx(slots.size(), 0);
    for (Eigen::Index k = 0; k < slot_dim; ++k) {
      Eigen::Index off = 0;
      for (size_t j = 0; j < slots.size(); ++j) off += idx[j] * strides[size_t(slots[j])];
      slot_offsets[size_t(k)] = off;
      for (int j = int(slots.size()) - 1; j >= 0; --j) {  // odometer
        if (++idx[size_t(j)] < layout[size_t(slots[size_t(j)])]) break;
        idx[size_t(j)] = 0;
      }
    }
  }
  Eigen::Index rest_dim = 1;
  for (int f : rest) rest_dim *= layout[size_t(f)];
  std::vector<Eigen::Index> rest_offsets(static_cast<size_t>(rest_dim));
  {
    std::vector<Eigen::Index> idx(rest.size(), 0);
    for (Eigen::Index k = 0; k < rest_dim; ++k) {
      Eigen::Index off = 0;
      for (size_t j = 0; j < rest.size(); ++j) off += idx[j] * strides[size_t(rest[j])];
      rest_offsets[size_t(k)] = off;
      for (int j = int(rest.size()) - 1; j >= 0; --j) {
        if (++idx[size_t(j)] < layout[size_t(rest[size_t(j)])]) break;
        idx[size_t(j)] = 0;
      }
    }
  }

  cmat out = cmat::Zero(full, full);
  for (Eigen::Index a = 0; a < slot_dim; ++a)
    for (Eigen::Index b = 0; b < slot_dim; ++b) {
      const cxd v = op(a, b);
      if (v == cxd(0.0, 0.0)) continue;
      for (Eigen::Index r = 0; r < rest_dim; ++r)
        out(slot_offsets[size_t(a)] + rest_offsets[size_t(r)],
            slot_offsets[size_t(b)] + rest_offsets[size_t(r)]) += v;
    }
  return out;
}

// --- partial trace -----------------------------------------------------------

namespace {

struct TraceIndexing {
  std::vector<Eigen::Index> keep_offsets;   // full-space offset per kept config
  std::vector<Eigen::Index> trace_offsets;  // full-space offset per traced config
  Layout kept_layout;
};

TraceIndexing build_trace_indexing(const Layout& layout, const std::vector<int>& keep) {
  const auto strides = strides_of(layout);
  std::vector<int> traced;
  for (size_t f = 0; f < layout.size(); ++f)
    if (std::find(keep.begin(), keep.end(), int(f)) == keep.end()) traced.push_back(int(f));

  TraceIndexing ix;
  for (int f : keep) ix.kept_layout.push_back(layout[size_t(f)]);

  auto offsets_for = [&](const std::vector<int>& factors) {
    Eigen::Index n = 1;
    for (int f : factors) n *= layout[size_t(f)];
    std::vector<Eigen::Index> out(static_cast<size_t>(n));
    std::vector<Eigen::Index> idx(factors.size(), 0);
    for (Eigen::Index k = 0; k < n; ++k) {
      Eigen::Index off = 0;
      for (size_t j = 0; j < factors.size(); ++j) off += idx[j] * strides[size_t(factors[j])];
      out[size_t(k)] = off;
      for (int j = int(factors.size()) - 1; j >= 0; --j) {
        if (++idx[size_t(j)] < layout[size_t(factors[size_t(j)])]) break;
        idx[size_t(j)] = 0;
      }
    }
    return out;
  };
  ix.keep_offsets = offsets_for(keep);
  ix.trace_offsets = offsets_for(traced);
  return ix;
}

}  // namespace

cmat partial_trace(const cmat& m, const Layout& layout, const std::vector<int>& keep,
                   Layout* reduced_layout) {
  check_square(m, "partial_trace");
  if (layout_dim(layout) != m.rows())
    throw dimension_error("partial_trace: layout does not match matrix dimension");
  check_subset(keep, layout.size(), "partial_trace");

  const auto ix = build_trace_indexing(layout, keep);
  const Eigen::Index kd = Eigen::Index(ix.keep_offsets.size());
  cmat out = cmat::Zero(kd, kd);
  for (Eigen::Index a = 0; a < kd; ++a)
    for (Eigen::Index b = 0; b < kd; ++b) {
      cxd acc(0.0, 0.0);
      for (Eigen::Index t : ix.trace_offsets)
        acc += m(ix.keep_offsets[size_t(a)] + t, ix.keep_offsets[size_t(b)] + t);
      out(a, b) = acc;
    }
  if (reduced_layout) *reduced_layout = ix.kept_layout;
  return out;
}

cmat reduced_density(const cvec& v, const Layout& layout, const std::vector<int>& keep,
                     Layout* reduced_layout) {
  if (layout_dim(layout) != v.size())
    throw dimension_error("reduced_density: layout does not match vector dimension");
  check_subset(keep, layout.size(), "reduced_density");

  const auto ix = build_trace_indexing(layout, keep);
  const Eigen::Index kd = Eigen::Index(ix.keep_offsets.size());
  const Eigen::Index td = Eigen::Index(ix.trace_offsets.size());

  // Reshape |v> into a kd x td matrix T, rho_keep = T T^dag.
  cmat t(kd, td);
  for (Eigen::Index a = 0; a < kd; ++a)
    for (Eigen::Index b = 0; b < td; ++b)
      t(a, b) = v(ix.keep_offsets[size_t(a)] + ix.trace_offsets[size_t(b)]);
  if (reduced_layout) *reduced_layout = ix.kept_layout;
  return t * t.adjoint();
}

// --- spectral functions ------------------------------------------------------

EigenSystem eigh(const cmat& hermitian) {
  check_square(hermitian, "eigh");
  Eigen::SelfAdjointEigenSolver<cmat> es(hermitian);
  if (es.info() != Eigen::Success) throw numeric_error("eigh: eigensolver failed");
  return EigenSystem{es.eigenvalues(), es.eigenvectors()};
}

cmat hermitian_log_support(const cmat& hermitian, double floor) {
  auto es = eigh(hermitian);
  dvec logs(es.values.size());
  for (Eigen::Index i = 0; i < es.values.size(); ++i)
    logs(i) = es.values(i) >= floor ? std::log(es.values(i)) : 0.0;
  return es.vectors * logs.asDiagonal() * es.vectors.adjoint();
}

cmat sign_matrix(const cmat& hermitian, double tol) {
  auto es = eigh(hermitian);
  dvec s(es.values.size());
  for (Eigen::Index i = 0; i < es.values.size(); ++i)
    s(i) = es.values(i) > tol ? 1.0 : (es.values(i) < -tol ? -1.0 : 0.0);
  return es.vectors * s.asDiagonal() * es.vectors.adjoint();
}

// --- norms and entropies -----------------------------------------------------

double trace_norm(const cmat& m) {
  if (m.rows() == m.cols()) {
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() <= 1e-13 * scale)
      return eigh(m).values.cwiseAbs().sum();
    if ((m + m.adjoint()).cwiseAbs().maxCoeff() <= 1e-13 * scale)
      return eigh(cxd(0, 1) * m).values.cwiseAbs().sum();  // anti-Hermitian
  }
  Eigen::JacobiSVD<cmat> svd(m);
  return svd.singularValues().sum();
}

double operator_norm(const cmat& m, Eigen::Index exact_dim) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  if (m.rows() == m.cols()) {
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    const bool herm = (m - m.adjoint()).cwiseAbs().maxCoeff() <= 1e-13 * scale;
    const bool aherm = (m + m.adjoint()).cwiseAbs().maxCoeff() <= 1e-13 * scale;
    if ((herm || aherm) && m.rows() <= exact_dim)
      return eigh(herm ? m : cmat(cxd(0, 1) * m)).values.cwiseAbs().maxCoeff();
  }
  if (std::max(m.rows(), m.cols()) <= exact_dim) {
    Eigen::JacobiSVD<cmat> svd(m);
    return svd.singularValues().maxCoeff();
  }
  // Lanczos on M^dag M (Hermitian PSD), full reorthogonalization.  The top
  // Ritz value converges fast even with clustered extreme singular values.
  const Eigen::Index n = m.cols();
  const int kmax = int(std::min<Eigen::Index>(n, 160));
  Rng rng(0xA5A5A5A5ULL);
  std::vector<cvec> basis;
  basis.reserve(size_t(kmax));
  cvec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.cgaussian();
  v.normalize();
  std::vector<double> alpha, beta;
  double prev_ritz = -1.0;
  for (int k = 0; k < kmax; ++k) {
    basis.push_back(v);
    cvec w = m.adjoint() * (m * v);
    const double a = std::real(v.dot(w));
    alpha.push_back(a);
    w -= a * v;
    if (k > 0) w -= beta.back() * basis[size_t(k) - 1];
    for (const cvec& q : basis) w -= q.dot(w) * q;  // reorthogonalize
    const double b = w.norm();
    // Ritz value of the current tridiagonal.
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k + 1, k + 1);
    for (int i = 0; i <= k; ++i) t(i, i) = alpha[size_t(i)];
    for (int i = 0; i < k; ++i) t(i, i + 1) = t(i + 1, i) = beta[size_t(i)];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tes(t, Eigen::EigenvaluesOnly);
    const double ritz = tes.eigenvalues().maxCoeff();
    if (b <= 1e-13 || (prev_ritz >= 0 && std::abs(ritz - prev_ritz) <= 1e-13 * std::max(1.0, ritz)))
      return std::sqrt(std::max(0.0, ritz));
    prev_ritz = ritz;
    beta.push_back(b);
    v = w / b;
  }
  return std::sqrt(std::max(0.0, prev_ritz));
}

double entropy_from_spectrum(const dvec& eigenvalues, double floor) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    const double l = eigenvalues(i);
    if (l > floor) s -= l * std::log(l);
  }
  return s;
}

double von_neumann_entropy(const cmat& density, double floor) {
  check_square(density, "von_neumann_entropy");
  Eigen::SelfAdjointEigenSolver<cmat> es(density, Eigen::EigenvaluesOnly);
  return entropy_from_spectrum(es.eigenvalues(), floor);
}

double shannon_entropy(const std::vector<double>& p) {
  double sum = 0.0, s = 0.0;
  for (double x : p) {
    if (x < -1e-12) throw parameter_error("shannon_entropy: negative probability");
    sum += x;
    if (x > 0.0) s -= x * std::log(x);
  }
  if (std::abs(sum - 1.0) > 1e-9) throw parameter_error("shannon_entropy: probabilities do not sum to 1");
  return s;
}

double binary_entropy(double p) {
  if (p < 0.0 || p > 1.0) throw parameter_error("binary_entropy: p outside [0,1]");
  double s = 0.0;
  if (p > 0.0) s -= p * std::log(p);
  if (p < 1.0) s -= (1.0 - p) * std::log(1.0 - p);
  return s;
}

}  // namespace entlab

#pragma once

#include <optional>
#include <vector>

#include "entlab/types.hpp"

// Dense operator kitchen: tensor products with layout tracking, partial
// traces, support-restricted logarithms, entropies and trace norms.  All
// spectral work goes through Eigen's SelfAdjointEigenSolver.

namespace entlab {

// Wrapper asserting (and enforcing) Hermiticity.  Construction symmetrizes
// (M + M^dag)/2; asymmetry beyond kHermitianWarnTol is counted and reported
// on stderr once per offending construction.
class HermitianOperator {
 public:
  explicit HermitianOperator(cmat m);
  HermitianOperator(cmat m, Layout layout);

  const cmat& mat() const { return m_; }
  const Layout& layout() const { return layout_; }
  Eigen::Index dim() const { return m_.rows(); }

  static std::uint64_t asymmetry_warnings();  // process-wide counter
  static void reset_asymmetry_warnings();

 private:
  cmat m_;
  Layout layout_;
};

// Density operator: Hermitian, PSD within -1e-10, unit trace within 1e-10.
class DensityOperator {
 public:
  explicit DensityOperator(cmat m);
  DensityOperator(cmat m, Layout layout);

  const cmat& mat() const { return m_; }
  const Layout& layout() const { return layout_; }
  Eigen::Index dim() const { return m_.rows(); }

 private:
  void validate();
  cmat m_;
  Layout layout_;
};

// Unit vector with a tensor layout.
class PureState {
 public:
  PureState(cvec v, Layout layout);

  const cvec& vec() const { return v_; }
  const Layout& layout() const { return layout_; }
  Eigen::Index dim() const { return v_.size(); }
  cmat projector() const { return v_ * v_.adjoint(); }

 private:
  cvec v_;
  Layout layout_;
};

// --- products and embeddings -------------------------------------------------

// Kronecker product, left factor most significant.  Throws capacity_error
// beyond kDimCap.
cmat tensor_product(const cmat& a, const cmat& b);
cvec tensor_product(const cvec& a, const cvec& b);

// Fold a list of factors (first entry most significant).
cmat tensor_chain(const std::vector<cmat>& factors);

// Embed `op` acting on the factors listed in `slots` (indices into `layout`,
// strictly increasing) into the full space described by `layout`; identity on
// the remaining factors.  The rows/cols of `op` must equal the product of the
// slot dimensions, ordered as in `slots`.
cmat embed(const cmat& op, const std::vector<int>& slots, const Layout& layout);

cmat identity(Eigen::Index dim);

// --- partial trace -----------------------------------------------------------

// Trace out every factor NOT listed in `keep` (indices into `layout`,
// strictly increasing).  Returns the reduced matrix; `reduced_layout` (if
// non-null) receives the surviving factor dimensions.
cmat partial_trace(const cmat& m, const Layout& layout, const std::vector<int>& keep,
                   Layout* reduced_layout = nullptr);

// Reduced state of a pure vector on the kept factors; avoids forming the
// full projector (contracts the state tensor directly).
cmat reduced_density(const cvec& v, const Layout& layout, const std::vector<int>& keep,
                     Layout* reduced_layout = nullptr);

// --- spectral functions ------------------------------------------------------

struct EigenSystem {
  dvec values;   // ascending
  cmat vectors;  // columns
};

EigenSystem eigh(const cmat& hermitian);

// log on the support: eigenvalues below `floor` map to log-value 0.
cmat hermitian_log_support(const cmat& hermitian, double floor = kSupportFloor);

// Spectral sign: eigenvalues > tol -> +1, < -tol -> -1, else 0.  This is the
// dual-optimal contraction for the trace norm of a Hermitian operator.
cmat sign_matrix(const cmat& hermitian, double tol = 1e-12);

// --- norms and entropies -----------------------------------------------------

// Sum of singular values.  Hermitian and anti-Hermitian inputs take the
// eigenvalue path; everything else an SVD.
double trace_norm(const cmat& m);

// Largest singular value.  Exact (dense SVD / eigensolve) up to `exact_dim`,
// power iteration on M^dag M beyond that.
double operator_norm(const cmat& m, Eigen::Index exact_dim = 512);

// -sum lambda ln lambda over eigenvalues above the floor, in nats.
double von_neumann_entropy(const cmat& density, double floor = kSupportFloor);
double entropy_from_spectrum(const dvec& eigenvalues, double floor = kSupportFloor);

// Shannon entropy of a probability vector (validated: p_i >= -1e-12,
// sum within 1e-9 of 1), in nats.
double shannon_entropy(const std::vector<double>& p);

// h(p) = -p ln p - (1-p) ln(1-p); p in [0,1].
double binary_entropy(double p);

inline bool is_hermitian(const cmat& m, double tol = 1e-12) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, m.cwiseAbs().maxCoeff());
}

}  // namespace entlab

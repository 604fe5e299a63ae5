#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

// Shared aliases, tolerances and error types for the whole lab.
// Conventions used throughout:
//   * tensor factors are ordered most-significant first, i.e. for layout
//     {d0, d1, d2} the basis index is (i0*d1 + i1)*d2 + i2,
//   * entropies are in nats (natural logarithm),
//   * time evolution is U(t) = exp(-i H t).

namespace entlab {

using cxd = std::complex<double>;
using cmat = Eigen::MatrixXcd;
using cvec = Eigen::VectorXcd;
using dvec = Eigen::VectorXd;
using Layout = std::vector<Eigen::Index>;  // local dimensions of tensor factors

// Eigenvalues below this are treated as outside the support of a state:
// matrix logarithms put 0 there and entropy sums skip them.
inline constexpr double kSupportFloor = 1e-12;

// Hard cap on dense operator dimension; tensor products beyond this refuse
// to allocate instead of thrashing the machine.
inline constexpr Eigen::Index kDimCap = Eigen::Index(1) << 14;

// Construction of a nominally Hermitian operator warns above this asymmetry.
inline constexpr double kHermitianWarnTol = 1e-10;

struct lab_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Matrix/layout shapes that do not line up.
struct dimension_error : lab_error {
  using lab_error::lab_error;
};

// Request would exceed the dense-dimension cap.
struct capacity_error : lab_error {
  using lab_error::lab_error;
};

// Parameter outside its documented range (probabilities, gaps, grids, ...).
struct parameter_error : lab_error {
  using lab_error::lab_error;
};

// Numerical precondition violated (not PSD, trace off, gap collapsed, ...).
struct numeric_error : lab_error {
  using lab_error::lab_error;
};

inline Eigen::Index layout_dim(const Layout& layout) {
  Eigen::Index d = 1;
  for (Eigen::Index f : layout) {
    if (f < 1) throw dimension_error("layout factor must be >= 1");
    if (d > kDimCap / f + 1) throw capacity_error("layout exceeds dimension cap");
    d *= f;
  }
  if (d > kDimCap) throw capacity_error("layout exceeds dimension cap");
  return d;
}

}  // namespace entlab

#include "entlab/rng.hpp"

#include <Eigen/QR>

namespace entlab {

cmat Rng::ginibre(Eigen::Index rows, Eigen::Index cols) {
  cmat g(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) g(i, j) = cgaussian();
  return g;
}

cmat Rng::hermitian(Eigen::Index dim, bool unit_norm) {
  cmat g = ginibre(dim, dim);
  cmat h = 0.5 * (g + g.adjoint());
  if (unit_norm) {
    Eigen::SelfAdjointEigenSolver<cmat> es(h, Eigen::EigenvaluesOnly);
    const double n = es.eigenvalues().cwiseAbs().maxCoeff();
    if (n > 0) h /= n;
  }
  return h;
}

cmat Rng::unitary(Eigen::Index dim) {
  cmat g = ginibre(dim, dim);
  Eigen::HouseholderQR<cmat> qr(g);
  cmat q = qr.householderQ();
  cmat r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix the phase ambiguity so the distribution is Haar.
  for (Eigen::Index j = 0; j < dim; ++j) {
    const cxd d = r(j, j);
    const double a = std::abs(d);
    q.col(j) *= (a > 0 ? d / a : cxd(1.0, 0.0));
  }
  return q;
}

cmat Rng::density(Eigen::Index dim, Eigen::Index rank) {
  if (rank < 1 || rank > dim) throw parameter_error("Rng::density: rank outside [1, dim]");
  cmat g = ginibre(dim, rank);
  cmat w = g * g.adjoint();
  const double tr = w.real().trace();
  if (tr <= 0) throw numeric_error("Rng::density: degenerate draw");
  return w / tr;
}

cvec Rng::pure_state(Eigen::Index dim) {
  cvec v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = cgaussian();
  const double n = v.norm();
  if (n <= 0) throw numeric_error("Rng::pure_state: degenerate draw");
  return v / n;
}

cmat Rng::psd_contraction(Eigen::Index dim) {
  cmat u = unitary(dim);
  dvec s(dim);
  for (Eigen::Index i = 0; i < dim; ++i) s(i) = uniform();
  return u * s.asDiagonal() * u.adjoint();
}

}  // namespace entlab

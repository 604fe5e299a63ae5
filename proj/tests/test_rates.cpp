#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "entlab/commutator.hpp"
#include "entlab/operators.hpp"
#include "entlab/rates.hpp"
#include "entlab/rng.hpp"

using namespace entlab;

namespace {

// In-test propagator e^{-iHt} assembled straight from Eigen's solver.
cmat expm_oracle(const cmat& h, double t) {
  Eigen::SelfAdjointEigenSolver<cmat> es(h);
  cvec ph(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < ph.size(); ++i)
    ph[i] = std::exp(cxd(0.0, -es.eigenvalues()[i] * t));
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

double entropy_oracle(const cmat& rho) {
  Eigen::SelfAdjointEigenSolver<cmat> es(0.5 * (rho + rho.adjoint().eval()),
                                         Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double lam = es.eigenvalues()[i];
    if (lam > 1e-12) s -= lam * std::log(lam);
  }
  return s;
}

// First-factor marginal of a state on {m, n}, by direct index bookkeeping.
cmat marginal_oracle(const cvec& psi, Eigen::Index m, Eigen::Index n) {
  cmat rho = cmat::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      for (Eigen::Index k = 0; k < n; ++k)
        rho(i, j) += psi[i * n + k] * std::conj(psi[j * n + k]);
  return rho;
}

cmat pauli_z() {
  cmat z(2, 2);
  z << 1, 0, 0, -1;
  return z;
}

cvec bell_pair() {
  cvec v = cvec::Zero(4);
  v[0] = v[3] = 1.0 / std::sqrt(2.0);
  return v;
}

}  // namespace

TEST_CASE("finite-difference probe calibrates on closed forms") {
  const auto trig = rate_finite_difference([](double t) { return std::sin(2.0 * t + 0.3); });
  CHECK(trig.extrapolated == doctest::Approx(2.0 * std::cos(0.3)).epsilon(1e-10));
  CHECK(trig.ratio >= 3.9);
  CHECK(trig.ratio <= 4.1);

  const auto cubic = rate_finite_difference([](double t) { return t * t * t + 5.0 * t; });
  CHECK(cubic.extrapolated == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(cubic.ratio == doctest::Approx(4.0).epsilon(1e-6));

  CHECK_THROWS_AS(rate_finite_difference([](double) { return 0.0; }, 0.0), parameter_error);
}

TEST_CASE("mixing rate equals the mixture-entropy derivative") {
  Rng rng(1001);
  for (Eigen::Index dim : {4, 9}) {
    for (double p : {0.3, 0.9}) {
      Rng sub = rng.substream({static_cast<std::uint64_t>(dim), std::uint64_t(p * 10)});
      TwoStateEnsemble ens{p, sub.density(dim, dim), sub.density(dim, dim)};
      const cmat h = sub.hermitian(dim, true);
      const double rate = mixing_rate(ens, h);

      const auto probe = rate_finite_difference(
          [&](double t) {
            const cmat u = expm_oracle(h, t);
            return entropy_oracle(ens.p * ens.rho1 + (1.0 - ens.p) * u * ens.rho2 * u.adjoint());
          },
          1e-4);
      CHECK(rate == doctest::Approx(probe.extrapolated).epsilon(1e-7));
      CHECK(probe.ratio > 3.7);
      CHECK(probe.ratio < 4.3);
    }
  }
}

TEST_CASE("mixing rate linearity and null cases") {
  Rng rng(1002);
  const Eigen::Index dim = 6;
  TwoStateEnsemble ens{0.4, rng.density(dim, dim), rng.density(dim, dim)};
  const cmat h1 = rng.hermitian(dim);
  const cmat h2 = rng.hermitian(dim);
  const double lhs = mixing_rate(ens, 0.7 * h1 - 1.3 * h2);
  const double rhs = 0.7 * mixing_rate(ens, h1) - 1.3 * mixing_rate(ens, h2);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));

  // Identical states: the mixture never moves at first order.
  TwoStateEnsemble same{0.4, ens.rho1, ens.rho1};
  CHECK(std::abs(mixing_rate(same, h1)) < 1e-11);
  // Scalar probes generate a global phase only.
  CHECK(std::abs(mixing_rate(ens, cmat::Identity(dim, dim))) < 1e-12);
  // Degenerate weights: nothing evolves / commuting average.
  TwoStateEnsemble all_fixed{1.0, ens.rho1, ens.rho2};
  CHECK(mixing_rate(all_fixed, h1) == 0.0);
  TwoStateEnsemble all_moving{0.0, ens.rho1, ens.rho2};
  CHECK(std::abs(mixing_rate(all_moving, h1)) < 1e-11);

  cmat wrong(4, 4);
  wrong.setZero();
  CHECK_THROWS_AS(mixing_rate(ens, wrong), dimension_error);
  TwoStateEnsemble bad{1.4, ens.rho1, ens.rho2};
  CHECK_THROWS_AS(mixing_rate(bad, h1), parameter_error);
}

TEST_CASE("max mixing rate is attained, dominates, and obeys the entropy bound") {
  Rng rng(1003);
  for (double p : {0.2, 0.6}) {
    TwoStateEnsemble ens{p, rng.density(8, 8), rng.density(8, 8)};
    const auto res = max_mixing_rate(ens);
    CHECK(mixing_rate(ens, res.op) == doctest::Approx(res.value).epsilon(1e-10));
    CHECK(operator_norm(res.op) <= 1.0 + 1e-10);

    for (int s = 0; s < 40; ++s) {
      const cmat h = rng.hermitian(8, true);
      CHECK(mixing_rate(ens, h) <= res.value + 1e-10);
    }

    // Equivalent commutator form: A = (1-p) rho2 inside B = rho_bar.
    const cmat rho_bar = p * ens.rho1 + (1.0 - p) * ens.rho2;
    CHECK(res.value ==
          doctest::Approx(commutator_trace_norm((1.0 - p) * ens.rho2, rho_bar)).epsilon(1e-10));
    CHECK(res.value <= 11.0 * binary_entropy(p) + 1e-9);
  }
}

TEST_CASE("ensemble rate: per-state probes differentiate, a shared probe does not") {
  Rng rng(1004);
  const Eigen::Index dim = 6;
  const std::vector<double> w{0.2, 0.3, 0.5};
  std::vector<cmat> states, hams;
  for (int i = 0; i < 3; ++i) {
    states.push_back(rng.density(dim, dim));
    hams.push_back(rng.hermitian(dim, true));
  }
  const double rate = ensemble_mixing_rate(w, states, hams);
  const auto probe = rate_finite_difference(
      [&](double t) {
        cmat mix = cmat::Zero(dim, dim);
        for (size_t i = 0; i < w.size(); ++i) {
          const cmat u = expm_oracle(hams[i], t);
          mix += w[i] * u * states[i] * u.adjoint();
        }
        return entropy_oracle(mix);
      },
      1e-4);
  CHECK(rate == doctest::Approx(probe.extrapolated).epsilon(1e-7));

  // One common probe rotates the average rigidly: entropy is stationary.
  const std::vector<cmat> shared{hams[0], hams[0], hams[0]};
  CHECK(std::abs(ensemble_mixing_rate(w, states, shared)) < 1e-10);

  // Two-state reduction matches the dedicated form.
  TwoStateEnsemble ens{0.35, states[0], states[1]};
  const cmat zero = cmat::Zero(dim, dim);
  CHECK(ensemble_mixing_rate({0.35, 0.65}, {states[0], states[1]}, {zero, hams[1]}) ==
        doctest::Approx(mixing_rate(ens, hams[1])).epsilon(1e-12));

  CHECK_THROWS_AS(ensemble_mixing_rate({0.5, 0.5}, states, hams), parameter_error);
  CHECK_THROWS_AS(ensemble_mixing_rate({0.9, 0.3, -0.2}, states, hams), parameter_error);
}

TEST_CASE("mixture entropy stays inside the concavity window") {
  Rng rng(1005);
  TwoStateEnsemble ens{0.25, rng.density(5, 5), rng.density(5, 5)};
  const cmat h = rng.hermitian(5, true);
  dvec times(9);
  for (int i = 0; i < 9; ++i) times[i] = 0.25 * i;
  const auto win = total_mixing_check(ens, h, times);
  CHECK(win.lower_margin >= -1e-9);
  CHECK(win.upper_margin >= -1e-9);

  // Orthogonal pure states under a null probe sit exactly at the top of the
  // window: S(rho_bar) = h(p), average entropy 0.
  cmat p0 = cmat::Zero(2, 2), p1 = cmat::Zero(2, 2);
  p0(0, 0) = 1.0;
  p1(1, 1) = 1.0;
  TwoStateEnsemble pure{0.3, p0, p1};
  const auto tight = total_mixing_check(pure, cmat::Zero(2, 2), times);
  CHECK(tight.upper_margin == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(tight.lower_margin == doctest::Approx(binary_entropy(0.3)).epsilon(1e-12));
}

TEST_CASE("entangling rate equals the marginal-entropy derivative") {
  Rng rng(2001);
  const BipartiteSetting s{{2, 3, 3, 2}};
  const cvec psi = rng.pure_state(36);
  const cmat h = rng.hermitian(9, true);
  const double rate = entangling_rate(psi, s, h);

  const cmat h_full = embed(h, {1, 2}, s.layout);
  const auto probe = rate_finite_difference(
      [&](double t) {
        const cvec moved = expm_oracle(h_full, t) * psi;
        return entropy_oracle(marginal_oracle(moved, 6, 6));
      },
      1e-4);
  CHECK(rate == doctest::Approx(probe.extrapolated).epsilon(1e-7));

  // Purification symmetry of the two marginals, now and later.
  CHECK(subsystem_entropy(psi, s.layout, {0, 1}) ==
        doctest::Approx(subsystem_entropy(psi, s.layout, {2, 3})).epsilon(1e-10));
  const cvec later = expm_oracle(h_full, 0.3) * psi;
  CHECK(subsystem_entropy(later, s.layout, {0, 1}) ==
        doctest::Approx(subsystem_entropy(later, s.layout, {2, 3})).epsilon(1e-10));

  // Ancilla-free corner: the same derivative identity.
  const BipartiteSetting bare{{1, 4, 4, 1}};
  const cvec chi = rng.pure_state(16);
  const cmat g = rng.hermitian(16, true);
  const double bare_rate = entangling_rate(chi, bare, g);
  const auto bare_probe = rate_finite_difference(
      [&](double t) {
        const cvec moved = expm_oracle(g, t) * chi;
        return entropy_oracle(marginal_oracle(moved, 4, 4));
      },
      1e-4);
  CHECK(bare_rate == doctest::Approx(bare_probe.extrapolated).epsilon(1e-7));

  cmat wrong(4, 4);
  wrong.setZero();
  CHECK_THROWS_AS(entangling_rate(psi, s, wrong), dimension_error);
  CHECK_THROWS_AS(entangling_rate(2.0 * psi, s, h), parameter_error);
}

TEST_CASE("extension ensemble carries the entangling rate exactly") {
  Rng rng(2002);
  const BipartiteSetting s{{2, 3, 3, 2}};
  const cvec psi = rng.pure_state(36);
  const cmat h = rng.hermitian(9, true);

  const auto ens = entangling_extension(psi, {6, 6});
  CHECK(ens.p == doctest::Approx(35.0 / 36.0).epsilon(1e-15));
  CHECK(ens.rho1.trace().real() == doctest::Approx(1.0).epsilon(1e-12));
  Eigen::SelfAdjointEigenSolver<cmat> es(ens.rho1, Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues().minCoeff() >= -1e-10);

  // The ensemble average is the decoupled state rho_aA x 1/6.
  const cmat avg = ens.p * ens.rho1 + (1.0 - ens.p) * ens.rho2;
  const cmat tau = tensor_product(marginal_oracle(psi, 6, 6), cmat::Identity(6, 6) / 6.0);
  CHECK((avg - tau).norm() < 1e-12);

  // d^2 * mixing rate = entangling rate, for the embedded interaction...
  const cmat h_full = embed(h, {1, 2}, s.layout);
  CHECK(36.0 * mixing_rate(ens, h_full) ==
        doctest::Approx(entangling_rate(psi, s, h)).epsilon(1e-9));

  // ...and for an arbitrary full-space probe, against the direct formula.
  const cmat h_any = rng.hermitian(36, true);
  const cmat m_full = tensor_product(hermitian_log_support(marginal_oracle(psi, 6, 6)),
                                     cmat::Identity(6, 6));
  const double direct = -2.0 * (m_full * psi).dot(h_any * psi).imag();
  CHECK(36.0 * mixing_rate(ens, h_any) == doctest::Approx(direct).epsilon(1e-9));

  CHECK_THROWS_AS(entangling_extension(psi, {36, 1}), parameter_error);
  CHECK_THROWS_AS(entangling_extension(psi, {6, 6, 1}), dimension_error);
}

TEST_CASE("operator maximization at a fixed state") {
  Rng rng(2003);
  const BipartiteSetting s{{2, 2, 2, 2}};
  const cvec psi = rng.pure_state(16);
  const auto res = max_entangling_rate_operator(psi, s);
  CHECK(is_hermitian(res.op, 1e-10));
  CHECK(operator_norm(res.op) <= 1.0 + 1e-8);
  CHECK(entangling_rate(psi, s, res.op) == doctest::Approx(res.value).epsilon(1e-9));
  for (int t = 0; t < 30; ++t) {
    const cmat h = rng.hermitian(4, true);
    CHECK(entangling_rate(psi, s, h) <= res.value + 1e-9);
  }
}

TEST_CASE("analytic rate gradient matches directional differences") {
  Rng rng(2004);
  const BipartiteSetting s{{2, 2, 2, 2}};
  const cmat zz = tensor_product(pauli_z(), pauli_z());
  for (int trial = 0; trial < 4; ++trial) {
    Rng sub = rng.substream({static_cast<std::uint64_t>(trial)});
    const cvec psi = sub.pure_state(16);
    const cvec g = entangling_rate_gradient(psi, s, zz);

    cvec v = sub.pure_state(16);
    v -= psi * psi.dot(v);  // tangent direction
    v.normalize();
    const auto probe = rate_finite_difference(
        [&](double t) {
          cvec moved = psi + t * v;
          moved.normalize();
          return entangling_rate(moved, s, zz);
        },
        1e-4);
    const double analytic = 2.0 * v.dot(g).real();
    CHECK(analytic == doctest::Approx(probe.extrapolated).epsilon(1e-6));
  }

  // Maximally mixed marginal: the log term is scalar, the rate vanishes.
  const cvec frozen = tensor_product(bell_pair(), bell_pair());
  CHECK(std::abs(entangling_rate(frozen, s, zz)) < 1e-12);
}

TEST_CASE("state optimizer reaches the two-qubit record for Z x Z") {
  const BipartiteSetting s{{2, 2, 2, 2}};
  const cmat zz = tensor_product(pauli_z(), pauli_z());
  const auto res = maximize_entangling_rate(s, zz, 24, 99);
  // Known landscape: supremum ~ 1.32550 in natural units (~1.9123 over ln 2).
  CHECK(res.value >= 1.2824);
  CHECK(res.value <= 1.326);
  CHECK(res.value <= 4.0 * std::log(2.0));
  CHECK(entangling_rate(res.psi, s, zz) == doctest::Approx(res.value).epsilon(1e-9));
  CHECK(res.grad_norm <= 1e-3);
  CHECK(res.restarts == 24);

  CHECK_THROWS_AS(maximize_entangling_rate(s, zz, 0, 1), parameter_error);
}

TEST_CASE("entanglement change cap and its swap saturation") {
  Rng rng(2005);
  const BipartiteSetting s{{2, 2, 2, 2}};
  const cvec psi = tensor_product(bell_pair(), bell_pair());

  cmat swap = cmat::Zero(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) swap(i * 2 + j, j * 2 + i) = 1.0;

  const auto sat = entangling_total_check(psi, s, swap);
  CHECK(sat.before == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(sat.after == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-10));
  CHECK(sat.change == doctest::Approx(sat.cap).epsilon(1e-10));

  for (int t = 0; t < 20; ++t) {
    const auto rnd = entangling_total_check(psi, s, rng.unitary(4));
    CHECK(std::abs(rnd.change) <= rnd.cap + 1e-9);
  }

  CHECK_THROWS_AS(entangling_total_check(psi, s, 2.0 * swap), parameter_error);
}

TEST_CASE("superposition entropy splits over branches orthogonal on both sides") {
  Rng rng(2006);
  const Layout layout{2, 2, 2, 2};
  cvec e0 = cvec::Zero(2), e1 = cvec::Zero(2);
  e0[0] = 1.0;
  e1[1] = 1.0;
  // Tag each branch on both ancillas so the marginals on either side of the
  // cut are orthogonal and the cross terms cancel.
  const cvec b0 = tensor_product(tensor_product(e0, rng.pure_state(4)), e0);
  const cvec b1 = tensor_product(tensor_product(e1, rng.pure_state(4)), e1);
  dvec w(2);
  w << 0.3, 0.7;

  const auto check = superposition_entropy_check({b0, b1}, w, layout, {0, 1});
  CHECK(check.orthogonal);
  CHECK(check.gap < 1e-10);
  CHECK(check.lhs == doctest::Approx(check.rhs).epsilon(1e-10));

  // A tag on one side only is not enough: the hypothesis fails and so does
  // the identity.
  const cvec one_sided0 = tensor_product(e0, rng.pure_state(8));
  const cvec one_sided1 = tensor_product(e1, rng.pure_state(8));
  const auto lop = superposition_entropy_check({one_sided0, one_sided1}, w, layout, {0, 1});
  CHECK_FALSE(lop.orthogonal);
  CHECK(lop.gap > 1e-3);

  // Generic branches do not have orthogonal marginals.
  const auto bad = superposition_entropy_check({rng.pure_state(16), rng.pure_state(16)}, w,
                                               layout, {0, 1});
  CHECK_FALSE(bad.orthogonal);

  dvec w_bad(2);
  w_bad << 0.5, 0.6;
  CHECK_THROWS_AS(superposition_entropy_check({b0, b1}, w_bad, layout, {0, 1}), parameter_error);
}

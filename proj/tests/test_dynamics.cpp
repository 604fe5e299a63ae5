#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "entlab/dynamics.hpp"
#include "entlab/hamiltonian.hpp"
#include "entlab/rates.hpp"
#include "entlab/rng.hpp"

using namespace entlab;

namespace {

const cmat kX = (cmat(2, 2) << 0, 1, 1, 0).finished();
const cmat kY = (cmat(2, 2) << 0, cxd(0, -1), cxd(0, 1), 0).finished();
const cmat kZ = (cmat(2, 2) << 1, 0, 0, -1).finished();

Potential tfim_ring(long length, double j, double g) {
  PresetParams p;
  p.j = j;
  p.g = g;
  return preset_potential("tfim", Torus(1, length), p);
}

cvec seeded_state(Eigen::Index dim, std::uint64_t seed) {
  return Rng(seed).pure_state(dim);
}

}  // namespace

TEST_CASE("heisenberg evolution: identity at t = 0 and for conserved operators") {
  Rng rng(411);
  const cmat h = rng.hermitian(8);
  const cmat a = rng.hermitian(8);
  CHECK((heisenberg_evolve(h, 0.0, a) - a).norm() == doctest::Approx(0.0).epsilon(1e-12));
  // h itself is conserved at any time.
  CHECK((heisenberg_evolve(h, 1.7, h) - h).norm() < 1e-10);
}

TEST_CASE("heisenberg evolution of a spin in a field rotates X into Y") {
  const double t = 0.3;
  const cmat rotated = heisenberg_evolve(kZ, t, kX);
  const cmat expected = std::cos(2 * t) * kX + std::sin(2 * t) * kY;
  CHECK((rotated - expected).norm() < 1e-14);
  // Quarter period: X picks up a full sign.
  const double quarter = M_PI / 2;
  CHECK((heisenberg_evolve(kZ, quarter, kX) + kX).norm() < 1e-13);
}

TEST_CASE("heisenberg evolution composes and preserves norms") {
  Rng rng(412);
  const cmat h = rng.hermitian(8);
  const cmat a = rng.hermitian(8);
  const EigenSystem es = eigh(h);
  const cmat one_step = heisenberg_evolve(es, 0.9, heisenberg_evolve(es, 0.4, a));
  const cmat direct = heisenberg_evolve(es, 1.3, a);
  CHECK((one_step - direct).norm() < 1e-10);
  CHECK(heisenberg_evolve(es, 1.3, a).norm() == doctest::Approx(a.norm()).epsilon(1e-12));
  CHECK(operator_norm(direct) == doctest::Approx(operator_norm(a)).epsilon(1e-10));
  CHECK_THROWS_AS(heisenberg_evolve(h, 1.0, cmat::Identity(4, 4)), dimension_error);
}

TEST_CASE("interaction strength of the transverse-field chain") {
  // Per site: one field term (norm 2, one site, zero diameter) plus two bonds
  // (norm 1, two sites, unit diameter): 2 + 2 * 1 * 2 * e = 2 + 4e.
  const Potential pot6 = tfim_ring(6, 1.0, 2.0);
  const Potential pot8 = tfim_ring(8, 1.0, 2.0);
  CHECK(interaction_strength(pot6, 1.0) == doctest::Approx(12.873127313836181).epsilon(1e-12));
  CHECK(interaction_strength(pot8, 1.0) ==
        doctest::Approx(interaction_strength(pot6, 1.0)).epsilon(1e-13));
  // Without the exponential weight: 2 + 2 * 2 = 6 per site.
  CHECK(interaction_strength(pot6, 0.0) == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("strict light-cone bound arithmetic") {
  // 2 * 1 * 1 * 1 * exp(2 - 4) = 2 e^{-2}.
  CHECK(lr_strict_bound(1, 1, 1, 1, 1, 1, 4) ==
        doctest::Approx(0.2706705664732254).epsilon(1e-12));
  CHECK(lr_strict_bound(2, 1, 1, 1, 1, 1, 4) ==
        doctest::Approx(2 * 0.2706705664732254).epsilon(1e-12));
  CHECK(lr_strict_bound(1, 1, 1, 1, 1, -1, 4) ==
        doctest::Approx(lr_strict_bound(1, 1, 1, 1, 1, 1, 4)).epsilon(1e-13));
}

TEST_CASE("kernel-form bound arithmetic") {
  // 2 * 1 * 1 * 1 * 2 * 0.5 * e^{2*2*0.25} / 2 = e.
  CHECK(lr_kernel_bound(1, 1, 1, 2, 0.5, 2.0, 0.25) ==
        doctest::Approx(2.718281828459045).epsilon(1e-12));
  CHECK_THROWS_AS(lr_kernel_bound(1, 1, 1, 1, 1.0, 0.0, 1.0), parameter_error);
}

TEST_CASE("dominating kernel for the transverse-field ring and its hypothesis") {
  const Potential pot = tfim_ring(8, 1.0, 2.0);
  const std::vector<double> kernel = dominating_exponential_kernel(pot, 1.0);
  REQUIRE(kernel.size() == 5);  // ring diameter 4
  // The binding pair is a single site: field (norm 2) plus two bonds = 4.
  CHECK(kernel[0] == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(kernel[1] == doctest::Approx(1.4715177646857693).epsilon(1e-12));

  const KernelDomination dom = kernel_domination_check(pot, kernel);
  CHECK(dom.ok);
  CHECK(dom.worst_margin == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(dom.v == dom.w);

  std::vector<double> halved = kernel;
  for (double& k : halved) k /= 2;
  const KernelDomination bad = kernel_domination_check(pot, halved);
  CHECK_FALSE(bad.ok);
  CHECK(bad.worst_margin == doctest::Approx(-2.0).epsilon(1e-12));

  CHECK_THROWS_AS(kernel_domination_check(pot, std::vector<double>{1.0, 0.5}), dimension_error);
}

TEST_CASE("light-cone scan on the transverse-field ring stays under both bounds") {
  const Potential pot = tfim_ring(8, 1.0, 2.0);
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(0.1 * i);

  LocalOperator a{{0}, kX};
  LocalOperator b{{4}, kZ};

  SUBCASE("strict bound only") {
    const LrReport report = lr_check(pot, a, b, grid, 1.0);
    REQUIRE(report.rows.size() == 21);
    CHECK(report.dist == 4);
    CHECK(report.s == doctest::Approx(12.873127313836181).epsilon(1e-12));
    CHECK(report.trivial_cap == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(std::isnan(report.lambda));
    CHECK(report.violations == 0);
    CHECK(report.max_ratio <= 1.0 + 1e-12);

    const LrRow& first = report.rows.front();
    CHECK_FALSE(first.vacuous);
    CHECK(first.bound_strict == doctest::Approx(2 * std::exp(-4.0)).epsilon(1e-12));
    CHECK(first.exact_norm < 1e-12);  // disjoint supports commute at t = 0
    CHECK(std::isnan(first.bound_kernel));

    int vacuous = 0, computed = 0;
    for (const LrRow& row : report.rows) {
      if (row.vacuous) {
        ++vacuous;
        CHECK(std::isnan(row.exact_norm));
      } else {
        ++computed;
        CHECK(row.exact_norm <= row.bound_strict + 1e-9);
      }
      CHECK_FALSE(row.violation);
    }
    CHECK(computed >= 2);   // t = 0 and t = 0.1 sit inside the light cone
    CHECK(vacuous >= 15);   // the fast clock 2s makes late rows trivial
  }

  SUBCASE("with the dominating kernel") {
    const std::vector<double> kernel = dominating_exponential_kernel(pot, 1.0);
    const LrReport report = lr_check(pot, a, b, grid, 1.0, kernel);
    // On the ring every site sits on a geodesic between antipodes, so the
    // reproducing constant is (number of sites) * (kernel scale).
    CHECK(report.lambda == doctest::Approx(32.0).epsilon(1e-10));
    CHECK(report.violations == 0);
    const LrRow& first = report.rows.front();
    CHECK_FALSE(std::isnan(first.bound_kernel));
    CHECK(first.bound_kernel ==
          doctest::Approx(2 * 4 * std::exp(-4.0) / 32.0).epsilon(1e-10));
    CHECK(first.exact_norm <= first.bound_kernel + 1e-9);
    for (const LrRow& row : report.rows) CHECK_FALSE(row.violation);
  }

  SUBCASE("input validation") {
    CHECK_THROWS_AS(lr_check(pot, a, LocalOperator{{0}, kZ}, grid, 1.0), parameter_error);
    CHECK_THROWS_AS(lr_check(pot, a, b, {}, 1.0), parameter_error);
    CHECK_THROWS_AS(lr_check(pot, LocalOperator{{0}, cmat::Identity(4, 4)}, b, grid, 1.0),
                    dimension_error);
    CHECK_THROWS_AS(lr_check(pot, LocalOperator{{0, 0}, cmat::Identity(4, 4)}, b, grid, 1.0),
                    parameter_error);
    CHECK_THROWS_AS(lr_check(pot, LocalOperator{{99}, kX}, b, grid, 1.0), dimension_error);
    // A kernel that fails the domination hypothesis is rejected.
    std::vector<double> weak(5, 1e-6);
    CHECK_THROWS_AS(lr_check(pot, a, b, grid, 1.0, weak), parameter_error);
  }
}

TEST_CASE("per-term entangling capacity factor") {
  CHECK(incremental_entangling_factor(1.0) == 0.0);
  // 11 * (2 ln 2 + 3 ln(4/3)), the n = 2 capacity.
  CHECK(incremental_entangling_factor(2.0) ==
        doctest::Approx(24.742746363227566).epsilon(1e-12));
  for (double n : {2.0, 10.0, 1e6}) {
    const double f = incremental_entangling_factor(n);
    CHECK(f <= 11.0 * (2 * std::log(n) + 1.0));
    CHECK(f >= 11.0 * 2 * std::log(n));
  }
  CHECK(incremental_entangling_factor(3.0) > incremental_entangling_factor(2.0));
  CHECK_THROWS_AS(incremental_entangling_factor(0.5), parameter_error);
}

TEST_CASE("entropy rate vanishes without interactions and for one-sided terms") {
  const Torus ring(1, 6);
  const cvec psi = seeded_state(64, 421);

  SUBCASE("empty potential") {
    const Potential empty(ring, 2);
    const RealtimeRate r = realtime_entropy_rate(empty, psi, {0, 1, 2});
    CHECK(r.rate == 0.0);
    CHECK(r.bound == 0.0);
    CHECK(r.area_bound == 0.0);
    CHECK(r.contributions.empty());
    CHECK_FALSE(r.fd_fallback);
  }

  SUBCASE("terms on a single side contribute nothing") {
    Potential pot(ring, 2);
    pot.add_term({0, 1}, tensor_product(kZ, kZ), "zz inside");
    pot.add_term({3, 4}, tensor_product(kX, kX), "xx outside");
    const RealtimeRate r = realtime_entropy_rate(pot, psi, {0, 1, 2});
    CHECK(std::abs(r.rate) < 1e-12);
    CHECK(r.interior_max < 1e-12);
    REQUIRE(r.contributions.size() == 2);
    for (double c : r.contributions) CHECK(std::abs(c) < 1e-12);
    CHECK(r.bound > 0.0);  // the bound is state-independent bookkeeping
  }
}

TEST_CASE("entropy rate of a half ring matches the four-factor rate machinery") {
  const Potential pot = tfim_ring(8, 1.0, 2.0);
  const Region region{0, 1, 2, 3};
  const cvec psi = seeded_state(256, 422);
  const RealtimeRate r = realtime_entropy_rate(pot, psi, region);

  REQUIRE(r.contributions.size() == pot.terms().size());
  CHECK_FALSE(r.fd_fallback);
  CHECK(r.interior_max < 1e-12);

  double total = 0.0;
  for (double c : r.contributions) total += c;
  CHECK(r.rate == doctest::Approx(total).epsilon(1e-12));

  // The same derivative through the four-factor machinery: the region holds
  // the leading factors, so the split is (1, 16, 16, 1) with the full
  // Hamiltonian as the middle interaction.
  const BipartiteSetting setting{{1, 16, 16, 1}};
  const double reference = entangling_rate(psi, setting, pot.assemble());
  CHECK(r.rate == doctest::Approx(reference).epsilon(1e-9));

  // Dropping the one-sided terms changes nothing: the rate lives on the cut.
  Potential crossing(pot.lattice(), 2);
  for (const auto& term : pot.terms()) {
    bool inside = false, outside = false;
    for (long s : term.sites) ((s <= 3) ? inside : outside) = true;
    if (inside && outside) crossing.add_term(term.sites, term.op, term.label);
  }
  REQUIRE(crossing.terms().size() == 2);  // the two cut bonds of the ring
  const double cross_only = entangling_rate(psi, setting, crossing.assemble());
  CHECK(r.rate == doctest::Approx(cross_only).epsilon(1e-9));

  // Fresh derivative straight from entropy differences.
  const EigenSystem es = eigh(pot.assemble());
  auto entropy_at = [&](double t) {
    cvec evolved = es.vectors.adjoint() * psi;
    for (Eigen::Index i = 0; i < evolved.size(); ++i)
      evolved[i] *= std::exp(cxd(0.0, -es.values[i] * t));
    evolved = es.vectors * evolved;
    return subsystem_entropy(evolved, Layout(8, 2), {0, 1, 2, 3});
  };
  const FdProbe probe = rate_finite_difference(entropy_at, 1e-4);
  CHECK(r.rate == doctest::Approx(probe.extrapolated).epsilon(1e-4));

  // Chain of caps: the rate sits under the profile bound, which sits under
  // the area-law form.
  CHECK(std::abs(r.rate) <= r.bound);
  CHECK(r.bound <= r.area_bound);
  CHECK(r.area == doctest::Approx(2.0));

  // Bound composition: every site anchors one unit-norm bond at radius 1,
  // all eight sites sit within distance 1 of the cut, and a radius-1 cluster
  // on a chain cuts at worst into a two-dimensional side.
  const double f2 = incremental_entangling_factor(2.0);
  CHECK(r.bound == doctest::Approx(8 * f2).epsilon(1e-12));
  CHECK(r.area_bound == doctest::Approx(2 * 2 * 3 * f2).epsilon(1e-12));

  // Each crossing term respects its own capacity.
  for (size_t k = 0; k < pot.terms().size(); ++k) {
    CHECK(std::abs(r.contributions[k]) <=
          f2 * operator_norm(pot.terms()[k].op) + 1e-9);
  }

  // Region order does not matter.
  const RealtimeRate shuffled = realtime_entropy_rate(pot, psi, {3, 1, 0, 2});
  CHECK(shuffled.rate == doctest::Approx(r.rate).epsilon(1e-12));
}

TEST_CASE("entropy rate falls back to differences on a rank-deficient cut") {
  const Potential pot = tfim_ring(6, 1.0, 2.0);
  cvec psi = cvec::Zero(64);
  psi[0] = 1.0;  // product state: the half-ring marginal has rank one
  const RealtimeRate r = realtime_entropy_rate(pot, psi, {0, 1, 2});
  CHECK(r.fd_fallback);
  CHECK(r.contributions.empty());
  // The entropy starts at its minimum, so the one-sided growth has zero slope.
  CHECK(std::abs(r.rate) < 1e-6);
  CHECK(std::abs(r.rate) <= r.bound);
}

TEST_CASE("entropy rate on a two-dimensional torus") {
  PresetParams params;
  params.j = 1.0;
  params.g = 1.5;
  const Potential pot = preset_potential("tfim", Torus(2, 2), params);
  const cvec psi = seeded_state(16, 423);
  const RealtimeRate r = realtime_entropy_rate(pot, psi, {0, 1});
  CHECK(std::abs(r.rate) <= r.bound);
  CHECK(r.bound <= r.area_bound);
  CHECK(r.interior_max < 1e-12);

  const EigenSystem es = eigh(pot.assemble());
  auto entropy_at = [&](double t) {
    cvec evolved = es.vectors.adjoint() * psi;
    for (Eigen::Index i = 0; i < evolved.size(); ++i)
      evolved[i] *= std::exp(cxd(0.0, -es.values[i] * t));
    evolved = es.vectors * evolved;
    return subsystem_entropy(evolved, Layout(4, 2), {0, 1});
  };
  const FdProbe probe = rate_finite_difference(entropy_at, 1e-4);
  CHECK(r.rate == doctest::Approx(probe.extrapolated).epsilon(1e-4));
}

TEST_CASE("entropy rate input validation") {
  const Potential pot = tfim_ring(6, 1.0, 2.0);
  const cvec psi = seeded_state(64, 424);
  CHECK_THROWS_AS(realtime_entropy_rate(pot, seeded_state(32, 425), {0, 1, 2}), dimension_error);
  CHECK_THROWS_AS(realtime_entropy_rate(pot, 2.0 * psi, {0, 1, 2}), parameter_error);
  CHECK_THROWS(realtime_entropy_rate(pot, psi, {}));
  CHECK_THROWS(realtime_entropy_rate(pot, psi, {0, 1, 2, 3, 4, 5}));
}

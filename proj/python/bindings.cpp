#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "entlab/commutator.hpp"
#include "entlab/dynamics.hpp"
#include "entlab/hamiltonian.hpp"
#include "entlab/lattice.hpp"
#include "entlab/operators.hpp"
#include "entlab/qac.hpp"
#include "entlab/rates.hpp"
#include "entlab/rng.hpp"

namespace py = pybind11;
using namespace entlab;

namespace {

py::dict transport_to_dict(const TransportResult& r) {
  py::list trace;
  for (const TransportStep& step : r.trace) {
    py::dict row;
    row["s"] = step.s;
    row["gap"] = step.gap;
    row["fidelity"] = step.fidelity;
    row["entropy"] = step.entropy;
    row["ds_rate"] = step.ds_rate;
    trace.append(row);
  }
  py::dict d;
  d["trace"] = trace;
  d["constant_c"] = r.constant_c;
  d["area"] = r.area;
  d["entropy_change"] = r.entropy_change;
  d["fidelity_final"] = r.fidelity_final;
  d["rate_violations"] = r.rate_violations;
  d["max_unitarity_defect"] = r.max_unitarity_defect;
  d["aborted"] = r.aborted;
  d["last_valid_s"] = r.last_valid_s;
  d["u_final"] = r.u_final;
  return d;
}

}  // namespace

PYBIND11_MODULE(_entlab, m) {
  m.doc() = "dense numerical laboratory for entanglement rates and area-law stability";

  py::register_exception<lab_error>(m, "LabError");

  m.attr("SUPPORT_FLOOR") = kSupportFloor;
  m.attr("DIM_CAP") = kDimCap;

  // --- operator core ---------------------------------------------------------
  m.def("tensor_product", py::overload_cast<const cmat&, const cmat&>(&tensor_product));
  m.def("tensor_product_state", py::overload_cast<const cvec&, const cvec&>(&tensor_product));
  m.def("tensor_chain", &tensor_chain);
  m.def("embed", &embed, py::arg("op"), py::arg("slots"), py::arg("layout"));
  m.def("identity", &identity);
  m.def(
      "partial_trace",
      [](const cmat& m_, const Layout& layout, const std::vector<int>& keep) {
        return partial_trace(m_, layout, keep);
      },
      py::arg("m"), py::arg("layout"), py::arg("keep"));
  m.def(
      "reduced_density",
      [](const cvec& v, const Layout& layout, const std::vector<int>& keep) {
        return reduced_density(v, layout, keep);
      },
      py::arg("v"), py::arg("layout"), py::arg("keep"));
  m.def("eigh", [](const cmat& h) {
    const EigenSystem es = eigh(h);
    return py::make_tuple(es.values, es.vectors);
  });
  m.def("hermitian_log_support", &hermitian_log_support, py::arg("hermitian"),
        py::arg("floor") = kSupportFloor);
  m.def("sign_matrix", &sign_matrix, py::arg("hermitian"), py::arg("tol") = 1e-12);
  m.def("trace_norm", &trace_norm);
  m.def("operator_norm", &operator_norm, py::arg("m"), py::arg("exact_dim") = 512);
  m.def("von_neumann_entropy", &von_neumann_entropy, py::arg("density"),
        py::arg("floor") = kSupportFloor);
  m.def("entropy_from_spectrum", &entropy_from_spectrum, py::arg("eigenvalues"),
        py::arg("floor") = kSupportFloor);
  m.def("shannon_entropy", &shannon_entropy);
  m.def("binary_entropy", &binary_entropy);

  // --- rng -------------------------------------------------------------------
  py::class_<Rng>(m, "Rng")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def("substream", &Rng::substream)
      .def("uniform", &Rng::uniform)
      .def("gaussian", &Rng::gaussian)
      .def("integer", &Rng::integer)
      .def("ginibre", &Rng::ginibre)
      .def("hermitian", &Rng::hermitian, py::arg("dim"), py::arg("unit_norm") = false)
      .def("unitary", &Rng::unitary)
      .def("density", &Rng::density, py::arg("dim"), py::arg("rank"))
      .def("pure_state", &Rng::pure_state);

  // --- commutator laboratory -------------------------------------------------
  py::enum_<SpectrumProfile>(m, "SpectrumProfile")
      .value("uniform", SpectrumProfile::uniform)
      .value("geometric", SpectrumProfile::geometric)
      .value("two_scale", SpectrumProfile::two_scale);

  m.def("spectral_weight_f", &spectral_weight_f);
  m.def("commutator_trace_norm", &commutator_trace_norm, py::arg("a"), py::arg("b"),
        py::arg("floor") = kSupportFloor);
  m.def(
      "sample_dominated_pair",
      [](Rng& rng, Eigen::Index dim, double p, SpectrumProfile profile, double ratio) {
        const DominatedPair pair = sample_dominated_pair(rng, dim, p, profile, ratio);
        return py::make_tuple(pair.a, pair.b);
      },
      py::arg("rng"), py::arg("dim"), py::arg("p"),
      py::arg("profile") = SpectrumProfile::uniform, py::arg("geometric_ratio") = 0.5);
  m.def(
      "partition_decompose",
      [](const cmat& a, const cmat& b, double floor) {
        const PartitionDecomposition d = partition_decompose(a, b, floor);
        py::dict out;
        out["p"] = d.p;
        out["block_of"] = d.block_of;
        out["w_blocks"] = d.w_blocks;
        out["trace_norm"] = d.trace_norm;
        out["w_total"] = d.w_total;
        out["v_total"] = d.v_total;
        out["v_prime"] = d.v_prime;
        out["w_far"] = d.w_far;
        out["bound_far"] = d.bound_far;
        out["bound_v"] = d.bound_v;
        out["bound_v_prime"] = d.bound_v_prime;
        out["bound_total"] = d.bound_total;
        return out;
      },
      py::arg("a"), py::arg("b"), py::arg("floor") = kSupportFloor);
  m.def(
      "ratio_scan",
      [](const std::vector<Eigen::Index>& dims, const std::vector<double>& p_grid, int samples,
         std::uint64_t seed, int threads) {
        const ScanReport r = ratio_scan(dims, p_grid, samples, seed, threads);
        py::list cells;
        for (const ScanCell& c : r.cells) {
          py::dict cell;
          cell["dim"] = c.dim;
          cell["p"] = c.p;
          cell["samples"] = c.samples;
          cell["max_ratio"] = c.max_ratio;
          cell["mean_ratio"] = c.mean_ratio;
          cells.append(cell);
        }
        py::dict witness;
        witness["a"] = r.witness.a;
        witness["b"] = r.witness.b;
        witness["p"] = r.witness.p;
        witness["ratio"] = r.witness.ratio;
        witness["dim"] = r.witness.dim;
        witness["sample_seed"] = r.witness.sample_seed;
        py::dict out;
        out["cells"] = cells;
        out["global_max"] = r.global_max;
        out["witness"] = witness;
        out["hard_violations"] = r.hard_violations;
        out["soft_violations"] = r.soft_violations;
        out["hard_c"] = r.hard_c;
        out["soft_c"] = r.soft_c;
        return out;
      },
      py::arg("dims"), py::arg("p_grid"), py::arg("samples"), py::arg("seed"),
      py::arg("threads") = 1);

  // --- rates -----------------------------------------------------------------
  py::class_<TwoStateEnsemble>(m, "TwoStateEnsemble")
      .def(py::init([](double p, cmat rho1, cmat rho2) {
             return TwoStateEnsemble{p, std::move(rho1), std::move(rho2)};
           }),
           py::arg("p"), py::arg("rho1"), py::arg("rho2"))
      .def_readwrite("p", &TwoStateEnsemble::p)
      .def_readwrite("rho1", &TwoStateEnsemble::rho1)
      .def_readwrite("rho2", &TwoStateEnsemble::rho2);

  m.def("mixing_rate", &mixing_rate, py::arg("ens"), py::arg("h"),
        py::arg("floor") = kSupportFloor);
  m.def(
      "max_mixing_rate",
      [](const TwoStateEnsemble& ens, double floor) {
        const MaxRateResult r = max_mixing_rate(ens, floor);
        return py::make_tuple(r.value, r.op);
      },
      py::arg("ens"), py::arg("floor") = kSupportFloor);
  m.def("ensemble_mixing_rate", &ensemble_mixing_rate, py::arg("weights"), py::arg("states"),
        py::arg("hams"), py::arg("floor") = kSupportFloor);
  m.def(
      "total_mixing_check",
      [](const TwoStateEnsemble& ens, const cmat& h, const dvec& times) {
        const MixingWindow w = total_mixing_check(ens, h, times);
        return py::make_tuple(w.lower_margin, w.upper_margin);
      },
      py::arg("ens"), py::arg("h"), py::arg("times"));
  m.def(
      "rate_finite_difference",
      [](const std::function<double(double)>& f, double dt) {
        const FdProbe p = rate_finite_difference(f, dt);
        py::dict out;
        out["coarse"] = p.coarse;
        out["fine"] = p.fine;
        out["extrapolated"] = p.extrapolated;
        out["ratio"] = p.ratio;
        return out;
      },
      py::arg("f"), py::arg("dt") = 1e-4);
  m.def(
      "entangling_rate",
      [](const cvec& psi, const Layout& layout, const cmat& h_ab, double floor) {
        return entangling_rate(psi, BipartiteSetting{layout}, h_ab, floor);
      },
      py::arg("psi"), py::arg("layout"), py::arg("h_ab"), py::arg("floor") = kSupportFloor);
  m.def(
      "max_entangling_rate_operator",
      [](const cvec& psi, const Layout& layout, double floor) {
        const MaxRateResult r = max_entangling_rate_operator(psi, BipartiteSetting{layout}, floor);
        return py::make_tuple(r.value, r.op);
      },
      py::arg("psi"), py::arg("layout"), py::arg("floor") = kSupportFloor);
  m.def("subsystem_entropy", &subsystem_entropy, py::arg("psi"), py::arg("layout"),
        py::arg("keep"));
  m.def("entangling_extension", &entangling_extension, py::arg("psi"), py::arg("two_factor"));
  m.def(
      "entangling_total_check",
      [](const cvec& psi, const Layout& layout, const cmat& u_ab) {
        const EntropyChange ec = entangling_total_check(psi, BipartiteSetting{layout}, u_ab);
        py::dict out;
        out["before"] = ec.before;
        out["after"] = ec.after;
        out["change"] = ec.change;
        out["cap"] = ec.cap;
        return out;
      },
      py::arg("psi"), py::arg("layout"), py::arg("u_ab"));
  m.def(
      "maximize_entangling_rate",
      [](const Layout& layout, const cmat& h_ab, int restarts, std::uint64_t seed, int max_iter,
         double tol) {
        const OptimizeResult r =
            maximize_entangling_rate(BipartiteSetting{layout}, h_ab, restarts, seed, max_iter, tol);
        py::dict out;
        out["value"] = r.value;
        out["psi"] = r.psi;
        out["grad_norm"] = r.grad_norm;
        out["iterations"] = r.iterations;
        out["restarts"] = r.restarts;
        return out;
      },
      py::arg("layout"), py::arg("h_ab"), py::arg("restarts"), py::arg("seed"),
      py::arg("max_iter") = 400, py::arg("tol") = 1e-9);

  // --- lattice ---------------------------------------------------------------
  py::class_<Torus>(m, "Torus")
      .def(py::init<int, int>(), py::arg("nu"), py::arg("L"))
      .def_readonly("nu", &Torus::nu)
      .def_readonly("L", &Torus::L)
      .def("site_count", &Torus::site_count)
      .def("coords", &Torus::coords)
      .def("site", &Torus::site)
      .def("distance", &Torus::distance)
      .def("ball", &Torus::ball)
      .def("neighbors", &Torus::neighbors);

  m.def("make_region", &make_region);
  m.def("parse_region", &parse_region);
  m.def("boundary_and_area", [](const Torus& t, const Region& region) {
    const BoundaryData b = boundary_and_area(t, region);
    py::dict out;
    out["inner"] = b.inner;
    out["outer"] = b.outer;
    out["area"] = b.area;
    return out;
  });
  m.def("boundary_profile", [](const Torus& t, const Region& region) {
    const CutProfile p = boundary_profile(t, region);
    py::dict out;
    out["m"] = p.m;
    out["counts"] = p.counts;
    out["cap"] = p.cap;
    out["area"] = p.area;
    return out;
  });
  m.def("reproducing_constant", [](const Torus& t, const std::vector<double>& kernel) {
    const ReproducingReport r = reproducing_constant(t, kernel);
    py::dict out;
    out["lambda"] = r.lambda;
    out["witness_site"] = r.witness_site;
    out["ratios"] = r.ratios;
    return out;
  });
  m.def("exponential_kernel", &exponential_kernel, py::arg("t"), py::arg("mu"));

  // --- hamiltonians ----------------------------------------------------------
  m.def("pauli", [](const std::string& which) {
    if (which.size() != 1) throw parameter_error("pauli: expected one of I, X, Y, Z");
    return pauli(which[0]);
  });

  py::class_<Potential>(m, "Potential")
      .def(py::init<Torus, Eigen::Index>(), py::arg("lattice"), py::arg("local_dim"))
      .def("add_term", &Potential::add_term, py::arg("sites"), py::arg("op"),
           py::arg("label") = "")
      .def("terms",
           [](const Potential& pot) {
             py::list out;
             for (const PotentialTerm& term : pot.terms())
               out.append(py::make_tuple(term.sites, term.op, term.label));
             return out;
           })
      .def("lattice", &Potential::lattice)
      .def("local_dim", &Potential::local_dim)
      .def("site_count", &Potential::site_count)
      .def("total_dim", &Potential::total_dim)
      .def("assemble", &Potential::assemble)
      .def("term_norm_sum", &Potential::term_norm_sum)
      .def("max_term_range", &Potential::max_term_range)
      .def("term_norms", &Potential::term_norms);

  m.def("tfim", &tfim, py::arg("lattice"), py::arg("j"), py::arg("g"));
  m.def("heisenberg", &heisenberg, py::arg("lattice"), py::arg("jx"), py::arg("jy"),
        py::arg("jz"));
  m.def("hubbard_jw_potential", &hubbard_jw_potential, py::arg("lattice"), py::arg("t_hop"),
        py::arg("u"), py::arg("mu"));
  m.def(
      "preset_potential",
      [](const std::string& name, const Torus& lattice, double j, double g, double jx, double jy,
         double jz, double t, double u, double mu) {
        PresetParams params;
        params.j = j;
        params.g = g;
        params.jx = jx;
        params.jy = jy;
        params.jz = jz;
        params.t = t;
        params.u = u;
        params.mu = mu;
        return preset_potential(name, lattice, params);
      },
      py::arg("name"), py::arg("lattice"), py::arg("j") = 1.0, py::arg("g") = 1.0,
      py::arg("jx") = 1.0, py::arg("jy") = 1.0, py::arg("jz") = 1.0, py::arg("t") = 1.0,
      py::arg("u") = 0.0, py::arg("mu") = 0.0);
  m.def(
      "spectral_gap",
      [](const cmat& h, double degeneracy_tol, Eigen::Index report) {
        const GapInfo g = spectral_gap(h, degeneracy_tol, report);
        py::dict out;
        out["ground_energy"] = g.ground_energy;
        out["ground_degeneracy"] = g.ground_degeneracy;
        out["gap"] = g.gap;
        out["lowest"] = g.lowest;
        return out;
      },
      py::arg("h"), py::arg("degeneracy_tol") = 1e-8, py::arg("report") = 6);
  m.def(
      "spectral_data",
      [](const cmat& h, Eigen::Index q, double gap_floor) {
        const SpectralData s = spectral_data(h, q, gap_floor);
        py::dict out;
        out["values"] = s.values;
        out["q"] = s.q;
        out["delta"] = s.delta;
        out["spread"] = s.spread;
        out["gapped"] = s.gapped;
        return out;
      },
      py::arg("h"), py::arg("q"), py::arg("gap_floor") = 1e-8);
  m.def("quasi_local_decompose", [](const Potential& pot, long center) {
    const RadialProfile r = quasi_local_decompose(pot, center);
    py::dict out;
    out["center"] = r.center;
    out["norm_by_radius"] = r.norm_by_radius;
    out["decay_exponent"] = r.decay_exponent;
    return out;
  });
  m.def("translation_operator", &translation_operator, py::arg("lattice"), py::arg("axis"),
        py::arg("local_dim"));
  m.def("jw_annihilator", &jw_annihilator, py::arg("n_modes"), py::arg("j"));
  m.def("jw_number", &jw_number, py::arg("n_modes"), py::arg("j"));
  m.def("jw_total_number", &jw_total_number, py::arg("n_modes"));
  m.def("snake_order", &snake_order);
  m.def("hopping_hamiltonian", &hopping_hamiltonian, py::arg("n_modes"), py::arg("edges"),
        py::arg("t_hop"));
  m.def("hubbard_hamiltonian", &hubbard_hamiltonian, py::arg("lattice"), py::arg("t_hop"),
        py::arg("u"), py::arg("mu"));

  // --- dynamics --------------------------------------------------------------
  m.def("heisenberg_evolve",
        py::overload_cast<const cmat&, double, const cmat&>(&heisenberg_evolve), py::arg("h"),
        py::arg("t"), py::arg("a"));
  m.def("interaction_strength", &interaction_strength, py::arg("pot"), py::arg("mu"));
  m.def("lr_strict_bound", &lr_strict_bound);
  m.def("lr_kernel_bound", &lr_kernel_bound);
  m.def("dominating_exponential_kernel", &dominating_exponential_kernel, py::arg("pot"),
        py::arg("mu"));
  m.def(
      "lr_check",
      [](const Potential& pot, const Region& support_a, const cmat& op_a, const Region& support_b,
         const cmat& op_b, const std::vector<double>& grid, double mu,
         const std::vector<double>& kernel) {
        const LrReport r = lr_check(pot, {support_a, op_a}, {support_b, op_b}, grid, mu, kernel);
        py::list rows;
        for (const LrRow& row : r.rows) {
          py::dict jr;
          jr["t"] = row.t;
          jr["bound_strict"] = row.bound_strict;
          jr["bound_kernel"] = row.bound_kernel;
          jr["vacuous"] = row.vacuous;
          jr["exact_norm"] = row.exact_norm;
          jr["violation"] = row.violation;
          rows.append(jr);
        }
        py::dict out;
        out["rows"] = rows;
        out["dist"] = r.dist;
        out["norm_a"] = r.norm_a;
        out["norm_b"] = r.norm_b;
        out["trivial_cap"] = r.trivial_cap;
        out["s"] = r.s;
        out["mu"] = r.mu;
        out["lambda"] = r.lambda;
        out["violations"] = r.violations;
        out["max_ratio"] = r.max_ratio;
        return out;
      },
      py::arg("pot"), py::arg("support_a"), py::arg("op_a"), py::arg("support_b"),
      py::arg("op_b"), py::arg("grid"), py::arg("mu"),
      py::arg("kernel") = std::vector<double>{});
  m.def("incremental_entangling_factor", &incremental_entangling_factor);
  m.def(
      "realtime_entropy_rate",
      [](const Potential& pot, const cvec& psi, const Region& region, double floor) {
        const RealtimeRate r = realtime_entropy_rate(pot, psi, region, floor);
        py::dict out;
        out["rate"] = r.rate;
        out["bound"] = r.bound;
        out["area_bound"] = r.area_bound;
        out["area"] = r.area;
        out["contributions"] = r.contributions;
        out["interior_max"] = r.interior_max;
        out["fd_fallback"] = r.fd_fallback;
        return out;
      },
      py::arg("pot"), py::arg("psi"), py::arg("region"), py::arg("floor") = kSupportFloor);

  // --- adiabatic continuation ------------------------------------------------
  py::class_<FilterFunction>(m, "FilterFunction")
      .def("delta", &FilterFunction::delta)
      .def("sharpness", &FilterFunction::sharpness)
      .def("bump", &FilterFunction::bump)
      .def("weight", &FilterFunction::weight)
      .def("time_profile", &FilterFunction::time_profile);

  m.def("build_filter", &build_filter, py::arg("delta"), py::arg("sharpness") = 6.0);
  m.def("filter_decay_exponent", &filter_decay_exponent, py::arg("filter"), py::arg("t_lo") = 5.0,
        py::arg("t_hi") = 50.0, py::arg("windows") = 9);

  py::class_<QAPath>(m, "QAPath");
  m.def("make_path", &make_path, py::arg("h0"), py::arg("h1"), py::arg("gap_floor") = 1e-6);
  m.def("tfim_path", &tfim_path, py::arg("lattice"), py::arg("j"), py::arg("g0"), py::arg("g1"),
        py::arg("gap_floor") = 1e-6);
  m.def("path_potential", &path_potential, py::arg("path"), py::arg("s"));
  m.def("path_derivative", &path_derivative, py::arg("path"));
  m.def("qac_generator", &qac_generator, py::arg("path"), py::arg("s"), py::arg("filter"));
  m.def("filtered_generator", &filtered_generator, py::arg("h"), py::arg("dh"),
        py::arg("filter"));
  m.def(
      "truncated_generators",
      [](const QAPath& path, double s, const FilterFunction& filter, long center, int r_max) {
        const TruncatedGenerators tg = truncated_generators(path, s, filter, center, r_max);
        py::dict out;
        out["slices"] = tg.slices;
        out["support"] = tg.support;
        out["norms"] = tg.norms;
        out["decay_exponent"] = tg.decay_exponent;
        return out;
      },
      py::arg("path"), py::arg("s"), py::arg("filter"), py::arg("center"), py::arg("r_max"));
  m.def(
      "transport",
      [](const QAPath& path, const FilterFunction& filter, const Region& region, int steps) {
        return transport_to_dict(transport(path, filter, region, steps));
      },
      py::arg("path"), py::arg("filter"), py::arg("region"), py::arg("steps") = 200);
}

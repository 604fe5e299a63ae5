#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "entlab/commutator.hpp"
#include "entlab/dynamics.hpp"
#include "entlab/hamiltonian.hpp"
#include "entlab/lattice.hpp"
#include "entlab/operators.hpp"
#include "entlab/qac.hpp"
#include "entlab/rates.hpp"
#include "entlab/report.hpp"
#include "entlab/rng.hpp"

// Batch experiment runner: every module is exposed as a subcommand that
// writes a JSON report (plus CSV side files) into the output directory.
// Exit codes: 0 clean, 1 when a checked bound was violated, 2 on bad usage.

namespace {

using namespace entlab;

struct Common {
  std::uint64_t seed = 7;
  std::string out = ".";
  int threads = 1;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "base RNG seed");
  cmd->add_option("--out", c.out, "output directory")->envname("ENTLAB_OUT_DIR");
  cmd->add_option("--threads", c.threads, "worker thread cap")->envname("ENTLAB_THREADS");
}

// Margin bookkeeping: every numeric claim lands here with the bound it was
// checked against; a negative margin is a violation.
struct Checks {
  json list = json::array();
  json violations = json::array();

  void require_le(const std::string& name, double value, double bound) {
    const double margin = bound - value;
    json entry{{"check", name}, {"value", value}, {"bound", bound}, {"margin", margin}};
    list.push_back(entry);
    if (!(margin >= 0.0)) violations.push_back(entry);
  }
};

int finish(const Common& c, const std::string& name, json config, json results, Checks checks,
           const std::string& summary) {
  std::filesystem::create_directories(c.out);
  config["seed"] = c.seed;
  config["threads"] = c.threads;
  results["checks"] = std::move(checks.list);
  results["violations"] = checks.violations;
  const json envelope = report_envelope(std::move(config), std::move(results));
  const std::string path = c.out + "/" + name + ".json";
  write_text(path, envelope.dump(2) + "\n");
  const auto n_viol = envelope["results"]["violations"].size();
  std::cout << name << ": " << summary << " | violations: " << n_viol << " | report: " << path
            << "\n";
  return n_viol == 0 ? 0 : 1;
}

cmat pauli_by_name(const std::string& name) {
  if (name == "X") return (cmat(2, 2) << 0, 1, 1, 0).finished();
  if (name == "Y") return (cmat(2, 2) << 0, cxd(0, -1), cxd(0, 1), 0).finished();
  if (name == "Z") return (cmat(2, 2) << 1, 0, 0, -1).finished();
  throw parameter_error("unknown Pauli name: " + name);
}

Region parse_cut(const Torus& t, const std::string& text) {
  if (text == "half") {
    Region r;
    for (long v = 0; v < t.site_count() / 2; ++v) r.push_back(v);
    return r;
  }
  return parse_region(t, text);
}

std::vector<std::vector<double>> filter_csv_rows(const FilterFunction& f, double lo, double hi,
                                                 int points, bool time_domain) {
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < points; ++i) {
    const double x = lo + (hi - lo) * i / (points - 1);
    rows.push_back({x, time_domain ? f.time_profile(x) : f.weight(x)});
  }
  return rows;
}

// --- subcommand bodies -------------------------------------------------------

int run_sim_scan(const Common& c, const std::vector<long>& dims, const std::vector<double>& ps,
                 int samples) {
  std::vector<Eigen::Index> dims_e(dims.begin(), dims.end());
  const ScanReport report = ratio_scan(dims_e, ps, samples, c.seed, c.threads);
  Checks checks;
  checks.require_le("global max ratio vs proven constant", report.global_max, report.hard_c);

  std::filesystem::create_directories(c.out);
  json cells = json::array();
  for (const ScanCell& cell : report.cells) {
    json jc{{"dim", cell.dim},
            {"p", cell.p},
            {"samples", cell.samples},
            {"max_ratio", cell.max_ratio},
            {"mean_ratio", cell.mean_ratio},
            {"witness_ref", nullptr}};
    if (cell.dim == report.witness.dim && cell.p == report.witness.p)
      jc["witness_ref"] = "sim-scan-witness-a.json";
    cells.push_back(jc);
  }
  write_text(c.out + "/sim-scan-witness-a.json",
             operator_to_json(report.witness.a).dump(2) + "\n");
  write_text(c.out + "/sim-scan-witness-b.json",
             operator_to_json(report.witness.b).dump(2) + "\n");

  json config{{"dims", dims}, {"p", ps}, {"samples", samples}};
  json results{{"cells", cells},
               {"global_max", report.global_max},
               {"hard_c", report.hard_c},
               {"soft_c", report.soft_c},
               {"hard_violations", report.hard_violations},
               {"soft_violations", report.soft_violations},
               {"witness",
                {{"dim", report.witness.dim},
                 {"p", report.witness.p},
                 {"ratio", report.witness.ratio},
                 {"sample_seed", report.witness.sample_seed},
                 {"a_ref", "sim-scan-witness-a.json"},
                 {"b_ref", "sim-scan-witness-b.json"}}}};
  std::ostringstream s;
  s << report.cells.size() << " cells, global max ratio " << report.global_max;
  return finish(c, "sim-scan", std::move(config), std::move(results), std::move(checks), s.str());
}

int run_sim_decompose(const Common& c, long dim, double p, int samples) {
  Rng rng(c.seed);
  Checks checks;
  double worst_identity = 0.0;
  const SpectrumProfile profiles[] = {SpectrumProfile::uniform, SpectrumProfile::geometric,
                                      SpectrumProfile::two_scale};
  for (int i = 0; i < samples; ++i) {
    Rng sub = rng.substream({static_cast<std::uint64_t>(i)});
    const DominatedPair pair =
        sample_dominated_pair(sub, dim, p, profiles[i % 3], 0.5);
    const PartitionDecomposition d = partition_decompose(pair.a, pair.b);
    worst_identity =
        std::max(worst_identity, std::abs(d.w_total - (d.v_total - d.v_prime + d.w_far)));
    checks.require_le("far-block sum within its envelope", d.w_far, d.bound_far + 1e-12);
    checks.require_le("merged-projector sum within its envelope", d.v_total, d.bound_v + 1e-12);
    checks.require_le("double-count correction within its envelope", d.v_prime,
                      d.bound_v_prime + 1e-12);
  }
  checks.require_le("partition identity residual", worst_identity, 1e-8);

  json config{{"dim", dim}, {"p", p}, {"samples", samples}};
  json results{{"worst_identity_residual", worst_identity}};
  std::ostringstream s;
  s << samples << " samples at dim " << dim << ", identity residual " << worst_identity;
  return finish(c, "sim-decompose", std::move(config), std::move(results), std::move(checks),
                s.str());
}

int run_sie_max(const Common& c, long dim_a, long dim_b, const std::string& probe, int restarts,
                int iters) {
  const BipartiteSetting setting{{1, dim_a, dim_b, 1}};
  cmat h;
  if (probe == "zz") {
    if (dim_a != 2 || dim_b != 2) throw parameter_error("the zz probe needs 2x2 factors");
    h = tensor_product(pauli_by_name("Z"), pauli_by_name("Z"));
  } else if (probe == "swap") {
    if (dim_a != dim_b) throw parameter_error("the swap probe needs equal factors");
    h = cmat::Zero(dim_a * dim_b, dim_a * dim_b);
    for (long i = 0; i < dim_a; ++i)
      for (long j = 0; j < dim_b; ++j) h(i * dim_b + j, j * dim_b + i) = 1.0;
  } else if (probe == "random") {
    h = Rng(c.seed).hermitian(dim_a * dim_b, true);
  } else {
    throw parameter_error("unknown probe: " + probe);
  }

  const OptimizeResult opt = maximize_entangling_rate(setting, h, restarts, c.seed, iters);
  const double n_min = static_cast<double>(std::min(dim_a, dim_b));
  const double bound = incremental_entangling_factor(n_min) * operator_norm(h);
  Checks checks;
  checks.require_le("maximized rate under the capacity bound", opt.value, bound);

  json witness{{"dim", opt.psi.size()}, {"re", json::array()}, {"im", json::array()}};
  for (Eigen::Index i = 0; i < opt.psi.size(); ++i) {
    witness["re"].push_back(opt.psi[i].real());
    witness["im"].push_back(opt.psi[i].imag());
  }
  json config{{"dim_a", dim_a},
              {"dim_b", dim_b},
              {"probe", probe},
              {"restarts", restarts},
              {"iters", iters}};
  json results{{"value", opt.value},
               {"value_base2", opt.value / std::log(2.0)},
               {"bound", bound},
               {"ratio", opt.value / bound},
               {"witness", witness},
               {"seed", c.seed},
               {"iterations", opt.iterations},
               {"grad_norm", opt.grad_norm},
               {"restarts_used", opt.restarts}};
  std::ostringstream s;
  s << "max rate " << opt.value << " nats (" << opt.value / std::log(2.0) << " bits)";
  return finish(c, "sie-max", std::move(config), std::move(results), std::move(checks), s.str());
}

int run_rates_check(const Common& c, long dim, int samples) {
  Rng rng(c.seed);
  Checks checks;
  for (int i = 0; i < samples; ++i) {
    Rng sub = rng.substream({static_cast<std::uint64_t>(i)});
    // Mixing rate against a symmetric difference quotient.
    TwoStateEnsemble ens{0.5, sub.density(dim, dim), sub.density(dim, dim)};
    const cmat h = sub.hermitian(dim, true);
    const double analytic = mixing_rate(ens, h);
    const EigenSystem es = eigh(h);
    auto mixture_entropy = [&](double t) {
      cmat u = es.vectors;
      cmat phases = cmat::Zero(dim, dim);
      for (Eigen::Index k = 0; k < dim; ++k)
        phases(k, k) = std::exp(cxd(0.0, -es.values[k] * t));
      const cmat ut = u * phases * u.adjoint();
      return von_neumann_entropy(ens.p * ens.rho1 + (1 - ens.p) * ut * ens.rho2 * ut.adjoint());
    };
    const FdProbe probe = rate_finite_difference(mixture_entropy, 1e-4);
    checks.require_le("mixing rate matches finite differences",
                      std::abs(analytic - probe.extrapolated),
                      1e-6 * std::max(1.0, std::abs(analytic)));

    // Entangling rate against finite differences and the extension identity.
    const Eigen::Index half = 2;
    const BipartiteSetting setting{{1, half, half, 1}};
    const cvec psi = sub.pure_state(half * half);
    const cmat hab = sub.hermitian(half * half, true);
    const double gamma = entangling_rate(psi, setting, hab);
    const EigenSystem esh = eigh(hab);
    auto cut_entropy = [&](double t) {
      cvec w = esh.vectors.adjoint() * psi;
      for (Eigen::Index k = 0; k < w.size(); ++k)
        w[k] *= std::exp(cxd(0.0, -esh.values[k] * t));
      return subsystem_entropy(cvec(esh.vectors * w), setting.layout, {0, 1});
    };
    const FdProbe probe2 = rate_finite_difference(cut_entropy, 1e-4);
    checks.require_le("entangling rate matches finite differences",
                      std::abs(gamma - probe2.extrapolated),
                      1e-6 * std::max(1.0, std::abs(gamma)));

    const TwoStateEnsemble ext = entangling_extension(psi, {half, half});
    const double via_mixing = half * half * mixing_rate(ext, hab);
    checks.require_le("extension identity residual", std::abs(via_mixing - gamma), 1e-9);
  }
  json config{{"dim", dim}, {"samples", samples}};
  json results = json::object();
  std::ostringstream s;
  s << samples << " samples cross-validated at dim " << dim;
  return finish(c, "rates-check", std::move(config), std::move(results), std::move(checks),
                s.str());
}

int run_lr_check(const Common& c, const std::string& model, int nu, int L, double jj, double g,
                 double mu, long site_a, long site_b, const std::string& op_a,
                 const std::string& op_b, double t_max, int points, bool with_kernel) {
  const Torus torus(nu, L);
  PresetParams params;
  params.j = jj;
  params.g = g;
  const Potential pot = preset_potential(model, torus, params);
  std::vector<double> grid;
  for (int i = 0; i < points; ++i) grid.push_back(t_max * i / (points - 1));
  const LocalOperator a{{site_a}, pauli_by_name(op_a)};
  const LocalOperator b{{site_b}, pauli_by_name(op_b)};
  const std::vector<double> kernel =
      with_kernel ? dominating_exponential_kernel(pot, mu) : std::vector<double>{};
  const LrReport report = lr_check(pot, a, b, grid, mu, kernel);

  Checks checks;
  checks.require_le("light-cone violations", static_cast<double>(report.violations), 0.0);
  checks.require_le("max ratio of exact norm to bound", report.max_ratio, 1.0 + 1e-12);

  std::vector<std::vector<double>> rows;
  for (const LrRow& row : report.rows)
    rows.push_back({row.t, row.exact_norm, row.bound_strict, row.vacuous ? 1.0 : 0.0});
  std::filesystem::create_directories(c.out);
  write_text(c.out + "/lr-check.csv", csv_table("t,exact_norm,bound,vacuous_flag", rows));

  json config{{"model", model}, {"nu", nu},       {"L", L},
              {"j", jj},        {"g", g},         {"mu", mu},
              {"site_a", site_a}, {"site_b", site_b}, {"op_a", op_a},
              {"op_b", op_b},   {"t_max", t_max}, {"points", points},
              {"kernel", with_kernel}};
  json results{{"distance", report.dist},
               {"interaction_strength", report.s},
               {"trivial_cap", report.trivial_cap},
               {"max_ratio", report.max_ratio},
               {"rows_vacuous",
                std::count_if(report.rows.begin(), report.rows.end(),
                              [](const LrRow& r) { return r.vacuous; })}};
  if (with_kernel) results["lambda"] = report.lambda;
  std::ostringstream s;
  s << points << " grid points, max ratio " << report.max_ratio;
  return finish(c, "lr-check", std::move(config), std::move(results), std::move(checks), s.str());
}

int run_lattice_info(const Common& c, int nu, int L, const std::string& region_text) {
  const Torus torus(nu, L);
  const Region region = parse_cut(torus, region_text);
  const BoundaryData boundary = boundary_and_area(torus, region);
  const CutProfile profile = boundary_profile(torus, region);

  Checks checks;
  for (size_t r = 0; r < profile.counts.size(); ++r)
    checks.require_le("profile count within its cap at r=" + std::to_string(r),
                      static_cast<double>(profile.counts[r]),
                      static_cast<double>(profile.cap[r]));

  std::vector<std::vector<double>> rows;
  for (size_t r = 0; r < profile.counts.size(); ++r)
    rows.push_back({static_cast<double>(r), static_cast<double>(profile.counts[r]),
                    static_cast<double>(profile.cap[r])});
  std::filesystem::create_directories(c.out);
  write_text(c.out + "/lattice-profile.csv", csv_table("r,M,bound", rows));

  json config{{"nu", nu}, {"L", L}, {"region", region_text}};
  json results{{"sites", torus.site_count()},
               {"region_size", region.size()},
               {"area", boundary.area},
               {"inner_boundary", boundary.inner},
               {"outer_boundary", boundary.outer}};
  std::ostringstream s;
  s << "area " << boundary.area << " for |region| " << region.size();
  return finish(c, "lattice-info", std::move(config), std::move(results), std::move(checks),
                s.str());
}

int run_filter_build(const Common& c, double delta, double sharpness, double omega_max,
                     double t_max, int points) {
  const FilterFunction filter = build_filter(delta, sharpness);
  const double slope = filter_decay_exponent(filter);
  Checks checks;
  checks.require_le("fitted time-decay exponent", slope, -6.0);

  std::filesystem::create_directories(c.out);
  write_text(c.out + "/filter-weight.csv",
             csv_table("omega,W", filter_csv_rows(filter, -omega_max, omega_max, points, false)));
  write_text(c.out + "/filter-time.csv",
             csv_table("t,F", filter_csv_rows(filter, 0.0, t_max, points, true)));

  json config{{"delta", delta},
              {"sharpness", sharpness},
              {"omega_max", omega_max},
              {"t_max", t_max},
              {"points", points}};
  json results{{"decay_exponent", slope},
               {"weight_at_2delta", filter.weight(2 * delta)},
               {"bump_at_0", filter.bump(0.0)}};
  std::ostringstream s;
  s << "decay exponent " << slope;
  return finish(c, "filter-build", std::move(config), std::move(results), std::move(checks),
                s.str());
}

int run_qa_path(const Common& c, const std::string& model, int nu, int L, double jj, double g0,
                double g1, const std::string& cut, int steps, double delta, double sharpness) {
  if (model != "tfim") throw parameter_error("qa-path supports the tfim model");
  const Torus torus(nu, L);
  const QAPath path = tfim_path(torus, jj, g0, g1);
  const FilterFunction filter = build_filter(delta, sharpness);
  const Region region = parse_cut(torus, cut);
  const TransportResult r = transport(path, filter, region, steps);

  Checks checks;
  checks.require_le("entropy-rate cap violations", static_cast<double>(r.rate_violations), 0.0);
  checks.require_le("entropy change under the area cap", std::abs(r.entropy_change),
                    r.constant_c * r.area);
  checks.require_le("unitarity defect", r.max_unitarity_defect, 1e-8);

  std::vector<std::vector<double>> rows;
  for (const TransportStep& step : r.trace)
    rows.push_back({step.s, step.gap, step.fidelity, step.entropy, step.ds_rate,
                    r.constant_c * r.area});
  std::filesystem::create_directories(c.out);
  write_text(c.out + "/qa-path.csv", csv_table("s,gap,fidelity,S_B1,dS_ds,CA", rows));

  json config{{"model", model}, {"nu", nu},     {"L", L},
              {"j", jj},        {"g0", g0},     {"g1", g1},
              {"cut", cut},     {"steps", steps}, {"delta", delta},
              {"sharpness", sharpness}};
  json results{{"fidelity_final", r.fidelity_final},
               {"entropy_change", r.entropy_change},
               {"constant_c", r.constant_c},
               {"area", r.area},
               {"rate_violations", r.rate_violations},
               {"aborted", r.aborted},
               {"last_valid_s", r.last_valid_s}};
  std::ostringstream s;
  s << "fidelity " << r.fidelity_final << ", entropy change " << r.entropy_change
    << (r.aborted ? " (aborted)" : "");
  return finish(c, "qa-path", std::move(config), std::move(results), std::move(checks), s.str());
}

int run_qa_truncate(const Common& c, int nu, int L, double jj, double g0, double g1, double s_at,
                    long center, int r_max, double delta, double sharpness) {
  const Torus torus(nu, L);
  const QAPath path = tfim_path(torus, jj, g0, g1);
  const FilterFunction filter = build_filter(delta, sharpness);
  const TruncatedGenerators tg = truncated_generators(path, s_at, filter, center, r_max);

  Checks checks;
  checks.require_le("slice-norm log-log slope", tg.decay_exponent, -3.0);

  std::vector<std::vector<double>> rows;
  for (size_t r = 0; r < tg.norms.size(); ++r)
    rows.push_back({static_cast<double>(r), tg.norms[r],
                    static_cast<double>(tg.support[r].size())});
  std::filesystem::create_directories(c.out);
  write_text(c.out + "/qa-truncate.csv", csv_table("r,norm,support_size", rows));

  json config{{"nu", nu},     {"L", L},         {"j", jj},
              {"g0", g0},     {"g1", g1},       {"s", s_at},
              {"center", center}, {"r_max", r_max}, {"delta", delta},
              {"sharpness", sharpness}};
  json results{{"norms", tg.norms}, {"decay_exponent", tg.decay_exponent}};
  std::ostringstream s;
  s << "slice decay exponent " << tg.decay_exponent;
  return finish(c, "qa-truncate", std::move(config), std::move(results), std::move(checks),
                s.str());
}

int run_jw_check(const Common& c, int modes, int L, double tt, double uu, double mu) {
  Checks checks;
  // Anticommutation relations for the mapped mode operators.
  double worst_car = 0.0;
  for (int i = 0; i < modes; ++i) {
    for (int j = 0; j < modes; ++j) {
      const cmat ci = jw_annihilator(modes, i), cj = jw_annihilator(modes, j);
      const cmat anti = ci * cj.adjoint() + cj.adjoint() * ci;
      const cmat target =
          i == j ? cmat(cmat::Identity(anti.rows(), anti.cols())) : cmat(cmat::Zero(anti.rows(), anti.cols()));
      worst_car = std::max(worst_car, (anti - target).norm());
      worst_car = std::max(worst_car, (ci * cj + cj * ci).norm());
    }
  }
  checks.require_le("anticommutator residual", worst_car, 1e-12);

  // Frozen free-fermion ground energies through the spin mapping.
  {
    std::vector<std::pair<long, long>> open_chain{{0, 1}, {1, 2}, {2, 3}};
    const cmat h = hopping_hamiltonian(4, open_chain, 1.0);
    checks.require_le("open-chain ground energy residual",
                      std::abs(eigh(h).values[0] + std::sqrt(5.0)), 1e-10);
  }
  {
    std::vector<std::pair<long, long>> ring;
    for (long v = 0; v < 6; ++v) ring.push_back({v, (v + 1) % 6});
    const cmat h = hopping_hamiltonian(6, ring, 1.0);
    checks.require_le("ring ground energy residual", std::abs(eigh(h).values[0] + 4.0), 1e-10);
    const cmat n = jw_total_number(6);
    checks.require_le("particle-number conservation residual", (h * n - n * h).norm(), 1e-10);
  }

  // The interacting model via the mapping equals its dense assembly.
  const Torus torus(L == 2 ? 2 : 1, L);
  const cmat dense = hubbard_hamiltonian(torus, tt, uu, mu);
  const Potential mapped = hubbard_jw_potential(torus, tt, uu, mu);
  checks.require_le("mapped-vs-dense residual", (dense - mapped.assemble()).norm(), 1e-10);

  json config{{"modes", modes}, {"L", L}, {"t", tt}, {"u", uu}, {"mu", mu}};
  json results{{"car_residual", worst_car}};
  std::ostringstream s;
  s << "anticommutator residual " << worst_car;
  return finish(c, "jw-check", std::move(config), std::move(results), std::move(checks), s.str());
}

// Flat key=value config files: each line `key = value` becomes `--key value`.
// Keys also given explicitly on the command line are dropped from the file,
// so the command line wins ties.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> explicit_keys;
  for (const std::string& a : args) {
    if (a.rfind("--", 0) != 0 || a == "--config") continue;
    explicit_keys.push_back(a.substr(0, a.find('=')));
  }
  std::vector<std::string> out;
  std::vector<std::string> injected;
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw parameter_error("--config needs a file path");
      std::ifstream f(args[i + 1]);
      if (!f) throw parameter_error("cannot read config file: " + args[i + 1]);
      std::string line;
      while (std::getline(f, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
          const auto a = s.find_first_not_of(" \t\r");
          const auto b = s.find_last_not_of(" \t\r");
          return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw parameter_error("config line without a key: " + line);
        if (std::find(explicit_keys.begin(), explicit_keys.end(), "--" + key) !=
            explicit_keys.end())
          continue;
        injected.push_back("--" + key);
        if (!value.empty()) injected.push_back(value);
      }
      ++i;  // skip the file path
      continue;
    }
    out.push_back(args[i]);
    if (out.size() == 1 && !injected.empty()) {
      // First token is the subcommand: config options go right after it.
      out.insert(out.end(), injected.begin(), injected.end());
      injected.clear();
    }
  }
  // Config given before any subcommand: append (top-level options).
  out.insert(out.end(), injected.begin(), injected.end());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for entanglement rates and area-law stability"};
  app.require_subcommand(1);

  int rc = 0;

  // sim-scan
  Common scan_c;
  std::vector<long> scan_dims{2, 4, 8};
  std::vector<double> scan_ps{0.5, 0.1, 0.01};
  int scan_samples = 200;
  auto* scan = app.add_subcommand("sim-scan", "sampled commutator trace-norm ratio scan");
  add_common(scan, scan_c);
  scan->add_option("--dims", scan_dims, "matrix dimensions")->delimiter(',');
  scan->add_option("--p", scan_ps, "trace weights")->delimiter(',');
  scan->add_option("--samples", scan_samples, "samples per cell");
  scan->callback([&] { rc = run_sim_scan(scan_c, scan_dims, scan_ps, scan_samples); });

  // sim-decompose
  Common dec_c;
  long dec_dim = 8;
  double dec_p = 0.1;
  int dec_samples = 20;
  auto* dec = app.add_subcommand("sim-decompose", "interval-partition proof bookkeeping");
  add_common(dec, dec_c);
  dec->add_option("--dim", dec_dim, "matrix dimension");
  dec->add_option("--p", dec_p, "trace weight");
  dec->add_option("--samples", dec_samples, "sampled pairs");
  dec->callback([&] { rc = run_sim_decompose(dec_c, dec_dim, dec_p, dec_samples); });

  // sie-max
  Common sie_c;
  long sie_da = 2, sie_db = 2;
  std::string sie_probe = "zz";
  int sie_restarts = 8, sie_iters = 400;
  auto* sie = app.add_subcommand("sie-max", "maximize the entangling rate over states");
  add_common(sie, sie_c);
  sie->add_option("--dim-a", sie_da, "first factor dimension");
  sie->add_option("--dim-b", sie_db, "second factor dimension");
  sie->add_option("--probe", sie_probe, "zz | swap | random");
  sie->add_option("--restarts", sie_restarts, "ascent restarts");
  sie->add_option("--iters", sie_iters, "max iterations per restart");
  sie->callback(
      [&] { rc = run_sie_max(sie_c, sie_da, sie_db, sie_probe, sie_restarts, sie_iters); });

  // rates-check
  Common rat_c;
  long rat_dim = 6;
  int rat_samples = 5;
  auto* rat = app.add_subcommand("rates-check", "finite-difference cross-validation");
  add_common(rat, rat_c);
  rat->add_option("--dim", rat_dim, "density-matrix dimension");
  rat->add_option("--samples", rat_samples, "sampled instances");
  rat->callback([&] { rc = run_rates_check(rat_c, rat_dim, rat_samples); });

  // lr-check
  Common lr_c;
  std::string lr_model = "tfim";
  int lr_nu = 1, lr_L = 8, lr_points = 41;
  double lr_j = 1.0, lr_g = 2.0, lr_mu = 1.0, lr_tmax = 2.0;
  long lr_sa = 0, lr_sb = 4;
  std::string lr_oa = "X", lr_ob = "Z";
  bool lr_kernel = false;
  auto* lr = app.add_subcommand("lr-check", "light-cone bound scan");
  add_common(lr, lr_c);
  lr->add_option("--model", lr_model, "interaction preset");
  lr->add_option("--nu", lr_nu, "lattice dimension");
  lr->add_option("--L", lr_L, "linear size");
  lr->add_option("--j", lr_j, "coupling");
  lr->add_option("--g", lr_g, "field");
  lr->add_option("--mu", lr_mu, "decay scale of the bound");
  lr->add_option("--site-a", lr_sa, "support of the evolved operator");
  lr->add_option("--site-b", lr_sb, "support of the probe operator");
  lr->add_option("--op-a", lr_oa, "Pauli at site a");
  lr->add_option("--op-b", lr_ob, "Pauli at site b");
  lr->add_option("--t-max", lr_tmax, "time grid end");
  lr->add_option("--points", lr_points, "time grid points");
  lr->add_flag("--kernel", lr_kernel, "also evaluate the kernel-form bound");
  lr->callback([&] {
    rc = run_lr_check(lr_c, lr_model, lr_nu, lr_L, lr_j, lr_g, lr_mu, lr_sa, lr_sb, lr_oa, lr_ob,
                      lr_tmax, lr_points, lr_kernel);
  });

  // lattice-info
  Common lat_c;
  int lat_nu = 1, lat_L = 10;
  std::string lat_region = "0..4";
  auto* lat = app.add_subcommand("lattice-info", "metric, boundary and profile data");
  add_common(lat, lat_c);
  lat->add_option("--nu", lat_nu, "lattice dimension");
  lat->add_option("--L", lat_L, "linear size");
  lat->add_option("--region", lat_region, "region literal or 'half'");
  lat->callback([&] { rc = run_lattice_info(lat_c, lat_nu, lat_L, lat_region); });

  // filter-build
  Common fil_c;
  double fil_delta = 1.0, fil_sharp = 6.0, fil_omax = 4.0, fil_tmax = 50.0;
  int fil_points = 201;
  auto* fil = app.add_subcommand("filter-build", "spectral filter tables and decay fit");
  add_common(fil, fil_c);
  fil->add_option("--delta", fil_delta, "gap scale");
  fil->add_option("--sharpness", fil_sharp, "bump sharpness");
  fil->add_option("--omega-max", fil_omax, "weight table range");
  fil->add_option("--t-max", fil_tmax, "time table range");
  fil->add_option("--points", fil_points, "table points");
  fil->callback(
      [&] { rc = run_filter_build(fil_c, fil_delta, fil_sharp, fil_omax, fil_tmax, fil_points); });

  // qa-path
  Common qa_c;
  std::string qa_model = "tfim", qa_cut = "half";
  int qa_nu = 1, qa_L = 8, qa_steps = 200;
  double qa_j = 1.0, qa_g0 = 2.0, qa_g1 = 1.5, qa_delta = 1.0, qa_sharp = 6.0;
  auto* qa = app.add_subcommand("qa-path", "ground-state transport along a gapped ramp");
  add_common(qa, qa_c);
  qa->add_option("--model", qa_model, "interaction preset");
  qa->add_option("--nu", qa_nu, "lattice dimension");
  qa->add_option("--L", qa_L, "linear size");
  qa->add_option("--j", qa_j, "coupling");
  qa->add_option("--g0", qa_g0, "field at s=0");
  qa->add_option("--g1", qa_g1, "field at s=1");
  qa->add_option("--cut", qa_cut, "region literal or 'half'");
  qa->add_option("--steps", qa_steps, "integration steps");
  qa->add_option("--delta", qa_delta, "filter gap scale");
  qa->add_option("--sharpness", qa_sharp, "filter sharpness");
  qa->callback([&] {
    rc = run_qa_path(qa_c, qa_model, qa_nu, qa_L, qa_j, qa_g0, qa_g1, qa_cut, qa_steps, qa_delta,
                     qa_sharp);
  });

  // qa-truncate
  Common qt_c;
  int qt_nu = 1, qt_L = 10, qt_rmax = 5;
  double qt_j = 0.25, qt_g0 = 4.0, qt_g1 = 3.0, qt_s = 0.5, qt_delta = 2.0, qt_sharp = 6.0;
  long qt_center = 0;
  auto* qt = app.add_subcommand("qa-truncate", "quasi-local slices of the transport generator");
  add_common(qt, qt_c);
  qt->add_option("--nu", qt_nu, "lattice dimension");
  qt->add_option("--L", qt_L, "linear size");
  qt->add_option("--j", qt_j, "coupling");
  qt->add_option("--g0", qt_g0, "field at s=0");
  qt->add_option("--g1", qt_g1, "field at s=1");
  qt->add_option("--s", qt_s, "path parameter");
  qt->add_option("--center", qt_center, "slice center site");
  qt->add_option("--r-max", qt_rmax, "largest ball radius");
  qt->add_option("--delta", qt_delta, "filter gap scale");
  qt->add_option("--sharpness", qt_sharp, "filter sharpness");
  qt->callback([&] {
    rc = run_qa_truncate(qt_c, qt_nu, qt_L, qt_j, qt_g0, qt_g1, qt_s, qt_center, qt_rmax,
                         qt_delta, qt_sharp);
  });

  // jw-check
  Common jw_c;
  int jw_modes = 5, jw_L = 2;
  double jw_t = 1.0, jw_u = 2.0, jw_mu = 0.5;
  auto* jw = app.add_subcommand("jw-check", "fermion mapping validation suite");
  add_common(jw, jw_c);
  jw->add_option("--modes", jw_modes, "modes for the anticommutator check");
  jw->add_option("--L", jw_L, "interacting-model linear size");
  jw->add_option("--t", jw_t, "hopping");
  jw->add_option("--u", jw_u, "on-site repulsion");
  jw->add_option("--mu", jw_mu, "chemical potential");
  jw->callback([&] { rc = run_jw_check(jw_c, jw_modes, jw_L, jw_t, jw_u, jw_mu); });

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = expand_config(args);
    std::vector<const char*> ptrs{argv[0]};
    for (const std::string& a : args) ptrs.push_back(a.c_str());
    app.parse(static_cast<int>(ptrs.size()), ptrs.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const lab_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return rc;
}

// Command-line front end: DIMACS ingestion, the CTC-backed SAT solver,
// process-matrix checks, and the traced-matrix cross-validation sweep.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "uctc/circuit.hpp"
#include "uctc/cnf.hpp"
#include "uctc/ctc.hpp"
#include "uctc/errors.hpp"
#include "uctc/matrix.hpp"
#include "uctc/pmf.hpp"
#include "uctc/rng.hpp"
#include "uctc/solver.hpp"
#include "uctc/vv.hpp"

namespace {

// Solver exit codes follow the usual SAT-competition convention.
constexpr int kExitSat = 10;
constexpr int kExitUnsat = 20;
constexpr int kExitError = 1;
constexpr int kExitPmgOnly = 3;
constexpr int kExitNotPmg = 4;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw uctc::ValidationError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void emit(const nlohmann::json& j) { std::cout << j.dump() << "\n"; }

struct CommonOptions {
  std::uint64_t seed = 0;
  std::string policy = "identity";
  std::optional<std::uint64_t> adversary_seed;
  std::optional<int> iterations;
  std::optional<double> tol;  // per-command default when absent
  int max_n = uctc::kDefaultMaxVars;
  std::string mode = "direct";
  bool json = false;

  double tol_or(double fallback) const { return tol.value_or(fallback); }

  std::uint64_t effective_adversary_seed() const {
    return adversary_seed ? *adversary_seed : uctc::substream(seed, "adversary");
  }
};

void add_common_flags(CLI::App* cmd, CommonOptions& opt, bool with_solver_flags) {
  cmd->add_option("--seed", opt.seed, "Master seed; all randomness derives from it");
  cmd->add_option("--tol", opt.tol, "Numerical tolerance")->check(CLI::PositiveNumber);
  cmd->add_flag("--json", opt.json, "Emit JSON instead of text");
  if (with_solver_flags) {
    cmd->add_option("--policy", opt.policy,
                    "Adversarial policy: identity|perm|random|depol:<p>");
    cmd->add_option("--adversary-seed", opt.adversary_seed,
                    "Adversary stream seed (default: derived from --seed)");
    cmd->add_option("--iterations", opt.iterations, "Round count (default n^2)");
    cmd->add_option("--max-n", opt.max_n, "Variable-count cap for simulation");
    cmd->add_option("--mode", opt.mode, "XOR encoding mode: direct|aux");
  }
}

int run_solve(const std::string& path, const CommonOptions& opt) {
  const uctc::CnfFormula formula = uctc::parse_dimacs(read_file(path));
  const uctc::AdversarialPolicy policy = uctc::AdversarialPolicy::parse(opt.policy);
  uctc::SatOptions options;
  options.iterations = opt.iterations;
  options.seed = opt.seed;
  options.mode = uctc::parse_vv_mode(opt.mode);
  options.max_vars = opt.max_n;
  const uctc::SatDecision decision = uctc::sat_decide(
      formula,
      uctc::make_generator(policy, opt.effective_adversary_seed(),
                           opt.tol_or(uctc::kDefaultTol)),
      options);
  if (opt.json) {
    emit(uctc::decision_to_json(decision, policy.name()));
  } else if (decision.sat) {
    std::cout << "SAT " << decision.witness->bits << "\n";
  } else {
    std::cout << "UNSAT\n";
  }
  return decision.sat ? kExitSat : kExitUnsat;
}

int run_brute(const std::string& path, bool list_models, const CommonOptions& opt) {
  const uctc::CnfFormula formula = uctc::parse_dimacs(read_file(path));
  const std::uint64_t count = uctc::count_models(formula);
  nlohmann::json j{{"num_vars", formula.num_vars}, {"models", count}};
  if (list_models) {
    std::vector<std::string> bits;
    for (const uctc::Assignment& a : uctc::enumerate_models(formula)) bits.push_back(a.bits);
    j["model_list"] = bits;
  }
  if (opt.json) {
    emit(j);
  } else {
    std::cout << count << " model" << (count == 1 ? "" : "s") << "\n";
    if (list_models)
      for (const auto& bits : j["model_list"]) std::cout << bits.get<std::string>() << "\n";
  }
  return 0;
}

int run_vv(const std::string& path, const std::string& out_path, const CommonOptions& opt) {
  const uctc::CnfFormula formula = uctc::parse_dimacs(read_file(path));
  const uctc::VvMode mode = uctc::parse_vv_mode(opt.mode);
  const uctc::HashConstraint h = uctc::sample_constraint(formula.num_vars, opt.seed);
  const uctc::CnfFormula reduced = uctc::encode(formula, h, mode);
  const std::string text =
      uctc::emit_dimacs(reduced, {uctc::vv_comment(opt.seed, h, mode)});
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path);
    if (!out) throw uctc::ValidationError("cannot write '" + out_path + "'");
    out << text;
  }
  return 0;
}

int run_isolation_rate(const std::string& path, int trials, const CommonOptions& opt) {
  const uctc::CnfFormula formula = uctc::parse_dimacs(read_file(path));
  const int n = formula.num_vars;
  const std::vector<uctc::Assignment> models = uctc::enumerate_models(formula);
  std::vector<std::uint64_t> model_masks;
  for (const uctc::Assignment& a : models) model_masks.push_back(a.index());

  int isolated = 0;
  for (int trial = 1; trial <= trials; ++trial) {
    const uctc::HashConstraint h =
        uctc::sample_constraint(n, uctc::substream(opt.seed, "vv", trial));
    int survivors = 0;
    for (std::uint64_t mask : model_masks)
      if (h.satisfied(mask) && ++survivors > 1) break;
    if (survivors == 1) ++isolated;
  }
  const double rate = trials > 0 ? static_cast<double>(isolated) / trials : 0.0;
  const double threshold = 1.0 / (10.0 * n);
  nlohmann::json j{{"num_vars", n},
                   {"models", models.size()},
                   {"trials", trials},
                   {"isolated", isolated},
                   {"rate", rate},
                   {"threshold", threshold},
                   {"meets_threshold", rate >= threshold}};
  if (opt.json) {
    emit(j);
  } else {
    std::cout << "n=" << n << " trials=" << trials << " isolated=" << isolated
              << " rate=" << rate << " threshold=1/(10n)=" << threshold
              << (rate >= threshold ? " OK" : " LOW") << "\n";
  }
  return 0;
}

int run_pm_check(const std::string& circuit_path, const std::string& cnf_path, int traced,
                 int ancilla, const std::string& path_name, const CommonOptions& opt) {
  uctc::PmgQuery query;
  if (!circuit_path.empty()) {
    query.circuit = uctc::parse_circuit(read_file(circuit_path));
    query.traced_qubits = traced;
  } else if (!cnf_path.empty()) {
    const uctc::CnfFormula formula = uctc::parse_dimacs(read_file(cnf_path));
    query.circuit = uctc::build_usat_rule(formula);
    query.traced_qubits = traced > 0 ? traced : formula.num_vars;
  } else {
    throw uctc::ValidationError("pm-check needs --circuit or --cnf");
  }
  query.ancilla = ancilla;

  uctc::PmoPath path = uctc::PmoPath::Both;
  if (path_name == "full") {
    path = uctc::PmoPath::FullCj;
  } else if (path_name == "simplified") {
    path = uctc::PmoPath::Simplified;
  } else if (path_name == "auto" || path_name.empty()) {
    path = query.circuit.width <= uctc::kFullCjQubitCap ? uctc::PmoPath::Both
                                                        : uctc::PmoPath::Simplified;
  } else if (path_name != "both") {
    throw uctc::ValidationError("unknown path '" + path_name + "'");
  }

  const uctc::PmoResult result = uctc::pmo(query, path, opt.tol_or(uctc::kDefaultTol));
  emit(result.report.to_json());
  if (result.report.is_pure_pmg) return 0;
  return result.report.is_pmg ? kExitPmgOnly : kExitNotPmg;
}

int run_ctc_demo(const std::string& path, const CommonOptions& opt) {
  const uctc::CnfFormula formula = uctc::parse_dimacs(read_file(path));
  const uctc::AdversarialPolicy policy = uctc::AdversarialPolicy::parse(opt.policy);
  if (formula.num_vars < 1 || formula.num_vars > opt.max_n)
    throw uctc::ResourceError("variable count outside [1, max-n]");

  uctc::PmgQuery query;
  query.traced_qubits = formula.num_vars;
  query.circuit = uctc::build_usat_rule(formula);
  const uctc::CtcHandle handle = uctc::generate(query, policy,
                                                 opt.effective_adversary_seed(),
                                                 opt.tol_or(uctc::kDefaultTol));
  uctc::Rng measure_rng(uctc::substream(opt.seed, "measure", 1));
  const uctc::AppliedState state =
      uctc::apply(handle, uctc::basis_state(0, formula.num_vars));
  const std::uint64_t measured = uctc::measure(state, measure_rng);
  const uctc::Assignment witness(measured, formula.num_vars);

  nlohmann::json j{{"num_vars", formula.num_vars},
                   {"circuit_width", query.circuit.width},
                   {"query_cost", handle.query_cost},
                   {"policy", policy.name()},
                   {"valid_pure_pmg", handle.was_valid_pure_pmg},
                   {"witness", witness.bits},
                   {"verified", uctc::evaluate(formula, witness)}};
  if (opt.json) {
    emit(j);
  } else {
    std::cout << "query (m=" << formula.num_vars << ", width=" << query.circuit.width
              << ") valid=" << (handle.was_valid_pure_pmg ? "yes" : "no")
              << " witness=" << witness.bits
              << " verified=" << (j["verified"].get<bool>() ? "yes" : "no") << "\n";
  }
  return 0;
}

// Traced-matrix equivalence sweep: random unitaries, indefinite operator of
// the channel's CJ vs the CJ of the traced pair, reported as the max
// Frobenius gap. --perturb injects a fault to confirm sensitivity.
int run_cross_validate(int cases, int max_qubits, double perturb, const CommonOptions& opt) {
  const double tol = opt.tol_or(1e-9);
  uctc::Rng rng(uctc::substream(opt.seed, "cross-validate"));
  double max_gap = 0.0;
  for (int i = 0; i < cases; ++i) {
    int n, r, k;
    do {
      n = 1 + static_cast<int>(rng.uniform_int(max_qubits - 1));
      r = 1 + static_cast<int>(rng.uniform_int(max_qubits - 1));
      k = static_cast<int>(rng.uniform_int(3));
    } while (n + r + k > max_qubits);
    const std::size_t dim = std::size_t{1} << (n + r + k);
    const uctc::ComplexMatrix u = uctc::detail::haar_unitary(dim, rng);

    const uctc::ChannelRep channel =
        k == 0 ? uctc::ChannelRep::unitary(u, 1e-8) : uctc::ChannelRep::isometry(u, k, 1e-8);
    const uctc::ComplexMatrix w = uctc::cj(channel);
    const uctc::ComplexMatrix g = uctc::indefinite_operator(w, n, r, r + k);

    uctc::ComplexMatrix traced = uctc::partial_trace_left(u, n);
    if (perturb != 0.0) traced(0, 0) += perturb;
    const uctc::ComplexMatrix g_expected = uctc::cj_isometry_pair(traced, k);
    max_gap = std::max(max_gap, uctc::frobenius_diff(g, g_expected));
  }
  nlohmann::json j{{"cases", cases},
                   {"max_qubits", max_qubits},
                   {"max_gap", max_gap},
                   {"tol", tol},
                   {"pass", max_gap <= tol}};
  if (opt.json) {
    emit(j);
  } else {
    std::cout << "cases=" << cases << " max_gap=" << max_gap << " tol=" << tol
              << (max_gap <= tol ? " OK" : " FAIL") << "\n";
  }
  return max_gap <= tol ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unitary-CTC simulation toolkit: process-matrix checks and the "
               "single-query SAT machinery built on them"};
  app.require_subcommand(1);

  CommonOptions opt;
  std::string input, output, circuit_path, cnf_path, path_name = "auto";
  bool list_models = false;
  int traced = 0, ancilla = 0, trials = 10000, cases = 100, max_qubits = 6;
  double perturb = 0.0;

  CLI::App* solve = app.add_subcommand("solve", "Decide a DIMACS CNF instance");
  solve->add_option("input", input, "DIMACS CNF file")->required();
  add_common_flags(solve, opt, true);

  CLI::App* brute = app.add_subcommand("brute", "Brute-force model counting");
  brute->add_option("input", input, "DIMACS CNF file")->required();
  brute->add_flag("--models", list_models, "List the models as bit strings");
  add_common_flags(brute, opt, false);

  CLI::App* vv = app.add_subcommand("vv", "Emit one seeded isolation reduction");
  vv->add_option("input", input, "DIMACS CNF file")->required();
  vv->add_option("-o,--output", output, "Write DIMACS here instead of stdout");
  vv->add_option("--mode", opt.mode, "XOR encoding mode: direct|aux");
  add_common_flags(vv, opt, false);

  CLI::App* rate = app.add_subcommand("isolation-rate", "Empirical isolation statistics");
  rate->add_option("input", input, "DIMACS CNF file")->required();
  rate->add_option("--trials", trials, "Number of seeded trials");
  add_common_flags(rate, opt, false);

  CLI::App* pm = app.add_subcommand("pm-check", "Process-matrix validity report");
  pm->add_option("--circuit", circuit_path, "Circuit text file");
  pm->add_option("--cnf", cnf_path, "Build the search circuit for this DIMACS file");
  pm->add_option("-m,--traced", traced, "Traced qubit count m");
  pm->add_option("--ancilla", ancilla, "Ancilla qubit count k");
  pm->add_option("--path", path_name, "Evaluation path: auto|full|simplified|both");
  add_common_flags(pm, opt, false);

  CLI::App* demo = app.add_subcommand("ctc-demo", "One generation query end to end");
  demo->add_option("input", input, "DIMACS CNF file")->required();
  add_common_flags(demo, opt, true);

  CLI::App* cross = app.add_subcommand("cross-validate", "Traced-matrix equivalence sweep");
  cross->add_option("--cases", cases, "Number of random unitaries");
  cross->add_option("--max-qubits", max_qubits, "Total qubit cap per case");
  cross->add_option("--perturb", perturb, "Fault injection magnitude");
  add_common_flags(cross, opt, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return run_solve(input, opt);
    if (brute->parsed()) return run_brute(input, list_models, opt);
    if (vv->parsed()) return run_vv(input, output, opt);
    if (rate->parsed()) return run_isolation_rate(input, trials, opt);
    if (pm->parsed())
      return run_pm_check(circuit_path, cnf_path, traced, ancilla, path_name, opt);
    if (demo->parsed()) return run_ctc_demo(input, opt);
    if (cross->parsed()) return run_cross_validate(cases, max_qubits, perturb, opt);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

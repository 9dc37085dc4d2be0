#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "uctc/circuit.hpp"
#include "uctc/cnf.hpp"
#include "uctc/ctc.hpp"
#include "uctc/errors.hpp"
#include "uctc/pmf.hpp"
#include "uctc/rng.hpp"
#include "uctc/vv.hpp"

namespace uctc {

// Default simulation cap on variable count (circuit width is 2n).
inline constexpr int kDefaultMaxVars = 8;

//==============================================================================
// The search circuit
//==============================================================================

namespace detail {

// Completion status of each (n-1)-bit prefix: -1 none, 0/1 the unique
// completing bit, 2 both complete (promise violation).
inline std::shared_ptr<std::vector<signed char>> completion_table(const CnfFormula& formula) {
  const int n = formula.num_vars;
  const CompiledCnf compiled(formula);
  auto table = std::make_shared<std::vector<signed char>>(std::size_t{1} << (n - 1));
  for (std::uint64_t prefix = 0; prefix < table->size(); ++prefix) {
    const bool sat0 = compiled.satisfied(prefix << 1);
    const bool sat1 = compiled.satisfied((prefix << 1) | 1);
    (*table)[prefix] = sat0 && sat1 ? 2 : (sat0 ? 0 : (sat1 ? 1 : -1));
  }
  return table;
}

inline std::int64_t formula_size(const CnfFormula& formula) {
  std::int64_t literals = 0;
  for (const Clause& clause : formula.clauses) literals += static_cast<std::int64_t>(clause.size());
  return literals;
}

}  // namespace detail

// The 2n-qubit basis rule over |x, y>: when x's prefix completes to a
// satisfying assignment z = (prefix, b), XOR z into y and rotate the last
// x-qubit by R_half; otherwise flip the last x-qubit. Ambiguous prefixes
// (promise violations) take the matched branch with b = 0, which keeps the
// rule total and unitary for every formula; invalid queries are caught by
// the generator's validity test and the final verification step.
inline CircuitSpec build_usat_rule(const CnfFormula& formula) {
  const int n = formula.num_vars;
  if (n < 1) throw ValidationError("formula must have at least one variable");
  if (2 * n > kColumnWidthCap)
    throw ResourceError("search circuit width 2n exceeds the column-extraction cap");

  const auto table = detail::completion_table(formula);
  const double s34 = std::sqrt(0.75);
  const std::uint64_t y_mask = (std::uint64_t{1} << n) - 1;

  BasisRule rule;
  rule.width = 2 * n;
  rule.map = [n, table, s34, y_mask](std::uint64_t index) -> BasisColumn {
    const std::uint64_t x = index >> n;
    const std::uint64_t y = index & y_mask;
    const std::uint64_t prefix = x >> 1;
    const int xn = static_cast<int>(x & 1);
    const signed char status = (*table)[prefix];
    if (status < 0) {
      // Non-matching branch: bit flip on x_n.
      return {{((x ^ 1) << n) | y, cplx(1.0, 0.0)}};
    }
    const std::uint64_t b = status == 2 ? 0 : static_cast<std::uint64_t>(status);
    const std::uint64_t z = (prefix << 1) | b;
    const std::uint64_t shifted = y ^ z;
    return {{(x << n) | shifted, cplx(0.5, 0.0)},
            {((x ^ 1) << n) | shifted, cplx(xn ? -s34 : s34, 0.0)}};
  };

  const std::string digest = std::to_string(fnv1a64(emit_dimacs(formula)));
  return make_rule_circuit(std::move(rule), 2 * n + detail::formula_size(formula),
                           "usat:" + digest);
}

//==============================================================================
// Single-query search
//==============================================================================

// Any generation oracle; tests substitute counting or adversarial wrappers.
using CtcGenerator = std::function<CtcHandle(const PmgQuery&)>;

inline CtcGenerator make_generator(const AdversarialPolicy& policy,
                                   std::uint64_t adversary_seed,
                                   double tol = kDefaultTol) {
  return [policy, adversary_seed, tol](const PmgQuery& q) {
    return generate(q, policy, adversary_seed, tol);
  };
}

struct UsatOptions {
  int max_vars = kDefaultMaxVars;
  bool introspect = false;  // record the handle's validity flag in the outcome
};

struct UsatOutcome {
  std::optional<Assignment> witness;
  bool verified = false;  // evaluate(phi*, witness)
  int query_traced_qubits = 0;
  int query_width = 0;
  std::int64_t query_cost = 0;
  std::optional<bool> was_valid_pure_pmg;  // introspection mode only
};

// One generation query (n, C_phi*), one channel application to |0^n>, one
// measurement, one verification. On uniquely satisfiable inputs the channel
// is the XOR-by-witness unitary and the measurement is deterministic.
inline UsatOutcome m_usat(const CnfFormula& formula, const CtcGenerator& generator,
                          Rng& measure_rng, const UsatOptions& options = {}) {
  const int n = formula.num_vars;
  if (n < 1) throw ValidationError("formula must have at least one variable");
  if (n > options.max_vars) throw ResourceError("variable count exceeds the simulation cap");

  PmgQuery query;
  query.traced_qubits = n;
  query.circuit = build_usat_rule(formula);
  query.ancilla = 0;

  const CtcHandle handle = generator(query);
  const AppliedState state = uctc::apply(handle, basis_state(0, n));
  const std::uint64_t measured = measure(state, measure_rng);

  UsatOutcome outcome;
  outcome.witness = Assignment(measured, n);
  outcome.verified = evaluate(formula, *outcome.witness);
  outcome.query_traced_qubits = query.traced_qubits;
  outcome.query_width = query.circuit.width;
  outcome.query_cost = handle.query_cost;
  if (options.introspect) outcome.was_valid_pure_pmg = handle.was_valid_pure_pmg;
  return outcome;
}

//==============================================================================
// SAT decision loop
//==============================================================================

struct SatOptions {
  std::optional<int> iterations;  // default n^2
  std::uint64_t seed = 0;
  VvMode mode = VvMode::Direct;
  int max_vars = kDefaultMaxVars;
};

struct SatDecision {
  bool sat = false;
  std::optional<Assignment> witness;       // projected to the original variables
  std::optional<Assignment> full_witness;  // over all of phi*'s variables
  int iterations_used = 0;
  std::int64_t total_query_cost = 0;
  std::uint64_t seed = 0;
};

// Auxiliary-mode reductions add chained variables; widen the per-round cap
// accordingly so the configured cap keeps meaning "n variables of phi".
inline int max_auxiliary_vars(const CnfFormula& formula, VvMode mode) {
  if (mode == VvMode::Direct) return 0;
  const int n = formula.num_vars;
  return (n + 2) * std::max(n - 1, 0);  // k <= n+1 rows, <= n-1 links each
}

// Independent isolation rounds: phi* <- vv_reduce(phi, round seed), one
// single-query search each, accept on the first round whose witness verifies
// against phi*. Unsatisfiable inputs can never verify (the reduction
// preserves unsatisfiability with probability 1), so rejection is sound
// under every adversary.
inline SatDecision sat_decide(const CnfFormula& formula, const CtcGenerator& generator,
                              const SatOptions& options = {}) {
  SatDecision decision;
  decision.seed = options.seed;

  if (formula.num_vars == 0) {
    decision.sat = formula.clauses.empty();
    if (decision.sat) {
      decision.witness = Assignment("");
      decision.full_witness = Assignment("");
    }
    return decision;
  }
  if (formula.num_vars > options.max_vars)
    throw ResourceError("variable count exceeds the simulation cap");

  const int n = formula.num_vars;
  const int rounds = options.iterations.value_or(n * n);
  UsatOptions usat_options;
  usat_options.max_vars = options.max_vars + max_auxiliary_vars(formula, options.mode);

  for (int round = 1; round <= rounds; ++round) {
    const CnfFormula reduced =
        vv_reduce(formula, substream(options.seed, "vv", round), options.mode);
    Rng measure_rng(substream(options.seed, "measure", round));
    const UsatOutcome outcome = m_usat(reduced, generator, measure_rng, usat_options);
    decision.total_query_cost += outcome.query_cost;
    decision.iterations_used = round;
    if (outcome.verified) {
      decision.sat = true;
      decision.full_witness = outcome.witness;
      Assignment projected(outcome.witness->bits.substr(0, formula.original_vars));
      if (!evaluate(formula, projected))
        throw ValidationError("internal: verified witness fails the original formula");
      decision.witness = std::move(projected);
      return decision;
    }
  }
  decision.sat = false;
  decision.iterations_used = rounds;
  return decision;
}

inline nlohmann::json decision_to_json(const SatDecision& decision,
                                       const std::string& policy_name) {
  nlohmann::json j{{"result", decision.sat ? "SAT" : "UNSAT"},
                   {"witness", decision.witness ? nlohmann::json(decision.witness->bits)
                                                : nlohmann::json(nullptr)},
                   {"iterations_used", decision.iterations_used},
                   {"total_query_cost", decision.total_query_cost},
                   {"seed", decision.seed},
                   {"policy", policy_name}};
  return j;
}

}  // namespace uctc

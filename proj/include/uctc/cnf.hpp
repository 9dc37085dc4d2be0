#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "uctc/errors.hpp"
#include "uctc/rng.hpp"

namespace uctc {

//==============================================================================
// Assignments
//==============================================================================

// A total truth assignment as a bit string; character i is the value of
// variable i+1. The string read as binary (v1 most significant) equals the
// basis index the assignment occupies in the solver's quantum registers.
struct Assignment {
  std::string bits;

  Assignment() = default;
  explicit Assignment(std::string b) : bits(std::move(b)) {}
  Assignment(std::uint64_t index, int num_vars) {
    bits.resize(num_vars);
    for (int i = 0; i < num_vars; ++i)
      bits[i] = ((index >> (num_vars - 1 - i)) & 1u) ? '1' : '0';
  }

  int size() const { return static_cast<int>(bits.size()); }

  std::uint64_t index() const {
    std::uint64_t v = 0;
    for (char c : bits) v = (v << 1) | (c == '1' ? 1u : 0u);
    return v;
  }

  bool operator==(const Assignment& o) const { return bits == o.bits; }
};

//==============================================================================
// Formulas
//==============================================================================

using Clause = std::vector<int>;  // nonzero DIMACS literals, e.g. {1, -3}

struct CnfFormula {
  int num_vars = 0;
  std::vector<Clause> clauses;
  // Variables [1, original_vars] are the problem's own; anything above was
  // introduced by an encoding (e.g. XOR chaining) and is projected away from
  // reported witnesses.
  int original_vars = 0;

  bool operator==(const CnfFormula& o) const {
    return num_vars == o.num_vars && original_vars == o.original_vars && clauses == o.clauses;
  }
};

// Drops duplicate literals and tautological clauses (v or !v). Emitted DIMACS
// may therefore differ textually from what was parsed.
inline Clause normalize_clause(Clause clause, bool& tautological) {
  std::sort(clause.begin(), clause.end(),
            [](int a, int b) { return std::abs(a) != std::abs(b) ? std::abs(a) < std::abs(b) : a < b; });
  clause.erase(std::unique(clause.begin(), clause.end()), clause.end());
  tautological = false;
  for (std::size_t i = 0; i + 1 < clause.size(); ++i)
    if (clause[i] == -clause[i + 1]) {
      tautological = true;
      break;
    }
  return clause;
}

inline void add_clause(CnfFormula& formula, Clause clause) {
  for (int lit : clause)
    if (lit == 0 || std::abs(lit) > formula.num_vars)
      throw ValidationError("literal out of range");
  bool tautological = false;
  clause = normalize_clause(std::move(clause), tautological);
  if (!tautological) formula.clauses.push_back(std::move(clause));
}

//==============================================================================
// DIMACS I/O
//==============================================================================

inline CnfFormula parse_dimacs(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool have_header = false;
  CnfFormula formula;
  Clause current;
  int declared_clauses = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == 'c') continue;
    std::istringstream ls(line);
    if (!have_header) {
      std::string p, fmt;
      if (!(ls >> p)) continue;
      if (p != "p") throw ParseError("expected 'p cnf <vars> <clauses>' header", line_no);
      if (!(ls >> fmt >> formula.num_vars >> declared_clauses) || fmt != "cnf" ||
          formula.num_vars < 0 || declared_clauses < 0)
        throw ParseError("malformed DIMACS header", line_no);
      formula.original_vars = formula.num_vars;
      have_header = true;
      continue;
    }
    int lit;
    while (ls >> lit) {
      if (lit == 0) {
        bool tautological = false;
        current = normalize_clause(std::move(current), tautological);
        if (!tautological) formula.clauses.push_back(current);
        current.clear();
      } else {
        if (std::abs(lit) > formula.num_vars)
          throw ParseError("literal out of range", line_no);
        current.push_back(lit);
      }
    }
    if (!ls.eof()) throw ParseError("unexpected token in clause", line_no);
  }
  if (!have_header) throw ParseError("missing DIMACS header", std::max(line_no, 1));
  if (!current.empty()) throw ParseError("clause missing terminating 0", line_no);
  return formula;
}

inline std::string emit_dimacs(const CnfFormula& formula,
                               const std::vector<std::string>& comments = {}) {
  std::ostringstream out;
  for (const std::string& c : comments) out << "c " << c << "\n";
  out << "p cnf " << formula.num_vars << " " << formula.clauses.size() << "\n";
  for (const Clause& clause : formula.clauses) {
    for (int lit : clause) out << lit << " ";
    out << "0\n";
  }
  return out.str();
}

//==============================================================================
// Evaluation and brute-force oracles
//==============================================================================

namespace detail {

// Per-clause bitmask view for tight enumeration loops. Variable j occupies
// bit (num_vars - j), so an assignment's mask equals its basis index.
struct CompiledCnf {
  int num_vars;
  std::vector<std::uint64_t> pos_masks;
  std::vector<std::uint64_t> neg_masks;

  explicit CompiledCnf(const CnfFormula& formula) : num_vars(formula.num_vars) {
    if (formula.num_vars > 63) throw ResourceError("mask evaluation limited to 63 variables");
    pos_masks.reserve(formula.clauses.size());
    neg_masks.reserve(formula.clauses.size());
    for (const Clause& clause : formula.clauses) {
      std::uint64_t pos = 0, neg = 0;
      for (int lit : clause) {
        const std::uint64_t bit = std::uint64_t{1} << (num_vars - std::abs(lit));
        (lit > 0 ? pos : neg) |= bit;
      }
      pos_masks.push_back(pos);
      neg_masks.push_back(neg);
    }
  }

  bool satisfied(std::uint64_t assignment_mask) const {
    for (std::size_t i = 0; i < pos_masks.size(); ++i)
      if ((pos_masks[i] & assignment_mask) == 0 &&
          (neg_masks[i] & ~assignment_mask) == 0)
        return false;
    return true;
  }
};

}  // namespace detail

inline bool evaluate(const CnfFormula& formula, const Assignment& a) {
  if (a.size() != formula.num_vars)
    throw DimensionError("assignment length does not match variable count");
  for (const Clause& clause : formula.clauses) {
    bool sat = false;
    for (int lit : clause) {
      const bool value = a.bits[std::abs(lit) - 1] == '1';
      if (value == (lit > 0)) {
        sat = true;
        break;
      }
    }
    if (!sat) return false;
  }
  return true;
}

inline std::uint64_t count_models(const CnfFormula& formula) {
  if (formula.num_vars > 24) throw ResourceError("count_models limited to 24 variables");
  const detail::CompiledCnf compiled(formula);
  const std::uint64_t total = std::uint64_t{1} << formula.num_vars;
  std::uint64_t count = 0;
  for (std::uint64_t mask = 0; mask < total; ++mask)
    if (compiled.satisfied(mask)) ++count;
  return count;
}

inline std::vector<Assignment> enumerate_models(const CnfFormula& formula) {
  if (formula.num_vars > 16) throw ResourceError("enumerate_models limited to 16 variables");
  const detail::CompiledCnf compiled(formula);
  const std::uint64_t total = std::uint64_t{1} << formula.num_vars;
  std::vector<Assignment> models;
  for (std::uint64_t mask = 0; mask < total; ++mask)
    if (compiled.satisfied(mask)) models.emplace_back(mask, formula.num_vars);
  return models;
}

//==============================================================================
// Prefix completion (the x ~ phi predicate)
//==============================================================================

struct PrefixCompletion {
  enum class Kind { None, Unique, Ambiguous } kind = Kind::None;
  int bit = 0;  // meaningful only when kind == Unique

  bool matched() const { return kind != Kind::None; }
};

// Checks whether prefix||0 or prefix||1 satisfies the formula. Under the
// unique-satisfiability promise at most one does; "ambiguous" is reported
// (not an error) so the basis rule stays total on promise-violating inputs.
inline PrefixCompletion prefix_completion(const CnfFormula& formula, const std::string& prefix) {
  if (static_cast<int>(prefix.size()) != formula.num_vars - 1)
    throw DimensionError("prefix length must be num_vars - 1");
  const bool sat0 = evaluate(formula, Assignment(prefix + "0"));
  const bool sat1 = evaluate(formula, Assignment(prefix + "1"));
  if (sat0 && sat1) return {PrefixCompletion::Kind::Ambiguous, 0};
  if (sat0) return {PrefixCompletion::Kind::Unique, 0};
  if (sat1) return {PrefixCompletion::Kind::Unique, 1};
  return {PrefixCompletion::Kind::None, 0};
}

//==============================================================================
// Seeded benchmark formulas
//==============================================================================

// Reproducible random CNF: each clause picks `clause_width` distinct
// variables (partial Fisher-Yates) and negates each with probability 1/2.
inline CnfFormula random_cnf(int num_vars, int num_clauses, int clause_width,
                             std::uint64_t seed) {
  if (num_vars < 1 || num_clauses < 0 || clause_width < 1 || clause_width > num_vars)
    throw ValidationError("random_cnf: bad parameters");
  Rng rng(mix64(seed));
  CnfFormula formula;
  formula.num_vars = num_vars;
  formula.original_vars = num_vars;
  std::vector<int> vars(num_vars);
  for (int clause_idx = 0; clause_idx < num_clauses; ++clause_idx) {
    for (int i = 0; i < num_vars; ++i) vars[i] = i + 1;
    Clause clause;
    for (int i = 0; i < clause_width; ++i) {
      const std::size_t j = i + rng.uniform_int(num_vars - i);
      std::swap(vars[i], vars[j]);
      clause.push_back(rng.coin() ? vars[i] : -vars[i]);
    }
    add_clause(formula, std::move(clause));
  }
  return formula;
}

}  // namespace uctc

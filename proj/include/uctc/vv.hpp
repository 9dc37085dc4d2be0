#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "uctc/cnf.hpp"
#include "uctc/errors.hpp"
#include "uctc/rng.hpp"

namespace uctc {

//==============================================================================
// Affine GF(2) hash constraints
//
// The isolation reduction conjoins a formula with A.x = b for a uniformly
// random k x n bit matrix A and vector b, k uniform on {0,...,n+1} -- the
// standard pairwise-independent family.
//==============================================================================

// Direct XOR-row expansion is exponential in row weight; rows wider than this
// must use the auxiliary encoding.
inline constexpr int kDirectRowWidthCap = 10;

struct HashConstraint {
  int num_vars = 0;
  int k = 0;
  // Row i as a bitmask over variables; variable j occupies bit (num_vars - j)
  // so masks compose directly with assignment indices.
  std::vector<std::uint64_t> rows;
  std::vector<bool> b;

  bool a_entry(int row, int var) const {
    return (rows[row] >> (num_vars - var)) & 1u;
  }

  bool satisfied(std::uint64_t assignment_mask) const {
    for (int i = 0; i < k; ++i)
      if ((std::popcount(rows[i] & assignment_mask) & 1) != (b[i] ? 1 : 0)) return false;
    return true;
  }
};

// Draw order is fixed (k, then A row-major, then b) so a seed pins the
// constraint bit-for-bit.
inline HashConstraint sample_constraint(int num_vars, std::uint64_t seed) {
  if (num_vars < 1) throw ValidationError("sample_constraint: need at least one variable");
  if (num_vars > 62) throw ResourceError("sample_constraint: limited to 62 variables");
  Rng rng(mix64(seed));
  HashConstraint h;
  h.num_vars = num_vars;
  h.k = static_cast<int>(rng.uniform_int(num_vars + 2));
  h.rows.resize(h.k, 0);
  h.b.resize(h.k, false);
  for (int i = 0; i < h.k; ++i)
    for (int j = 1; j <= num_vars; ++j)
      if (rng.coin()) h.rows[i] |= std::uint64_t{1} << (num_vars - j);
  for (int i = 0; i < h.k; ++i) h.b[i] = rng.coin();
  return h;
}

//==============================================================================
// XOR-constraint encodings
//==============================================================================

enum class VvMode { Direct, Auxiliary };

inline std::string vv_mode_name(VvMode mode) {
  return mode == VvMode::Direct ? "direct" : "aux";
}

inline VvMode parse_vv_mode(const std::string& text) {
  if (text == "direct") return VvMode::Direct;
  if (text == "aux" || text == "auxiliary") return VvMode::Auxiliary;
  throw ValidationError("unknown encoding mode '" + text + "'");
}

namespace detail {

// 2^{w-1} clauses forbidding every parity-violating pattern of the row.
inline void encode_row_direct(CnfFormula& out, const std::vector<int>& vars, bool target) {
  const int w = static_cast<int>(vars.size());
  for (std::uint32_t pattern = 0; pattern < (std::uint32_t{1} << w); ++pattern) {
    if ((std::popcount(pattern) & 1) == (target ? 1 : 0)) continue;  // satisfies the row
    Clause clause;
    clause.reserve(w);
    for (int t = 0; t < w; ++t)
      clause.push_back(((pattern >> t) & 1u) ? -vars[t] : vars[t]);
    add_clause(out, std::move(clause));
  }
}

inline void add_xor3(CnfFormula& out, int t, int a, int b) {
  add_clause(out, {-t, a, b});
  add_clause(out, {-t, -a, -b});
  add_clause(out, {t, -a, b});
  add_clause(out, {t, a, -b});
}

// Chains the row through fresh variables, each functionally determined:
// t_1 = v_1 xor v_2, t_j = t_{j-1} xor v_{j+1}, then a unit on the last link.
inline void encode_row_auxiliary(CnfFormula& out, const std::vector<int>& vars, bool target) {
  const int w = static_cast<int>(vars.size());
  if (w == 1) {
    add_clause(out, {target ? vars[0] : -vars[0]});
    return;
  }
  int prev = ++out.num_vars;
  add_xor3(out, prev, vars[0], vars[1]);
  for (int t = 2; t < w; ++t) {
    const int next = ++out.num_vars;
    add_xor3(out, next, prev, vars[t]);
    prev = next;
  }
  add_clause(out, {target ? prev : -prev});
}

}  // namespace detail

// phi* = phi AND (A.x = b). Models of phi* restricted to phi's variables are
// exactly the models of phi satisfying the constraint; auxiliary-mode extras
// are functionally determined by x.
inline CnfFormula encode(const CnfFormula& formula, const HashConstraint& h, VvMode mode) {
  if (h.num_vars != formula.num_vars)
    throw DimensionError("constraint variable count does not match formula");
  CnfFormula out = formula;
  out.original_vars = formula.original_vars;
  for (int i = 0; i < h.k; ++i) {
    std::vector<int> vars;
    for (int j = 1; j <= h.num_vars; ++j)
      if (h.a_entry(i, j)) vars.push_back(j);
    if (vars.empty()) {
      // 0 = 1 is unsatisfiable; encode as a contradiction pair rather than an
      // empty clause (formulas never carry empty clauses).
      if (h.b[i]) {
        add_clause(out, {1});
        add_clause(out, {-1});
      }
      continue;
    }
    if (mode == VvMode::Direct) {
      if (static_cast<int>(vars.size()) > kDirectRowWidthCap)
        throw ResourceError("XOR row too wide for the direct encoding");
      detail::encode_row_direct(out, vars, h.b[i]);
    } else {
      detail::encode_row_auxiliary(out, vars, h.b[i]);
    }
  }
  return out;
}

// One isolation attempt: sample a constraint from the seed and conjoin it.
inline CnfFormula vv_reduce(const CnfFormula& formula, std::uint64_t seed, VvMode mode) {
  return encode(formula, sample_constraint(formula.num_vars, seed), mode);
}

//==============================================================================
// DIMACS comment line for emitted reductions
//==============================================================================

inline std::string vv_comment(std::uint64_t seed, const HashConstraint& h, VvMode mode) {
  std::ostringstream out;
  out << "vv seed=" << seed << " k=" << h.k << " mode=" << vv_mode_name(mode);
  return out.str();
}

struct VvCommentInfo {
  std::uint64_t seed = 0;
  int k = 0;
  std::string mode;
};

inline std::optional<VvCommentInfo> parse_vv_comment(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string c, tag;
    if (!(ls >> c >> tag) || c != "c" || tag != "vv") continue;
    VvCommentInfo info;
    std::string field;
    bool have_seed = false, have_k = false;
    while (ls >> field) {
      if (field.rfind("seed=", 0) == 0) {
        info.seed = std::stoull(field.substr(5));
        have_seed = true;
      } else if (field.rfind("k=", 0) == 0) {
        info.k = std::stoi(field.substr(2));
        have_k = true;
      } else if (field.rfind("mode=", 0) == 0) {
        info.mode = field.substr(5);
      }
    }
    if (have_seed && have_k) return info;
  }
  return std::nullopt;
}

}  // namespace uctc

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "uctc/errors.hpp"
#include "uctc/matrix.hpp"
#include "uctc/rng.hpp"
#include "uctc/tensor.hpp"

namespace uctc {

// Width cap for materializing a full 2^w x 2^w unitary (~4 GB at w = 14).
inline constexpr int kDenseWidthCap = 14;
// Width cap for traced-block extraction via per-column application.
inline constexpr int kColumnWidthCap = 18;
// Basis rules up to this width get a full dense unitarity check; above it the
// check samples column norms plus random column pairs.
inline constexpr int kFullRuleCheckWidth = 12;

//==============================================================================
// Gates
//==============================================================================

enum class GateKind { X, CNOT, SWAP, Toffoli, RHalf, Custom1Q };

// R_half: the fixed single-qubit rotation used by the search circuit's
// matched branch.
inline ComplexMatrix rhalf_matrix() {
  const double s = std::sqrt(0.75);
  ComplexMatrix m(2, 2);
  m(0, 0) = 0.5;
  m(0, 1) = -s;
  m(1, 0) = s;
  m(1, 1) = 0.5;
  return m;
}

struct Gate {
  GateKind kind;
  std::array<int, 3> targets{};  // first num_targets entries are meaningful
  int num_targets = 0;
  ComplexMatrix custom;  // Custom1Q only

  static Gate x(int q) { return {GateKind::X, {q, 0, 0}, 1, {}}; }
  static Gate cnot(int control, int target) {
    return {GateKind::CNOT, {control, target, 0}, 2, {}};
  }
  static Gate swap(int a, int b) { return {GateKind::SWAP, {a, b, 0}, 2, {}}; }
  static Gate toffoli(int a, int b, int target) {
    return {GateKind::Toffoli, {a, b, target}, 3, {}};
  }
  static Gate rhalf(int q) { return {GateKind::RHalf, {q, 0, 0}, 1, {}}; }
  static Gate custom1q(int q, ComplexMatrix m) {
    if (m.rows() != 2 || m.cols() != 2) throw DimensionError("custom gate must be 2x2");
    if (!is_unitary(m, kDefaultTol).unitary)
      throw ValidationError("custom gate matrix is not unitary");
    return {GateKind::Custom1Q, {q, 0, 0}, 1, std::move(m)};
  }
};

//==============================================================================
// Circuit bodies
//==============================================================================

// Amplitude list a classically specified circuit assigns to one basis input.
using BasisColumn = std::vector<std::pair<std::uint64_t, cplx>>;

// A circuit given by its action on classical basis states. The induced
// 2^width matrix must be unitary; compile-time validation enforces it.
struct BasisRule {
  int width = 0;
  std::function<BasisColumn(std::uint64_t)> map;
};

struct CircuitSpec {
  int width = 0;
  std::variant<std::vector<Gate>, BasisRule> body;
  // Size accounting for oracle-query costs; gate lists default to the gate
  // count, rules to whatever the builder recorded.
  std::int64_t cost = 0;
  // Stable content tag (e.g. a formula digest) so seeded machinery can key
  // streams off the circuit; empty is fine.
  std::string tag;

  bool is_gate_list() const { return std::holds_alternative<std::vector<Gate>>(body); }
  const std::vector<Gate>& gates() const { return std::get<std::vector<Gate>>(body); }
  const BasisRule& rule() const { return std::get<BasisRule>(body); }
};

inline CircuitSpec make_gate_circuit(int width, std::vector<Gate> gates) {
  for (const Gate& g : gates) {
    for (int i = 0; i < g.num_targets; ++i) {
      if (g.targets[i] < 0 || g.targets[i] >= width)
        throw ValidationError("gate target out of range");
      for (int j = i + 1; j < g.num_targets; ++j)
        if (g.targets[i] == g.targets[j])
          throw ValidationError("gate targets must be distinct");
    }
  }
  CircuitSpec c;
  c.width = width;
  c.cost = static_cast<std::int64_t>(gates.size());
  c.body = std::move(gates);
  return c;
}

inline CircuitSpec make_rule_circuit(BasisRule rule, std::int64_t cost = 0,
                                     std::string tag = {}) {
  if (rule.width < 1) throw ValidationError("basis rule width must be positive");
  CircuitSpec c;
  c.width = rule.width;
  c.cost = cost > 0 ? cost : rule.width;
  c.tag = std::move(tag);
  c.body = std::move(rule);
  return c;
}

//==============================================================================
// State application
//==============================================================================

namespace detail {

inline void apply_gate(const Gate& g, std::vector<cplx>& state, int width) {
  const std::size_t dim = state.size();
  switch (g.kind) {
    case GateKind::X: {
      const std::uint64_t bit = basis_bit_mask(width, g.targets[0]);
      for (std::size_t i = 0; i < dim; ++i)
        if ((i & bit) == 0) std::swap(state[i], state[i | bit]);
      break;
    }
    case GateKind::CNOT: {
      const std::uint64_t cbit = basis_bit_mask(width, g.targets[0]);
      const std::uint64_t tbit = basis_bit_mask(width, g.targets[1]);
      for (std::size_t i = 0; i < dim; ++i)
        if ((i & cbit) != 0 && (i & tbit) == 0) std::swap(state[i], state[i | tbit]);
      break;
    }
    case GateKind::SWAP: {
      const std::uint64_t abit = basis_bit_mask(width, g.targets[0]);
      const std::uint64_t bbit = basis_bit_mask(width, g.targets[1]);
      for (std::size_t i = 0; i < dim; ++i)
        if ((i & abit) != 0 && (i & bbit) == 0)
          std::swap(state[i], (state[(i ^ abit) | bbit]));
      break;
    }
    case GateKind::Toffoli: {
      const std::uint64_t c1 = basis_bit_mask(width, g.targets[0]);
      const std::uint64_t c2 = basis_bit_mask(width, g.targets[1]);
      const std::uint64_t tbit = basis_bit_mask(width, g.targets[2]);
      for (std::size_t i = 0; i < dim; ++i)
        if ((i & c1) != 0 && (i & c2) != 0 && (i & tbit) == 0)
          std::swap(state[i], state[i | tbit]);
      break;
    }
    case GateKind::RHalf:
    case GateKind::Custom1Q: {
      const ComplexMatrix m = g.kind == GateKind::RHalf ? rhalf_matrix() : g.custom;
      const std::uint64_t bit = basis_bit_mask(width, g.targets[0]);
      for (std::size_t i = 0; i < dim; ++i)
        if ((i & bit) == 0) {
          const cplx v0 = state[i];
          const cplx v1 = state[i | bit];
          state[i] = m(0, 0) * v0 + m(0, 1) * v1;
          state[i | bit] = m(1, 0) * v0 + m(1, 1) * v1;
        }
      break;
    }
  }
}

// Sparse column of the induced unitary, available without touching the full
// 2^width state vector when the body is a basis rule.
inline BasisColumn basis_column_sparse(const CircuitSpec& c, std::uint64_t index) {
  if (!c.is_gate_list()) return c.rule().map(index);
  std::vector<cplx> state = basis_state(index, c.width);
  for (const Gate& g : c.gates()) apply_gate(g, state, c.width);
  BasisColumn out;
  for (std::size_t i = 0; i < state.size(); ++i)
    if (state[i] != cplx{}) out.emplace_back(i, state[i]);
  return out;
}

}  // namespace detail

// Column of the induced unitary at a basis index, as a dense state vector.
inline std::vector<cplx> apply_to_basis(const CircuitSpec& c, std::uint64_t index) {
  if (index >= (std::uint64_t{1} << c.width))
    throw DimensionError("basis index out of range for circuit width");
  if (c.is_gate_list()) {
    std::vector<cplx> state = basis_state(index, c.width);
    for (const Gate& g : c.gates()) detail::apply_gate(g, state, c.width);
    return state;
  }
  std::vector<cplx> state(std::size_t{1} << c.width);
  for (const auto& [out_index, amp] : c.rule().map(index)) {
    if (out_index >= state.size()) throw ValidationError("basis rule output index out of range");
    if (!std::isfinite(amp.real()) || !std::isfinite(amp.imag()))
      throw ValidationError("basis rule amplitude is not finite");
    state[out_index] += amp;
  }
  return state;
}

inline std::vector<cplx> apply_to_basis(const CircuitSpec& c, const std::string& bits) {
  if (static_cast<int>(bits.size()) != c.width)
    throw DimensionError("basis string length does not match circuit width");
  std::uint64_t index = 0;
  for (char ch : bits) index = (index << 1) | (ch == '1' ? 1u : 0u);
  return apply_to_basis(c, index);
}

//==============================================================================
// Rule validation
//==============================================================================

namespace detail {

inline cplx sparse_inner(const BasisColumn& a, const BasisColumn& b) {
  cplx acc = 0.0;
  for (const auto& [ia, va] : a)
    for (const auto& [ib, vb] : b)
      if (ia == ib) acc += std::conj(va) * vb;
  return acc;
}

// Column-sampled unitarity check for rules too wide to materialize: all
// column norms plus 256 random column pairs.
inline void validate_rule_sampled(const CircuitSpec& c, double tol) {
  const std::uint64_t dim = std::uint64_t{1} << c.width;
  std::vector<BasisColumn> cache;
  for (std::uint64_t i = 0; i < dim; ++i) {
    const BasisColumn col = c.rule().map(i);
    if (col.empty()) throw ValidationError("basis rule column is empty");
    double norm2 = 0.0;
    for (const auto& [idx, amp] : col) {
      if (idx >= dim) throw ValidationError("basis rule output index out of range");
      if (!std::isfinite(amp.real()) || !std::isfinite(amp.imag()))
        throw ValidationError("basis rule amplitude is not finite");
      norm2 += std::norm(amp);
    }
    if (std::abs(norm2 - 1.0) > tol)
      throw ValidationError("basis rule column norm deviates from 1");
  }
  Rng rng(0x7d0c5eb1u);  // fixed seed: the check must not depend on run seeds
  for (int trial = 0; trial < 256; ++trial) {
    const std::uint64_t i = rng.uniform_int(dim);
    std::uint64_t j = rng.uniform_int(dim - 1);
    if (j >= i) ++j;
    const cplx ip = sparse_inner(c.rule().map(i), c.rule().map(j));
    if (std::abs(ip) > tol)
      throw ValidationError("basis rule columns are not orthogonal");
  }
}

}  // namespace detail

//==============================================================================
// Compilation and traced blocks
//==============================================================================

// Materializes the induced unitary U_C. Basis-rule bodies are validated for
// unitarity here (dense up to width 12, sampled above). The cap guards the
// 2^{2w} allocation (~4 GB at the default width 14).
inline ComplexMatrix compile_unitary(const CircuitSpec& c, int width_cap = kDenseWidthCap) {
  if (c.width > width_cap)
    throw ResourceError("circuit width exceeds dense compilation cap");
  const std::size_t dim = std::size_t{1} << c.width;
  ComplexMatrix u(dim, dim);
  for (std::size_t col = 0; col < dim; ++col) {
    const std::vector<cplx> column = apply_to_basis(c, col);
    for (std::size_t row = 0; row < dim; ++row) u(row, col) = column[row];
  }
  if (!c.is_gate_list()) {
    if (c.width <= kFullRuleCheckWidth) {
      const UnitaryCheck check = is_unitary(u, kDefaultTol);
      if (!check.unitary)
        throw ValidationError("basis rule does not induce a unitary (residual " +
                              std::to_string(check.residual) + ")");
    } else {
      detail::validate_rule_sampled(c, 1e-8);
    }
  }
  return u;
}

// tr_{traced}(U_C): V[y',y] = sum_x <x,y'| U_C |x,y>, assembled column by
// column so U_C itself is never materialized.
inline ComplexMatrix traced_block_unitary(const CircuitSpec& c, int traced_qubits) {
  if (traced_qubits < 0 || traced_qubits > c.width)
    throw DimensionError("traced qubit count out of range");
  if (c.width > kColumnWidthCap)
    throw ResourceError("circuit width exceeds column-extraction cap");
  const int rest = c.width - traced_qubits;
  const std::uint64_t traced_dim = std::uint64_t{1} << traced_qubits;
  const std::uint64_t rest_dim = std::uint64_t{1} << rest;
  ComplexMatrix v(rest_dim, rest_dim);
  for (std::uint64_t x = 0; x < traced_dim; ++x)
    for (std::uint64_t y = 0; y < rest_dim; ++y) {
      const BasisColumn column = detail::basis_column_sparse(c, (x << rest) | y);
      for (const auto& [out_index, amp] : column)
        if ((out_index >> rest) == x) v(out_index & (rest_dim - 1), y) += amp;
    }
  return v;
}

//==============================================================================
// Circuit text format
//==============================================================================
//
//   qubits <width>
//   X q | CNOT c t | SWAP a b | TOF a b t | RHALF q
//   CUSTOM q re00 im00 re01 im01 re10 im10 re11 im11

inline CircuitSpec parse_circuit(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  int width = -1;
  std::vector<Gate> gates;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string op;
    if (!(ls >> op)) continue;
    if (width < 0) {
      if (op != "qubits") throw ParseError("expected 'qubits <width>' header", line_no);
      if (!(ls >> width) || width < 1) throw ParseError("bad qubit count", line_no);
      continue;
    }
    try {
      if (op == "X" || op == "RHALF") {
        int q;
        if (!(ls >> q)) throw ParseError("expected qubit index", line_no);
        gates.push_back(op == "X" ? Gate::x(q) : Gate::rhalf(q));
      } else if (op == "CNOT" || op == "SWAP") {
        int a, b;
        if (!(ls >> a >> b)) throw ParseError("expected two qubit indices", line_no);
        gates.push_back(op == "CNOT" ? Gate::cnot(a, b) : Gate::swap(a, b));
      } else if (op == "TOF") {
        int a, b, t;
        if (!(ls >> a >> b >> t)) throw ParseError("expected three qubit indices", line_no);
        gates.push_back(Gate::toffoli(a, b, t));
      } else if (op == "CUSTOM") {
        int q;
        double e[8];
        if (!(ls >> q >> e[0] >> e[1] >> e[2] >> e[3] >> e[4] >> e[5] >> e[6] >> e[7]))
          throw ParseError("expected qubit index and 8 matrix entries", line_no);
        ComplexMatrix m(2, 2);
        m(0, 0) = {e[0], e[1]};
        m(0, 1) = {e[2], e[3]};
        m(1, 0) = {e[4], e[5]};
        m(1, 1) = {e[6], e[7]};
        gates.push_back(Gate::custom1q(q, std::move(m)));
      } else {
        throw ParseError("unknown gate '" + op + "'", line_no);
      }
    } catch (const ValidationError& err) {
      throw ParseError(err.what(), line_no);
    }
  }
  if (width < 0) throw ParseError("missing 'qubits' header", std::max(line_no, 1));
  try {
    return make_gate_circuit(width, std::move(gates));
  } catch (const ValidationError& err) {
    throw ParseError(err.what(), line_no);
  }
}

inline std::string emit_circuit(const CircuitSpec& c) {
  if (!c.is_gate_list())
    throw ValidationError("only gate-list circuits have a text form");
  std::ostringstream out;
  out << "qubits " << c.width << "\n";
  for (const Gate& g : c.gates()) {
    switch (g.kind) {
      case GateKind::X: out << "X " << g.targets[0] << "\n"; break;
      case GateKind::CNOT: out << "CNOT " << g.targets[0] << " " << g.targets[1] << "\n"; break;
      case GateKind::SWAP: out << "SWAP " << g.targets[0] << " " << g.targets[1] << "\n"; break;
      case GateKind::Toffoli:
        out << "TOF " << g.targets[0] << " " << g.targets[1] << " " << g.targets[2] << "\n";
        break;
      case GateKind::RHalf: out << "RHALF " << g.targets[0] << "\n"; break;
      case GateKind::Custom1Q: {
        out << "CUSTOM " << g.targets[0];
        for (int r = 0; r < 2; ++r)
          for (int col = 0; col < 2; ++col)
            out << " " << g.custom(r, col).real() << " " << g.custom(r, col).imag();
        out << "\n";
        break;
      }
    }
  }
  return out.str();
}

}  // namespace uctc

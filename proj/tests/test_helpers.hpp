#pragma once

#include <cstdint>
#include <vector>

#include "uctc/channel.hpp"
#include "uctc/cnf.hpp"
#include "uctc/ctc.hpp"
#include "uctc/matrix.hpp"
#include "uctc/rng.hpp"

namespace testutil {

inline uctc::ComplexMatrix random_matrix(std::size_t rows, std::size_t cols, uctc::Rng& rng) {
  uctc::ComplexMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = uctc::cplx(rng.gauss(), rng.gauss());
  return m;
}

inline uctc::ComplexMatrix random_unitary(std::size_t dim, uctc::Rng& rng) {
  return uctc::detail::haar_unitary(dim, rng);
}

// Random CPTP channel from a Haar unitary on in+env qubits: Kraus blocks
// K_e[f, x] = U[(f, e), (x, 0)] for each environment outcome e.
inline uctc::ChannelRep random_kraus_channel(int qubits, int env_qubits, uctc::Rng& rng) {
  const std::size_t din = std::size_t{1} << qubits;
  const std::size_t denv = std::size_t{1} << env_qubits;
  const uctc::ComplexMatrix u = random_unitary(din * denv, rng);
  std::vector<uctc::ComplexMatrix> kraus;
  for (std::size_t e = 0; e < denv; ++e) {
    uctc::ComplexMatrix k(din, din);
    for (std::size_t f = 0; f < din; ++f)
      for (std::size_t x = 0; x < din; ++x) k(f, x) = u(f * denv + e, x * denv + 0);
    kraus.push_back(std::move(k));
  }
  return uctc::ChannelRep::kraus(std::move(kraus), qubits, qubits, 1e-8);
}

// Literal CJ sum over matrix units, kept independent of the library's
// double-ket shortcut: W = sum_{x,y} |x><y| (x) C(|x><y|).
inline uctc::ComplexMatrix cj_by_matrix_units(const uctc::ChannelRep& channel) {
  const std::size_t di = channel.in_dim();
  const std::size_t dz = channel.out_dim();
  uctc::ComplexMatrix w(di * dz, di * dz);
  for (std::size_t x = 0; x < di; ++x)
    for (std::size_t y = 0; y < di; ++y) {
      uctc::ComplexMatrix unit(di, di);
      unit(x, y) = 1.0;
      const uctc::ComplexMatrix image = channel.apply_density(unit);
      for (std::size_t a = 0; a < dz; ++a)
        for (std::size_t b = 0; b < dz; ++b) w(x * dz + a, y * dz + b) = image(a, b);
    }
  return w;
}

// XOR-by-z permutation sum_y |y xor z><y| on n qubits.
inline uctc::ComplexMatrix xor_matrix(std::uint64_t z, int qubits) {
  const std::size_t dim = std::size_t{1} << qubits;
  uctc::ComplexMatrix m(dim, dim);
  for (std::size_t y = 0; y < dim; ++y) m(y ^ z, y) = 1.0;
  return m;
}

inline uctc::CnfFormula formula_from_dimacs(const std::string& text) {
  return uctc::parse_dimacs(text);
}

// Unit clauses pinning exactly the assignment z; the canonical uniquely
// satisfiable family.
inline uctc::CnfFormula pinned_formula(std::uint64_t z, int num_vars) {
  uctc::CnfFormula f;
  f.num_vars = num_vars;
  f.original_vars = num_vars;
  for (int v = 1; v <= num_vars; ++v) {
    const bool bit = ((z >> (num_vars - v)) & 1u) != 0;
    uctc::add_clause(f, {bit ? v : -v});
  }
  return f;
}

}  // namespace testutil

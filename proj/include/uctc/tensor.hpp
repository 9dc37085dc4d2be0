#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "uctc/errors.hpp"
#include "uctc/matrix.hpp"

namespace uctc {

//==============================================================================
// Subsystem bookkeeping
//==============================================================================

// Ordered tensor-factor dimensions; leftmost factor owns the most significant
// index block, matching the basis-index convention in matrix.hpp.
struct SubsystemDims {
  std::vector<std::size_t> dims;

  std::size_t total() const {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                           [](std::size_t a, std::size_t b) { return a * b; });
  }

  void validate_against(const ComplexMatrix& m) const {
    for (std::size_t d : dims)
      if (d == 0 || (d & (d - 1)) != 0)
        throw DimensionError("subsystem dimension is not a power of two");
    if (!m.is_square() || m.rows() != total())
      throw DimensionError("subsystem dims inconsistent with matrix dimension");
  }
};

namespace detail {

inline bool is_power_of_two(std::size_t x) { return x != 0 && (x & (x - 1)) == 0; }

inline int log2_exact(std::size_t x) {
  int n = 0;
  while ((std::size_t{1} << n) < x) ++n;
  return n;
}

}  // namespace detail

//==============================================================================
// Partial traces
//==============================================================================

// Traces out the leftmost `traced_qubits` qubits:
//   out = sum_x (<x| (x) I) . m . (|x> (x) I),  out dimension 2^rest.
inline ComplexMatrix partial_trace_left(const ComplexMatrix& m, int traced_qubits) {
  if (!m.is_square()) throw DimensionError("partial_trace_left: matrix not square");
  if (traced_qubits < 0) throw DimensionError("partial_trace_left: negative qubit count");
  if (!detail::is_power_of_two(m.rows()) ||
      m.rows() < (std::size_t{1} << traced_qubits))
    throw DimensionError("partial_trace_left: dimension is not a power of two >= 2^traced");
  const std::size_t traced_dim = std::size_t{1} << traced_qubits;
  const std::size_t rest = m.rows() / traced_dim;
  ComplexMatrix out(rest, rest);
  for (std::size_t x = 0; x < traced_dim; ++x) {
    const std::size_t base = x * rest;
    for (std::size_t r = 0; r < rest; ++r)
      for (std::size_t c = 0; c < rest; ++c) out(r, c) += m(base + r, base + c);
  }
  return out;
}

// Traces out the rightmost qubits instead; used for the trace-preservation
// side of Choi checks (output factor sits on the right).
inline ComplexMatrix partial_trace_right(const ComplexMatrix& m, int traced_qubits) {
  if (!m.is_square()) throw DimensionError("partial_trace_right: matrix not square");
  const std::size_t traced_dim = std::size_t{1} << traced_qubits;
  if (!detail::is_power_of_two(m.rows()) || m.rows() < traced_dim)
    throw DimensionError("partial_trace_right: dimension is not a power of two >= 2^traced");
  const std::size_t rest = m.rows() / traced_dim;
  ComplexMatrix out(rest, rest);
  for (std::size_t r = 0; r < rest; ++r)
    for (std::size_t c = 0; c < rest; ++c) {
      cplx acc = 0.0;
      for (std::size_t x = 0; x < traced_dim; ++x)
        acc += m(r * traced_dim + x, c * traced_dim + x);
      out(r, c) = acc;
    }
  return out;
}

//==============================================================================
// Numerical predicates
//==============================================================================

struct UnitaryCheck {
  bool unitary = false;
  double residual = 0.0;  // max of ||m^t m - I||_F and ||m m^t - I||_F
};

inline UnitaryCheck is_unitary(const ComplexMatrix& m, double tol = kDefaultTol) {
  if (!m.is_square()) throw DimensionError("is_unitary: matrix not square");
  const std::size_t n = m.rows();
  const ComplexMatrix md = m.dagger();
  double res_left = 0.0, res_right = 0.0;
  {
    const ComplexMatrix g = md * m;
    ComplexMatrix d = g;
    for (std::size_t i = 0; i < n; ++i) d(i, i) -= 1.0;
    res_left = frobenius_norm(d);
  }
  {
    const ComplexMatrix g = m * md;
    ComplexMatrix d = g;
    for (std::size_t i = 0; i < n; ++i) d(i, i) -= 1.0;
    res_right = frobenius_norm(d);
  }
  const double residual = std::max(res_left, res_right);
  return {residual <= tol, residual};
}

struct PsdCheck {
  bool psd = false;
  double min_eigenvalue = 0.0;
};

// Positive-semidefiniteness via Hermitian eigendecomposition. The input must
// be Hermitian up to the tolerance; Choi-path matrices stay below ~4096x4096.
inline PsdCheck is_psd(const ComplexMatrix& m, double tol = kDefaultTol) {
  if (!m.is_square()) throw DimensionError("is_psd: matrix not square");
  const std::size_t n = m.rows();
  double herm_res = 0.0;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = r; c < n; ++c)
      herm_res = std::max(herm_res, std::abs(m(r, c) - std::conj(m(c, r))));
  if (herm_res > std::max(tol, 1e-9) * std::max(1.0, max_abs(m)))
    throw DimensionError("is_psd: matrix is not Hermitian within tolerance");

  Eigen::MatrixXcd h(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      h(r, c) = 0.5 * (m(r, c) + std::conj(m(c, r)));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
  const double min_eig = n == 0 ? 0.0 : solver.eigenvalues().minCoeff();
  return {min_eig >= -tol, min_eig};
}

//==============================================================================
// Factor permutation
//==============================================================================

// Re-indexes rows and columns by a permutation of the tensor factors. The
// factor at new position j is the input factor perm[j].
inline ComplexMatrix permute_subsystems(const ComplexMatrix& m, const SubsystemDims& dims,
                                        const std::vector<std::size_t>& perm) {
  dims.validate_against(m);
  const std::size_t k = dims.dims.size();
  if (perm.size() != k) throw DimensionError("permute_subsystems: permutation length mismatch");
  {
    std::vector<bool> seen(k, false);
    for (std::size_t p : perm) {
      if (p >= k || seen[p]) throw DimensionError("permute_subsystems: invalid permutation");
      seen[p] = true;
    }
  }

  // old_strides[f]: stride of factor f in the input index.
  std::vector<std::size_t> old_strides(k, 1);
  for (std::size_t f = k; f-- > 1;) old_strides[f - 1] = old_strides[f] * dims.dims[f];

  const std::size_t dim = m.rows();
  std::vector<std::size_t> old_of_new(dim);
  for (std::size_t idx = 0; idx < dim; ++idx) {
    // Decompose idx in the new factor order, accumulate the old index.
    std::size_t rem = idx, old_idx = 0;
    std::size_t block = dim;
    for (std::size_t j = 0; j < k; ++j) {
      const std::size_t dj = dims.dims[perm[j]];
      block /= dj;
      const std::size_t digit = rem / block;
      rem %= block;
      old_idx += digit * old_strides[perm[j]];
    }
    old_of_new[idx] = old_idx;
  }

  ComplexMatrix out(dim, dim);
  for (std::size_t r = 0; r < dim; ++r) {
    const std::size_t ro = old_of_new[r];
    for (std::size_t c = 0; c < dim; ++c) out(r, c) = m(ro, old_of_new[c]);
  }
  return out;
}

inline std::vector<std::size_t> inverse_permutation(const std::vector<std::size_t>& perm) {
  std::vector<std::size_t> inv(perm.size());
  for (std::size_t j = 0; j < perm.size(); ++j) inv[perm[j]] = j;
  return inv;
}

}  // namespace uctc

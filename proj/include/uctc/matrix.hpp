#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "uctc/errors.hpp"

namespace uctc {

using cplx = std::complex<double>;

// Default tolerance for all numerical predicates; callers may override.
inline constexpr double kDefaultTol = 1e-10;

//==============================================================================
// Basis-index convention
//
// Qubit 0 is the leftmost tensor factor and the MOST significant bit of a
// basis index. Every index computation in the library goes through these two
// helpers -- the process-matrix constructions are ordering-sensitive, so the
// convention lives in exactly one place.
//==============================================================================

inline int basis_bit(std::uint64_t index, int width, int qubit) {
  return static_cast<int>((index >> (width - 1 - qubit)) & 1u);
}

inline std::uint64_t basis_bit_mask(int width, int qubit) {
  return std::uint64_t{1} << (width - 1 - qubit);
}

//==============================================================================
// ComplexMatrix
//==============================================================================

// Dense complex matrix in row-major order. The universal carrier for states,
// unitaries, Choi matrices and traced blocks.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
      : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_)
      throw DimensionError("entry count does not match rows*cols");
  }

  static ComplexMatrix identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static ComplexMatrix zero(std::size_t rows, std::size_t cols) {
    return ComplexMatrix(rows, cols);
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }
  bool empty() const { return data_.empty(); }

  cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  cplx* data() { return data_.data(); }
  const cplx* data() const { return data_.data(); }

  ComplexMatrix dagger() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
    return out;
  }

  ComplexMatrix transpose() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
    return out;
  }

  cplx trace() const {
    if (!is_square()) throw DimensionError("trace of non-square matrix");
    cplx t = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
  }

  bool all_finite() const {
    for (const cplx& v : data_)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
  }

  ComplexMatrix& operator+=(const ComplexMatrix& o) {
    require_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }

  ComplexMatrix& operator-=(const ComplexMatrix& o) {
    require_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }

  ComplexMatrix& operator*=(cplx s) {
    for (cplx& v : data_) v *= s;
    return *this;
  }

 private:
  void require_same_shape(const ComplexMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw DimensionError("matrix shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

inline ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
inline ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
inline ComplexMatrix operator*(cplx s, ComplexMatrix m) { return m *= s; }

inline ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("matmul shape mismatch");
  ComplexMatrix c(a.rows(), b.cols());
  const std::size_t n = a.rows(), k_dim = a.cols(), m = b.cols();
  for (std::size_t i = 0; i < n; ++i) {
    cplx* crow = &c(i, 0);
    for (std::size_t k = 0; k < k_dim; ++k) {
      const cplx aik = a(i, k);
      if (aik == cplx{}) continue;
      const cplx* brow = &b(k, 0);
      for (std::size_t j = 0; j < m; ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

inline std::vector<cplx> mat_vec(const ComplexMatrix& m, const std::vector<cplx>& v) {
  if (m.cols() != v.size()) throw DimensionError("matvec shape mismatch");
  std::vector<cplx> out(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    cplx acc = 0.0;
    const cplx* row = &m(r, 0);
    for (std::size_t c = 0; c < v.size(); ++c) acc += row[c] * v[c];
    out[r] = acc;
  }
  return out;
}

// u * v^dagger
inline ComplexMatrix outer(const std::vector<cplx>& u, const std::vector<cplx>& v) {
  ComplexMatrix m(u.size(), v.size());
  for (std::size_t r = 0; r < u.size(); ++r)
    for (std::size_t c = 0; c < v.size(); ++c) m(r, c) = u[r] * std::conj(v[c]);
  return m;
}

inline double frobenius_norm(const ComplexMatrix& m) {
  double acc = 0.0;
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) acc += std::norm(m(r, c));
  return std::sqrt(acc);
}

inline double max_abs(const ComplexMatrix& m) {
  double best = 0.0;
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) best = std::max(best, std::abs(m(r, c)));
  return best;
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError("max_abs_diff shape mismatch");
  double best = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) best = std::max(best, std::abs(a(r, c) - b(r, c)));
  return best;
}

inline double frobenius_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError("frobenius_diff shape mismatch");
  double acc = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) acc += std::norm(a(r, c) - b(r, c));
  return std::sqrt(acc);
}

// Kronecker product; dimensions multiply, (a ⊗ b)[(ra,rb),(ca,cb)] = a*b.
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t ra = 0; ra < a.rows(); ++ra)
    for (std::size_t ca = 0; ca < a.cols(); ++ca) {
      const cplx av = a(ra, ca);
      if (av == cplx{}) continue;
      for (std::size_t rb = 0; rb < b.rows(); ++rb)
        for (std::size_t cb = 0; cb < b.cols(); ++cb)
          out(ra * b.rows() + rb, ca * b.cols() + cb) = av * b(rb, cb);
    }
  return out;
}

inline std::vector<cplx> basis_state(std::uint64_t index, int qubits) {
  std::vector<cplx> v(std::size_t{1} << qubits);
  v[index] = 1.0;
  return v;
}

// Debug dump: {rows, cols, re[], im[]} with row-major entry order.
inline nlohmann::json matrix_to_json(const ComplexMatrix& m) {
  std::vector<double> re, im;
  re.reserve(m.rows() * m.cols());
  im.reserve(m.rows() * m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) {
      re.push_back(m(r, c).real());
      im.push_back(m(r, c).imag());
    }
  return nlohmann::json{{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}, {"im", im}};
}

inline ComplexMatrix matrix_from_json(const nlohmann::json& j) {
  const std::size_t rows = j.at("rows").get<std::size_t>();
  const std::size_t cols = j.at("cols").get<std::size_t>();
  const auto re = j.at("re").get<std::vector<double>>();
  const auto im = j.at("im").get<std::vector<double>>();
  if (re.size() != rows * cols || im.size() != rows * cols)
    throw DimensionError("matrix json entry count mismatch");
  ComplexMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows * cols; ++i)
    m(i / cols, i % cols) = cplx(re[i], im[i]);
  return m;
}

}  // namespace uctc

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "uctc/errors.hpp"
#include "uctc/matrix.hpp"
#include "uctc/tensor.hpp"

namespace uctc {

//==============================================================================
// ChannelRep
//
// A quantum channel in one of several interchangeable forms, with explicit
// qubit counts. Forms are validated on construction; the raw factories exist
// for machinery that must hand back candidate channels that failed a check.
//==============================================================================

enum class ChannelForm { Unitary, Isometry, Kraus, Choi, Depolarizing };

class ChannelRep {
 public:
  ChannelForm form() const { return form_; }
  int in_qubits() const { return in_qubits_; }
  int out_qubits() const { return out_qubits_; }
  bool verified() const { return verified_; }

  std::size_t in_dim() const { return std::size_t{1} << in_qubits_; }
  std::size_t out_dim() const { return std::size_t{1} << out_qubits_; }

  const ComplexMatrix& unitary_matrix() const { return u_; }
  int ancilla_qubits() const { return ancilla_; }
  const std::vector<ComplexMatrix>& kraus_list() const { return kraus_; }
  const ComplexMatrix& choi_matrix() const { return choi_; }
  double depolarizing_p() const { return depol_p_; }

  //--- factories --------------------------------------------------------

  static ChannelRep unitary(ComplexMatrix u, double tol = kDefaultTol) {
    if (!u.is_square()) throw DimensionError("unitary channel matrix must be square");
    const int q = qubits_of_dim(u.rows());
    if (!is_unitary(u, tol).unitary)
      throw ValidationError("channel matrix is not unitary within tolerance");
    ChannelRep c;
    c.form_ = ChannelForm::Unitary;
    c.in_qubits_ = c.out_qubits_ = q;
    c.u_ = std::move(u);
    c.verified_ = true;
    return c;
  }

  // rho |-> U (rho (x) |0^k><0^k|) U^dagger with U unitary on in+k qubits.
  static ChannelRep isometry(ComplexMatrix u, int ancilla_qubits, double tol = kDefaultTol) {
    if (!u.is_square()) throw DimensionError("isometry base matrix must be square");
    if (ancilla_qubits < 0) throw DimensionError("negative ancilla count");
    const int total = qubits_of_dim(u.rows());
    if (total < ancilla_qubits) throw DimensionError("ancilla count exceeds matrix width");
    if (!is_unitary(u, tol).unitary)
      throw ValidationError("isometry base matrix is not unitary within tolerance");
    ChannelRep c;
    c.form_ = ChannelForm::Isometry;
    c.in_qubits_ = total - ancilla_qubits;
    c.out_qubits_ = total;
    c.ancilla_ = ancilla_qubits;
    c.u_ = std::move(u);
    c.verified_ = true;
    return c;
  }

  static ChannelRep kraus(std::vector<ComplexMatrix> operators, int in_qubits, int out_qubits,
                          double tol = kDefaultTol) {
    ChannelRep c = kraus_raw(std::move(operators), in_qubits, out_qubits);
    const double res = c.kraus_completeness_residual();
    if (res > tol)
      throw ValidationError("Kraus operators are not trace preserving (residual " +
                            std::to_string(res) + ")");
    c.verified_ = true;
    return c;
  }

  // Unchecked Kraus list, flagged unverified.
  static ChannelRep kraus_raw(std::vector<ComplexMatrix> operators, int in_qubits,
                              int out_qubits) {
    if (operators.empty()) throw ValidationError("Kraus list must be non-empty");
    for (const ComplexMatrix& k : operators)
      if (k.rows() != (std::size_t{1} << out_qubits) || k.cols() != (std::size_t{1} << in_qubits))
        throw DimensionError("Kraus operator shape mismatch");
    ChannelRep c;
    c.form_ = ChannelForm::Kraus;
    c.in_qubits_ = in_qubits;
    c.out_qubits_ = out_qubits;
    c.kraus_ = std::move(operators);
    c.verified_ = false;
    return c;
  }

  static ChannelRep choi(ComplexMatrix m, int in_qubits, int out_qubits, bool verified = false) {
    if (!m.is_square() || m.rows() != (std::size_t{1} << (in_qubits + out_qubits)))
      throw DimensionError("Choi matrix dimension mismatch");
    ChannelRep c;
    c.form_ = ChannelForm::Choi;
    c.in_qubits_ = in_qubits;
    c.out_qubits_ = out_qubits;
    c.choi_ = std::move(m);
    c.verified_ = verified;
    return c;
  }

  // Global depolarizing on q qubits: rho |-> (1-p) rho + p tr(rho) I / 2^q.
  // Kept structural because its Choi has rank 4^q.
  static ChannelRep depolarizing(double p, int qubits) {
    if (p < 0.0 || p > 1.0) throw ValidationError("depolarizing probability out of [0,1]");
    ChannelRep c;
    c.form_ = ChannelForm::Depolarizing;
    c.in_qubits_ = c.out_qubits_ = qubits;
    c.depol_p_ = p;
    c.verified_ = true;
    return c;
  }

  //--- structure --------------------------------------------------------

  // The single operator V with action rho |-> V rho V^dagger, for the
  // Unitary/Isometry forms. V[f, x] = U[f, x * 2^k] (input padded with |0^k>).
  ComplexMatrix isometry_matrix() const {
    if (form_ == ChannelForm::Unitary) return u_;
    if (form_ != ChannelForm::Isometry)
      throw ValidationError("channel has no single-operator form");
    const std::size_t pad = std::size_t{1} << ancilla_;
    ComplexMatrix v(out_dim(), in_dim());
    for (std::size_t f = 0; f < out_dim(); ++f)
      for (std::size_t x = 0; x < in_dim(); ++x) v(f, x) = u_(f, x * pad);
    return v;
  }

  double kraus_completeness_residual() const {
    ComplexMatrix acc(in_dim(), in_dim());
    for (const ComplexMatrix& k : kraus_) acc += k.dagger() * k;
    for (std::size_t i = 0; i < in_dim(); ++i) acc(i, i) -= 1.0;
    return frobenius_norm(acc);
  }

  //--- action -----------------------------------------------------------

  ComplexMatrix apply_density(const ComplexMatrix& rho) const {
    if (!rho.is_square() || rho.rows() != in_dim())
      throw DimensionError("density matrix dimension does not match channel input");
    switch (form_) {
      case ChannelForm::Unitary:
        return u_ * rho * u_.dagger();
      case ChannelForm::Isometry: {
        const ComplexMatrix v = isometry_matrix();
        return v * rho * v.dagger();
      }
      case ChannelForm::Kraus: {
        ComplexMatrix out(out_dim(), out_dim());
        for (const ComplexMatrix& k : kraus_) out += k * rho * k.dagger();
        return out;
      }
      case ChannelForm::Choi: {
        // C(X)[a,b] = sum_{x,y} X[x,y] * M[(x,a),(y,b)]
        ComplexMatrix out(out_dim(), out_dim());
        const std::size_t di = in_dim(), dz = out_dim();
        for (std::size_t a = 0; a < dz; ++a)
          for (std::size_t b = 0; b < dz; ++b) {
            cplx acc = 0.0;
            for (std::size_t x = 0; x < di; ++x)
              for (std::size_t y = 0; y < di; ++y)
                acc += rho(x, y) * choi_(x * dz + a, y * dz + b);
            out(a, b) = acc;
          }
        return out;
      }
      case ChannelForm::Depolarizing: {
        ComplexMatrix out = rho;
        out *= cplx(1.0 - depol_p_, 0.0);
        const cplx mixed = depol_p_ * rho.trace() / static_cast<double>(in_dim());
        for (std::size_t i = 0; i < in_dim(); ++i) out(i, i) += mixed;
        return out;
      }
    }
    throw ValidationError("unreachable channel form");
  }

  // Pure-state action, available only for forms that keep pure states pure.
  bool preserves_purity() const {
    return form_ == ChannelForm::Unitary || form_ == ChannelForm::Isometry ||
           (form_ == ChannelForm::Depolarizing && depol_p_ == 0.0);
  }

  std::vector<cplx> apply_state(const std::vector<cplx>& psi) const {
    if (psi.size() != in_dim())
      throw DimensionError("state dimension does not match channel input");
    switch (form_) {
      case ChannelForm::Unitary:
        return mat_vec(u_, psi);
      case ChannelForm::Isometry:
        return mat_vec(isometry_matrix(), psi);
      case ChannelForm::Depolarizing:
        if (depol_p_ == 0.0) return psi;
        [[fallthrough]];
      default:
        throw ValidationError("channel does not preserve purity; apply to a density matrix");
    }
  }

 private:
  static int qubits_of_dim(std::size_t dim) {
    int q = 0;
    while ((std::size_t{1} << q) < dim) ++q;
    if ((std::size_t{1} << q) != dim)
      throw DimensionError("matrix dimension is not a power of two");
    return q;
  }

  ChannelForm form_ = ChannelForm::Unitary;
  int in_qubits_ = 0;
  int out_qubits_ = 0;
  int ancilla_ = 0;
  ComplexMatrix u_;
  std::vector<ComplexMatrix> kraus_;
  ComplexMatrix choi_;
  double depol_p_ = 0.0;
  bool verified_ = false;
};

}  // namespace uctc

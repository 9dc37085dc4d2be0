#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "uctc/channel.hpp"
#include "uctc/circuit.hpp"
#include "uctc/errors.hpp"
#include "uctc/matrix.hpp"
#include "uctc/tensor.hpp"

namespace uctc {

// Total-width cap for the dense Choi route (Choi dimension 2^{2*6} = 4096).
// Beyond it only the traced-matrix route runs.
inline constexpr int kFullCjQubitCap = 6;

//==============================================================================
// Double kets and the CJ isomorphism
//
// Tensor-factor bookkeeping: the CJ matrix of a channel L(H_in) -> L(H_out)
// carries the input factor on the LEFT (most significant index block) and the
// output factor on the right. For a circuit channel on (A_I (x) P) ->
// (A_O (x) F) the CJ layout is therefore A_I (x) P (x) A_O (x) F, which is
// exactly the layout the indefinite operator expects. A permutation
// round-trip test pins this down.
//==============================================================================

// ||M>> = sum_x |x> (x) M|x> for M of shape 2^out x 2^in; dimension 2^{in+out}.
inline std::vector<cplx> double_ket(const ComplexMatrix& m) {
  const std::size_t in_dim = m.cols();
  const std::size_t out_dim = m.rows();
  std::vector<cplx> v(in_dim * out_dim);
  for (std::size_t x = 0; x < in_dim; ++x)
    for (std::size_t f = 0; f < out_dim; ++f) v[x * out_dim + f] = m(f, x);
  return v;
}

// CJ of the pair (M, k): the linear map sigma |-> V sigma V^dagger with
// V = M . (I (x) |0^k>), M square on r+k qubits. M need not be unitary; this
// is the right-hand side of the traced-matrix evaluation rule.
inline ComplexMatrix cj_isometry_pair(const ComplexMatrix& m, int ancilla_qubits) {
  if (!m.is_square()) throw DimensionError("cj_isometry_pair: matrix must be square");
  const std::size_t out_dim = m.rows();
  const std::size_t pad = std::size_t{1} << ancilla_qubits;
  if (out_dim % pad != 0) throw DimensionError("cj_isometry_pair: ancilla count too large");
  const std::size_t in_dim = out_dim / pad;
  ComplexMatrix v(out_dim, in_dim);
  for (std::size_t f = 0; f < out_dim; ++f)
    for (std::size_t x = 0; x < in_dim; ++x) v(f, x) = m(f, x * pad);
  const std::vector<cplx> dk = double_ket(v);
  return outer(dk, dk);
}

// CJ(C) = sum_{x,y} |x><y| (x) C(|x><y|). Dense path; capped at 6 input
// qubits and a 4096-dimensional Choi.
inline ComplexMatrix cj(const ChannelRep& channel) {
  if (channel.in_qubits() > kFullCjQubitCap ||
      channel.in_qubits() + channel.out_qubits() > 2 * kFullCjQubitCap)
    throw ResourceError("channel too large for the dense CJ path");
  const std::size_t di = channel.in_dim();
  const std::size_t dz = channel.out_dim();
  switch (channel.form()) {
    case ChannelForm::Unitary:
    case ChannelForm::Isometry: {
      const std::vector<cplx> dk = double_ket(channel.isometry_matrix());
      return outer(dk, dk);
    }
    case ChannelForm::Kraus: {
      ComplexMatrix w(di * dz, di * dz);
      for (const ComplexMatrix& k : channel.kraus_list()) {
        const std::vector<cplx> dk = double_ket(k);
        w += outer(dk, dk);
      }
      return w;
    }
    case ChannelForm::Choi:
      return channel.choi_matrix();
    case ChannelForm::Depolarizing: {
      // (1-p) ||I>><<I|| + (p/d) I_{d^2}
      const double p = channel.depolarizing_p();
      const std::vector<cplx> dk = double_ket(ComplexMatrix::identity(di));
      ComplexMatrix w = outer(dk, dk);
      w *= cplx(1.0 - p, 0.0);
      const double mixed = p / static_cast<double>(di);
      for (std::size_t i = 0; i < di * dz; ++i) w(i, i) += mixed;
      return w;
    }
  }
  throw ValidationError("unreachable channel form");
}

//==============================================================================
// Inverse CJ
//==============================================================================

// The inverse CJ transformation of (M, H0, H1), returned as an applicable
// map. Needs the factor split spelled out because a given matrix dimension
// decomposes in several ways.
class CjInverseMap {
 public:
  CjInverseMap(ComplexMatrix choi, int in_qubits, int out_qubits)
      : choi_(std::move(choi)), in_qubits_(in_qubits), out_qubits_(out_qubits) {
    if (!choi_.is_square() ||
        choi_.rows() != (std::size_t{1} << (in_qubits_ + out_qubits_)))
      throw DimensionError("inverse CJ: matrix dimension does not match factor split");
  }

  int in_qubits() const { return in_qubits_; }
  int out_qubits() const { return out_qubits_; }
  const ComplexMatrix& choi() const { return choi_; }

  // X |-> tr_{H0}((X^T (x) I) . M). Recovers C(X) when M = CJ(C); the
  // transpose pairs the trace's bra/ket indices with CJ's |x><y| blocks.
  ComplexMatrix apply(const ComplexMatrix& x) const {
    const std::size_t di = std::size_t{1} << in_qubits_;
    const std::size_t dz = std::size_t{1} << out_qubits_;
    if (!x.is_square() || x.rows() != di)
      throw DimensionError("inverse CJ: input operator dimension mismatch");
    ComplexMatrix out(dz, dz);
    for (std::size_t a = 0; a < dz; ++a)
      for (std::size_t b = 0; b < dz; ++b) {
        cplx acc = 0.0;
        for (std::size_t p = 0; p < di; ++p)
          for (std::size_t q = 0; q < di; ++q)
            acc += x(p, q) * choi_(p * dz + a, q * dz + b);
        out(a, b) = acc;
      }
    return out;
  }

  // Dense superoperator with row-major vectorization:
  // vec(C(X))[a*dz+b] = sum S[a*dz+b, p*di+q] vec(X)[p*di+q].
  ComplexMatrix dense_superop() const {
    const std::size_t di = std::size_t{1} << in_qubits_;
    const std::size_t dz = std::size_t{1} << out_qubits_;
    ComplexMatrix s(dz * dz, di * di);
    for (std::size_t a = 0; a < dz; ++a)
      for (std::size_t b = 0; b < dz; ++b)
        for (std::size_t p = 0; p < di; ++p)
          for (std::size_t q = 0; q < di; ++q)
            s(a * dz + b, p * di + q) = choi_(p * dz + a, q * dz + b);
    return s;
  }

 private:
  ComplexMatrix choi_;
  int in_qubits_;
  int out_qubits_;
};

inline CjInverseMap cj_inverse(ComplexMatrix m, int in_qubits, int out_qubits) {
  return CjInverseMap(std::move(m), in_qubits, out_qubits);
}

//==============================================================================
// Indefinite operator
//==============================================================================

// G = tr_{A_I, A_O}(W . |A_I,P,F><A_I,P,F|) on the factor layout
// A_I(n) (x) P(r) (x) A_O(n) (x) F(l). The identity-padded projector's two
// Kronecker deltas are contracted symbolically:
//   G[(p,f),(p',f')] = sum_{t,x} W[(t,p,t,f), (x,p',x,f')].
// A unit test checks this against the fully literal dense route.
inline ComplexMatrix indefinite_operator(const ComplexMatrix& w, int n, int r, int l) {
  if (n < 0 || r < 0 || l < 0) throw DimensionError("indefinite_operator: negative factor size");
  const std::size_t dim = std::size_t{1} << (2 * n + r + l);
  if (!w.is_square() || w.rows() != dim)
    throw DimensionError("indefinite_operator: matrix does not match factor layout");
  const std::size_t dn = std::size_t{1} << n;
  const std::size_t dr = std::size_t{1} << r;
  const std::size_t dl = std::size_t{1} << l;
  const auto index = [&](std::size_t a, std::size_t p, std::size_t b, std::size_t f) {
    return ((a * dr + p) * dn + b) * dl + f;
  };
  ComplexMatrix g(dr * dl, dr * dl);
  for (std::size_t p = 0; p < dr; ++p)
    for (std::size_t f = 0; f < dl; ++f)
      for (std::size_t pp = 0; pp < dr; ++pp)
        for (std::size_t ff = 0; ff < dl; ++ff) {
          cplx acc = 0.0;
          for (std::size_t t = 0; t < dn; ++t) {
            const std::size_t row = index(t, p, t, f);
            for (std::size_t x = 0; x < dn; ++x) acc += w(row, index(x, pp, x, ff));
          }
          g(p * dl + f, pp * dl + ff) = acc;
        }
  return g;
}

//==============================================================================
// CPTP predicate
//==============================================================================

struct CptpCheck {
  bool cptp = false;
  double psd_min_eig = 0.0;
  double tp_residual = 0.0;
};

inline CptpCheck is_cptp(const ChannelRep& channel, double tol = kDefaultTol) {
  if (channel.form() == ChannelForm::Depolarizing &&
      channel.in_qubits() + channel.out_qubits() > 2 * kFullCjQubitCap) {
    // Choi spectrum in closed form: p/d with multiplicity d^2-1 and
    // (1-p)d + p/d on the maximally entangled direction.
    const double p = channel.depolarizing_p();
    const double d = static_cast<double>(channel.in_dim());
    const double min_eig = std::min(p / d, (1.0 - p) * d + p / d);
    return {min_eig >= -tol, min_eig, 0.0};
  }
  const ComplexMatrix choi = cj(channel);
  const PsdCheck psd = is_psd(choi, tol);
  ComplexMatrix reduced = partial_trace_right(choi, channel.out_qubits());
  for (std::size_t i = 0; i < reduced.rows(); ++i) reduced(i, i) -= 1.0;
  const double tp_residual = frobenius_norm(reduced);
  return {psd.psd && tp_residual <= tol, psd.min_eigenvalue, tp_residual};
}

//==============================================================================
// Unitary-channel extraction from a Choi matrix
//==============================================================================

struct ChoiUnitaryPart {
  ComplexMatrix matrix;   // sqrt(top eig) . reshaped eigenvector
  double rank_one_gap;    // ||G - lambda v v^t||_F
  double unitary_residual;
};

// A Choi matrix represents a unitary channel iff it is (numerically) rank one
// with a unitary double-ket factor. Requires a square channel (in == out).
inline ChoiUnitaryPart choi_unitary_part(const ComplexMatrix& g, int in_qubits,
                                         int out_qubits) {
  const std::size_t di = std::size_t{1} << in_qubits;
  const std::size_t dz = std::size_t{1} << out_qubits;
  if (!g.is_square() || g.rows() != di * dz)
    throw DimensionError("choi_unitary_part: dimension mismatch");
  const std::size_t dim = g.rows();
  Eigen::MatrixXcd h(dim, dim);
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) h(r, c) = 0.5 * (g(r, c) + std::conj(g(c, r)));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
  const std::size_t top = dim - 1;  // eigenvalues ascend
  const double lambda = std::max(solver.eigenvalues()(top), 0.0);
  const Eigen::VectorXcd vec = solver.eigenvectors().col(top);

  double gap_sq = 0.0;
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c)
      gap_sq += std::norm(g(r, c) - lambda * vec(r) * std::conj(vec(c)));

  const double scale = std::sqrt(lambda);
  ComplexMatrix m(dz, di);
  for (std::size_t x = 0; x < di; ++x)
    for (std::size_t f = 0; f < dz; ++f) m(f, x) = scale * vec(x * dz + f);

  ChoiUnitaryPart part;
  part.matrix = std::move(m);
  part.rank_one_gap = std::sqrt(gap_sq);
  part.unitary_residual =
      di == dz ? is_unitary(part.matrix, 0.0).residual
               : std::numeric_limits<double>::infinity();
  return part;
}

//==============================================================================
// Process matrix generator queries
//==============================================================================

// A candidate generator query (m, C): trace out the leftmost m qubits of the
// circuit's unitary. `ancilla` > 0 marks the rightmost qubits of the circuit
// as the isometry padding of the Lemma's k-isometry.
struct PmgQuery {
  int traced_qubits = 0;  // m
  CircuitSpec circuit;    // width m + r + k
  int ancilla = 0;        // k

  int p_qubits() const { return circuit.width - traced_qubits - ancilla; }  // r
  int f_qubits() const { return p_qubits() + ancilla; }                     // l = r + k

  void validate() const {
    if (traced_qubits < 1) throw ValidationError("query must trace at least one qubit");
    if (ancilla < 0) throw ValidationError("negative ancilla count");
    if (circuit.width < traced_qubits + 1)
      throw ValidationError("circuit width must be at least m + 1");
    if (p_qubits() < 0) throw ValidationError("ancilla count exceeds circuit width - m");
  }
};

struct ProcessCheckReport {
  bool is_pmg = false;
  bool is_pure_pmg = false;
  double unitarity_residual = 0.0;  // of the traced matrix
  double psd_min_eig = 0.0;
  double tp_residual = 0.0;
  double path_disagreement = 0.0;  // Frobenius, when both paths ran

  nlohmann::json to_json() const {
    return nlohmann::json{{"is_pmg", is_pmg},
                          {"is_pure_pmg", is_pure_pmg},
                          {"unitarity_residual", unitarity_residual},
                          {"psd_min_eig", psd_min_eig},
                          {"tp_residual", tp_residual},
                          {"path_disagreement", path_disagreement}};
  }
};

enum class PmoPath { FullCj, Simplified, Both };

struct PmoResult {
  ChannelRep channel;
  ProcessCheckReport report;
};

namespace detail {

// Whether the circuit induces a unitary channel. Gate lists do by
// construction; basis rules are validated dense up to width 12 and by
// column sampling above (`lean` skips the dense build and always samples).
inline bool circuit_channel_is_unitary(const CircuitSpec& c, bool lean) {
  if (c.is_gate_list()) return true;
  try {
    if (!lean && c.width <= kFullRuleCheckWidth) {
      compile_unitary(c);
    } else {
      validate_rule_sampled(c, 1e-8);
    }
    return true;
  } catch (const ValidationError&) {
    return false;
  }
}

// V_G = U_G . (I_r (x) |0^k>)
inline ComplexMatrix pad_columns(const ComplexMatrix& u_g, int ancilla_qubits) {
  const std::size_t pad = std::size_t{1} << ancilla_qubits;
  const std::size_t out_dim = u_g.rows();
  const std::size_t in_dim = out_dim / pad;
  ComplexMatrix v(out_dim, in_dim);
  for (std::size_t f = 0; f < out_dim; ++f)
    for (std::size_t x = 0; x < in_dim; ++x) v(f, x) = u_g(f, x * pad);
  return v;
}

}  // namespace detail

// Evaluates the candidate process-matrix channel P -> F of a query, with a
// validity report. The simplified path traces the circuit's unitary directly;
// the full path walks the definition (CJ, indefinite operator, inverse CJ)
// and is capped at 6 total qubits.
inline PmoResult pmo(const PmgQuery& q, PmoPath path, double tol = kDefaultTol) {
  q.validate();
  const int m = q.traced_qubits;
  const int r = q.p_qubits();
  const int l = q.f_qubits();
  const int k = q.ancilla;

  ProcessCheckReport report;

  bool ran_simplified = false;
  ComplexMatrix traced;  // U_G
  bool circuit_unitary = false;
  if (path == PmoPath::Simplified || path == PmoPath::Both) {
    ran_simplified = true;
    circuit_unitary = detail::circuit_channel_is_unitary(q.circuit, /*lean=*/false);
    // The traced-matrix shortcut is only sound for unitary/isometry channels.
    if (!circuit_unitary)
      throw ValidationError("traced-matrix path requires a unitary circuit channel");
    traced = traced_block_unitary(q.circuit, m);
    report.unitarity_residual = is_unitary(traced, tol).residual;
  }

  bool ran_full = false;
  ComplexMatrix g_full;
  if (path == PmoPath::FullCj || path == PmoPath::Both) {
    if (q.circuit.width > kFullCjQubitCap)
      throw ResourceError("full-CJ path capped at 6 total qubits");
    ran_full = true;
    const ComplexMatrix u = compile_unitary(q.circuit);
    circuit_unitary = is_unitary(u, tol).unitary;
    const ChannelRep input_channel =
        k == 0 ? ChannelRep::unitary(u, 1.0) : ChannelRep::isometry(u, k, 1.0);
    const ComplexMatrix w = cj(input_channel);
    g_full = indefinite_operator(w, m, r, l);
  }

  if (ran_simplified && ran_full)
    report.path_disagreement = frobenius_diff(g_full, cj_isometry_pair(traced, k));

  // CPTP verdict. On the simplified path the candidate PMO has the single
  // operator V_G, whose Choi is PSD by construction; trace preservation
  // reduces to V_G^t V_G = I.
  ComplexMatrix v_g;
  if (ran_simplified) {
    v_g = detail::pad_columns(traced, k);
    ComplexMatrix gram = v_g.dagger() * v_g;
    for (std::size_t i = 0; i < gram.rows(); ++i) gram(i, i) -= 1.0;
    report.tp_residual = frobenius_norm(gram);
    report.psd_min_eig = 0.0;
    report.is_pmg = report.tp_residual <= tol;
  }
  if (ran_full) {
    const PsdCheck psd = is_psd(g_full, tol);
    ComplexMatrix reduced = partial_trace_right(g_full, l);
    for (std::size_t i = 0; i < reduced.rows(); ++i) reduced(i, i) -= 1.0;
    const double tp_residual = frobenius_norm(reduced);
    report.psd_min_eig = psd.min_eigenvalue;
    report.tp_residual = tp_residual;
    report.is_pmg = psd.psd && tp_residual <= tol;
    if (!ran_simplified) {
      const ChoiUnitaryPart part = choi_unitary_part(g_full, r, l);
      report.unitarity_residual = std::max(part.unitary_residual, part.rank_one_gap);
    }
  }

  // Pure requires a square circuit, a unitary input channel, and a unitary
  // induced channel; isometric queries (k > 0) are never reported pure.
  report.is_pure_pmg =
      k == 0 && circuit_unitary && report.is_pmg && report.unitarity_residual <= tol;

  if (ran_simplified) {
    ChannelRep channel = [&] {
      if (report.is_pure_pmg) return ChannelRep::unitary(traced, tol);
      if (report.is_pmg) return ChannelRep::kraus({v_g}, r, l, tol);
      return ChannelRep::kraus_raw({v_g}, r, l);
    }();
    return {std::move(channel), report};
  }
  return {ChannelRep::choi(std::move(g_full), r, l, report.is_pmg), report};
}

}  // namespace uctc

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "uctc/channel.hpp"
#include "uctc/errors.hpp"
#include "uctc/matrix.hpp"
#include "uctc/pmf.hpp"
#include "uctc/rng.hpp"

namespace uctc {

//==============================================================================
// Adversarial policies
//
// The generator grants the exact traced-matrix channel on valid queries; on
// anything else it may substitute any channel of the right size, silently.
// These policies model that freedom. Channels are sampled non-adaptively:
// the stream is keyed by (adversary seed, query digest), never by history.
//==============================================================================

struct AdversarialPolicy {
  enum class Kind { Identity, FixedPermutation, RandomUnitary, Depolarizing };

  Kind kind = Kind::Identity;
  double depol_p = 1.0;

  static AdversarialPolicy identity() { return {Kind::Identity, 0.0}; }
  static AdversarialPolicy fixed_permutation() { return {Kind::FixedPermutation, 0.0}; }
  static AdversarialPolicy random_unitary() { return {Kind::RandomUnitary, 0.0}; }
  static AdversarialPolicy depolarizing(double p) { return {Kind::Depolarizing, p}; }

  // CLI spelling: identity | perm | random | depol:<p>
  static AdversarialPolicy parse(const std::string& text) {
    if (text == "identity") return identity();
    if (text == "perm") return fixed_permutation();
    if (text == "random") return random_unitary();
    if (text.rfind("depol:", 0) == 0) {
      const double p = std::stod(text.substr(6));
      if (p < 0.0 || p > 1.0) throw ValidationError("depolarizing probability out of [0,1]");
      return depolarizing(p);
    }
    throw ValidationError("unknown policy '" + text + "'");
  }

  std::string name() const {
    switch (kind) {
      case Kind::Identity: return "identity";
      case Kind::FixedPermutation: return "perm";
      case Kind::RandomUnitary: return "random";
      case Kind::Depolarizing: return "depol:" + std::to_string(depol_p);
    }
    return "?";
  }
};

//==============================================================================
// Generator
//==============================================================================

// What a generation query hands back. The validity flag exists for test
// introspection only -- the generator gives the caller no failure signal, and
// solver code must never branch on it.
struct CtcHandle {
  ChannelRep channel;
  bool was_valid_pure_pmg = false;
  std::int64_t query_cost = 0;
};

namespace detail {

inline std::uint64_t query_digest(const PmgQuery& q) {
  std::uint64_t h = fnv1a64(q.circuit.tag);
  h = mix64(h ^ static_cast<std::uint64_t>(q.traced_qubits));
  h = mix64(h ^ static_cast<std::uint64_t>(q.circuit.width));
  h = mix64(h ^ static_cast<std::uint64_t>(q.circuit.cost));
  if (q.circuit.is_gate_list())
    for (const Gate& g : q.circuit.gates()) {
      h = mix64(h ^ static_cast<std::uint64_t>(g.kind));
      for (int i = 0; i < g.num_targets; ++i)
        h = mix64(h ^ static_cast<std::uint64_t>(g.targets[i]));
    }
  return h;
}

// Seeded Haar-distributed unitary: complex Ginibre matrix, QR, phase-fixed R
// diagonal.
inline ComplexMatrix haar_unitary(std::size_t dim, Rng& rng) {
  Eigen::MatrixXcd a(dim, dim);
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) a(r, c) = cplx(rng.gauss(), rng.gauss());
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd r_mat = qr.matrixQR().triangularView<Eigen::Upper>();
  for (std::size_t j = 0; j < dim; ++j) {
    const cplx d = r_mat(j, j);
    const double mag = std::abs(d);
    q.col(j) *= mag > 0.0 ? d / mag : cplx(1.0, 0.0);
  }
  ComplexMatrix out(dim, dim);
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) out(r, c) = q(r, c);
  return out;
}

inline ComplexMatrix seeded_permutation_matrix(std::size_t dim, Rng& rng) {
  std::vector<std::size_t> image(dim);
  for (std::size_t i = 0; i < dim; ++i) image[i] = i;
  for (std::size_t i = dim; i-- > 1;) {
    const std::size_t j = rng.uniform_int(i + 1);
    std::swap(image[i], image[j]);
  }
  ComplexMatrix p(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) p(image[i], i) = 1.0;
  return p;
}

inline ChannelRep adversarial_channel(const AdversarialPolicy& policy, int qubits,
                                      std::uint64_t stream_seed) {
  const std::size_t dim = std::size_t{1} << qubits;
  switch (policy.kind) {
    case AdversarialPolicy::Kind::Identity:
      return ChannelRep::unitary(ComplexMatrix::identity(dim));
    case AdversarialPolicy::Kind::FixedPermutation: {
      Rng rng(stream_seed);
      return ChannelRep::unitary(seeded_permutation_matrix(dim, rng));
    }
    case AdversarialPolicy::Kind::RandomUnitary: {
      Rng rng(stream_seed);
      return ChannelRep::unitary(haar_unitary(dim, rng), 1e-8);
    }
    case AdversarialPolicy::Kind::Depolarizing:
      return ChannelRep::depolarizing(policy.depol_p, qubits);
  }
  throw ValidationError("unreachable policy kind");
}

// Pure-PMG determination on the traced-matrix route, with an early reject on
// column norms before the full residual: any diagonal deviation of V^t V
// already lower-bounds the Frobenius residual.
inline bool query_is_pure_pmg(const PmgQuery& q, ComplexMatrix& traced, double tol) {
  if (!detail::circuit_channel_is_unitary(q.circuit, /*lean=*/true)) return false;
  traced = traced_block_unitary(q.circuit, q.traced_qubits);
  const std::size_t dim = traced.rows();
  for (std::size_t c = 0; c < dim; ++c) {
    double norm2 = 0.0;
    for (std::size_t r = 0; r < dim; ++r) norm2 += std::norm(traced(r, c));
    if (std::abs(norm2 - 1.0) > tol) return false;
  }
  return is_unitary(traced, tol).unitary;
}

}  // namespace detail

// The unitary CTC generation query. Valid pure-PMG queries get the exact
// traced-matrix channel regardless of policy and seed; invalid queries get
// the policy's substitute with no indication of failure.
inline CtcHandle generate(const PmgQuery& q, const AdversarialPolicy& policy,
                          std::uint64_t adversary_seed, double tol = kDefaultTol) {
  q.validate();
  if (q.ancilla != 0)
    throw ValidationError("unitary CTC generator takes square (m+r)-to-(m+r) circuits only");

  ComplexMatrix traced;
  if (detail::query_is_pure_pmg(q, traced, tol))
    return {ChannelRep::unitary(std::move(traced), tol), true, q.circuit.cost};

  const std::uint64_t stream =
      substream(adversary_seed, "ctc-adversary", detail::query_digest(q));
  return {detail::adversarial_channel(policy, q.p_qubits(), stream), false, q.circuit.cost};
}

//==============================================================================
// Channel application
//==============================================================================

// Output of pushing a state through a handle's channel; collapses to a
// density matrix only when the channel does not preserve purity.
struct AppliedState {
  bool pure = false;
  std::vector<cplx> vec;  // when pure
  ComplexMatrix density;  // otherwise

  std::size_t dim() const { return pure ? vec.size() : density.rows(); }
};

inline AppliedState apply(const CtcHandle& handle, const std::vector<cplx>& psi) {
  if (psi.size() != handle.channel.in_dim())
    throw DimensionError("state dimension does not match channel");
  if (handle.channel.preserves_purity()) {
    AppliedState out;
    out.pure = true;
    out.vec = handle.channel.apply_state(psi);
    return out;
  }
  AppliedState out;
  out.pure = false;
  out.density = handle.channel.apply_density(outer(psi, psi));
  return out;
}

inline AppliedState apply(const CtcHandle& handle, const ComplexMatrix& rho) {
  if (rho.rows() != handle.channel.in_dim())
    throw DimensionError("state dimension does not match channel");
  AppliedState out;
  out.pure = false;
  out.density = handle.channel.apply_density(rho);
  return out;
}

// Computational-basis measurement, sampled from the caller's stream. Basis
// states measure deterministically; soundness downstream never relies on the
// sample.
inline std::uint64_t measure(const AppliedState& state, Rng& rng) {
  const std::size_t dim = state.dim();
  std::vector<double> probs(dim);
  double total = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    probs[i] = state.pure ? std::norm(state.vec[i]) : std::max(state.density(i, i).real(), 0.0);
    total += probs[i];
  }
  if (total <= 0.0) return 0;
  const double draw = rng.uniform() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    acc += probs[i];
    if (draw < acc) return i;
  }
  return dim - 1;
}

}  // namespace uctc

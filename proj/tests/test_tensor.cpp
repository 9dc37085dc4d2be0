#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "uctc/circuit.hpp"
#include "uctc/matrix.hpp"
#include "uctc/pmf.hpp"
#include "uctc/tensor.hpp"

#include "test_helpers.hpp"

using namespace uctc;

namespace {

ComplexMatrix pauli_x() {
  ComplexMatrix m(2, 2);
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  return m;
}

}  // namespace

TEST_CASE("kron identity and projector structure", "[tensor]") {
  const ComplexMatrix i2 = ComplexMatrix::identity(2);
  REQUIRE(max_abs_diff(kron(i2, i2), ComplexMatrix::identity(4)) == 0.0);

  ComplexMatrix proj0(2, 2);
  proj0(0, 0) = 1.0;
  const ComplexMatrix block = kron(proj0, pauli_x());
  ComplexMatrix expected(4, 4);
  expected(0, 1) = 1.0;
  expected(1, 0) = 1.0;
  REQUIRE(max_abs_diff(block, expected) == 0.0);
}

TEST_CASE("kron against an independent index-arithmetic oracle", "[tensor]") {
  // Entrywise scalar loop, no shared code with kron().
  const ComplexMatrix a = rhalf_matrix();
  const ComplexMatrix b = ComplexMatrix::identity(2);
  const ComplexMatrix k = kron(a, b);
  REQUIRE(k.rows() == 4);
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) {
      const cplx expected = a(r / 2, c / 2) * b(r % 2, c % 2);
      REQUIRE(std::abs(k(r, c) - expected) == 0.0);
    }
}

TEST_CASE("kron is associative", "[tensor]") {
  // Exact equality on dyadic entries, where scalar products do not round.
  ComplexMatrix a(2, 2), b(2, 2), c(2, 2);
  a(0, 0) = 0.5;
  a(0, 1) = cplx(0.0, -0.25);
  a(1, 0) = -1.0;
  a(1, 1) = 2.0;
  b(0, 0) = cplx(0.25, 0.5);
  b(1, 1) = -0.5;
  c(0, 1) = 1.0;
  c(1, 0) = cplx(0.0, 0.125);
  REQUIRE(max_abs_diff(kron(kron(a, b), c), kron(a, kron(b, c))) == 0.0);

  Rng rng(11);
  const ComplexMatrix x = testutil::random_matrix(2, 2, rng);
  const ComplexMatrix y = testutil::random_matrix(2, 3, rng);
  const ComplexMatrix z = testutil::random_matrix(3, 2, rng);
  REQUIRE(max_abs_diff(kron(kron(x, y), z), kron(x, kron(y, z))) <= 1e-12);
}

TEST_CASE("partial_trace_left of identity", "[tensor]") {
  const ComplexMatrix out = partial_trace_left(ComplexMatrix::identity(1 << 5), 2);
  ComplexMatrix expected = ComplexMatrix::identity(8);
  expected *= cplx(4.0, 0.0);
  REQUIRE(max_abs_diff(out, expected) == 0.0);
}

TEST_CASE("partial_trace_left of a product is tr(A) . B", "[tensor]") {
  Rng rng(22);
  for (int n = 1; n <= 2; ++n) {
    const std::size_t da = std::size_t{1} << n;
    const ComplexMatrix a = testutil::random_matrix(da, da, rng);
    const ComplexMatrix b = testutil::random_matrix(4, 4, rng);

    // Independent oracle: scalar trace computed by its own loop, times B.
    cplx tr = 0.0;
    for (std::size_t i = 0; i < da; ++i) tr += a(i, i);
    ComplexMatrix expected = b;
    expected *= tr;

    REQUIRE(max_abs_diff(partial_trace_left(kron(a, b), n), expected) <= 1e-12);
  }
}

TEST_CASE("partial_trace_left is linear", "[tensor]") {
  Rng rng(33);
  const ComplexMatrix m = testutil::random_matrix(8, 8, rng);
  const ComplexMatrix n = testutil::random_matrix(8, 8, rng);
  const cplx alpha(0.3, -1.2), beta(-0.7, 0.4);
  ComplexMatrix combo = m;
  combo *= alpha;
  ComplexMatrix nb = n;
  nb *= beta;
  combo += nb;
  ComplexMatrix expected = partial_trace_left(m, 1);
  expected *= alpha;
  ComplexMatrix nt = partial_trace_left(n, 1);
  nt *= beta;
  expected += nt;
  REQUIRE(max_abs_diff(partial_trace_left(combo, 1), expected) <= 1e-12);
}

TEST_CASE("partial_trace_left rejects bad dimensions", "[tensor]") {
  REQUIRE_THROWS_AS(partial_trace_left(ComplexMatrix(3, 3), 1), DimensionError);
  REQUIRE_THROWS_AS(partial_trace_left(ComplexMatrix(2, 4), 1), DimensionError);
  REQUIRE_THROWS_AS(partial_trace_left(ComplexMatrix::identity(4), 3), DimensionError);
}

TEST_CASE("is_unitary on the rotation, the zero matrix, and XOR permutations", "[tensor]") {
  const UnitaryCheck rot = is_unitary(rhalf_matrix(), 1e-12);
  REQUIRE(rot.unitary);
  REQUIRE_THROWS_AS(is_unitary(ComplexMatrix(2, 3)), DimensionError);

  const UnitaryCheck zero = is_unitary(ComplexMatrix(4, 4), 1e-12);
  REQUIRE_FALSE(zero.unitary);
  REQUIRE(zero.residual == Catch::Approx(2.0));  // sqrt(dim) with dim 4

  for (std::uint64_t z : {0ull, 3ull, 5ull}) {
    const ComplexMatrix perm = testutil::xor_matrix(z, 3);
    // Column-norm oracle: a permutation matrix has exactly one unit entry
    // per column.
    for (std::size_t c = 0; c < 8; ++c) {
      int ones = 0;
      for (std::size_t r = 0; r < 8; ++r)
        if (std::abs(perm(r, c)) > 0.5) ++ones;
      REQUIRE(ones == 1);
    }
    REQUIRE(is_unitary(perm, 1e-12).unitary);
  }
}

TEST_CASE("is_psd basics", "[tensor]") {
  ComplexMatrix proj0(2, 2);
  proj0(0, 0) = 1.0;
  const PsdCheck ok = is_psd(proj0, 1e-10);
  REQUIRE(ok.psd);
  REQUIRE(std::abs(ok.min_eigenvalue) <= 1e-12);

  ComplexMatrix indef(2, 2);
  indef(0, 0) = 1.0;
  indef(1, 1) = -0.5;
  const PsdCheck bad = is_psd(indef, 1e-10);
  REQUIRE_FALSE(bad.psd);
  REQUIRE(bad.min_eigenvalue == Catch::Approx(-0.5));

  ComplexMatrix skew(2, 2);
  skew(0, 1) = 1.0;
  REQUIRE_THROWS_AS(is_psd(skew, 1e-10), DimensionError);
}

TEST_CASE("is_psd holds on the Choi matrix of a random Kraus channel", "[tensor]") {
  Rng rng(44);
  const ChannelRep channel = testutil::random_kraus_channel(1, 1, rng);
  const ComplexMatrix choi = cj(channel);
  REQUIRE(is_psd(choi, 1e-10).psd);
}

TEST_CASE("permute_subsystems identity and involution", "[tensor]") {
  Rng rng(55);
  const ComplexMatrix m = testutil::random_matrix(8, 8, rng);
  const SubsystemDims dims{{2, 2, 2}};

  REQUIRE(max_abs_diff(permute_subsystems(m, dims, {0, 1, 2}), m) == 0.0);

  const std::vector<std::size_t> swap01{1, 0, 2};
  const ComplexMatrix once = permute_subsystems(m, dims, swap01);
  REQUIRE(max_abs_diff(permute_subsystems(once, dims, swap01), m) == 0.0);
}

TEST_CASE("permute_subsystems swaps tensor factors", "[tensor]") {
  Rng rng(66);
  const ComplexMatrix a = testutil::random_matrix(2, 2, rng);
  const ComplexMatrix b = testutil::random_matrix(4, 4, rng);
  const ComplexMatrix ab = kron(a, b);
  const ComplexMatrix swapped = permute_subsystems(ab, SubsystemDims{{2, 4}}, {1, 0});
  REQUIRE(max_abs_diff(swapped, kron(b, a)) == 0.0);
}

TEST_CASE("permute_subsystems composed with its inverse is exact identity", "[tensor]") {
  Rng rng(77);
  const ComplexMatrix m = testutil::random_matrix(16, 16, rng);
  const SubsystemDims dims{{2, 2, 2, 2}};
  const std::vector<std::size_t> perm{2, 0, 3, 1};
  const ComplexMatrix there = permute_subsystems(m, dims, perm);
  const ComplexMatrix back = permute_subsystems(there, dims, inverse_permutation(perm));
  REQUIRE(max_abs_diff(back, m) == 0.0);
}

TEST_CASE("permute_subsystems validates dims and perm", "[tensor]") {
  const ComplexMatrix m = ComplexMatrix::identity(8);
  REQUIRE_THROWS_AS(permute_subsystems(m, SubsystemDims{{2, 2}}, {0, 1}), DimensionError);
  REQUIRE_THROWS_AS(permute_subsystems(m, SubsystemDims{{2, 2, 2}}, {0, 1, 1}), DimensionError);
  REQUIRE_THROWS_AS(permute_subsystems(m, SubsystemDims{{2, 6}}, {0, 1}), DimensionError);
}

TEST_CASE("matrix json dump round trip", "[tensor]") {
  Rng rng(88);
  const ComplexMatrix m = testutil::random_matrix(3, 5, rng);
  const ComplexMatrix back = matrix_from_json(matrix_to_json(m));
  REQUIRE(max_abs_diff(m, back) == 0.0);
}

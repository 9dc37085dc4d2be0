#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "uctc/cnf.hpp"
#include "uctc/vv.hpp"

#include "test_helpers.hpp"

using namespace uctc;

namespace {

std::set<std::string> projected_models(const CnfFormula& reduced, int original_vars) {
  std::set<std::string> out;
  for (const Assignment& a : enumerate_models(reduced))
    out.insert(a.bits.substr(0, original_vars));
  return out;
}

std::set<std::string> constrained_models(const CnfFormula& formula, const HashConstraint& h) {
  std::set<std::string> out;
  for (const Assignment& a : enumerate_models(formula))
    if (h.satisfied(a.index())) out.insert(a.bits);
  return out;
}

}  // namespace

TEST_CASE("sample_constraint ranges and determinism", "[vv]") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const HashConstraint h = sample_constraint(1, seed);
    REQUIRE(h.k >= 0);
    REQUIRE(h.k <= 2);
  }
  const HashConstraint a = sample_constraint(6, 12345);
  const HashConstraint b = sample_constraint(6, 12345);
  REQUIRE(a.k == b.k);
  REQUIRE(a.rows == b.rows);
  REQUIRE(a.b == b.b);
}

TEST_CASE("sample_constraint entry marginals are uniform", "[vv]") {
  // Frequency-count oracle over the first row (present for k >= 1).
  const int n = 6;
  int present = 0;
  std::vector<int> ones(n, 0);
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    const HashConstraint h = sample_constraint(n, seed);
    if (h.k < 1) continue;
    ++present;
    for (int j = 1; j <= n; ++j)
      if (h.a_entry(0, j)) ++ones[j - 1];
  }
  REQUIRE(present > 5000);
  for (int j = 0; j < n; ++j) {
    const double marginal = static_cast<double>(ones[j]) / present;
    REQUIRE(std::abs(marginal - 0.5) <= 0.02);
  }
}

TEST_CASE("encode with an empty constraint is the identity", "[vv]") {
  const CnfFormula f = parse_dimacs("p cnf 3 2\n1 2 0\n-3 0\n");
  HashConstraint empty;
  empty.num_vars = 3;
  empty.k = 0;
  REQUIRE(encode(f, empty, VvMode::Direct) == f);
  REQUIRE(encode(f, empty, VvMode::Auxiliary) == f);
}

TEST_CASE("direct encoding of a single XOR row", "[vv]") {
  const CnfFormula f = parse_dimacs("p cnf 2 1\n1 2 0\n");
  HashConstraint h;
  h.num_vars = 2;
  h.k = 1;
  h.rows = {0b11};  // x1 xor x2
  h.b = {true};
  const CnfFormula reduced = encode(f, h, VvMode::Direct);
  REQUIRE(reduced.num_vars == 2);
  const auto models = projected_models(reduced, 2);
  REQUIRE(models == std::set<std::string>{"01", "10"});
}

TEST_CASE("auxiliary encoding projects to the same models", "[vv]") {
  const CnfFormula f = parse_dimacs("p cnf 2 1\n1 2 0\n");
  HashConstraint h;
  h.num_vars = 2;
  h.k = 1;
  h.rows = {0b11};
  h.b = {true};
  const CnfFormula reduced = encode(f, h, VvMode::Auxiliary);
  REQUIRE(reduced.num_vars == 3);  // one chained variable
  REQUIRE(reduced.original_vars == 2);
  REQUIRE(projected_models(reduced, 2) == std::set<std::string>{"01", "10"});
}

TEST_CASE("zero-weight rows encode truth or contradiction", "[vv]") {
  const CnfFormula f = parse_dimacs("p cnf 2 1\n1 2 0\n");
  HashConstraint h;
  h.num_vars = 2;
  h.k = 1;
  h.rows = {0};
  h.b = {false};
  REQUIRE(count_models(encode(f, h, VvMode::Direct)) == count_models(f));
  h.b = {true};
  REQUIRE(count_models(encode(f, h, VvMode::Direct)) == 0);
  REQUIRE(count_models(encode(f, h, VvMode::Auxiliary)) == 0);
}

TEST_CASE("direct encoding rejects overly wide rows", "[vv]") {
  CnfFormula f;
  f.num_vars = 12;
  f.original_vars = 12;
  HashConstraint h;
  h.num_vars = 12;
  h.k = 1;
  h.rows = {(std::uint64_t{1} << 12) - 1};  // all twelve variables
  h.b = {true};
  REQUIRE_THROWS_AS(encode(f, h, VvMode::Direct), ResourceError);
  REQUIRE_NOTHROW(encode(f, h, VvMode::Auxiliary));
}

TEST_CASE("encoded model sets equal the constraint-filtered models", "[vv]") {
  Rng rng(900);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_int(5));
    const CnfFormula f = random_cnf(n, 2 * n, std::min(3, n), rng.next_u64());
    const std::uint64_t seed = rng.next_u64();
    const HashConstraint h = sample_constraint(n, seed);
    const std::set<std::string> expected = constrained_models(f, h);
    for (const VvMode mode : {VvMode::Direct, VvMode::Auxiliary}) {
      const CnfFormula reduced = encode(f, h, mode);
      if (reduced.num_vars > 16) continue;  // enumeration cap; aux chains can be long
      REQUIRE(projected_models(reduced, n) == expected);
    }
  }
}

TEST_CASE("model-set containment under the reduction", "[vv]") {
  Rng rng(901);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_int(7));  // up to 8
    const CnfFormula f = random_cnf(n, 2 * n, std::min(3, n), rng.next_u64());
    std::set<std::string> base;
    for (const Assignment& a : enumerate_models(f)) base.insert(a.bits);
    const CnfFormula reduced = vv_reduce(f, rng.next_u64(), VvMode::Direct);
    for (const std::string& bits : projected_models(reduced, n))
      REQUIRE(base.count(bits) == 1);
  }
}

TEST_CASE("auxiliary variables are functionally determined", "[vv]") {
  Rng rng(902);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 3;
    const CnfFormula f = random_cnf(n, 4, 2, rng.next_u64());
    const std::uint64_t seed = rng.next_u64();
    const HashConstraint h = sample_constraint(n, seed);
    const CnfFormula reduced = encode(f, h, VvMode::Auxiliary);
    if (reduced.num_vars > 16) continue;
    const std::vector<Assignment> models = enumerate_models(reduced);
    std::set<std::string> projections;
    for (const Assignment& a : models) projections.insert(a.bits.substr(0, n));
    // One extension per surviving model: projection is injective.
    REQUIRE(projections.size() == models.size());
    REQUIRE(projections == constrained_models(f, h));
  }
}

TEST_CASE("unsatisfiable formulas stay unsatisfiable for every seed", "[vv]") {
  const CnfFormula unsat = parse_dimacs("p cnf 4 2\n1 0\n-1 0\n");
  REQUIRE(count_models(unsat) == 0);
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const CnfFormula reduced = vv_reduce(unsat, seed, VvMode::Direct);
    REQUIRE(count_models(reduced) == 0);
  }
}

TEST_CASE("empirical isolation rate meets the conservative bound", "[vv]") {
  // Eight models over n = 4, checked by full reduction and counting.
  const CnfFormula f = parse_dimacs("p cnf 4 1\n1 0\n");
  REQUIRE(count_models(f) == 8);

  int isolated = 0;
  const int trials = 10000;
  for (int trial = 0; trial < trials; ++trial) {
    const CnfFormula reduced = vv_reduce(f, trial, VvMode::Direct);
    if (count_models(reduced) == 1) ++isolated;
  }
  const double rate = static_cast<double>(isolated) / trials;
  REQUIRE(rate >= 1.0 / (10.0 * f.num_vars));
}

TEST_CASE("already unique formulas survive a k=0 draw unchanged", "[vv]") {
  const CnfFormula f = testutil::pinned_formula(0b101, 3);
  REQUIRE(count_models(f) == 1);
  // Find a seed drawing k = 0.
  for (std::uint64_t seed = 0;; ++seed) {
    const HashConstraint h = sample_constraint(3, seed);
    if (h.k != 0) continue;
    const CnfFormula reduced = encode(f, h, VvMode::Direct);
    REQUIRE(reduced == f);
    REQUIRE(count_models(reduced) == 1);
    break;
  }
}

TEST_CASE("vv comment line round trips", "[vv]") {
  const HashConstraint h = sample_constraint(5, 777);
  const std::string comment = vv_comment(777, h, VvMode::Direct);
  const CnfFormula f = parse_dimacs("p cnf 5 1\n1 2 3 0\n");
  const std::string text = emit_dimacs(encode(f, h, VvMode::Direct), {comment});
  const auto info = parse_vv_comment(text);
  REQUIRE(info.has_value());
  REQUIRE(info->seed == 777);
  REQUIRE(info->k == h.k);
  REQUIRE(info->mode == "direct");
  REQUIRE_NOTHROW(parse_dimacs(text));
}

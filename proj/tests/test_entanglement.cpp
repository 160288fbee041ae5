#include <doctest.h>

#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <stdexcept>

#include "hgspdc/entanglement.hpp"
#include "test_helpers.hpp"

using namespace hgspdc;
using test_support::reference_config;

namespace {

// Hand-assembled truncated state for corner cases the builder cannot reach.
TwoPhotonAmplitudes make_state(
    std::map<CoeffKey, std::complex<double>> amplitudes, int max_order) {
  TwoPhotonAmplitudes state;
  state.pump = PumpSpec::single({0, 0});
  state.config = reference_config();
  state.max_order = max_order;
  state.method = Method::exact;
  state.amplitudes = std::move(amplitudes);
  return state;
}

const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

}  // namespace

TEST_CASE("reduce rejects unnormalized input") {
  const auto raw = build_state(reference_config(), PumpSpec::single({0, 0}),
                               2, Method::exact);
  CHECK(raw.squared_norm() < 0.5);  // far from normalized
  CHECK_THROWS_AS(reduce(raw), std::invalid_argument);
  CHECK_NOTHROW(reduce(raw.normalized()));
}

TEST_CASE("reduced density matrix against a direct computation") {
  const auto state = build_state(reference_config(),
                                 PumpSpec::single({0, 0}), 4, Method::exact)
                         .normalized();
  const ReducedDensity rho = reduce(state);
  CHECK(rho.trace() == doctest::Approx(1.0).epsilon(1e-12));

  // Recompute F entry by entry from the amplitudes.
  for (size_t a = 0; a < rho.basis.size(); ++a)
    for (size_t b = 0; b < rho.basis.size(); ++b) {
      std::complex<double> expected = 0.0;
      for (const auto& [key1, amp1] : state.amplitudes) {
        if (key1.j != rho.basis[a].first || key1.k != rho.basis[a].second)
          continue;
        for (const auto& [key2, amp2] : state.amplitudes) {
          if (key2.j != rho.basis[b].first || key2.k != rho.basis[b].second)
            continue;
          if (key1.u == key2.u && key1.t == key2.t)
            expected += amp1 * std::conj(amp2);
        }
      }
      CHECK(std::abs(rho.F(static_cast<int>(a), static_cast<int>(b)) -
                     expected.real()) < 1e-14);
      CHECK(std::abs(expected.imag()) < 1e-14);
      // Hermiticity in the real representation.
      CHECK(std::abs(rho.F(static_cast<int>(a), static_cast<int>(b)) -
                     rho.F(static_cast<int>(b), static_cast<int>(a))) < 1e-14);
    }
}

TEST_CASE("two-term entangled block reduces to the maximally mixed pair") {
  // (|01,01> + |10,10>)/sqrt2: tracing the idler leaves half weight on each
  // of the two signal modes and no coherence between them.
  const auto bell = make_state(
      {{{0, 1, 0, 1}, kInvSqrt2}, {{1, 0, 1, 0}, kInvSqrt2}}, 2);
  const ReducedDensity rho = reduce(bell);
  REQUIRE(rho.basis.size() == 2);
  CHECK(rho.basis[0] == std::pair<int, int>{0, 1});
  CHECK(rho.basis[1] == std::pair<int, int>{1, 0});
  CHECK(rho.F(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(rho.F(1, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std::abs(rho.F(0, 1)) < 1e-15);
  CHECK(std::abs(rho.F(1, 0)) < 1e-15);
  const WitnessVerdict verdict = csb_entanglement_witness(rho);
  CHECK(verdict.entangled);
  REQUIRE(verdict.witness_indices.has_value());
  CHECK(verdict.witness_indices->first == std::pair<int, int>{0, 1});
  CHECK(verdict.witness_indices->second == std::pair<int, int>{1, 0});
}

TEST_CASE("basis bookkeeping") {
  const auto state = build_state(reference_config(),
                                 PumpSpec::single({0, 0}), 2, Method::exact)
                         .normalized();
  const ReducedDensity rho = reduce(state);
  // Signal pairs reachable at order 2 for an even pump.
  REQUIRE(rho.basis.size() == 5);
  CHECK(rho.basis[0] == std::pair<int, int>{0, 0});
  CHECK(rho.basis[1] == std::pair<int, int>{0, 1});
  CHECK(rho.basis[2] == std::pair<int, int>{0, 2});
  CHECK(rho.basis[3] == std::pair<int, int>{1, 0});
  CHECK(rho.basis[4] == std::pair<int, int>{2, 0});
  CHECK(rho.index_of(0, 1) == 1);
  CHECK(rho.index_of(2, 0) == 4);
  CHECK(rho.index_of(5, 5) == -1);
}

TEST_CASE("purity of product and entangled states") {
  const auto product = make_state({{{0, 0, 0, 0}, 1.0}}, 0);
  const ReducedDensity rho_product = reduce(product);
  CHECK(purity(rho_product) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(!csb_entanglement_witness(rho_product).entangled);

  const auto bell = make_state(
      {{{0, 0, 0, 0}, kInvSqrt2}, {{0, 1, 0, 1}, kInvSqrt2}}, 2);
  const ReducedDensity rho_bell = reduce(bell);
  CHECK(purity(rho_bell) == doctest::Approx(0.5).epsilon(1e-13));
  const auto eigenvalues = reduced_eigenvalues(rho_bell);
  REQUIRE(eigenvalues.size() == 2);
  CHECK(eigenvalues[0] == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(eigenvalues[1] == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("csb witness finds the first mismatched-parity pair") {
  const auto state = build_state(reference_config(),
                                 PumpSpec::single({0, 0}), 2, Method::exact)
                         .normalized();
  const ReducedDensity rho = reduce(state);
  CHECK(purity(rho) < 1.0);
  const WitnessVerdict verdict = csb_entanglement_witness(rho);
  CHECK(verdict.entangled);
  REQUIRE(verdict.witness_indices.has_value());
  CHECK(verdict.witness_indices->first == std::pair<int, int>{0, 0});
  CHECK(verdict.witness_indices->second == std::pair<int, int>{0, 1});
}

TEST_CASE("witness refuses coherent mismatched-parity populations") {
  // Signal superposition times a fixed idler mode: a product state whose
  // mismatched-parity diagonal entries are coherently connected, so the
  // Cauchy-Schwarz argument must not fire.
  const auto product = make_state(
      {{{0, 0, 0, 0}, kInvSqrt2}, {{0, 1, 0, 0}, kInvSqrt2}}, 1);
  const ReducedDensity rho = reduce(product);
  CHECK(purity(rho) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(!parity_block_check(rho, {0, 0}));
  CHECK(!csb_entanglement_witness(rho).entangled);
}

TEST_CASE("parity block structure holds for single-pump states") {
  for (const ModeIndex pump : {ModeIndex{0, 0}, ModeIndex{1, 1}}) {
    const auto state = build_state(reference_config(),
                                   PumpSpec::single(pump), 4, Method::exact)
                           .normalized();
    const ReducedDensity rho = reduce(state);
    CHECK(parity_block_check(rho, pump));
  }
}

TEST_CASE("reduce rejects complex reduced matrices") {
  const auto complex_state = make_state(
      {{{0, 0, 0, 0}, kInvSqrt2},
       {{0, 1, 0, 0}, std::complex<double>(0.0, kInvSqrt2)}},
      1);
  CHECK_THROWS_AS(reduce(complex_state), std::invalid_argument);
}

TEST_CASE("reduced eigenvalues are a clamped decreasing probability set") {
  const auto state = build_state(reference_config(),
                                 PumpSpec::single({1, 1}), 6, Method::exact)
                         .normalized();
  const ReducedDensity rho = reduce(state);
  const auto eigenvalues = reduced_eigenvalues(rho);
  REQUIRE(eigenvalues.size() == rho.basis.size());
  double sum = 0.0;
  for (size_t i = 0; i + 1 < eigenvalues.size(); ++i)
    CHECK(eigenvalues[i] >= eigenvalues[i + 1]);
  for (const double value : eigenvalues) {
    CHECK(value >= 0.0);
    sum += value;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(purity(rho) < 1.0);
}

TEST_CASE("postselect keeps tags and renormalizes") {
  const auto state = build_state(reference_config(),
                                 PumpSpec::single({1, 1}), 4, Method::exact);
  const auto block = postselect(state, [](const CoeffKey& key) {
    return key.j + key.k == 1 && key.u + key.t == 1;
  });
  CHECK(block.amplitudes.size() == 2);
  CHECK(block.amplitudes.contains({0, 1, 1, 0}));
  CHECK(block.amplitudes.contains({1, 0, 0, 1}));
  CHECK(block.squared_norm() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(block.max_order == state.max_order);
  CHECK(block.method == state.method);
  CHECK(block.pump.components.size() == 1);
}

TEST_CASE("postselect with a keep-everything predicate only renormalizes") {
  const auto state = build_state(reference_config(),
                                 PumpSpec::single({0, 0}), 4, Method::exact);
  const auto kept = postselect(state, [](const CoeffKey&) { return true; });
  const auto unit = state.normalized();
  REQUIRE(kept.amplitudes.size() == unit.amplitudes.size());
  for (const auto& [key, amp] : unit.amplitudes)
    CHECK(std::abs(kept.amplitudes.at(key) - amp) < 1e-15);
  // Downstream diagnostics cannot tell the two apart.
  CHECK(purity(reduce(kept)) ==
        doctest::Approx(purity(reduce(unit))).epsilon(1e-12));
}

TEST_CASE("purity reaches one exactly on rank-one reductions") {
  const auto product = make_state(
      {{{0, 0, 0, 0}, kInvSqrt2}, {{0, 1, 0, 0}, kInvSqrt2}}, 1);
  const ReducedDensity rho = reduce(product);
  const auto eigenvalues = reduced_eigenvalues(rho);
  CHECK(purity(rho) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-13));
  for (size_t i = 1; i < eigenvalues.size(); ++i)
    CHECK(std::abs(eigenvalues[i]) < 1e-13);
}

TEST_CASE("postselect on an empty block fails") {
  const auto state = build_state(reference_config(),
                                 PumpSpec::single({0, 0}), 2, Method::exact);
  CHECK_THROWS_AS(
      postselect(state, [](const CoeffKey&) { return false; }),
      std::runtime_error);
}

#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "hgspdc/state_engineering.hpp"
#include "test_helpers.hpp"

using namespace hgspdc;
using test_support::reference_config;

namespace {

constexpr double kPi = std::numbers::pi;
const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

bool matrices_close(const FirstOrderElement& element,
                    const std::array<std::array<double, 2>, 2>& expected,
                    double tol = 1e-15) {
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      if (std::abs(element.matrix[r][c].real() - expected[r][c]) > tol)
        return false;
      if (std::abs(element.matrix[r][c].imag()) > tol) return false;
    }
  return true;
}

FirstOrderState compose(const FirstOrderState& input,
                        const std::vector<std::pair<FirstOrderElement, Arm>>&
                            pipeline) {
  FirstOrderState state = input;
  for (const auto& [element, arm] : pipeline)
    state = apply(state, element, arm);
  return state;
}

}  // namespace

TEST_CASE("dove prism matrices at the standard orientations") {
  CHECK(matrices_close(dove_prism(0.0), {{{-1.0, 0.0}, {0.0, 1.0}}}));
  CHECK(matrices_close(dove_prism(kPi / 4.0), {{{0.0, 1.0}, {1.0, 0.0}}}));
  CHECK(matrices_close(dove_prism(kPi / 2.0), {{{1.0, 0.0}, {0.0, -1.0}}}));
  CHECK(matrices_close(mirror(), {{{-1.0, 0.0}, {0.0, 1.0}}}));
  CHECK(matrices_close(identity_element(), {{{1.0, 0.0}, {0.0, 1.0}}}));
}

TEST_CASE("dove prisms are involutions for generic orientations") {
  for (const double phi : {0.13, 0.7, 1.2, 2.9}) {
    const FirstOrderElement element = dove_prism(phi);
    // Square the matrix by applying it twice to both basis states.
    for (int basis = 0; basis < 2; ++basis) {
      FirstOrderState state;
      state.amp[basis][0] = 1.0;
      const FirstOrderState twice =
          apply(apply(state, element, Arm::signal), element, Arm::signal);
      CHECK(std::abs(twice.amp[basis][0] - 1.0) < 1e-14);
      CHECK(std::abs(twice.amp[1 - basis][0]) < 1e-14);
    }
  }
}

TEST_CASE("element matrices are unitary") {
  std::vector<FirstOrderElement> elements = {mirror(), identity_element()};
  for (const double phi : {0.0, 0.3, kPi / 4.0, 1.1, kPi / 2.0, 2.7})
    elements.push_back(dove_prism(phi));
  for (const FirstOrderElement& element : elements) {
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) {
        std::complex<double> gram = 0.0;  // (M^dagger M)_{rc}
        for (int s = 0; s < 2; ++s)
          gram += std::conj(element.matrix[s][r]) * element.matrix[s][c];
        CHECK(std::abs(gram - (r == c ? 1.0 : 0.0)) < 1e-12);
      }
  }
}

TEST_CASE("element labels") {
  CHECK(dove_prism(kPi / 4.0).label() == "dove(45 deg)");
  CHECK(dove_prism(kPi / 2.0).label() == "dove(90 deg)");
  CHECK(mirror().label() == "mirror");
  CHECK(identity_element().label() == "identity");
}

TEST_CASE("apply acts one-sided and preserves the norm") {
  FirstOrderState state;
  state.amp[0][0] = 0.6;
  state.amp[1][1] = std::complex<double>(0.0, 0.8);
  const FirstOrderElement swap = dove_prism(kPi / 4.0);

  const FirstOrderState on_signal = apply(state, swap, Arm::signal);
  CHECK(on_signal.squared_norm() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(on_signal.amp[1][0] - 0.6) < 1e-15);
  CHECK(std::abs(on_signal.amp[0][1] - std::complex<double>(0.0, 0.8)) <
        1e-15);

  const FirstOrderState on_idler = apply(state, swap, Arm::idler);
  CHECK(std::abs(on_idler.amp[0][1] - 0.6) < 1e-15);
  CHECK(std::abs(on_idler.amp[1][0] - std::complex<double>(0.0, 0.8)) <
        1e-15);

  // Signal and idler applications differ for an asymmetric input.
  CHECK(std::abs(on_signal.amp[1][0] - on_idler.amp[1][0]) > 0.1);

  // The identity element is inert on either arm.
  for (const Arm arm : {Arm::signal, Arm::idler}) {
    const FirstOrderState same = apply(state, identity_element(), arm);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        CHECK(std::abs(same.amp[a][b] - state.amp[a][b]) < 1e-15);
  }
}

TEST_CASE("a mirror converts plus Bell states into minus ones") {
  // diag(-1, 1) on one arm flips the relative sign of the two branches.
  const FirstOrderState psi_minus =
      apply(bell_state(BellTarget::psi_plus), mirror(), Arm::idler);
  CHECK(psi_minus.fidelity(bell_state(BellTarget::psi_minus)) ==
        doctest::Approx(1.0).epsilon(1e-14));
  const FirstOrderState phi_minus =
      apply(bell_state(BellTarget::phi_plus), mirror(), Arm::signal);
  CHECK(phi_minus.fidelity(bell_state(BellTarget::phi_minus)) ==
        doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("bell states are normalized and mutually orthogonal") {
  const BellTarget targets[] = {BellTarget::phi_plus, BellTarget::phi_minus,
                                BellTarget::psi_plus, BellTarget::psi_minus};
  for (const BellTarget a : targets) {
    const FirstOrderState state_a = bell_state(a);
    CHECK(state_a.squared_norm() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(state_a.fidelity(state_a) == doctest::Approx(1.0).epsilon(1e-15));
    for (const BellTarget b : targets) {
      if (a == b) continue;
      CHECK(state_a.fidelity(bell_state(b)) < 1e-28);
    }
  }
  const auto eigenvalues = bell_state(BellTarget::psi_minus)
                               .reduced_eigenvalues();
  CHECK(eigenvalues[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(eigenvalues[1] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("fidelity ignores a global phase") {
  const FirstOrderState psi = bell_state(BellTarget::psi_plus);
  FirstOrderState rotated = psi;
  const std::complex<double> phase = std::polar(1.0, 0.7331);
  for (auto& row : rotated.amp)
    for (auto& entry : row) entry *= phase;
  CHECK(psi.fidelity(rotated) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("validate rejects unnormalized states") {
  FirstOrderState state;
  state.amp[0][0] = 0.9;
  CHECK_THROWS_AS(validate(state), std::invalid_argument);
  state.amp[0][0] = 1.0;
  CHECK_NOTHROW(validate(state));
}

TEST_CASE("post-selection of the crystal output hits the expected Bell"
          " structure") {
  const CrystalConfig config = reference_config();

  const auto from_hg00 = build_state(config, PumpSpec::single({0, 0}), 4,
                                     Method::exact);
  const FirstOrderState phi_like = postselect_first_order(from_hg00);
  CHECK(phi_like.fidelity(bell_state(BellTarget::phi_plus)) ==
        doctest::Approx(1.0).epsilon(1e-12));

  const auto from_hg11 = build_state(config, PumpSpec::single({1, 1}), 4,
                                     Method::exact);
  const FirstOrderState psi_like = postselect_first_order(from_hg11);
  CHECK(psi_like.fidelity(bell_state(BellTarget::psi_plus)) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("postselect_first_order rejects states with an empty block") {
  const auto even_only = build_state(reference_config(),
                                     PumpSpec::single({0, 0}), 4,
                                     Method::exact);
  // Zero out the first-order block by truncating to order 0.
  const auto truncated = build_state(reference_config(),
                                     PumpSpec::single({0, 0}), 0,
                                     Method::exact);
  CHECK_NOTHROW(postselect_first_order(even_only));
  CHECK_THROWS_AS(postselect_first_order(truncated), std::runtime_error);
}

TEST_CASE("bell recipes reach every target from both pumps") {
  const CrystalConfig config = reference_config();
  const BellTarget targets[] = {BellTarget::phi_plus, BellTarget::phi_minus,
                                BellTarget::psi_plus, BellTarget::psi_minus};
  for (const PumpSource source : {PumpSource::hg00, PumpSource::hg11}) {
    for (const BellTarget target : targets) {
      const BellRecipe recipe = bell_recipe(target, source, config);
      CHECK(recipe.state.fidelity(bell_state(target)) > 1.0 - 1e-10);

      // Every recipe output is maximally entangled within the first-order
      // block: both reduced eigenvalues sit at one half.
      const auto eigenvalues = recipe.state.reduced_eigenvalues();
      CHECK(eigenvalues[0] == doctest::Approx(0.5).epsilon(1e-10));
      CHECK(eigenvalues[1] == doctest::Approx(0.5).epsilon(1e-10));

      // Pipeline lengths: identity, one element, or dove + mirror.
      const bool base_is_phi = source == PumpSource::hg00;
      const bool want_phi = target == BellTarget::phi_plus ||
                            target == BellTarget::phi_minus;
      const bool want_minus = target == BellTarget::phi_minus ||
                              target == BellTarget::psi_minus;
      const size_t expected_size =
          (base_is_phi != want_phi ? 1u : 0u) + (want_minus ? 1u : 0u);
      CHECK(recipe.pipeline.size() == expected_size);

      // Re-running the pipeline on the freshly post-selected state
      // reproduces the recipe output.
      const auto raw = build_state(
          config,
          PumpSpec::single(source == PumpSource::hg00 ? ModeIndex{0, 0}
                                                      : ModeIndex{1, 1}),
          2, Method::exact);
      const FirstOrderState replay =
          compose(postselect_first_order(raw), recipe.pipeline);
      CHECK(replay.fidelity(recipe.state) > 1.0 - 1e-12);
    }
  }
}

TEST_CASE("bell recipe pipelines use the advertised elements") {
  const CrystalConfig config = reference_config();
  const BellRecipe psi = bell_recipe(BellTarget::psi_plus, PumpSource::hg00,
                                     config);
  REQUIRE(psi.pipeline.size() == 1);
  CHECK(psi.pipeline[0].first.label() == "dove(45 deg)");
  CHECK(psi.pipeline[0].second == Arm::signal);

  const BellRecipe phi_minus = bell_recipe(BellTarget::phi_minus,
                                           PumpSource::hg00, config);
  REQUIRE(phi_minus.pipeline.size() == 1);
  CHECK(phi_minus.pipeline[0].first.label() == "mirror");

  const BellRecipe psi_minus = bell_recipe(BellTarget::psi_minus,
                                           PumpSource::hg00, config);
  REQUIRE(psi_minus.pipeline.size() == 2);
  CHECK(psi_minus.pipeline[0].first.label() == "dove(45 deg)");
  CHECK(psi_minus.pipeline[1].first.label() == "mirror");
}

TEST_CASE("pump superpositions tune the entanglement continuously") {
  const CrystalConfig config = reference_config();
  for (const double theta_deg : {0.0, 30.0, 45.0, 60.0, 90.0}) {
    for (const double phi : {0.0, kPi / 2.0, kPi}) {
      const double theta = theta_deg * kPi / 180.0;
      const FirstOrderState state = nonmax_pipeline(theta, phi, config);

      // cos(theta)|01,01> + e^{i phi} sin(theta)|10,10>; no cross terms.
      const std::complex<double> expected_00 = std::cos(theta);
      const std::complex<double> expected_11 =
          std::polar(std::sin(theta), phi);
      CHECK(std::abs(state.amp[0][0] - expected_00) < 1e-10);
      CHECK(std::abs(state.amp[1][1] - expected_11) < 1e-10);
      CHECK(std::abs(state.amp[0][1]) < 1e-12);
      CHECK(std::abs(state.amp[1][0]) < 1e-12);

      const auto eigenvalues = state.reduced_eigenvalues();
      const double c2 = std::cos(theta) * std::cos(theta);
      const double expected_hi = std::max(c2, 1.0 - c2);
      CHECK(eigenvalues[0] == doctest::Approx(expected_hi).epsilon(1e-10));
      CHECK(eigenvalues[1] ==
            doctest::Approx(1.0 - expected_hi).epsilon(1e-10));
      CHECK(eigenvalues[0] >= eigenvalues[1]);
    }
  }
}

TEST_CASE("nonmax endpoints are product states, the midpoint is maximal") {
  const CrystalConfig config = reference_config();
  const auto separable = nonmax_pipeline(0.0, 0.0, config);
  CHECK(separable.reduced_eigenvalues()[0] ==
        doctest::Approx(1.0).epsilon(1e-12));
  const auto maximal = nonmax_pipeline(kPi / 4.0, 0.0, config);
  CHECK(maximal.fidelity(bell_state(BellTarget::phi_plus)) ==
        doctest::Approx(1.0).epsilon(1e-10));
}

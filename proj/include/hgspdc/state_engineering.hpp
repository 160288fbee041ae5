#pragma once

// Mode-space optics on the post-selected first-order subspace: Dove prisms
// and mirrors acting on {HG01, HG10}, Bell-state construction recipes, and
// the pump-superposition pipeline producing tunable non-maximally entangled
// states.

#include <array>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "hgspdc/entanglement.hpp"
#include "hgspdc/spdc_coeffs.hpp"

namespace hgspdc {

// Two-photon state on span{HG01, HG10} x span{HG01, HG10}; amp[s][i] is the
// amplitude of |signal s, idler i> with basis index 0 = HG01, 1 = HG10.
struct FirstOrderState {
  std::array<std::array<std::complex<double>, 2>, 2> amp{};

  double squared_norm() const;
  FirstOrderState normalized() const;
  // |<other|this>|^2; 1 for states equal up to a global phase.
  double fidelity(const FirstOrderState& other) const;
  // Eigenvalues of the signal reduced density matrix, decreasing; the pair
  // {cos^2 theta, sin^2 theta} for a Schmidt-form two-term state.
  std::array<double, 2> reduced_eigenvalues() const;
};

// Throws std::invalid_argument unless the amplitudes are normalized within
// 1e-12.
void validate(const FirstOrderState& state);

enum class Arm { signal, idler };

// One optical element restricted to the first-order subspace.
struct FirstOrderElement {
  enum class Kind { dove, mirror, identity };
  Kind kind = Kind::identity;
  double angle = 0.0;  // Dove prism orientation, radians
  std::array<std::array<std::complex<double>, 2>, 2> matrix{};

  std::string label() const;  // e.g. "dove(45 deg)", "mirror"
};

// Dove prism at orientation phi, modeled as the image reflection about the
// axis at angle phi. On (HG01, HG10) the matrix is
//   [ -cos 2phi   sin 2phi ]
//   [  sin 2phi   cos 2phi ],
// so dove(45 deg) swaps HG01 <-> HG10 exactly and dove(90 deg) maps
// HG01 -> HG01, HG10 -> -HG10 (the sign-flip action, up to a global phase).
// An involution for every phi.
FirstOrderElement dove_prism(double phi);

// Mirror reflection: HG01 -> -HG01, HG10 -> HG10.
FirstOrderElement mirror();

FirstOrderElement identity_element();

// One-sided action of the element on the chosen arm; norm preserving.
FirstOrderState apply(const FirstOrderState& state,
                      const FirstOrderElement& element, Arm arm);

enum class BellTarget { phi_plus, phi_minus, psi_plus, psi_minus };
enum class PumpSource { hg00, hg11 };

// The four Bell states in the first-order encoding:
//   phi+- = (|01,01> +- |10,10>)/sqrt2, psi+- = (|01,10> +- |10,01>)/sqrt2.
FirstOrderState bell_state(BellTarget target);

struct BellRecipe {
  std::vector<std::pair<FirstOrderElement, Arm>> pipeline;
  FirstOrderState state;
};

// Builds the two-photon state of the chosen pump, post-selects the
// first-order subspace (phi+ structure for an HG00 pump, psi+ for HG11),
// applies the element sequence that reaches the target Bell state, and
// returns both. The result matches bell_state(target) up to a global phase
// (fidelity > 1 - 1e-10, self-checked; std::runtime_error otherwise).
BellRecipe bell_recipe(BellTarget target, PumpSource source,
                       const CrystalConfig& config);

// Pump superposition cos(theta) HG02 + e^{i phi} sin(theta) HG20, expanded
// through the crystal and post-selected onto first order. Because the two
// pump blocks share the same first-order coefficient, the output is exactly
//   cos(theta) |01,01> + e^{i phi} sin(theta) |10,10>.
FirstOrderState nonmax_pipeline(double theta, double phi,
                                const CrystalConfig& config);

// First-order block (j+k = 1 and u+t = 1) of a two-photon state,
// renormalized. Throws std::runtime_error when that block is empty.
FirstOrderState postselect_first_order(const TwoPhotonAmplitudes& state);

}  // namespace hgspdc

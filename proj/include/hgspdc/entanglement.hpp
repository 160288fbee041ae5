#pragma once

// Signal-photon reduced density matrix of a truncated two-photon state and
// the parity-based entanglement diagnostics it supports: purity, the parity
// block structure of the mode populations, and a Cauchy-Schwarz witness
// built from mismatched-parity diagonal pairs.

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "hgspdc/spdc_coeffs.hpp"

namespace hgspdc {

// rho_s over the signal basis {(j, k)}: F[a][b] = sum_{g,d} C_{jk,gd}
// C*_{df,gd} with (j,k) = basis[a], (d,f) = basis[b]. Real symmetric for
// the states this library builds (real single-pump amplitudes, or complex
// superpositions whose cross terms cancel).
struct ReducedDensity {
  std::vector<std::pair<int, int>> basis;  // signal (j, k), lexicographic
  Eigen::MatrixXd F;

  double trace() const;
  int index_of(int j, int k) const;  // -1 when absent
};

// Builds the reduced density matrix of the signal photon. The input must be
// normalized over its truncation (sum |amp|^2 = 1 within 1e-10), otherwise
// std::invalid_argument. Throws std::invalid_argument as well when the
// amplitudes produce a non-negligible imaginary part (> 1e-9), which cannot
// happen for a single pump mode.
ReducedDensity reduce(const TwoPhotonAmplitudes& state);

// tr rho_s^2 = sum of squared entries of F; equals 1 exactly when the
// two-photon state is a product state, strictly below 1 otherwise.
double purity(const ReducedDensity& rho);

// True iff F[a][b] vanishes (|.| < 1e-12) whenever the paired indices
// mismatch in parity, i.e. parity(j) != parity(d) or parity(k) != parity(f).
// Holds for any state generated by a single pump mode: the conservation
// rules force all idler partners of a signal mode into one parity class.
bool parity_block_check(const ReducedDensity& rho, const ModeIndex& pump_mode);

struct WitnessVerdict {
  bool entangled = false;
  // Basis labels (j,k), (d,f) of the witnessing diagonal pair, present when
  // entangled is true via the parity argument.
  std::optional<std::pair<std::pair<int, int>, std::pair<int, int>>>
      witness_indices;
};

// Searches the diagonal (in increasing basis order) for a pair of populated
// entries with mismatched parity whose connecting off-diagonal element
// vanishes: then F[ab]^2 = 0 < F[aa] F[bb], a strict Cauchy-Schwarz
// inequality impossible for a rank-1 (product-state) F. Cross-checks that
// purity < 1 when a witness is found.
WitnessVerdict csb_entanglement_witness(const ReducedDensity& rho);

// Eigenvalues of F in decreasing order, clamped at 0 when within -1e-12
// (F is positive semidefinite by construction; floating point may dip
// marginally below zero).
std::vector<double> reduced_eigenvalues(const ReducedDensity& rho);

// Keeps the amplitudes whose key satisfies the predicate and renormalizes.
// Pump, config, truncation order and method tag are preserved. Throws
// std::runtime_error when nothing (or only zero amplitude) remains.
TwoPhotonAmplitudes postselect(const TwoPhotonAmplitudes& state,
                               const std::function<bool(const CoeffKey&)>&
                                   keep);

}  // namespace hgspdc

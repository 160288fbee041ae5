#pragma once

// Brute-force numerical quadrature of the overlap integrals that define the
// two-photon expansion coefficients. This path shares no algebra with the
// closed forms in spdc_coeffs.hpp beyond the mode definitions themselves, so
// it serves as an independent check and as the anchor that fixes the global
// calibration constant.

#include <stdexcept>

#include "hgspdc/gaussian_modes.hpp"
#include "hgspdc/spdc_coeffs.hpp"

namespace hgspdc {

enum class QuadScheme {
  // Gauss-Hermite tensor rule with the Gaussian envelope of the mode
  // spectra factored out as the weight. Spectrally accurate here: over the
  // effective support the sinc factor is smooth and non-oscillatory for
  // A << 1.
  tensor_gauss_hermite,
  // Composite Simpson rule on a truncated Cartesian box.
  adaptive_cartesian,
};

struct QuadratureSpec {
  QuadScheme scheme = QuadScheme::tensor_gauss_hermite;
  int points_per_axis = 32;
  // Cartesian box cutoff per axis, in units of the inverse waist that
  // governs the axis' Gaussian envelope (tail < 1e-27 at the default).
  double domain_halfwidth = 8.0;
  double target_rel_error = 1e-6;
};

// Throws std::invalid_argument unless points_per_axis >= 8 and
// target_rel_error > 0.
void validate(const QuadratureSpec& spec);

struct QuadratureResult {
  double value = 0.0;
  double est_error = 0.0;  // refinement differencing, >= 0
  // Quadrature mass sum |weights x integrand| of the fine pass; an upper
  // bound for |value| (the sinc factor has modulus <= 1) and the natural
  // magnitude against which a vanishing integral is judged.
  double integrand_scale = 0.0;
  long long evaluations = 0;  // integrand evaluations across refinements
};

// Raised when successive refinements disagree beyond target_rel_error.
// Convergence requires
//   est_error <= max(target_rel_error * integrand_scale, 1e-14),
// so integrals that are zero by symmetry or orthogonality converge once the
// residual is small relative to the integrand's own mass, while a genuinely
// under-resolved integrand (oscillatory sinc at large A) still raises.
struct QuadratureConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Direct 4D integration of
//   (1/pi) sqrt(2 L / K) v*_jk(qs) v*_ut(qi) V_nm(qs+qi)
//     * sinc(L |qs - qi|^2 / (4 K))
// over the signal and idler momentum planes. Requires key order <= 8 (cost
// guard). The kernel is parallelized with a fixed-order reduction; results
// are bit-identical to coeff_quadrature_4d_serial for any thread count.
QuadratureResult coeff_quadrature_4d(const CrystalConfig& config,
                                     const ModeIndex& pump_mode,
                                     const CoeffKey& key,
                                     const QuadratureSpec& spec);

// Single-threaded reference implementation of coeff_quadrature_4d.
QuadratureResult coeff_quadrature_4d_serial(const CrystalConfig& config,
                                            const ModeIndex& pump_mode,
                                            const CoeffKey& key,
                                            const QuadratureSpec& spec);

// Reduced 2D route: after the sum-momentum integral collapses by mode
// orthonormality, what remains is
//   (1/pi) sqrt(L / (2 K)) b(j,u,alpha) b(k,t,beta)
//     * integral over P of V*_{alpha,beta}(P) sinc(L P^2 / (4 K)),
// with alpha = j+u-n, beta = k+t-m. Quadratic cost in points_per_axis
// instead of quartic. Returns 0 without integrating when alpha or beta is
// negative.
QuadratureResult coeff_quadrature_2d(const CrystalConfig& config,
                                     const ModeIndex& pump_mode,
                                     const CoeffKey& key,
                                     const QuadratureSpec& spec);

// Mode overlap integral of the angular spectra at z = 0:
// approximates the q-plane integral of v*_a v_b for the given geometry
// (identity matrix delta_ab for exact arithmetic).
QuadratureResult overlap_quadrature(const ModeIndex& mode_a,
                                    const ModeIndex& mode_b,
                                    const BeamGeometry& geom,
                                    const QuadratureSpec& spec);

}  // namespace hgspdc

#pragma once

// Two-photon Hermite-Gaussian expansion of collinear degenerate SPDC.
//
// A pump beam of mode (n, m), waist w0p and wavelength lambda_p traversing a
// crystal of length L produces a signal/idler pair whose joint angular
// spectrum is
//
//   Phi(qs, qi) = (1/pi) sqrt(2 L / K) V_nm(qs + qi)
//                 * sinc(L |qs - qi|^2 / (4 K)),
//
// with K the pump wavenumber and V_nm the pump angular spectrum. Expanding
// Phi over down-converted HG modes of waist w0c = sqrt(2) w0p and wavelength
// 2 lambda_p gives coefficients C^nm_jkut over four-index keys (j, k, u, t).
// The closed forms below evaluate that expansion; the quadrature oracle in
// oracle.hpp integrates the defining overlap directly.
//
// Calibration: with the D_nm = (-i)^(n+m) C_nm / 2 spectrum prefactor from
// gaussian_modes.hpp, every coefficient is real, and the closed form needs a
// single global constant kCalibrationConstant = 2 to agree with the defining
// integral. With it, the squared coefficients sum to exactly 1 in the
// untruncated limit (the joint spectrum Phi is unit-normalized).

#include <complex>
#include <compare>
#include <map>
#include <vector>

#include "hgspdc/gaussian_modes.hpp"

namespace hgspdc {

// Dimensionless constant multiplying the closed-form coefficient formula,
// fixed once by the quadrature oracle (see oracle-compare in the CLI and the
// calibration tests).
inline constexpr double kCalibrationConstant = 2.0;

// Largest truncation order build_state accepts.
inline constexpr int kMaxOrderCeiling = 40;

// Crystal and pump parameters; all lengths in meters.
struct CrystalConfig {
  double crystal_length_L = 0.0;
  double pump_wavelength = 0.0;
  double pump_waist = 0.0;

  double pump_wavenumber() const;   // K = 2 pi / lambda_p
  double pump_rayleigh() const;     // z_R = K w0p^2 / 2
  double down_wavelength() const;   // 2 lambda_p (degenerate operation)
  double down_waist() const;        // sqrt(2) w0p
  BeamGeometry pump_geometry() const;
  BeamGeometry down_geometry() const;
};

// Throws std::invalid_argument unless all lengths are positive.
void validate(const CrystalConfig& config);

// Focusing parameter A = L / (K w0p^2) = L / (2 z_R): the ratio of crystal
// length to (twice) the pump Rayleigh range.
double param_A(const CrystalConfig& config);

// Pump beam as a normalized superposition of HG modes.
struct PumpSpec {
  std::vector<std::pair<ModeIndex, std::complex<double>>> components;

  static PumpSpec single(ModeIndex mode);
};

// Throws std::invalid_argument unless there is at least one component and
// the weights satisfy sum |w|^2 = 1 within 1e-12.
void validate(const PumpSpec& pump);

// Signal (j, k) and idler (u, t) HG indices of one expansion term.
struct CoeffKey {
  int j = 0;  // signal x
  int k = 0;  // signal y
  int u = 0;  // idler x
  int t = 0;  // idler y

  int order() const { return j + k + u + t; }
  int N() const { return j + u; }  // combined x order
  int M() const { return k + t; }  // combined y order

  friend auto operator<=>(const CoeffKey&, const CoeffKey&) = default;
};

enum class Method { exact, thin, oracle };

// True iff mode (j, k, u, t) can be generated from pump mode (n, m):
// j+u >= n and k+t >= m with matching parities in both axes (the pump
// Hermite order transfers to the pair up to an even number of extra
// quanta per axis).
bool conservation_allowed(const ModeIndex& pump_mode, const CoeffKey& key);

// Closed-form coefficient. Zero exactly when conservation_allowed is false;
// otherwise, with alpha = j+u-n, beta = k+t-m (both even) and
// s = (alpha+beta)/2,
//
//   C = kCalibrationConstant
//       * b(j,u,alpha) b(k,t,beta)
//       * sqrt(alpha! beta! / (A pi)) (1/2)^s atan(A)
//         / ((alpha/2)! (beta/2)!)
//       * sum_{r=0}^{s} binom(s,r) (-2/sqrt(1+A^2))^r sinc(r atan A).
//
// Throws std::range_error when intermediate magnitudes leave double range.
double coeff_exact(const CrystalConfig& config, const ModeIndex& pump_mode,
                   const CoeffKey& key);

// Thin-crystal (sinc -> 1) limit of coeff_exact:
//   C = sqrt(2 A) C_{alpha,beta} H_alpha(0) H_beta(0)
//       * b(j,u,alpha) b(k,t,beta),
// where C_{alpha,beta} H_alpha(0) H_beta(0) is the dimensionless origin
// value of the HG profile of order (alpha, beta). Zero when not allowed.
double coeff_thin(const CrystalConfig& config, const ModeIndex& pump_mode,
                  const CoeffKey& key);

// Truncated two-photon state: sparse amplitudes over keys of total order
// <= max_order, keyed lexicographically (deterministic iteration).
struct TwoPhotonAmplitudes {
  PumpSpec pump;
  CrystalConfig config;
  int max_order = 0;
  Method method = Method::exact;
  std::map<CoeffKey, std::complex<double>> amplitudes;

  double squared_norm() const;
  // Copy rescaled so that squared_norm() == 1 over the stored truncation.
  // Throws std::runtime_error when the stored norm is zero.
  TwoPhotonAmplitudes normalized() const;
};

// Amplitudes for all keys of total order <= max_order that are allowed for
// at least one pump component, summed over components with their complex
// weights. Parallelized across keys (results are bit-identical to
// build_state_serial for any thread count). Throws std::invalid_argument
// for max_order < 0 or > kMaxOrderCeiling; Method::oracle additionally
// requires max_order <= 8 (quadrature cost guard).
TwoPhotonAmplitudes build_state(const CrystalConfig& config,
                                const PumpSpec& pump, int max_order,
                                Method method);

// Single-threaded reference implementation of build_state.
TwoPhotonAmplitudes build_state_serial(const CrystalConfig& config,
                                       const PumpSpec& pump, int max_order,
                                       Method method);

// Sum of |amplitude|^2 over keys of total order <= up_to_order.
// Throws std::invalid_argument unless 0 <= up_to_order <= state.max_order.
double total_probability(const TwoPhotonAmplitudes& state, int up_to_order);

// True iff amplitude(j,k,u,t) == amplitude(u,t,j,k) for every stored key
// within 1e-12 (signal/idler exchange symmetry; holds for any single pump
// mode because the per-axis excess orders are even). Requires a state built
// from a single pump component.
bool exchange_symmetry_check(const TwoPhotonAmplitudes& state);

namespace detail {
// sum_{r=0}^{s} binom(s,r) (-2 cos(phi))^r sinc(r phi) with
// phi = atan(A), accumulated in extended precision. Satisfies
//   integral_0^phi cos((2s+1) theta) / cos(theta) dtheta
//     = (-1)^s phi * phase_matching_sum(s, A).
double phase_matching_sum(int s, double A);
}  // namespace detail

}  // namespace hgspdc

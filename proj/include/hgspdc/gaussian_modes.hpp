#pragma once

// Hermite-Gaussian (HG) beam machinery: Hermite polynomials, normalized HG
// field amplitudes and their angular spectra, Gaussian beam geometry
// (width, wavefront curvature, Gouy phase), and the change of basis to
// diagonal (45-degree-rotated) HG modes.
//
// Conventions used throughout the library:
//   - the transverse field of mode (n, m) at waist w0 is
//       HG_nm = (C_nm / w) H_n(sqrt(2) x / w) H_m(sqrt(2) y / w)
//               * exp(-(x^2+y^2)/w^2)
//               * exp(-i k (x^2+y^2)/(2 R) - i (n+m+1) eps(z)),
//     with C_nm = sqrt(2 / (2^(n+m) pi n! m!));
//   - the angular spectrum at transverse momentum q carries the prefactor
//       D_nm = (-i)^(n+m) C_nm / 2,
//     which makes every down-conversion coefficient computed downstream a
//     real number (see spdc_coeffs.hpp for the calibration discussion).

#include <complex>
#include <utility>
#include <vector>

namespace hgspdc {

using ComplexAmplitude = std::complex<double>;

struct ModeIndex {
  int n = 0;  // x index
  int m = 0;  // y index

  int order() const { return n + m; }
  friend bool operator==(const ModeIndex&, const ModeIndex&) = default;
};

// Throws std::invalid_argument on negative indices.
void validate(const ModeIndex& mode);

// Monochromatic Gaussian beam: all lengths in meters.
struct BeamGeometry {
  double wavelength = 0.0;
  double waist_w0 = 0.0;

  double wavenumber() const;     // k = 2 pi / wavelength
  double rayleigh_range() const; // z_R = k w0^2 / 2
};

// Throws std::invalid_argument unless wavelength > 0 and waist_w0 > 0.
void validate(const BeamGeometry& geom);

// H_n(x) by the stable three-term recurrence.
// Throws std::range_error if the value overflows a double.
double hermite_poly(int n, double x);

// C_nm = sqrt(2 / (2^(n+m) pi n! m!)); symmetric in n and m.
double normalization_C(const ModeIndex& mode);

// w(z) = w0 sqrt(1 + (z/z_R)^2)
double beam_width(const BeamGeometry& geom, double z);

// Wavefront curvature radius R(z) = z (1 + (z_R/z)^2); the plane-wavefront
// point z = 0 has no finite radius and raises std::domain_error.
double radius_of_curvature(const BeamGeometry& geom, double z);

// Gouy phase eps(z) = atan(z / z_R)
double gouy_phase(const BeamGeometry& geom, double z);

// Transverse field amplitude of mode (n, m) at position (x, y, z). The
// curvature phase is taken in the R -> infinity limit at z = 0.
ComplexAmplitude hg_field(const ModeIndex& mode, const BeamGeometry& geom,
                          double x, double y, double z);

// Angular spectrum v_nm(q) of mode (n, m) at plane z:
//   v_nm = w D_nm H_n(w qx / sqrt 2) H_m(w qy / sqrt 2)
//          * exp(-w^2 q^2 / 4) * exp(-i (n+m+1) eps(z)),
// normalized so that the q-plane integral of |v_nm|^2 is 1.
ComplexAmplitude angular_spectrum(const ModeIndex& mode,
                                  const BeamGeometry& geom, double qx,
                                  double qy, double z);

// Expansion coefficient b(n, m, k) of the 45-degree-rotated mode (n, m)
// over same-order HG modes: the k-th coefficient of (1-t)^n (1+t)^m scaled
// by sqrt((n+m-k)! k! / (2^(n+m) n! m!)). The polynomial part is evaluated
// in exact integer arithmetic. Throws std::domain_error unless
// 0 <= k <= n+m, std::range_error when n+m is too large for exact integers.
double dhg_coefficient(int n, int m, int k);

// The n+m+1 pairs (HG_{n+m-k, k}, b(n, m, k)), k = 0 .. n+m, including
// zero coefficients. The coefficients form a unit vector.
std::vector<std::pair<ModeIndex, double>> dhg_expand(const ModeIndex& mode);

}  // namespace hgspdc

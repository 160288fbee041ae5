#include "hgspdc/gaussian_modes.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hgspdc/math_utils.hpp"

namespace hgspdc {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kLn2 = std::numbers::ln2;
constexpr double kSqrt2 = std::numbers::sqrt2;

// (-i)^p for integer p >= 0.
std::complex<double> minus_i_pow(int p) {
  switch (p & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, -1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, 1.0};
  }
}
}  // namespace

void validate(const ModeIndex& mode) {
  if (mode.n < 0 || mode.m < 0)
    throw std::invalid_argument("ModeIndex: indices must be nonnegative");
}

double BeamGeometry::wavenumber() const { return 2.0 * kPi / wavelength; }

double BeamGeometry::rayleigh_range() const {
  return wavenumber() * waist_w0 * waist_w0 / 2.0;
}

void validate(const BeamGeometry& geom) {
  if (!(geom.wavelength > 0.0))
    throw std::invalid_argument("BeamGeometry: wavelength must be positive");
  if (!(geom.waist_w0 > 0.0))
    throw std::invalid_argument("BeamGeometry: waist must be positive");
}

double hermite_poly(int n, double x) {
  if (n < 0) throw std::domain_error("hermite_poly: negative order");
  if (n == 0) return 1.0;
  double h_prev = 1.0;       // H_0
  double h = 2.0 * x;        // H_1
  for (int i = 1; i < n; ++i) {
    const double h_next = 2.0 * x * h - 2.0 * i * h_prev;
    h_prev = h;
    h = h_next;
  }
  if (!std::isfinite(h))
    throw std::range_error("hermite_poly: value overflows double range");
  return h;
}

double normalization_C(const ModeIndex& mode) {
  validate(mode);
  const double log_c2 = kLn2 - mode.order() * kLn2 - std::log(kPi) -
                        log_factorial(mode.n) - log_factorial(mode.m);
  return std::exp(0.5 * log_c2);
}

double beam_width(const BeamGeometry& geom, double z) {
  validate(geom);
  const double ratio = z / geom.rayleigh_range();
  return geom.waist_w0 * std::sqrt(1.0 + ratio * ratio);
}

double radius_of_curvature(const BeamGeometry& geom, double z) {
  validate(geom);
  if (z == 0.0)
    throw std::domain_error("radius_of_curvature: wavefront is planar at z=0");
  const double zr = geom.rayleigh_range();
  return z * (1.0 + (zr / z) * (zr / z));
}

double gouy_phase(const BeamGeometry& geom, double z) {
  validate(geom);
  return std::atan(z / geom.rayleigh_range());
}

ComplexAmplitude hg_field(const ModeIndex& mode, const BeamGeometry& geom,
                          double x, double y, double z) {
  validate(mode);
  validate(geom);
  const double w = beam_width(geom, z);
  const double r2 = x * x + y * y;
  const double envelope = normalization_C(mode) / w *
                          hermite_poly(mode.n, kSqrt2 * x / w) *
                          hermite_poly(mode.m, kSqrt2 * y / w) *
                          std::exp(-r2 / (w * w));
  double phase = -(mode.order() + 1) * gouy_phase(geom, z);
  if (z != 0.0)
    phase -= geom.wavenumber() * r2 / (2.0 * radius_of_curvature(geom, z));
  return std::polar(1.0, phase) * envelope;
}

ComplexAmplitude angular_spectrum(const ModeIndex& mode,
                                  const BeamGeometry& geom, double qx,
                                  double qy, double z) {
  validate(mode);
  validate(geom);
  const double w = beam_width(geom, z);
  const double q2 = qx * qx + qy * qy;
  const double envelope = w * normalization_C(mode) / 2.0 *
                          hermite_poly(mode.n, w * qx / kSqrt2) *
                          hermite_poly(mode.m, w * qy / kSqrt2) *
                          std::exp(-w * w * q2 / 4.0);
  const std::complex<double> phase =
      minus_i_pow(mode.order()) *
      std::polar(1.0, -(mode.order() + 1) * gouy_phase(geom, z));
  return phase * envelope;
}

double dhg_coefficient(int n, int m, int k) {
  if (n < 0 || m < 0)
    throw std::domain_error("dhg_coefficient: negative mode index");
  if (k < 0 || k > n + m)
    throw std::domain_error("dhg_coefficient: k outside 0..n+m");
  if (n + m > 62)
    throw std::range_error("dhg_coefficient: order too large for exact sums");

  // k-th coefficient of (1-t)^n (1+t)^m, exact in 64-bit integers for all
  // orders accepted above.
  std::int64_t ck = 0;
  const int lo = std::max(0, k - m);
  const int hi = std::min(n, k);
  for (int i = lo; i <= hi; ++i) {
    const std::int64_t term = binomial_i64(n, i) * binomial_i64(m, k - i);
    ck += (i & 1) ? -term : term;
  }

  const double log_pref = 0.5 * (log_factorial(n + m - k) + log_factorial(k) -
                                 (n + m) * kLn2 - log_factorial(n) -
                                 log_factorial(m));
  return static_cast<double>(ck) * std::exp(log_pref);
}

std::vector<std::pair<ModeIndex, double>> dhg_expand(const ModeIndex& mode) {
  validate(mode);
  const int order = mode.order();
  std::vector<std::pair<ModeIndex, double>> terms;
  terms.reserve(order + 1);
  for (int k = 0; k <= order; ++k)
    terms.emplace_back(ModeIndex{order - k, k},
                       dhg_coefficient(mode.n, mode.m, k));
  return terms;
}

}  // namespace hgspdc

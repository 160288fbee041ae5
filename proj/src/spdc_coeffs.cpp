#include "hgspdc/spdc_coeffs.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hgspdc/math_utils.hpp"
#include "hgspdc/oracle.hpp"

namespace hgspdc {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kLn2 = std::numbers::ln2;
}  // namespace

double CrystalConfig::pump_wavenumber() const {
  return 2.0 * kPi / pump_wavelength;
}

double CrystalConfig::pump_rayleigh() const {
  return pump_wavenumber() * pump_waist * pump_waist / 2.0;
}

double CrystalConfig::down_wavelength() const { return 2.0 * pump_wavelength; }

double CrystalConfig::down_waist() const {
  return std::numbers::sqrt2 * pump_waist;
}

BeamGeometry CrystalConfig::pump_geometry() const {
  return BeamGeometry{pump_wavelength, pump_waist};
}

BeamGeometry CrystalConfig::down_geometry() const {
  return BeamGeometry{down_wavelength(), down_waist()};
}

void validate(const CrystalConfig& config) {
  if (!(config.crystal_length_L > 0.0))
    throw std::invalid_argument("CrystalConfig: crystal length must be > 0");
  if (!(config.pump_wavelength > 0.0))
    throw std::invalid_argument("CrystalConfig: pump wavelength must be > 0");
  if (!(config.pump_waist > 0.0))
    throw std::invalid_argument("CrystalConfig: pump waist must be > 0");
}

double param_A(const CrystalConfig& config) {
  validate(config);
  return config.crystal_length_L /
         (config.pump_wavenumber() * config.pump_waist * config.pump_waist);
}

PumpSpec PumpSpec::single(ModeIndex mode) {
  return PumpSpec{{{mode, std::complex<double>(1.0, 0.0)}}};
}

void validate(const PumpSpec& pump) {
  if (pump.components.empty())
    throw std::invalid_argument("PumpSpec: at least one component required");
  double norm = 0.0;
  for (const auto& [mode, weight] : pump.components) {
    validate(mode);
    norm += std::norm(weight);
  }
  if (std::abs(norm - 1.0) > 1e-12)
    throw std::invalid_argument(
        "PumpSpec: component weights must satisfy sum |w|^2 = 1");
}

bool conservation_allowed(const ModeIndex& pump_mode, const CoeffKey& key) {
  return key.N() >= pump_mode.n && key.M() >= pump_mode.m &&
         same_parity(key.N(), pump_mode.n) && same_parity(key.M(), pump_mode.m);
}

namespace detail {

double phase_matching_sum(int s, double A) {
  const double phi = std::atan(A);
  const long double c = -2.0L / std::sqrt(1.0L + static_cast<long double>(A) *
                                                     static_cast<long double>(A));
  // Kahan summation in long double: the terms alternate and grow as 2^r, so
  // plain double accumulation would lose several digits by s ~ 20.
  long double sum = 0.0L, comp = 0.0L;
  long double c_pow = 1.0L;
  for (int r = 0; r <= s; ++r) {
    const long double term =
        static_cast<long double>(binomial(s, r)) * c_pow *
        static_cast<long double>(sinc(r * phi));
    const long double y = term - comp;
    const long double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    c_pow *= c;
  }
  return static_cast<double>(sum);
}

}  // namespace detail

double coeff_exact(const CrystalConfig& config, const ModeIndex& pump_mode,
                   const CoeffKey& key) {
  validate(config);
  validate(pump_mode);
  if (!conservation_allowed(pump_mode, key)) return 0.0;

  const int alpha = key.N() - pump_mode.n;
  const int beta = key.M() - pump_mode.m;
  const int s = (alpha + beta) / 2;
  const double A = param_A(config);

  const double log_pref =
      0.5 * (log_factorial(alpha) + log_factorial(beta) - std::log(A * kPi)) -
      s * kLn2 - log_factorial(alpha / 2) - log_factorial(beta / 2);
  const double value = kCalibrationConstant * std::exp(log_pref) *
                       std::atan(A) * dhg_coefficient(key.j, key.u, alpha) *
                       dhg_coefficient(key.k, key.t, beta) *
                       detail::phase_matching_sum(s, A);
  if (!std::isfinite(value))
    throw std::range_error("coeff_exact: value left double range");
  return value;
}

double coeff_thin(const CrystalConfig& config, const ModeIndex& pump_mode,
                  const CoeffKey& key) {
  validate(config);
  validate(pump_mode);
  if (!conservation_allowed(pump_mode, key)) return 0.0;

  const int alpha = key.N() - pump_mode.n;
  const int beta = key.M() - pump_mode.m;
  const int s = (alpha + beta) / 2;
  const double A = param_A(config);

  // C_{alpha,beta} H_alpha(0) H_beta(0)
  //   = (-1)^s sqrt(2/pi) sqrt(alpha! beta! / 2^(alpha+beta))
  //     / ((alpha/2)! (beta/2)!),   alpha and beta even.
  const double log_origin =
      0.5 * (kLn2 - std::log(kPi) + log_factorial(alpha) +
             log_factorial(beta)) -
      s * kLn2 - log_factorial(alpha / 2) - log_factorial(beta / 2);
  const double sign = (s & 1) ? -1.0 : 1.0;
  const double value = std::sqrt(2.0 * A) * sign * std::exp(log_origin) *
                       dhg_coefficient(key.j, key.u, alpha) *
                       dhg_coefficient(key.k, key.t, beta);
  if (!std::isfinite(value))
    throw std::range_error("coeff_thin: value left double range");
  return value;
}

namespace {

std::complex<double> amplitude_for_key(const CrystalConfig& config,
                                       const PumpSpec& pump,
                                       const CoeffKey& key, Method method) {
  std::complex<double> amp = 0.0;
  for (const auto& [mode, weight] : pump.components) {
    if (!conservation_allowed(mode, key)) continue;
    double c = 0.0;
    switch (method) {
      case Method::exact:
        c = coeff_exact(config, mode, key);
        break;
      case Method::thin:
        c = coeff_thin(config, mode, key);
        break;
      case Method::oracle:
        c = coeff_quadrature_4d(config, mode, key, QuadratureSpec{}).value;
        break;
    }
    amp += weight * c;
  }
  return amp;
}

std::vector<CoeffKey> enumerate_keys(const PumpSpec& pump, int max_order) {
  std::vector<CoeffKey> keys;
  for (int j = 0; j <= max_order; ++j)
    for (int k = 0; k <= max_order - j; ++k)
      for (int u = 0; u <= max_order - j - k; ++u)
        for (int t = 0; t <= max_order - j - k - u; ++t) {
          const CoeffKey key{j, k, u, t};
          for (const auto& [mode, weight] : pump.components)
            if (conservation_allowed(mode, key)) {
              keys.push_back(key);
              break;
            }
        }
  return keys;
}

TwoPhotonAmplitudes build_state_impl(const CrystalConfig& config,
                                     const PumpSpec& pump, int max_order,
                                     Method method, bool parallel) {
  validate(config);
  validate(pump);
  if (max_order < 0)
    throw std::invalid_argument("build_state: max_order must be >= 0");
  if (max_order > kMaxOrderCeiling)
    throw std::invalid_argument("build_state: max_order exceeds ceiling");
  if (method == Method::oracle && max_order > 8)
    throw std::invalid_argument(
        "build_state: quadrature method limited to max_order <= 8");

  const std::vector<CoeffKey> keys = enumerate_keys(pump, max_order);
  std::vector<std::complex<double>> values(keys.size());

  if (parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) \
    num_threads(effective_thread_count())
#endif
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(keys.size());
         ++i)
      values[i] = amplitude_for_key(config, pump, keys[i], method);
  } else {
    for (std::size_t i = 0; i < keys.size(); ++i)
      values[i] = amplitude_for_key(config, pump, keys[i], method);
  }

  TwoPhotonAmplitudes state{pump, config, max_order, method, {}};
  // Keys were enumerated in lexicographic order; hinted insertion keeps the
  // assembly O(n) and the iteration order deterministic.
  auto hint = state.amplitudes.end();
  for (std::size_t i = 0; i < keys.size(); ++i)
    hint = state.amplitudes.emplace_hint(hint, keys[i], values[i]);
  return state;
}

}  // namespace

TwoPhotonAmplitudes build_state(const CrystalConfig& config,
                                const PumpSpec& pump, int max_order,
                                Method method) {
  return build_state_impl(config, pump, max_order, method, true);
}

TwoPhotonAmplitudes build_state_serial(const CrystalConfig& config,
                                       const PumpSpec& pump, int max_order,
                                       Method method) {
  return build_state_impl(config, pump, max_order, method, false);
}

double TwoPhotonAmplitudes::squared_norm() const {
  double norm = 0.0;
  for (const auto& [key, amp] : amplitudes) norm += std::norm(amp);
  return norm;
}

TwoPhotonAmplitudes TwoPhotonAmplitudes::normalized() const {
  const double norm = squared_norm();
  if (!(norm > 0.0))
    throw std::runtime_error("TwoPhotonAmplitudes: cannot normalize zero state");
  TwoPhotonAmplitudes result = *this;
  const double scale = 1.0 / std::sqrt(norm);
  for (auto& [key, amp] : result.amplitudes) amp *= scale;
  return result;
}

double total_probability(const TwoPhotonAmplitudes& state, int up_to_order) {
  if (up_to_order < 0)
    throw std::invalid_argument("total_probability: order must be >= 0");
  if (up_to_order > state.max_order)
    throw std::invalid_argument(
        "total_probability: order exceeds state truncation");
  double prob = 0.0;
  for (const auto& [key, amp] : state.amplitudes)
    if (key.order() <= up_to_order) prob += std::norm(amp);
  return prob;
}

bool exchange_symmetry_check(const TwoPhotonAmplitudes& state) {
  if (state.pump.components.size() != 1)
    throw std::invalid_argument(
        "exchange_symmetry_check: requires a single pump mode");
  for (const auto& [key, amp] : state.amplitudes) {
    const CoeffKey swapped{key.u, key.t, key.j, key.k};
    const auto it = state.amplitudes.find(swapped);
    if (it == state.amplitudes.end()) return false;
    if (std::abs(amp - it->second) > 1e-12) return false;
  }
  return true;
}

}  // namespace hgspdc

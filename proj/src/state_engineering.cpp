#include "hgspdc/state_engineering.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace hgspdc {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;

std::array<std::array<std::complex<double>, 2>, 2> matmul(
    const std::array<std::array<std::complex<double>, 2>, 2>& a,
    const std::array<std::array<std::complex<double>, 2>, 2>& b) {
  std::array<std::array<std::complex<double>, 2>, 2> c{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return c;
}
}  // namespace

double FirstOrderState::squared_norm() const {
  double norm = 0.0;
  for (const auto& row : amp)
    for (const auto& a : row) norm += std::norm(a);
  return norm;
}

FirstOrderState FirstOrderState::normalized() const {
  const double norm = squared_norm();
  if (!(norm > 0.0))
    throw std::runtime_error("FirstOrderState: cannot normalize zero state");
  FirstOrderState result = *this;
  const double scale = 1.0 / std::sqrt(norm);
  for (auto& row : result.amp)
    for (auto& a : row) a *= scale;
  return result;
}

double FirstOrderState::fidelity(const FirstOrderState& other) const {
  std::complex<double> overlap = 0.0;
  for (int s = 0; s < 2; ++s)
    for (int i = 0; i < 2; ++i)
      overlap += std::conj(other.amp[s][i]) * amp[s][i];
  return std::norm(overlap);
}

std::array<double, 2> FirstOrderState::reduced_eigenvalues() const {
  // rho_signal = amp amp^dagger, a 2x2 Hermitian matrix.
  const double r00 = std::norm(amp[0][0]) + std::norm(amp[0][1]);
  const double r11 = std::norm(amp[1][0]) + std::norm(amp[1][1]);
  const std::complex<double> r01 =
      amp[0][0] * std::conj(amp[1][0]) + amp[0][1] * std::conj(amp[1][1]);
  const double tr = r00 + r11;
  const double disc =
      std::sqrt(std::max(0.0, (r00 - r11) * (r00 - r11) + 4.0 * std::norm(r01)));
  return {(tr + disc) / 2.0, (tr - disc) / 2.0};
}

void validate(const FirstOrderState& state) {
  if (std::abs(state.squared_norm() - 1.0) > 1e-12)
    throw std::invalid_argument("FirstOrderState: amplitudes not normalized");
}

std::string FirstOrderElement::label() const {
  switch (kind) {
    case Kind::dove: {
      char buf[48];
      std::snprintf(buf, sizeof(buf), "dove(%g deg)",
                    angle * 180.0 / std::numbers::pi);
      return buf;
    }
    case Kind::mirror:
      return "mirror";
    default:
      return "identity";
  }
}

FirstOrderElement dove_prism(double phi) {
  FirstOrderElement element;
  element.kind = FirstOrderElement::Kind::dove;
  element.angle = phi;
  const double c = std::cos(2.0 * phi);
  const double s = std::sin(2.0 * phi);
  element.matrix = {{{-c, s}, {s, c}}};
  return element;
}

FirstOrderElement mirror() {
  FirstOrderElement element;
  element.kind = FirstOrderElement::Kind::mirror;
  element.matrix = {{{-1.0, 0.0}, {0.0, 1.0}}};
  return element;
}

FirstOrderElement identity_element() {
  FirstOrderElement element;
  element.matrix = {{{1.0, 0.0}, {0.0, 1.0}}};
  return element;
}

FirstOrderState apply(const FirstOrderState& state,
                      const FirstOrderElement& element, Arm arm) {
  FirstOrderState result;
  if (arm == Arm::signal) {
    // amp'[s'][i] = sum_s M[s'][s] amp[s][i]
    result.amp = matmul(element.matrix, state.amp);
  } else {
    // amp'[s][i'] = sum_i amp[s][i] M[i'][i]
    for (int s = 0; s < 2; ++s)
      for (int i = 0; i < 2; ++i)
        result.amp[s][i] = state.amp[s][0] * element.matrix[i][0] +
                           state.amp[s][1] * element.matrix[i][1];
  }
  return result;
}

FirstOrderState bell_state(BellTarget target) {
  FirstOrderState state;
  switch (target) {
    case BellTarget::phi_plus:
      state.amp[0][0] = kInvSqrt2;
      state.amp[1][1] = kInvSqrt2;
      break;
    case BellTarget::phi_minus:
      state.amp[0][0] = kInvSqrt2;
      state.amp[1][1] = -kInvSqrt2;
      break;
    case BellTarget::psi_plus:
      state.amp[0][1] = kInvSqrt2;
      state.amp[1][0] = kInvSqrt2;
      break;
    case BellTarget::psi_minus:
      state.amp[0][1] = kInvSqrt2;
      state.amp[1][0] = -kInvSqrt2;
      break;
  }
  return state;
}

FirstOrderState postselect_first_order(const TwoPhotonAmplitudes& state) {
  const TwoPhotonAmplitudes block = postselect(state, [](const CoeffKey& key) {
    return key.j + key.k == 1 && key.u + key.t == 1;
  });
  auto amplitude = [&block](const CoeffKey& key) -> std::complex<double> {
    const auto it = block.amplitudes.find(key);
    return it == block.amplitudes.end() ? 0.0 : it->second;
  };
  FirstOrderState result;
  result.amp[0][0] = amplitude({0, 1, 0, 1});
  result.amp[0][1] = amplitude({0, 1, 1, 0});
  result.amp[1][0] = amplitude({1, 0, 0, 1});
  result.amp[1][1] = amplitude({1, 0, 1, 0});
  return result;
}

BellRecipe bell_recipe(BellTarget target, PumpSource source,
                       const CrystalConfig& config) {
  const ModeIndex pump_mode =
      source == PumpSource::hg00 ? ModeIndex{0, 0} : ModeIndex{1, 1};
  const TwoPhotonAmplitudes state =
      build_state(config, PumpSpec::single(pump_mode), 2, Method::exact);

  BellRecipe recipe;
  recipe.state = postselect_first_order(state);

  // An HG00 pump post-selects to phi+, an HG11 pump to psi+. dove(45 deg)
  // on one arm toggles phi <-> psi; a mirror toggles + <-> -.
  const bool base_is_phi = source == PumpSource::hg00;
  const bool want_phi =
      target == BellTarget::phi_plus || target == BellTarget::phi_minus;
  const bool want_minus =
      target == BellTarget::phi_minus || target == BellTarget::psi_minus;
  if (base_is_phi != want_phi)
    recipe.pipeline.emplace_back(dove_prism(std::numbers::pi / 4.0),
                                 Arm::signal);
  if (want_minus) recipe.pipeline.emplace_back(mirror(), Arm::signal);

  for (const auto& [element, arm] : recipe.pipeline)
    recipe.state = apply(recipe.state, element, arm);

  if (recipe.state.fidelity(bell_state(target)) < 1.0 - 1e-10)
    throw std::runtime_error("bell_recipe: output failed the target check");
  return recipe;
}

FirstOrderState nonmax_pipeline(double theta, double phi,
                                const CrystalConfig& config) {
  PumpSpec pump;
  pump.components = {
      {ModeIndex{0, 2}, std::complex<double>(std::cos(theta), 0.0)},
      {ModeIndex{2, 0}, std::polar(std::sin(theta), phi)},
  };
  const TwoPhotonAmplitudes state =
      build_state(config, pump, 2, Method::exact);
  // Both surviving first-order terms share one positive coefficient, so the
  // renormalized block carries the pump weights verbatim:
  // cos(theta)|01,01> + e^{i phi} sin(theta)|10,10>.
  return postselect_first_order(state);
}

}  // namespace hgspdc

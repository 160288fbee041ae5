#include "hgspdc/entanglement.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "hgspdc/math_utils.hpp"

namespace hgspdc {

double ReducedDensity::trace() const { return F.trace(); }

int ReducedDensity::index_of(int j, int k) const {
  const auto it = std::lower_bound(basis.begin(), basis.end(),
                                   std::make_pair(j, k));
  if (it == basis.end() || *it != std::make_pair(j, k)) return -1;
  return static_cast<int>(it - basis.begin());
}

ReducedDensity reduce(const TwoPhotonAmplitudes& state) {
  if (std::abs(state.squared_norm() - 1.0) > 1e-10)
    throw std::invalid_argument(
        "reduce: state must be normalized over its truncation");

  // Group amplitudes by signal pair; the idler maps inherit the key order,
  // so every sum below runs in a fixed order.
  std::map<std::pair<int, int>,
           std::map<std::pair<int, int>, std::complex<double>>>
      rows;
  for (const auto& [key, amp] : state.amplitudes)
    rows[{key.j, key.k}][{key.u, key.t}] = amp;

  ReducedDensity rho;
  rho.basis.reserve(rows.size());
  for (const auto& [sig, idlers] : rows) rho.basis.push_back(sig);

  const int dim = static_cast<int>(rho.basis.size());
  rho.F = Eigen::MatrixXd::Zero(dim, dim);
  double max_imag = 0.0;
  for (int a = 0; a < dim; ++a) {
    const auto& row_a = rows.at(rho.basis[a]);
    for (int b = a; b < dim; ++b) {
      const auto& row_b = rows.at(rho.basis[b]);
      std::complex<double> entry = 0.0;
      for (const auto& [idler, amp_a] : row_a) {
        const auto it = row_b.find(idler);
        if (it != row_b.end()) entry += amp_a * std::conj(it->second);
      }
      max_imag = std::max(max_imag, std::abs(entry.imag()));
      rho.F(a, b) = entry.real();
      rho.F(b, a) = entry.real();
    }
  }
  if (max_imag > 1e-9)
    throw std::invalid_argument(
        "reduce: state yields a complex density matrix; only states with a "
        "real F tensor are supported");
  return rho;
}

double purity(const ReducedDensity& rho) { return rho.F.squaredNorm(); }

bool parity_block_check(const ReducedDensity& rho,
                        const ModeIndex& pump_mode) {
  validate(pump_mode);
  const int dim = static_cast<int>(rho.basis.size());
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) {
      const auto& [j, k] = rho.basis[a];
      const auto& [d, f] = rho.basis[b];
      if (same_parity(j, d) && same_parity(k, f)) continue;
      if (std::abs(rho.F(a, b)) >= 1e-12) return false;
    }
  return true;
}

WitnessVerdict csb_entanglement_witness(const ReducedDensity& rho) {
  constexpr double kPopulated = 1e-12;
  const int dim = static_cast<int>(rho.basis.size());
  for (int a = 0; a < dim; ++a) {
    if (rho.F(a, a) <= kPopulated) continue;
    for (int b = a + 1; b < dim; ++b) {
      if (rho.F(b, b) <= kPopulated) continue;
      const auto& [j, k] = rho.basis[a];
      const auto& [d, f] = rho.basis[b];
      if (same_parity(j, d) && same_parity(k, f)) continue;
      if (std::abs(rho.F(a, b)) >= kPopulated) continue;
      // F[ab]^2 = 0 < F[aa] F[bb]: strict Cauchy-Schwarz, so F cannot be
      // the rank-1 matrix of a product state.
      if (!(purity(rho) < 1.0))
        throw std::logic_error(
            "csb_entanglement_witness: witness found but purity not < 1");
      WitnessVerdict verdict;
      verdict.entangled = true;
      verdict.witness_indices = {{rho.basis[a]}, {rho.basis[b]}};
      return verdict;
    }
  }
  return WitnessVerdict{};
}

std::vector<double> reduced_eigenvalues(const ReducedDensity& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(rho.F);
  std::vector<double> values(solver.eigenvalues().data(),
                             solver.eigenvalues().data() +
                                 solver.eigenvalues().size());
  for (double& v : values) {
    if (v < 0.0 && v > -1e-12) v = 0.0;
  }
  std::sort(values.begin(), values.end(), std::greater<double>());
  return values;
}

TwoPhotonAmplitudes postselect(const TwoPhotonAmplitudes& state,
                               const std::function<bool(const CoeffKey&)>&
                                   keep) {
  TwoPhotonAmplitudes result = state;
  result.amplitudes.clear();
  for (const auto& [key, amp] : state.amplitudes)
    if (keep(key)) result.amplitudes.emplace(key, amp);
  if (result.amplitudes.empty() || !(result.squared_norm() > 0.0))
    throw std::runtime_error("postselect: nothing survives the predicate");
  return result.normalized();
}

}  // namespace hgspdc

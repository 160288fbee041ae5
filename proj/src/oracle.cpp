#include "hgspdc/oracle.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <vector>

#include "hgspdc/math_utils.hpp"

namespace hgspdc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;

std::complex<double> i_pow(int p) {
  switch (p & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

// Gauss-Hermite nodes and weights for weight exp(-x^2), by eigendecomposition
// of the Jacobi matrix. Cached per point count; the cache is guarded because
// oracle calls may come from parallel test code.
const std::pair<std::vector<double>, std::vector<double>>& gauss_hermite(
    int n) {
  static std::mutex mutex;
  static std::map<int, std::pair<std::vector<double>, std::vector<double>>>
      cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    const double off = std::sqrt((i + 1) / 2.0);
    jacobi(i, i + 1) = off;
    jacobi(i + 1, i) = off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  std::vector<double> nodes(n), weights(n);
  for (int i = 0; i < n; ++i) {
    nodes[i] = solver.eigenvalues()(i);
    const double v0 = solver.eigenvectors()(0, i);
    weights[i] = std::sqrt(kPi) * v0 * v0;
  }
  it = cache.emplace(n, std::make_pair(std::move(nodes), std::move(weights)))
           .first;
  return it->second;
}

// One integration axis: sum w_i f(q_i) approximates the line integral of f,
// with f evaluated literally (its Gaussian envelope included).
struct Grid1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// axis_waist is the waist governing the Gaussian envelope exp(-w^2 q^2 / 4)
// of the axis being integrated.
Grid1D make_grid(QuadScheme scheme, int points, double axis_waist,
                 double halfwidth) {
  Grid1D grid;
  if (scheme == QuadScheme::tensor_gauss_hermite) {
    if (points > 160)
      throw std::invalid_argument(
          "QuadratureSpec: Gauss-Hermite limited to 160 points per axis");
    const auto& [x, gw] = gauss_hermite(points);
    grid.nodes.resize(points);
    grid.weights.resize(points);
    for (int i = 0; i < points; ++i) {
      // Substitution x = axis_waist q / 2 maps the envelope onto the
      // Gauss-Hermite weight; exp(x^2) undoes the weight so the integrand
      // can be evaluated literally.
      grid.nodes[i] = 2.0 * x[i] / axis_waist;
      grid.weights[i] = gw[i] * std::exp(x[i] * x[i]) * 2.0 / axis_waist;
    }
  } else {
    const int n = (points % 2 == 0) ? points + 1 : points;  // Simpson: odd
    const double qmax = halfwidth / axis_waist;
    const double h = 2.0 * qmax / (n - 1);
    grid.nodes.resize(n);
    grid.weights.resize(n);
    for (int i = 0; i < n; ++i) {
      grid.nodes[i] = -qmax + i * h;
      double c = (i == 0 || i == n - 1) ? 1.0 : ((i % 2 == 1) ? 4.0 : 2.0);
      grid.weights[i] = c * h / 3.0;
    }
  }
  return grid;
}

// Joint-spectrum factors for one transverse axis: element (a, b) holds the
// signal/idler Hermite-Gaussian product, the pump spectrum factor at the sum
// momentum, and the quadrature weights; d2 holds the phase-mismatch
// contribution (L / 4K) (q_a - q_b)^2 of the axis.
struct AxisTables {
  std::vector<double> f;
  std::vector<double> d2;
  int size = 0;
};

AxisTables make_axis_tables(const Grid1D& grid, int sig_idx, int idl_idx,
                            int pump_idx, double wc, double wp,
                            double mismatch_scale) {
  const int n = static_cast<int>(grid.nodes.size());
  std::vector<double> h_sig(n), h_idl(n);
  for (int a = 0; a < n; ++a) {
    h_sig[a] = hermite_poly(sig_idx, wc * grid.nodes[a] / kSqrt2);
    h_idl[a] = hermite_poly(idl_idx, wc * grid.nodes[a] / kSqrt2);
  }
  AxisTables tables;
  tables.size = n;
  tables.f.resize(static_cast<std::size_t>(n) * n);
  tables.d2.resize(static_cast<std::size_t>(n) * n);
  for (int a = 0; a < n; ++a) {
    const double qa = grid.nodes[a];
    for (int b = 0; b < n; ++b) {
      const double qb = grid.nodes[b];
      const double qsum = qa + qb;
      const double qdiff = qa - qb;
      const double gauss = std::exp(-wc * wc * (qa * qa + qb * qb) / 4.0 -
                                    wp * wp * qsum * qsum / 4.0);
      tables.f[static_cast<std::size_t>(a) * n + b] =
          grid.weights[a] * grid.weights[b] * h_sig[a] * h_idl[b] *
          hermite_poly(pump_idx, wp * qsum / kSqrt2) * gauss;
      tables.d2[static_cast<std::size_t>(a) * n + b] =
          mismatch_scale * qdiff * qdiff;
    }
  }
  return tables;
}

// S = sum_{ab, cd} X_f(ab) Y_f(cd) sinc(X_d2(ab) + Y_d2(cd)), reduced in
// fixed order (per-row partials summed serially) so the result is
// bit-identical for any thread count.
double coupled_sum(const AxisTables& x, const AxisTables& y, bool parallel) {
  const std::size_t nx = x.f.size();
  const std::size_t ny = y.f.size();
  std::vector<double> partial(nx, 0.0);

  auto row = [&](std::ptrdiff_t i) {
    const double fx = x.f[i];
    if (fx == 0.0) {
      partial[i] = 0.0;
      return;
    }
    const double dx = x.d2[i];
    double acc = 0.0;
    for (std::size_t j = 0; j < ny; ++j)
      acc += y.f[j] * sinc(dx + y.d2[j]);
    partial[i] = fx * acc;
  };

  if (parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) \
    num_threads(effective_thread_count())
#endif
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(nx); ++i)
      row(i);
  } else {
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(nx); ++i)
      row(i);
  }

  double sum = 0.0;
  for (std::size_t i = 0; i < nx; ++i) sum += partial[i];
  return sum;
}

// One refinement pass: the integral estimate plus the quadrature mass
// sum |weights x integrand|, the scale against which a near-zero result is
// judged converged.
struct QuadraturePass {
  std::complex<double> value;
  double mass = 0.0;
};

QuadraturePass integrate_4d(const CrystalConfig& config,
                            const ModeIndex& pump_mode, const CoeffKey& key,
                            QuadScheme scheme, int points, double halfwidth,
                            bool parallel, long long* evaluations) {
  const double wc = config.down_waist();
  const double wp = config.pump_waist;
  const double L = config.crystal_length_L;
  const double K = config.pump_wavenumber();
  const double mismatch_scale = L / (4.0 * K);

  const Grid1D grid = make_grid(scheme, points, wc, halfwidth);
  const AxisTables x = make_axis_tables(grid, key.j, key.u, pump_mode.n, wc,
                                        wp, mismatch_scale);
  const AxisTables y = make_axis_tables(grid, key.k, key.t, pump_mode.m, wc,
                                        wp, mismatch_scale);
  *evaluations += static_cast<long long>(x.f.size()) * y.f.size();

  const double s = coupled_sum(x, y, parallel);
  const double envelope =
      (1.0 / kPi) * std::sqrt(2.0 * L / K) * wc * wc * wp *
      normalization_C({key.j, key.k}) * normalization_C({key.u, key.t}) *
      normalization_C(pump_mode) / 8.0;
  // Spectrum phases: conj(D_jk) conj(D_ut) D_nm.
  const std::complex<double> phase =
      i_pow(key.j + key.k) * i_pow(key.u + key.t) *
      std::conj(i_pow(pump_mode.order()));

  // |sinc| <= 1, so the separable table mass bounds the coupled sum.
  double mass_x = 0.0, mass_y = 0.0;
  for (const double f : x.f) mass_x += std::abs(f);
  for (const double f : y.f) mass_y += std::abs(f);

  QuadraturePass pass;
  pass.value = envelope * phase * s;
  pass.mass = std::abs(envelope) * mass_x * mass_y;
  return pass;
}

QuadratureResult refine(const std::function<QuadraturePass(int)>& run,
                        const QuadratureSpec& spec, long long* evaluations) {
  const int half_points = std::max(4, spec.points_per_axis / 2);
  const QuadraturePass coarse = run(half_points);
  const QuadraturePass fine = run(spec.points_per_axis);

  QuadratureResult result;
  result.value = fine.value.real();
  result.est_error = std::abs(fine.value.real() - coarse.value.real()) +
                     std::abs(fine.value.imag());
  result.integrand_scale = fine.mass;
  result.evaluations = *evaluations;

  // Converged when the refinement residual is small relative to the
  // integrand's own quadrature mass (which bounds |value| from above); the
  // hard floor absorbs pure roundoff on integrals that vanish by symmetry.
  if (result.est_error > spec.target_rel_error * result.integrand_scale &&
      result.est_error > 1e-14)
    throw QuadratureConvergenceError(
        "quadrature refinements disagree beyond target_rel_error");
  return result;
}

QuadratureResult quadrature_4d_impl(const CrystalConfig& config,
                                    const ModeIndex& pump_mode,
                                    const CoeffKey& key,
                                    const QuadratureSpec& spec,
                                    bool parallel) {
  validate(config);
  validate(pump_mode);
  validate(spec);
  if (key.order() > 8)
    throw std::invalid_argument(
        "coeff_quadrature_4d: key order limited to 8 (cost guard)");

  long long evaluations = 0;
  return refine(
      [&](int points) {
        return integrate_4d(config, pump_mode, key, spec.scheme, points,
                            spec.domain_halfwidth, parallel, &evaluations);
      },
      spec, &evaluations);
}

}  // namespace

void validate(const QuadratureSpec& spec) {
  if (spec.points_per_axis < 8)
    throw std::invalid_argument("QuadratureSpec: points_per_axis must be >= 8");
  if (!(spec.target_rel_error > 0.0))
    throw std::invalid_argument("QuadratureSpec: target_rel_error must be > 0");
  if (!(spec.domain_halfwidth > 0.0))
    throw std::invalid_argument("QuadratureSpec: domain_halfwidth must be > 0");
}

QuadratureResult coeff_quadrature_4d(const CrystalConfig& config,
                                     const ModeIndex& pump_mode,
                                     const CoeffKey& key,
                                     const QuadratureSpec& spec) {
  return quadrature_4d_impl(config, pump_mode, key, spec, true);
}

QuadratureResult coeff_quadrature_4d_serial(const CrystalConfig& config,
                                            const ModeIndex& pump_mode,
                                            const CoeffKey& key,
                                            const QuadratureSpec& spec) {
  return quadrature_4d_impl(config, pump_mode, key, spec, false);
}

QuadratureResult coeff_quadrature_2d(const CrystalConfig& config,
                                     const ModeIndex& pump_mode,
                                     const CoeffKey& key,
                                     const QuadratureSpec& spec) {
  validate(config);
  validate(pump_mode);
  validate(spec);
  if (key.order() > 8)
    throw std::invalid_argument(
        "coeff_quadrature_2d: key order limited to 8 (cost guard)");

  const int alpha = key.N() - pump_mode.n;
  const int beta = key.M() - pump_mode.m;
  if (alpha < 0 || beta < 0) return QuadratureResult{0.0, 0.0, 0.0, 0};

  const double wp = config.pump_waist;
  const double L = config.crystal_length_L;
  const double K = config.pump_wavenumber();
  const double mismatch_scale = L / (4.0 * K);
  const BeamGeometry pump_geom = config.pump_geometry();
  const ModeIndex excess{alpha, beta};
  const double b_product = dhg_coefficient(key.j, key.u, alpha) *
                           dhg_coefficient(key.k, key.t, beta);

  long long evaluations = 0;
  return refine(
      [&](int points) {
        const Grid1D grid =
            make_grid(spec.scheme, points, wp, spec.domain_halfwidth);
        const int n = static_cast<int>(grid.nodes.size());
        evaluations += static_cast<long long>(n) * n;
        std::complex<double> sum = 0.0;
        double mass = 0.0;
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) {
            const double px = grid.nodes[a];
            const double py = grid.nodes[b];
            const std::complex<double> term =
                grid.weights[a] * grid.weights[b] *
                std::conj(angular_spectrum(excess, pump_geom, px, py, 0.0)) *
                sinc(mismatch_scale * (px * px + py * py));
            sum += term;
            mass += std::abs(term);
          }
        const double prefactor = (1.0 / kPi) * std::sqrt(L / (2.0 * K));
        QuadraturePass pass;
        pass.value = prefactor * b_product * sum;
        pass.mass = prefactor * std::abs(b_product) * mass;
        return pass;
      },
      spec, &evaluations);
}

QuadratureResult overlap_quadrature(const ModeIndex& mode_a,
                                    const ModeIndex& mode_b,
                                    const BeamGeometry& geom,
                                    const QuadratureSpec& spec) {
  validate(mode_a);
  validate(mode_b);
  validate(geom);
  validate(spec);

  long long evaluations = 0;
  return refine(
      [&](int points) {
        // The product of the two spectra carries envelope exp(-w^2 q^2 / 2),
        // i.e. the envelope of an effective waist w sqrt(2).
        const Grid1D grid = make_grid(spec.scheme, points,
                                      geom.waist_w0 * kSqrt2,
                                      spec.domain_halfwidth);
        const int n = static_cast<int>(grid.nodes.size());
        evaluations += static_cast<long long>(n) * n;
        std::complex<double> sum = 0.0;
        double mass = 0.0;
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) {
            const double qx = grid.nodes[a];
            const double qy = grid.nodes[b];
            const std::complex<double> term =
                grid.weights[a] * grid.weights[b] *
                std::conj(angular_spectrum(mode_a, geom, qx, qy, 0.0)) *
                angular_spectrum(mode_b, geom, qx, qy, 0.0);
            sum += term;
            mass += std::abs(term);
          }
        return QuadraturePass{sum, mass};
      },
      spec, &evaluations);
}

}  // namespace hgspdc

#include "hgspdc/math_utils.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hgspdc {

namespace {

// 0! .. 20! are exactly representable in a double (20! < 2^62).
constexpr double kFactorialTable[21] = {
    1.0,
    1.0,
    2.0,
    6.0,
    24.0,
    120.0,
    720.0,
    5040.0,
    40320.0,
    362880.0,
    3628800.0,
    39916800.0,
    479001600.0,
    6227020800.0,
    87178291200.0,
    1307674368000.0,
    20922789888000.0,
    355687428096000.0,
    6402373705728000.0,
    121645100408832000.0,
    2432902008176640000.0,
};

}  // namespace

double factorial(int n) {
  if (n < 0) throw std::domain_error("factorial: negative argument");
  if (n <= 20) return kFactorialTable[n];
  return std::exp(std::lgamma(static_cast<double>(n) + 1.0));
}

double log_factorial(int n) {
  if (n < 0) throw std::domain_error("log_factorial: negative argument");
  if (n <= 20) return std::log(kFactorialTable[n]);
  return std::lgamma(static_cast<double>(n) + 1.0);
}

std::int64_t binomial_i64(int n, int k) {
  if (n < 0 || k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  // The partial products C(n-k+i, i) are integral and nondecreasing, so a
  // per-step bound check catches exactly the results that do not fit.
  __int128 result = 1;
  for (int i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
    if (result > INT64_MAX)
      throw std::range_error("binomial_i64: value exceeds 64-bit range");
  }
  return static_cast<std::int64_t>(result);
}

double binomial(int n, int k) {
  if (n < 0 || k < 0 || k > n) return 0.0;
  if (n <= 62) return static_cast<double>(binomial_i64(n, k));
  return std::exp(log_factorial(n) - log_factorial(k) - log_factorial(n - k));
}

double sinc(double x) {
  const double ax = std::abs(x);
  if (ax < 1e-6) {
    // Truncated series; the x^4 term is < 1e-25 here.
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

int effective_thread_count() {
#ifdef _OPENMP
  int count = omp_get_max_threads();
#else
  int count = 1;
#endif
  if (const char* env = std::getenv("HGSPDC_THREADS")) {
    try {
      const int cap = std::stoi(env);
      if (cap >= 1) count = std::min(count, cap);
    } catch (const std::exception&) {
      // Malformed values leave the default in place.
    }
  }
  return count < 1 ? 1 : count;
}

}  // namespace hgspdc

#pragma once

// Small numeric helpers shared across the library: exact factorials with a
// log-gamma fallback, binomial coefficients, the normalized sinc, and the
// thread-count policy for the OpenMP kernels.

#include <cstdint>

namespace hgspdc {

// n! as a double. Exact for n <= 20 (table lookup), exp(lgamma) above.
// Throws std::domain_error for n < 0.
double factorial(int n);

// ln(n!). Throws std::domain_error for n < 0.
double log_factorial(int n);

// Binomial coefficient as a double; exact whenever the integer path fits.
double binomial(int n, int k);

// Binomial coefficient in exact integer arithmetic.
// Throws std::range_error if the value cannot be represented in 64 bits.
std::int64_t binomial_i64(int n, int k);

// sin(x)/x with the removable singularity at 0 handled explicitly.
double sinc(double x);

inline bool same_parity(int a, int b) { return ((a ^ b) & 1) == 0; }
inline bool is_even(int a) { return (a & 1) == 0; }

// Number of threads parallel kernels may use: the OpenMP maximum, capped by
// the HGSPDC_THREADS environment variable when set. Always >= 1.
int effective_thread_count();

}  // namespace hgspdc

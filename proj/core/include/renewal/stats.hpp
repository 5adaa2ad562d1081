#ifndef RENEWAL_STATS_HPP
#define RENEWAL_STATS_HPP

#include <cstdint>

namespace renewal {

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
/// Series expansion for x < a + 1, continued fraction otherwise.
double regularized_gamma_p(double a, double x);

/// Upper-tail Poisson probability P(N >= n | mu), stable for mu up to 1e6
/// via the gamma identity P(N >= n) = P(a = n, x = mu).
double poisson_tail(std::int64_t n, double mu);

}  // namespace renewal

#endif

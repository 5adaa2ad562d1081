#include "renewal/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace renewal {

namespace {

// Series representation, converges quickly for x < a + 1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 10000; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-16)
            return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw std::runtime_error("incomplete gamma series failed to converge");
}

// Lentz continued fraction for Q(a, x), stable for x >= a + 1.
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16)
            return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw std::runtime_error("incomplete gamma continued fraction failed to converge");
}

}  // namespace

double regularized_gamma_p(double a, double x) {
    if (!(a > 0.0)) throw std::invalid_argument("regularized_gamma_p requires a > 0");
    if (x < 0.0) throw std::invalid_argument("regularized_gamma_p requires x >= 0");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_cf(a, x);
}

double poisson_tail(std::int64_t n, double mu) {
    if (n <= 0) return 1.0;
    if (mu <= 0.0) return 0.0;
    // P(N >= n | mu) = P(Gamma(n, 1) <= mu), the gamma-Poisson duality.
    return regularized_gamma_p(static_cast<double>(n), mu);
}

}  // namespace renewal

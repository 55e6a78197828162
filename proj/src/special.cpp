#include "bslms/special.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "bslms/errors.hpp"

namespace bslms {

namespace {

double series(double a, double x) {
    // x^a e^-x sum_k x^k / (a (a+1) ... (a+k))
    double term = 1.0 / a;
    double sum = term;
    for (int k = 1; k < 10000; ++k) {
        term *= x / (a + k);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-17) break;
    }
    return sum * std::exp(a * std::log(x) - x);
}

}  // namespace

double incomplete_gamma_lower(double a, double x) {
    const double twice = 2.0 * a;
    if (!(a > 0.0) || twice != std::round(twice) || twice > 1e6) {
        throw DomainError("incomplete_gamma_lower: order must be a positive half-integer, got " +
                          std::to_string(a));
    }
    if (!(x >= 0.0)) throw DomainError("incomplete_gamma_lower: x must be non-negative");
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return std::tgamma(a);
    if (x < a + 1.0) return series(a, x);

    const bool half = static_cast<long long>(twice) % 2 == 1;
    double b = half ? 0.5 : 1.0;
    double value = half ? std::sqrt(std::numbers::pi) * std::erf(std::sqrt(x)) : -std::expm1(-x);
    const double log_x = std::log(x);
    while (b < a) {
        value = b * value - std::exp(b * log_x - x);
        b += 1.0;
    }
    return value;
}

}  // namespace bslms

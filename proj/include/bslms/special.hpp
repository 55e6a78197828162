#pragma once

namespace bslms {

/// Lower incomplete gamma function gamma(a, x) for half-integer orders
/// a in {1/2, 1, 3/2, ...} and x >= 0.
///
/// Anchored on gamma(1/2, x) = sqrt(pi) erf(sqrt(x)) and gamma(1, x) = 1 - e^-x,
/// raised with gamma(a+1, x) = a gamma(a, x) - x^a e^-x. Where the upward
/// recurrence would cancel (x < a + 1) the power series is summed instead.
/// Throws DomainError for other orders or negative x.
double incomplete_gamma_lower(double a, double x);

}  // namespace bslms

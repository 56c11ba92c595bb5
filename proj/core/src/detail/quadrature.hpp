#pragma once

#include <functional>

namespace uat::detail {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // absolute error estimate
};

using Fn1 = std::function<double(double)>;

// Adaptive Gauss-Kronrod (or tanh-sinh when an endpoint is singular) over
// [a, b]. Throws IntegrationError when the estimate stays far above the
// requested relative tolerance.
QuadResult integrate(const Fn1& f, double a, double b, double rel_tol,
                     bool singular_ends = false);

// Integral of |h| over [a, b] for h smooth on (a, b): sign changes are
// bracketed on a sampling grid, refined by TOMS 748, and each sign-constant
// piece is integrated separately.
QuadResult integrate_abs(const Fn1& h, double a, double b, double rel_tol,
                         bool singular_ends = false);

}  // namespace uat::detail

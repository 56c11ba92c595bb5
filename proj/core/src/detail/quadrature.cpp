#include "detail/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <vector>

#include "uat/error.hpp"

namespace uat::detail {

namespace {

constexpr unsigned kMaxDepth = 40;
constexpr int kSignSamples = 32;

void check_converged(const QuadResult& r, double l1, double a, double b) {
  const double limit = std::max(1e-6 * std::abs(l1), 1e-12 * (b - a));
  if (!std::isfinite(r.value) || r.error > limit) {
    std::ostringstream msg;
    msg << "quadrature on [" << a << ", " << b << "] did not converge (error estimate "
        << r.error << ")";
    throw IntegrationError(msg.str(), r.error);
  }
}

}  // namespace

QuadResult integrate(const Fn1& f, double a, double b, double rel_tol, bool singular_ends) {
  QuadResult r;
  if (!(b > a)) return r;
  if (singular_ends) {
    boost::math::quadrature::tanh_sinh<double> ts;
    double err = 0.0;
    double l1 = 0.0;
    std::size_t levels = 0;
    r.value = ts.integrate(f, a, b, rel_tol, &err, &l1, &levels);
    // Boost reports the error of the integral over the mapped unit interval.
    r.error = err * 0.5 * (b - a);
    check_converged(r, l1, a, b);
    return r;
  }

  // Adaptive bisection on non-adaptive 15-point Gauss-Kronrod panels. Each
  // panel's error estimate from Boost is on [-1, 1], hence the half-width.
  using Panel = boost::math::quadrature::gauss_kronrod<double, 15>;
  struct Interval {
    double lo;
    double hi;
    unsigned depth;
  };
  const double abs_floor = 1e-15 * (b - a);
  std::vector<Interval> stack{{a, b, 0}};
  double l1 = 0.0;
  while (!stack.empty()) {
    const Interval iv = stack.back();
    stack.pop_back();
    double err = 0.0;
    double piece_l1 = 0.0;
    const double half = 0.5 * (iv.hi - iv.lo);
    const double value = Panel::integrate(f, iv.lo, iv.hi, 0, 0.0, &err, &piece_l1);
    err *= half;
    const double tol = std::max(rel_tol * std::abs(value), abs_floor * (iv.hi - iv.lo) / (b - a));
    if (err <= tol || iv.depth >= kMaxDepth) {
      r.value += value;
      r.error += err;
      l1 += piece_l1;
      continue;
    }
    const double mid = iv.lo + half;
    stack.push_back({mid, iv.hi, iv.depth + 1});
    stack.push_back({iv.lo, mid, iv.depth + 1});
  }
  check_converged(r, l1, a, b);
  return r;
}

QuadResult integrate_abs(const Fn1& h, double a, double b, double rel_tol, bool singular_ends) {
  QuadResult total;
  if (!(b > a)) return total;

  // Interior sampling grid; endpoints are avoided in case they are singular.
  std::vector<double> xs(kSignSamples);
  std::vector<double> hs(kSignSamples);
  for (int i = 0; i < kSignSamples; ++i) {
    xs[i] = a + (b - a) * (i + 0.5) / kSignSamples;
    hs[i] = h(xs[i]);
  }
  std::vector<double> splits{a};
  for (int i = 0; i + 1 < kSignSamples; ++i) {
    if (hs[i] == 0.0) {
      splits.push_back(xs[i]);
    } else if ((hs[i] < 0.0) != (hs[i + 1] < 0.0) && hs[i + 1] != 0.0) {
      std::uintmax_t iters = 200;
      const auto bracket = boost::math::tools::toms748_solve(
          h, xs[i], xs[i + 1], hs[i], hs[i + 1], boost::math::tools::eps_tolerance<double>(),
          iters);
      splits.push_back(0.5 * (bracket.first + bracket.second));
    }
  }
  splits.push_back(b);
  std::sort(splits.begin(), splits.end());
  splits.erase(std::unique(splits.begin(), splits.end()), splits.end());

  const auto abs_h = [&h](double x) { return std::abs(h(x)); };
  for (std::size_t i = 0; i + 1 < splits.size(); ++i) {
    const bool touches_end = singular_ends && (i == 0 || i + 2 == splits.size());
    const QuadResult piece = integrate(abs_h, splits[i], splits[i + 1], rel_tol, touches_end);
    total.value += piece.value;
    total.error += piece.error;
  }
  return total;
}

}  // namespace uat::detail

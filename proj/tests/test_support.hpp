#pragma once

// Test-only generators and independent oracles. Nothing here calls into the
// measurement engines it is used to check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "uat/indicator_spec.hpp"
#include "uat/nets.hpp"

namespace uat::testing {

inline Net random_net(std::mt19937_64& rng, std::size_t d, std::size_t n, std::size_t m,
                      ActivationKind kind, double scale = 3.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> w(n * d), b(n), a(m * n);
  for (auto& v : w) v = u(rng);
  for (auto& v : b) v = u(rng);
  for (auto& v : a) v = u(rng);
  return Net(d, n, m, std::move(w), std::move(b), std::move(a), kind);
}

inline std::vector<double> random_point(std::mt19937_64& rng, std::size_t d) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x(d);
  for (auto& v : x) v = u(rng);
  return x;
}

// Random grid spec: up to `max_cuts` cuts per axis, uniformly random labels.
inline IndicatorSpec random_spec(std::mt19937_64& rng, std::size_t d, std::size_t m,
                                 std::size_t max_cuts = 4) {
  std::uniform_int_distribution<std::size_t> ncuts(0, max_cuts);
  std::uniform_real_distribution<double> u(0.02, 0.98);
  std::vector<std::vector<double>> cuts(d);
  std::size_t cells = 1;
  for (auto& axis : cuts) {
    const std::size_t c = ncuts(rng);
    for (std::size_t i = 0; i < c; ++i) axis.push_back(u(rng));
    std::sort(axis.begin(), axis.end());
    axis.erase(std::unique(axis.begin(), axis.end()), axis.end());
    cells *= axis.size() + 1;
  }
  std::uniform_int_distribution<int> label(1, static_cast<int>(m));
  std::vector<int> labels(cells);
  for (auto& l : labels) l = label(rng);
  return IndicatorSpec(d, m, std::move(cuts), std::move(labels));
}

// Composite Simpson on [a, b] with `panels` (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      std::size_t panels) {
  if (panels % 2 == 1) ++panels;
  const double h = (b - a) / static_cast<double>(panels);
  double s = f(a) + f(b);
  for (std::size_t i = 1; i < panels; ++i) {
    s += f(a + h * static_cast<double>(i)) * (i % 2 == 1 ? 4.0 : 2.0);
  }
  return s * h / 3.0;
}

// Simpson over each interval between the given sorted breakpoints of [0,1].
inline double piecewise_simpson(const std::function<double(double)>& f,
                                std::vector<double> breaks, std::size_t panels) {
  breaks.insert(breaks.begin(), 0.0);
  breaks.push_back(1.0);
  std::sort(breaks.begin(), breaks.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (breaks[i + 1] > breaks[i]) total += simpson(f, breaks[i], breaks[i + 1], panels);
  }
  return total;
}

inline double ulp(double x) { return std::nextafter(std::abs(x), INFINITY) - std::abs(x); }

}  // namespace uat::testing

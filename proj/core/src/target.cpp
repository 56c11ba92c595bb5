#include "uat/target.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "uat/error.hpp"

namespace uat {

namespace {
constexpr double kRsqrtFloor = 1e-4;
}  // namespace

const std::vector<std::string>& builtin_target_names() {
  static const std::vector<std::string> names{"x", "x2", "sin2pi", "sign", "rsqrt"};
  return names;
}

Target1D make_target(std::string_view name) {
  Target1D t;
  t.name = std::string(name);
  if (name == "x") {
    t.eval = [](double x) { return x; };
    t.lipschitz = 1.0;
    t.integral = [](double a, double b) { return 0.5 * (b * b - a * a); };
    t.cpwl = Cpwl1D::affine(1.0, 0.0);
  } else if (name == "x2") {
    t.eval = [](double x) { return x * x; };
    t.lipschitz = 2.0;
    t.integral = [](double a, double b) { return (b * b * b - a * a * a) / 3.0; };
  } else if (name == "sin2pi") {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    t.eval = [](double x) { return std::sin(two_pi * x); };
    t.lipschitz = two_pi;
    t.integral = [](double a, double b) {
      return (std::cos(two_pi * a) - std::cos(two_pi * b)) / two_pi;
    };
  } else if (name == "sign") {
    t.eval = [](double x) { return x < 0.5 ? -1.0 : (x > 0.5 ? 1.0 : 0.0); };
    t.kinks = {0.5};
    t.integral = [](double a, double b) {
      const auto left = [](double u) { return std::min(u, 0.5); };
      const auto right = [](double u) { return std::max(u, 0.5); };
      return -(left(b) - left(a)) + (right(b) - right(a));
    };
    t.step = StepFn1D({0.0, 0.5, 1.0}, {-1.0, 1.0});
  } else if (name == "rsqrt") {
    t.eval = [](double x) { return 1.0 / std::sqrt(std::max(x, kRsqrtFloor)); };
    t.kinks = {kRsqrtFloor};
    t.integral = [](double a, double b) {
      // Antiderivative: x / sqrt(floor) below the floor, 2 sqrt(x) - sqrt(floor) above.
      const auto F = [](double u) {
        return u <= kRsqrtFloor ? u / std::sqrt(kRsqrtFloor)
                               : 2.0 * std::sqrt(u) - std::sqrt(kRsqrtFloor);
      };
      return F(b) - F(a);
    };
  } else {
    throw InvalidInputError("unknown target '" + std::string(name) +
                            "' (expected x|x2|sin2pi|sign|rsqrt)");
  }
  return t;
}

Target1D target_from_samples(std::vector<std::pair<double, double>> samples, std::string name) {
  if (samples.empty()) throw InvalidInputError("samples target: no samples");
  std::sort(samples.begin(), samples.end());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!std::isfinite(samples[i].first) || !std::isfinite(samples[i].second)) {
      throw DomainError("samples target: non-finite sample");
    }
    if (i > 0 && samples[i].first == samples[i - 1].first) {
      throw InvalidInputError("samples target: duplicate abscissa");
    }
  }
  // Restrict to [0,1] and pin the endpoints so the interpolant is a Cpwl1D.
  std::vector<double> xs;
  std::vector<double> ys;
  const auto interp = [&samples](double x) {
    if (x <= samples.front().first) return samples.front().second;
    if (x >= samples.back().first) return samples.back().second;
    const auto it = std::upper_bound(samples.begin(), samples.end(), x,
                                     [](double v, const auto& s) { return v < s.first; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double s = (x - lo.first) / (hi.first - lo.first);
    return lo.second + s * (hi.second - lo.second);
  };
  xs.push_back(0.0);
  ys.push_back(interp(0.0));
  for (const auto& [x, y] : samples) {
    if (x > 0.0 && x < 1.0) {
      xs.push_back(x);
      ys.push_back(y);
    }
  }
  xs.push_back(1.0);
  ys.push_back(interp(1.0));

  Target1D t;
  t.name = std::move(name);
  t.cpwl = Cpwl1D(xs, ys);
  t.kinks.assign(xs.begin() + 1, xs.end() - 1);
  t.eval = [c = *t.cpwl](double x) { return c(x); };
  return t;
}

Target1D load_samples_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("cannot open samples file " + path.string());
  std::vector<std::pair<double, double>> samples;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double x = 0.0;
    double y = 0.0;
    if (!(row >> x >> y)) {
      if (line_no == 1) continue;  // header
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected x,value");
    }
    samples.emplace_back(x, y);
  }
  return target_from_samples(std::move(samples), path.filename().string());
}

}  // namespace uat

#include "uat/approx1d.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "detail/parallel.hpp"
#include "detail/quadrature.hpp"
#include "uat/error.hpp"
#include "uat/surgery.hpp"

namespace uat {

namespace {

constexpr double kCellRelTol = 1e-10;

double cell_average(const Target1D& f, double a, double b) {
  if (f.integral) return f.integral(a, b) / (b - a);

  std::vector<double> splits{a};
  for (double p : f.kinks) {
    if (p > a && p < b) splits.push_back(p);
  }
  for (double p : f.singularities) {
    if (p > a && p < b) splits.push_back(p);
  }
  splits.push_back(b);
  std::sort(splits.begin(), splits.end());
  splits.erase(std::unique(splits.begin(), splits.end()), splits.end());

  const auto singular_at = [&f](double p) {
    return std::find(f.singularities.begin(), f.singularities.end(), p) != f.singularities.end();
  };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < splits.size(); ++i) {
    const bool singular = singular_at(splits[i]) || singular_at(splits[i + 1]);
    total += detail::integrate(f.eval, splits[i], splits[i + 1], kCellRelTol, singular).value;
  }
  return total / (b - a);
}

}  // namespace

StepFn1D step_approximate(const Target1D& f, std::size_t k) {
  if (k == 0) throw DomainError("step_approximate: k must be >= 1");
  std::vector<double> values(k);
  const double kd = static_cast<double>(k);
  detail::parallel_for(k, [&](std::size_t t) {
    values[t] = cell_average(f, static_cast<double>(t) / kd, static_cast<double>(t + 1) / kd);
  });
  return StepFn1D::uniform(std::move(values));
}

Sigma1Construction step_to_sigma1_net(const StepFn1D& step, double ramp_budget) {
  if (!(ramp_budget > 0.0) || !std::isfinite(ramp_budget)) {
    throw DomainError("step_to_sigma1_net: ramp budget must be positive and finite");
  }
  const auto& cuts = step.cuts();
  const auto& values = step.values();

  std::vector<std::size_t> jumps;
  for (std::size_t t = 0; t + 1 < values.size(); ++t) {
    if (values[t + 1] != values[t]) jumps.push_back(t);
  }
  const std::size_t n = jumps.size() + 1;
  std::vector<double> weights(n, 0.0);
  std::vector<double> biases(n, 0.0);
  std::vector<double> alphas(n, 0.0);

  // Saturated unit: sigma1(0 * x + 1) == 1 on all of [0,1].
  biases[0] = 1.0;
  alphas[0] = values.front();

  Sigma1Construction out{Net(1, 1, 1, {0.0}, {1.0}, {values.front()}, ActivationKind::Sigma1)};
  out.jump_count = jumps.size();
  if (!jumps.empty()) {
    const double share = ramp_budget / static_cast<double>(jumps.size());
    for (std::size_t u = 0; u < jumps.size(); ++u) {
      const std::size_t t = jumps[u];
      const double c = cuts[t + 1];
      const double h = values[t + 1] - values[t];
      const double narrowest = std::min(cuts[t + 1] - cuts[t], cuts[t + 2] - cuts[t + 1]);
      const double slope = std::max(std::abs(h) / (4.0 * share), 1.0 / narrowest);
      weights[u + 1] = slope;
      biases[u + 1] = -slope * c;
      alphas[u + 1] = h;
      out.ramp_error += std::abs(h) / (4.0 * slope);
      out.window_measure += 1.0 / slope;
      out.max_jump = std::max(out.max_jump, std::abs(h));
    }
  }
  out.net = Net(1, n, 1, std::move(weights), std::move(biases), std::move(alphas),
                ActivationKind::Sigma1);
  return out;
}

Approx1DResult build_relu_approx_1d(const Target1D& f, double eps, const Approx1DOptions& options) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw DomainError("build_relu_approx_1d: eps must be positive and finite");
  }
  const double step_budget = 0.5 * eps;
  const double ramp_budget = 0.5 * eps;

  std::size_t k = 1;
  double step_bound = 0.0;
  std::optional<StepFn1D> step;
  std::optional<L1Report> step_measured;
  for (;;) {
    if (f.lipschitz) {
      step_bound = *f.lipschitz / (4.0 * static_cast<double>(k));
      if (step_bound < step_budget) {
        step = step_approximate(f, k);
        break;
      }
    } else {
      StepFn1D candidate = step_approximate(f, k);
      L1Report err = l1_distance_1d(f, candidate);
      step_bound = err.upper();
      if (step_bound < step_budget) {
        step = std::move(candidate);
        step_measured = err;
        break;
      }
    }
    if (k * 2 > options.max_cells) {
      std::ostringstream msg;
      msg << "build_relu_approx_1d: step stage error " << step_bound << " at " << k
          << " cells does not meet budget " << step_budget << " (cell cap " << options.max_cells
          << ")";
      throw BudgetInfeasibleError(msg.str(), step_bound);
    }
    k *= 2;
  }

  // Aim slightly under the ramp budget so rounding in the realized net cannot
  // push the stage past it.
  const Sigma1Construction ramps = step_to_sigma1_net(*step, ramp_budget * (1.0 - 1e-9));
  Net relu_net = sigma1_expand_to_relu(ramps.net);
  const Cpwl1D realized = net_to_cpwl_1d(relu_net);
  const double ramp_bound = std::max(ramps.ramp_error, exact_l1_step_vs_cpwl(*step, realized).value);
  L1Report measured = l1_distance_1d(f, realized);
  if (!(measured.upper() < eps)) {
    std::ostringstream msg;
    msg << "build_relu_approx_1d: measured error " << measured.upper() << " is not below eps "
        << eps;
    throw BudgetInfeasibleError(msg.str(), measured.upper());
  }

  ApproxCertificate cert;
  cert.requested_eps = eps;
  cert.mode = CertificateMode::Certified;
  cert.stages.push_back({"step", step_budget, step_bound});
  cert.stages.push_back({"ramp", ramp_budget, ramp_bound});
  cert.details.emplace_back("cells", static_cast<double>(k));
  cert.details.emplace_back("jumps", static_cast<double>(ramps.jump_count));
  cert.details.emplace_back("hidden_units", static_cast<double>(relu_net.hidden_count()));
  if (step_measured) cert.details.emplace_back("step_measured_l1", step_measured->value);
  cert.details.emplace_back("measured_l1", measured.value);

  return Approx1DResult{std::move(relu_net), std::move(cert), std::move(*step), k, measured};
}

}  // namespace uat

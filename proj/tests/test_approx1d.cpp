#include <doctest.h>

#include <cmath>

#include "uat/approx1d.hpp"
#include "uat/error.hpp"
#include "uat/measure.hpp"
#include "uat/surgery.hpp"
#include "uat/target.hpp"

using namespace uat;

namespace {

double detail_value(const ApproxCertificate& cert, const std::string& key) {
  for (const auto& [k, v] : cert.details) {
    if (k == key) return v;
  }
  FAIL("missing certificate detail " << key);
  return 0.0;
}

Target1D constant_target(double c) {
  Target1D t;
  t.name = "constant";
  t.eval = [c](double) { return c; };
  t.lipschitz = 0.0;
  t.integral = [c](double a, double b) { return c * (b - a); };
  return t;
}

}  // namespace

TEST_CASE("step_approximate examples") {
  const Target1D x = make_target("x");
  const StepFn1D s2 = step_approximate(x, 2);
  CHECK(s2.cuts() == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(s2.values() == std::vector<double>{0.25, 0.75});
  CHECK(l1_distance_1d(x, s2).value == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(l1_distance_1d(x, step_approximate(x, 4)).value == doctest::Approx(0.0625).epsilon(1e-12));
  for (std::size_t k : {1u, 3u, 7u, 64u, 1000u}) {
    CHECK(std::abs(l1_distance_1d(x, step_approximate(x, k)).value - 0.25 / static_cast<double>(k)) <= 1e-12);
  }
  const StepFn1D c = step_approximate(constant_target(0.7), 5);
  for (double v : c.values()) CHECK(v == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(l1_distance_1d(constant_target(0.7), c).value <= 1e-15);
}

TEST_CASE("step_approximate without an integral hook uses quadrature") {
  Target1D t = make_target("x2");
  t.integral = nullptr;
  const StepFn1D s = step_approximate(t, 4);
  for (std::size_t i = 0; i < 4; ++i) {
    const double a = i / 4.0, b = (i + 1) / 4.0;
    CHECK(s.values()[i] == doctest::Approx((b * b * b - a * a * a) / 3.0 / (b - a)).epsilon(1e-12));
  }
}

TEST_CASE("step_to_sigma1_net single jump") {
  const StepFn1D step({0.0, 0.5, 1.0}, {0.0, 1.0});
  const Sigma1Construction c = step_to_sigma1_net(step, 0.025);
  CHECK(c.jump_count == 1);
  CHECK(c.net.hidden_count() == 2);
  CHECK(c.net.hidden_weight(1, 0) == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(c.ramp_error == doctest::Approx(0.025).epsilon(1e-15));
  const double exact = exact_l1_step_vs_cpwl(step, net_to_cpwl_1d(sigma1_expand_to_relu(c.net))).value;
  CHECK(std::abs(exact - 0.025) <= 1e-12);
  CHECK(c.window_measure == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(c.max_jump == 1.0);

  for (double s : {2.0, 7.0, 40.0, 1000.0}) {
    const Sigma1Construction r = step_to_sigma1_net(step, 1.0 / (4.0 * s));
    const double e = exact_l1_step_vs_cpwl(step, net_to_cpwl_1d(sigma1_expand_to_relu(r.net))).value;
    CHECK(std::abs(e - 1.0 / (4.0 * s)) <= 1e-12);
  }
}

TEST_CASE("step_to_sigma1_net constant step and errors") {
  const StepFn1D flat = StepFn1D::uniform({0.4, 0.4, 0.4});
  const Sigma1Construction c = step_to_sigma1_net(flat, 0.01);
  CHECK(c.jump_count == 0);
  CHECK(c.net.hidden_count() == 1);
  CHECK(c.ramp_error == 0.0);
  for (double x : {0.0, 0.3, 1.0}) CHECK(eval_net(c.net, std::span<const double>(&x, 1))[0] == 0.4);
  CHECK_THROWS_AS(step_to_sigma1_net(flat, 0.0), DomainError);
}

TEST_CASE("step_to_sigma1_net two jumps share the budget") {
  const StepFn1D step({0.0, 0.25, 0.75, 1.0}, {0.0, 1.0, 0.0});
  const Sigma1Construction c = step_to_sigma1_net(step, 0.01);
  REQUIRE(c.jump_count == 2);
  CHECK(c.net.hidden_weight(1, 0) == doctest::Approx(50.0).epsilon(1e-15));
  CHECK(c.net.hidden_weight(2, 0) == doctest::Approx(50.0).epsilon(1e-15));
  const double exact = exact_l1_step_vs_cpwl(step, net_to_cpwl_1d(sigma1_expand_to_relu(c.net))).value;
  CHECK(exact == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("narrow cells steepen ramps") {
  const StepFn1D step({0.0, 0.5, 0.51, 1.0}, {0.0, 1.0, 0.0});
  const Sigma1Construction c = step_to_sigma1_net(step, 0.2);
  const Cpwl1D g = net_to_cpwl_1d(sigma1_expand_to_relu(c.net));
  CHECK(exact_l1_step_vs_cpwl(step, g).value <= 0.2 + 1e-15);
  CHECK(exact_l1_step_vs_cpwl(step, g).value == doctest::Approx(c.ramp_error).epsilon(1e-12));
  // The narrow middle cell keeps its value at its centre.
  CHECK(g(0.505) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("build_relu_approx_1d examples") {
  const Approx1DResult x = build_relu_approx_1d(make_target("x"), 0.1);
  CHECK(x.cells >= 5);
  CHECK(x.certificate.stages.size() == 2);
  CHECK(x.certificate.stages[0].name == "step");
  CHECK(x.certificate.stages[0].budget == 0.05);
  CHECK(x.certificate.stages[0].achieved <= 0.05);
  CHECK(x.certificate.stages[1].achieved <= 0.05);
  CHECK(x.measured.value < 0.1);
  CHECK(x.measured.method == L1Method::ExactCpwl);

  Target1D ramp;
  ramp.name = "sigma1(2x-1)";
  ramp.eval = [](double t) { return sigma1(2.0 * t - 1.0); };
  ramp.lipschitz = 2.0;
  ramp.kinks = {0.25, 0.75};
  ramp.cpwl = Cpwl1D({0.0, 0.25, 0.75, 1.0}, {0.0, 0.0, 1.0, 1.0});
  CHECK(build_relu_approx_1d(ramp, 1e-3).measured.value < 1e-3);

  CHECK(build_relu_approx_1d(make_target("sign"), 0.05).measured.value < 0.05);
}

TEST_CASE("certificate soundness sweep") {
  for (const std::string& name : builtin_target_names()) {
    const Target1D f = make_target(name);
    for (double eps : {0.2, 0.05, 0.01}) {
      CAPTURE(name);
      CAPTURE(eps);
      const Approx1DResult r = build_relu_approx_1d(f, eps);
      CHECK(r.certificate.consistent());
      CHECK(r.measured.upper() <= r.certificate.total_achieved() + 1e-12);
      CHECK(r.certificate.total_achieved() <= eps);
      CHECK(r.measured.upper() < eps);
      // Stage additivity.
      const double step_err = l1_distance_1d(f, r.step).upper();
      CHECK(r.measured.value <= step_err + r.certificate.stages[1].achieved + 1e-12);
      // Hidden-unit accounting.
      const double jumps = detail_value(r.certificate, "jumps");
      CHECK(r.net.hidden_count() == static_cast<std::size_t>(2.0 * (jumps + 1.0)));
      CHECK(r.net.activation() == ActivationKind::ReLU);
    }
  }
}

TEST_CASE("step error is non-increasing under refinement") {
  for (const char* name : {"x", "x2", "rsqrt"}) {
    const Target1D f = make_target(name);
    double last = INFINITY;
    for (std::size_t k = 1; k <= 1024; k *= 2) {
      const double e = l1_distance_1d(f, step_approximate(f, k)).value;
      CHECK(e <= last);
      last = e;
    }
  }
}

TEST_CASE("infeasible budgets report the achieved error") {
  Approx1DOptions opts;
  opts.max_cells = 64;
  try {
    build_relu_approx_1d(make_target("x"), 1e-6, opts);
    FAIL("expected BudgetInfeasibleError");
  } catch (const BudgetInfeasibleError& e) {
    CHECK(e.achieved() > 1e-6);
    CHECK(e.achieved() < 0.01);
  }
  CHECK_THROWS_AS(build_relu_approx_1d(make_target("x"), 0.0), DomainError);
}

TEST_CASE("tabulated targets go through the exact path") {
  const Target1D t = target_from_samples({{0.0, 0.0}, {0.3, 1.0}, {1.0, -0.5}});
  const Approx1DResult r = build_relu_approx_1d(t, 0.02);
  CHECK(r.measured.method == L1Method::ExactCpwl);
  CHECK(r.measured.value < 0.02);
}

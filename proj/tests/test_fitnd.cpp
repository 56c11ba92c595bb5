#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "test_support.hpp"
#include "uat/error.hpp"
#include "uat/fitnd.hpp"
#include "uat/surgery.hpp"

using namespace uat;

namespace {

const Field kIdentity = [](std::span<const double> x) { return x[0]; };
const Field kProduct = [](std::span<const double> x) { return x[0] * x[1]; };

double median_error(const Field& f, std::size_t dim, std::size_t hidden) {
  std::vector<double> v;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    FitConfig cfg;
    cfg.hidden_count = hidden;
    cfg.seed = seed;
    cfg.eval_samples = 50000;
    v.push_back(fit_random_features(f, dim, cfg).reports[0].value);
  }
  std::sort(v.begin(), v.end());
  return v[2];
}

}  // namespace

TEST_CASE("d = 1 identity fit stays under its regression baseline") {
  FitConfig cfg;
  cfg.hidden_count = 32;
  cfg.train_samples = 512;
  cfg.seed = 1;
  const FitResult r = fit_random_features(kIdentity, 1, cfg);
  REQUIRE(r.reports.size() == 1);
  const L1Report& rep = r.reports[0];
  CHECK(rep.method == L1Method::MonteCarlo);
  CHECK(rep.n == cfg.eval_samples);
  CHECK(rep.value < 0.02);
  // First verified run: 7.27502e-07 with CI 1.78e-08.
  CHECK(rep.value <= 7.27502e-07 * (1.0 + 1e-5) + rep.ci_halfwidth.value());
}

TEST_CASE("zero target gives zero output weights") {
  FitConfig cfg;
  cfg.hidden_count = 40;
  cfg.seed = 2;
  cfg.eval_samples = 1000;
  const FitResult r = fit_random_features([](std::span<const double>) { return 0.0; }, 3, cfg);
  for (double a : r.net.output_weights()) CHECK(a == 0.0);
  CHECK(r.reports[0].value == 0.0);
}

TEST_CASE("more hidden units fit a product better") {
  CHECK(median_error(kProduct, 2, 256) < median_error(kProduct, 2, 16));
}

TEST_CASE("fits are deterministic in the config") {
  FitConfig cfg;
  cfg.hidden_count = 50;
  cfg.seed = 11;
  cfg.eval_samples = 2000;
  const FitResult a = fit_random_features(kProduct, 2, cfg);
  const FitResult b = fit_random_features(kProduct, 2, cfg);
  CHECK(a.net == b.net);
  CHECK(a.reports[0].value == b.reports[0].value);
  cfg.seed = 12;
  CHECK_FALSE(fit_random_features(kProduct, 2, cfg).net == a.net);
}

TEST_CASE("hidden layer follows the sampling ranges") {
  FitConfig cfg;
  cfg.hidden_count = 500;
  cfg.weight_scale = 2.5;
  cfg.seed = 4;
  const Net layer = random_feature_layer(3, 2, cfg);
  for (double w : layer.hidden_weights()) CHECK(std::abs(w) <= 2.5);
  for (double b : layer.hidden_biases()) CHECK(std::abs(b) <= 2.5 * std::sqrt(3.0));
  const auto [lo, hi] = std::minmax_element(layer.hidden_weights().begin(), layer.hidden_weights().end());
  CHECK(*lo < -2.0);
  CHECK(*hi > 2.0);
}

TEST_CASE("normal equations are solved to the gradient tolerance") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    FitConfig cfg;
    cfg.hidden_count = 20 + 30 * seed;
    cfg.seed = seed;
    cfg.eval_samples = 0;
    const FitResult r = fit_random_features(kProduct, 2, cfg);
    CHECK(r.reports.empty());
    CHECK(r.gradient_sup <= 1e-8 * (1.0 + r.objective_scale));
  }
}

TEST_CASE("multi-output fits share one hidden layer") {
  FitConfig cfg;
  cfg.hidden_count = 30;
  cfg.seed = 5;
  cfg.eval_samples = 1000;
  const VectorField f = [](std::span<const double> x) { return std::vector<double>{x[0], x[1], 1.0}; };
  const FitResult r = fit_random_features(f, 2, 3, cfg);
  const Net layer = random_feature_layer(2, 3, cfg);
  CHECK(r.net.output_count() == 3);
  CHECK(r.net.hidden_weights() == layer.hidden_weights());
  CHECK(r.net.hidden_biases() == layer.hidden_biases());
  CHECK(r.reports.size() == 3);
}

TEST_CASE("ridge zero with rank-deficient features is a solver error") {
  FitConfig cfg;
  cfg.hidden_count = 64;
  cfg.train_samples = 10;
  cfg.ridge = 0.0;
  cfg.eval_samples = 0;
  CHECK_THROWS_AS(fit_random_features(kIdentity, 1, cfg), SolverError);
  cfg.ridge = 1e-8;
  CHECK_NOTHROW(fit_random_features(kIdentity, 1, cfg));
}

TEST_CASE("config validation") {
  FitConfig cfg;
  cfg.hidden_count = 0;
  CHECK_THROWS_AS(fit_random_features(kIdentity, 1, cfg), DomainError);
  cfg = FitConfig{};
  cfg.ridge = -1.0;
  CHECK_THROWS_AS(fit_random_features(kIdentity, 1, cfg), DomainError);
  cfg = FitConfig{};
  CHECK_THROWS_AS(fit_random_features(kIdentity, 0, cfg), ShapeError);
}

TEST_CASE("indicator fit on a d = 2 half split") {
  const IndicatorSpec half(2, 2, {{0.5}, {}}, {1, 2});
  FitConfig cfg;
  cfg.hidden_count = 256;
  cfg.seed = 1;
  cfg.eval_samples = 100000;
  const IndicatorFit fit = fit_indicator_softmax(half, 0.1, cfg);
  CHECK(fit.success);
  CHECK(fit.net.softmax_head());
  REQUIRE(fit.per_class.size() == 2);
  REQUIRE(fit.fit_stage.size() == 2);
  for (const auto& r : fit.per_class) CHECK(r.upper() < 0.1);

  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    const auto p = eval_net(fit.net, uat::testing::random_point(rng, 2));
    CHECK(std::abs(p[0] + p[1] - 1.0) <= 1e-12);
  }
}

TEST_CASE("indicator fit with an empty class") {
  const IndicatorSpec cover(1, 2, {{}}, {1});
  FitConfig cfg;
  cfg.hidden_count = 32;
  cfg.seed = 3;
  cfg.eval_samples = 10000;
  const IndicatorFit fit = fit_indicator_softmax(cover, 0.1, cfg);
  CHECK(fit.per_class[1].value < 1e-6);
  CHECK(fit.success);
}

TEST_CASE("indicator fit reports without throwing when eps is tight") {
  const IndicatorSpec half(2, 2, {{0.5}, {}}, {1, 2});
  FitConfig cfg;
  cfg.hidden_count = 8;
  cfg.seed = 1;
  cfg.eval_samples = 5000;
  const IndicatorFit fit = fit_indicator_softmax(half, 0.001, cfg);
  CHECK_FALSE(fit.success);
  CHECK(fit.per_class.size() == 2);
  for (const auto& r : fit.per_class) {
    CHECK(r.value >= 0.0);
    CHECK(r.ci_halfwidth.has_value());
  }
}

// Copyright 2026 The phidiv Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <memory>
#include <vector>

#include "phidiv/experiments.hpp"
#include "oracles.hpp"

using Catch::Approx;
using namespace phidiv;

namespace {

MixtureSpec dense_boundary_spec(std::uint64_t n) {
  return {scale_exponential_family(), 0.1, 0.4, n, ThetaScale::DensePower, std::nullopt};
}

}  // namespace

TEST_CASE("wilson interval matches reference values", "[experiments]") {
  // statsmodels proportion_confint(method="wilson", alpha=0.01)
  const auto a = wilson_interval(10, 200);
  CHECK(a.lo == Approx(0.02280821829328812).epsilon(1e-12));
  CHECK(a.hi == Approx(0.10609012869042066).epsilon(1e-12));
  CHECK(wilson_interval(0, 50).lo == 0.0);
  CHECK(wilson_interval(0, 50).hi == Approx(0.11715209171762796).epsilon(1e-12));
  CHECK(wilson_interval(50, 50).hi == 1.0);
  CHECK_THROWS_AS(wilson_interval(3, 0), DomainError);
  CHECK_THROWS_AS(wilson_interval(4, 3), DomainError);
}

TEST_CASE("run_divergence_test on the two-point example", "[experiments]") {
  const auto table = mc_null_table(2, 2.0, 200, 3);
  const auto sample = SortedPValueSample::from_sorted({0.25, 0.75});
  const auto out = run_divergence_test(sample, 2.0, table, 0.05);
  CHECK(out.statistic == Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(out.reject == (out.statistic > out.critical));
  CHECK(std::isnan(out.asymptotic_critical));

  CHECK_THROWS_AS(run_divergence_test(sample, 1.0, table, 0.05), DomainError);
  const auto other_n = mc_null_table(3, 2.0, 200, 3);
  CHECK_THROWS_AS(run_divergence_test(sample, 2.0, other_n, 0.05), DomainError);
}

TEST_CASE("p-values at the table extremes", "[experiments]") {
  const std::uint64_t n = 50;
  const std::uint64_t reps = 199;
  const auto table = mc_null_table(n, 2.0, reps, 9);

  // Evenly spaced: smaller than any null draw can be.
  std::vector<double> even(n);
  for (std::size_t i = 0; i < n; ++i) even[i] = (i + 0.5) / n;
  const auto low = run_divergence_test(SortedPValueSample::from_sorted(even), 2.0, table, 0.05);
  REQUIRE(low.statistic < table.sorted_stats.front());
  CHECK(low.mc_pvalue == 1.0);
  CHECK_FALSE(low.reject);

  // Everything piled near zero.
  std::vector<double> piled(n);
  for (std::size_t i = 0; i < n; ++i) piled[i] = 1e-9 * (i + 1);
  const auto high =
      run_divergence_test(SortedPValueSample::from_sorted(piled), 2.0, table, 0.01);
  REQUIRE(high.statistic > table.sorted_stats.back());
  CHECK(high.mc_pvalue == Approx(1.0 / (reps + 1)).epsilon(1e-15));
  CHECK(high.reject);
}

TEST_CASE("rejection agrees with p-value at the table alpha", "[experiments]") {
  const std::uint64_t n = 100;
  for (std::uint64_t reps : {199ULL, 250ULL, 1000ULL}) {
    const auto table = mc_null_table(n, 0.5, reps, 77);
    for (double alpha : {0.01, 0.05, 0.1, 0.2}) {
      for (std::uint64_t rep = 0; rep < 200; ++rep) {
        const auto sample = null_replicate(n, 123, rep);
        const auto out = run_divergence_test(sample, 0.5, table, alpha);
        INFO("reps=" << reps << " alpha=" << alpha << " rep=" << rep);
        CHECK(out.reject == (out.mc_pvalue <= alpha));
      }
    }
  }
}

TEST_CASE("calibrated test holds its size on fresh null data", "[experiments]") {
  const std::uint64_t n = 500;
  const double alpha = 0.05;
  const auto table = mc_null_table(n, 2.0, 2000, 1001);
  std::uint64_t rejections = 0;
  const std::uint64_t reps = 2000;
  for (std::uint64_t rep = 0; rep < reps; ++rep) {
    rejections += run_divergence_test(null_replicate(n, 2002, rep), 2.0, table, alpha).reject;
  }
  const auto ci = wilson_interval(rejections, reps);
  INFO("rate=" << static_cast<double>(rejections) / reps);
  CHECK(ci.lo <= alpha);
  CHECK(alpha <= ci.hi);
}

TEST_CASE("log mixture ratio is accurate everywhere", "[experiments]") {
  for (double eps : {1e-12, 1e-4, 0.3, 0.999}) {
    for (double l : {-800.0, -30.0, -1e-8, 0.0, 1e-9, 0.5, 3.0, 40.0, 700.0, 1000.0}) {
      const long double naive =
          std::log((1.0L - eps) + static_cast<long double>(eps) * std::exp(static_cast<long double>(l)));
      const double got = detail::log_mixture_ratio(eps, l);
      INFO("eps=" << eps << " l=" << l);
      CHECK(std::isfinite(got));
      CHECK(std::abs(got - static_cast<double>(naive)) <=
            1e-13 * std::max(1.0, std::abs(static_cast<double>(naive))) + 1e-300);
    }
  }
  CHECK(detail::log_mixture_ratio(0.0, 5.0) == 0.0);
}

TEST_CASE("log likelihood ratio degenerate cases", "[experiments]") {
  auto spec = dense_boundary_spec(1000);
  const auto sample = sample_mixture(spec, 5, 0);

  auto null_spec = spec;
  null_spec.epsilon_override = 0.0;
  CHECK(log_likelihood_ratio(sample.data, null_spec) == 0.0);

  // Signal law equal to the noise law.
  MixtureSpec same{std::make_shared<FixedSignalFamily>(
                       "same", std::make_shared<ExponentialDistribution>(),
                       std::make_shared<ExponentialDistribution>(), SignalTail::Lower,
                       [](double) { return 0.0; }),
                   0.75, 0.0, 1000, ThetaScale::SparsePower, std::nullopt};
  CHECK(log_likelihood_ratio(sample.data, same) == 0.0);

  // Direct sum for the scale-exponential family.
  const double eps = spec.epsilon();
  const double theta = spec.theta();
  long double direct = 0.0L;
  for (double x : sample.data) {
    direct += std::log((1.0L - eps) + eps * (1.0L + theta) * std::exp(-static_cast<long double>(theta) * x));
  }
  CHECK(log_likelihood_ratio(sample.data, spec) == Approx(static_cast<double>(direct)).epsilon(1e-10));

  MixtureSpec no_ratio{std::make_shared<FixedSignalFamily>(
                           "opaque", std::make_shared<ExponentialDistribution>(),
                           std::make_shared<ExponentialDistribution>(2.0), SignalTail::Lower),
                       0.75, 0.0, 1000, ThetaScale::SparsePower, std::nullopt};
  CHECK_THROWS_AS(log_likelihood_ratio(sample.data, no_ratio), DomainError);
  CHECK_THROWS_AS(mc_lr_table(no_ratio, 100, 1), DomainError);
}

TEST_CASE("calibrated likelihood ratio test holds its size", "[experiments]") {
  const auto spec = dense_boundary_spec(2000);
  const auto table = mc_lr_table(spec, 2000, 31);
  CHECK(std::is_sorted(table.sorted_llr.begin(), table.sorted_llr.end()));
  auto null_spec = spec;
  const auto noise = spec.noise();
  std::uint64_t rejections = 0;
  const std::uint64_t reps = 2000;
  for (std::uint64_t rep = 0; rep < reps; ++rep) {
    Rng rng = Rng::for_stream(4242, rep);
    std::vector<double> data(spec.n);
    for (auto& x : data) x = noise->sample(rng);
    rejections += run_lr_test(data, null_spec, table, 0.05).reject;
  }
  const auto ci = wilson_interval(rejections, reps);
  CHECK(ci.lo <= 0.05);
  CHECK(0.05 <= ci.hi);

  std::vector<double> wrong(spec.n + 1, 1.0);
  CHECK_THROWS_AS(run_lr_test(wrong, spec, table, 0.05), DomainError);
}

TEST_CASE("zero-threshold likelihood ratio error sum at the dense boundary", "[experiments]") {
  // With n eps^2 theta^2 Var(T) = 1 the log likelihood ratio is close to
  // N(-1/2, 1) under the null and N(1/2, 1) under the mixture.
  const double expected = std::erfc(0.5 / std::sqrt(2.0));  // 2 (1 - Phi(1/2))
  CHECK(expected == Approx(0.6170750774519738).epsilon(1e-12));
  CalibrationStore store;
  const double s_values[] = {2.0};
  const auto c = boundary_comparison(dense_boundary_spec(10000), s_values, 0.05, 2000, 8,
                                     store, 200);
  INFO("lr error sum " << c.lr.sum());
  CHECK(std::abs(c.lr.sum() - expected) <= 0.03);
}

TEST_CASE("power sweep recovers the level when eps is zero", "[experiments]") {
  PowerGridConfig config;
  config.family = std::make_shared<NormalLocationFamily>();
  config.scale = ThetaScale::NormalSqrtLog;
  config.betas = {0.6, 0.8};
  config.rs = {0.3};
  config.s_values = {0.5, 2.0};
  config.ns = {300};
  config.reps = 400;
  config.calibration_reps = 1000;
  config.seed = 2024;
  config.epsilon = 0.0;
  const auto results = power_sweep(config);
  REQUIRE(results.size() == 4);
  for (const auto& r : results) {
    INFO("beta=" << r.beta << " s=" << r.s << " rate=" << r.rate);
    CHECK_FALSE(r.failed);
    CHECK(r.ci.lo <= config.alpha);
    CHECK(config.alpha <= r.ci.hi);
    CHECK(r.ci.lo <= r.rate);
    CHECK(r.rate <= r.ci.hi);
    CHECK(r.runtime_ms == 0.0);
  }
}

TEST_CASE("power sweep separates detectable from undetectable", "[experiments]") {
  PowerGridConfig config;
  config.family = std::make_shared<NormalLocationFamily>();
  config.scale = ThetaScale::NormalSqrtLog;
  config.betas = {0.6};
  config.rs = {0.02, 0.2, 0.5, 0.8};
  config.s_values = {2.0};
  config.ns = {10000};
  config.reps = 200;
  config.calibration_reps = 500;
  config.seed = 11;
  const auto results = power_sweep(config);
  REQUIRE(results.size() == 4);
  CHECK(results[2].rate > results[0].rate);
  for (std::size_t i = 1; i < results.size(); ++i) {
    INFO("r=" << results[i].r << " rate=" << results[i].rate);
    // Non-decreasing in r up to interval overlap.
    CHECK(results[i].ci.hi >= results[i - 1].ci.lo);
  }
}

TEST_CASE("power sweep is reproducible across worker counts", "[experiments]") {
  PowerGridConfig config;
  config.family = scale_exponential_family();
  config.scale = ThetaScale::DensePower;
  config.betas = {0.1};
  config.rs = {0.2, 0.6};
  config.s_values = {-1.0, 1.0, 2.0};
  config.ns = {500, 1000};
  config.reps = 60;
  config.calibration_reps = 200;
  config.seed = 99;
  config.workers = 1;
  const auto one = power_sweep(config);
  config.workers = 3;
  const auto three = power_sweep(config);
  CHECK(power_results_csv(one) == power_results_csv(three));
  CHECK(power_results_json(one) == power_results_json(three));
}

TEST_CASE("failed cells are marked and the sweep continues", "[experiments]") {
  PowerGridConfig config;
  config.family = std::make_shared<NormalLocationFamily>();
  config.scale = ThetaScale::NormalSqrtLog;
  config.betas = {0.3, 0.7};  // 0.3 is not a sparse beta
  config.rs = {0.5};
  config.ns = {200};
  config.reps = 20;
  config.calibration_reps = 100;
  const auto results = power_sweep(config);
  REQUIRE(results.size() == 2);
  CHECK(results[0].failed);
  CHECK(results[0].error.find("beta") != std::string::npos);
  CHECK(std::isnan(results[0].rate));
  CHECK_FALSE(results[1].failed);

  const auto csv = power_results_csv(results);
  CHECK(csv.rfind(kPowerCsvHeader, 0) == 0);
  CHECK(csv.find(",nan,nan,nan,") != std::string::npos);
  const auto doc = nlohmann::json::parse(power_results_json(results));
  CHECK(doc[0]["failed"] == true);
  CHECK(doc[1].contains("failed") == false);

  PowerGridConfig empty = config;
  empty.rs.clear();
  CHECK_THROWS_AS(power_sweep(empty), DomainError);
}

TEST_CASE("csv and json carry the same numbers", "[experiments]") {
  PowerGridConfig config;
  config.family = scale_exponential_family();
  config.scale = ThetaScale::DensePower;
  config.betas = {0.2};
  config.rs = {0.1};
  config.s_values = {0.5, 3.0};
  config.ns = {400};
  config.reps = 50;
  config.calibration_reps = 150;
  const auto results = power_sweep(config);
  const auto doc = nlohmann::json::parse(power_results_json(results));
  std::istringstream csv(power_results_csv(results));
  std::string line;
  std::getline(csv, line);
  for (std::size_t i = 0; i < results.size(); ++i) {
    REQUIRE(std::getline(csv, line));
    std::vector<std::string> fields;
    std::stringstream ls(line);
    for (std::string f; std::getline(ls, f, ',');) fields.push_back(f);
    REQUIRE(fields.size() == 12);
    CHECK(fields[0] == doc[i]["family"].get<std::string>());
    CHECK(std::stod(fields[3]) == doc[i]["s"].get<double>());
    CHECK(std::stod(fields[8]) == doc[i]["rate"].get<double>());
    CHECK(std::stod(fields[9]) == doc[i]["ci_lo"].get<double>());
    CHECK(std::stod(fields[10]) == doc[i]["ci_hi"].get<double>());
  }
}

TEST_CASE("boundary comparison on the dense boundary", "[experiments]") {
  CalibrationStore store;
  const double s_values[] = {-1.0, 0.0, 0.5, 1.0, 2.0};
  const auto c =
      boundary_comparison(dense_boundary_spec(10000), s_values, 0.05, 400, 3, store, 400);
  REQUIRE(c.divergence.size() == 5);
  double lo = 10.0, hi = -10.0;
  for (std::size_t j = 0; j < 5; ++j) {
    INFO("s=" << s_values[j] << " sum=" << c.divergence[j].sum() << " lr=" << c.lr.sum());
    CHECK(c.gap(j) >= -0.05);
    lo = std::min(lo, c.divergence[j].sum());
    hi = std::max(hi, c.divergence[j].sum());
  }
  CHECK(hi - lo <= 0.1);

  const auto csv = boundary_comparison_csv(c);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);

  auto off = dense_boundary_spec(10000);
  off.r = 0.45;
  CHECK_THROWS_AS(boundary_comparison(off, s_values, 0.05, 10, 3, store, 100), DomainError);
}

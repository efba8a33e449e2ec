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
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "phidiv/boundary.hpp"

using Catch::Approx;
using namespace phidiv;

namespace {

// Closed-form threshold for alpha(x) = 2 sqrt(r) x - r.
double normal_beta_sharp(double r) { return r <= 0.25 ? 0.5 + r : 2.0 * std::sqrt(r) - r; }

std::function<double(double)> normal_alpha(double r) {
  return [r](double x) { return 2.0 * std::sqrt(r) * x - r; };
}

}  // namespace

TEST_CASE("rho_normal_sparse branches", "[boundary]") {
  CHECK(rho_normal_sparse(0.6) == Approx(0.1).epsilon(1e-14));
  CHECK(rho_normal_sparse(0.75) == 0.25);
  const double upper_branch = std::pow(1.0 - std::sqrt(1.0 - 0.75), 2);
  CHECK(upper_branch == 0.25);
  CHECK(rho_normal_sparse(0.96) == Approx(0.64).epsilon(1e-14));
  CHECK(rho_normal_sparse(std::nextafter(0.75, 1.0)) == Approx(0.25).epsilon(1e-12));
  for (double b : {0.5, 1.0, 0.3, std::numeric_limits<double>::quiet_NaN()}) {
    CHECK_THROWS_AS(rho_normal_sparse(b), DomainError);
  }
}

TEST_CASE("rho_dense is affine on (0, 1/2)", "[boundary]") {
  CHECK(rho_dense(0.25) == 0.25);
  CHECK(rho_dense(0.49) == Approx(0.01).epsilon(1e-12));
  CHECK(rho_dense(1e-12) == Approx(0.5));
  CHECK_THROWS_AS(rho_dense(0.0), DomainError);
  CHECK_THROWS_AS(rho_dense(0.5), DomainError);
}

TEST_CASE("beta_sharp_expfam closed form", "[boundary]") {
  CHECK(beta_sharp_expfam(0.5, 1.0) == 0.75);
  CHECK(beta_sharp_expfam(2.0, 1.0) == 1.0);
  CHECK(beta_sharp_expfam(1.0, 1.0) == 1.0);
  CHECK(beta_sharp_expfam(0.25, 2.0) == 0.75);
  CHECK_THROWS_AS(beta_sharp_expfam(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(beta_sharp_expfam(1.0, -1.0), DomainError);
}

TEST_CASE("beta_sharp_from_gamma examples", "[boundary]") {
  CHECK(beta_sharp_from_gamma([](double) { return 0.0; }, 0.0, 10.0) == 0.5);

  const double rp = 0.5;
  const auto step = [rp](double t) { return t >= rp ? rp : -1e6; };
  const auto g = beta_sharp_from_gamma_grid(step, 0.0, 10.0, 10000);
  CHECK(std::abs(g.value - beta_sharp_expfam(rp, 1.0)) <= g.spacing);
  CHECK(g.argmax == Approx(rp).margin(g.spacing));

  const auto ramp = [](double t) { return t <= 1.0 ? t : 1.0; };
  const auto rg = beta_sharp_from_gamma_grid(ramp, 0.0, 10.0);
  CHECK(std::abs(rg.value - 1.0) <= rg.spacing);

  CHECK_THROWS_AS(beta_sharp_from_gamma([](double) { return 0.0; }, 0.0, 1.0, 999), DomainError);
  CHECK_THROWS_AS(beta_sharp_from_gamma([](double t) { return t > 0.5 ? NAN : 0.0; }, 0.0, 1.0),
                  DomainError);
  CHECK_THROWS_AS(beta_sharp_from_gamma([](double) { return 0.0; }, 1.0, 1.0), DomainError);
}

TEST_CASE("beta_sharp_from_alpha matches the normal closed form", "[boundary]") {
  CHECK(beta_sharp_from_alpha(normal_alpha(0.16), 0.0, 3.0) == Approx(0.66).margin(1e-3));
  CHECK(beta_sharp_from_alpha(normal_alpha(0.64), 0.0, 3.0) == Approx(0.96).margin(1e-3));
  CHECK(beta_sharp_from_alpha([](double) { return 0.0; }, 0.0, 3.0) == 0.5);
  for (int k = 1; k <= 19; ++k) {
    const double r = 0.05 * k;
    INFO("r=" << r);
    CHECK(std::abs(beta_sharp_from_alpha(normal_alpha(r), 0.0, 3.0) - normal_beta_sharp(r)) <=
          1e-3);
  }
}

TEST_CASE("inverting the numeric threshold recovers rho", "[boundary]") {
  // beta#(r) is increasing in r, so bisect beta#(r) = beta.
  for (double beta : {0.55, 0.6, 0.7, 0.75, 0.8, 0.9, 0.96}) {
    double lo = 0.0;
    double hi = 1.0;
    for (int it = 0; it < 40; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (beta_sharp_from_alpha(normal_alpha(mid), 0.0, 3.0, 4000) < beta) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    INFO("beta=" << beta);
    CHECK(std::abs(0.5 * (lo + hi) - rho_normal_sparse(beta)) <= 1e-3);
  }
}

TEST_CASE("beta_sharp_from_gamma is monotone in gamma", "[boundary]") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_real_distribution<double> bump(0.0, 0.5);
  for (int trial = 0; trial < 50; ++trial) {
    const double a = coef(rng), b = coef(rng), c = coef(rng), d = bump(rng), w = coef(rng);
    auto g1 = [=](double t) { return a + b * std::sin(3.0 * t + c); };
    auto g2 = [=](double t) { return g1(t) + d * (1.0 + std::cos(w * t)) / 2.0; };
    CHECK(beta_sharp_from_gamma(g1, 0.0, 5.0, 2000) <= beta_sharp_from_gamma(g2, 0.0, 5.0, 2000));
  }
}

TEST_CASE("superlevel_measure examples", "[boundary]") {
  const int m = 1000;
  CHECK(std::abs(superlevel_measure([](double t) { return 1.0 - t; }, 0.5, 0.0, 2.0, m) - 0.5) <=
        2.0 / m);
  CHECK(superlevel_measure([](double) { return -1.0; }, 0.0, 0.0, 2.0, m) == 0.0);
  CHECK(std::abs(superlevel_measure([](double t) { return -t; }, -0.5, 0.0, 1.0, m) - 0.5) <=
        1.0 / m);
  CHECK_THROWS_AS(superlevel_measure([](double) { return INFINITY; }, 0.0, 0.0, 1.0, m),
                  DomainError);
}

TEST_CASE("classify examples and sign flips", "[boundary]") {
  auto a = classify("normal-sparse", 0.6, 0.5);
  CHECK(a.verdict == Verdict::Detectable);
  CHECK(a.margin == Approx(0.4).epsilon(1e-12));
  CHECK(a.threshold_value == Approx(0.1).epsilon(1e-12));

  CHECK(classify("normal-sparse", 0.6, 0.1).verdict == Verdict::OnBoundary);
  CHECK(classify("normal-sparse", 0.6, 0.05).verdict == Verdict::Undetectable);

  auto d = classify("dense-expfam", 0.25, 0.3);
  CHECK(d.verdict == Verdict::Undetectable);
  CHECK(d.threshold_value == 0.25);
  CHECK(classify("dense-expfam", 0.25, 0.2).verdict == Verdict::Detectable);
  CHECK(classify("dense-expfam", 0.25, 0.25).verdict == Verdict::OnBoundary);

  CHECK(classify("sparse-expfam", 0.7, 0.5).verdict == Verdict::Detectable);
  CHECK(classify("sparse-expfam", 0.8, 0.5).verdict == Verdict::Undetectable);
  CHECK(classify("sparse-expfam", 0.75, 0.5).verdict == Verdict::OnBoundary);

  CHECK_THROWS_AS(classify("poisson", 0.6, 0.2), DomainError);

  // Margin is monotone along an r-sweep and the verdict flips once.
  for (const char* family : {"normal-sparse", "dense-expfam"}) {
    const double beta = std::string(family) == "dense-expfam" ? 0.2 : 0.8;
    double prev_margin = 0.0;
    int flips = 0;
    std::optional<Verdict> last_side;
    for (int k = 0; k <= 100; ++k) {
      const double r = 0.01 * k;
      const auto c = classify(family, beta, r);
      if (k > 0) {
        const double step = c.margin - prev_margin;
        if (std::string(family) == "normal-sparse") {
          CHECK(step > 0.0);
        } else {
          CHECK(step < 0.0);
        }
      }
      if (c.verdict != Verdict::OnBoundary) {
        if (last_side && *last_side != c.verdict) ++flips;
        last_side = c.verdict;
      }
      if (c.verdict == Verdict::Detectable) CHECK(c.margin > kBoundaryTolerance);
      if (c.verdict == Verdict::Undetectable) CHECK(c.margin < -kBoundaryTolerance);
      prev_margin = c.margin;
    }
    CHECK(flips == 1);
  }
}

TEST_CASE("classify a mixture spec", "[boundary]") {
  MixtureSpec normal{std::make_shared<NormalLocationFamily>(), 0.6, 0.5, 1000,
                     ThetaScale::NormalSqrtLog, std::nullopt};
  CHECK(classify(normal).verdict == Verdict::Detectable);

  MixtureSpec dense{scale_exponential_family(), 0.1, 0.4, 1000, ThetaScale::DensePower,
                    std::nullopt};
  CHECK(classify(dense).verdict == Verdict::OnBoundary);

  MixtureSpec sparse{location_gumbel_family(), 0.9, 0.5, 1000, ThetaScale::SparsePower,
                     std::nullopt};
  const auto s = classify(sparse);
  CHECK(s.threshold_value == 0.75);
  CHECK(s.verdict == Verdict::Undetectable);

  MixtureSpec hetero{std::make_shared<NormalLocationFamily>(2.0), 0.6, 0.5, 1000,
                     ThetaScale::NormalSqrtLog, std::nullopt};
  CHECK_THROWS_AS(classify(hetero), DomainError);
}

TEST_CASE("h-based threshold for the normal model is exact at every n", "[boundary]") {
  for (double r : {0.1, 0.25, 0.49, 0.81}) {
    for (std::uint64_t n : {1000ULL, 100000000ULL}) {
      MixtureSpec spec{std::make_shared<NormalLocationFamily>(), 0.6, r, n,
                       ThetaScale::NormalSqrtLog, std::nullopt};
      INFO("r=" << r << " n=" << n);
      CHECK(std::abs(beta_sharp_from_h_normal(spec).value - normal_beta_sharp(r)) <= 1e-3);
    }
  }
}

// For the three registered exponential families, h_n(t) / log n near its
// maximum is r + log(1 + n^-r)/log n - n^(r-t)/log n. Maximizing the
// threshold expression over t leaves a finite-n deficit of
// (1 + log 2) / (2 log n) when rp < 1 (optimum at t = r + log 2 / log n) and
// 1 / log n when rp >= 1 (optimum pinned at t = r). At n = 10^8 that is 0.046
// and 0.054, so agreement to 0.02 only sets in around log n = 45.
TEST_CASE("h-based threshold approaches the closed form with the predicted bias",
          "[boundary]") {
  const auto expo = scale_exponential_family();
  const double log_1e8 = std::log(1e8);
  for (double r : {0.3, 0.7, 1.5}) {
    const double closed = beta_sharp_expfam(r, 1.0);
    auto gap_at = [&](double log_n, double t_max) {
      const double theta = std::exp(r * log_n);
      return closed - beta_sharp_from_h_at(*expo, theta, log_n, t_max, 20000).value;
    };
    auto predicted = [&](double log_n) {
      return r < 1.0 ? (1.0 + std::log(2.0)) / (2.0 * log_n) : 1.0 / log_n;
    };
    INFO("r=" << r);

    MixtureSpec spec{expo, 0.75, r, 100000000ULL, ThetaScale::SparsePower, std::nullopt};
    const double gap8 = closed - beta_sharp_from_h(spec, 10.0, 20000).value;
    CHECK(gap8 > 0.0);
    CHECK(std::abs(gap8 - predicted(log_1e8)) <= 2e-3);
    CHECK(gap8 == Approx(gap_at(log_1e8, 10.0)).epsilon(1e-12));

    double prev = gap8;
    for (double log_n : {50.0, 100.0, 400.0}) {
      const double gap = gap_at(log_n, 700.0 / log_n);
      INFO("log n=" << log_n);
      CHECK(gap < prev);
      CHECK(std::abs(gap - predicted(log_n)) <= 2e-3);
      prev = gap;
    }
    CHECK(gap_at(100.0, 7.0) <= 0.02);
  }
}

TEST_CASE("registered exponential families share the same h exponent", "[boundary]") {
  // T(F_0^{-1}(1 - w)) = log(1 - w) for all three.
  const auto expo = scale_exponential_family();
  const auto gumbel = location_gumbel_family();
  const auto frechet = scale_frechet_family(2.0);
  const double log_n = std::log(1e6);
  const double theta = std::exp(0.4 * log_n);
  for (double t : {0.1, 0.3, 0.41, 0.5, 1.0, 3.0}) {
    const double h = h_exponent_at(*expo, theta, log_n, t);
    INFO("t=" << t);
    CHECK(h_exponent_at(*gumbel, theta, log_n, t) == Approx(h).epsilon(1e-9).margin(1e-9));
    CHECK(h_exponent_at(*frechet, theta, log_n, t) == Approx(h).epsilon(1e-9).margin(1e-9));
  }
}

TEST_CASE("superlevel report around the exponential threshold", "[boundary]") {
  const double r = 0.3;
  const double beta_star = beta_sharp_expfam(r, 1.0);
  double prev_lower = -1.0;
  for (std::uint64_t n : {100000000ULL, 1000000000000ULL, 10000000000000000000ULL}) {
    MixtureSpec spec{scale_exponential_family(), 0.75, r, n, ThetaScale::SparsePower,
                     std::nullopt};
    const auto report = superlevel_report(spec, beta_star, 0.05);
    INFO("n=" << n);
    CHECK(report.upper == 0.0);
    CHECK(report.lower > 0.0);
    CHECK(report.lower > prev_lower);
    prev_lower = report.lower;
  }
  MixtureSpec spec{scale_exponential_family(), 0.75, r, 1000, ThetaScale::SparsePower,
                   std::nullopt};
  CHECK_THROWS_AS(superlevel_report(spec, beta_star, 0.0), DomainError);
}

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

#ifndef PHIDIV_DISTRIBUTIONS_HPP_
#define PHIDIV_DISTRIBUTIONS_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <string>

#include <boost/math/special_functions/erf.hpp>

#include "phidiv/divergence.hpp"
#include "phidiv/error.hpp"
#include "phidiv/quadrature.hpp"
#include "phidiv/random.hpp"

namespace phidiv {

// A continuous law on the real line. upper_quantile(w) is quantile(1 - w)
// and sf is 1 - cdf, both computed without cancellation so that deep upper
// tails stay resolvable.
class Distribution {
 public:
  virtual ~Distribution() = default;

  virtual std::string name() const = 0;
  virtual double cdf(double x) const = 0;
  virtual double sf(double x) const { return 1.0 - cdf(x); }
  virtual double quantile(double u) const = 0;
  virtual double upper_quantile(double w) const { return quantile(1.0 - w); }
  virtual double sample(Rng& rng) const { return quantile(rng.uniform()); }
};

using DistributionPtr = std::shared_ptr<const Distribution>;

namespace detail {

inline void require_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError(std::string(what) + " must be positive and finite");
  }
}

}  // namespace detail

class UniformDistribution final : public Distribution {
 public:
  UniformDistribution(double lo = 0.0, double hi = 1.0) : lo_(lo), hi_(hi) {
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
      throw DomainError("uniform: need finite lo < hi");
    }
  }

  std::string name() const override { return "uniform"; }
  double cdf(double x) const override {
    if (x <= lo_) return 0.0;
    if (x >= hi_) return 1.0;
    return (x - lo_) / (hi_ - lo_);
  }
  double sf(double x) const override {
    if (x <= lo_) return 1.0;
    if (x >= hi_) return 0.0;
    return (hi_ - x) / (hi_ - lo_);
  }
  double quantile(double u) const override {
    detail::require_open_unit(u, "uniform quantile");
    return lo_ + u * (hi_ - lo_);
  }
  double upper_quantile(double w) const override {
    detail::require_open_unit(w, "uniform quantile");
    return hi_ - w * (hi_ - lo_);
  }

 private:
  double lo_;
  double hi_;
};

class NormalDistribution final : public Distribution {
 public:
  NormalDistribution(double mean = 0.0, double sd = 1.0) : mean_(mean), sd_(sd) {
    detail::require_positive(sd, "normal sd");
    if (!std::isfinite(mean)) throw DomainError("normal mean must be finite");
  }

  std::string name() const override { return "normal"; }
  double mean() const { return mean_; }
  double sd() const { return sd_; }
  double cdf(double x) const override {
    return 0.5 * std::erfc(-(x - mean_) / (sd_ * std::numbers::sqrt2));
  }
  double sf(double x) const override {
    return 0.5 * std::erfc((x - mean_) / (sd_ * std::numbers::sqrt2));
  }
  double quantile(double u) const override {
    detail::require_open_unit(u, "normal quantile");
    return mean_ - sd_ * std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
  }
  double upper_quantile(double w) const override {
    detail::require_open_unit(w, "normal quantile");
    return mean_ + sd_ * std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * w);
  }
  double sample(Rng& rng) const override { return mean_ + sd_ * rng.normal(); }

 private:
  double mean_;
  double sd_;
};

class ExponentialDistribution final : public Distribution {
 public:
  explicit ExponentialDistribution(double rate = 1.0) : rate_(rate) {
    detail::require_positive(rate, "exponential rate");
  }

  std::string name() const override { return "exponential"; }
  double rate() const { return rate_; }
  double cdf(double x) const override { return x <= 0.0 ? 0.0 : -std::expm1(-rate_ * x); }
  double sf(double x) const override { return x <= 0.0 ? 1.0 : std::exp(-rate_ * x); }
  double quantile(double u) const override {
    detail::require_open_unit(u, "exponential quantile");
    return -std::log1p(-u) / rate_;
  }
  double upper_quantile(double w) const override {
    detail::require_open_unit(w, "exponential quantile");
    return -std::log(w) / rate_;
  }
  double sample(Rng& rng) const override { return rng.exponential() / rate_; }

 private:
  double rate_;
};

// Gumbel law of maxima: cdf exp(-exp(-(x - location) / scale)).
class GumbelDistribution final : public Distribution {
 public:
  GumbelDistribution(double location = 0.0, double scale = 1.0)
      : location_(location), scale_(scale) {
    detail::require_positive(scale, "gumbel scale");
  }

  std::string name() const override { return "gumbel"; }
  double cdf(double x) const override { return std::exp(-std::exp(-(x - location_) / scale_)); }
  double sf(double x) const override { return -std::expm1(-std::exp(-(x - location_) / scale_)); }
  double quantile(double u) const override {
    detail::require_open_unit(u, "gumbel quantile");
    return location_ - scale_ * std::log(-std::log(u));
  }
  double upper_quantile(double w) const override {
    detail::require_open_unit(w, "gumbel quantile");
    return location_ - scale_ * std::log(-std::log1p(-w));
  }
  double sample(Rng& rng) const override {
    return location_ - scale_ * std::log(rng.exponential());
  }

 private:
  double location_;
  double scale_;
};

// Frechet law on (0, inf): cdf exp(-(x / scale)^(-shape)).
class FrechetDistribution final : public Distribution {
 public:
  FrechetDistribution(double shape = 1.0, double scale = 1.0) : shape_(shape), scale_(scale) {
    detail::require_positive(shape, "frechet shape");
    detail::require_positive(scale, "frechet scale");
  }

  std::string name() const override { return "frechet"; }
  double shape() const { return shape_; }
  double cdf(double x) const override {
    return x <= 0.0 ? 0.0 : std::exp(-std::pow(x / scale_, -shape_));
  }
  double sf(double x) const override {
    return x <= 0.0 ? 1.0 : -std::expm1(-std::pow(x / scale_, -shape_));
  }
  double quantile(double u) const override {
    detail::require_open_unit(u, "frechet quantile");
    return scale_ * std::pow(-std::log(u), -1.0 / shape_);
  }
  double upper_quantile(double w) const override {
    detail::require_open_unit(w, "frechet quantile");
    return scale_ * std::pow(-std::log1p(-w), -1.0 / shape_);
  }
  double sample(Rng& rng) const override {
    return scale_ * std::pow(rng.exponential(), -1.0 / shape_);
  }

 private:
  double shape_;
  double scale_;
};

// Quantile by bisection in the probability scale of a reference law whose
// quantile is known: find u with target_cdf(ref.quantile(u)) = p to 1e-12.
template <typename Cdf>
double bisect_quantile(const Distribution& ref, Cdf&& target_cdf, double p) {
  detail::require_open_unit(p, "quantile");
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (target_cdf(ref.quantile(mid)) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return ref.quantile(0.5 * (lo + hi));
}

// The law with density C(theta) exp(theta T(x)) with respect to `base`.
// cdf values come from quadrature in the base law's probability scale, and
// quantiles from bisection, so this is meant for setup work rather than
// inner loops.
class TiltedDistribution final : public Distribution {
 public:
  TiltedDistribution(DistributionPtr base, std::function<double(double)> t, double theta,
                     double log_omega)
      : base_(std::move(base)), t_(std::move(t)), theta_(theta), log_omega_(log_omega) {}

  std::string name() const override { return "tilted-" + base_->name(); }

  double cdf(double x) const override {
    const double p = base_->cdf(x);
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;
    if (p > 0.5) return 1.0 - sf(x);
    return std::min(1.0, integrate_unit([&](double u, double) { return density_at(u); },
                                        "tilted cdf", 0.0, p));
  }

  double sf(double x) const override {
    const double q = base_->sf(x);
    if (q <= 0.0) return 0.0;
    if (q >= 1.0) return 1.0;
    if (q > 0.5) return 1.0 - cdf(x);
    // Substitute w = 1 - u so the upper tail is integrated near w = 0.
    return std::min(1.0, integrate_unit(
                             [&](double w, double) { return upper_density_at(w); },
                             "tilted sf", 0.0, q));
  }

  double quantile(double u) const override {
    return bisect_quantile(*base_, [&](double x) { return cdf(x); }, u);
  }

 private:
  double density_at(double u) const {
    return std::exp(theta_ * t_(base_->quantile(u)) - log_omega_);
  }
  double upper_density_at(double w) const {
    return std::exp(theta_ * t_(base_->upper_quantile(w)) - log_omega_);
  }

  DistributionPtr base_;
  std::function<double(double)> t_;
  double theta_;
  double log_omega_;
};

}  // namespace phidiv

#endif  // PHIDIV_DISTRIBUTIONS_HPP_

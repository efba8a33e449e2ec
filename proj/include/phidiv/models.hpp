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

#ifndef PHIDIV_MODELS_HPP_
#define PHIDIV_MODELS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "phidiv/distributions.hpp"
#include "phidiv/divergence.hpp"
#include "phidiv/error.hpp"
#include "phidiv/quadrature.hpp"
#include "phidiv/random.hpp"

namespace phidiv {

// Which end of the noise p-value scale the signal moves mass towards.
enum class SignalTail { Lower, Upper };

// Noise law P_0 plus the signal laws mu(theta) of one model.
class SignalFamily {
 public:
  virtual ~SignalFamily() = default;

  virtual std::string name() const = 0;
  virtual DistributionPtr noise() const = 0;
  virtual DistributionPtr signal(double theta) const = 0;
  virtual SignalTail signal_tail() const { return SignalTail::Upper; }

  virtual bool has_density_ratio() const { return true; }
  // log d mu(theta) / d P_0 at x.
  virtual double log_density_ratio(double theta, double x) const = 0;
};

using FamilyPtr = std::shared_ptr<const SignalFamily>;

// P_0 = N(0,1), mu(theta) = N(theta, sigma0^2). sigma0 = 1 is the
// heterogeneous model, anything else heteroscedastic.
class NormalLocationFamily final : public SignalFamily {
 public:
  explicit NormalLocationFamily(double sigma0 = 1.0) : sigma0_(sigma0) {
    detail::require_positive(sigma0, "sigma0");
  }

  std::string name() const override { return sigma0_ == 1.0 ? "normal" : "normal-hetero"; }
  double sigma0() const { return sigma0_; }
  DistributionPtr noise() const override { return std::make_shared<NormalDistribution>(); }
  DistributionPtr signal(double theta) const override {
    return std::make_shared<NormalDistribution>(theta, sigma0_);
  }
  double log_density_ratio(double theta, double x) const override {
    if (sigma0_ == 1.0) return theta * x - 0.5 * theta * theta;
    const double z = (x - theta) / sigma0_;
    return -std::log(sigma0_) - 0.5 * z * z + 0.5 * x * x;
  }

 private:
  double sigma0_;
};

// x = F^{-1}(u) using whichever of u and 1 - u is accurate.
inline double quantile_of_pair(const Distribution& d, double u, double one_minus_u) {
  return u <= 0.5 ? d.quantile(u) : d.upper_quantile(one_minus_u);
}

// Exponential family dP_(theta)/dP_(0) = C(theta) exp(theta T), with
// P_0 = P_(0) the noise and mu = P_(theta) the signal.
class ExpFamily final : public SignalFamily {
 public:
  struct ClosedForms {
    std::function<double(double)> log_omega;           // log of the Laplace transform
    std::function<DistributionPtr(double)> signal;     // P_(theta)
  };

  ExpFamily(std::string name, DistributionPtr base, std::function<double(double)> t,
            SignalTail tail, std::optional<double> tail_exponent = std::nullopt,
            ClosedForms closed = {})
      : name_(std::move(name)),
        base_(std::move(base)),
        t_(std::move(t)),
        tail_(tail),
        p_(tail_exponent),
        closed_(std::move(closed)) {}

  std::string name() const override { return name_; }
  DistributionPtr noise() const override { return base_; }
  SignalTail signal_tail() const override { return tail_; }
  std::optional<double> tail_exponent() const { return p_; }
  bool has_closed_forms() const { return static_cast<bool>(closed_.log_omega); }

  double T(double x) const { return t_(x); }

  // omega(theta) = int exp(theta T) dP_(0)
  double laplace_transform(double theta) const { return std::exp(log_omega(theta)); }

  double log_omega(double theta) const {
    if (closed_.log_omega) return closed_.log_omega(theta);
    return std::log(laplace_transform_numeric(theta));
  }

  double laplace_transform_numeric(double theta) const {
    return integrate_unit(
        [&](double u, double v) { return std::exp(theta * t_(quantile_of_pair(*base_, u, v))); },
        name_ + " Laplace transform");
  }

  // Var_{P_(0)}(T) from quadrature of T and T^2.
  double var_T() const {
    const double m1 = integrate_unit(
        [&](double u, double v) { return t_(quantile_of_pair(*base_, u, v)); }, name_ + " E[T]");
    const double m2 = integrate_unit(
        [&](double u, double v) {
          const double t = t_(quantile_of_pair(*base_, u, v));
          return t * t;
        },
        name_ + " E[T^2]");
    return m2 - m1 * m1;
  }

  double log_C(double theta) const { return -log_omega(theta); }

  DistributionPtr signal(double theta) const override {
    if (closed_.signal) return closed_.signal(theta);
    return std::make_shared<TiltedDistribution>(base_, t_, theta, log_omega(theta));
  }

  double log_density_ratio(double theta, double x) const override {
    return theta * t_(x) - log_omega(theta);
  }

 private:
  std::string name_;
  DistributionPtr base_;
  std::function<double(double)> t_;
  SignalTail tail_;
  std::optional<double> p_;
  ClosedForms closed_;
};

using ExpFamilyPtr = std::shared_ptr<const ExpFamily>;

namespace detail {

inline void require_theta_above_minus_one(double theta, const char* family) {
  if (!(theta > -1.0)) {
    throw DivergenceError(std::string(family) + ": Laplace transform is infinite for theta <= -1");
  }
}

}  // namespace detail

// P_(0) = Exp(1), T(x) = -x, so P_(theta) = Exp(1 + theta), omega = 1/(1 + theta).
inline ExpFamilyPtr scale_exponential_family() {
  ExpFamily::ClosedForms closed;
  closed.log_omega = [](double theta) {
    detail::require_theta_above_minus_one(theta, "scale-exponential");
    return -std::log1p(theta);
  };
  closed.signal = [](double theta) -> DistributionPtr {
    detail::require_theta_above_minus_one(theta, "scale-exponential");
    return std::make_shared<ExponentialDistribution>(1.0 + theta);
  };
  return std::make_shared<ExpFamily>("scale-exponential",
                                     std::make_shared<ExponentialDistribution>(1.0),
                                     [](double x) { return -x; }, SignalTail::Lower, 1.0,
                                     std::move(closed));
}

// P_(0) = Gumbel(0, 1), T(x) = -exp(-x), so P_(theta) = Gumbel(log(1 + theta), 1).
// exp(-X) is Exp(1) under P_(0), which makes omega = 1/(1 + theta) again.
inline ExpFamilyPtr location_gumbel_family() {
  ExpFamily::ClosedForms closed;
  closed.log_omega = [](double theta) {
    detail::require_theta_above_minus_one(theta, "location-gumbel");
    return -std::log1p(theta);
  };
  closed.signal = [](double theta) -> DistributionPtr {
    detail::require_theta_above_minus_one(theta, "location-gumbel");
    return std::make_shared<GumbelDistribution>(std::log1p(theta), 1.0);
  };
  return std::make_shared<ExpFamily>("location-gumbel", std::make_shared<GumbelDistribution>(),
                                     [](double x) { return -std::exp(-x); }, SignalTail::Upper,
                                     1.0, std::move(closed));
}

// P_(0) = Frechet(a, 1), T(x) = -x^(-a), so P_(theta) = Frechet(a, (1 + theta)^(1/a)).
// X^(-a) is Exp(1) under P_(0).
inline ExpFamilyPtr scale_frechet_family(double shape = 1.0) {
  detail::require_positive(shape, "frechet shape");
  ExpFamily::ClosedForms closed;
  closed.log_omega = [](double theta) {
    detail::require_theta_above_minus_one(theta, "scale-frechet");
    return -std::log1p(theta);
  };
  closed.signal = [shape](double theta) -> DistributionPtr {
    detail::require_theta_above_minus_one(theta, "scale-frechet");
    return std::make_shared<FrechetDistribution>(shape, std::pow(1.0 + theta, 1.0 / shape));
  };
  return std::make_shared<ExpFamily>(
      "scale-frechet", std::make_shared<FrechetDistribution>(shape),
      [shape](double x) { return x <= 0.0 ? -std::numeric_limits<double>::infinity()
                                          : -std::pow(x, -shape); },
      SignalTail::Upper, 1.0, std::move(closed));
}

// User-supplied family. Everything not given in closed form is computed by
// quadrature, and signal laws are tilted numerically.
inline ExpFamilyPtr generic_exp_family(std::string name, DistributionPtr base,
                                       std::function<double(double)> t, SignalTail tail) {
  return std::make_shared<ExpFamily>(std::move(name), std::move(base), std::move(t), tail);
}

// Piecewise-linear function through (x, y) knots with strictly increasing x,
// held constant beyond the end knots.
class TabulatedFunction {
 public:
  TabulatedFunction(std::vector<double> x, std::vector<double> y)
      : x_(std::move(x)), y_(std::move(y)) {
    if (x_.size() != y_.size() || x_.size() < 2) {
      throw DomainError("tabulated function: need at least two (x, y) pairs");
    }
    for (std::size_t k = 0; k < x_.size(); ++k) {
      if (!std::isfinite(x_[k]) || !std::isfinite(y_[k])) {
        throw DomainError("tabulated function: non-finite entry at row " + std::to_string(k + 1));
      }
      if (k > 0 && !(x_[k] > x_[k - 1])) {
        throw DomainError("tabulated function: x must be strictly increasing (row " +
                          std::to_string(k + 1) + ")");
      }
    }
  }

  const std::vector<double>& x() const { return x_; }
  const std::vector<double>& y() const { return y_; }

  double operator()(double x) const {
    if (x <= x_.front()) return y_.front();
    if (x >= x_.back()) return y_.back();
    const auto hi = static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), x) - x_.begin());
    const std::size_t lo = hi - 1;
    const double w = (x - x_[lo]) / (x_[hi] - x_[lo]);
    return y_[lo] + w * (y_[hi] - y_[lo]);
  }

  // CSV with columns x,T(x); a non-numeric first line is taken as a header.
  static TabulatedFunction from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open table " + path);
    std::vector<double> xs;
    std::vector<double> ys;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      const auto comma = line.find(',');
      double x = 0.0;
      double y = 0.0;
      try {
        if (comma == std::string::npos) throw std::invalid_argument("no comma");
        std::size_t used = 0;
        x = std::stod(line.substr(0, comma), &used);
        y = std::stod(line.substr(comma + 1), &used);
      } catch (const std::exception&) {
        if (xs.empty() && line_no == 1) continue;  // header
        throw DomainError(path + ":" + std::to_string(line_no) + ": expected two numbers x,T(x)");
      }
      xs.push_back(x);
      ys.push_back(y);
    }
    return TabulatedFunction(std::move(xs), std::move(ys));
  }

 private:
  std::vector<double> x_;
  std::vector<double> y_;
};

// Built-in natural statistics for generic families: "neg-identity" (-x),
// "identity" (x), "neg-exp-neg" (-exp(-x)), "neg-power:<a>" (-x^-a).
inline std::function<double(double)> named_statistic(const std::string& name) {
  if (name == "neg-identity") return [](double x) { return -x; };
  if (name == "identity") return [](double x) { return x; };
  if (name == "neg-exp-neg") return [](double x) { return -std::exp(-x); };
  const std::string prefix = "neg-power:";
  if (name.rfind(prefix, 0) == 0) {
    double a = 0.0;
    try {
      a = std::stod(name.substr(prefix.size()));
    } catch (const std::exception&) {
      throw DomainError("statistic " + name + ": bad exponent");
    }
    detail::require_positive(a, "neg-power exponent");
    return [a](double x) {
      return x <= 0.0 ? -std::numeric_limits<double>::infinity() : -std::pow(x, -a);
    };
  }
  throw DomainError("unknown natural statistic '" + name + "'");
}

// Fixed noise and signal laws, ignoring theta. Mainly for tests and
// user-specified alternatives.
class FixedSignalFamily final : public SignalFamily {
 public:
  FixedSignalFamily(std::string name, DistributionPtr noise, DistributionPtr signal,
                    SignalTail tail = SignalTail::Lower,
                    std::function<double(double)> log_ratio = {})
      : name_(std::move(name)),
        noise_(std::move(noise)),
        signal_(std::move(signal)),
        tail_(tail),
        log_ratio_(std::move(log_ratio)) {}

  std::string name() const override { return name_; }
  DistributionPtr noise() const override { return noise_; }
  DistributionPtr signal(double) const override { return signal_; }
  SignalTail signal_tail() const override { return tail_; }
  bool has_density_ratio() const override { return static_cast<bool>(log_ratio_); }
  double log_density_ratio(double, double x) const override {
    if (!log_ratio_) throw DomainError(name_ + ": no density ratio available");
    return log_ratio_(x);
  }

 private:
  std::string name_;
  DistributionPtr noise_;
  DistributionPtr signal_;
  SignalTail tail_;
  std::function<double(double)> log_ratio_;
};

// The three signal-strength parametrizations.
enum class ThetaScale {
  SparsePower,    // theta_n = n^r
  DensePower,     // theta_n = n^-r
  NormalSqrtLog,  // theta_n = sqrt(2 r log n)
};

enum class Regime { Sparse, Dense };

inline Regime regime_of(ThetaScale scale) {
  return scale == ThetaScale::DensePower ? Regime::Dense : Regime::Sparse;
}

// Q_n = (1 - eps_n) P_0 + eps_n mu_n with eps_n = n^-beta.
struct MixtureSpec {
  FamilyPtr family;
  double beta = 0.75;
  double r = 0.0;
  std::uint64_t n = 0;
  ThetaScale scale = ThetaScale::SparsePower;
  std::optional<double> epsilon_override;  // pins eps_n, e.g. 0 for pure noise

  Regime regime() const { return regime_of(scale); }

  double epsilon() const {
    if (epsilon_override) return *epsilon_override;
    return std::pow(static_cast<double>(n), -beta);
  }

  double theta() const {
    const double dn = static_cast<double>(n);
    switch (scale) {
      case ThetaScale::SparsePower:
        return std::pow(dn, r);
      case ThetaScale::DensePower:
        return std::pow(dn, -r);
      case ThetaScale::NormalSqrtLog:
      default:
        return std::sqrt(2.0 * r * std::log(dn));
    }
  }

  DistributionPtr noise() const { return family->noise(); }
  DistributionPtr signal() const { return family->signal(theta()); }

  void validate() const {
    if (!family) throw DomainError("mixture: no model family");
    if (n < 1) throw DomainError("mixture: need n >= 1");
    if (!std::isfinite(r) || r < 0.0) throw DomainError("mixture: r must be finite and >= 0");
    if (regime() == Regime::Sparse && !(beta > 0.5 && beta <= 1.0)) {
      throw DomainError("mixture: sparse parametrization needs beta in (1/2, 1]");
    }
    if (regime() == Regime::Dense && !(beta > 0.0 && beta < 0.5)) {
      throw DomainError("mixture: dense parametrization needs beta in (0, 1/2)");
    }
    if (epsilon_override && !(*epsilon_override >= 0.0 && *epsilon_override <= 1.0)) {
      throw DomainError("mixture: epsilon must lie in [0, 1]");
    }
  }
};

struct MixtureSample {
  std::vector<double> data;
  // Realized number of signal draws. For diagnostics only; tests never see it.
  std::size_t signal_count = 0;
};

// Each observation is a signal draw with probability eps_n, else noise.
inline MixtureSample sample_mixture(const MixtureSpec& spec, Rng& rng) {
  spec.validate();
  const double eps = spec.epsilon();
  const auto noise = spec.noise();
  const auto signal = eps > 0.0 ? spec.signal() : noise;
  MixtureSample out;
  out.data.resize(spec.n);
  for (auto& x : out.data) {
    const bool is_signal = rng.uniform() < eps;
    out.signal_count += is_signal ? 1 : 0;
    x = (is_signal ? signal : noise)->sample(rng);
  }
  return out;
}

inline MixtureSample sample_mixture(const MixtureSpec& spec, std::uint64_t seed,
                                    std::uint64_t stream = 0) {
  Rng rng = Rng::for_stream(seed, stream);
  return sample_mixture(spec, rng);
}

// Lower: p = F_0(x), the usual orientation. Upper: p = 1 - F_0(x), computed
// from the survival function; S_n(s) is unchanged by the reflection, but
// p-values near 0 keep far more precision than values near 1.
enum class PValueSide { Lower, Upper };

inline PValueSide pvalue_side_for(SignalTail tail) {
  return tail == SignalTail::Upper ? PValueSide::Upper : PValueSide::Lower;
}

inline SortedPValueSample to_pvalues(std::span<const double> data, const Distribution& noise,
                                     PValueSide side = PValueSide::Lower) {
  std::vector<double> p(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double x = data[i];
    if (std::isnan(x)) {
      throw DomainError("observation " + std::to_string(i + 1) + " is not a number");
    }
    p[i] = side == PValueSide::Lower ? noise.cdf(x) : noise.sf(x);
    if (!(p[i] > 0.0 && p[i] < 1.0)) {
      throw DomainError("observation " + std::to_string(i + 1) + " (" + std::to_string(x) +
                        ") lies outside the open support of the " + noise.name() +
                        " noise model");
    }
  }
  return SortedPValueSample::from_unsorted(std::move(p));
}

// mu_n^{F_0}(0, v] = mu_n((-inf, F_0^{-1}(v)]).
inline double signal_cdf_transformed(const MixtureSpec& spec, double v) {
  detail::require_open_unit(v, "signal_cdf_transformed");
  return spec.signal()->cdf(spec.noise()->quantile(v));
}

enum class DiagnosticKind { Full, SparseSimplified };

struct DiagnosticCurve {
  std::vector<double> v;
  std::vector<double> values;
  DiagnosticKind kind = DiagnosticKind::Full;
};

namespace detail {

inline void require_half_grid(std::span<const double> grid) {
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!(grid[k] > 0.0 && grid[k] < 0.5)) {
      throw DomainError("diagnostic grid points must lie in (0, 1/2)");
    }
    if (k > 0 && !(grid[k] > grid[k - 1])) {
      throw DomainError("diagnostic grid must be strictly increasing");
    }
  }
}

inline DiagnosticCurve diagnostic(const MixtureSpec& spec, std::span<const double> grid,
                                  DiagnosticKind kind) {
  spec.validate();
  require_half_grid(grid);
  const auto noise = spec.noise();
  const auto signal = spec.signal();
  const double scale = std::sqrt(static_cast<double>(spec.n)) * spec.epsilon();
  DiagnosticCurve out;
  out.kind = kind;
  out.v.assign(grid.begin(), grid.end());
  out.values.reserve(grid.size());
  for (double v : grid) {
    const double lower = signal->cdf(noise->quantile(v));       // mu^{F_0}(0, v]
    const double upper = signal->sf(noise->upper_quantile(v));  // mu^{F_0}(1 - v, 1)
    const double mass = kind == DiagnosticKind::Full
                            ? std::abs(lower - v) + std::abs(upper - v)
                            : lower + upper;
    out.values.push_back(scale * mass / std::sqrt(v));
  }
  return out;
}

inline void require_density_ratio(const MixtureSpec& spec) {
  if (!spec.family->has_density_ratio()) {
    throw DomainError(spec.family->name() + ": model has no density ratio");
  }
}

}  // namespace detail

// H_n(v) = sqrt(n) eps_n v^{-1/2} (|mu^{F_0}(0,v] - v| + |mu^{F_0}(1-v,1) - v|).
inline DiagnosticCurve diagnostic_H(const MixtureSpec& spec, std::span<const double> grid) {
  return detail::diagnostic(spec, grid, DiagnosticKind::Full);
}

// Sparse simplification without the centering terms.
inline DiagnosticCurve diagnostic_H_sparse(const MixtureSpec& spec, std::span<const double> grid) {
  return detail::diagnostic(spec, grid, DiagnosticKind::SparseSimplified);
}

// h_n(t) at a given theta and log n: the larger log density ratio at
// F_0^{-1}(n^-t) and F_0^{-1}(1 - n^-t). Taking log n directly lets callers
// look at scales far beyond any sample size.
inline double h_exponent_at(const SignalFamily& family, double theta, double log_n, double t) {
  if (!family.has_density_ratio()) {
    throw DomainError(family.name() + ": model has no density ratio");
  }
  if (!(t >= std::log(2.0) / log_n) || !std::isfinite(t)) {
    throw DomainError("h_exponent: need t >= log 2 / log n");
  }
  const double w = std::exp(-t * log_n);
  const auto noise = family.noise();
  const double h1 = family.log_density_ratio(theta, noise->quantile(w));
  const double h2 = family.log_density_ratio(theta, noise->upper_quantile(w));
  return std::max(h1, h2);
}

inline double h_exponent(const MixtureSpec& spec, double t) {
  return h_exponent_at(*spec.family, spec.theta(), std::log(static_cast<double>(spec.n)), t);
}

// Log density ratio at x sqrt(2 log n).
inline double h_exponent_normal(const MixtureSpec& spec, double x) {
  detail::require_density_ratio(spec);
  const double y = x * std::sqrt(2.0 * std::log(static_cast<double>(spec.n)));
  return spec.family->log_density_ratio(spec.theta(), y);
}

inline double laplace_transform(const ExpFamily& family, double theta) {
  return family.laplace_transform(theta);
}

inline double var_T(const ExpFamily& family) { return family.var_T(); }

// Fits T(edge) - T(F_0^{-1}(u)) ~ u^{1/p} on the signal side of the noise
// scale by log-log least squares over u in [u_lo, u_hi], returning p. For a
// slowly varying L the fitted slope drifts only logarithmically.
inline double estimate_tail_exponent(const ExpFamily& family, double u_lo = 1e-12,
                                     double u_hi = 1e-6, int points = 25) {
  const auto base = family.noise();
  const bool lower = family.signal_tail() == SignalTail::Lower;
  auto x_at = [&](double u) { return lower ? base->quantile(u) : base->upper_quantile(u); };
  const double t_edge = family.T(x_at(1e-300));
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (int k = 0; k < points; ++k) {
    const double lu = std::log(u_lo) + (std::log(u_hi) - std::log(u_lo)) * k / (points - 1);
    const double gap = t_edge - family.T(x_at(std::exp(lu)));
    if (!(gap > 0.0) || !std::isfinite(gap)) {
      throw DomainError(family.name() + ": T is not strictly monotone towards the signal tail");
    }
    const double ly = std::log(gap);
    sx += lu;
    sy += ly;
    sxx += lu * lu;
    sxy += lu * ly;
  }
  const double m = points;
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return 1.0 / slope;
}

// Family lookup by name for configuration files and the CLI.
inline FamilyPtr family_by_name(const std::string& name, double sigma0 = 1.0,
                                double frechet_shape = 1.0) {
  if (name == "normal") return std::make_shared<NormalLocationFamily>(1.0);
  if (name == "normal-hetero") return std::make_shared<NormalLocationFamily>(sigma0);
  if (name == "scale-exponential") return scale_exponential_family();
  if (name == "location-gumbel") return location_gumbel_family();
  if (name == "scale-frechet") return scale_frechet_family(frechet_shape);
  throw DomainError("unknown model family '" + name + "'");
}

inline DistributionPtr distribution_by_name(const std::string& name) {
  if (name == "uniform") return std::make_shared<UniformDistribution>();
  if (name == "normal") return std::make_shared<NormalDistribution>();
  if (name == "exponential") return std::make_shared<ExponentialDistribution>();
  if (name == "gumbel") return std::make_shared<GumbelDistribution>();
  if (name == "frechet") return std::make_shared<FrechetDistribution>();
  throw DomainError("unknown noise model '" + name + "'");
}

}  // namespace phidiv

#endif  // PHIDIV_MODELS_HPP_

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

#ifndef PHIDIV_BOUNDARY_HPP_
#define PHIDIV_BOUNDARY_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>

#include "phidiv/error.hpp"
#include "phidiv/models.hpp"

namespace phidiv {

inline constexpr double kBoundaryTolerance = 1e-9;
inline constexpr int kDefaultGridPoints = 10000;
inline constexpr double kDefaultExponentTMax = 10.0;

// rho(beta) for the sparse normal location model.
inline double rho_normal_sparse(double beta) {
  if (!(beta > 0.5 && beta < 1.0)) throw DomainError("rho_normal_sparse: need beta in (1/2, 1)");
  if (beta <= 0.75) return beta - 0.5;
  const double a = 1.0 - std::sqrt(1.0 - beta);
  return a * a;
}

// rho*(beta) for dense exponential families.
inline double rho_dense(double beta) {
  if (!(beta > 0.0 && beta < 0.5)) throw DomainError("rho_dense: need beta in (0, 1/2)");
  return 0.5 - beta;
}

inline double beta_sharp_expfam(double r, double p) {
  if (!(r > 0.0) || !(p > 0.0) || !std::isfinite(r) || !std::isfinite(p)) {
    throw DomainError("beta_sharp_expfam: need r > 0 and p > 0");
  }
  return (std::min(r * p, 1.0) + 1.0) / 2.0;
}

// Maximum of a function over a uniform grid. The spacing bounds how far the
// grid maximum can sit from the essential supremum for Lipschitz pieces.
struct GridMax {
  double value = 0.0;
  double argmax = 0.0;
  double spacing = 0.0;
};

namespace detail {

inline void require_grid(double lo, double hi, int grid_points, int min_points, const char* what) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw DomainError(std::string(what) + ": need finite lo < hi");
  }
  if (grid_points < min_points) {
    throw DomainError(std::string(what) + ": need at least " + std::to_string(min_points) +
                      " grid points");
  }
}

// Grid over [lo, hi] including both ends.
template <typename F>
GridMax grid_max(F&& f, double lo, double hi, int grid_points, const char* what) {
  require_grid(lo, hi, grid_points, 1000, what);
  GridMax out;
  out.spacing = (hi - lo) / (grid_points - 1);
  out.value = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid_points; ++i) {
    const double t = i + 1 == grid_points ? hi : lo + i * out.spacing;
    const double y = f(t);
    if (!std::isfinite(y)) {
      throw DomainError(std::string(what) + ": exponent not finite at t = " + std::to_string(t));
    }
    if (y > out.value) {
      out.value = y;
      out.argmax = t;
    }
  }
  return out;
}

}  // namespace detail

// 1/2 + max over t in [t_min, t_max] of gamma(t) - t + min(t, 1)/2, a grid
// stand-in for the essential supremum.
inline GridMax beta_sharp_from_gamma_grid(const std::function<double(double)>& gamma,
                                          double t_min, double t_max,
                                          int grid_points = kDefaultGridPoints) {
  auto g = detail::grid_max(
      [&](double t) { return gamma(t) - t + std::min(t, 1.0) / 2.0; }, t_min, t_max, grid_points,
      "beta_sharp_from_gamma");
  g.value += 0.5;
  return g;
}

inline double beta_sharp_from_gamma(const std::function<double(double)>& gamma, double t_min,
                                    double t_max, int grid_points = kDefaultGridPoints) {
  return beta_sharp_from_gamma_grid(gamma, t_min, t_max, grid_points).value;
}

// As above with t^2 in place of t, for exponents of the normal model.
inline GridMax beta_sharp_from_alpha_grid(const std::function<double(double)>& alpha,
                                          double x_min, double x_max,
                                          int grid_points = kDefaultGridPoints) {
  auto g = detail::grid_max(
      [&](double x) { return alpha(x) - x * x + std::min(x * x, 1.0) / 2.0; }, x_min, x_max,
      grid_points, "beta_sharp_from_alpha");
  g.value += 0.5;
  return g;
}

inline double beta_sharp_from_alpha(const std::function<double(double)>& alpha, double x_min,
                                    double x_max, int grid_points = kDefaultGridPoints) {
  return beta_sharp_from_alpha_grid(alpha, x_min, x_max, grid_points).value;
}

// Finite-n threshold with h_n(t) / log n in place of gamma, over
// [log 2 / log n, t_max]. log_n need not be the log of a representable n.
// Beyond t log n of about 744, n^-t underflows, so t_max must stay below that.
inline GridMax beta_sharp_from_h_at(const SignalFamily& family, double theta, double log_n,
                                    double t_max = kDefaultExponentTMax,
                                    int grid_points = kDefaultGridPoints) {
  if (!(log_n > 0.0)) throw DomainError("beta_sharp_from_h: need log n > 0");
  return beta_sharp_from_gamma_grid(
      [&](double t) { return h_exponent_at(family, theta, log_n, t) / log_n; },
      std::log(2.0) / log_n, t_max, grid_points);
}

inline GridMax beta_sharp_from_h(const MixtureSpec& spec, double t_max = kDefaultExponentTMax,
                                 int grid_points = kDefaultGridPoints) {
  return beta_sharp_from_h_at(*spec.family, spec.theta(),
                              std::log(static_cast<double>(spec.n)), t_max, grid_points);
}

// Normal-model threshold from the scaled log ratio at x sqrt(2 log n), x >= 0.
inline GridMax beta_sharp_from_h_normal(const MixtureSpec& spec, double x_max = 3.0,
                                        int grid_points = kDefaultGridPoints) {
  const double log_n = std::log(static_cast<double>(spec.n));
  return beta_sharp_from_alpha_grid(
      [&](double x) { return h_exponent_normal(spec, x) / log_n; }, 0.0, x_max, grid_points);
}

// Lebesgue measure of {t in [lo, hi] : f(t) >= c} by the midpoint rule.
inline double superlevel_measure(const std::function<double(double)>& f, double c, double lo,
                                 double hi, int grid_points = kDefaultGridPoints) {
  detail::require_grid(lo, hi, grid_points, 1, "superlevel_measure");
  const double h = (hi - lo) / grid_points;
  int hits = 0;
  for (int i = 0; i < grid_points; ++i) {
    const double t = lo + (i + 0.5) * h;
    const double y = f(t);
    if (!std::isfinite(y)) {
      throw DomainError("superlevel_measure: f not finite at t = " + std::to_string(t));
    }
    if (y >= c) ++hits;
  }
  return hits * h;
}

// Finite-n view of the two measure conditions around a candidate threshold:
// `lower` should stay positive and `upper` should vanish as n grows.
struct SuperlevelReport {
  double lower = 0.0;  // measure where the exponent is >= beta_star - delta - 1/2
  double upper = 0.0;  // measure where the exponent is >= beta_star + delta - 1/2
};

inline SuperlevelReport superlevel_report(const MixtureSpec& spec, double beta_star, double delta,
                                          double t_max = kDefaultExponentTMax,
                                          int grid_points = kDefaultGridPoints) {
  if (!(delta > 0.0)) throw DomainError("superlevel_report: need delta > 0");
  const double log_n = std::log(static_cast<double>(spec.n));
  const double theta = spec.theta();
  auto exponent = [&](double t) {
    return h_exponent_at(*spec.family, theta, log_n, t) / log_n - t + std::min(t, 1.0) / 2.0;
  };
  const double lo = std::log(2.0) / log_n;
  return {superlevel_measure(exponent, beta_star - delta - 0.5, lo, t_max, grid_points),
          superlevel_measure(exponent, beta_star + delta - 0.5, lo, t_max, grid_points)};
}

enum class Verdict { Detectable, Undetectable, OnBoundary };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Detectable: return "detectable";
    case Verdict::Undetectable: return "undetectable";
    case Verdict::OnBoundary: return "on-boundary";
  }
  return "?";
}

// margin > 0 is the detectable side.
struct RegimeClassification {
  Verdict verdict = Verdict::OnBoundary;
  double threshold_value = 0.0;
  double margin = 0.0;
};

enum class BoundaryFamily { NormalSparse, DenseExpFamily, SparseExpFamily };

inline BoundaryFamily boundary_family_by_name(const std::string& name) {
  if (name == "normal-sparse") return BoundaryFamily::NormalSparse;
  if (name == "dense-expfam" || name == "dense") return BoundaryFamily::DenseExpFamily;
  if (name == "sparse-expfam") return BoundaryFamily::SparseExpFamily;
  throw DomainError("unknown boundary family '" + name +
                    "' (known: normal-sparse, dense-expfam, sparse-expfam)");
}

inline RegimeClassification classify_margin(double threshold, double margin,
                                            double tolerance = kBoundaryTolerance) {
  RegimeClassification c;
  c.threshold_value = threshold;
  c.margin = margin;
  if (std::abs(margin) <= tolerance) {
    c.verdict = Verdict::OnBoundary;
  } else {
    c.verdict = margin > 0.0 ? Verdict::Detectable : Verdict::Undetectable;
  }
  return c;
}

// Normal sparse: detectable above rho(beta). Dense: detectable below
// rho*(beta). Sparse exponential family with tail exponent p: detectable
// for beta below beta#(r, p).
inline RegimeClassification classify(BoundaryFamily family, double beta, double r,
                                     double p = 1.0, double tolerance = kBoundaryTolerance) {
  switch (family) {
    case BoundaryFamily::NormalSparse: {
      const double rho = rho_normal_sparse(beta);
      return classify_margin(rho, r - rho, tolerance);
    }
    case BoundaryFamily::DenseExpFamily: {
      const double rho = rho_dense(beta);
      return classify_margin(rho, rho - r, tolerance);
    }
    case BoundaryFamily::SparseExpFamily: {
      if (!(beta > 0.5 && beta <= 1.0)) throw DomainError("classify: need beta in (1/2, 1]");
      const double b = beta_sharp_expfam(r, p);
      return classify_margin(b, b - beta, tolerance);
    }
  }
  throw DomainError("classify: unknown family");
}

inline RegimeClassification classify(const std::string& family, double beta, double r,
                                     double p = 1.0, double tolerance = kBoundaryTolerance) {
  return classify(boundary_family_by_name(family), beta, r, p, tolerance);
}

// The boundary family a mixture belongs to, if its model has one.
inline std::optional<BoundaryFamily> boundary_family_of(const MixtureSpec& spec) {
  const std::string name = spec.family->name();
  const bool expfam = dynamic_cast<const ExpFamily*>(spec.family.get()) != nullptr;
  if (spec.regime() == Regime::Dense) {
    if (expfam || name == "normal") return BoundaryFamily::DenseExpFamily;
    return std::nullopt;
  }
  if (name == "normal" && spec.scale == ThetaScale::NormalSqrtLog) {
    return BoundaryFamily::NormalSparse;
  }
  if (expfam && spec.scale == ThetaScale::SparsePower) return BoundaryFamily::SparseExpFamily;
  return std::nullopt;
}

inline RegimeClassification classify(const MixtureSpec& spec,
                                     double tolerance = kBoundaryTolerance) {
  const auto family = boundary_family_of(spec);
  if (!family) throw DomainError("classify: no known boundary for " + spec.family->name());
  double p = 1.0;
  if (*family == BoundaryFamily::SparseExpFamily) {
    const auto* ef = dynamic_cast<const ExpFamily*>(spec.family.get());
    p = ef->tail_exponent() ? *ef->tail_exponent() : estimate_tail_exponent(*ef);
  }
  return classify(*family, spec.beta, spec.r, p, tolerance);
}

}  // namespace phidiv

#endif  // PHIDIV_BOUNDARY_HPP_

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

#ifndef PHIDIV_DIVERGENCE_HPP_
#define PHIDIV_DIVERGENCE_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "phidiv/error.hpp"

namespace phidiv {

/*
 * The power-divergence generators
 *
 *   phi_s(x) = (1 - s + s x - x^s) / (s (1 - s)),   s != 0, 1
 *   phi_0(x) = x - log(x) - 1
 *   phi_1(x) = x log(x) - x + 1
 *
 * and the pointwise Bernoulli divergence
 *
 *   K_s(u, v) = v phi_s(u / v) + (1 - v) phi_s((1 - u) / (1 - v)).
 *
 * Everything below works on phi_s(e^y) with y = log(x) and xm1 = x - 1 both
 * supplied, so callers that already hold logarithms avoid recomputing them.
 */

enum class PhiRegime { GenericS, LimitS0, LimitS1 };

class PhiIndex {
 public:
  static constexpr double kSingularityTolerance = 1e-8;

  explicit PhiIndex(double s) : s_(s) {
    if (!std::isfinite(s)) {
      throw DomainError("PhiIndex: s must be finite");
    }
    if (std::abs(s) < kSingularityTolerance) {
      regime_ = PhiRegime::LimitS0;
    } else if (std::abs(s - 1.0) < kSingularityTolerance) {
      regime_ = PhiRegime::LimitS1;
    } else {
      regime_ = PhiRegime::GenericS;
    }
  }

  double s() const noexcept { return s_; }
  PhiRegime regime() const noexcept { return regime_; }

  // The s actually used in evaluation: 0 or 1 inside the limit regimes.
  double effective_s() const noexcept {
    switch (regime_) {
      case PhiRegime::LimitS0:
        return 0.0;
      case PhiRegime::LimitS1:
        return 1.0;
      default:
        return s_;
    }
  }

 private:
  double s_;
  PhiRegime regime_ = PhiRegime::GenericS;
};

namespace detail {

constexpr double kInf = std::numeric_limits<double>::infinity();

// expm1(z) - z without cancellation for small z.
inline double expm1_minus_identity(double z) {
  if (std::abs(z) < 0.5) {
    double term = z * z / 2.0;
    double sum = term;
    for (int k = 3; k < 40; ++k) {
      term *= z / k;
      sum += term;
      if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  return std::expm1(z) - z;
}

// phi_s(e^y) = sum_{k>=2} y^k / k! * (1 + s + ... + s^{k-2}); converges fast
// when |y| * max(1, |s|) is small, and is free of cancellation there.
inline double phi_series(double s, double y) {
  double power_y = y;  // y^k / k!
  double partial = 1.0;  // 1 + s + ... + s^{k-2}
  double s_power = 1.0;  // s^{k-2}
  double bound = 1.0;    // 1 + |s| + ... + |s|^{k-2}, dominates |partial|
  double sum = 0.0;
  for (int k = 2; k < 80; ++k) {
    power_y *= y / k;
    if (k > 2) {
      s_power *= s;
      partial += s_power;
      bound += std::abs(s_power);
    }
    sum += power_y * partial;
    // Partial sums can vanish (s = -1), so stop on the bound, not the term.
    if (std::abs(power_y) * bound <= 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

inline double clamp_phi(double value) {
  if (std::isnan(value) || value == kInf) return kInf;
  return value < 0.0 ? 0.0 : value;
}

// Generic branch, s not close to 0 or 1:
//   phi_s(e^y) = ((e^y - 1 - y) - (e^{sy} - 1 - sy) / s) / (1 - s).
// Around s = 1 the reflection phi_s(x) = x phi_{1-s}(1/x) keeps the
// denominator away from zero.
inline double phi_generic(double s, double xm1, double y) {
  if (s > 0.5 && s < 1.5) {
    const double x = xm1 > -0.5 ? 1.0 + xm1 : std::exp(y);
    const double inner = phi_generic(1.0 - s, std::expm1(-y), -y);
    if (inner == 0.0) return 0.0;
    return clamp_phi(x * inner);
  }
  const double numer = (xm1 - y) - expm1_minus_identity(s * y) / s;
  return clamp_phi(numer / (1.0 - s));
}

inline double phi_from_log(const PhiIndex& index, double xm1, double y) {
  if (y == 0.0) return 0.0;
  const double s = index.effective_s();
  if (std::abs(y) * std::max(1.0, std::abs(s)) <= 0.5) {
    return clamp_phi(phi_series(s, y));
  }
  switch (index.regime()) {
    case PhiRegime::LimitS0:
      return clamp_phi(xm1 - y);
    case PhiRegime::LimitS1:
      if (std::isinf(y)) return y > 0 ? kInf : 1.0;
      return clamp_phi((xm1 > -0.5 ? 1.0 + xm1 : std::exp(y)) * y - xm1);
    default:
      return phi_generic(s, xm1, y);
  }
}

// K_s(u, v) with the two log-ratios already available.
inline double kappa_from_log(const PhiIndex& index, double u, double v,
                             double log_ratio_lo, double log_ratio_hi) {
  const double lo = phi_from_log(index, (u - v) / v, log_ratio_lo);
  const double hi = phi_from_log(index, (v - u) / (1.0 - v), log_ratio_hi);
  return v * lo + (1.0 - v) * hi;
}

inline void require_open_unit(double value, const char* what) {
  if (!(value > 0.0 && value < 1.0)) {
    throw DomainError(std::string(what) + " must lie strictly inside (0,1)");
  }
}

}  // namespace detail

// phi_s(x) for x >= 0. Returns +inf where the generator diverges (x = 0 with
// s <= 0, or overflow for large x).
inline double phi(const PhiIndex& index, double x) {
  if (!(x >= 0.0)) {
    throw DomainError("phi: x must be nonnegative");
  }
  if (x == 0.0) {
    const double s = index.effective_s();
    return s <= 0.0 ? detail::kInf : 1.0 / s;
  }
  if (std::isinf(x)) return detail::kInf;
  return detail::phi_from_log(index, x - 1.0, std::log(x));
}

inline double kappa(const PhiIndex& index, double u, double v) {
  detail::require_open_unit(u, "kappa: u");
  detail::require_open_unit(v, "kappa: v");
  const double lo_xm1 = (u - v) / v;
  const double hi_xm1 = (v - u) / (1.0 - v);
  return v * detail::phi_from_log(index, lo_xm1, std::log1p(lo_xm1)) +
         (1.0 - v) * detail::phi_from_log(index, hi_xm1, std::log1p(hi_xm1));
}

// Probability-integral-transformed observations, sorted, strictly inside (0,1).
// Ties are allowed.
class SortedPValueSample {
 public:
  static SortedPValueSample from_unsorted(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    return SortedPValueSample(std::move(values));
  }

  static SortedPValueSample from_sorted(std::vector<double> values) {
    if (!std::is_sorted(values.begin(), values.end())) {
      throw DomainError("SortedPValueSample: values are not sorted");
    }
    return SortedPValueSample(std::move(values));
  }

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

 private:
  explicit SortedPValueSample(std::vector<double> values)
      : values_(std::move(values)) {
    if (values_.empty()) {
      throw DomainError("SortedPValueSample: need at least one value");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!(values_[i] > 0.0 && values_[i] < 1.0)) {
        throw DomainError("SortedPValueSample: value " + std::to_string(i) +
                          " is outside the open interval (0,1)");
      }
    }
  }

  std::vector<double> values_;
};

enum class EndpointSide { LeftEndpoint, RightEndpoint };

struct DivergenceStatistic {
  PhiIndex index;
  double value;               // S_n(s), the supremum
  std::size_t argmax_index;   // rank i, 1 <= i <= n-1, with F_n = i/n there
  EndpointSide argmax_side;   // v = X_{i:n} (left) or v -> X_{i+1:n} (right)
};

// log(i/n) and log(1 - i/n) for i = 1..n-1; depends on n only, so it can be
// shared by every sample of that size.
class RankLogs {
 public:
  explicit RankLogs(std::size_t n) : n_(n), log_u_(n), log1m_u_(n) {
    const double dn = static_cast<double>(n);
    for (std::size_t i = 1; i < n; ++i) {
      log_u_[i] = std::log(static_cast<double>(i) / dn);
      log1m_u_[i] = std::log(static_cast<double>(n - i) / dn);
    }
  }

  std::size_t n() const noexcept { return n_; }
  double log_u(std::size_t i) const { return log_u_[i]; }
  double log1m_u(std::size_t i) const { return log1m_u_[i]; }

 private:
  std::size_t n_;
  std::vector<double> log_u_;
  std::vector<double> log1m_u_;
};

namespace detail {

// Cheap approximation of K_s(u, v) with a bound on its rounding error. The
// closed forms below cancel badly when K is small, but near the supremum
// the bound is tight enough that only a handful of candidates need the
// careful evaluation.
struct ScreenValue {
  double value;
  double error;
};

class KappaScreen {
 public:
  explicit KappaScreen(const PhiIndex& index) : s_(index.effective_s()) {
    if (index.regime() == PhiRegime::LimitS0) {
      kind_ = Kind::S0;
    } else if (index.regime() == PhiRegime::LimitS1) {
      kind_ = Kind::S1;
    } else if (s_ == 2.0) {
      kind_ = Kind::S2;
    } else {
      kind_ = Kind::Generic;
      inv_denom_ = 1.0 / (s_ * (1.0 - s_));
    }
  }

  ScreenValue operator()(double u, double v, double lu, double lv, double l1u,
                         double l1v) const {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    switch (kind_) {
      case Kind::S2: {
        // (u - v)^2 / (2 v (1 - v))
        const double d = u - v;
        const double w = 2.0 * v * (1.0 - v);
        const double value = d * d / w;
        const double scale = (u + v) * (u + v) / w;
        return {value, 16.0 * eps * scale};
      }
      case Kind::S1: {
        // u log(u/v) + (1-u) log((1-u)/(1-v))
        const double a = lu - lv;
        const double b = l1u - l1v;
        const double value = u * a + (1.0 - u) * b;
        const double scale = u * (std::abs(lu) + std::abs(lv) + std::abs(a)) +
                             (1.0 - u) * (std::abs(l1u) + std::abs(l1v) + std::abs(b));
        return {value, 16.0 * eps * scale};
      }
      case Kind::S0: {
        // -v log(u/v) - (1-v) log((1-u)/(1-v))
        const double a = lu - lv;
        const double b = l1u - l1v;
        const double value = -v * a - (1.0 - v) * b;
        const double scale = v * (std::abs(lu) + std::abs(lv) + std::abs(a)) +
                             (1.0 - v) * (std::abs(l1u) + std::abs(l1v) + std::abs(b));
        return {value, 16.0 * eps * scale};
      }
      case Kind::Generic:
      default: {
        // (1 - u^s v^{1-s} - (1-u)^s (1-v)^{1-s}) / (s (1 - s))
        const double t = 1.0 - s_;
        const double ea = s_ * lu + t * lv;
        const double eb = s_ * l1u + t * l1v;
        const double a = std::exp(ea);
        const double b = std::exp(eb);
        const double value = (1.0 - a - b) * inv_denom_;
        const double arg_a = std::abs(s_ * lu) + std::abs(t * lv) + std::abs(ea) + 1.0;
        const double arg_b = std::abs(s_ * l1u) + std::abs(t * l1v) + std::abs(eb) + 1.0;
        const double error = 16.0 * eps * std::abs(inv_denom_) *
                             (1.0 + a + b + a * arg_a + b * arg_b);
        return {value, std::isfinite(error) ? error : kInf};
      }
    }
  }

 private:
  enum class Kind { S0, S1, S2, Generic };
  double s_;
  double inv_denom_ = 0.0;
  Kind kind_ = Kind::Generic;
};

// Per-sample logarithms shared across every s evaluated on one sample.
struct SupWorkspace {
  const RankLogs& ranks;
  std::vector<double> log_v;
  std::vector<double> log1m_v;
  std::vector<ScreenValue> screen;  // 2 (n - 1) endpoint candidates

  SupWorkspace(std::span<const double> v, const RankLogs& rank_logs)
      : ranks(rank_logs), log_v(v.size()), log1m_v(v.size()) {
    if (rank_logs.n() != v.size()) {
      throw DomainError("sup_statistic: rank table built for a different n");
    }
    for (std::size_t j = 0; j < v.size(); ++j) {
      log_v[j] = std::log(v[j]);
      log1m_v[j] = std::log1p(-v[j]);
    }
    screen.resize(2 * v.size());
  }
};

inline DivergenceStatistic sup_with_workspace(std::span<const double> v,
                                              SupWorkspace& ws,
                                              const PhiIndex& index) {
  const std::size_t n = v.size();
  const double dn = static_cast<double>(n);
  const KappaScreen approx(index);

  // Candidates are (i, side): u = i/n with v = X_{i:n} (side 0) or X_{i+1:n}
  // (side 1). K_s(u, .) is convex in v, so on [X_{i:n}, X_{i+1:n}) the
  // supremum sits at one of the two endpoints.
  std::size_t top = 0;
  double top_value = -kInf;
  bool any = false;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t slot = 2 * i;
    // A tie X_{i:n} = X_{i+1:n} leaves F_n = i/n nowhere.
    if (!(v[i - 1] < v[i])) {
      ws.screen[slot] = ws.screen[slot + 1] = {-kInf, 0.0};
      continue;
    }
    any = true;
    const double u = static_cast<double>(i) / dn;
    const double lu = ws.ranks.log_u(i);
    const double l1u = ws.ranks.log1m_u(i);
    for (std::size_t side = 0; side < 2; ++side) {
      const std::size_t j = i - 1 + side;
      const ScreenValue sv = approx(u, v[j], lu, ws.log_v[j], l1u, ws.log1m_v[j]);
      ws.screen[slot + side] = sv;
      if (sv.value > top_value || std::isnan(sv.value)) {
        top_value = std::isnan(sv.value) ? kInf : sv.value;
        top = slot + side;
      }
    }
  }
  DivergenceStatistic best{index, 0.0, 1, EndpointSide::LeftEndpoint};
  if (!any) return best;  // all observations tied: empty sup domain

  const double floor = top_value - ws.screen[top].error;
  best.value = -1.0;
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t side = 0; side < 2; ++side) {
      const ScreenValue& sv = ws.screen[2 * i + side];
      if (sv.value == -kInf) continue;
      if (!(sv.value + sv.error >= floor) && !std::isnan(sv.value)) continue;
      const std::size_t j = i - 1 + side;
      const double u = static_cast<double>(i) / dn;
      const double k = kappa_from_log(index, u, v[j], ws.ranks.log_u(i) - ws.log_v[j],
                                      ws.ranks.log1m_u(i) - ws.log1m_v[j]);
      if (k > best.value) {
        best.value = k;
        best.argmax_index = i;
        best.argmax_side =
            side == 0 ? EndpointSide::LeftEndpoint : EndpointSide::RightEndpoint;
      }
    }
  }
  return best;
}

inline void require_statistic_size(std::size_t n) {
  if (n < 2) {
    throw DomainError("sup_statistic: need n >= 2 observations");
  }
}

}  // namespace detail

// S_n(s) = sup over X_{1:n} <= x < X_{n:n} of K_s(F_n(x), x), in p-value scale.
inline DivergenceStatistic sup_statistic(const SortedPValueSample& sample,
                                         const PhiIndex& index) {
  detail::require_statistic_size(sample.size());
  const RankLogs ranks(sample.size());
  detail::SupWorkspace ws(sample.values(), ranks);
  return detail::sup_with_workspace(sample.values(), ws, index);
}

// Several indices on the same sample, sharing the logarithm tables. `ranks`
// must have been built for sample.size().
inline std::vector<DivergenceStatistic> sup_statistics(const SortedPValueSample& sample,
                                                       std::span<const PhiIndex> indices,
                                                       const RankLogs& ranks) {
  detail::require_statistic_size(sample.size());
  detail::SupWorkspace ws(sample.values(), ranks);
  std::vector<DivergenceStatistic> out;
  out.reserve(indices.size());
  for (const auto& index : indices) {
    out.push_back(detail::sup_with_workspace(sample.values(), ws, index));
  }
  return out;
}

inline std::vector<DivergenceStatistic> sup_statistics(const SortedPValueSample& sample,
                                                       std::span<const PhiIndex> indices) {
  detail::require_statistic_size(sample.size());
  return sup_statistics(sample, indices, RankLogs(sample.size()));
}

/*
 * Normalized uniform empirical process supremum
 *
 *   Z_n(a, b) = sup_{a < x < b} sqrt(n) |F_n(x) - x| / sqrt(x (1 - x)).
 *
 * On each constancy interval of F_n the squared ratio is 2 K_2(F_n, x), which
 * is convex in x, so only the interval ends (one-sided limits at a, b and at
 * each jump) need checking.
 */
inline double z_sup(std::span<const double> sorted, double a, double b) {
  if (!(a > 0.0 && a < b && b < 1.0)) {
    throw DomainError("z_sup: need 0 < a < b < 1");
  }
  if (sorted.empty()) {
    throw DomainError("z_sup: empty sample");
  }
  const double dn = static_cast<double>(sorted.size());
  const auto ratio = [](double u, double x) {
    return std::abs(u - x) / std::sqrt(x * (1.0 - x));
  };
  // First index with value > a, i.e. F_n(a) = count / n.
  auto it = std::upper_bound(sorted.begin(), sorted.end(), a);
  double count = static_cast<double>(it - sorted.begin());
  double best = ratio(count / dn, a);
  while (it != sorted.end() && *it < b) {
    const double x = *it;
    best = std::max(best, ratio(count / dn, x));
    auto next = std::upper_bound(it, sorted.end(), x);
    count += static_cast<double>(next - it);
    best = std::max(best, ratio(count / dn, x));
    it = next;
  }
  best = std::max(best, ratio(count / dn, b));
  return std::sqrt(dn) * best;
}

inline double z_sup(const SortedPValueSample& sample, double a, double b) {
  return z_sup(sample.values(), a, b);
}

}  // namespace phidiv

#endif  // PHIDIV_DIVERGENCE_HPP_

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

#ifndef PHIDIV_NULLDIST_HPP_
#define PHIDIV_NULLDIST_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "phidiv/divergence.hpp"
#include "phidiv/error.hpp"
#include "phidiv/parallel.hpp"
#include "phidiv/random.hpp"

namespace phidiv {

// Smallest n for which log log log n is defined and positive.
inline constexpr std::uint64_t kMinCenteringN = 16;

// r_n = log log n + (1/2) log log log n - (1/2) log(4 pi).
inline double centering(std::uint64_t n) {
  if (n < kMinCenteringN) {
    throw DomainError("centering: need n >= 16, got " + std::to_string(n));
  }
  const double loglog = std::log(std::log(static_cast<double>(n)));
  return loglog + 0.5 * std::log(loglog) - 0.5 * std::log(4.0 * std::numbers::pi);
}

// r_n where defined, 0 below the centering domain.
inline double centering_or_zero(std::uint64_t n) {
  return n >= kMinCenteringN ? centering(n) : 0.0;
}

// Limit law of n S_n(s) - r_n: P(Y <= x) = exp(-4 exp(-x)).
struct GumbelLimit {
  static double cdf(double x) { return std::exp(-4.0 * std::exp(-x)); }

  static double quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
      throw DomainError("gumbel quantile: p must lie in (0,1)");
    }
    return std::log(4.0) - std::log(-std::log(p));
  }
};

inline double gumbel_cdf(double x) { return GumbelLimit::cdf(x); }
inline double gumbel_quantile(double p) { return GumbelLimit::quantile(p); }

// Critical value for S_n(s) from the limit law alone. Identical for every s.
// Convergence is slow, so treat this as advisory.
inline double asymptotic_critical(std::uint64_t n, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("asymptotic_critical: alpha must lie in (0,1)");
  }
  return (centering(n) + gumbel_quantile(1.0 - alpha)) / static_cast<double>(n);
}

// The same value on the n S_n(s) - r_n scale used by statistics and MC tables.
inline double asymptotic_critical_centered(std::uint64_t n, double alpha) {
  return static_cast<double>(n) * asymptotic_critical(n, alpha) - centering(n);
}

inline constexpr int kCalibrationVersion = 1;

// Monte-Carlo null distribution of n S_n(s) - r_n, sorted ascending.
struct CalibrationTable {
  std::uint64_t n = 0;
  double s = 0.0;
  std::uint64_t reps = 0;
  std::uint64_t seed = 0;
  std::string rng_id{kRngId};
  int version = kCalibrationVersion;
  std::vector<double> sorted_stats;

  bool operator==(const CalibrationTable&) const = default;
};

// Sorted uniform sample of size n from exponential spacings:
// X_{k:n} = (E_1 + ... + E_k) / (E_1 + ... + E_{n+1}).
inline std::vector<double> sorted_uniform_sample(Rng& rng, std::size_t n) {
  std::vector<double> out(n);
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    total += rng.exponential();
    out[k] = total;
  }
  total += rng.exponential();
  const double below_one = std::nextafter(1.0, 0.0);
  for (auto& x : out) x = std::min(x / total, below_one);
  return out;
}

// Replicate `rep` of the null experiment for sample size n under `seed`.
inline SortedPValueSample null_replicate(std::uint64_t n, std::uint64_t seed,
                                         std::uint64_t rep) {
  Rng rng = Rng::for_stream(seed, rep);
  return SortedPValueSample::from_sorted(sorted_uniform_sample(rng, n));
}

inline void require_table_args(std::uint64_t n, std::uint64_t reps) {
  if (n < 2) throw DomainError("mc_null_table: need n >= 2");
  if (reps < 100) throw DomainError("mc_null_table: need reps >= 100");
}

// One table per entry of s_values, all built from the same replicates. Each
// table equals the one mc_null_table would build for that s alone.
inline std::vector<CalibrationTable> mc_null_tables(std::uint64_t n,
                                                    std::span<const double> s_values,
                                                    std::uint64_t reps, std::uint64_t seed,
                                                    unsigned workers = 1) {
  require_table_args(n, reps);
  std::vector<PhiIndex> indices;
  indices.reserve(s_values.size());
  for (double s : s_values) indices.emplace_back(s);

  const double dn = static_cast<double>(n);
  const double offset = centering_or_zero(n);
  // stats[rep * k + j] for index j
  std::vector<double> stats(reps * indices.size());
  const RankLogs ranks(n);
  parallel_for(reps, workers, [&](std::size_t rep) {
    const auto sample = null_replicate(n, seed, rep);
    const auto values = sup_statistics(sample, indices, ranks);
    for (std::size_t j = 0; j < values.size(); ++j) {
      stats[rep * indices.size() + j] = dn * values[j].value - offset;
    }
  });

  std::vector<CalibrationTable> tables;
  tables.reserve(indices.size());
  for (std::size_t j = 0; j < indices.size(); ++j) {
    CalibrationTable table;
    table.n = n;
    table.s = s_values[j];
    table.reps = reps;
    table.seed = seed;
    table.sorted_stats.resize(reps);
    for (std::size_t rep = 0; rep < reps; ++rep) {
      table.sorted_stats[rep] = stats[rep * indices.size() + j];
    }
    std::sort(table.sorted_stats.begin(), table.sorted_stats.end());
    tables.push_back(std::move(table));
  }
  return tables;
}

inline CalibrationTable mc_null_table(std::uint64_t n, double s, std::uint64_t reps,
                                      std::uint64_t seed, unsigned workers = 1) {
  const double one[] = {s};
  return std::move(mc_null_tables(n, one, reps, seed, workers).front());
}

// 1-based rank ceil((1 - alpha)(reps + 1)), clamped to reps.
inline std::size_t critical_rank(std::size_t reps, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("critical value: alpha must lie in (0,1)");
  }
  const double raw = (1.0 - alpha) * static_cast<double>(reps + 1);
  // Absorb representation error in products like 0.95 * 20.
  auto rank = static_cast<std::size_t>(std::ceil(raw - 1e-9));
  return std::clamp<std::size_t>(rank, 1, reps);
}

inline double order_statistic_critical(std::span<const double> sorted, double alpha) {
  if (sorted.empty()) throw DomainError("critical value: empty table");
  return sorted[critical_rank(sorted.size(), alpha) - 1];
}

// Critical value for n S_n(s) - r_n at level alpha.
inline double mc_critical(const CalibrationTable& table, double alpha) {
  return order_statistic_critical(table.sorted_stats, alpha);
}

// Fewer than five expected exceedances makes the tail rank unstable.
inline bool mc_critical_is_reliable(const CalibrationTable& table, double alpha) {
  return alpha * static_cast<double>(table.reps) >= 5.0;
}

// (1 + #{table >= statistic}) / (reps + 1).
inline double rank_pvalue(std::span<const double> sorted, double statistic) {
  const auto first = std::lower_bound(sorted.begin(), sorted.end(), statistic);
  const auto at_least = static_cast<double>(sorted.end() - first);
  return (1.0 + at_least) / (static_cast<double>(sorted.size()) + 1.0);
}

inline double mc_pvalue(const CalibrationTable& table, double statistic) {
  return rank_pvalue(table.sorted_stats, statistic);
}

}  // namespace phidiv

#endif  // PHIDIV_NULLDIST_HPP_

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

#ifndef PHIDIV_EXPERIMENTS_HPP_
#define PHIDIV_EXPERIMENTS_HPP_

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "phidiv/boundary.hpp"
#include "phidiv/cache.hpp"
#include "phidiv/divergence.hpp"
#include "phidiv/models.hpp"
#include "phidiv/nulldist.hpp"
#include "phidiv/parallel.hpp"
#include "phidiv/random.hpp"

namespace phidiv {

// Two-sided 99% normal quantile.
inline constexpr double kWilsonZ99 = 2.5758293035489004;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

inline Interval wilson_interval(std::uint64_t successes, std::uint64_t trials,
                                double z = kWilsonZ99) {
  if (trials == 0) throw DomainError("wilson_interval: need at least one trial");
  if (successes > trials) throw DomainError("wilson_interval: successes exceed trials");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double center = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
  // The bounds are exactly 0 and 1 at the extremes; rounding would miss them.
  return {successes == 0 ? 0.0 : std::max(0.0, center - half),
          successes == trials ? 1.0 : std::min(1.0, center + half)};
}

// ---------------------------------------------------------------------------
// Single tests

struct TestOutcome {
  double s = 2.0;
  std::uint64_t n = 0;
  double alpha = 0.05;
  double statistic = 0.0;  // n S_n(s) - r_n
  double critical = 0.0;
  double asymptotic_critical = std::numeric_limits<double>::quiet_NaN();  // advisory
  bool reject = false;
  double mc_pvalue = 1.0;
};

namespace detail {

inline void require_table_for(const CalibrationTable& table, std::uint64_t n, double s) {
  if (table.n != n || bits_of(table.s) != bits_of(s)) {
    std::ostringstream msg;
    msg << "calibration table is for (n=" << table.n << ", s=" << table.s
        << ") but the test needs (n=" << n << ", s=" << s << ")";
    throw DomainError(msg.str());
  }
}

inline TestOutcome outcome_from(const DivergenceStatistic& stat, std::uint64_t n,
                                const CalibrationTable& table, double alpha) {
  TestOutcome out;
  out.s = table.s;
  out.n = n;
  out.alpha = alpha;
  out.statistic = static_cast<double>(n) * stat.value - centering_or_zero(n);
  out.critical = mc_critical(table, alpha);
  if (n >= kMinCenteringN) out.asymptotic_critical = asymptotic_critical_centered(n, alpha);
  out.reject = out.statistic > out.critical;
  out.mc_pvalue = mc_pvalue(table, out.statistic);
  return out;
}

}  // namespace detail

inline TestOutcome run_divergence_test(const SortedPValueSample& sample, double s,
                                       const CalibrationTable& table, double alpha) {
  detail::require_table_for(table, sample.size(), s);
  return detail::outcome_from(sup_statistic(sample, PhiIndex(s)), sample.size(), table, alpha);
}

// All tables at once, sharing one pass of rank logs.
inline std::vector<TestOutcome> run_divergence_tests(const SortedPValueSample& sample,
                                                     std::span<const CalibrationTable> tables,
                                                     double alpha, const RankLogs& ranks) {
  std::vector<PhiIndex> indices;
  indices.reserve(tables.size());
  for (const auto& t : tables) {
    detail::require_table_for(t, sample.size(), t.s);
    indices.emplace_back(t.s);
  }
  const auto stats = sup_statistics(sample, indices, ranks);
  std::vector<TestOutcome> out;
  out.reserve(tables.size());
  for (std::size_t j = 0; j < tables.size(); ++j) {
    out.push_back(detail::outcome_from(stats[j], sample.size(), tables[j], alpha));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Likelihood ratio benchmark

struct LrOutcome {
  double llr = 0.0;
  bool reject = false;
};

namespace detail {

// log((1 - eps) + eps e^l) without overflow or cancellation.
inline double log_mixture_ratio(double eps, double l) {
  if (eps == 0.0) return 0.0;
  if (l < 1.0) return std::log1p(eps * std::expm1(l));
  const double a = std::log1p(-eps);
  const double b = std::log(eps) + l;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

inline void require_lr(const MixtureSpec& spec) {
  if (!spec.family || !spec.family->has_density_ratio()) {
    throw DomainError("likelihood ratio test: model " +
                      (spec.family ? spec.family->name() : std::string("<none>")) +
                      " has no density ratio");
  }
}

}  // namespace detail

// log dQ_n^n / dP_0^n = sum_i log((1 - eps_n) + eps_n dmu_n/dP_0(x_i)).
inline double log_likelihood_ratio(std::span<const double> data, const MixtureSpec& spec) {
  detail::require_lr(spec);
  const double eps = spec.epsilon();
  if (eps == 0.0) return 0.0;
  const double theta = spec.theta();
  double llr = 0.0;
  for (double x : data) {
    llr += detail::log_mixture_ratio(eps, spec.family->log_density_ratio(theta, x));
  }
  return llr;
}

// MC null distribution of the log likelihood ratio, sorted ascending.
struct LrCalibration {
  std::uint64_t n = 0;
  std::uint64_t reps = 0;
  std::uint64_t seed = 0;
  std::vector<double> sorted_llr;
};

inline LrCalibration mc_lr_table(const MixtureSpec& spec, std::uint64_t reps, std::uint64_t seed,
                                 unsigned workers = 1) {
  detail::require_lr(spec);
  spec.validate();
  if (reps < 100) throw DomainError("mc_lr_table: need reps >= 100");
  LrCalibration out{spec.n, reps, seed, std::vector<double>(reps)};
  const auto noise = spec.noise();
  parallel_for(reps, workers, [&](std::size_t rep) {
    Rng rng = Rng::for_stream(seed, rep);
    std::vector<double> data(spec.n);
    for (auto& x : data) x = noise->sample(rng);
    out.sorted_llr[rep] = log_likelihood_ratio(data, spec);
  });
  std::sort(out.sorted_llr.begin(), out.sorted_llr.end());
  return out;
}

// Level-alpha test against an MC calibration of the same spec and n.
inline LrOutcome run_lr_test(std::span<const double> data, const MixtureSpec& spec,
                             const LrCalibration& table, double alpha) {
  if (table.n != data.size() || table.n != spec.n) {
    throw DomainError("likelihood ratio calibration does not match the sample size");
  }
  const double llr = log_likelihood_ratio(data, spec);
  return {llr, llr > order_statistic_critical(table.sorted_llr, alpha)};
}

// Neyman-Pearson test 1{dQ/dP >= 1}, which minimizes type I + type II error.
inline LrOutcome run_lr_test_zero_threshold(std::span<const double> data,
                                            const MixtureSpec& spec) {
  const double llr = log_likelihood_ratio(data, spec);
  return {llr, llr >= 0.0};
}

// ---------------------------------------------------------------------------
// Power sweeps

struct PowerGridConfig {
  FamilyPtr family;
  ThetaScale scale = ThetaScale::SparsePower;
  std::vector<double> betas;
  std::vector<double> rs;
  std::vector<double> s_values{2.0};
  std::vector<std::uint64_t> ns;
  double alpha = 0.05;
  std::uint64_t reps = 200;
  std::uint64_t calibration_reps = 1000;
  std::uint64_t seed = 1;
  std::optional<double> epsilon;  // forces eps_n, e.g. 0 for null recovery
  unsigned workers = 1;
  bool record_runtime = false;  // off keeps output files reproducible
};

struct PowerResult {
  std::string family;
  double beta = 0.0;
  double r = 0.0;
  double s = 0.0;
  std::uint64_t n = 0;
  double alpha = 0.0;
  std::uint64_t reps = 0;
  std::uint64_t seed = 0;
  std::uint64_t rejections = 0;
  double rate = std::numeric_limits<double>::quiet_NaN();
  Interval ci{std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
  double runtime_ms = 0.0;
  bool failed = false;
  std::string error;
};

// Seed shared by every calibration table of a sweep.
inline std::uint64_t calibration_seed(std::uint64_t master) {
  return hash_words({master, 0x63616c6962726174ULL});
}

// Seed of the (beta, r, n) cell. All s values of a cell see the same samples.
inline std::uint64_t cell_seed(std::uint64_t master, const std::string& family, double beta,
                               double r, std::uint64_t n, std::optional<double> epsilon) {
  return hash_words({master, detail::string_hash(family), bits_of(beta), bits_of(r), n,
                     epsilon ? bits_of(*epsilon) : 0x7fffffffffffffffULL});
}

namespace detail {

inline void validate_power_config(const PowerGridConfig& c) {
  if (!c.family) throw DomainError("power sweep: no model family");
  if (c.betas.empty() || c.rs.empty() || c.s_values.empty() || c.ns.empty()) {
    throw DomainError("power sweep: every grid axis needs at least one value");
  }
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw DomainError("power sweep: alpha must be in (0,1)");
  if (c.reps < 1) throw DomainError("power sweep: need reps >= 1");
  for (auto n : c.ns) {
    if (n < 2) throw DomainError("power sweep: need n >= 2");
  }
}

}  // namespace detail

// Rejection rates of the calibrated S_n(s) tests over the grid. A cell that
// throws is marked failed and the sweep moves on. Results are ordered by
// beta, r, n, s and do not depend on the worker count.
inline std::vector<PowerResult> power_sweep(const PowerGridConfig& config,
                                            CalibrationStore& store) {
  detail::validate_power_config(config);
  const std::string family = config.family->name();
  const PValueSide side = pvalue_side_for(config.family->signal_tail());
  std::vector<PowerResult> results;

  for (double beta : config.betas) {
    for (double r : config.rs) {
      for (std::uint64_t n : config.ns) {
        const auto start = std::chrono::steady_clock::now();
        std::vector<PowerResult> cell(config.s_values.size());
        for (std::size_t j = 0; j < cell.size(); ++j) {
          cell[j].family = family;
          cell[j].beta = beta;
          cell[j].r = r;
          cell[j].s = config.s_values[j];
          cell[j].n = n;
          cell[j].alpha = config.alpha;
          cell[j].reps = config.reps;
          cell[j].seed = config.seed;
        }
        try {
          MixtureSpec spec{config.family, beta, r, n, config.scale, config.epsilon};
          spec.validate();
          const auto tables = store.get_many(n, config.s_values, config.calibration_reps,
                                             calibration_seed(config.seed), config.workers);
          const RankLogs ranks(n);
          const std::uint64_t seed = cell_seed(config.seed, family, beta, r, n, config.epsilon);
          const std::size_t k = tables.size();
          std::vector<unsigned char> reject(config.reps * k, 0);
          const auto noise = spec.noise();
          parallel_for(config.reps, config.workers, [&](std::size_t rep) {
            const auto sample = sample_mixture(spec, seed, rep);
            const auto p = to_pvalues(sample.data, *noise, side);
            const auto outcomes = run_divergence_tests(p, tables, config.alpha, ranks);
            for (std::size_t j = 0; j < k; ++j) reject[rep * k + j] = outcomes[j].reject;
          });
          for (std::size_t j = 0; j < k; ++j) {
            std::uint64_t count = 0;
            for (std::size_t rep = 0; rep < config.reps; ++rep) count += reject[rep * k + j];
            cell[j].rejections = count;
            cell[j].rate = static_cast<double>(count) / static_cast<double>(config.reps);
            cell[j].ci = wilson_interval(count, config.reps);
          }
        } catch (const std::exception& e) {
          for (auto& res : cell) {
            res.failed = true;
            res.error = e.what();
          }
        }
        if (config.record_runtime) {
          const double ms = std::chrono::duration<double, std::milli>(
                                std::chrono::steady_clock::now() - start)
                                .count();
          for (auto& res : cell) res.runtime_ms = ms;
        }
        for (auto& res : cell) results.push_back(std::move(res));
      }
    }
  }
  return results;
}

inline std::vector<PowerResult> power_sweep(const PowerGridConfig& config) {
  CalibrationStore store;
  return power_sweep(config, store);
}

// Shortest text that reads back to the same double; "nan" for failed cells.
inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline constexpr const char* kPowerCsvHeader =
    "family,beta,r,s,n,alpha,reps,seed,rate,ci_lo,ci_hi,runtime_ms";

inline std::string power_results_csv(std::span<const PowerResult> results) {
  std::string out = kPowerCsvHeader;
  out += '\n';
  for (const auto& r : results) {
    out += r.family + ',' + format_number(r.beta) + ',' + format_number(r.r) + ',' +
           format_number(r.s) + ',' + std::to_string(r.n) + ',' + format_number(r.alpha) + ',' +
           std::to_string(r.reps) + ',' + std::to_string(r.seed) + ',' + format_number(r.rate) +
           ',' + format_number(r.ci.lo) + ',' + format_number(r.ci.hi) + ',' +
           format_number(r.runtime_ms) + '\n';
  }
  return out;
}

inline nlohmann::json to_json(const PowerResult& r) {
  nlohmann::json j = {{"family", r.family},     {"beta", r.beta},   {"r", r.r},
                      {"s", r.s},               {"n", r.n},         {"alpha", r.alpha},
                      {"reps", r.reps},         {"seed", r.seed},   {"rejections", r.rejections},
                      {"rate", r.rate},         {"ci_lo", r.ci.lo}, {"ci_hi", r.ci.hi},
                      {"runtime_ms", r.runtime_ms}};
  if (r.failed) {
    j["failed"] = true;
    j["error"] = r.error;
  }
  return j;
}

inline std::string power_results_json(std::span<const PowerResult> results) {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& r : results) doc.push_back(to_json(r));
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Boundary comparison

struct ErrorSum {
  std::uint64_t false_rejections = 0;  // under P_0^n
  std::uint64_t misses = 0;            // under Q_n^n
  std::uint64_t reps = 0;

  double type1() const { return static_cast<double>(false_rejections) / reps; }
  double type2() const { return static_cast<double>(misses) / reps; }
  double sum() const { return type1() + type2(); }
};

struct BoundaryComparison {
  std::string family;
  double beta = 0.0;
  double r = 0.0;
  std::uint64_t n = 0;
  double alpha = 0.0;
  std::uint64_t reps = 0;
  std::uint64_t seed = 0;
  std::vector<double> s_values;
  std::vector<ErrorSum> divergence;  // one per s
  ErrorSum lr;                       // zero-threshold likelihood ratio test

  // error sum of S_n(s) minus that of the likelihood ratio test
  double gap(std::size_t j) const { return divergence[j].sum() - lr.sum(); }
};

// Replicate pairs share uniforms: observation i is F_0^{-1}(u_i) under the
// null and, when it is a signal draw, F_mu^{-1}(u_i) under the mixture. The
// coupling leaves each marginal law intact and cuts the variance of the
// differences being compared.
inline BoundaryComparison boundary_comparison(const MixtureSpec& spec,
                                              std::span<const double> s_values, double alpha,
                                              std::uint64_t reps, std::uint64_t seed,
                                              CalibrationStore& store,
                                              std::uint64_t calibration_reps = 1000,
                                              unsigned workers = 1) {
  spec.validate();
  detail::require_lr(spec);
  if (s_values.empty()) throw DomainError("boundary_comparison: empty s list");
  if (reps < 1) throw DomainError("boundary_comparison: need reps >= 1");
  const auto where = classify(spec);
  if (where.verdict != Verdict::OnBoundary) {
    std::ostringstream msg;
    msg << "boundary_comparison: spec is not on the detection boundary (threshold "
        << where.threshold_value << ", margin " << where.margin << ")";
    throw DomainError(msg.str());
  }

  const std::uint64_t n = spec.n;
  const auto tables =
      store.get_many(n, s_values, calibration_reps, calibration_seed(seed), workers);
  const RankLogs ranks(n);
  const auto noise = spec.noise();
  const auto signal = spec.signal();
  const double eps = spec.epsilon();
  const PValueSide side = pvalue_side_for(spec.family->signal_tail());
  const std::size_t k = tables.size();
  const std::uint64_t stream_seed =
      hash_words({seed, detail::string_hash(spec.family->name()), bits_of(spec.beta),
                  bits_of(spec.r), n});

  // per rep: k divergence flags under null, k under mixture, then LR null, LR mixture
  std::vector<unsigned char> flags(reps * (2 * k + 2), 0);
  parallel_for(reps, workers, [&](std::size_t rep) {
    Rng rng = Rng::for_stream(stream_seed, rep);
    std::vector<double> null_data(n);
    std::vector<double> alt_data(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = rng.uniform();
      const bool is_signal = rng.uniform() < eps;
      null_data[i] = quantile_of_pair(*noise, u, 1.0 - u);
      alt_data[i] = is_signal ? quantile_of_pair(*signal, u, 1.0 - u) : null_data[i];
    }
    unsigned char* f = &flags[rep * (2 * k + 2)];
    const auto null_tests = run_divergence_tests(to_pvalues(null_data, *noise, side), tables,
                                                 alpha, ranks);
    const auto alt_tests =
        run_divergence_tests(to_pvalues(alt_data, *noise, side), tables, alpha, ranks);
    for (std::size_t j = 0; j < k; ++j) {
      f[j] = null_tests[j].reject;
      f[k + j] = !alt_tests[j].reject;
    }
    f[2 * k] = run_lr_test_zero_threshold(null_data, spec).reject;
    f[2 * k + 1] = !run_lr_test_zero_threshold(alt_data, spec).reject;
  });

  BoundaryComparison out;
  out.family = spec.family->name();
  out.beta = spec.beta;
  out.r = spec.r;
  out.n = n;
  out.alpha = alpha;
  out.reps = reps;
  out.seed = seed;
  out.s_values.assign(s_values.begin(), s_values.end());
  out.divergence.assign(k, ErrorSum{0, 0, reps});
  out.lr = ErrorSum{0, 0, reps};
  for (std::size_t rep = 0; rep < reps; ++rep) {
    const unsigned char* f = &flags[rep * (2 * k + 2)];
    for (std::size_t j = 0; j < k; ++j) {
      out.divergence[j].false_rejections += f[j];
      out.divergence[j].misses += f[k + j];
    }
    out.lr.false_rejections += f[2 * k];
    out.lr.misses += f[2 * k + 1];
  }
  return out;
}

inline std::string boundary_comparison_csv(const BoundaryComparison& c) {
  std::string out = "family,beta,r,n,alpha,reps,seed,test,s,type1,type2,error_sum,gap\n";
  auto row = [&](const std::string& test, const std::string& s, const ErrorSum& e,
                 const std::string& gap) {
    out += c.family + ',' + format_number(c.beta) + ',' + format_number(c.r) + ',' +
           std::to_string(c.n) + ',' + format_number(c.alpha) + ',' + std::to_string(c.reps) +
           ',' + std::to_string(c.seed) + ',' + test + ',' + s + ',' + format_number(e.type1()) +
           ',' + format_number(e.type2()) + ',' + format_number(e.sum()) + ',' + gap + '\n';
  };
  row("lr-zero-threshold", "", c.lr, "0");
  for (std::size_t j = 0; j < c.s_values.size(); ++j) {
    row("divergence", format_number(c.s_values[j]), c.divergence[j], format_number(c.gap(j)));
  }
  return out;
}

}  // namespace phidiv

#endif  // PHIDIV_EXPERIMENTS_HPP_

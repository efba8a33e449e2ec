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

// Draws one sparse normal mixture sample and tests it with several members
// of the S_n(s) family, each calibrated by Monte Carlo.

#include <cstdio>
#include <memory>
#include <vector>

#include "phidiv/boundary.hpp"
#include "phidiv/experiments.hpp"

int main() {
  using namespace phidiv;

  const std::uint64_t n = 20000;
  MixtureSpec spec{std::make_shared<NormalLocationFamily>(), 0.6, 0.4, n,
                   ThetaScale::NormalSqrtLog, std::nullopt};
  const auto where = classify(spec);
  std::printf("beta=%.2f r=%.2f  rho(beta)=%.3f  -> %s\n", spec.beta, spec.r,
              where.threshold_value, to_string(where.verdict).c_str());

  const auto sample = sample_mixture(spec, /*seed=*/7);
  const auto p = to_pvalues(sample.data, *spec.noise(), PValueSide::Upper);

  const std::vector<double> s_values = {-1.0, 0.0, 0.5, 1.0, 2.0};
  CalibrationStore store;
  const auto tables = store.get_many(n, s_values, /*reps=*/500, /*seed=*/1);
  const auto outcomes = run_divergence_tests(p, tables, 0.05, RankLogs(n));

  std::printf("%6s %12s %12s %9s %s\n", "s", "statistic", "critical", "p-value", "reject");
  for (const auto& o : outcomes) {
    std::printf("%6.2f %12.4f %12.4f %9.4f %s\n", o.s, o.statistic, o.critical, o.mc_pvalue,
                o.reject ? "yes" : "no");
  }
  return 0;
}

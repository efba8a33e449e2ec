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

#ifndef PHIDIV_QUADRATURE_HPP_
#define PHIDIV_QUADRATURE_HPP_

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "phidiv/error.hpp"

namespace phidiv {

inline constexpr double kQuadratureTolerance = 1e-10;

// Integral of g(u, 1 - u) over u in (lo, hi) within (0,1). Integrals over a
// half-line are done here after substituting x = F_0^{-1}(u); the second
// argument keeps 1 - u accurate next to u = 1. tanh-sinh copes with the
// endpoint singularities this substitution produces. A non-finite value or an
// error estimate that will not settle is reported as divergence.
template <typename G>
double integrate_unit(G&& g, const std::string& what, double lo = 0.0, double hi = 1.0,
                      double tolerance = kQuadratureTolerance) {
  // integrate() is not const in older Boost releases.
  thread_local boost::math::quadrature::tanh_sinh<double> rule;
  double error = 0.0;
  double l1 = 0.0;
  std::size_t levels = 0;
  double value = 0.0;
  auto integrand = [&](double u, double uc) {
    // uc is the signed distance to the nearer endpoint
    const double one_minus_u = (hi == 1.0 && uc > 0.0) ? uc : 1.0 - u;
    return g(u, one_minus_u);
  };
  try {
    value = rule.integrate(integrand, lo, hi, tolerance, &error, &l1, &levels);
  } catch (const std::exception& e) {
    throw DivergenceError(what + ": integrand not finite on the domain (" + e.what() + ")");
  }
  if (!std::isfinite(value) || !(error <= 1e3 * tolerance * std::max(1.0, l1))) {
    throw DivergenceError(what + ": quadrature did not converge (likely not integrable)");
  }
  return value;
}

}  // namespace phidiv

#endif  // PHIDIV_QUADRATURE_HPP_

/* Copyright 2026 The KEAG Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License. */

// Goodness-of-fit helpers for sampler tests.

#ifndef KEAG_TESTS_STATS_HPP_
#define KEAG_TESTS_STATS_HPP_

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace keag::oracle {

struct FitReport {
  double total_variation = 0.0;
  double chi_square = 0.0;
  double p_value = 1.0;
};

// Compares observed counts with expected probabilities. Categories with zero
// expected mass are excluded from the chi-square statistic.
inline FitReport Fit(std::span<const std::size_t> counts, std::span<const double> probs) {
  double n = 0.0;
  for (std::size_t c : counts) n += static_cast<double>(c);
  FitReport r;
  std::size_t df = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double observed = static_cast<double>(counts[i]);
    r.total_variation += 0.5 * std::abs(observed / n - probs[i]);
    const double expected = n * probs[i];
    if (expected > 0.0) {
      r.chi_square += (observed - expected) * (observed - expected) / expected;
      ++df;
    }
  }
  if (df > 1) {
    boost::math::chi_squared dist(static_cast<double>(df - 1));
    r.p_value = boost::math::cdf(boost::math::complement(dist, r.chi_square));
  }
  return r;
}

}  // namespace keag::oracle

#endif  // KEAG_TESTS_STATS_HPP_

// Copyright 2026 The FlowSim Authors
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

#include "flowsim/correlation.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <boost/math/distributions/students_t.hpp>

#include "flowsim/errors.h"

namespace flowsim {
namespace {

void CheckInputs(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw LengthMismatch("vectors have lengths " + std::to_string(x.size()) + " and " +
                         std::to_string(y.size()));
  }
  if (x.size() < 3) {
    throw LengthMismatch("need at least 3 pairs, got " + std::to_string(x.size()));
  }
  auto constant = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double a) { return a == v.front(); });
  };
  if (constant(x) || constant(y)) throw ConstantInput("correlation undefined for constant input");
}

double Mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double PearsonUnchecked(std::span<const double> x, std::span<const double> y) {
  const double mx = Mean(x);
  const double my = Mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double ExactSpearmanP(std::span<const double> rx, std::span<const double> ry, double rho) {
  std::vector<double> perm(ry.begin(), ry.end());
  std::sort(perm.begin(), perm.end());
  // Relative slack so permutations tying |rho| are counted despite rounding.
  const double threshold = std::abs(rho) * (1.0 - 1e-12);
  std::size_t total = 0, extreme = 0;
  do {
    ++total;
    if (std::abs(PearsonUnchecked(rx, perm)) >= threshold) ++extreme;
  } while (std::next_permutation(perm.begin(), perm.end()));
  // next_permutation skips duplicate orderings; each distinct one stands for
  // the same number of raw permutations, so the ratio is unchanged.
  return static_cast<double>(extreme) / static_cast<double>(total);
}

}  // namespace

std::vector<double> AverageRanks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i + j) / 2.0) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double PearsonR(std::span<const double> x, std::span<const double> y) {
  CheckInputs(x, y);
  return PearsonUnchecked(x, y);
}

double CorrelationPValue(double r, std::size_t n) {
  if (std::abs(r) >= 1.0) return 0.0;
  const double df = static_cast<double>(n) - 2.0;
  const double t = r * std::sqrt(df / ((1.0 - r) * (1.0 + r)));
  boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

CorrelationResult Correlate(std::span<const double> x, std::span<const double> y,
                            const CorrelationOptions& options) {
  CheckInputs(x, y);
  CorrelationResult result;
  result.n = x.size();
  result.pearson.r = PearsonUnchecked(x, y);
  result.pearson.p = CorrelationPValue(result.pearson.r, result.n);
  const std::vector<double> rx = AverageRanks(x);
  const std::vector<double> ry = AverageRanks(y);
  result.spearman.r = PearsonUnchecked(rx, ry);
  result.spearman.p = CorrelationPValue(result.spearman.r, result.n);
  if (options.exact_spearman_p) {
    if (result.n > kMaxExactPermutationN) {
      throw LengthMismatch("exact permutation p needs n <= " +
                           std::to_string(kMaxExactPermutationN) + ", got " +
                           std::to_string(result.n));
    }
    result.spearman_exact_p = ExactSpearmanP(rx, ry, result.spearman.r);
  }
  return result;
}

Json ToJson(const CorrelationResult& result) {
  Json node = {{"n", result.n},
               {"pearson", {{"r", result.pearson.r}, {"p", result.pearson.p}}},
               {"spearman", {{"r", result.spearman.r}, {"p", result.spearman.p}}}};
  if (result.spearman_exact_p) node["spearman"]["exact_p"] = *result.spearman_exact_p;
  return node;
}

}  // namespace flowsim

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
#include <random>

#include "doctest.h"
#include "flowsim/errors.h"
#include "test_util.h"

namespace flowsim {
namespace {

std::vector<double> Column(const std::map<std::string, double>& column) {
  std::vector<double> out;
  for (const auto& [id, value] : column) out.push_back(value);
  return out;
}

TEST_CASE("average ranks share ties") {
  const std::vector<double> v = {10, 20, 10, 30, 20, 20};
  CHECK(AverageRanks(v) == std::vector<double>{1.5, 4, 1.5, 6, 4, 4});
  CHECK(AverageRanks(std::vector<double>{}).empty());
}

TEST_CASE("textbook IQ versus television hours") {
  const std::vector<double> iq = {106, 100, 86, 101, 99, 103, 97, 113, 112, 110};
  const std::vector<double> tv = {7, 27, 2, 50, 28, 29, 20, 12, 6, 17};
  const CorrelationResult r = Correlate(iq, tv);
  CHECK(r.n == 10);
  // rho = 1 - 6 * 194 / (10 * 99) = -29 / 165.
  CHECK(r.spearman.r == doctest::Approx(-29.0 / 165.0).epsilon(1e-12));
  CHECK(r.spearman.p == doctest::Approx(0.6271883447764844).epsilon(1e-9));
  CHECK(r.pearson.r == doctest::Approx(-0.07021632602905672).epsilon(1e-12));
  CHECK(r.pearson.p == doctest::Approx(0.8471568394789463).epsilon(1e-9));
}

TEST_CASE("thirty-point pairing matches the frozen reference") {
  const auto columns = testing::LoadScoreColumns("correlation_30.csv");
  const std::vector<double> human = Column(columns.at("human"));
  const std::vector<double> metric = Column(columns.at("metric"));
  REQUIRE(human.size() == 30);
  const CorrelationResult r = Correlate(human, metric);
  CHECK(std::abs(r.pearson.r - 0.9144189171171974) < 1e-9);
  CHECK(std::abs(r.spearman.r - 0.9155147242058893) < 1e-9);
  // Tiny p-values are compared relative to their size.
  CHECK(r.pearson.p == doctest::Approx(1.6306124557742573e-12).epsilon(1e-9));
  CHECK(r.spearman.p == doctest::Approx(1.3708678130228213e-12).epsilon(1e-9));
}

TEST_CASE("identical and reversed vectors") {
  const std::vector<double> x = {3, 1, 4, 1.5, 9, 2.6};
  std::vector<double> reversed = x;
  for (double& v : reversed) v = -v;
  const CorrelationResult same = Correlate(x, x);
  CHECK(same.pearson.r == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(same.spearman.r == 1.0);
  CHECK(same.pearson.p == 0.0);
  const CorrelationResult opposite = Correlate(x, reversed);
  CHECK(opposite.spearman.r == -1.0);
  CHECK(opposite.spearman.p == 0.0);
}

TEST_CASE("input errors") {
  const std::vector<double> three = {1, 2, 3};
  const std::vector<double> constant = {5, 5, 5};
  CHECK_THROWS_AS(Correlate(three, constant), ConstantInput);
  CHECK_THROWS_AS(Correlate(constant, three), ConstantInput);
  CHECK_THROWS_AS(Correlate(three, std::vector<double>{1, 2}), LengthMismatch);
  CHECK_THROWS_AS(Correlate(std::vector<double>{1, 2}, std::vector<double>{2, 1}),
                  LengthMismatch);
  CHECK_THROWS_AS(PearsonR(three, constant), ConstantInput);
}

TEST_CASE("exact permutation p") {
  const std::vector<double> a = {1, 2, 3, 4, 5};
  const std::vector<double> b = {2, 1, 4, 3, 5};
  CorrelationOptions options;
  options.exact_spearman_p = true;
  const CorrelationResult r = Correlate(a, b, options);
  CHECK(r.spearman.r == doctest::Approx(0.8));
  REQUIRE(r.spearman_exact_p.has_value());
  // 16 of the 120 orderings reach |rho| >= 0.8.
  CHECK(*r.spearman_exact_p == doctest::Approx(16.0 / 120.0).epsilon(1e-12));
  CHECK_FALSE(Correlate(a, b).spearman_exact_p.has_value());

  std::vector<double> big(kMaxExactPermutationN + 1);
  std::iota(big.begin(), big.end(), 0.0);
  CHECK_THROWS_AS(Correlate(big, big, options), LengthMismatch);
}

TEST_CASE("coefficients are symmetric and invariant to monotone maps") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(15), y(15);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = noise(rng);
      y[i] = x[i] + noise(rng);
    }
    const CorrelationResult xy = Correlate(x, y);
    const CorrelationResult yx = Correlate(y, x);
    CHECK(xy.pearson.r == doctest::Approx(yx.pearson.r).epsilon(1e-12));
    CHECK(xy.spearman.r == doctest::Approx(yx.spearman.r).epsilon(1e-12));
    CHECK(std::abs(xy.pearson.r) <= 1.0);
    CHECK(xy.pearson.p >= 0.0);
    CHECK(xy.pearson.p <= 1.0);
    std::vector<double> cubed = y;
    for (double& v : cubed) v = v * v * v;
    CHECK(Correlate(x, cubed).spearman.r == doctest::Approx(xy.spearman.r).epsilon(1e-12));
  }
}

TEST_CASE("p-value edges") {
  CHECK(CorrelationPValue(0.0, 10) == doctest::Approx(1.0));
  CHECK(CorrelationPValue(1.0, 10) == 0.0);
  CHECK(CorrelationPValue(-1.0, 10) == 0.0);
  CHECK(CorrelationPValue(0.5, 10) == CorrelationPValue(-0.5, 10));
}

TEST_CASE("JSON output") {
  const std::vector<double> a = {1, 2, 3, 4, 5};
  const std::vector<double> b = {2, 1, 4, 3, 5};
  CorrelationOptions options;
  options.exact_spearman_p = true;
  const Json node = ToJson(Correlate(a, b, options));
  CHECK(node.at("n") == 5);
  CHECK(node.at("pearson").contains("r"));
  CHECK(node.at("spearman").contains("exact_p"));
  CHECK_FALSE(ToJson(Correlate(a, b)).at("spearman").contains("exact_p"));
}

}  // namespace
}  // namespace flowsim

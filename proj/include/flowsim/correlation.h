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

// Pearson and Spearman correlation with two-sided p-values.

#ifndef FLOWSIM_CORRELATION_H_
#define FLOWSIM_CORRELATION_H_

#include <optional>
#include <span>
#include <vector>

#include "flowsim/workflow.h"

namespace flowsim {

struct Coefficient {
  double r = 0.0;
  double p = 1.0;
};

struct CorrelationResult {
  std::size_t n = 0;
  Coefficient pearson;
  Coefficient spearman;
  // Exact two-sided permutation p for Spearman, when requested.
  std::optional<double> spearman_exact_p;
};

inline constexpr std::size_t kMaxExactPermutationN = 12;

struct CorrelationOptions {
  // Enumerates all n! orderings; n > kMaxExactPermutationN throws
  // LengthMismatch.
  bool exact_spearman_p = false;
};

// Ranks starting at 1; ties get the average of the ranks they span.
std::vector<double> AverageRanks(std::span<const double> values);

// Throws LengthMismatch when sizes differ or n < 3, ConstantInput when either
// vector is constant. The p-values use the t distribution with n - 2 degrees
// of freedom; |r| = 1 gives p = 0.
double PearsonR(std::span<const double> x, std::span<const double> y);
CorrelationResult Correlate(std::span<const double> x, std::span<const double> y,
                            const CorrelationOptions& options = {});

// Two-sided p for coefficient r over n pairs.
double CorrelationPValue(double r, std::size_t n);

Json ToJson(const CorrelationResult& result);

}  // namespace flowsim

#endif  // FLOWSIM_CORRELATION_H_

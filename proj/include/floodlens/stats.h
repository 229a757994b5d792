// Copyright 2026 The FloodLens Authors.
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

#ifndef FLOODLENS_STATS_H_
#define FLOODLENS_STATS_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "floodlens/series.h"

namespace floodlens::stats {

enum class Method {
  SpearmanPermutation,
  SpearmanTApprox,
  PearsonTApprox,
  PearsonPermutation,
};

std::string_view method_name(Method m);
std::optional<Method> parse_method(std::string_view text);

enum class PValueMode {
  Auto,     // exact permutation for n <= kAutoExactMaxN, else t-approximation
  Exact,    // exact permutation; n <= kExactMaxN
  TApprox,  // Student t with n - 2 degrees of freedom
};

inline constexpr std::size_t kAutoExactMaxN = 8;
inline constexpr std::size_t kExactMaxN = 10;

struct CorrelationResult {
  double coefficient = 0.0;
  std::size_t n = 0;
  double p_value = 1.0;  // two-sided
  Method method = Method::SpearmanTApprox;
};

// Ranks 1..n; tied values share the mean of their positions.
std::vector<double> rank(std::span<const double> values);

// Product-moment coefficient via centered two-pass sums. Throws DataError
// when either side is constant.
double pearson_coefficient(std::span<const double> x, std::span<const double> y);

CorrelationResult spearman(std::span<const double> x, std::span<const double> y,
                           PValueMode mode = PValueMode::Auto);
CorrelationResult pearson(std::span<const double> x, std::span<const double> y,
                          PValueMode mode = PValueMode::Auto);

// Fraction of the n! orderings of |y| whose |r| is at least the observed |r|.
double permutation_p_value(std::span<const double> x, std::span<const double> y);

// Two-sided p for H0: rho = 0 using t = r sqrt((n-2)/(1-r^2)), df = n-2.
double t_test_p_value(double r, std::size_t n);

// I_x(a, b) by the modified Lentz continued fraction, using the symmetry
// I_x(a,b) = 1 - I_{1-x}(b,a) where the fraction converges slowly.
double regularized_incomplete_beta(double a, double b, double x);

// CDF of Student's t distribution with |df| degrees of freedom.
double student_t_cdf(double t, double df);

// "***" for p < 0.01, "**" for p < 0.05, "*" for p < 0.1, "" otherwise.
std::string stars(double p);

struct CorrelateOptions {
  int lag = 0;
  PValueMode pvalue = PValueMode::Auto;
  std::string source = "news/satellite";
};

struct TableRow {
  std::string region_id;
  std::string source;
  CorrelationResult result;
  std::string stars;
};

// For each reference series, aligns the news series of the same region and
// reports Spearman then Pearson rows.
std::vector<TableRow> correlate_table(std::span<const series::RegionSeries> news,
                                      std::span<const series::RegionSeries> reference,
                                      const CorrelateOptions &options = {});

// Spearman and Pearson rows over already paired values (e.g. EM-DAT events).
std::vector<TableRow> correlate_pairs(const std::string &region_id, const std::string &source,
                                      std::span<const double> x, std::span<const double> y,
                                      PValueMode mode);

// CSV `region_id,source,coefficient,n,p_value,stars,method`.
std::string table_csv(std::span<const TableRow> rows);
std::vector<TableRow> load_table(const std::filesystem::path &path);

}  // namespace floodlens::stats

#endif  // FLOODLENS_STATS_H_

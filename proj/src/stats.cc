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

#include "floodlens/stats.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "floodlens/csv.h"
#include "floodlens/error.h"
#include "floodlens/io.h"
#include "floodlens/refdata.h"

namespace floodlens::stats {

std::string_view method_name(Method m) {
  switch (m) {
    case Method::SpearmanPermutation: return "spearman_permutation";
    case Method::SpearmanTApprox: return "spearman_t";
    case Method::PearsonTApprox: return "pearson_t";
    case Method::PearsonPermutation: return "pearson_permutation";
  }
  return "?";
}

std::optional<Method> parse_method(std::string_view text) {
  for (Method m : {Method::SpearmanPermutation, Method::SpearmanTApprox,
                   Method::PearsonTApprox, Method::PearsonPermutation}) {
    if (method_name(m) == text) return m;
  }
  return std::nullopt;
}

namespace {

void check_finite(std::span<const double> v, const char *what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw DataError(what, "non-finite input value");
  }
}

void check_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw DataError("correlation", "length mismatch (" + std::to_string(x.size()) +
                                       " vs " + std::to_string(y.size()) + ")");
  }
  if (x.size() < 3) throw DataError("correlation", "need n >= 3 pairs");
  check_finite(x, "correlation");
  check_finite(y, "correlation");
}

std::vector<double> centered(std::span<const double> v) {
  double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] - mean;
  return out;
}

double clamp_unit(double r) { return std::clamp(r, -1.0, 1.0); }

CorrelationResult with_p_value(double r, std::span<const double> x,
                               std::span<const double> y, PValueMode mode,
                               Method exact, Method approx) {
  CorrelationResult res;
  res.coefficient = r;
  res.n = x.size();
  bool use_exact = mode == PValueMode::Exact ||
                   (mode == PValueMode::Auto && res.n <= kAutoExactMaxN);
  if (use_exact) {
    if (res.n > kExactMaxN) {
      throw UsageError("exact permutation p-values need n <= " +
                       std::to_string(kExactMaxN) + ", got " + std::to_string(res.n));
    }
    res.p_value = permutation_p_value(x, y);
    res.method = exact;
  } else {
    res.p_value = t_test_p_value(r, res.n);
    res.method = approx;
  }
  return res;
}

}  // namespace

std::vector<double> rank(std::span<const double> values) {
  check_finite(values, "rank");
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    // Positions i..j (0-based) share rank mean((i+1)..(j+1)).
    double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double pearson_coefficient(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  auto cx = centered(x);
  auto cy = centered(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < cx.size(); ++i) {
    sxy += cx[i] * cy[i];
    sxx += cx[i] * cx[i];
    syy += cy[i] * cy[i];
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw DataError("correlation", "constant input; coefficient undefined");
  }
  return clamp_unit(sxy / std::sqrt(sxx * syy));
}

CorrelationResult spearman(std::span<const double> x, std::span<const double> y,
                           PValueMode mode) {
  check_pair(x, y);
  auto rx = rank(x);
  auto ry = rank(y);
  double r = pearson_coefficient(rx, ry);
  return with_p_value(r, rx, ry, mode, Method::SpearmanPermutation,
                      Method::SpearmanTApprox);
}

CorrelationResult pearson(std::span<const double> x, std::span<const double> y,
                          PValueMode mode) {
  double r = pearson_coefficient(x, y);
  return with_p_value(r, x, y, mode, Method::PearsonPermutation, Method::PearsonTApprox);
}

double permutation_p_value(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const std::size_t n = x.size();
  auto cx = centered(x);
  auto cy = centered(y);
  double sxx = 0.0, syy = 0.0, observed = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += cx[i] * cx[i];
    syy += cy[i] * cy[i];
    observed += cx[i] * cy[i];
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw DataError("correlation", "constant input; coefficient undefined");
  }
  // Compare covariances; the normalizer is permutation invariant.
  const double threshold = std::abs(observed) * (1.0 - 1e-12) - 1e-15 * std::sqrt(sxx * syy);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::uint64_t hits = 0, total = 0;
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += cx[i] * cy[perm[i]];
    if (std::abs(s) >= threshold) ++hits;
    ++total;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(hits) / static_cast<double>(total);
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0) || !(b > 0)) throw Error("incomplete beta: a and b must be positive");
  if (!(x >= 0.0 && x <= 1.0)) throw Error("incomplete beta: x outside [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  if (x > (a + 1.0) / (a + b + 2.0)) return 1.0 - regularized_incomplete_beta(b, a, 1.0 - x);

  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);

  // Modified Lentz evaluation of the continued fraction
  //   1 / (1 + d1 / (1 + d2 / (1 + ...)))
  // with d_{2m+1} = -(a+m)(a+b+m)x / ((a+2m)(a+2m+1)) and
  //      d_{2m}   = m(b-m)x / ((a+2m-1)(a+2m)).
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-15;
  double c = 1.0;
  double d = 1.0 - (a + b) * x / (a + 1.0);
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double f = d;
  for (int m = 1; m <= 10000; ++m) {
    const double dm = static_cast<double>(m);
    double num = dm * (b - dm) * x / ((a + 2 * dm - 1) * (a + 2 * dm));
    d = 1.0 + num * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + num / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    f *= d * c;

    num = -(a + dm) * (a + b + dm) * x / ((a + 2 * dm) * (a + 2 * dm + 1));
    d = 1.0 + num * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + num / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    f *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::exp(log_front) * f / a;
}

double student_t_cdf(double t, double df) {
  if (!(df > 0)) throw Error("student t: df must be positive");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double tail = 0.5 * regularized_incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
  return t > 0 ? 1.0 - tail : tail;
}

double t_test_p_value(double r, std::size_t n) {
  if (n < 3) throw DataError("correlation", "need n >= 3 pairs");
  const double df = static_cast<double>(n - 2);
  const double r2 = r * r;
  if (r2 >= 1.0) return 0.0;
  const double t2 = r2 * df / (1.0 - r2);
  // Two-sided p = I_{df/(df+t^2)}(df/2, 1/2)
  return std::clamp(regularized_incomplete_beta(0.5 * df, 0.5, df / (df + t2)), 0.0, 1.0);
}

std::string stars(double p) {
  if (p < 0.01) return "***";
  if (p < 0.05) return "**";
  if (p < 0.1) return "*";
  return "";
}

std::vector<TableRow> correlate_pairs(const std::string &region_id, const std::string &source,
                                      std::span<const double> x, std::span<const double> y,
                                      PValueMode mode) {
  std::vector<TableRow> rows;
  for (bool rank_based : {true, false}) {
    TableRow row;
    row.region_id = region_id;
    row.source = source;
    row.result = rank_based ? spearman(x, y, mode) : pearson(x, y, mode);
    row.stars = stars(row.result.p_value);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<TableRow> correlate_table(std::span<const series::RegionSeries> news,
                                      std::span<const series::RegionSeries> reference,
                                      const CorrelateOptions &options) {
  std::vector<TableRow> rows;
  for (const auto &ref : reference) {
    auto it = std::find_if(news.begin(), news.end(), [&](const series::RegionSeries &s) {
      return s.region_id == ref.region_id;
    });
    if (it == news.end()) {
      throw DataError("correlate", "no news series for region '" + ref.region_id + "'");
    }
    refdata::Paired p = refdata::align(*it, ref, options.lag);
    try {
      auto part = correlate_pairs(ref.region_id, options.source, p.x, p.y, options.pvalue);
      rows.insert(rows.end(), part.begin(), part.end());
    } catch (const DataError &e) {
      throw DataError("correlate " + ref.region_id, e.what());
    }
  }
  return rows;
}

std::string table_csv(std::span<const TableRow> rows) {
  csv::Writer w({"region_id", "source", "coefficient", "n", "p_value", "stars", "method"});
  for (const auto &r : rows) {
    w.row({r.region_id, r.source, format_double(r.result.coefficient),
           std::to_string(r.result.n), format_double(r.result.p_value), r.stars,
           std::string(method_name(r.result.method))});
  }
  return w.str();
}

std::vector<TableRow> load_table(const std::filesystem::path &path) {
  csv::Table table = csv::Table::read(path);
  table.require({"region_id", "source", "coefficient", "n", "p_value", "stars", "method"});
  std::vector<TableRow> rows;
  for (const auto &rec : table.records()) {
    TableRow r;
    r.region_id = rec.fields[table.index("region_id")];
    r.source = rec.fields[table.index("source")];
    long long n;
    auto method = parse_method(rec.fields[table.index("method")]);
    if (!parse_double(rec.fields[table.index("coefficient")], r.result.coefficient) ||
        !parse_int64(rec.fields[table.index("n")], n) ||
        !parse_double(rec.fields[table.index("p_value")], r.result.p_value) || !method) {
      throw DataError(table.where(rec), "malformed correlation row");
    }
    r.result.n = static_cast<std::size_t>(n);
    r.result.method = *method;
    r.stars = rec.fields[table.index("stars")];
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace floodlens::stats

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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "floodlens/classify.h"
#include "floodlens/csv.h"
#include "floodlens/io.h"
#include "floodlens/pipeline.h"
#include "floodlens/series.h"
#include "floodlens/stats.h"
#include "floodlens/synth.h"

namespace fs = std::filesystem;
using namespace floodlens;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(const std::string &name, double budget_s, const std::function<Outcome()> &body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception &e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs < budget_s;
  const bool pass = o.pass && in_time;
  failures += !pass;
  std::printf("%s  %-28s %.2fs (limit %.0fs)  %s%s\n", pass ? "PASS" : "FAIL", name.c_str(), secs,
              budget_s, o.detail.c_str(), in_time ? "" : "  [over time limit]");
  std::fflush(stdout);
}

std::string num(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

// Independent references.

std::vector<double> rank_oracle(const std::vector<double> &v) {
  // Sort-and-scan: tied runs share the mean of their 1-based positions.
  std::vector<std::pair<double, std::size_t>> s;
  for (std::size_t i = 0; i < v.size(); ++i) s.emplace_back(v[i], i);
  std::sort(s.begin(), s.end());
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < s.size();) {
    std::size_t j = i;
    while (j < s.size() && s[j].first == s[i].first) ++j;
    for (std::size_t k = i; k < j; ++k) out[s[k].second] = double(i + 1 + j) / 2.0;
    i = j;
  }
  return out;
}

double pearson_oracle(const std::vector<double> &x, const std::vector<double> &y) {
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= x.size();
  my /= y.size();
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return double(sxy / std::sqrt(sxx * syy));
}

bool constant(const std::vector<double> &v) {
  return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) == v.end();
}

class Scratch {
 public:
  Scratch() : path_(fs::temp_directory_path() / ("floodlens-acceptance-" + std::to_string(::getpid()))) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  fs::path operator/(const std::string &name) const { return path_ / name; }

 private:
  fs::path path_;
};

void run_chain(const fs::path &bundle, const fs::path &out) {
  pipeline::PipelineConfig pc;
  pc.bundle = bundle;
  pc.out_dir = out;
  std::ostringstream log;
  pipeline::run_all(pc, {log, log});
}

Outcome conservation(const fs::path &out) {
  const auto &gaz = geo::Gazetteer::builtin();
  const auto counts = series::load_counts(out / pipeline::kCountsFile);
  const series::CountSeries *country = nullptr;
  std::vector<const series::CountSeries *> divisions;
  for (const auto &c : counts) {
    const auto *r = gaz.find(c.region_id);
    if (!r) return {false, "unknown region " + c.region_id};
    if (r->level == geo::Level::Country) country = &c;
    if (r->level == geo::Level::Division) divisions.push_back(&c);
  }
  if (!country || divisions.size() != 8) return {false, "missing country or division counts"};
  std::size_t weeks = 0;
  for (const auto &[w, p] : country->points) {
    double sum = 0;
    for (const auto *d : divisions) sum += d->points.at(w).flood;
    if (sum != p.flood) return {false, "week " + w.str() + ": divisions " + num(sum) + " vs country " + num(p.flood)};
    ++weeks;
  }
  return {true, std::to_string(weeks) + " weeks exact"};
}

}  // namespace

int main() {
  Scratch scratch;
  const auto &gaz = geo::Gazetteer::builtin();

  criterion("rank/correlation oracles", 10, [] {
    std::mt19937_64 rng(20260101);
    std::size_t pairs = 0;
    double worst = 0;
    while (pairs < 1000) {
      const std::size_t n = std::uniform_int_distribution<std::size_t>(3, 50)(rng);
      // Values from a small pool plant ties.
      const int pool = std::uniform_int_distribution<int>(2, 12)(rng);
      std::vector<double> x(n), y(n);
      for (auto *v : {&x, &y})
        for (auto &e : *v)
          e = std::bernoulli_distribution(0.5)(rng)
                  ? double(std::uniform_int_distribution<int>(0, pool)(rng))
                  : std::normal_distribution<double>(0, 5)(rng);
      if (constant(x) || constant(y)) continue;
      ++pairs;
      if (stats::rank(x) != rank_oracle(x) || stats::rank(y) != rank_oracle(y))
        return Outcome{false, "rank mismatch at pair " + std::to_string(pairs)};
      const double s = stats::spearman(x, y, stats::PValueMode::TApprox).coefficient;
      const double p = stats::pearson(x, y, stats::PValueMode::TApprox).coefficient;
      worst = std::max({worst, std::abs(s - pearson_oracle(rank_oracle(x), rank_oracle(y))),
                        std::abs(p - pearson_oracle(x, y))});
    }
    return Outcome{worst < 1e-12, "1000 pairs, ranks exact, max |diff| " + num(worst, 3)};
  });

  criterion("exact permutation p-values", 1, [] {
    const std::vector<double> a = {1, 2, 3}, b = {6, 4, 2};
    const double p3 = stats::spearman(a, b, stats::PValueMode::Exact).p_value;
    if (std::abs(p3 - 2.0 / 6.0) > 1e-15) return Outcome{false, "n=3 p " + num(p3)};
    // n=5: compare against a count over all 120 orderings.
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> x(5), y(5);
      for (auto &v : x) v = double(std::uniform_int_distribution<int>(0, 6)(rng));
      for (auto &v : y) v = double(std::uniform_int_distribution<int>(0, 6)(rng));
      if (constant(x) || constant(y)) continue;
      const auto rx = rank_oracle(x), ry = rank_oracle(y);
      const double r0 = std::abs(pearson_oracle(rx, ry));
      std::vector<int> perm = {0, 1, 2, 3, 4};
      int hits = 0, total = 0;
      do {
        std::vector<double> py(5);
        for (int i = 0; i < 5; ++i) py[std::size_t(i)] = ry[std::size_t(perm[std::size_t(i)])];
        hits += std::abs(pearson_oracle(rx, py)) >= r0 - 1e-12;
        ++total;
      } while (std::next_permutation(perm.begin(), perm.end()));
      const auto res = stats::spearman(x, y);
      if (total != 120 || res.method != stats::Method::SpearmanPermutation ||
          std::abs(res.p_value - double(hits) / 120.0) > 1e-15)
        return Outcome{false, "n=5 trial " + std::to_string(trial) + ": p " + num(res.p_value) +
                                  " vs " + std::to_string(hits) + "/120"};
    }
    return Outcome{true, "n=3 p=2/6; n=5 over 120 orderings matches"};
  });

  criterion("logistic gradient", 5, [] {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    SparseMatrix x(50);
    std::vector<corpus::Label> y;
    for (int r = 0; r < 100; ++r) {
      textfeat::FeatureVector f;
      for (std::uint32_t c = 0; c < 50; ++c)
        if (std::bernoulli_distribution(0.3)(rng)) f.entries.emplace_back(c, nd(rng));
      x.add_row(f);
      y.push_back(std::bernoulli_distribution(0.4)(rng) ? corpus::Label::Flood : corpus::Label::NotFlood);
    }
    double worst = 0;
    for (int point = 0; point < 10; ++point) {
      std::vector<double> w(50);
      for (auto &v : w) v = nd(rng) * 0.5;
      const double b = nd(rng) * 0.5, lambda = 1e-3, h = 1e-6;
      const auto obj = classify::logistic_objective(x, y, w, b, lambda);
      double diff2 = 0, norm2 = 0;
      for (std::size_t j = 0; j <= w.size(); ++j) {
        auto wp = w, wm = w;
        double bp = b, bm = b;
        if (j < w.size()) wp[j] += h, wm[j] -= h;
        else bp += h, bm -= h;
        const double fd = (classify::logistic_loss(x, y, wp, bp, lambda) -
                           classify::logistic_loss(x, y, wm, bm, lambda)) / (2 * h);
        const double an = j < w.size() ? obj.grad_w[j] : obj.grad_b;
        diff2 += (fd - an) * (fd - an);
        norm2 += an * an;
      }
      worst = std::max(worst, std::sqrt(diff2 / norm2));
    }
    return Outcome{worst < 1e-5, "10 points, max relative error " + num(worst, 3)};
  });

  const fs::path bundle = scratch / "bundle";
  synth::write_bundle(synth::generate(synth::SynthConfig{}, gaz), bundle, gaz);

  criterion("classifier ordering", 120, [&] {
    pipeline::PipelineConfig pc;
    pc.bundle = bundle;
    pc.out_dir = scratch / "eval";
    std::ostringstream log;
    pipeline::ingest(pc, {log, log});
    pipeline::train(pc, {log, log});
    pipeline::eval(pc, {log, log});
    const auto t = csv::Table::read(pc.out_dir / pipeline::kEvalFile);
    std::map<std::string, std::pair<double, double>> m;  // method -> (accuracy, f1)
    for (const auto &r : t.records())
      m[r.fields[t.index("method")]] = {std::stod(r.fields[t.index("accuracy")]),
                                        std::stod(r.fields[t.index("f1")])};
    const double kw = m.at("keywords").second, lr = m.at("logistic").second, emb = m.at("embedding").second;
    const double acc = m.at("logistic").first;
    const bool ok = lr - kw >= 0.05 && emb - kw >= 0.05 && acc >= 0.90;
    return Outcome{ok, "F1 keywords " + num(kw, 3) + ", logistic " + num(lr, 3) + ", embedding " +
                           num(emb, 3) + "; logistic accuracy " + num(acc, 3)};
  });

  criterion("keyword rule fidelity", 1, [] {
    const classify::KeywordRule rule;
    auto label = [&](const std::string &text) {
      corpus::Article a;
      a.body = text;
      return classify::keyword_predict(a, rule);
    };
    const bool ok =
        label("The season of flood, cyclone and dengue is upcoming") == corpus::Label::Flood &&
        label("... many other parts of the capital went under the knee-to-waist-deep water, causing immense sufferings to the city dwellers") == corpus::Label::NotFlood &&
        label("Water has seeped into households...") == corpus::Label::NotFlood;
    return Outcome{ok, "Flood / NotFlood / NotFlood"};
  });

  const fs::path run1 = scratch / "run1";
  criterion("end-to-end recovery", 300, [&] {
    run_chain(bundle, run1);
    const auto rows = stats::load_table(run1 / pipeline::kCorrelationsFile);
    const auto planted = series::load_series(bundle / "planted_intensity.csv");
    std::map<std::string, double> peak;
    for (const auto &s : planted) {
      const auto v = s.values();
      peak[s.region_id] = v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
    }
    bool ok = true, country_seen = false;
    std::size_t divisions = 0;
    double worst_div = 1.0, country_rho = 0, country_p = 1;
    for (const auto &r : rows) {
      if (r.source != "news/satellite") continue;
      if (r.result.method != stats::Method::SpearmanTApprox &&
          r.result.method != stats::Method::SpearmanPermutation)
        continue;
      const auto *reg = gaz.find(r.region_id);
      if (reg->level == geo::Level::Country) {
        country_seen = true;
        country_rho = r.result.coefficient;
        country_p = r.result.p_value;
        ok &= country_rho >= 0.9 && country_p < 0.01;
      } else if (reg->level == geo::Level::Division && peak[r.region_id] > 0) {
        ++divisions;
        worst_div = std::min(worst_div, r.result.coefficient);
        ok &= r.result.coefficient >= 0.7;
      }
    }
    ok &= country_seen && divisions == 8;
    return Outcome{ok, "country rho " + num(country_rho, 3) + " (p " + num(country_p, 2) + "), min division rho " +
                           num(worst_div, 3) + " over " + std::to_string(divisions)};
  });

  const fs::path run2 = scratch / "run2";
  criterion("conservation", 60, [&] {
    run_chain(bundle, run2);
    auto a = conservation(run1);
    if (!a.pass) return a;
    auto b = conservation(run2);
    if (!b.pass) return b;
    // A second bundle with another seed and district series.
    synth::SynthConfig other;
    other.seed = 11;
    synth::write_bundle(synth::generate(other, gaz), scratch / "bundle11", gaz);
    pipeline::PipelineConfig pc;
    pc.bundle = scratch / "bundle11";
    pc.out_dir = scratch / "run11";
    pc.districts = true;
    std::ostringstream log;
    pipeline::run_all(pc, {log, log});
    auto c = conservation(pc.out_dir);
    return Outcome{c.pass, "3 runs; " + c.detail};
  });

  criterion("determinism", 60, [&] {
    std::size_t files = 0;
    for (const auto &e : fs::recursive_directory_iterator(run1)) {
      if (!e.is_regular_file() || e.path().extension() != ".csv") continue;
      const auto rel = fs::relative(e.path(), run1);
      if (!fs::exists(run2 / rel)) return Outcome{false, rel.string() + " missing in second run"};
      if (read_file(e.path()) != read_file(run2 / rel)) return Outcome{false, rel.string() + " differs"};
      ++files;
    }
    return Outcome{files >= 10, std::to_string(files) + " CSV artifacts byte-identical"};
  });

  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}

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

#include "floodlens/synth.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

#include "floodlens/classify.h"
#include "floodlens/csv.h"
#include "floodlens/error.h"
#include "floodlens/io.h"
#include "floodlens/stats.h"

namespace floodlens::synth {
namespace {

using corpus::Article;
using corpus::Label;
using Rng = std::mt19937_64;

const std::vector<std::string> kFloodTitles = {
    "Life disrupted as water rises in {place}",
    "Thousands marooned in {place}",
    "Villages under water in {place}",
    "Rivers swell above danger level in {place}",
    "Knee-deep water on the streets of {place}",
};

const std::vector<std::string> kFloodTitlesNoPlace = {
    "Thousands stranded as rivers swell",
    "Low-lying areas go under water",
    "Relief sought for marooned families",
    "Crops submerged as rivers keep rising",
};

const std::vector<std::string> kKeywordTitles = {
    "Flood situation worsens in {place}",
    "Flood victims in {place} await relief",
    "Vast areas of {place} inundated",
    "Cyclone leaves trail of destruction in {place}",
};

const std::vector<std::string> kFiller = {
    "The report was published on {weekday}.",
    "More details are expected in the coming days.",
    "Local residents expressed concern about the situation.",
    "Officials said a committee has been formed to look into the matter.",
    "The local administration is monitoring the situation closely.",
    "Several non-government organisations have also come forward.",
    "The matter was discussed at a meeting held on {weekday}.",
    "Correspondents from the area contributed to this report.",
};

const std::vector<std::string> kSecondary = {
    "A team from {other} is expected to visit the area on {weekday}.",
    "Volunteers from {other} have also joined the effort.",
};

struct Topic {
  std::string title;
  std::vector<std::string> sentences;
};

const std::vector<Topic> kTopics = {
    {"Rally held in {place} ahead of polls",
     {"The ruling party held a rally in {place} ahead of the municipal polls.",
      "Opposition leaders in {place} demanded a neutral election-time government.",
      "Police in {place} stepped up security around polling centres."}},
    {"Exports rise from {place}",
     {"Garment exports from factories in {place} rose by {n} percent this quarter.",
      "Traders in {place} reported brisk sales ahead of the festival.",
      "A new economic zone in {place} is expected to create {n} hundred jobs."}},
    {"{place} win divisional cricket league",
     {"{place} beat their rivals by {n} runs in the divisional cricket league.",
      "The football tournament in {place} drew large crowds on {weekday}.",
      "Young athletes from {place} will represent the country abroad."}},
    {"Dengue cases rise in {place}",
     {"Dengue cases in {place} rose to {n} this week, health officials said.",
      "A new hospital wing opened in {place} on {weekday}.",
      "Doctors in {place} urged residents to get vaccinated."}},
    {"Exam results published in {place}",
     {"The pass rate in {place} rose to {n} percent in this year's exams.",
      "Teachers in {place} demanded higher salaries.",
      "A new university campus is planned for {place}."}},
    {"New bridge to link {place}",
     {"A new bridge connecting {place} with the capital will open next month.",
      "Road accidents in {place} killed {n} people this month.",
      "Train services to {place} were disrupted by a technical fault."}},
    {"Bumper harvest expected in {place}",
     {"Farmers in {place} expect a bumper harvest of potatoes this year.",
      "Prices of fertiliser in {place} went up by {n} percent.",
      "Extension officers in {place} advised farmers on seed selection."}},
    {"Water crisis in {place}",
     {"Residents in {place} complained about irregular supply of drinking water.",
      "Rain brought relief from the heat in {place} on {weekday}.",
      "The water development board in {place} began dredging a canal."}},
    {"Court verdict in {place} murder case",
     {"A court in {place} sentenced {n} people to life imprisonment.",
      "Lawyers in {place} boycotted the court on {weekday}.",
      "Police in {place} arrested a suspect in the case."}},
};

const char *const kWeekdays[] = {"Sunday",   "Monday", "Tuesday", "Wednesday",
                                 "Thursday", "Friday", "Saturday"};

template <class T>
const T &pick(const std::vector<T> &items, Rng &rng) {
  std::uniform_int_distribution<std::size_t> d(0, items.size() - 1);
  return items[d(rng)];
}

bool coin(double p, Rng &rng) { return std::bernoulli_distribution(p)(rng); }

void replace_all(std::string &s, std::string_view from, std::string_view to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos;
       pos = s.find(from, pos + to.size()))
    s.replace(pos, from.size(), to);
}

struct Fill {
  std::string place;
  std::string other;
  std::string weekday;
};

std::string fill(std::string text, const Fill &f, Rng &rng) {
  replace_all(text, "{place}", f.place);
  replace_all(text, "{other}", f.other);
  replace_all(text, "{weekday}", f.weekday);
  if (text.find("{n}") != std::string::npos) {
    std::uniform_int_distribution<int> d(2, 95);
    replace_all(text, "{n}", std::to_string(d(rng)));
  }
  return text;
}

std::string join(const std::vector<std::string> &sentences) {
  std::string out;
  for (const auto &s : sentences) {
    if (!out.empty()) out += ' ';
    out += s;
  }
  return out;
}

double intensity_at(const std::vector<Bump> &bumps, double floor, int t) {
  double v = floor;
  for (const Bump &b : bumps) {
    const double z = (t - b.center) / b.width;
    v += b.peak * std::exp(-0.5 * z * z);
  }
  return v;
}

// Non-flood counts for a fixed total: a multinomial with equal cell
// probabilities, drawn as a chain of binomials.
std::vector<long> spread_evenly(long n, std::size_t cells, Rng &rng) {
  std::vector<long> out(cells, 0);
  for (std::size_t i = 0; i < cells && n > 0; ++i) {
    if (i + 1 == cells) {
      out[i] = n;
      break;
    }
    std::binomial_distribution<long> d(n, 1.0 / double(cells - i));
    out[i] = d(rng);
    n -= out[i];
  }
  return out;
}

struct Draft {
  Article article;
  GroundTruth truth;
};

}  // namespace

std::map<std::string, std::vector<Bump>> SynthConfig::default_bumps() {
  // Centers count weeks from 2017-W09. Every division shares a broad
  // monsoon background; on top sit an April flash flood in the north-east,
  // the main July-August wave and a late cyclone on the coast.
  const Bump monsoon{24, 8, 2.5};
  return {
      {"bd-barisal", {monsoon, {18, 4, 6}, {34, 3, 8}}},
      {"bd-chittagong", {monsoon, {12, 3, 10}, {26, 4, 12}}},
      {"bd-dhaka", {monsoon, {24, 5, 14}}},
      {"bd-khulna", {monsoon, {30, 4, 9}}},
      {"bd-mymensingh", {monsoon, {23, 5, 12}}},
      {"bd-rajshahi", {monsoon, {25, 4, 8}}},
      {"bd-rangpur", {monsoon, {21, 4, 16}}},
      {"bd-sylhet", {monsoon, {8, 3, 14}, {22, 5, 20}}},
  };
}

void SynthConfig::validate() const {
  auto prob = [](double p, const char *name) {
    if (!(p >= 0.0 && p <= 1.0))
      throw UsageError(std::string(name) + " must lie in [0, 1]");
  };
  prob(keyword_prob, "keyword_prob");
  prob(distractor_prob, "distractor_prob");
  prob(district_prob, "district_prob");
  prob(district_coverage, "district_coverage");
  prob(secondary_mention_prob, "secondary_mention_prob");
  prob(context_leak_prob, "context_leak_prob");
  prob(topic_mix_prob, "topic_mix_prob");
  if (weeks.last < weeks.first) throw UsageError("week range is empty");
  for (const auto &[id, list] : bumps)
    for (const Bump &b : list) {
      if (!(b.peak >= 0.0)) throw UsageError("bump peak must be >= 0 (" + id + ")");
      if (!(b.width > 0.0)) throw UsageError("bump width must be > 0 (" + id + ")");
      if (!std::isfinite(b.center)) throw UsageError("bump center must be finite");
    }
  if (!(intensity_floor >= 0.0)) throw UsageError("intensity_floor must be >= 0");
  if (!(base_rate >= 0.0)) throw UsageError("base_rate must be >= 0");
  if (!(area_scale >= 0.0) || !(noise_scale >= 0.0))
    throw UsageError("area_scale and noise_scale must be >= 0");
  if (embedding_dim == 0) throw UsageError("embedding_dim must be > 0");
  if (!(embedding_separation >= 0.0))
    throw UsageError("embedding_separation must be >= 0");
  if (!(people_per_intensity_week >= 0.0))
    throw UsageError("people_per_intensity_week must be >= 0");
}

std::string SynthConfig::describe() const {
  std::ostringstream out;
  out << "seed=" << seed << '\n'
      << "weeks=" << weeks.str() << '\n'
      << "total_articles="
      << (total_articles ? std::to_string(*total_articles) : std::string("none")) << '\n'
      << "base_rate=" << format_double(base_rate) << '\n'
      << "intensity_floor=" << format_double(intensity_floor) << '\n'
      << "annotated_flood=" << annotated_flood << '\n'
      << "annotated_not_flood=" << annotated_not_flood << '\n'
      << "keyword_prob=" << format_double(keyword_prob) << '\n'
      << "distractor_prob=" << format_double(distractor_prob) << '\n'
      << "district_prob=" << format_double(district_prob) << '\n'
      << "district_coverage=" << format_double(district_coverage) << '\n'
      << "secondary_mention_prob=" << format_double(secondary_mention_prob) << '\n'
      << "context_leak_prob=" << format_double(context_leak_prob) << '\n'
      << "topic_mix_prob=" << format_double(topic_mix_prob) << '\n'
      << "area_scale=" << format_double(area_scale) << '\n'
      << "noise_scale=" << format_double(noise_scale) << '\n'
      << "embedding_dim=" << embedding_dim << '\n'
      << "embedding_separation=" << format_double(embedding_separation) << '\n'
      << "emdat_events=" << emdat_events << '\n'
      << "people_per_intensity_week=" << format_double(people_per_intensity_week) << '\n';
  for (const auto &[id, list] : bumps)
    for (const Bump &b : list)
      out << "bump=" << id << ':' << format_double(b.center) << ':'
          << format_double(b.width) << ':' << format_double(b.peak) << '\n';
  return out.str();
}

const std::vector<std::string> &contextual_templates() {
  static const std::vector<std::string> k = {
      "Low-lying neighbourhoods of {place} lay in chest-high water after days of heavy rain.",
      "Streets in {place} stayed under waist-deep water for a third day.",
      "Residents of {place} said the water was rising inside their houses.",
      "Thousands of families in {place} remain marooned as rivers swell.",
      "Vast tracts of cropland in {place} have been submerged by the swollen river.",
      "An embankment breach left several villages of {place} under water.",
      "Rainwater entered shops and kitchens across {place}.",
      "Schools in {place} were turned into shelters for people displaced by rising water.",
      "Boats are the only means of transport in the waterlogged villages of {place}.",
      "The river has been flowing above the danger level at several points in {place}.",
      "Relief workers are distributing dry food among stranded families in {place}.",
      "Aman seedlings on thousands of hectares in {place} are under water.",
      "Onrushing water from upstream hills swept away roads in {place}.",
      "Tube wells in {place} went under water, causing a shortage of safe drinking water.",
      "Cattle owners in {place} moved their animals to higher ground as the water rose.",
      "Waterlogging disrupted normal life in {place} after torrential rain.",
      "Many people in {place} took shelter on embankments and highways.",
      "Water levels of major rivers in {place} continued to rise on {weekday}.",
      "Hundreds of fish farms in {place} were washed away by the surging water.",
      "Erosion by the swollen river devoured homesteads in {place}.",
  };
  return k;
}

const std::vector<std::string> &keyword_templates() {
  static const std::vector<std::string> k = {
      "The flood situation in {place} deteriorated further on {weekday}.",
      "Flood-hit people in {place} are in dire need of food and clean water.",
      "Large areas of {place} were inundated after the river burst its banks.",
      "Cyclone-affected families in {place} are yet to receive relief.",
      "At least {n} people have died in floods in {place} so far.",
  };
  return k;
}

const std::vector<std::string> &distractor_templates() {
  static const std::vector<std::string> k = {
      "Experts at a seminar in {place} warned about the coming flood and cyclone season.",
      "A new flood management project for {place} was approved by the planning commission.",
      "Officials in {place} discussed cyclone preparedness at a workshop on {weekday}.",
      "Researchers presented a model to forecast inundation risk in {place} in the coming decades.",
      "The government plans to build {n} new cyclone shelters in areas including {place}.",
      "A flood insurance scheme for farmers in {place} is under consideration.",
      "Students in {place} joined a drill on flood response.",
  };
  return k;
}

Bundle generate(const SynthConfig &config, const geo::Gazetteer &gazetteer) {
  config.validate();
  for (const auto &[id, list] : config.bumps) {
    const geo::Region *r = gazetteer.find(id);
    if (!r || r->level != geo::Level::Division)
      throw UsageError("bump region '" + id + "' is not a division");
  }

  Rng rng(config.seed);
  const std::vector<IsoWeek> weeks = config.weeks.weeks();
  const std::vector<const geo::Region *> divisions = gazetteer.divisions();
  static const std::vector<Bump> kNoBumps;

  Bundle bundle;
  bundle.config = config;

  // Planted intensity and flood counts, week-major.
  std::vector<std::vector<double>> intensity(divisions.size(),
                                             std::vector<double>(weeks.size()));
  std::vector<std::vector<long>> flood_counts(divisions.size(),
                                              std::vector<long>(weeks.size()));
  long flood_total = 0;
  for (std::size_t t = 0; t < weeks.size(); ++t) {
    for (std::size_t d = 0; d < divisions.size(); ++d) {
      auto it = config.bumps.find(divisions[d]->id);
      const auto &bumps = it == config.bumps.end() ? kNoBumps : it->second;
      const double lambda = intensity_at(bumps, config.intensity_floor, int(t));
      intensity[d][t] = lambda;
      long k = 0;
      if (lambda > 0.0) k = std::poisson_distribution<long>(lambda)(rng);
      flood_counts[d][t] = k;
      flood_total += k;
    }
  }

  std::vector<long> other_counts(weeks.size(), 0);
  if (config.total_articles) {
    const long n = long(*config.total_articles) - flood_total;
    if (n < 0)
      throw UsageError("total_articles (" + std::to_string(*config.total_articles) +
                       ") is smaller than the planted flood count (" +
                       std::to_string(flood_total) + ")");
    other_counts = spread_evenly(n, weeks.size(), rng);
  } else if (config.base_rate > 0.0) {
    std::poisson_distribution<long> d(config.base_rate);
    for (auto &c : other_counts) c = d(rng);
  }

  // Districts eligible for flood reports, per division.
  std::vector<std::vector<const geo::Region *>> prone(divisions.size());
  for (std::size_t d = 0; d < divisions.size(); ++d) {
    auto districts = gazetteer.districts_of(divisions[d]->id);
    std::shuffle(districts.begin(), districts.end(), rng);
    const auto keep = std::size_t(
        std::ceil(config.district_coverage * double(districts.size()) - 1e-9));
    districts.resize(std::min(keep, districts.size()));
    prone[d] = std::move(districts);
  }

  const auto &sources = corpus::default_sources();
  const classify::KeywordRule rule;
  std::vector<Draft> drafts;

  auto day_in = [&](const IsoWeek &w) {
    std::uniform_int_distribution<int> d(0, 6);
    return std::chrono::sys_days(w.monday() + std::chrono::days(d(rng)));
  };
  auto weekday_of = [](std::chrono::sys_days day) {
    return std::string(kWeekdays[std::chrono::weekday(day).c_encoding()]);
  };

  for (std::size_t t = 0; t < weeks.size(); ++t) {
    for (std::size_t d = 0; d < divisions.size(); ++d) {
      for (long k = 0; k < flood_counts[d][t]; ++k) {
        const geo::Region *place = divisions[d];
        if (!prone[d].empty() && coin(config.district_prob, rng)) place = pick(prone[d], rng);
        const auto day = day_in(weeks[t]);
        Fill f{pick(place->aliases, rng), "", weekday_of(day)};
        const bool keyword = coin(config.keyword_prob, rng);

        std::string title;
        bool keyword_in_title = false;
        if (keyword && coin(0.5, rng)) {
          title = fill(pick(kKeywordTitles, rng), f, rng);
          keyword_in_title = true;
        } else if (coin(0.6, rng)) {
          title = fill(pick(kFloodTitles, rng), f, rng);
        } else {
          title = fill(pick(kFloodTitlesNoPlace, rng), f, rng);
        }

        std::vector<std::string> body;
        const auto &ctx = contextual_templates();
        std::uniform_int_distribution<std::size_t> ci(0, ctx.size() - 1);
        const std::size_t a = ci(rng);
        std::size_t b = ci(rng);
        while (b == a) b = ci(rng);
        body.push_back(fill(ctx[a], f, rng));
        body.push_back(fill(ctx[b], f, rng));
        if (coin(0.5, rng)) body.pop_back();
        if (coin(config.topic_mix_prob, rng)) body.push_back(fill(pick(pick(kTopics, rng).sentences, rng), f, rng));
        if (keyword && !keyword_in_title) body.push_back(fill(pick(keyword_templates(), rng), f, rng));
        const int fillers = std::uniform_int_distribution<int>(1, 3)(rng);
        for (int i = 0; i < fillers; ++i) body.push_back(fill(pick(kFiller, rng), f, rng));
        if (divisions.size() > 1 && coin(config.secondary_mention_prob, rng)) {
          const geo::Region *other = place;
          while (gazetteer.within(place->id, other->id)) other = pick(divisions, rng);
          f.other = pick(other->aliases, rng);
          body.push_back(fill(pick(kSecondary, rng), f, rng));
        }
        std::shuffle(body.begin(), body.end(), rng);

        Draft draft;
        draft.article.source = pick(sources, rng);
        draft.article.title = std::move(title);
        draft.article.body = join(body);
        draft.article.published = Date(day);
        draft.truth.label = Label::Flood;
        draft.truth.region_id = place->id;
        draft.truth.week = weeks[t];
        drafts.push_back(std::move(draft));
      }
    }
    for (long k = 0; k < other_counts[t]; ++k) {
      const geo::Region *place = pick(divisions, rng);
      const auto day = day_in(weeks[t]);
      Fill f{pick(place->aliases, rng), "", weekday_of(day)};
      const Topic &topic = pick(kTopics, rng);
      std::vector<std::string> body;
      std::vector<std::size_t> order = {0, 1, 2};
      std::shuffle(order.begin(), order.end(), rng);
      body.push_back(fill(topic.sentences[order[0]], f, rng));
      body.push_back(fill(topic.sentences[order[1]], f, rng));
      const int fillers = std::uniform_int_distribution<int>(1, 3)(rng);
      for (int i = 0; i < fillers; ++i) body.push_back(fill(pick(kFiller, rng), f, rng));
      if (coin(config.context_leak_prob, rng))
        body.push_back(fill(pick(contextual_templates(), rng), f, rng));
      if (coin(config.distractor_prob, rng))
        body.push_back(fill(pick(distractor_templates(), rng), f, rng));
      std::shuffle(body.begin(), body.end(), rng);

      Draft draft;
      draft.article.source = pick(sources, rng);
      draft.article.title = fill(topic.title, f, rng);
      draft.article.body = join(body);
      draft.article.published = Date(day);
      draft.truth.label = Label::NotFlood;
      draft.truth.region_id = place->id;
      draft.truth.week = weeks[t];
      drafts.push_back(std::move(draft));
    }
  }

  // Interleave classes and regions, then order by publication date.
  std::shuffle(drafts.begin(), drafts.end(), rng);
  std::stable_sort(drafts.begin(), drafts.end(), [](const Draft &x, const Draft &y) {
    return std::chrono::sys_days(x.article.published) <
           std::chrono::sys_days(y.article.published);
  });
  const int width = drafts.size() < 1000000 ? 6 : 9;
  for (std::size_t i = 0; i < drafts.size(); ++i) {
    std::string num = std::to_string(i + 1);
    num.insert(0, std::size_t(std::max(0, width - int(num.size()))), '0');
    drafts[i].article.id = "syn-" + num;
    drafts[i].truth.article_id = drafts[i].article.id;
    drafts[i].truth.has_keyword =
        classify::keyword_predict(drafts[i].article, rule) == Label::Flood;
  }

  // Annotated subset.
  std::vector<std::size_t> flood_idx, other_idx;
  for (std::size_t i = 0; i < drafts.size(); ++i)
    (drafts[i].truth.label == Label::Flood ? flood_idx : other_idx).push_back(i);
  std::shuffle(flood_idx.begin(), flood_idx.end(), rng);
  std::shuffle(other_idx.begin(), other_idx.end(), rng);
  flood_idx.resize(std::min(flood_idx.size(), config.annotated_flood));
  other_idx.resize(std::min(other_idx.size(), config.annotated_not_flood));
  for (auto i : flood_idx) drafts[i].truth.annotated = true;
  for (auto i : other_idx) drafts[i].truth.annotated = true;

  // Class-conditional Gaussian embeddings around +-separation/2 along a
  // random unit direction.
  const std::uint32_t dim = config.embedding_dim;
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> direction(dim);
  double norm = 0.0;
  while (norm == 0.0) {
    norm = 0.0;
    for (auto &v : direction) {
      v = gauss(rng);
      norm += v * v;
    }
    norm = std::sqrt(norm);
  }
  for (auto &v : direction) v /= norm;
  std::vector<std::string> ids;
  std::vector<float> data;
  ids.reserve(drafts.size());
  data.reserve(drafts.size() * dim);
  for (const Draft &dr : drafts) {
    const double sign = dr.truth.label == Label::Flood ? 0.5 : -0.5;
    ids.push_back(dr.article.id);
    for (std::uint32_t j = 0; j < dim; ++j)
      data.push_back(float(sign * config.embedding_separation * direction[j] + gauss(rng)));
  }
  bundle.embeddings = embedding::EmbeddingTable(dim, std::move(ids), std::move(data));

  for (auto &dr : drafts) {
    if (dr.truth.annotated)
      bundle.annotations.push_back({dr.article.id, dr.truth.label});
    bundle.truth.push_back(dr.truth);
    bundle.articles.push_back(std::move(dr.article));
  }

  // Satellite inundation per division-week.
  std::normal_distribution<double> noise(0.0, config.noise_scale * config.area_scale);
  for (std::size_t d = 0; d < divisions.size(); ++d)
    for (std::size_t t = 0; t < weeks.size(); ++t) {
      double area = intensity[d][t] * config.area_scale;
      if (config.noise_scale > 0.0) area += noise(rng);
      bundle.satellite.push_back(
          {divisions[d]->id, Date(weeks[t].monday()), std::max(0.0, area)});
    }

  // Planted intensity series.
  series::RegionSeries country{gazetteer.country().id, series::Unit::Intensity, {}};
  for (std::size_t d = 0; d < divisions.size(); ++d) {
    series::RegionSeries s{divisions[d]->id, series::Unit::Intensity, {}};
    for (std::size_t t = 0; t < weeks.size(); ++t) {
      s.points[weeks[t]] = intensity[d][t];
      country.points[weeks[t]] += intensity[d][t];
    }
    bundle.intensity.push_back(std::move(s));
  }
  bundle.intensity.push_back(std::move(country));

  // Disaster-database events.
  struct Candidate {
    double mass;
    Bump bump;
  };
  std::vector<Candidate> candidates;
  for (const auto *div : divisions) {
    auto it = config.bumps.find(div->id);
    if (it == config.bumps.end()) continue;
    for (const Bump &b : it->second)
      if (b.peak > 0.0) candidates.push_back({b.peak * b.width, b});
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate &x, const Candidate &y) { return x.mass > y.mass; });
  const int last = int(weeks.size()) - 1;
  std::vector<std::pair<int, int>> taken;
  for (const Candidate &cand : candidates) {
    if (taken.size() >= config.emdat_events) break;
    const Bump &b = cand.bump;
    const int lo = std::clamp(int(std::lround(b.center - 0.5 * b.width)), 0, last);
    const int hi = std::clamp(int(std::lround(b.center + 0.5 * b.width)), lo, last);
    const bool overlaps = std::any_of(taken.begin(), taken.end(), [&](const auto &w) {
      return lo <= w.second && w.first <= hi;
    });
    if (overlaps) continue;
    taken.emplace_back(lo, hi);
    double mass = 0.0;
    for (int t = lo; t <= hi; ++t)
      for (std::size_t d = 0; d < divisions.size(); ++d) mass += intensity[d][std::size_t(t)];
    const double jitter = std::max(0.0, 1.0 + 0.1 * gauss(rng));
    refdata::EmdatEvent e;
    e.start = Date(weeks[std::size_t(lo)].monday());
    e.end = Date(weeks[std::size_t(hi)].monday() + std::chrono::days(6));
    e.people_affected = std::round(mass * config.people_per_intensity_week * jitter);
    bundle.emdat.push_back(e);
  }
  std::stable_sort(bundle.emdat.begin(), bundle.emdat.end(),
                   [](const refdata::EmdatEvent &x, const refdata::EmdatEvent &y) {
                     return std::chrono::sys_days(x.start) < std::chrono::sys_days(y.start);
                   });
  return bundle;
}

void write_bundle(const Bundle &bundle, const std::filesystem::path &dir,
                  const geo::Gazetteer &gazetteer) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError(dir.string(), "cannot create directory: " + ec.message());

  corpus::write_corpus(bundle.articles, dir / "corpus.jsonl");
  corpus::write_annotations(bundle.annotations, dir / "annotations.csv");
  embedding::write(bundle.embeddings, dir / "embeddings.flemb");
  write_file_atomic(dir / "embeddings.json",
                    "{\"model\": \"synthetic-gaussian\", \"dim\": " +
                        std::to_string(bundle.embeddings.dim()) + ", \"n\": " +
                        std::to_string(bundle.embeddings.size()) + "}\n");
  refdata::write_satellite(bundle.satellite, dir / "satellite.csv", gazetteer);
  refdata::write_emdat(bundle.emdat, dir / "emdat.csv");

  csv::Writer truth({"article_id", "label", "region_id", "iso_week", "annotated",
                     "has_keyword"});
  for (const GroundTruth &g : bundle.truth)
    truth.row({g.article_id, std::string(corpus::label_name(g.label)), g.region_id,
               g.week.str(), g.annotated ? "1" : "0", g.has_keyword ? "1" : "0"});
  write_file_atomic(dir / "ground_truth.csv", truth.str());

  series::write_series(bundle.intensity, dir / "planted_intensity.csv");
  write_file_atomic(dir / "synth_config.txt", bundle.config.describe());
}

std::vector<GroundTruth> load_ground_truth(const std::filesystem::path &path) {
  const csv::Table table = csv::Table::read(path);
  const std::size_t c_id = table.index("article_id"), c_label = table.index("label"),
                    c_region = table.index("region_id"), c_week = table.index("iso_week"),
                    c_ann = table.index("annotated"), c_kw = table.index("has_keyword");
  std::vector<GroundTruth> out;
  for (const auto &rec : table.records()) {
    GroundTruth g;
    g.article_id = rec.fields[c_id];
    auto label = corpus::parse_label(rec.fields[c_label]);
    if (!label) throw DataError(table.where(rec), "bad label '" + rec.fields[c_label] + "'");
    g.label = *label;
    g.region_id = rec.fields[c_region];
    auto week = IsoWeek::parse(rec.fields[c_week]);
    if (!week) throw DataError(table.where(rec), "bad iso_week '" + rec.fields[c_week] + "'");
    g.week = *week;
    g.annotated = rec.fields[c_ann] == "1";
    g.has_keyword = rec.fields[c_kw] == "1";
    out.push_back(std::move(g));
  }
  return out;
}

std::string ScoreReport::str() const {
  std::ostringstream out;
  out << "accuracy=" << format_double(accuracy) << '\n'
      << "precision=" << format_double(precision) << '\n'
      << "recall=" << format_double(recall) << '\n'
      << "f1=" << format_double(f1) << '\n'
      << "region_recovery=" << format_double(region_recovery) << '\n'
      << "week_recovery=" << format_double(week_recovery) << '\n'
      << "planted_district_fraction=" << format_double(planted_district_fraction) << '\n'
      << "detected_district_fraction=" << format_double(detected_district_fraction) << '\n';
  auto opt = [](const std::optional<double> &v) {
    return v ? format_double(*v) : std::string("na");
  };
  for (const RegionScore &r : regions)
    out << "region=" << r.region_id << " planted_peak=" << format_double(r.planted_peak)
        << " news_rho=" << opt(r.news_rho) << " news_p=" << opt(r.news_p)
        << " planted_rho=" << opt(r.planted_rho) << '\n';
  return out.str();
}

ScoreReport score_pipeline(const std::filesystem::path &bundle_dir,
                           const std::filesystem::path &work_dir,
                           const geo::Gazetteer &gazetteer) {
  for (const char *name : {"predictions.csv", "events.csv", "news_series.csv"})
    if (!std::filesystem::exists(work_dir / name))
      throw DataError((work_dir / name).string(), "missing pipeline output");

  const auto truth = load_ground_truth(bundle_dir / "ground_truth.csv");
  std::unordered_map<std::string, const GroundTruth *> by_id;
  for (const auto &g : truth) by_id.emplace(g.article_id, &g);

  ScoreReport report;

  // Classifier metrics against every planted label.
  const csv::Table preds = csv::Table::read(work_dir / "predictions.csv");
  const std::size_t p_id = preds.index("article_id"), p_label = preds.index("prediction");
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  for (const auto &rec : preds.records()) {
    auto it = by_id.find(rec.fields[p_id]);
    if (it == by_id.end())
      throw DataError(preds.where(rec), "article '" + rec.fields[p_id] + "' not in ground truth");
    auto label = corpus::parse_label(rec.fields[p_label]);
    if (!label) throw DataError(preds.where(rec), "bad prediction '" + rec.fields[p_label] + "'");
    const bool pred = *label == Label::Flood, gold = it->second->label == Label::Flood;
    tp += pred && gold;
    fp += pred && !gold;
    fn += !pred && gold;
    tn += !pred && !gold;
  }
  const auto m = classify::metrics_from_counts(tp, fp, fn, tn);
  report.accuracy = m.accuracy;
  report.precision = m.precision;
  report.recall = m.recall;
  report.f1 = m.f1;

  // Location and week recovery on true flood articles kept by the classifier.
  const auto events = geo::load_events(work_dir / "events.csv", gazetteer);
  std::size_t considered = 0, region_ok = 0, week_ok = 0;
  std::set<std::string> detected;
  for (const auto &e : events) {
    auto it = by_id.find(e.article_id);
    if (it == by_id.end())
      throw DataError((work_dir / "events.csv").string(),
                      "article '" + e.article_id + "' not in ground truth");
    if (e.label != Label::Flood) continue;
    const geo::Region *r = gazetteer.find(e.region_id);
    if (r && r->level == geo::Level::District) detected.insert(e.region_id);
    if (it->second->label != Label::Flood) continue;
    ++considered;
    region_ok += e.region_id == it->second->region_id;
    week_ok += e.week == it->second->week;
  }
  if (considered > 0) {
    report.region_recovery = double(region_ok) / double(considered);
    report.week_recovery = double(week_ok) / double(considered);
  }
  std::set<std::string> planted;
  for (const auto &g : truth) {
    if (g.label != Label::Flood) continue;
    const geo::Region *r = gazetteer.find(g.region_id);
    if (r && r->level == geo::Level::District) planted.insert(g.region_id);
  }
  std::size_t n_districts = 0;
  for (const auto &r : gazetteer.regions()) n_districts += r.level == geo::Level::District;
  if (n_districts > 0) {
    report.planted_district_fraction = double(planted.size()) / double(n_districts);
    report.detected_district_fraction = double(detected.size()) / double(n_districts);
  }

  // Correlations against the satellite reference.
  const auto news = series::load_series(work_dir / "news_series.csv");
  const auto intensity = series::load_series(bundle_dir / "planted_intensity.csv");
  const auto satellite = refdata::load_satellite(bundle_dir / "satellite.csv", gazetteer);
  auto find = [](const std::vector<series::RegionSeries> &list, const std::string &id) {
    const series::RegionSeries *out = nullptr;
    for (const auto &s : list)
      if (s.region_id == id) out = &s;
    return out;
  };
  std::vector<std::string> order = {gazetteer.country().id};
  for (const auto *d : gazetteer.divisions()) order.push_back(d->id);
  for (const std::string &id : order) {
    const auto *sat = find(satellite, id);
    if (!sat) continue;
    RegionScore score;
    score.region_id = id;
    if (const auto *planted_s = find(intensity, id)) {
      for (const auto &[w, v] : planted_s->points) score.planted_peak = std::max(score.planted_peak, v);
      try {
        const auto pairs = refdata::align(*planted_s, *sat);
        score.planted_rho = stats::spearman(pairs.x, pairs.y).coefficient;
      } catch (const DataError &) {
      }
    }
    if (const auto *n = find(news, id)) {
      try {
        const auto pairs = refdata::align(*n, *sat);
        const auto r = stats::spearman(pairs.x, pairs.y);
        score.news_rho = r.coefficient;
        score.news_p = r.p_value;
      } catch (const DataError &) {
      }
    }
    report.regions.push_back(std::move(score));
  }
  return report;
}

}  // namespace floodlens::synth

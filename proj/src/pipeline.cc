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

#include "floodlens/pipeline.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>

#include "floodlens/csv.h"
#include "floodlens/embedding.h"
#include "floodlens/error.h"
#include "floodlens/geodate.h"
#include "floodlens/io.h"
#include "floodlens/refdata.h"
#include "floodlens/series.h"
#include "floodlens/sparse.h"
#include "floodlens/svg.h"

namespace floodlens::pipeline {
namespace {

using classify::Method;
using corpus::Label;

std::vector<std::string> split_list(const std::string &text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) {
    std::string t = trim(cur);
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

std::string join_list(const std::vector<std::string> &items, char sep) {
  std::string out;
  for (const auto &s : items) {
    if (!out.empty()) out += sep;
    out += s;
  }
  return out;
}

[[noreturn]] void bad_value(const std::string &key, const std::string &value,
                            const std::string &expected) {
  throw UsageError("bad value '" + value + "' for " + key + " (expected " + expected + ")");
}

double as_double(const std::string &key, const std::string &value) {
  double v = 0.0;
  if (!parse_double(value, v)) bad_value(key, value, "a number");
  return v;
}

long long as_int(const std::string &key, const std::string &value, long long lo) {
  long long v = 0;
  if (!parse_int64(value, v) || v < lo)
    bad_value(key, value, "an integer >= " + std::to_string(lo));
  return v;
}

bool as_bool(const std::string &key, const std::string &value) {
  const std::string v = to_lower_ascii(value);
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  bad_value(key, value, "true or false");
}

double as_prob(const std::string &key, const std::string &value) {
  const double v = as_double(key, value);
  if (v < 0.0 || v > 1.0) bad_value(key, value, "a value in [0, 1]");
  return v;
}

std::string pvalue_name(stats::PValueMode m) {
  switch (m) {
    case stats::PValueMode::Auto: return "auto";
    case stats::PValueMode::Exact: return "exact";
    case stats::PValueMode::TApprox: return "t";
  }
  return "auto";
}

std::string bumps_str(const std::map<std::string, std::vector<synth::Bump>> &bumps) {
  std::vector<std::string> parts;
  for (const auto &[id, list] : bumps)
    for (const auto &b : list)
      parts.push_back(id + ':' + format_double(b.center) + ':' + format_double(b.width) +
                      ':' + format_double(b.peak));
  return parts.empty() ? "none" : join_list(parts, ';');
}

struct Key {
  std::string name;
  std::string help;
  std::function<void(PipelineConfig &, const std::string &)> set;
  std::function<std::string(const PipelineConfig &)> get;
};

#define PATH_KEY(field, help)                                                      \
  Key{#field, help, [](PipelineConfig &c, const std::string &v) { c.field = v; }, \
      [](const PipelineConfig &c) { return c.field.string(); }}

const std::vector<Key> &keys() {
  static const std::vector<Key> k = {
      PATH_KEY(bundle, "synthetic bundle directory; fills unset input paths"),
      PATH_KEY(corpus, "JSONL article corpus"),
      PATH_KEY(annotations, "CSV article_id,label"),
      PATH_KEY(gazetteer, "gazetteer CSV (default: built-in Bangladesh)"),
      PATH_KEY(satellite, "CSV division,week_start_date,inundated_area_km2"),
      PATH_KEY(emdat, "CSV start_date,end_date,people_affected"),
      PATH_KEY(twitter, "series CSV region_id,iso_week,value,unit"),
      PATH_KEY(embeddings, "FLEMB1 document embedding file"),
      PATH_KEY(denominators, "CSV region_id,iso_week,total_articles"),
      PATH_KEY(split, "explicit split CSV article_id,partition"),
      Key{"out", "output directory for all stage artifacts",
          [](PipelineConfig &c, const std::string &v) { c.out_dir = v; },
          [](const PipelineConfig &c) { return c.out_dir.string(); }},
      Key{"sources", "comma-separated accepted outlets, or 'any'",
          [](PipelineConfig &c, const std::string &v) {
            if (to_lower_ascii(trim(v)) == "any")
              c.sources.clear();
            else
              c.sources = split_list(v, ',');
          },
          [](const PipelineConfig &c) {
            return c.sources.empty() ? std::string("any") : join_list(c.sources, ',');
          }},
      Key{"skip_invalid", "skip malformed corpus lines instead of failing",
          [](PipelineConfig &c, const std::string &v) { c.skip_invalid = as_bool("skip_invalid", v); },
          [](const PipelineConfig &c) { return std::string(c.skip_invalid ? "true" : "false"); }},
      Key{"seed", "global seed (split, SVM order, forest, synth)",
          [](PipelineConfig &c, const std::string &v) {
            const auto s = std::uint64_t(as_int("seed", v, 0));
            c.seed = s;
            c.svm.seed = s;
            c.logistic.seed = s;
            c.head.seed = s;
            c.forest.seed = s;
            c.synth.seed = s;
          },
          [](const PipelineConfig &c) { return std::to_string(c.seed); }},
      Key{"threads", "worker threads per stage",
          [](PipelineConfig &c, const std::string &v) {
            c.threads = unsigned(as_int("threads", v, 1));
            c.forest.threads = c.threads;
          },
          [](const PipelineConfig &c) { return std::to_string(c.threads); }},
      Key{"methods", "comma-separated classifiers to train/evaluate, or 'all'",
          [](PipelineConfig &c, const std::string &v) {
            c.methods.clear();
            if (to_lower_ascii(trim(v)) == "all") return;
            for (const auto &name : split_list(v, ',')) {
              auto m = classify::parse_method(name);
              if (!m) bad_value("methods", name, "keywords, logistic, svm, forest or embedding");
              if (std::find(c.methods.begin(), c.methods.end(), *m) == c.methods.end())
                c.methods.push_back(*m);
            }
          },
          [](const PipelineConfig &c) {
            if (c.methods.empty()) return std::string("all");
            std::vector<std::string> names;
            for (auto m : c.methods) names.push_back(classify::method_name(m));
            return join_list(names, ',');
          }},
      Key{"predictor", "classifier used by predict",
          [](PipelineConfig &c, const std::string &v) {
            auto m = classify::parse_method(v);
            if (!m) bad_value("predictor", v, "keywords, logistic, svm, forest or embedding");
            c.predictor = *m;
          },
          [](const PipelineConfig &c) { return classify::method_name(c.predictor); }},
      Key{"test_fraction", "share of annotated articles held out",
          [](PipelineConfig &c, const std::string &v) {
            c.test_fraction = as_prob("test_fraction", v);
          },
          [](const PipelineConfig &c) { return format_double(c.test_fraction); }},
      Key{"vocab.min_df", "minimum document frequency",
          [](PipelineConfig &c, const std::string &v) {
            c.vocab.min_df = std::size_t(as_int("vocab.min_df", v, 1));
          },
          [](const PipelineConfig &c) { return std::to_string(c.vocab.min_df); }},
      Key{"vocab.max_features", "vocabulary size cap",
          [](PipelineConfig &c, const std::string &v) {
            c.vocab.max_features = std::size_t(as_int("vocab.max_features", v, 1));
          },
          [](const PipelineConfig &c) { return std::to_string(c.vocab.max_features); }},
      Key{"vocab.ngrams", "n-gram range as min:max",
          [](PipelineConfig &c, const std::string &v) {
            const auto parts = split_list(v, ':');
            if (parts.size() != 2) bad_value("vocab.ngrams", v, "min:max");
            const int lo = int(as_int("vocab.ngrams", parts[0], 1));
            const int hi = int(as_int("vocab.ngrams", parts[1], 1));
            if (hi < lo) bad_value("vocab.ngrams", v, "min <= max");
            c.vocab.ngram_min = lo;
            c.vocab.ngram_max = hi;
          },
          [](const PipelineConfig &c) {
            return std::to_string(c.vocab.ngram_min) + ':' + std::to_string(c.vocab.ngram_max);
          }},
      Key{"vocab.lowercase", "lowercase tokens",
          [](PipelineConfig &c, const std::string &v) {
            c.vocab.lowercase = as_bool("vocab.lowercase", v);
          },
          [](const PipelineConfig &c) { return std::string(c.vocab.lowercase ? "true" : "false"); }},
      Key{"keywords", "comma-separated keyword stems",
          [](PipelineConfig &c, const std::string &v) {
            classify::KeywordRule rule;
            rule.stems.clear();
            for (const auto &s : split_list(v, ',')) rule.stems.push_back(to_lower_ascii(s));
            rule.validate();
            c.keywords = rule;
          },
          [](const PipelineConfig &c) { return join_list(c.keywords.stems, ','); }},
#define LINEAR_KEYS(prefix, field)                                                        \
  Key{prefix ".lambda", "L2 strength",                                                    \
      [](PipelineConfig &c, const std::string &v) {                                       \
        c.field.lambda = as_double(prefix ".lambda", v);                                  \
        if (!(c.field.lambda > 0.0)) bad_value(prefix ".lambda", v, "a positive number"); \
      },                                                                                  \
      [](const PipelineConfig &c) { return format_double(c.field.lambda); }},             \
      Key{prefix ".epochs", "training epochs",                                            \
          [](PipelineConfig &c, const std::string &v) {                                   \
            c.field.epochs = int(as_int(prefix ".epochs", v, 1));                         \
          },                                                                              \
          [](const PipelineConfig &c) { return std::to_string(c.field.epochs); }},        \
      Key{prefix ".learning_rate", "initial step size",                                   \
          [](PipelineConfig &c, const std::string &v) {                                   \
            c.field.learning_rate = as_double(prefix ".learning_rate", v);                \
            if (!(c.field.learning_rate > 0.0))                                           \
              bad_value(prefix ".learning_rate", v, "a positive number");                 \
          },                                                                              \
          [](const PipelineConfig &c) { return format_double(c.field.learning_rate); }}
      LINEAR_KEYS("logistic", logistic),
      LINEAR_KEYS("svm", svm),
      LINEAR_KEYS("head", head),
#undef LINEAR_KEYS
      Key{"forest.trees", "number of trees",
          [](PipelineConfig &c, const std::string &v) {
            c.forest.n_trees = int(as_int("forest.trees", v, 1));
          },
          [](const PipelineConfig &c) { return std::to_string(c.forest.n_trees); }},
      Key{"forest.max_depth", "maximum tree depth",
          [](PipelineConfig &c, const std::string &v) {
            c.forest.max_depth = int(as_int("forest.max_depth", v, 1));
          },
          [](const PipelineConfig &c) { return std::to_string(c.forest.max_depth); }},
      Key{"weeks", "week range A:B, e.g. 2017-W09:2017-W52 (default: event span)",
          [](PipelineConfig &c, const std::string &v) {
            if (trim(v).empty() || to_lower_ascii(trim(v)) == "auto") {
              c.weeks.reset();
              return;
            }
            auto r = WeekRange::parse(trim(v));
            if (!r || r->last < r->first) bad_value("weeks", v, "YYYY-Www:YYYY-Www");
            c.weeks = *r;
          },
          [](const PipelineConfig &c) { return c.weeks ? c.weeks->str() : std::string("auto"); }},
      Key{"districts", "also build district series",
          [](PipelineConfig &c, const std::string &v) { c.districts = as_bool("districts", v); },
          [](const PipelineConfig &c) { return std::string(c.districts ? "true" : "false"); }},
      Key{"lag", "weeks by which the reference lags news",
          [](PipelineConfig &c, const std::string &v) {
            long long l = 0;
            if (!parse_int64(trim(v), l) || l < -520 || l > 520) bad_value("lag", v, "an integer");
            c.lag = int(l);
          },
          [](const PipelineConfig &c) { return std::to_string(c.lag); }},
      Key{"pvalue", "p-value method: auto, exact or t",
          [](PipelineConfig &c, const std::string &v) {
            const std::string m = to_lower_ascii(trim(v));
            if (m == "auto") c.pvalue = stats::PValueMode::Auto;
            else if (m == "exact") c.pvalue = stats::PValueMode::Exact;
            else if (m == "t") c.pvalue = stats::PValueMode::TApprox;
            else bad_value("pvalue", v, "auto, exact or t");
          },
          [](const PipelineConfig &c) { return pvalue_name(c.pvalue); }},
      Key{"synth.weeks", "synthetic week range",
          [](PipelineConfig &c, const std::string &v) {
            auto r = WeekRange::parse(trim(v));
            if (!r || r->last < r->first) bad_value("synth.weeks", v, "YYYY-Www:YYYY-Www");
            c.synth.weeks = *r;
          },
          [](const PipelineConfig &c) { return c.synth.weeks.str(); }},
      Key{"synth.bumps", "division:center:width:peak;... or 'none'",
          [](PipelineConfig &c, const std::string &v) {
            std::map<std::string, std::vector<synth::Bump>> bumps;
            if (to_lower_ascii(trim(v)) != "none")
              for (const auto &part : split_list(v, ';')) {
                const auto f = split_list(part, ':');
                if (f.size() != 4) bad_value("synth.bumps", part, "division:center:width:peak");
                bumps[f[0]].push_back({as_double("synth.bumps", f[1]),
                                       as_double("synth.bumps", f[2]),
                                       as_double("synth.bumps", f[3])});
              }
            c.synth.bumps = std::move(bumps);
          },
          [](const PipelineConfig &c) { return bumps_str(c.synth.bumps); }},
      Key{"synth.intensity_floor", "intensity added to every division-week",
          [](PipelineConfig &c, const std::string &v) {
            c.synth.intensity_floor = as_double("synth.intensity_floor", v);
          },
          [](const PipelineConfig &c) { return format_double(c.synth.intensity_floor); }},
      Key{"synth.total_articles", "fixed corpus size, or 'none' for Poisson base rate",
          [](PipelineConfig &c, const std::string &v) {
            if (to_lower_ascii(trim(v)) == "none")
              c.synth.total_articles.reset();
            else
              c.synth.total_articles = std::size_t(as_int("synth.total_articles", v, 0));
          },
          [](const PipelineConfig &c) {
            return c.synth.total_articles ? std::to_string(*c.synth.total_articles)
                                          : std::string("none");
          }},
      Key{"synth.base_rate", "non-flood articles per week (Poisson mean)",
          [](PipelineConfig &c, const std::string &v) {
            c.synth.base_rate = as_double("synth.base_rate", v);
          },
          [](const PipelineConfig &c) { return format_double(c.synth.base_rate); }},
      Key{"synth.annotated_flood", "annotated flood articles",
          [](PipelineConfig &c, const std::string &v) {
            c.synth.annotated_flood = std::size_t(as_int("synth.annotated_flood", v, 0));
          },
          [](const PipelineConfig &c) { return std::to_string(c.synth.annotated_flood); }},
      Key{"synth.annotated_not_flood", "annotated non-flood articles",
          [](PipelineConfig &c, const std::string &v) {
            c.synth.annotated_not_flood = std::size_t(as_int("synth.annotated_not_flood", v, 0));
          },
          [](const PipelineConfig &c) { return std::to_string(c.synth.annotated_not_flood); }},
#define PROB_KEY(name)                                                                         \
  Key{"synth." #name, "probability",                                                           \
      [](PipelineConfig &c, const std::string &v) { c.synth.name = as_prob("synth." #name, v); }, \
      [](const PipelineConfig &c) { return format_double(c.synth.name); }}
      PROB_KEY(keyword_prob),
      PROB_KEY(distractor_prob),
      PROB_KEY(district_prob),
      PROB_KEY(district_coverage),
      PROB_KEY(secondary_mention_prob),
      PROB_KEY(context_leak_prob),
      PROB_KEY(topic_mix_prob),
#undef PROB_KEY
      Key{"synth.area_scale", "km² per unit intensity",
          [](PipelineConfig &c, const std::string &v) {
            c.synth.area_scale = as_double("synth.area_scale", v);
          },
          [](const PipelineConfig &c) { return format_double(c.synth.area_scale); }},
      Key{"synth.noise_scale", "satellite noise sd relative to area_scale",
          [](PipelineConfig &c, const std::string &v) {
            c.synth.noise_scale = as_double("synth.noise_scale", v);
          },
          [](const PipelineConfig &c) { return format_double(c.synth.noise_scale); }},
      Key{"synth.embedding_dim", "embedding dimension",
          [](PipelineConfig &c, const std::string &v) {
            c.synth.embedding_dim = std::uint32_t(as_int("synth.embedding_dim", v, 1));
          },
          [](const PipelineConfig &c) { return std::to_string(c.synth.embedding_dim); }},
      Key{"synth.embedding_separation", "class mean distance in sd units",
          [](PipelineConfig &c, const std::string &v) {
            c.synth.embedding_separation = as_double("synth.embedding_separation", v);
          },
          [](const PipelineConfig &c) { return format_double(c.synth.embedding_separation); }},
      Key{"synth.emdat_events", "number of disaster-database events",
          [](PipelineConfig &c, const std::string &v) {
            c.synth.emdat_events = std::size_t(as_int("synth.emdat_events", v, 0));
          },
          [](const PipelineConfig &c) { return std::to_string(c.synth.emdat_events); }},
  };
  return k;
}

#undef PATH_KEY

// Input paths after bundle defaults are applied.
PipelineConfig resolved(const PipelineConfig &config) {
  PipelineConfig c = config;
  if (!c.bundle.empty()) {
    auto fill = [&](fs::path &p, const char *name) {
      if (p.empty() && fs::exists(c.bundle / name)) p = c.bundle / name;
    };
    fill(c.corpus, "corpus.jsonl");
    fill(c.annotations, "annotations.csv");
    fill(c.embeddings, "embeddings.flemb");
    fill(c.satellite, "satellite.csv");
    fill(c.emdat, "emdat.csv");
    fill(c.twitter, "twitter.csv");
  }
  if (c.methods.empty()) {
    for (Method m : classify::kAllMethods)
      if (m != Method::EmbeddingHead || !c.embeddings.empty()) c.methods.push_back(m);
  }
  return c;
}

const geo::Gazetteer &gazetteer_for(const PipelineConfig &c) {
  static std::map<fs::path, geo::Gazetteer> cache;
  if (c.gazetteer.empty()) return geo::Gazetteer::builtin();
  auto it = cache.find(c.gazetteer);
  if (it == cache.end()) it = cache.emplace(c.gazetteer, geo::Gazetteer::load(c.gazetteer)).first;
  return it->second;
}

void require_input(const fs::path &path, const std::string &key) {
  if (path.empty()) throw UsageError("no " + key + " path configured (set --" + key + ")");
  if (!fs::exists(path)) throw DataError(path.string(), "no such file");
}

fs::path artifact(const PipelineConfig &c, const char *name, const char *stage) {
  fs::path p = c.out_dir / name;
  if (!fs::exists(p))
    throw DataError(p.string(), std::string("missing artifact; run '") + stage + "' first");
  return p;
}

void prepare_out(const PipelineConfig &c) {
  std::error_code ec;
  fs::create_directories(c.out_dir, ec);
  if (ec) throw DataError(c.out_dir.string(), "cannot create output directory: " + ec.message());
  write_file_atomic(c.out_dir / "run_config.txt", describe(c));
}

corpus::Corpus load_work_corpus(const PipelineConfig &c) {
  corpus::LoadOptions opts;
  opts.allowed_sources.clear();
  auto result = corpus::load_corpus(artifact(c, kCorpusFile, "ingest"), opts);
  if (!result.errors.empty()) {
    const auto &e = result.errors.front();
    throw DataError((c.out_dir / kCorpusFile).string() + ":" + std::to_string(e.line), e.message);
  }
  return std::move(result.corpus);
}

struct Work {
  corpus::Corpus corpus;
  std::vector<corpus::Annotation> annotations;
  corpus::Split split;
};

Work load_work(const PipelineConfig &c) {
  Work w;
  w.corpus = load_work_corpus(c);
  w.annotations = corpus::load_annotations(artifact(c, kAnnotationsFile, "ingest"), w.corpus);
  w.split = corpus::load_split(artifact(c, kSplitFile, "ingest"), w.annotations);
  return w;
}

std::vector<const corpus::Article *> articles_for(const corpus::Corpus &corpus,
                                                  std::span<const corpus::Annotation> labeled) {
  std::vector<const corpus::Article *> out;
  for (const auto &a : labeled) {
    const auto *art = corpus.find(a.article_id);
    if (!art) throw DataError("annotations", "unknown article '" + a.article_id + "'");
    out.push_back(art);
  }
  return out;
}

SparseMatrix tfidf_design(std::span<const corpus::Article *const> articles,
                          const textfeat::Vocabulary &vocab) {
  SparseMatrix x(vocab.size());
  for (const auto *a : articles) x.add_row(textfeat::transform(a->text(), vocab));
  return x;
}

struct Scored {
  Label label;
  double score;
};

// Labels and scores for |articles| under a saved model.
std::vector<Scored> score_articles(const classify::SavedModel &model, const fs::path &model_path,
                                   const PipelineConfig &c,
                                   std::span<const corpus::Article *const> articles) {
  std::vector<Scored> out;
  out.reserve(articles.size());
  switch (model.method) {
    case Method::Keywords: {
      const auto &rule = std::get<classify::KeywordRule>(model.params);
      for (const auto *a : articles) {
        const Label l = classify::keyword_predict(*a, rule);
        out.push_back({l, l == Label::Flood ? 1.0 : 0.0});
      }
      break;
    }
    case Method::Logistic:
    case Method::Svm:
    case Method::Forest: {
      const auto vocab = textfeat::Vocabulary::load(model_path.parent_path() / model.vocabulary);
      const SparseMatrix x = tfidf_design(articles, vocab);
      if (model.method == Method::Forest) {
        const auto &f = std::get<classify::ForestModel>(model.params);
        for (std::size_t i = 0; i < x.rows(); ++i)
          out.push_back({f.predict(x.row(i)), f.flood_vote_fraction(x.row(i))});
      } else {
        const auto &m = std::get<classify::LinearModel>(model.params);
        for (std::size_t i = 0; i < x.rows(); ++i) {
          const double mg = m.margin(x.row(i));
          out.push_back({classify::LinearModel::label_from_margin(mg), m.score_from_margin(mg)});
        }
      }
      break;
    }
    case Method::EmbeddingHead: {
      require_input(c.embeddings, "embeddings");
      const auto table = embedding::read(c.embeddings);
      const auto &m = std::get<classify::LinearModel>(model.params);
      if (m.weights.size() != table.dim())
        throw DataError(c.embeddings.string(),
                        "dimension " + std::to_string(table.dim()) + " does not match model (" +
                            std::to_string(m.weights.size()) + ")");
      for (const auto *a : articles) {
        const long r = table.find(a->id);
        if (r < 0)
          throw DataError(c.embeddings.string(), "no embedding row for article '" + a->id + "'");
        const double mg = m.margin(table.row(std::size_t(r)));
        out.push_back({classify::LinearModel::label_from_margin(mg), m.score_from_margin(mg)});
      }
      break;
    }
  }
  return out;
}

std::string pad(std::string s, std::size_t width) {
  std::size_t cps = 0;
  for (unsigned char ch : s) cps += (ch & 0xC0) != 0x80;
  if (cps < width) s.append(width - cps, ' ');
  return s;
}

std::string fixed(double v, int digits) {
  if (!std::isfinite(v)) return "nan";
  std::ostringstream o;
  o.setf(std::ios::fixed);
  o.precision(digits);
  o << v;
  return o.str();
}

const series::RegionSeries *find_series(const std::vector<series::RegionSeries> &list,
                                        const std::string &id) {
  for (const auto &s : list)
    if (s.region_id == id) return &s;
  return nullptr;
}

std::string display_name(const geo::Gazetteer &gaz, const std::string &id) {
  const geo::Region *r = gaz.find(id);
  return r ? r->name : id;
}

}  // namespace

const std::vector<KeyInfo> &config_keys() {
  static const std::vector<KeyInfo> info = [] {
    std::vector<KeyInfo> out;
    for (const auto &k : keys()) out.push_back({k.name, k.help});
    return out;
  }();
  return info;
}

void apply_setting(PipelineConfig &config, const std::string &key, const std::string &value) {
  for (const auto &k : keys())
    if (k.name == key) {
      k.set(config, trim(value));
      return;
    }
  throw UsageError("unknown config key '" + key + "'");
}

void apply_config_file(PipelineConfig &config, const fs::path &path) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw UsageError(path.string() + ":" + std::to_string(n) + ": expected key=value");
    try {
      apply_setting(config, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    } catch (const UsageError &e) {
      throw UsageError(path.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
}

std::string env_name(const std::string &key) {
  std::string out = "FLOODLENS_";
  for (char ch : key) {
    if (ch == '.' || ch == '-')
      out += '_';
    else
      out += char(std::toupper(static_cast<unsigned char>(ch)));
  }
  return out;
}

std::string describe(const PipelineConfig &config) {
  std::string out;
  for (const auto &k : keys()) out += k.name + "=" + k.get(config) + "\n";
  return out;
}

std::string model_file(Method m) { return "model_" + classify::method_name(m) + ".json"; }

void ingest(const PipelineConfig &config, Streams io) {
  const PipelineConfig c = resolved(config);
  require_input(c.corpus, "corpus");
  corpus::LoadOptions opts;
  opts.allowed_sources = c.sources;
  auto loaded = corpus::load_corpus(c.corpus, opts);
  for (const auto &e : loaded.errors) {
    const std::string where = c.corpus.string() + ":" + std::to_string(e.line);
    if (!c.skip_invalid)
      throw DataError(where, e.message + " (use --skip_invalid to skip malformed records)");
    io.err << "floodlens: skipped " << where << ": " << e.message << '\n';
  }
  std::vector<corpus::Annotation> annotations;
  if (!c.annotations.empty()) {
    require_input(c.annotations, "annotations");
    annotations = corpus::load_annotations(c.annotations, loaded.corpus);
  }
  corpus::Split split;
  if (!c.split.empty()) {
    require_input(c.split, "split");
    split = corpus::load_split(c.split, annotations);
  } else if (!annotations.empty()) {
    corpus::SplitSpec spec;
    spec.seed = c.seed;
    spec.test_fraction = c.test_fraction;
    split = corpus::split(annotations, spec);
  }

  prepare_out(c);
  corpus::write_corpus(loaded.corpus.articles(), c.out_dir / kCorpusFile);
  corpus::write_annotations(annotations, c.out_dir / kAnnotationsFile);
  corpus::write_split(split, c.out_dir / kSplitFile);

  std::ostringstream rep;
  rep << "articles=" << loaded.corpus.size() << '\n'
      << "annotated=" << annotations.size() << '\n'
      << "unannotated=" << loaded.corpus.size() - annotations.size() << '\n'
      << "skipped=" << loaded.errors.size() << '\n'
      << "train=" << split.train.size() << '\n'
      << "test=" << split.test.size() << '\n';
  write_file_atomic(c.out_dir / "ingest_report.txt", rep.str());
  io.out << rep.str();
}

void train(const PipelineConfig &config, Streams io) {
  const PipelineConfig c = resolved(config);
  const Work w = load_work(c);
  if (w.split.train.empty()) throw DataError((c.out_dir / kSplitFile).string(), "empty training split");
  prepare_out(c);

  const auto train_articles = articles_for(w.corpus, w.split.train);
  std::vector<Label> y;
  for (const auto &a : w.split.train) y.push_back(a.label);

  const bool bag = std::any_of(c.methods.begin(), c.methods.end(), [](Method m) {
    return m == Method::Logistic || m == Method::Svm || m == Method::Forest;
  });
  SparseMatrix x;
  if (bag) {
    std::vector<std::string> docs;
    for (const auto *a : train_articles) docs.push_back(a->text());
    const auto vocab = textfeat::fit_vocabulary(docs, c.vocab);
    vocab.save(c.out_dir / kVocabularyFile);
    x = tfidf_design(train_articles, vocab);
    io.out << "vocabulary: " << vocab.size() << " terms from " << docs.size() << " documents\n";
  }

  for (Method m : classify::kAllMethods) {
    if (std::find(c.methods.begin(), c.methods.end(), m) == c.methods.end()) continue;
    classify::SavedModel saved;
    saved.method = m;
    switch (m) {
      case Method::Keywords:
        saved.params = c.keywords;
        break;
      case Method::Logistic:
        saved.params = classify::train_logistic(x, y, c.logistic);
        saved.vocabulary = kVocabularyFile;
        break;
      case Method::Svm:
        saved.params = classify::train_svm(x, y, c.svm);
        saved.vocabulary = kVocabularyFile;
        break;
      case Method::Forest:
        saved.params = classify::train_forest(x, y, c.forest);
        saved.vocabulary = kVocabularyFile;
        break;
      case Method::EmbeddingHead: {
        require_input(c.embeddings, "embeddings");
        const auto table = embedding::read(c.embeddings);
        saved.params = classify::train_embedding_head(table, w.split.train, c.head);
        break;
      }
    }
    classify::save_model(saved, c.out_dir / model_file(m));
    io.out << "trained " << classify::method_title(m) << " -> " << model_file(m) << '\n';
  }
}

void eval(const PipelineConfig &config, Streams io) {
  const PipelineConfig c = resolved(config);
  const Work w = load_work(c);
  if (w.split.test.empty()) throw DataError((c.out_dir / kSplitFile).string(), "empty test split");
  prepare_out(c);
  const auto test_articles = articles_for(w.corpus, w.split.test);

  csv::Writer table({"method", "accuracy", "precision", "recall", "f1", "tp", "fp", "fn", "tn"});
  io.out << pad("method", 22) << pad("accuracy", 10) << pad("precision", 11) << pad("recall", 8)
         << "f1\n";
  for (Method m : classify::kAllMethods) {
    if (std::find(c.methods.begin(), c.methods.end(), m) == c.methods.end()) continue;
    const fs::path path = artifact(c, model_file(m).c_str(), "train");
    const auto model = classify::load_model(path);
    if (model.method != m) throw DataError(path.string(), "model method does not match file name");
    const auto scored = score_articles(model, path, c, test_articles);
    std::vector<std::pair<std::string, Label>> preds;
    for (std::size_t i = 0; i < scored.size(); ++i)
      preds.emplace_back(test_articles[i]->id, scored[i].label);
    const auto mt = classify::evaluate(preds, w.split.test);
    table.row({classify::method_name(m), format_double(mt.accuracy), format_double(mt.precision),
               format_double(mt.recall), format_double(mt.f1), std::to_string(mt.tp),
               std::to_string(mt.fp), std::to_string(mt.fn), std::to_string(mt.tn)});
    io.out << pad(classify::method_title(m), 22) << pad(fixed(mt.accuracy, 4), 10)
           << pad(fixed(mt.precision, 4), 11) << pad(fixed(mt.recall, 4), 8) << fixed(mt.f1, 4)
           << '\n';
  }
  write_file_atomic(c.out_dir / kEvalFile, table.str());
}

void predict(const PipelineConfig &config, Streams io) {
  const PipelineConfig c = resolved(config);
  const auto corpus = load_work_corpus(c);
  prepare_out(c);
  const fs::path path = artifact(c, model_file(c.predictor).c_str(), "train");
  const auto model = classify::load_model(path);
  std::vector<const corpus::Article *> all;
  for (const auto &a : corpus.articles()) all.push_back(&a);
  const auto scored = score_articles(model, path, c, all);
  csv::Writer w({"article_id", "prediction", "score"});
  std::size_t flood = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    w.row({all[i]->id, std::string(corpus::label_name(scored[i].label)),
           format_double(scored[i].score)});
    flood += scored[i].label == Label::Flood;
  }
  write_file_atomic(c.out_dir / kPredictionsFile, w.str());
  io.out << "predicted " << all.size() << " articles with " << classify::method_title(c.predictor)
         << ": " << flood << " flood\n";
}

void extract(const PipelineConfig &config, Streams io) {
  const PipelineConfig c = resolved(config);
  const auto corpus = load_work_corpus(c);
  const auto path = artifact(c, kPredictionsFile, "predict");
  const csv::Table table = csv::Table::read(path);
  const std::size_t c_id = table.index("article_id"), c_pred = table.index("prediction");
  geo::PredictionMap preds;
  for (const auto &rec : table.records()) {
    auto label = corpus::parse_label(rec.fields[c_pred]);
    if (!label) throw DataError(table.where(rec), "bad prediction '" + rec.fields[c_pred] + "'");
    if (!preds.emplace(rec.fields[c_id], *label).second)
      throw DataError(table.where(rec), "duplicate prediction for '" + rec.fields[c_id] + "'");
  }
  prepare_out(c);
  const auto &gaz = gazetteer_for(c);
  const auto events = geo::build_events(corpus, preds, gaz, c.threads);
  geo::write_events(events, c.out_dir / kEventsFile);
  std::size_t flood = 0, country_only = 0;
  for (const auto &e : events)
    if (e.label == Label::Flood) {
      ++flood;
      country_only += e.region_id == gaz.country().id;
    }
  io.out << "extracted " << events.size() << " records (" << flood << " flood, " << country_only
         << " located at country level only)\n";
}

void build_series(const PipelineConfig &config, Streams io) {
  const PipelineConfig c = resolved(config);
  const auto &gaz = gazetteer_for(c);
  const auto events = geo::load_events(artifact(c, kEventsFile, "extract"), gaz);
  if (events.empty()) throw DataError((c.out_dir / kEventsFile).string(), "no event records");
  prepare_out(c);
  series::Denominators den = series::Denominators::from_events(events);
  if (!c.denominators.empty()) {
    require_input(c.denominators, "denominators");
    den = series::Denominators::load(c.denominators);
  }
  const WeekRange range = c.weeks ? *c.weeks : series::event_week_range(events);
  const auto counts = series::build_all_counts(events, range, den, gaz, c.districts);
  series::write_counts(counts, c.out_dir / kCountsFile);
  std::vector<series::RegionSeries> news;
  for (const auto &cs : counts) news.push_back(cs.to_series());
  series::write_series(news, c.out_dir / kNewsSeriesFile);
  io.out << "news series: " << news.size() << " regions over " << range.str() << '\n';

  if (!c.satellite.empty()) {
    require_input(c.satellite, "satellite");
    const auto sat = refdata::load_satellite(c.satellite, gaz);
    series::write_series(sat, c.out_dir / kSatelliteSeriesFile);
    io.out << "satellite series: " << sat.size() << " regions\n";
  }
  if (!c.emdat.empty()) {
    require_input(c.emdat, "emdat");
    const auto events_db = refdata::read_emdat(c.emdat);
    const std::vector<series::RegionSeries> s = {
        refdata::emdat_to_series(events_db, range, gaz.country().id)};
    series::write_series(s, c.out_dir / kEmdatSeriesFile);
    io.out << "disaster-database events: " << events_db.size() << '\n';
  }
  if (!c.twitter.empty()) {
    require_input(c.twitter, "twitter");
    const auto tw = series::load_series(c.twitter);
    for (const auto &s : tw) s.validate();
    series::write_series(tw, c.out_dir / kTwitterSeriesFile);
    io.out << "twitter series: " << tw.size() << " regions\n";
  }
}

void correlate(const PipelineConfig &config, Streams io) {
  const PipelineConfig c = resolved(config);
  const auto &gaz = gazetteer_for(c);
  const auto news = series::load_series(artifact(c, kNewsSeriesFile, "series"));
  stats::CorrelateOptions opts;
  opts.lag = c.lag;
  opts.pvalue = c.pvalue;

  std::vector<stats::TableRow> rows;
  bool any = false;
  if (fs::exists(c.out_dir / kSatelliteSeriesFile) && !c.satellite.empty()) {
    any = true;
    const auto sat = series::load_series(c.out_dir / kSatelliteSeriesFile);
    opts.source = "news/satellite";
    const auto part = stats::correlate_table(news, sat, opts);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  if (!c.emdat.empty()) {
    any = true;
    require_input(c.emdat, "emdat");
    const auto events_db = refdata::read_emdat(c.emdat);
    const auto *country = find_series(news, gaz.country().id);
    if (!country) throw DataError(kNewsSeriesFile, "no country news series");
    const auto pairs = refdata::event_level_pairs(events_db, *country);
    if (pairs.n() < 3)
      throw DataError(c.emdat.string(), "insufficient overlap (" + std::to_string(pairs.n()) +
                                            " events inside the news range)");
    const auto part = stats::correlate_pairs(gaz.country().id, "news/emdat", pairs.x, pairs.y,
                                             c.pvalue);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  if (!c.twitter.empty() && fs::exists(c.out_dir / kTwitterSeriesFile)) {
    any = true;
    const auto tw = series::load_series(c.out_dir / kTwitterSeriesFile);
    opts.source = "news/twitter";
    const auto part = stats::correlate_table(news, tw, opts);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  if (!any) throw UsageError("no reference series configured (set --satellite, --emdat or --twitter)");
  prepare_out(c);
  write_file_atomic(c.out_dir / kCorrelationsFile, stats::table_csv(rows));
  for (const auto &r : rows)
    io.out << pad(display_name(gaz, r.region_id), 14) << pad(r.source, 16)
           << pad(std::string(stats::method_name(r.result.method)), 22) << "n=" << pad(std::to_string(r.result.n), 4)
           << fixed(r.result.coefficient, 3) << r.stars << "  p=" << format_double(r.result.p_value)
           << '\n';
}

void report(const PipelineConfig &config, Streams io) {
  const PipelineConfig c = resolved(config);
  const auto &gaz = gazetteer_for(c);
  const auto rows = stats::load_table(artifact(c, kCorrelationsFile, "correlate"));
  prepare_out(c);
  const fs::path dir = c.out_dir / kReportDir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError(dir.string(), "cannot create directory: " + ec.message());

  // Pair each Spearman row with the Pearson row of the same region/source.
  struct Entry {
    std::string region, source;
    const stats::TableRow *spearman = nullptr;
    const stats::TableRow *pearson = nullptr;
  };
  std::vector<Entry> entries;
  for (const auto &r : rows) {
    auto it = std::find_if(entries.begin(), entries.end(), [&](const Entry &e) {
      return e.region == r.region_id && e.source == r.source;
    });
    if (it == entries.end()) {
      entries.push_back({r.region_id, r.source});
      it = entries.end() - 1;
    }
    const bool rank_based = r.result.method == stats::Method::SpearmanPermutation ||
                            r.result.method == stats::Method::SpearmanTApprox;
    (rank_based ? it->spearman : it->pearson) = &r;
  }

  auto cell = [](const stats::TableRow *r) {
    return r ? fixed(r->result.coefficient, 3) + r->stars : std::string("-");
  };
  std::ostringstream txt;
  txt << "Correlation of the news flood index with reference series\n"
      << "(*** p<0.01, ** p<0.05, * p<0.1; lag " << c.lag << " weeks)\n\n"
      << pad("Region", 16) << pad("Reference", 16) << pad("n", 6) << pad("Spearman", 12)
      << "Pearson\n";
  csv::Writer out_csv({"region_id", "region", "source", "n", "spearman", "spearman_p",
                       "spearman_stars", "pearson", "pearson_p", "pearson_stars"});
  for (const auto &e : entries) {
    const std::size_t n = e.spearman ? e.spearman->result.n : e.pearson ? e.pearson->result.n : 0;
    const std::string ref = e.source.substr(e.source.find('/') + 1);
    txt << pad(display_name(gaz, e.region), 16) << pad(ref, 16) << pad(std::to_string(n), 6)
        << pad(cell(e.spearman), 12) << cell(e.pearson) << '\n';
    auto f = [](const stats::TableRow *r, int which) -> std::string {
      if (!r) return "";
      if (which == 0) return format_double(r->result.coefficient);
      if (which == 1) return format_double(r->result.p_value);
      return r->stars;
    };
    out_csv.row({e.region, display_name(gaz, e.region), e.source, std::to_string(n),
                 f(e.spearman, 0), f(e.spearman, 1), f(e.spearman, 2), f(e.pearson, 0),
                 f(e.pearson, 1), f(e.pearson, 2)});
  }
  write_file_atomic(dir / "correlation_table.txt", txt.str());
  write_file_atomic(dir / "correlation_table.csv", out_csv.str());
  io.out << txt.str();

  // Charts: news against each reference on a shared week axis.
  const auto news = series::load_series(artifact(c, kNewsSeriesFile, "series"));
  std::size_t charts = 0;
  auto chart = [&](const std::vector<series::RegionSeries> &refs, const std::string &tag,
                   const std::string &axis, const std::string &color) {
    for (const auto &ref : refs) {
      const auto *n = find_series(news, ref.region_id);
      if (!n) continue;
      std::map<IsoWeek, std::pair<double, double>> merged;
      const double nan = std::nan("");
      for (const auto &[wk, v] : n->points) merged[wk] = {v, nan};
      for (const auto &[wk, v] : ref.points) {
        auto it = merged.find(wk);
        if (it == merged.end())
          merged[wk] = {nan, v};
        else
          it->second.second = v;
      }
      svg::Chart ch;
      ch.title = display_name(gaz, ref.region_id) + ": news flood index vs " + tag;
      ch.left_axis = "flood article fraction";
      ch.right_axis = axis;
      ch.left.label = "news";
      ch.left.color = "#1f77b4";
      svg::Line r;
      r.label = tag;
      r.color = color;
      for (const auto &[wk, v] : merged) {
        ch.x_labels.push_back(wk.str());
        ch.left.values.push_back(v.first);
        r.values.push_back(v.second);
      }
      ch.right.push_back(std::move(r));
      write_file_atomic(dir / ("news_vs_" + tag + "_" + ref.region_id + ".svg"), svg::render(ch));
      ++charts;
    }
  };
  if (fs::exists(c.out_dir / kSatelliteSeriesFile) && !c.satellite.empty())
    chart(series::load_series(c.out_dir / kSatelliteSeriesFile), "satellite", "inundated area (km²)",
          "#d62728");
  if (fs::exists(c.out_dir / kEmdatSeriesFile) && !c.emdat.empty())
    chart(series::load_series(c.out_dir / kEmdatSeriesFile), "emdat", "people affected", "#2ca02c");
  if (fs::exists(c.out_dir / kTwitterSeriesFile) && !c.twitter.empty())
    chart(series::load_series(c.out_dir / kTwitterSeriesFile), "twitter", "tweet index", "#9467bd");
  io.out << "wrote " << charts << " charts to " << dir.string() << '\n';
}

void synthesize(const PipelineConfig &config, Streams io) {
  const fs::path dir = config.bundle.empty() ? config.out_dir : config.bundle;
  const auto &gaz = gazetteer_for(config);
  const auto bundle = synth::generate(config.synth, gaz);
  synth::write_bundle(bundle, dir, gaz);
  std::size_t flood = 0;
  for (const auto &g : bundle.truth) flood += g.label == Label::Flood;
  io.out << "synthetic bundle " << dir.string() << ": " << bundle.articles.size() << " articles ("
         << flood << " flood), " << bundle.annotations.size() << " annotated, "
         << bundle.satellite.size() << " satellite rows, " << bundle.emdat.size()
         << " disaster-database events\n";
}

void run_all(const PipelineConfig &config, Streams io) {
  ingest(config, io);
  train(config, io);
  eval(config, io);
  predict(config, io);
  extract(config, io);
  build_series(config, io);
  correlate(config, io);
  report(config, io);
}

}  // namespace floodlens::pipeline

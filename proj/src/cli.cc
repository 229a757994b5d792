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

#include "floodlens/cli.h"

#include <CLI11.hpp>

#include <cstdlib>
#include <map>
#include <ostream>
#include <sstream>

#include "floodlens/embedding.h"
#include "floodlens/error.h"
#include "floodlens/geodate.h"
#include "floodlens/pipeline.h"
#include "floodlens/synth.h"

namespace floodlens::cli {
namespace {

using pipeline::PipelineConfig;

struct Stage {
  const char *name;
  const char *help;
  void (*fn)(const PipelineConfig &, pipeline::Streams);
};

const Stage kStages[] = {
    {"ingest", "validate the corpus and annotations and write the split", pipeline::ingest},
    {"train", "fit the configured classifiers on the training split", pipeline::train},
    {"eval", "score every trained classifier on the test split", pipeline::eval},
    {"predict", "label every article with the predictor model", pipeline::predict},
    {"extract", "locate and date every article", pipeline::extract},
    {"series", "build weekly news and reference series", pipeline::build_series},
    {"correlate", "correlate news series with reference series", pipeline::correlate},
    {"report", "write the correlation table and charts", pipeline::report},
    {"synth", "generate a synthetic bundle", pipeline::synthesize},
    {"all", "ingest through report in one go", pipeline::run_all},
};

std::string option_name(const std::string &key) {
  std::string s = "--" + key;
  for (char &c : s)
    if (c == '.') c = '-';
  return s;
}

}  // namespace

EnvLookup process_env() {
  return [](const std::string &name) -> std::optional<std::string> {
    const char *v = std::getenv(name.c_str());
    if (!v) return std::nullopt;
    return std::string(v);
  };
}

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err,
        const EnvLookup &env) {
  CLI::App app{"floodlens: news-based flood monitoring pipeline"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "list every subcommand and config key");

  std::string config_path;
  app.add_option("--config", config_path, "key=value config file");

  // Every config key doubles as a flag; dots become dashes.
  std::map<std::string, std::string> flags;
  for (const auto &k : pipeline::config_keys()) {
    app.add_option_function<std::string>(
        option_name(k.key), [&flags, key = k.key](const std::string &v) { flags[key] = v; },
        k.help);
  }

  // Subcommands pass the shared options up to the parent.
  app.fallthrough();
  for (const Stage &s : kStages) app.add_subcommand(s.name, s.help);
  std::string verify_path;
  auto *verify = app.add_subcommand("verify", "check an embedding file and print its shape");
  verify->add_option("file", verify_path, "FLEMB1 file")->required();
  auto *score = app.add_subcommand("score", "compare pipeline outputs with synthetic ground truth");
  auto *show = app.add_subcommand("config", "print the effective configuration");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    err << "floodlens: usage error: " << e.what() << "\n" << "run 'floodlens --help' for usage\n";
    return kExitUsage;
  }

  try {
    if (verify->parsed()) {
      const auto table = embedding::read(verify_path);
      std::ostringstream msg;
      msg << "OK, n=" << table.size() << ", d=" << table.dim()
          << ", bytes=" << std::filesystem::file_size(verify_path) << '\n';
      out << msg.str();
      return kExitOk;
    }

    PipelineConfig config;
    if (config_path.empty())
      if (auto v = env(pipeline::env_name("config"))) config_path = *v;
    if (!config_path.empty()) pipeline::apply_config_file(config, config_path);
    for (const auto &k : pipeline::config_keys())
      if (auto v = env(pipeline::env_name(k.key))) {
        try {
          pipeline::apply_setting(config, k.key, *v);
        } catch (const UsageError &e) {
          throw UsageError(pipeline::env_name(k.key) + ": " + e.what());
        }
      }
    for (const auto &k : pipeline::config_keys()) {
      auto it = flags.find(k.key);
      if (it != flags.end()) pipeline::apply_setting(config, k.key, it->second);
    }

    pipeline::Streams io{out, err};
    if (show->parsed()) {
      out << pipeline::describe(config);
      return kExitOk;
    }
    if (score->parsed()) {
      if (config.bundle.empty()) throw UsageError("score needs --bundle");
      const auto &gaz =
          config.gazetteer.empty() ? geo::Gazetteer::builtin() : geo::Gazetteer::load(config.gazetteer);
      const auto rep = synth::score_pipeline(config.bundle, config.out_dir, gaz);
      out << rep.str();
      return kExitOk;
    }
    for (const Stage &s : kStages)
      if (app.got_subcommand(s.name)) {
        s.fn(config, io);
        return kExitOk;
      }
    throw UsageError("no subcommand");
  } catch (const UsageError &e) {
    err << "floodlens: usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError &e) {
    err << "floodlens: data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception &e) {
    err << "floodlens: internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace floodlens::cli

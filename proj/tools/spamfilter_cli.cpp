// Command-line front end: run, config dump, synth, report.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spamfilter/config.hpp"
#include "spamfilter/error.hpp"
#include "spamfilter/experiment.hpp"
#include "spamfilter/text_format.hpp"

namespace sf = spamfilter;

namespace {

// Flags shared by every subcommand that builds a RunConfig.
struct ConfigFlags {
  std::string file;
  std::vector<std::string> sets;
  std::map<std::string, std::string> values;

  void attach(CLI::App* app) {
    app->add_option("--config", file, "key = value configuration file")->check(CLI::ExistingFile);
    app->add_option("--set", sets, "KEY=VALUE override (repeatable)");
    for (const auto& key : sf::config_keys()) {
      std::string dashed = key;
      for (auto& ch : dashed)
        if (ch == '_') ch = '-';
      std::string names = "--" + dashed;
      if (dashed != key) names += ",--" + key;
      app->add_option(names, values[key], "overrides '" + key + "'");
    }
  }

  sf::RunConfig resolve(const std::vector<std::pair<std::string, std::string>>& forced = {}) const {
    std::vector<std::pair<std::string, std::string>> overrides;
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw sf::ConfigError("", "--set expects KEY=VALUE, got '" + s + "'");
      overrides.emplace_back(std::string(sf::text::trim(s.substr(0, eq))), s.substr(eq + 1));
    }
    for (const auto& key : sf::config_keys()) {
      // CLI11 leaves unset options empty; explicit empty values are not supported on the command line.
      const auto& v = values.at(key);
      if (!v.empty()) overrides.emplace_back(key, v);
    }
    overrides.insert(overrides.end(), forced.begin(), forced.end());
    if (!file.empty()) return sf::load_config(file, overrides);
    return sf::parse_config({}, overrides);
  }
};

std::string one_line(std::string s) {
  for (auto& ch : s)
    if (ch == '\n' || ch == '\r') ch = ' ';
  return s;
}

int fail(const char* kind, const std::string& message) {
  std::cerr << "error: " << kind << ": " << one_line(message) << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive spam filtering with TFDCR feature selection and incremental SVM retraining"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run experiment 1 (mode = batch) or experiment 2 (mode = incremental)");
  ConfigFlags run_flags;
  run_flags.attach(run);
  bool quiet = false;
  run->add_flag("--quiet", quiet, "do not print the result table");

  auto* config = app.add_subcommand("config", "configuration utilities");
  config->require_subcommand(1);
  auto* dump = config->add_subcommand("dump", "print the resolved configuration in canonical form");
  ConfigFlags dump_flags;
  dump_flags.attach(dump);

  auto* synth = app.add_subcommand("synth", "write a synthetic drift corpus in the Enron directory layout");
  ConfigFlags synth_flags;
  synth_flags.attach(synth);
  std::string synth_out;
  synth->add_option("--out", synth_out, "destination directory")->required();

  auto* report = app.add_subcommand("report", "re-render saved session reports as a table");
  std::string report_dir;
  std::string report_format = "csv";
  std::string report_name = "report";
  report->add_option("dir", report_dir, "directory holding *.session.json files")->required();
  report->add_option("--format", report_format, "csv or json");
  report->add_option("--name", report_name, "table name");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << one_line(e.what()) << "\n";
    return 2;
  }

  try {
    if (*run) {
      const sf::RunConfig cfg = run_flags.resolve();
      const sf::ExperimentOutput out =
          cfg.mode == sf::SessionMode::Batch ? sf::run_experiment1(cfg) : sf::run_experiment2(cfg);
      sf::emit_report(out, cfg.output, cfg.report);
      if (!quiet) std::cout << (cfg.report == sf::ReportFormat::Csv ? out.table.to_csv() : out.table.to_json());
      for (const auto& r : out.runs)
        if (r.report.halted)
          std::cerr << "warning: " << sf::run_stem(r.report) << " halted: " << one_line(r.report.halt_reason) << "\n";
    } else if (*dump) {
      std::cout << sf::dump_config(dump_flags.resolve());
    } else if (*synth) {
      const sf::RunConfig cfg = synth_flags.resolve({{"format", "synth"}});
      const sf::LabeledCorpus corpus = sf::synth_drift(cfg.seed, cfg.synth);
      sf::write_enron_layout(corpus, synth_out);
      std::cout << "wrote " << corpus.size() << " documents (" << corpus.spam_count() << " spam, "
                << corpus.legit_count() << " legitimate) to " << synth_out << "\n";
    } else if (*report) {
      const sf::ReportFormat fmt = sf::parse_report_format(report_format);
      const sf::ExperimentTable table = sf::table_from_sessions(report_dir, report_name);
      std::cout << (fmt == sf::ReportFormat::Csv ? table.to_csv() : table.to_json());
    }
  } catch (const sf::Error& e) {
    return fail(e.kind(), e.what());
  } catch (const std::exception& e) {
    return fail("internal", e.what());
  }
  return 0;
}

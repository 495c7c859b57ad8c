// vocabtrend: exam vocabulary mining and next-year appearance forecasting.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vocabtrend/error.hpp"
#include "vocabtrend/pipeline.hpp"
#include "vocabtrend/synthetic.hpp"

namespace {

struct Overrides {
  std::string config;
  std::vector<std::string> set;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
};

void add_config_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "key = value configuration file")->required();
  cmd->add_option("--set", o.set, "override a config key (key=value), repeatable");
}

vocabtrend::RunConfig resolve_config(const Overrides& o) {
  auto config = vocabtrend::load_config(o.config);
  for (const auto& kv : o.set) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw vocabtrend::InputError("--set expects key=value, got '" + kv + "'");
    }
    config.set(kv.substr(0, eq), kv.substr(eq + 1), std::filesystem::current_path());
  }
  if (o.seed) config.hyper.seed = *o.seed;
  if (o.jobs) config.jobs = *o.jobs;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mine yearly exam texts and forecast next-year word appearance"};
  app.require_subcommand(1);

  Overrides ingest_opts, correlate_opts, train_opts, evaluate_opts, report_opts;
  auto* ingest = app.add_subcommand("ingest", "build the frequency matrices");
  add_config_options(ingest, ingest_opts);

  auto* correlate = app.add_subcommand("correlate", "sentence correlation of high-rank words");
  add_config_options(correlate, correlate_opts);

  auto* train = app.add_subcommand("train", "train the window ensemble and score words");
  add_config_options(train, train_opts);
  train->add_option("--jobs", train_opts.jobs, "models trained concurrently");
  train->add_option("--seed", train_opts.seed, "training seed");

  std::string exam;
  auto* evaluate = app.add_subcommand("evaluate", "score predictions against an exam");
  add_config_options(evaluate, evaluate_opts);
  evaluate->add_option("--exam", exam, "exam text file")->required();

  auto* report = app.add_subcommand("report", "histogram and segment CSVs for plotting");
  add_config_options(report, report_opts);
  std::string report_exam;
  report->add_option("--exam", report_exam, "exam text file for segment rates");

  vocabtrend::SyntheticOptions synth_opts;
  std::string synth_dir;
  auto* synth = app.add_subcommand("synth", "write a synthetic exam series");
  synth->add_option("--out", synth_dir, "destination directory")->required();
  synth->add_option("--years", synth_opts.years, "number of corpus years");
  synth->add_option("--first-year", synth_opts.first_year, "first corpus year");
  synth->add_option("--seed", synth_opts.seed, "generator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*ingest) {
      vocabtrend::cmd_ingest(resolve_config(ingest_opts), std::cout);
    } else if (*correlate) {
      vocabtrend::cmd_correlate(resolve_config(correlate_opts), std::cout);
    } else if (*train) {
      vocabtrend::cmd_train_predict(resolve_config(train_opts), std::cout);
    } else if (*evaluate) {
      vocabtrend::cmd_evaluate(resolve_config(evaluate_opts), exam, std::cout);
    } else if (*report) {
      auto config = resolve_config(report_opts);
      if (!report_exam.empty()) config.exam_file = report_exam;
      vocabtrend::cmd_report(config, std::cout);
    } else if (*synth) {
      const auto corpus = vocabtrend::make_synthetic_corpus(synth_opts);
      vocabtrend::write_synthetic_corpus(corpus, synth_dir);
      std::cout << "wrote " << corpus.texts.size() << " years and exam " << corpus.exam_year
                << " to " << synth_dir << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return vocabtrend::exit_code_for(e);
  }
  return 0;
}

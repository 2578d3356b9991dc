// trail-recover: command-line front end for the trailrec library.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "trailrec/pipeline.hpp"

namespace fs = std::filesystem;
using namespace trailrec;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitBudget = 3;
constexpr int kExitInternal = 4;

/// Flag values shared by the subcommands. Each subcommand starts from the
/// --config document (or defaults) and applies only the flags actually given.
struct Flags {
  std::string config;
  std::uint64_t seed = 0;
  std::string time_unit = "ticks";
  std::string input;
  std::string output;

  std::size_t locations = 0, trails = 0, min_length = 0, max_length = 0;
  double concentration = 0, gap_rate = 0;
  std::int64_t gap_magnitude = 0;
  std::string hidden;

  std::string strategy;
  std::int64_t resolution = 0;
  std::size_t size = 0;
  double fraction = 0;
  std::string answers;

  std::int64_t gap_threshold = 0;
  bool no_partition = false, no_sentinels = false;

  std::string smoothing;
  double floor_prob = 0;

  std::string net, results;
  std::uint64_t exact_budget = 0;
  std::size_t acs_iterations = 0, acs_ants = 0;
  bool no_fallback = false, timings = false;

  std::string compare;
  bool skip_broken = false;
  bool print_config = false;
};

bool given(CLI::App* app, const std::string& name) {
  try {
    return app->get_option(name)->count() > 0;
  } catch (const CLI::OptionNotFound&) {
    return false;
  }
}

PipelineConfig base_config(CLI::App* app, const Flags& f) {
  PipelineConfig cfg;
  if (given(app, "--config")) cfg = config_from_json(read_json(f.config));
  if (given(app, "--time-unit")) cfg.time_unit = parse_time_unit(f.time_unit);
  if (given(app, "--gap-threshold")) cfg.gap_threshold = f.gap_threshold;
  if (given(app, "--no-partition")) cfg.prepare.partition = false;
  if (given(app, "--no-sentinels")) cfg.prepare.sentinels = false;
  if (given(app, "--smoothing")) cfg.smoothing.mode = parse_smoothing_mode(f.smoothing);
  if (given(app, "--floor-prob")) cfg.smoothing.floor_prob = f.floor_prob;
  return cfg;
}

PrepareOptions prepare_options(const PipelineConfig& cfg) {
  PrepareOptions p = cfg.prepare;
  p.gap = cfg.gap();
  return p;
}

void add_common(CLI::App* app, Flags& f, bool with_seed) {
  app->add_option("--config", f.config, "JSON configuration supplying defaults")->check(CLI::ExistingFile);
  app->add_option("--time-unit", f.time_unit, "ticks, days or seconds")
      ->check(CLI::IsMember({"ticks", "days", "seconds"}));
  if (with_seed) app->add_option("--seed", f.seed, "random seed");
}

void add_prepare(CLI::App* app, Flags& f) {
  app->add_option("--gap-threshold", f.gap_threshold, "cut trails where consecutive records are further apart");
  app->add_flag("--no-partition", f.no_partition, "do not partition at gap points");
  app->add_flag("--no-sentinels", f.no_sentinels, "do not add _BEGIN_/_END_ records");
}

int run(int argc, char** argv) {
  CLI::App app{"Recover the visiting order of locations in low-resolution trails"};
  app.require_subcommand(1);
  Flags f;
  int code = kExitOk;

  auto* synth = app.add_subcommand("synth", "generate synthetic unbroken trails");
  add_common(synth, f, true);
  synth->add_option("--locations", f.locations, "number of locations");
  synth->add_option("--trails", f.trails, "number of trails");
  synth->add_option("--min-length", f.min_length, "shortest trail");
  synth->add_option("--max-length", f.max_length, "longest trail");
  synth->add_option("--concentration", f.concentration, "sharpness of the hidden transition rows");
  synth->add_option("--gap-rate", f.gap_rate, "mean per-visit chance of a gap");
  synth->add_option("--gap-magnitude", f.gap_magnitude, "ticks added at a gap");
  synth->add_option("-o,--output", f.output, "trails CSV")->required();
  synth->add_option("--hidden", f.hidden, "write the hidden model as JSON");
  synth->callback([&] {
    auto cfg = base_config(synth, f);
    auto spec = cfg.synth;
    spec.seed = given(synth, "--seed") ? f.seed : cfg.synth_seed();
    if (given(synth, "--locations")) spec.n_locations = f.locations;
    if (given(synth, "--trails")) spec.n_trails = f.trails;
    if (given(synth, "--min-length")) spec.min_length = f.min_length;
    if (given(synth, "--max-length")) spec.max_length = f.max_length;
    if (given(synth, "--concentration")) spec.concentration = f.concentration;
    if (given(synth, "--gap-rate")) spec.gap_rate = f.gap_rate;
    if (given(synth, "--gap-magnitude")) spec.gap_magnitude = f.gap_magnitude;
    stage::synth(spec, f.output, f.hidden.empty() ? std::nullopt : std::optional<fs::path>(f.hidden));
  });

  auto* degrade = app.add_subcommand("degrade", "manufacture broken points with known answers");
  add_common(degrade, f, true);
  degrade->add_option("input", f.input, "unbroken trails CSV")->required()->check(CLI::ExistingFile);
  degrade->add_option("-o,--output", f.output, "degraded trails CSV")->required();
  degrade->add_option("--strategy", f.strategy, "resolution or mutation")
      ->check(CLI::IsMember({"resolution", "mutation"}));
  degrade->add_option("--resolution", f.resolution, "ticks per collapsed slot");
  degrade->add_option("--size", f.size, "records per mutation window");
  degrade->add_option("--fraction", f.fraction, "share of records to mutate");
  degrade->add_option("--answers", f.answers, "write the answer key as JSON");
  degrade->callback([&] {
    auto cfg = base_config(degrade, f);
    auto spec = cfg.degrade;
    spec.seed = given(degrade, "--seed") ? f.seed : cfg.degrade_seed();
    if (given(degrade, "--strategy")) spec.strategy = parse_degrade_strategy(f.strategy);
    if (given(degrade, "--resolution")) spec.resolution = f.resolution;
    if (given(degrade, "--size")) spec.size = f.size;
    if (given(degrade, "--fraction")) spec.fraction = f.fraction;
    const auto out = stage::degrade(f.input, cfg.time_unit, spec, f.output,
                                    f.answers.empty() ? std::nullopt : std::optional<fs::path>(f.answers));
    std::cerr << "broken runs: " << out.answers.size();
    if (spec.strategy == DegradeStrategy::mutation) std::cerr << ", windows: " << out.windows;
    if (out.short_trails > 0) std::cerr << ", trails too short for a window: " << out.short_trails;
    std::cerr << '\n';
  });

  auto* preprocess = app.add_subcommand("preprocess", "partition at gaps and add sentinels");
  add_common(preprocess, f, false);
  add_prepare(preprocess, f);
  preprocess->add_option("input", f.input, "trails CSV")->required()->check(CLI::ExistingFile);
  preprocess->add_option("output", f.output, "preprocessed CSV");
  preprocess->add_option("-o", f.output, "preprocessed CSV");
  preprocess->callback([&] {
    if (f.output.empty()) throw CLI::RequiredError("output");
    const auto cfg = base_config(preprocess, f);
    stage::preprocess(f.input, cfg.time_unit, prepare_options(cfg), f.output);
  });

  auto* extract = app.add_subcommand("extract", "build the transition network");
  add_common(extract, f, false);
  add_prepare(extract, f);
  extract->add_option("input", f.input, "trails CSV (raw input is preprocessed first)")
      ->required()
      ->check(CLI::ExistingFile);
  extract->add_option("-o,--output", f.output, "network JSON")->required();
  extract->add_option("--smoothing", f.smoothing, "none or floor")->check(CLI::IsMember({"none", "floor"}));
  extract->add_option("--floor-prob", f.floor_prob, "probability used for unseen pairs under floor smoothing");
  extract->callback([&] {
    const auto cfg = base_config(extract, f);
    stage::extract(f.input, cfg.time_unit, prepare_options(cfg), cfg.smoothing, f.output);
  });

  auto* recover = app.add_subcommand("recover", "recover the order of every broken run");
  add_common(recover, f, true);
  add_prepare(recover, f);
  recover->add_option("input", f.input, "trails CSV")->required()->check(CLI::ExistingFile);
  recover->add_option("--net", f.net, "network JSON")->required()->check(CLI::ExistingFile);
  recover->add_option("-o,--output", f.output, "repaired trails CSV")->required();
  recover->add_option("--results", f.results, "per-run results JSON");
  recover->add_option("--strategy", f.strategy, "exact, acs, greedy or random")
      ->check(CLI::IsMember({"exact", "acs", "greedy", "random"}));
  recover->add_option("--exact-budget", f.exact_budget, "largest number of orderings exact may enumerate");
  recover->add_option("--acs-iterations", f.acs_iterations, "ACS iterations");
  recover->add_option("--acs-ants", f.acs_ants, "ACS ants per iteration");
  recover->add_flag("--no-fallback", f.no_fallback, "report over-budget exact runs instead of using ACS");
  recover->add_flag("--timings", f.timings, "include elapsed times in the results");
  recover->callback([&] {
    const auto cfg = base_config(recover, f);
    RecoverOptions options;
    options.strategy = given(recover, "--strategy") ? parse_strategy(f.strategy) : cfg.solvers.front();
    options.exact_budget = given(recover, "--exact-budget") ? f.exact_budget : cfg.exact_budget;
    options.exact_fallback_to_acs = f.no_fallback ? false : cfg.exact_fallback_to_acs;
    options.acs = cfg.acs;
    if (given(recover, "--acs-iterations")) options.acs.iterations = f.acs_iterations;
    if (given(recover, "--acs-ants")) options.acs.ants = f.acs_ants;
    options.seed = given(recover, "--seed") ? f.seed : cfg.recover_seed();
    options.prepare = prepare_options(cfg);
    const auto out = stage::recover(f.net, f.input, cfg.time_unit, options, f.output,
                                    f.results.empty() ? std::nullopt : std::optional<fs::path>(f.results),
                                    f.timings || cfg.record_timings);
    std::size_t over_budget = 0, infeasible = 0, failed = 0;
    for (const auto& run : out.runs) {
      over_budget += run.status == RunStatus::budget_exceeded;
      infeasible += run.status == RunStatus::infeasible;
      failed += run.status == RunStatus::failed;
    }
    std::cerr << "runs: " << out.runs.size() << ", infeasible: " << infeasible << ", over budget: " << over_budget
              << ", failed: " << failed << '\n';
    if (failed > 0) {
      code = kExitInternal;
    } else if (over_budget > 0) {
      code = kExitBudget;
    }
  });

  auto* evaluate = app.add_subcommand("evaluate", "score recovered orderings against an answer key");
  evaluate->add_option("--answers", f.answers, "answer key JSON")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--results", f.results, "results JSON from recover")->required()->check(CLI::ExistingFile);
  evaluate->add_option("-o,--output", f.output, "report JSON");
  evaluate->callback([&] {
    const auto report = stage::evaluate(f.answers, f.results,
                                        f.output.empty() ? std::nullopt : std::optional<fs::path>(f.output));
    std::cout << format_report(report);
  });

  auto* rank = app.add_subcommand("rank", "rank locations by inverted betweenness");
  add_common(rank, f, false);
  rank->add_option("input", f.input, "trails CSV")->required()->check(CLI::ExistingFile);
  rank->add_option("-o,--output", f.output, "rank JSON")->required();
  rank->add_option("--compare", f.compare, "rank JSON to correlate against")->check(CLI::ExistingFile);
  rank->add_flag("--skip-broken", f.skip_broken, "ignore movements touching broken points");
  rank->callback([&] {
    const auto cfg = base_config(rank, f);
    const auto report = stage::rank(f.input, cfg.time_unit, f.skip_broken,
                                    f.compare.empty() ? std::nullopt : std::optional<fs::path>(f.compare),
                                    fs::path(f.output));
    if (report.spearman) std::cout << "spearman: " << *report.spearman << '\n';
  });

  auto* pipeline = app.add_subcommand("pipeline", "run synth, degrade, preprocess, extract, recover, evaluate, rank");
  pipeline->add_option("--config", f.config, "JSON configuration")->check(CLI::ExistingFile);
  pipeline->add_option("--seed", f.seed, "master seed");
  pipeline->add_option("-o,--out-dir", f.output, "directory for all artifacts");
  pipeline->add_flag("--print-config", f.print_config, "print the effective configuration and exit");
  pipeline->callback([&] {
    PipelineConfig cfg;
    if (given(pipeline, "--config")) cfg = config_from_json(read_json(f.config));
    if (given(pipeline, "--seed")) cfg.master_seed = f.seed;
    if (f.print_config) {
      std::cout << config_to_json(cfg).dump(2) << '\n';
      return;
    }
    if (f.output.empty()) throw CLI::RequiredError("--out-dir");
    const auto summary = run_pipeline(cfg, f.output);
    for (const auto& [name, report] : summary.reports) {
      std::cout << name << ": accuracy " << report.accuracy << ", avg hamming " << report.avg_hamming;
      if (auto it = summary.spearman.find(name); it != summary.spearman.end()) {
        std::cout << ", spearman " << it->second;
      }
      std::cout << '\n';
    }
    if (auto it = summary.spearman.find("unrecovered"); it != summary.spearman.end()) {
      std::cout << "unrecovered: spearman " << it->second << '\n';
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const PipelineError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBudget;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

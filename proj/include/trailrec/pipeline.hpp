#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "trailrec/analysis.hpp"
#include "trailrec/degrade.hpp"
#include "trailrec/error.hpp"
#include "trailrec/io.hpp"
#include "trailrec/metrics.hpp"
#include "trailrec/preprocess.hpp"
#include "trailrec/recover.hpp"
#include "trailrec/synth.hpp"
#include "trailrec/transition.hpp"

namespace trailrec {

/// Failure inside run_pipeline, tagged with the stage that raised it.
class PipelineError : public Error {
 public:
  PipelineError(std::string phase, const std::exception& cause);
  const std::string& phase() const { return phase_; }
  /// Exit code the cause maps to (2 input, 3 budget, 4 internal).
  int exit_code() const { return exit_code_; }

 private:
  std::string phase_;
  int exit_code_;
};

/// Optional per-stage seed overrides; unset ones are derived from the
/// master seed.
struct StageSeeds {
  std::optional<std::uint64_t> synth;
  std::optional<std::uint64_t> degrade;
  std::optional<std::uint64_t> recover;
  bool operator==(const StageSeeds&) const = default;
};

struct PipelineConfig {
  std::uint64_t master_seed = 42;
  StageSeeds seeds;
  /// Existing trails CSV to use instead of synthetic data.
  std::optional<std::filesystem::path> input;
  TimeUnit time_unit = TimeUnit::ticks;
  GeneratorSpec synth;
  DegradeSpec degrade;
  PrepareOptions prepare;
  /// Unset means the default for time_unit.
  std::optional<std::int64_t> gap_threshold;
  SmoothingPolicy smoothing;
  std::vector<Strategy> solvers = {Strategy::exact, Strategy::acs, Strategy::greedy, Strategy::random};
  std::uint64_t exact_budget = kDefaultExactBudget;
  bool exact_fallback_to_acs = true;
  AcsParams acs;
  bool rank = true;
  /// Adds per-run elapsed times to results files (makes them run-dependent).
  bool record_timings = false;

  std::uint64_t synth_seed() const;
  std::uint64_t degrade_seed() const;
  std::uint64_t recover_seed() const;
  GapPolicy gap() const;
  void validate() const;

  bool operator==(const PipelineConfig&) const;
};

Json config_to_json(const PipelineConfig& config);
/// Missing keys keep their defaults; unknown keys are rejected.
PipelineConfig config_from_json(const Json& j);

/// File-to-file stages. The CLI subcommands and run_pipeline both go
/// through these, so pipeline artifacts equal manual chaining.
namespace stage {

void synth(const GeneratorSpec& spec, const std::filesystem::path& trails_csv,
           const std::optional<std::filesystem::path>& hidden_json);

DegradedDataset degrade(const std::filesystem::path& in_csv, TimeUnit unit, const DegradeSpec& spec,
                        const std::filesystem::path& out_csv,
                        const std::optional<std::filesystem::path>& answers_json);

void preprocess(const std::filesystem::path& in_csv, TimeUnit unit, const PrepareOptions& options,
                const std::filesystem::path& out_csv);

/// Raw input is prepared with `options` first.
TransitionNetwork extract(const std::filesystem::path& in_csv, TimeUnit unit, const PrepareOptions& options,
                          const SmoothingPolicy& smoothing, const std::filesystem::path& net_json);

DatasetRecovery recover(const std::filesystem::path& net_json, const std::filesystem::path& in_csv, TimeUnit unit,
                        const RecoverOptions& options, const std::filesystem::path& out_csv,
                        const std::optional<std::filesystem::path>& results_json, bool with_timings);

EvalReport evaluate(const std::filesystem::path& answers_json, const std::filesystem::path& results_json,
                    const std::optional<std::filesystem::path>& report_json);

/// Prepared input is joined back into whole trails first.
RankReport rank(const std::filesystem::path& in_csv, TimeUnit unit, bool skip_broken,
                const std::optional<std::filesystem::path>& compare_json,
                const std::optional<std::filesystem::path>& rank_json);

}  // namespace stage

struct PipelineSummary {
  std::map<std::string, EvalReport> reports;
  /// Spearman against the truth ranking, per solver plus "unrecovered".
  std::map<std::string, double> spearman;
  std::size_t windows = 0;
};

/// Runs every stage into `out_dir` and writes report.json and config.json.
/// Throws PipelineError.
PipelineSummary run_pipeline(const PipelineConfig& config, const std::filesystem::path& out_dir);

}  // namespace trailrec

#include "trailrec/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <set>

#include "trailrec/rng.hpp"

namespace trailrec {

namespace fs = std::filesystem;

namespace {

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const InputError*>(&e)) return 2;
  if (dynamic_cast<const BudgetExceeded*>(&e)) return 3;
  return 4;
}

void reject_unknown(const Json& j, std::string_view where, std::initializer_list<std::string_view> known) {
  if (!j.is_object()) throw InputError("config section '" + std::string(where) + "' must be an object");
  for (const auto& item : j.items()) {
    if (std::find(known.begin(), known.end(), item.key()) == known.end()) {
      throw InputError("unknown config key '" + std::string(where) + "." + item.key() + "'");
    }
  }
}

template <class T>
void read_field(const Json& j, const char* key, T& out) {
  if (j.contains(key)) j.at(key).get_to(out);
}

template <class T>
void read_optional(const Json& j, const char* key, std::optional<T>& out) {
  if (!j.contains(key)) return;
  if (j.at(key).is_null()) {
    out.reset();
  } else {
    out = j.at(key).get<T>();
  }
}

template <class T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

Json concentration_json(double c) { return std::isinf(c) ? Json("inf") : Json(c); }

double concentration_from(const Json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
    throw InputError("concentration must be a number or \"inf\"");
  }
  return j.get<double>();
}

}  // namespace

PipelineError::PipelineError(std::string phase, const std::exception& cause)
    : Error("[" + phase + "] " + cause.what()), phase_(std::move(phase)), exit_code_(exit_code_for(cause)) {}

std::uint64_t PipelineConfig::synth_seed() const { return seeds.synth.value_or(derive_seed(master_seed, 1)); }
std::uint64_t PipelineConfig::degrade_seed() const { return seeds.degrade.value_or(derive_seed(master_seed, 2)); }
std::uint64_t PipelineConfig::recover_seed() const { return seeds.recover.value_or(derive_seed(master_seed, 3)); }

GapPolicy PipelineConfig::gap() const {
  GapPolicy policy = GapPolicy::defaults_for(time_unit);
  if (gap_threshold) policy.threshold = *gap_threshold;
  return policy;
}

void PipelineConfig::validate() const {
  if (!input) synth.validate();
  degrade.validate();
  gap().validate();
  acs.validate();
  if (solvers.empty()) throw InputError("at least one solver must be enabled");
  std::set<Strategy> unique(solvers.begin(), solvers.end());
  if (unique.size() != solvers.size()) throw InputError("solver list has duplicates");
  if (smoothing.mode == SmoothingMode::floor && !(smoothing.floor_prob > 0.0 && smoothing.floor_prob < 1.0)) {
    throw InputError("floor probability must lie in (0, 1)");
  }
}

bool PipelineConfig::operator==(const PipelineConfig&) const = default;

Json config_to_json(const PipelineConfig& c) {
  Json solvers = Json::array();
  for (auto s : c.solvers) solvers.push_back(to_string(s));
  return Json{
      {"master_seed", c.master_seed},
      {"seeds",
       {{"synth", optional_json(c.seeds.synth)},
        {"degrade", optional_json(c.seeds.degrade)},
        {"recover", optional_json(c.seeds.recover)}}},
      {"input", c.input ? Json(c.input->string()) : Json(nullptr)},
      {"time_unit", to_string(c.time_unit)},
      {"synth",
       {{"n_locations", c.synth.n_locations},
        {"n_trails", c.synth.n_trails},
        {"min_length", c.synth.min_length},
        {"max_length", c.synth.max_length},
        {"concentration", concentration_json(c.synth.concentration)},
        {"gap_rate", c.synth.gap_rate},
        {"gap_magnitude", c.synth.gap_magnitude},
        {"max_step", c.synth.max_step}}},
      {"degrade",
       {{"strategy", to_string(c.degrade.strategy)},
        {"resolution", c.degrade.resolution},
        {"size", c.degrade.size},
        {"fraction", c.degrade.fraction}}},
      {"preprocess",
       {{"partition", c.prepare.partition},
        {"sentinels", c.prepare.sentinels},
        {"gap_threshold", optional_json(c.gap_threshold)}}},
      {"smoothing", {{"mode", to_string(c.smoothing.mode)}, {"floor_prob", c.smoothing.floor_prob}}},
      {"recover",
       {{"solvers", solvers},
        {"exact_budget", c.exact_budget},
        {"exact_fallback_to_acs", c.exact_fallback_to_acs},
        {"acs",
         {{"tau0", c.acs.tau0},
          {"beta", c.acs.beta},
          {"q0", c.acs.q0},
          {"alpha", c.acs.alpha},
          {"rho", c.acs.rho},
          {"ants", c.acs.ants},
          {"iterations", c.acs.iterations}}}}},
      {"rank", c.rank},
      {"record_timings", c.record_timings},
  };
}

PipelineConfig config_from_json(const Json& j) {
  PipelineConfig c;
  try {
    reject_unknown(j, "config",
                   {"master_seed", "seeds", "input", "time_unit", "synth", "degrade", "preprocess", "smoothing",
                    "recover", "rank", "record_timings"});
    read_field(j, "master_seed", c.master_seed);
    if (j.contains("seeds")) {
      const auto& s = j["seeds"];
      reject_unknown(s, "seeds", {"synth", "degrade", "recover"});
      read_optional(s, "synth", c.seeds.synth);
      read_optional(s, "degrade", c.seeds.degrade);
      read_optional(s, "recover", c.seeds.recover);
    }
    if (j.contains("input") && !j["input"].is_null()) c.input = fs::path(j["input"].get<std::string>());
    if (j.contains("time_unit")) c.time_unit = parse_time_unit(j["time_unit"].get<std::string>());
    if (j.contains("synth")) {
      const auto& s = j["synth"];
      reject_unknown(s, "synth",
                     {"n_locations", "n_trails", "min_length", "max_length", "concentration", "gap_rate",
                      "gap_magnitude", "max_step"});
      read_field(s, "n_locations", c.synth.n_locations);
      read_field(s, "n_trails", c.synth.n_trails);
      read_field(s, "min_length", c.synth.min_length);
      read_field(s, "max_length", c.synth.max_length);
      if (s.contains("concentration")) c.synth.concentration = concentration_from(s["concentration"]);
      read_field(s, "gap_rate", c.synth.gap_rate);
      read_field(s, "gap_magnitude", c.synth.gap_magnitude);
      read_field(s, "max_step", c.synth.max_step);
    }
    if (j.contains("degrade")) {
      const auto& d = j["degrade"];
      reject_unknown(d, "degrade", {"strategy", "resolution", "size", "fraction"});
      if (d.contains("strategy")) c.degrade.strategy = parse_degrade_strategy(d["strategy"].get<std::string>());
      read_field(d, "resolution", c.degrade.resolution);
      read_field(d, "size", c.degrade.size);
      read_field(d, "fraction", c.degrade.fraction);
    }
    if (j.contains("preprocess")) {
      const auto& p = j["preprocess"];
      reject_unknown(p, "preprocess", {"partition", "sentinels", "gap_threshold"});
      read_field(p, "partition", c.prepare.partition);
      read_field(p, "sentinels", c.prepare.sentinels);
      read_optional(p, "gap_threshold", c.gap_threshold);
    }
    if (j.contains("smoothing")) {
      const auto& s = j["smoothing"];
      reject_unknown(s, "smoothing", {"mode", "floor_prob"});
      if (s.contains("mode")) c.smoothing.mode = parse_smoothing_mode(s["mode"].get<std::string>());
      read_field(s, "floor_prob", c.smoothing.floor_prob);
    }
    if (j.contains("recover")) {
      const auto& r = j["recover"];
      reject_unknown(r, "recover", {"solvers", "exact_budget", "exact_fallback_to_acs", "acs"});
      if (r.contains("solvers")) {
        c.solvers.clear();
        for (const auto& s : r["solvers"]) c.solvers.push_back(parse_strategy(s.get<std::string>()));
      }
      read_field(r, "exact_budget", c.exact_budget);
      read_field(r, "exact_fallback_to_acs", c.exact_fallback_to_acs);
      if (r.contains("acs")) {
        const auto& a = r["acs"];
        reject_unknown(a, "recover.acs", {"tau0", "beta", "q0", "alpha", "rho", "ants", "iterations"});
        read_field(a, "tau0", c.acs.tau0);
        read_field(a, "beta", c.acs.beta);
        read_field(a, "q0", c.acs.q0);
        read_field(a, "alpha", c.acs.alpha);
        read_field(a, "rho", c.acs.rho);
        read_field(a, "ants", c.acs.ants);
        read_field(a, "iterations", c.acs.iterations);
      }
    }
    read_field(j, "rank", c.rank);
    read_field(j, "record_timings", c.record_timings);
  } catch (const Json::exception& e) {
    throw InputError(std::string("malformed config: ") + e.what());
  }
  return c;
}

namespace stage {

void synth(const GeneratorSpec& spec, const fs::path& trails_csv, const std::optional<fs::path>& hidden_json) {
  const auto out = generate(spec);
  write_trails_csv(trails_csv, out.data);
  if (hidden_json) write_json(*hidden_json, hidden_to_json(out.hidden));
}

DegradedDataset degrade(const fs::path& in_csv, TimeUnit unit, const DegradeSpec& spec, const fs::path& out_csv,
                        const std::optional<fs::path>& answers_json) {
  const auto data = read_trails_csv(in_csv, unit);
  auto out = trailrec::degrade(data, spec);
  write_trails_csv(out_csv, out.data);
  if (answers_json) write_json(*answers_json, orderings_to_json(out.answers, out.data.locations));
  return out;
}

void preprocess(const fs::path& in_csv, TimeUnit unit, const PrepareOptions& options, const fs::path& out_csv) {
  options.gap.validate();
  const auto data = read_trails_csv(in_csv, unit);
  if (data.prepared) throw InputError("'" + in_csv.string() + "' is already preprocessed");
  for (const auto& trail : data.trails) validate(trail);
  write_trails_csv(out_csv, prepare_dataset(data, options));
}

TransitionNetwork extract(const fs::path& in_csv, TimeUnit unit, const PrepareOptions& options,
                          const SmoothingPolicy& smoothing, const fs::path& net_json) {
  auto data = read_trails_csv(in_csv, unit);
  for (const auto& trail : data.trails) validate(trail);
  if (!data.prepared) {
    options.gap.validate();
    data = prepare_dataset(data, options);
  }
  auto net = trailrec::extract(data.locations, data.trails, smoothing);
  write_json(net_json, network_to_json(net, unit));
  return net;
}

DatasetRecovery recover(const fs::path& net_json, const fs::path& in_csv, TimeUnit unit,
                        const RecoverOptions& options, const fs::path& out_csv,
                        const std::optional<fs::path>& results_json, bool with_timings) {
  const auto net = network_from_json(read_json(net_json));
  const auto data = read_trails_csv(in_csv, unit, net.locations());
  auto out = recover_dataset(data, net, options);
  write_trails_csv(out_csv, out.repaired);
  if (results_json) write_json(*results_json, results_to_json(out.runs, out.repaired.locations, with_timings));
  return out;
}

EvalReport evaluate(const fs::path& answers_json, const fs::path& results_json,
                    const std::optional<fs::path>& report_json) {
  LocationTable table;
  const auto answers = orderings_from_json(read_json(answers_json), table);
  const auto results = orderings_from_json(read_json(results_json), table);
  const auto report = trailrec::evaluate(answers, results);
  if (report_json) write_json(*report_json, report_to_json(report));
  return report;
}

RankReport rank(const fs::path& in_csv, TimeUnit unit, bool skip_broken, const std::optional<fs::path>& compare_json,
                const std::optional<fs::path>& rank_json) {
  const auto data = join_partitions(read_trails_csv(in_csv, unit));
  auto report = rank_locations(build_network(data.locations, data.trails, skip_broken));
  if (compare_json) report.spearman = spearman(report.scores, rank_from_json(read_json(*compare_json)).scores);
  if (rank_json) write_json(*rank_json, rank_to_json(report));
  return report;
}

}  // namespace stage

namespace {

template <class F>
auto in_phase(const std::string& phase, F&& body) {
  try {
    return body();
  } catch (const PipelineError&) {
    throw;
  } catch (const std::exception& e) {
    throw PipelineError(phase, e);
  }
}

}  // namespace

PipelineSummary run_pipeline(const PipelineConfig& config, const fs::path& out_dir) {
  in_phase("config", [&] {
    config.validate();
    fs::create_directories(out_dir);
    write_json(out_dir / "config.json", config_to_json(config));
  });

  const auto unit = config.time_unit;
  const auto trails = out_dir / "trails.csv";
  in_phase("synth", [&] {
    if (config.input) {
      write_trails_csv(trails, read_trails_csv(*config.input, unit));
    } else {
      GeneratorSpec spec = config.synth;
      spec.seed = config.synth_seed();
      stage::synth(spec, trails, out_dir / "hidden.json");
    }
  });

  PipelineSummary summary;
  in_phase("degrade", [&] {
    DegradeSpec spec = config.degrade;
    spec.seed = config.degrade_seed();
    summary.windows = stage::degrade(trails, unit, spec, out_dir / "degraded.csv", out_dir / "answers.json").windows;
  });

  PrepareOptions prepare = config.prepare;
  prepare.gap = config.gap();
  in_phase("preprocess", [&] { stage::preprocess(out_dir / "degraded.csv", unit, prepare, out_dir / "preprocessed.csv"); });
  in_phase("extract", [&] {
    stage::extract(out_dir / "preprocessed.csv", unit, prepare, config.smoothing, out_dir / "net.json");
  });

  Json solver_reports = Json::object();
  for (auto strategy : config.solvers) {
    const std::string name(to_string(strategy));
    RecoverOptions options;
    options.strategy = strategy;
    options.exact_budget = config.exact_budget;
    options.exact_fallback_to_acs = config.exact_fallback_to_acs;
    options.acs = config.acs;
    options.seed = config.recover_seed();
    options.prepare = prepare;
    in_phase("recover:" + name, [&] {
      stage::recover(out_dir / "net.json", out_dir / "preprocessed.csv", unit, options,
                     out_dir / ("recovered_" + name + ".csv"), out_dir / ("results_" + name + ".json"),
                     config.record_timings);
    });
    const auto report = in_phase("evaluate:" + name, [&] {
      return stage::evaluate(out_dir / "answers.json", out_dir / ("results_" + name + ".json"),
                             out_dir / ("report_" + name + ".json"));
    });
    summary.reports[name] = report;
    solver_reports[name] = report_to_json(report);
  }

  Json spearman_json = Json::object();
  if (config.rank) {
    in_phase("rank", [&] {
      const auto truth = out_dir / "rank_truth.json";
      stage::rank(trails, unit, false, std::nullopt, truth);
      for (auto strategy : config.solvers) {
        const std::string name(to_string(strategy));
        const auto r = stage::rank(out_dir / ("recovered_" + name + ".csv"), unit, false, truth,
                                   out_dir / ("rank_" + name + ".json"));
        summary.spearman[name] = *r.spearman;
      }
      const auto r = stage::rank(out_dir / "degraded.csv", unit, true, truth, out_dir / "rank_unrecovered.json");
      summary.spearman["unrecovered"] = *r.spearman;
    });
    for (const auto& [name, rho] : summary.spearman) spearman_json[name] = rho;
  }

  in_phase("report", [&] {
    write_json(out_dir / "report.json",
               Json{{"solvers", solver_reports}, {"spearman_vs_truth", spearman_json}, {"windows", summary.windows}});
  });
  return summary;
}

}  // namespace trailrec

#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "trailrec/trail.hpp"

namespace trailrec {

struct GeneratorSpec {
  std::size_t n_locations = 50;
  std::size_t n_trails = 2000;
  std::size_t min_length = 10;
  std::size_t max_length = 50;
  /// Sharpness of the hidden rows: each row is softmax(concentration * z)
  /// with z standard normal. 0 gives uniform rows, +inf gives one-hot rows.
  double concentration = 4.0;
  /// Mean per-visit probability that an episode ends and a gap follows.
  double gap_rate = 0.05;
  /// Extra ticks added on top of the normal step at a gap.
  std::int64_t gap_magnitude = 60;
  /// Steps between visits are drawn from 1..max_step with P(d) ~ d^-1.5.
  std::int64_t max_step = 14;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const GeneratorSpec&) const = default;
};

/// The Markov model the trails were sampled from.
struct HiddenModel {
  std::vector<std::string> tokens;
  std::vector<double> begin;
  /// Row-major n x n, rows sum to 1.
  std::vector<double> transition;
  /// Per-location probability that the episode ends after a visit.
  std::vector<double> end;

  double prob(std::size_t from, std::size_t to) const { return transition[from * tokens.size() + to]; }
};

struct SynthOutput {
  Dataset data;
  HiddenModel hidden;
};

/// Samples the hidden model, then the trails in parallel with one derived
/// stream per trail. Trails are unbroken (strictly increasing timestamps).
SynthOutput generate(const GeneratorSpec& spec);

/// Single-threaded reference for generate().
SynthOutput generate_serial(const GeneratorSpec& spec);

}  // namespace trailrec

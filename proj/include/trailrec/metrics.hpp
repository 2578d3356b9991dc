#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "trailrec/trail.hpp"

namespace trailrec {

/// Positions at which two equal-length sequences differ.
std::size_t hamming(std::span<const LocationId> a, std::span<const LocationId> b);
std::size_t hamming(std::string_view a, std::string_view b);

struct EvalReport {
  std::size_t n_broken_trails = 0;
  std::size_t n_broken_points = 0;
  std::size_t n_runs = 0;
  std::size_t n_correct_points = 0;
  /// Share of broken points whose within-slot order matches the truth.
  double accuracy = 1.0;
  /// Mean Hamming distance over whole runs.
  double avg_hamming = 0.0;
  /// Mean Hamming distance over individual broken points.
  double avg_slot_hamming = 0.0;
  /// Tokens per broken point.
  double avg_bp_length = 0.0;
  /// Tokens per run.
  double avg_run_length = 0.0;
  double avg_layers_per_run = 0.0;
  std::size_t max_bp_length = 0;
};

/// Compares recovered runs with the answer key slot by slot. Slots are keyed
/// by (trail_id, slot time), so the two lists may group slots into runs
/// differently. Throws InputError naming keys present on only one side.
EvalReport evaluate(std::span<const RunOrdering> answers, std::span<const RunOrdering> recovered);

}  // namespace trailrec

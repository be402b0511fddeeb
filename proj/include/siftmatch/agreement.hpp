#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "siftmatch/fixed_point.hpp"
#include "siftmatch/reference_matcher.hpp"

namespace siftmatch {

// Worst-case gap between the hardware dot product of two unit descriptors
// and the real dot product: element quantization on both sides
// (2 * sqrt(128) * 2^-16 + 128 * 2^-32) plus the final narrowing (2^-16).
double dot_quantization_bound();

// Default arccos kernel error budget: 8 LSB of UQ2.14.
double default_cordic_bound();

// Largest deviation of a hardware angle from the reference angle `theta`,
// combining the dot-product bound mapped through arccos and the kernel bound.
double angle_quantization_bound(double theta, double cordic_bound = default_cordic_bound());

struct Disagreement {
  std::size_t query_index = 0;
  bool reference_matched = false;
  bool candidate_matched = false;
  std::optional<std::size_t> reference_best;
  std::optional<std::size_t> candidate_best;
  double reference_ratio = 0.0;  // min / second_min of the reference
  double ratio_margin = 0.0;     // reference_ratio - threshold
  double ratio_bound = 0.0;      // reachable ratio deviation under quantization
  bool within_bound = false;
};

struct AgreementReport {
  std::size_t total = 0;
  std::size_t agreeing = 0;
  std::vector<Disagreement> disagreements;

  double fraction() const {
    return total == 0 ? 1.0 : static_cast<double>(agreeing) / static_cast<double>(total);
  }
  bool all_within_bound() const;
};

// Two results agree when their verdicts match and, if both matched, they name
// the same database descriptor. Each disagreement is checked against the
// quantization bound: the candidate's ratio test can only flip if a threshold
// in [threshold_low, threshold_high] is reachable from the reference angles,
// and its argmin can only move if the top two reference angles are within
// their combined bound. Throws std::invalid_argument on a length mismatch.
AgreementReport compare_results(std::span<const MatchResult> reference,
                                std::span<const MatchResult> candidate, double threshold_low,
                                double threshold_high,
                                double cordic_bound = default_cordic_bound());

}  // namespace siftmatch

#pragma once

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

#include "siftmatch/descriptor.hpp"

namespace siftmatch {

inline constexpr double kDefaultThreshold = 0.6;

// Second-minimum surrogate when the database holds a single descriptor.
inline constexpr double kSingleEntrySecondMin = std::numbers::pi;

// Verdict for one query descriptor. Produced by both engines; the raw angle
// codes are only filled in by the hardware model.
struct MatchResult {
  std::size_t query_index = 0;
  std::optional<std::size_t> best_index;
  double min_angle = 0.0;
  double second_min_angle = 0.0;
  bool matched = false;
  PixelCoord query_xy{};
  PixelCoord best_xy{};
  std::optional<std::uint16_t> min_raw;
  std::optional<std::uint16_t> second_min_raw;
};

// Strict left-to-right sum of element products.
double dot_product(const Descriptor& a, const Descriptor& b);

// arccos of the dot product clamped to [0, 1]; result in [0, pi/2].
double angular_distance(const Descriptor& a, const Descriptor& b);

// Computes every angular distance, sorts ascending (stable, so the smallest
// database index wins ties) and applies min < threshold * second_min.
// A one-entry database uses kSingleEntrySecondMin as the second minimum.
MatchResult match_one(const Descriptor& query, const DescriptorSet& db, double threshold,
                      std::size_t query_index = 0);

// One result per query, in query order. Queries are split across `threads`
// workers (0 picks hardware concurrency); output order does not depend on it.
std::vector<MatchResult> match_all(const DescriptorSet& queries, const DescriptorSet& db,
                                   double threshold, unsigned threads = 1);

}  // namespace siftmatch

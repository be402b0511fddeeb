#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "siftmatch/cordic.hpp"
#include "siftmatch/descriptor.hpp"
#include "siftmatch/fixed_point.hpp"
#include "siftmatch/reference_matcher.hpp"

namespace siftmatch {

// How Match_Check scales the second minimum.
//   exact_0_6    : min < 0.6 * second_min, evaluated exactly (5*min < 3*second_min)
//   binary_10011 : min * 100000b < second_min * 10011b, i.e. a 19/32 = 0.59375 ratio
enum class ThresholdMode { exact_0_6, binary_10011 };

std::string_view to_string(ThresholdMode mode);
ThresholdMode threshold_mode_from_string(std::string_view name);

struct PipelineConfig {
  // Query descriptors held in DES_MEM per block.
  std::size_t block_size = 33;
  // 260 bytes at 8 bytes per cycle, rounded up.
  std::size_t fetch_cycles_per_descriptor = 33;
  unsigned dot_product_stages = 10;  // 3 multiplier + 7 adder-tree levels
  unsigned cosine_stages = kCosineInverseStages;
  unsigned min_find_stages = 1;
  unsigned match_check_stages = 3;
  double clock_hz = 100e6;
  ThresholdMode threshold_mode = ThresholdMode::binary_10011;
  CordicConfig cordic{};

  void validate() const;

  // Cycles from a pair entering Dot_Product to its verdict leaving Match_Check.
  unsigned latency() const {
    return dot_product_stages + cosine_stages + min_find_stages + match_check_stages;
  }
  // A database descriptor stays in the Register for one pass over DES_MEM,
  // or until the next one has been fetched, whichever is longer.
  std::size_t cycles_per_database_descriptor() const {
    return block_size > fetch_cycles_per_descriptor ? block_size : fetch_cycles_per_descriptor;
  }
  std::size_t block_fetch_cycles() const { return block_size * fetch_cycles_per_descriptor; }
};

// One MIN_MEM slot.
struct MinPairEntry {
  AngleSample min;
  AngleSample second_min;
  std::size_t min_index = 0;
  // True while the slot still holds the flush sentinels.
  bool init_flag = true;

  // Both minima at the largest code of the angle format (0xFFFF for UQ2.14).
  static MinPairEntry sentinel(QFormat angle_format = kAngleFormat);

  friend bool operator==(const MinPairEntry&, const MinPairEntry&) = default;
};

struct RunReport {
  std::uint64_t total_cycles = 0;
  double clock_hz = 0.0;
  double elapsed_seconds = 0.0;
  std::size_t blocks_processed = 0;
  // Real (query, database) pairs evaluated: m * n.
  std::uint64_t dot_products_executed = 0;
  // Issue slots charged, including vacant slots of a partial last block.
  std::uint64_t issue_slots = 0;
  // Cycles spent waiting for DES_MEM when a block is shorter than its refill.
  std::uint64_t stall_cycles = 0;
  std::vector<MatchResult> matches;
};

// 128 exact UQ2.30 products summed through a 7-level widening adder tree
// (UQ9.30), then narrowed to UQ1.15 with rounding and saturation.
FxSample dot_product_core(const Descriptor& a, const Descriptor& b);

// Streaming two-minimum update with strict comparisons:
//   current < min        -> (current, min), min_index = current_index
//   current < second_min -> (min, current)
//   otherwise            -> unchanged
MinPairEntry min_find(const AngleSample& current, std::size_t current_index,
                      const MinPairEntry& prev);

// Ratio test on raw angle codes. A slot still holding sentinels never matches.
bool match_check(const MinPairEntry& entry, ThresholdMode mode);

// Cycle-stepped model of the matching core: DES_MEM block scheduling with
// overlapped refill, the Register stream, Dot_Product, Cosine_Inverse,
// MIN_FIND against MIN_MEM (flushed through the sentinel multiplexer at each
// block start) and Match_Check. Throws std::invalid_argument on empty sets.
RunReport run_pipeline(const DescriptorSet& queries, const DescriptorSet& db,
                       const PipelineConfig& cfg = {});

// Closed form of run_pipeline's cycle count:
//   F_blk = block_size * fetch_cycles,  C = n * max(block_size, fetch_cycles)
//   total = F_blk + (ceil(m / block_size) - 1) * max(C, F_blk) + C + latency
std::uint64_t predict_cycles(std::size_t m, std::size_t n, const PipelineConfig& cfg = {});

}  // namespace siftmatch

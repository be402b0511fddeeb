#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace siftmatch {

struct RooflineConfig {
  double clock_hz = 100e6;
  // Payload per descriptor transfer; 128 x 16-bit elements, no coordinates.
  std::size_t descriptor_bytes = 256;
  double peak_ops_per_cycle = 1.0;

  void validate() const;
  double peak_ops_per_second() const { return clock_hz * peak_ops_per_cycle; }
};

enum class RooflineBound { memory, compute };

std::string_view to_string(RooflineBound bound);

struct RooflinePoint {
  double bandwidth_bytes_per_s = 0.0;
  double attainable_ops_per_s = 0.0;
  RooflineBound bound = RooflineBound::memory;
};

// One operation needs a whole descriptor at the core's input port:
//   cycles = ceil(descriptor_bytes / (bandwidth / clock)),
//   ops/s  = min(clock / cycles, clock * peak_ops_per_cycle).
RooflinePoint attainable_throughput(double bandwidth_bytes_per_s, const RooflineConfig& cfg = {});

// Throws std::invalid_argument on an empty list.
std::vector<RooflinePoint> roofline_sweep(const RooflineConfig& cfg,
                                          std::span<const double> bandwidths);

// Throughput with a DES_MEM of `block_size` descriptors reused against each
// streamed descriptor: the core is busy block_size cycles out of every
// max(block_size, fetch_cycles_per_descriptor).
double effective_throughput_with_blocking(const RooflineConfig& cfg, std::size_t block_size,
                                          std::size_t fetch_cycles_per_descriptor = 33);

}  // namespace siftmatch

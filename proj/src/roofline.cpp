#include "siftmatch/roofline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace siftmatch {

void RooflineConfig::validate() const {
  if (!(clock_hz > 0.0)) throw std::invalid_argument("RooflineConfig: clock_hz must be > 0");
  if (descriptor_bytes < 1) throw std::invalid_argument("RooflineConfig: descriptor_bytes must be >= 1");
  if (!(peak_ops_per_cycle > 0.0)) {
    throw std::invalid_argument("RooflineConfig: peak_ops_per_cycle must be > 0");
  }
}

std::string_view to_string(RooflineBound bound) {
  return bound == RooflineBound::memory ? "memory" : "compute";
}

RooflinePoint attainable_throughput(double bandwidth_bytes_per_s, const RooflineConfig& cfg) {
  cfg.validate();
  if (!(bandwidth_bytes_per_s > 0.0) || !std::isfinite(bandwidth_bytes_per_s)) {
    throw std::invalid_argument("attainable_throughput: bandwidth must be > 0");
  }
  const double bytes_per_cycle = bandwidth_bytes_per_s / cfg.clock_hz;
  const double exact_cycles = static_cast<double>(cfg.descriptor_bytes) / bytes_per_cycle;
  // Absorb representation noise such as 255.99999999999997 before the ceiling.
  const double cycles = std::max(1.0, std::ceil(exact_cycles * (1.0 - 1e-12)));
  const double memory_rate = cfg.clock_hz / cycles;
  const double peak = cfg.peak_ops_per_second();

  RooflinePoint p;
  p.bandwidth_bytes_per_s = bandwidth_bytes_per_s;
  if (memory_rate >= peak) {
    p.attainable_ops_per_s = peak;
    p.bound = RooflineBound::compute;
  } else {
    p.attainable_ops_per_s = memory_rate;
    p.bound = RooflineBound::memory;
  }
  return p;
}

std::vector<RooflinePoint> roofline_sweep(const RooflineConfig& cfg,
                                          std::span<const double> bandwidths) {
  if (bandwidths.empty()) throw std::invalid_argument("roofline_sweep: empty bandwidth list");
  std::vector<RooflinePoint> points;
  points.reserve(bandwidths.size());
  for (double bw : bandwidths) points.push_back(attainable_throughput(bw, cfg));
  return points;
}

double effective_throughput_with_blocking(const RooflineConfig& cfg, std::size_t block_size,
                                          std::size_t fetch_cycles_per_descriptor) {
  cfg.validate();
  if (block_size < 1 || fetch_cycles_per_descriptor < 1) {
    throw std::invalid_argument("effective_throughput_with_blocking: sizes must be >= 1");
  }
  const double busy = static_cast<double>(block_size);
  const double period = static_cast<double>(std::max(block_size, fetch_cycles_per_descriptor));
  return cfg.peak_ops_per_second() * busy / period;
}

}  // namespace siftmatch

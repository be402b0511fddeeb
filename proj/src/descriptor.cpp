#include "siftmatch/descriptor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace siftmatch {

Descriptor Descriptor::from_real(const RealElements& elements, PixelCoord location) {
  Descriptor d;
  for (std::size_t i = 0; i < kDescriptorLength; ++i) {
    const double v = elements[i];
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw std::invalid_argument("descriptor element " + std::to_string(i) + " = " +
                                  std::to_string(v) + " is outside [0, 1]");
    }
    d.real_[i] = v;
    d.raw_[i] = static_cast<std::uint16_t>(fx_from_real(v, kElementFormat).raw);
  }
  d.location_ = location;
  return d;
}

Descriptor Descriptor::from_raw(const RawElements& raws, PixelCoord location) {
  constexpr std::uint16_t kOne = 1u << kElementFormat.fraction_bits;
  Descriptor d;
  for (std::size_t i = 0; i < kDescriptorLength; ++i) {
    if (raws[i] > kOne) {
      throw std::invalid_argument("descriptor element " + std::to_string(i) +
                                  " raw value exceeds 1.0");
    }
    d.raw_[i] = raws[i];
    d.real_[i] = FxSample{raws[i], kElementFormat}.to_real();
  }
  d.location_ = location;
  return d;
}

double Descriptor::norm() const {
  double sum = 0.0;
  for (double v : real_) sum += v * v;
  return std::sqrt(sum);
}

Descriptor::RealElements normalize(std::span<const double, kDescriptorLength> v) {
  Descriptor::RealElements out{};
  double sum = 0.0;
  for (std::size_t i = 0; i < kDescriptorLength; ++i) {
    out[i] = std::max(v[i], 0.0);
    sum += out[i] * out[i];
  }
  if (!(sum > 0.0) || !std::isfinite(sum)) {
    throw std::invalid_argument("cannot normalize a zero (or non-finite) descriptor");
  }
  const double norm = std::sqrt(sum);
  for (double& e : out) e = std::clamp(e / norm, 0.0, 1.0);
  return out;
}

Descriptor normalize(const Descriptor& d) {
  return Descriptor::from_real(normalize(std::span<const double, kDescriptorLength>(d.real())),
                               d.location());
}

bool is_normalized(const Descriptor& d, double tolerance) {
  return std::abs(d.norm() - 1.0) <= tolerance;
}

}  // namespace siftmatch

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "siftmatch/fixed_point.hpp"

namespace siftmatch {

inline constexpr std::size_t kDescriptorLength = 128;

// 128 x 16-bit elements + 2 x 16-bit coordinates.
inline constexpr std::size_t kDescriptorBits = kDescriptorLength * 16 + 32;
inline constexpr std::size_t kDescriptorBytes = kDescriptorBits / 8;

struct PixelCoord {
  std::uint16_t x = 0;
  std::uint16_t y = 0;

  friend constexpr bool operator==(PixelCoord, PixelCoord) = default;
};

// A SIFT feature vector with both a real-valued view and its UQ1.15 view.
// Elements lie in [0, 1]. Immutable once built.
class Descriptor {
 public:
  using RealElements = std::array<double, kDescriptorLength>;
  using RawElements = std::array<std::uint16_t, kDescriptorLength>;

  Descriptor() = default;

  // Fixed view is fx_from_real of each element. Throws std::invalid_argument
  // for elements outside [0, 1] or non-finite.
  static Descriptor from_real(const RealElements& elements, PixelCoord location);

  // Real view is raw * 2^-15 exactly. Raws above 0x8000 (> 1.0) are rejected.
  static Descriptor from_raw(const RawElements& raws, PixelCoord location);

  const RealElements& real() const { return real_; }
  const RawElements& raw() const { return raw_; }
  PixelCoord location() const { return location_; }

  FxSample element(std::size_t i) const { return FxSample{raw_[i], kElementFormat}; }

  double norm() const;

  friend bool operator==(const Descriptor&, const Descriptor&) = default;

 private:
  RealElements real_{};
  RawElements raw_{};
  PixelCoord location_{};
};

struct DescriptorSet {
  std::string image_id;
  std::vector<Descriptor> descriptors;

  std::size_t size() const { return descriptors.size(); }
  bool empty() const { return descriptors.empty(); }
  const Descriptor& operator[](std::size_t i) const { return descriptors[i]; }
};

// Scales to unit L2 norm. Negative entries are clamped to zero first, and the
// scaled elements are clamped to [0, 1]. Throws on an all-zero vector.
Descriptor normalize(const Descriptor& d);
Descriptor::RealElements normalize(std::span<const double, kDescriptorLength> v);

bool is_normalized(const Descriptor& d, double tolerance = 1e-6);

// ---------------------------------------------------------------------------
// File I/O
// ---------------------------------------------------------------------------

enum class DescriptorFormat { text, binary };

// ".siftd" -> text, ".siftdb" -> binary. Throws FormatError otherwise.
DescriptorFormat format_from_path(const std::filesystem::path& path);

struct LoadOptions {
  // Renormalize descriptors whose norm is off by more than the tolerance.
  bool auto_normalize = true;
  double norm_tolerance = 1e-6;
  // Receives one message per non-normalized descriptor. May be empty.
  std::function<void(const std::string&)> on_warning;
};

// Norm drift a UQ1.15 quantized unit vector may carry: sqrt(128) * 2^-16.
double quantized_norm_slack();

DescriptorSet load_descriptor_set(const std::filesystem::path& path, DescriptorFormat format,
                                  const LoadOptions& options = {});
DescriptorSet load_descriptor_set(const std::filesystem::path& path,
                                  const LoadOptions& options = {});

void save_descriptor_set(const DescriptorSet& set, const std::filesystem::path& path,
                         DescriptorFormat format);
void save_descriptor_set(const DescriptorSet& set, const std::filesystem::path& path);

// Stream forms of the same formats, used by the file functions.
DescriptorSet read_descriptor_set(std::istream& in, DescriptorFormat format,
                                  const LoadOptions& options = {});
void write_descriptor_set(const DescriptorSet& set, std::ostream& out, DescriptorFormat format);

// ---------------------------------------------------------------------------
// Synthetic test sets
// ---------------------------------------------------------------------------

struct SyntheticOptions {
  std::size_t count = 100;
  std::uint64_t seed = 0;
  double match_fraction = 0.5;
  double noise_sigma = 0.02;
};

struct SyntheticPair {
  DescriptorSet queries;
  DescriptorSet database;
  // (query index, database index) for every planted match, ascending.
  std::vector<std::pair<std::size_t, std::size_t>> ground_truth;
};

// floor(match_fraction * count) queries are noisy copies of the database
// descriptor with the same index; the rest are independent random unit
// vectors. Deterministic in the seed.
SyntheticPair generate_synthetic(const SyntheticOptions& options);

}  // namespace siftmatch

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "siftmatch/descriptor.hpp"

namespace siftmatch {
namespace {

// Image extent used for synthetic coordinates.
constexpr std::uint16_t kImageWidth = 512;
constexpr std::uint16_t kImageHeight = 384;

PixelCoord random_coord(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> xs(0, kImageWidth - 1);
  std::uniform_int_distribution<int> ys(0, kImageHeight - 1);
  const auto x = static_cast<std::uint16_t>(xs(rng));
  return PixelCoord{x, static_cast<std::uint16_t>(ys(rng))};
}

// Non-negative Gaussian magnitudes, normalized.
Descriptor random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Descriptor::RealElements v{};
  for (double& e : v) e = std::abs(gauss(rng));
  const PixelCoord xy = random_coord(rng);
  return Descriptor::from_real(normalize(std::span<const double, kDescriptorLength>(v)), xy);
}

Descriptor noisy_copy(const Descriptor& src, double sigma, std::mt19937_64& rng) {
  if (sigma == 0.0) return src;
  std::normal_distribution<double> gauss(0.0, sigma);
  Descriptor::RealElements v = src.real();
  for (double& e : v) e = std::clamp(e + gauss(rng), 0.0, 1.0);
  // A fully clamped-out vector is astronomically unlikely; fall back to the source.
  if (std::all_of(v.begin(), v.end(), [](double e) { return e == 0.0; })) return src;
  return Descriptor::from_real(normalize(std::span<const double, kDescriptorLength>(v)),
                               src.location());
}

}  // namespace

SyntheticPair generate_synthetic(const SyntheticOptions& options) {
  if (options.count == 0) throw std::invalid_argument("generate_synthetic: count must be >= 1");
  if (!(options.match_fraction >= 0.0 && options.match_fraction <= 1.0)) {
    throw std::invalid_argument("generate_synthetic: match_fraction must be in [0, 1]");
  }
  if (!(options.noise_sigma >= 0.0) || !std::isfinite(options.noise_sigma)) {
    throw std::invalid_argument("generate_synthetic: noise_sigma must be >= 0");
  }

  const std::size_t m = options.count;
  std::mt19937_64 rng(options.seed);

  SyntheticPair out;
  out.queries.image_id = "synthetic_a";
  out.database.image_id = "synthetic_b";
  out.database.descriptors.reserve(m);
  for (std::size_t j = 0; j < m; ++j) out.database.descriptors.push_back(random_unit(rng));

  const auto planted =
      static_cast<std::size_t>(std::floor(options.match_fraction * static_cast<double>(m)));
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<bool> is_planted(m, false);
  for (std::size_t i = 0; i < planted; ++i) is_planted[order[i]] = true;

  out.queries.descriptors.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    if (is_planted[k]) {
      out.queries.descriptors.push_back(noisy_copy(out.database[k], options.noise_sigma, rng));
      out.ground_truth.emplace_back(k, k);
    } else {
      out.queries.descriptors.push_back(random_unit(rng));
    }
  }
  return out;
}

}  // namespace siftmatch

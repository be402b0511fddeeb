#pragma once

#include <cstdint>
#include <vector>

#include "siftmatch/fixed_point.hpp"

namespace siftmatch {

// Pipeline depth of each part of the cosine-inverse core. These are latency
// figures for the timing model; the kernels below are purely functional.
inline constexpr unsigned kOneMinusXSquaredStages = 4;
inline constexpr unsigned kSquareRootStages = 37;
inline constexpr unsigned kPolarStages = 11;
inline constexpr unsigned kCosineInverseStages =
    kOneMinusXSquaredStages + kSquareRootStages + kPolarStages;

struct CordicConfig {
  // Hyperbolic micro-rotations, counting the repeated indices 4, 13, 40, ...
  unsigned sqrt_iterations = 37;
  // Circular vectoring micro-rotations. 16 matches the 16-bit angle output;
  // 11 (the stage count) leaves up to atan(2^-10) of residual angle.
  unsigned polar_iterations = 16;
  QFormat input_format = kElementFormat;
  QFormat angle_format = kAngleFormat;

  // Throws std::invalid_argument when an invariant does not hold.
  void validate() const;
};

// Angle in radians, encoded in CordicConfig::angle_format.
struct AngleSample {
  FxSample value{0, kAngleFormat};
  // Set when the polar translation was given (0, 0).
  bool degenerate = false;

  std::uint64_t raw() const { return value.raw; }
  double radians() const { return value.to_real(); }

  friend constexpr bool operator==(const AngleSample&, const AngleSample&) = default;
};

// 1 - x*x: exact square, saturating subtraction, rounded back to x's format.
FxSample one_minus_x_squared(const FxSample& x);

// sqrt(x) by hyperbolic vectoring CORDIC with gain pre-compensation. The
// argument is first scaled by 4^k into the convergence region and the result
// scaled back by 2^-k, so accuracy holds down to the smallest codes.
FxSample cordic_sqrt(const FxSample& x, const CordicConfig& cfg = {});

// atan(v/u) for u, v >= 0 by circular vectoring CORDIC. The magnitude is
// produced internally and discarded. (0, 0) yields angle 0, flagged degenerate.
AngleSample cordic_polar_angle(const FxSample& u, const FxSample& v, const CordicConfig& cfg = {});

// arccos(x) = atan2(sqrt(1 - x^2), x). Inputs above 1.0 saturate to 1.0.
AngleSample cordic_arccos(const FxSample& x, const CordicConfig& cfg = {});

// One row of the accuracy ledger.
struct ArccosSample {
  std::uint64_t x_raw = 0;
  double x = 0.0;
  std::uint64_t angle_raw = 0;
  double angle = 0.0;
  double reference = 0.0;
  double error = 0.0;  // angle - reference
};

struct ArccosCharacterization {
  std::vector<ArccosSample> rows;
  double max_abs_error = 0.0;             // whole domain
  double max_abs_error_outside_zone = 0.0;  // excluding x < exclusion_limit
  double exclusion_limit = 0.0;
  std::uint64_t worst_x_raw = 0;          // argmax outside the exclusion zone
};

// Every representable input in [0, 1] against std::acos.
ArccosCharacterization characterize_arccos(const CordicConfig& cfg = {},
                                           double exclusion_limit = 1.0 / 256.0);

}  // namespace siftmatch

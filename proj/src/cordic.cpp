#include "siftmatch/cordic.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace siftmatch {
namespace {

using i64 = std::int64_t;
__extension__ typedef __int128 i128;

// Working precision of the CORDIC datapaths.
constexpr unsigned kWorkFraction = 40;
constexpr unsigned kMaxIterations = 62;

i64 to_work(const FxSample& s) {
  return static_cast<i64>(s.raw) << (kWorkFraction - s.format.fraction_bits);
}

// Non-negative working value -> fmt, round-to-nearest-even with saturation.
FxSample from_work(i64 value, QFormat fmt) {
  if (value < 0) value = 0;
  return fx_resize(FxSample{static_cast<std::uint64_t>(value),
                            QFormat{static_cast<std::uint8_t>(64 - kWorkFraction),
                                    static_cast<std::uint8_t>(kWorkFraction)}},
                   fmt);
}

i64 round_to_work(long double v) {
  return static_cast<i64>(std::llround(std::ldexp(v, static_cast<int>(kWorkFraction))));
}

struct CircularTable {
  std::array<i64, kMaxIterations> atan{};
  CircularTable() {
    for (unsigned i = 0; i < kMaxIterations; ++i) {
      atan[i] = round_to_work(std::atan(std::ldexp(1.0L, -static_cast<int>(i))));
    }
  }
};

const CircularTable& circular_table() {
  static const CircularTable table;
  return table;
}

// Shift sequence for hyperbolic CORDIC: 1, 2, 3, 4, 4, 5, ..., 13, 13, ...
// Index k repeats when k = (3^j - 1) / 2 for j >= 2 (4, 13, 40, ...).
std::vector<unsigned> hyperbolic_shifts(unsigned count) {
  std::vector<unsigned> shifts;
  shifts.reserve(count);
  unsigned next_repeat = 4;
  for (unsigned k = 1; shifts.size() < count; ++k) {
    shifts.push_back(k);
    if (k == next_repeat && shifts.size() < count) {
      shifts.push_back(k);
      next_repeat = 3 * next_repeat + 1;
    }
  }
  return shifts;
}

// 1 / prod(sqrt(1 - 2^-2k)) in working precision.
i64 hyperbolic_inverse_gain(const std::vector<unsigned>& shifts) {
  long double gain = 1.0L;
  for (unsigned k : shifts) gain *= std::sqrt(1.0L - std::ldexp(1.0L, -2 * static_cast<int>(k)));
  return round_to_work(1.0L / gain);
}

i64 mul_work(i64 a, i64 b) {
  const i128 p = static_cast<i128>(a) * b;
  // Round-to-nearest; operands here are non-negative.
  return static_cast<i64>((p + (i128{1} << (kWorkFraction - 1))) >> kWorkFraction);
}

}  // namespace

void CordicConfig::validate() const {
  if (sqrt_iterations < 1 || sqrt_iterations > kMaxIterations) {
    throw std::invalid_argument("CordicConfig: sqrt_iterations must be in [1, 62]");
  }
  if (polar_iterations < 1 || polar_iterations > kMaxIterations) {
    throw std::invalid_argument("CordicConfig: polar_iterations must be in [1, 62]");
  }
  if (input_format.integer_bits > 2 || input_format.fraction_bits > kWorkFraction) {
    throw std::invalid_argument("CordicConfig: input_format must fit UQ2.40");
  }
  if (angle_format.fraction_bits > kWorkFraction) {
    throw std::invalid_argument("CordicConfig: angle_format has too many fraction bits");
  }
  if (angle_format.max_real() < std::numbers::pi / 2) {
    throw std::invalid_argument("CordicConfig: angle_format cannot represent pi/2");
  }
}

FxSample one_minus_x_squared(const FxSample& x) {
  const FxSample square = fx_mul(x, x);
  const std::uint64_t one = std::uint64_t{1} << square.format.fraction_bits;
  const std::uint64_t diff = square.raw < one ? one - square.raw : 0;
  return fx_resize(FxSample{diff, square.format}, x.format);
}

FxSample cordic_sqrt(const FxSample& x, const CordicConfig& cfg) {
  cfg.validate();
  const FxSample in = fx_resize(x, cfg.input_format);
  if (in.raw == 0) return in;

  // Scale by 4^k into [0.5, 2), where the hyperbolic iteration converges.
  i64 w = to_work(in);
  unsigned k = 0;
  const i64 half = i64{1} << (kWorkFraction - 1);
  while (w < half) {
    w <<= 2;
    ++k;
  }

  static thread_local unsigned cached_count = 0;
  static thread_local std::vector<unsigned> shifts;
  static thread_local i64 inverse_gain = 0;
  if (cached_count != cfg.sqrt_iterations) {
    shifts = hyperbolic_shifts(cfg.sqrt_iterations);
    inverse_gain = hyperbolic_inverse_gain(shifts);
    cached_count = cfg.sqrt_iterations;
  }

  // x0 = w + 1/4, y0 = w - 1/4, so sqrt(x0^2 - y0^2) = sqrt(w).
  const i64 quarter = i64{1} << (kWorkFraction - 2);
  i64 xr = mul_work(w + quarter, inverse_gain);
  i64 yr = w >= quarter ? mul_work(w - quarter, inverse_gain) : -mul_work(quarter - w, inverse_gain);
  for (unsigned s : shifts) {
    const i64 dx = yr >> s;
    const i64 dy = xr >> s;
    if (yr < 0) {
      xr += dx;
      yr += dy;
    } else {
      xr -= dx;
      yr -= dy;
    }
  }
  // Undo the argument scaling: sqrt(w * 4^-k) = sqrt(w) * 2^-k.
  return fx_resize(FxSample{static_cast<std::uint64_t>(xr < 0 ? 0 : xr),
                            QFormat{static_cast<std::uint8_t>(64 - kWorkFraction - k),
                                    static_cast<std::uint8_t>(kWorkFraction + k)}},
                   cfg.input_format);
}

AngleSample cordic_polar_angle(const FxSample& u, const FxSample& v, const CordicConfig& cfg) {
  cfg.validate();
  if (u.raw == 0 && v.raw == 0) {
    return AngleSample{FxSample{0, cfg.angle_format}, true};
  }
  const auto& table = circular_table();
  i64 xr = to_work(fx_resize(u, cfg.input_format));
  i64 yr = to_work(fx_resize(v, cfg.input_format));
  i64 z = 0;
  for (unsigned i = 0; i < cfg.polar_iterations; ++i) {
    const i64 dx = yr >> i;
    const i64 dy = xr >> i;
    if (yr >= 0) {
      xr += dx;
      yr -= dy;
      z += table.atan[i];
    } else {
      xr -= dx;
      yr += dy;
      z -= table.atan[i];
    }
  }
  return AngleSample{from_work(z, cfg.angle_format), false};
}

AngleSample cordic_arccos(const FxSample& x, const CordicConfig& cfg) {
  cfg.validate();
  FxSample in = fx_resize(x, cfg.input_format);
  const std::uint64_t one = std::uint64_t{1} << cfg.input_format.fraction_bits;
  if (in.raw > one) in.raw = one;
  const FxSample v = cordic_sqrt(one_minus_x_squared(in), cfg);
  return cordic_polar_angle(in, v, cfg);
}

ArccosCharacterization characterize_arccos(const CordicConfig& cfg, double exclusion_limit) {
  cfg.validate();
  ArccosCharacterization out;
  out.exclusion_limit = exclusion_limit;
  const std::uint64_t one = std::uint64_t{1} << cfg.input_format.fraction_bits;
  out.rows.reserve(one + 1);
  for (std::uint64_t raw = 0; raw <= one; ++raw) {
    const FxSample x{raw, cfg.input_format};
    const AngleSample a = cordic_arccos(x, cfg);
    ArccosSample row;
    row.x_raw = raw;
    row.x = x.to_real();
    row.angle_raw = a.raw();
    row.angle = a.radians();
    row.reference = std::acos(row.x);
    row.error = row.angle - row.reference;
    const double e = std::abs(row.error);
    out.max_abs_error = std::max(out.max_abs_error, e);
    if (row.x >= exclusion_limit && e > out.max_abs_error_outside_zone) {
      out.max_abs_error_outside_zone = e;
      out.worst_x_raw = raw;
    }
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace siftmatch

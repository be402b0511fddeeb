#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace siftmatch {

// Unsigned Q-format descriptor: UQ<integer_bits>.<fraction_bits>.
// Total width is at most 64 bits, so every raw value fits a std::uint64_t.
struct QFormat {
  std::uint8_t integer_bits = 1;
  std::uint8_t fraction_bits = 15;

  static constexpr unsigned kMaxWidth = 64;

  static constexpr QFormat make(unsigned integer_bits, unsigned fraction_bits) {
    if (integer_bits + fraction_bits < 1 || integer_bits + fraction_bits > kMaxWidth) {
      throw std::invalid_argument("QFormat width must be in [1, 64]");
    }
    return QFormat{static_cast<std::uint8_t>(integer_bits),
                   static_cast<std::uint8_t>(fraction_bits)};
  }

  constexpr unsigned width() const { return unsigned{integer_bits} + fraction_bits; }

  constexpr std::uint64_t max_raw() const {
    return width() == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width()) - 1;
  }

  // Largest representable real value, 2^integer_bits - 2^-fraction_bits.
  double max_real() const { return std::ldexp(static_cast<double>(max_raw()), -fraction_bits); }

  std::string to_string() const {
    return "UQ" + std::to_string(integer_bits) + "." + std::to_string(fraction_bits);
  }

  friend constexpr bool operator==(QFormat, QFormat) = default;
};

// Formats used by the matching datapath.
inline constexpr QFormat kElementFormat{1, 15};   // descriptor elements, dot-product output
inline constexpr QFormat kProductFormat{2, 30};   // exact element products
inline constexpr QFormat kAngleFormat{2, 14};     // radians in [0, pi/2]

struct FxSample {
  std::uint64_t raw = 0;
  QFormat format = kElementFormat;

  double to_real() const { return std::ldexp(static_cast<double>(raw), -format.fraction_bits); }

  friend constexpr bool operator==(const FxSample&, const FxSample&) = default;
};

// Quantizes v with round-to-nearest-even; values above the format range
// saturate to the largest code. Throws on negative, NaN or infinite input.
FxSample fx_from_real(double v, QFormat fmt);

inline double to_real(const FxSample& s) { return s.to_real(); }

namespace detail {

__extension__ typedef unsigned __int128 u128;

// Drops `shift` low bits of `value` with round-to-nearest-even.
constexpr u128 round_shift_right(u128 value, unsigned shift) {
  if (shift == 0) return value;
  if (shift >= 128) return 0;
  const u128 kept = value >> shift;
  const u128 rem = value & ((u128{1} << shift) - 1);
  const u128 half = u128{1} << (shift - 1);
  if (rem > half || (rem == half && (kept & 1) != 0)) return kept + 1;
  return kept;
}

}  // namespace detail

// Exact product in format (ia + ib, fa + fb).
constexpr FxSample fx_mul(const FxSample& a, const FxSample& b) {
  const QFormat out = QFormat::make(unsigned{a.format.integer_bits} + b.format.integer_bits,
                                    unsigned{a.format.fraction_bits} + b.format.fraction_bits);
  const auto product = static_cast<detail::u128>(a.raw) * b.raw;
  return FxSample{static_cast<std::uint64_t>(product), out};
}

// Exact sum with one extra integer bit. Operands must share a format.
constexpr FxSample fx_add(const FxSample& a, const FxSample& b) {
  if (!(a.format == b.format)) {
    throw std::invalid_argument("fx_add: operand formats differ");
  }
  const QFormat out = QFormat::make(unsigned{a.format.integer_bits} + 1, a.format.fraction_bits);
  return FxSample{a.raw + b.raw, out};
}

// Re-quantizes into fmt: round-to-nearest-even on dropped fraction bits,
// saturation on dropped integer bits.
constexpr FxSample fx_resize(const FxSample& a, QFormat fmt) {
  detail::u128 value = a.raw;
  if (fmt.fraction_bits < a.format.fraction_bits) {
    value = detail::round_shift_right(value, a.format.fraction_bits - fmt.fraction_bits);
  } else {
    value <<= (fmt.fraction_bits - a.format.fraction_bits);
  }
  const std::uint64_t limit = fmt.max_raw();
  return FxSample{value > limit ? limit : static_cast<std::uint64_t>(value), fmt};
}

}  // namespace siftmatch

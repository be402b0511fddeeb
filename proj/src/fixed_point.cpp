#include "siftmatch/fixed_point.hpp"

namespace siftmatch {

FxSample fx_from_real(double v, QFormat fmt) {
  if (std::isnan(v) || std::isinf(v)) {
    throw std::invalid_argument("fx_from_real: value is not finite");
  }
  if (v < 0.0) {
    throw std::invalid_argument("fx_from_real: negative value " + std::to_string(v));
  }
  const double scaled = std::ldexp(v, fmt.fraction_bits);
  // 2^64 and above cannot be held by any raw value.
  if (scaled >= 18446744073709551616.0) {
    return FxSample{fmt.max_raw(), fmt};
  }
  // nearbyint honours the current rounding mode; the library assumes the
  // default FE_TONEAREST (ties to even).
  const double rounded = std::nearbyint(scaled);
  if (rounded >= 18446744073709551616.0) {
    return FxSample{fmt.max_raw(), fmt};
  }
  const auto raw = static_cast<std::uint64_t>(rounded);
  return FxSample{raw > fmt.max_raw() ? fmt.max_raw() : raw, fmt};
}

}  // namespace siftmatch

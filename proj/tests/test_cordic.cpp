#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include <json.hpp>

#include "siftmatch/cordic.hpp"

using namespace siftmatch;

namespace {

const double kAngleLsb = std::ldexp(1.0, -14);
const double kElementLsb = std::ldexp(1.0, -15);

FxSample element(double v) { return fx_from_real(v, kElementFormat); }

std::uint64_t fnv1a(const std::vector<ArccosSample>& rows) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& r : rows) {
    for (int b = 0; b < 2; ++b) {
      h ^= (r.angle_raw >> (8 * b)) & 0xFF;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

const ArccosCharacterization& default_sweep() {
  static const ArccosCharacterization c = characterize_arccos();
  return c;
}

}  // namespace

TEST_SUITE("cordic") {

TEST_CASE("stage counts") {
  CHECK(kCosineInverseStages == 52);
  CHECK(CordicConfig{}.sqrt_iterations == kSquareRootStages);
}

TEST_CASE("config validation") {
  CordicConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.polar_iterations = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.sqrt_iterations = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.angle_format = QFormat::make(1, 15);  // max 1.99997 rad, still covers pi/2
  CHECK_NOTHROW(cfg.validate());
  cfg.angle_format = QFormat::make(1, 0);
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("one_minus_x_squared examples") {
  CHECK(one_minus_x_squared(element(0.0)).to_real() == 1.0);
  CHECK(one_minus_x_squared(element(1.0)).raw == 0);
  CHECK(std::abs(one_minus_x_squared(element(0.6)).to_real() - 0.64) <= 2 * kElementLsb);
  // Saturating subtraction when x > 1.
  CHECK(one_minus_x_squared(FxSample{0x9000, kElementFormat}).raw == 0);
}

TEST_CASE("cordic_sqrt examples") {
  CHECK(cordic_sqrt(element(0.0)).raw == 0);
  CHECK(std::abs(cordic_sqrt(element(1.0)).to_real() - 1.0) <= kElementLsb);
  CHECK(std::abs(cordic_sqrt(element(0.25)).to_real() - 0.5) <= 4 * kElementLsb);
}

TEST_CASE("property: cordic_sqrt within 4 LSB of quantized float sqrt on [0.03, 1]") {
  for (std::uint64_t raw = 0; raw <= 0x8000; raw += 7) {
    const FxSample x{raw, kElementFormat};
    const double err = std::abs(cordic_sqrt(x).to_real() - std::sqrt(x.to_real()));
    if (x.to_real() >= 0.03) {
      REQUIRE(err <= 4 * kElementLsb);
    }
    // Argument scaling keeps the small codes accurate too.
    REQUIRE(err <= kElementLsb);
  }
}

TEST_CASE("cordic_polar_angle examples") {
  const AngleSample zero = cordic_polar_angle(element(1.0), element(0.0));
  CHECK(zero.raw() == 0);
  CHECK_FALSE(zero.degenerate);
  const AngleSample right = cordic_polar_angle(element(0.0), element(1.0));
  CHECK(std::abs(right.radians() - std::numbers::pi / 2) <= 2 * kAngleLsb);
  const AngleSample diag = cordic_polar_angle(element(1.0), element(1.0));
  CHECK(std::abs(diag.radians() - std::numbers::pi / 4) <= 2 * kAngleLsb);

  const AngleSample none = cordic_polar_angle(element(0.0), element(0.0));
  CHECK(none.degenerate);
  CHECK(none.raw() == 0);
}

TEST_CASE("property: polar angle within residual rotation plus 2 LSB") {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<std::uint64_t> code(0, 0x8000);
  for (unsigned iterations : {11u, 16u}) {
    CordicConfig cfg;
    cfg.polar_iterations = iterations;
    // Unresolved rotation after the last micro-rotation, plus output rounding.
    const double bound = std::ldexp(1.0, -static_cast<int>(iterations - 1)) + 2 * kAngleLsb;
    for (int t = 0; t < 20000; ++t) {
      const FxSample u{code(rng), kElementFormat};
      const FxSample v{code(rng), kElementFormat};
      if (u.raw == 0 && v.raw == 0) continue;
      const AngleSample a = cordic_polar_angle(u, v, cfg);
      REQUIRE(std::abs(a.radians() - std::atan2(v.to_real(), u.to_real())) <= bound);
      REQUIRE(a.radians() <= std::numbers::pi / 2 + kAngleLsb);
    }
  }
}

TEST_CASE("cordic_arccos examples") {
  CHECK(cordic_arccos(element(1.0)).radians() <= 2 * kAngleLsb);
  CHECK(std::abs(cordic_arccos(element(0.0)).radians() - std::numbers::pi / 2) <= 2 * kAngleLsb);
  CHECK(std::abs(cordic_arccos(element(0.5)).radians() - 1.047198) <= 8 * kAngleLsb);
  // Saturated dot products above 1.0 clamp to angle 0.
  CHECK(cordic_arccos(FxSample{0xFFFF, kElementFormat}) == cordic_arccos(element(1.0)));
}

TEST_CASE("exhaustive arccos sweep against the golden ledger") {
  const ArccosCharacterization& c = default_sweep();
  REQUIRE(c.rows.size() == 0x8001);
  CHECK(c.rows.front().x == 0.0);
  CHECK(c.rows.back().x == 1.0);
  CHECK(std::abs(c.rows.back().error) <= 2 * kAngleLsb);
  CHECK(c.max_abs_error_outside_zone <= 8 * kAngleLsb);

  std::ifstream in(std::string(SIFTMATCH_GOLDEN_DIR) + "/cordic_arccos.json");
  REQUIRE(in.good());
  const auto golden = nlohmann::json::parse(in);
  CHECK(golden.at("polar_iterations").get<unsigned>() == CordicConfig{}.polar_iterations);
  CHECK(golden.at("sqrt_iterations").get<unsigned>() == CordicConfig{}.sqrt_iterations);
  CHECK(c.worst_x_raw == golden.at("worst_x_raw").get<std::uint64_t>());
  CHECK(c.max_abs_error_outside_zone / kAngleLsb ==
        doctest::Approx(golden.at("max_error_outside_zone_lsb").get<double>()).epsilon(1e-9));
  CHECK(c.max_abs_error_outside_zone / kAngleLsb <= golden.at("bound_lsb").get<double>());
  // Bit-level determinism of every output code.
  CHECK(fnv1a(c.rows) == std::stoull(golden.at("angle_raw_fnv1a").get<std::string>(), nullptr, 16));
}

TEST_CASE("property: arccos preserves ordering beyond twice the measured bound") {
  const ArccosCharacterization& c = default_sweep();
  const double gap = 2 * c.max_abs_error_outside_zone;
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<std::size_t> idx(0, c.rows.size() - 1);
  for (int t = 0; t < 200000; ++t) {
    std::size_t i = idx(rng), j = idx(rng);
    if (i > j) std::swap(i, j);
    if (c.rows[i].x < c.exclusion_limit) continue;
    if (c.rows[i].reference - c.rows[j].reference > gap) {
      REQUIRE(c.rows[i].angle_raw > c.rows[j].angle_raw);
    }
  }
  // Non-increasing up to one-LSB plateaus.
  for (std::size_t i = 1; i < c.rows.size(); ++i) {
    REQUIRE(c.rows[i].angle_raw <= c.rows[i - 1].angle_raw + 1);
  }
}

TEST_CASE("characterization is deterministic") {
  const ArccosCharacterization again = characterize_arccos();
  CHECK(fnv1a(again.rows) == fnv1a(default_sweep().rows));
}

}  // TEST_SUITE

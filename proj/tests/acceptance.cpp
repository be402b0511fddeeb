// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "siftmatch/agreement.hpp"
#include "siftmatch/cordic.hpp"
#include "siftmatch/descriptor.hpp"
#include "siftmatch/pipeline.hpp"
#include "siftmatch/reference_matcher.hpp"
#include "siftmatch/roofline.hpp"

using namespace siftmatch;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

DescriptorSet first(const DescriptorSet& s, std::size_t n) {
  DescriptorSet out;
  out.descriptors.assign(s.descriptors.begin(), s.descriptors.begin() + static_cast<std::ptrdiff_t>(n));
  return out;
}

// 1. Elapsed time at 100 MHz within 1.5% of the target times.
Outcome timing_reproduction() {
  const std::size_t ms[] = {579, 638, 882, 1021};
  const double target_ms[] = {6.08, 6.75, 9.11, 10.46};
  const PipelineConfig cfg;
  const SyntheticPair q = generate_synthetic({1021, 101, 0.5, 0.02});
  const SyntheticPair d = generate_synthetic({1021, 102, 0.5, 0.02});
  Outcome o{true, ""};
  for (int i = 0; i < 4; ++i) {
    const std::uint64_t predicted = predict_cycles(ms[i], 1021, cfg);
    const RunReport run = run_pipeline(first(q.queries, ms[i]), d.database, cfg);
    const double elapsed_ms = run.elapsed_seconds * 1e3;
    const double rel = (elapsed_ms - target_ms[i]) / target_ms[i];
    o.pass = o.pass && run.total_cycles == predicted && std::abs(rel) <= 0.015;
    o.detail += fmt("m=%zu: %llu cycles %.4f ms (%+.2f%% vs %.2f); ", ms[i],
                    static_cast<unsigned long long>(run.total_cycles), elapsed_ms, 100 * rel,
                    target_ms[i]);
  }
  return o;
}

// 2. Roofline points.
Outcome roofline_points() {
  const double r32 = attainable_throughput(3.2e9).attainable_ops_per_s;
  const double r64 = attainable_throughput(6.4e9).attainable_ops_per_s;
  const double r256 = attainable_throughput(25.6e9).attainable_ops_per_s;
  const double r512 = attainable_throughput(51.2e9).attainable_ops_per_s;
  const bool pass = r32 == 12.5e6 && r64 == 25e6 && r256 == 100e6 && r512 == 100e6;
  return {pass, fmt("3.2 GB/s -> %.6g, 6.4 GB/s -> %.6g (ceiling model; 24e6 is not reachable), "
                    "25.6 GB/s -> %.6g, 51.2 GB/s -> %.6g op/s",
                    r32, r64, r256, r512)};
}

// 3. Pipeline (exact 0.6 comparator) against the float reference.
Outcome fixed_vs_float() {
  PipelineConfig cfg;
  cfg.threshold_mode = ThresholdMode::exact_0_6;
  std::size_t total = 0, agreeing = 0, outside = 0;
  double worst_seed = 1.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const SyntheticPair p = generate_synthetic({500, seed, 0.5, 0.02});
    const auto ref = match_all(p.queries, p.database, kDefaultThreshold);
    const RunReport run = run_pipeline(p.queries, p.database, cfg);
    const AgreementReport rep = compare_results(ref, run.matches, 0.6, 0.6);
    total += rep.total;
    agreeing += rep.agreeing;
    worst_seed = std::min(worst_seed, rep.fraction());
    for (const auto& d : rep.disagreements) outside += d.within_bound ? 0 : 1;
  }
  const double fraction = static_cast<double>(agreeing) / static_cast<double>(total);
  return {fraction >= 0.98 && outside == 0,
          fmt("agreement %.4f%% (%zu/%zu, worst seed %.2f%%), disagreements outside bound: %zu",
              100 * fraction, agreeing, total, 100 * worst_seed, outside)};
}

// 4. Streaming two-minimum against a full sort.
Outcome streaming_min() {
  std::mt19937_64 rng(4);
  std::size_t failures = 0;
  for (int t = 0; t < 10000; ++t) {
    const std::size_t len = 2 + rng() % 199;
    const std::uint64_t range = 1 + rng() % 0xFFFF;
    std::vector<std::uint64_t> v(len);
    for (auto& x : v) x = rng() % range;
    MinPairEntry e = MinPairEntry::sentinel();
    for (std::size_t j = 0; j < len; ++j) e = min_find(AngleSample{FxSample{v[j], kAngleFormat}, false}, j, e);
    std::sort(v.begin(), v.end());
    failures += (e.min.raw() != v[0] || e.second_min.raw() != v[1]) ? 1 : 0;
  }
  return {failures == 0, fmt("10000 lists, %zu mismatches", failures)};
}

// 5. Exhaustive arccos sweep and ordering preservation.
Outcome cordic_accuracy() {
  const ArccosCharacterization c = characterize_arccos();
  const double lsb = std::ldexp(1.0, -kAngleFormat.fraction_bits);
  const double bound = c.max_abs_error_outside_zone;
  const double gap = 2 * bound;
  // Rows run from x = 0 (largest angle) to x = 1. For every i outside the
  // exclusion zone, all j with reference_j < reference_i - gap form a suffix;
  // ordering holds iff angle_i exceeds the suffix maximum.
  const auto& rows = c.rows;
  std::vector<std::uint64_t> suffix_max(rows.size() + 1, 0);
  for (std::size_t i = rows.size(); i-- > 0;) suffix_max[i] = std::max(suffix_max[i + 1], rows[i].angle_raw);
  std::size_t violations = 0;
  std::size_t j = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].x < c.exclusion_limit) continue;
    j = std::max(j, i + 1);
    while (j < rows.size() && !(rows[i].reference - rows[j].reference > gap)) ++j;
    if (j < rows.size() && rows[i].angle_raw <= suffix_max[j]) ++violations;
  }
  return {bound <= 8 * lsb && violations == 0,
          fmt("max error outside x<2^-8: %.3f LSB (limit 8) at x_raw=%llu; whole domain %.3f LSB; "
              "ordering violations beyond 2x bound: %zu",
              bound / lsb, static_cast<unsigned long long>(c.worst_x_raw), c.max_abs_error / lsb, violations)};
}

// 6. Closed form against the simulated cycle count.
Outcome cycle_identity() {
  const std::size_t sizes[] = {1, 2, 3, 4, 5, 32, 33, 34, 100};
  DescriptorSet pool;
  {
    const SyntheticPair p = generate_synthetic({100, 6, 0.0, 0.0});
    pool = p.database;
  }
  std::size_t mismatches = 0, cases = 0;
  for (std::size_t m : sizes) {
    for (std::size_t n : sizes) {
      ++cases;
      if (run_pipeline(first(pool, m), first(pool, n)).total_cycles != predict_cycles(m, n)) ++mismatches;
    }
  }
  return {mismatches == 0, fmt("%zu (m, n) pairs, %zu mismatches", cases, mismatches)};
}

// 7. Comparator modes differ only for ratios in [19/32, 0.6).
Outcome threshold_modes() {
  std::mt19937_64 rng(7);
  std::size_t differing = 0, outside = 0;
  for (int t = 0; t < 1000000; ++t) {
    const std::uint64_t s = rng() % 0x10000;
    const std::uint64_t m = rng() % (s + 1);
    MinPairEntry e;
    e.min = AngleSample{FxSample{m, kAngleFormat}, false};
    e.second_min = AngleSample{FxSample{s, kAngleFormat}, false};
    e.init_flag = false;
    if (match_check(e, ThresholdMode::exact_0_6) != match_check(e, ThresholdMode::binary_10011)) {
      ++differing;
      // Exact rational test: 19/32 <= m/s < 3/5.
      if (!(32 * m >= 19 * s && 5 * m < 3 * s)) ++outside;
    }
  }
  return {outside == 0 && differing > 0,
          fmt("1000000 entries, %zu differing verdicts, %zu outside the band", differing, outside)};
}

// 8. Reference self-matching on a set of distinct descriptors.
Outcome self_matching() {
  const SyntheticPair p = generate_synthetic({1021, 8, 0.0, 0.0});
  std::set<Descriptor::RawElements> distinct;
  for (const auto& d : p.database.descriptors) distinct.insert(d.raw());
  const auto results = match_all(p.database, p.database, kDefaultThreshold);
  std::size_t wrong = 0;
  for (std::size_t k = 0; k < results.size(); ++k) wrong += results[k].best_index == k ? 0 : 1;
  return {distinct.size() == p.database.size() && wrong == 0,
          fmt("%zu distinct descriptors, %zu with best_index != own index", distinct.size(), wrong)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> check;
  };
  const Criterion criteria[] = {
      {1, "timing reproduction", timing_reproduction},
      {2, "roofline points", roofline_points},
      {3, "fixed-vs-float agreement", fixed_vs_float},
      {4, "streaming-min oracle", streaming_min},
      {5, "CORDIC accuracy", cordic_accuracy},
      {6, "cycle-model identity", cycle_identity},
      {7, "threshold-mode bound", threshold_modes},
      {8, "self-matching", self_matching},
  };
  bool all = true;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %d (%s): %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}

#include "siftmatch/agreement.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "siftmatch/descriptor.hpp"

namespace siftmatch {

double dot_quantization_bound() {
  const double element_error = std::ldexp(1.0, -(kElementFormat.fraction_bits + 1));
  const double n = static_cast<double>(kDescriptorLength);
  return 2.0 * std::sqrt(n) * element_error + n * element_error * element_error + element_error;
}

double default_cordic_bound() { return std::ldexp(8.0, -kAngleFormat.fraction_bits); }

double angle_quantization_bound(double theta, double cordic_bound) {
  const double c = std::cos(theta);
  const double e = dot_quantization_bound();
  const double hi = std::acos(std::clamp(c - e, 0.0, 1.0));
  const double lo = std::acos(std::clamp(c + e, 0.0, 1.0));
  return std::max(hi - theta, theta - lo) + cordic_bound;
}

bool AgreementReport::all_within_bound() const {
  return std::all_of(disagreements.begin(), disagreements.end(),
                     [](const Disagreement& d) { return d.within_bound; });
}

AgreementReport compare_results(std::span<const MatchResult> reference,
                                std::span<const MatchResult> candidate, double threshold_low,
                                double threshold_high, double cordic_bound) {
  if (reference.size() != candidate.size()) {
    throw std::invalid_argument("compare_results: result lists differ in length (" +
                                std::to_string(reference.size()) + " vs " +
                                std::to_string(candidate.size()) + ")");
  }
  AgreementReport report;
  report.total = reference.size();
  for (std::size_t k = 0; k < reference.size(); ++k) {
    const MatchResult& r = reference[k];
    const MatchResult& c = candidate[k];
    const bool same_verdict = r.matched == c.matched;
    const bool same_best = !(r.matched && c.matched) || r.best_index == c.best_index;
    if (same_verdict && same_best) {
      ++report.agreeing;
      continue;
    }

    Disagreement d;
    d.query_index = k;
    d.reference_matched = r.matched;
    d.candidate_matched = c.matched;
    d.reference_best = r.best_index;
    d.candidate_best = c.best_index;

    const double t1 = r.min_angle;
    const double t2 = std::min(r.second_min_angle, std::numbers::pi);
    const double e1 = angle_quantization_bound(t1, cordic_bound);
    const double e2 = angle_quantization_bound(t2, cordic_bound);
    d.reference_ratio = t2 > 0.0 ? t1 / t2 : 1.0;
    const double ratio_lo = std::max(0.0, t1 - e1) / (t2 + e2);
    const double ratio_hi = t2 - e2 > 0.0 ? (t1 + e1) / (t2 - e2) : HUGE_VAL;
    d.ratio_bound = std::max(d.reference_ratio - ratio_lo, ratio_hi - d.reference_ratio);
    const double nearest = d.reference_ratio < threshold_low    ? threshold_low
                           : d.reference_ratio > threshold_high ? threshold_high
                                                                : d.reference_ratio;
    d.ratio_margin = d.reference_ratio - nearest;

    const bool flip_reachable = ratio_lo <= threshold_high && ratio_hi >= threshold_low;
    const bool swap_reachable = t2 - t1 <= e1 + e2;
    d.within_bound = same_verdict ? swap_reachable : flip_reachable;
    report.disagreements.push_back(d);
  }
  return report;
}

}  // namespace siftmatch

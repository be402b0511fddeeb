#include "siftmatch/reference_matcher.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace siftmatch {

double dot_product(const Descriptor& a, const Descriptor& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < kDescriptorLength; ++i) sum += a.real()[i] * b.real()[i];
  return sum;
}

double angular_distance(const Descriptor& a, const Descriptor& b) {
  return std::acos(std::clamp(dot_product(a, b), 0.0, 1.0));
}

MatchResult match_one(const Descriptor& query, const DescriptorSet& db, double threshold,
                      std::size_t query_index) {
  if (db.empty()) throw std::invalid_argument("match_one: database is empty");
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw std::invalid_argument("match_one: threshold must be in (0, 1]");
  }

  std::vector<double> angles(db.size());
  for (std::size_t j = 0; j < db.size(); ++j) angles[j] = angular_distance(query, db[j]);

  std::vector<std::size_t> order(db.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t l, std::size_t r) { return angles[l] < angles[r]; });

  MatchResult r;
  r.query_index = query_index;
  r.query_xy = query.location();
  r.best_index = order[0];
  r.best_xy = db[order[0]].location();
  r.min_angle = angles[order[0]];
  r.second_min_angle = db.size() > 1 ? angles[order[1]] : kSingleEntrySecondMin;
  r.matched = r.min_angle < threshold * r.second_min_angle;
  return r;
}

std::vector<MatchResult> match_all(const DescriptorSet& queries, const DescriptorSet& db,
                                   double threshold, unsigned threads) {
  std::vector<MatchResult> results(queries.size());
  if (queries.empty()) return results;
  if (db.empty()) throw std::invalid_argument("match_all: database is empty");

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, queries.size()));

  auto run_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) results[k] = match_one(queries[k], db, threshold, k);
  };
  if (threads <= 1) {
    run_range(0, queries.size());
    return results;
  }

  // Each worker owns a contiguous slice of `results`.
  std::vector<std::jthread> workers;
  std::vector<std::exception_ptr> errors(threads);
  const std::size_t chunk = (queries.size() + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(queries.size(), begin + chunk);
    workers.emplace_back([&, t, begin, end] {
      try {
        run_range(begin, end);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  workers.clear();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

}  // namespace siftmatch

#include "siftmatch/pipeline.hpp"

#include <array>
#include <optional>
#include <stdexcept>
#include <string>

namespace siftmatch {

std::string_view to_string(ThresholdMode mode) {
  return mode == ThresholdMode::exact_0_6 ? "exact_0_6" : "binary_10011";
}

ThresholdMode threshold_mode_from_string(std::string_view name) {
  if (name == "exact_0_6") return ThresholdMode::exact_0_6;
  if (name == "binary_10011") return ThresholdMode::binary_10011;
  throw std::invalid_argument("unknown threshold mode '" + std::string(name) + "'");
}

void PipelineConfig::validate() const {
  if (block_size < 1) throw std::invalid_argument("PipelineConfig: block_size must be >= 1");
  if (fetch_cycles_per_descriptor < 1) {
    throw std::invalid_argument("PipelineConfig: fetch_cycles_per_descriptor must be >= 1");
  }
  if (dot_product_stages < 1 || cosine_stages < 1 || min_find_stages < 1 ||
      match_check_stages < 1) {
    throw std::invalid_argument("PipelineConfig: stage counts must be >= 1");
  }
  if (!(clock_hz > 0.0)) throw std::invalid_argument("PipelineConfig: clock_hz must be > 0");
  cordic.validate();
}

MinPairEntry MinPairEntry::sentinel(QFormat angle_format) {
  const AngleSample top{FxSample{angle_format.max_raw(), angle_format}, false};
  return MinPairEntry{top, top, 0, true};
}

FxSample dot_product_core(const Descriptor& a, const Descriptor& b) {
  std::array<FxSample, kDescriptorLength> level;
  for (std::size_t i = 0; i < kDescriptorLength; ++i) level[i] = fx_mul(a.element(i), b.element(i));
  // log2(128) = 7 adder levels, each one bit wider than the last.
  for (std::size_t width = kDescriptorLength / 2; width >= 1; width /= 2) {
    for (std::size_t j = 0; j < width; ++j) level[j] = fx_add(level[2 * j], level[2 * j + 1]);
  }
  return fx_resize(level[0], kElementFormat);
}

MinPairEntry min_find(const AngleSample& current, std::size_t current_index,
                      const MinPairEntry& prev) {
  MinPairEntry next = prev;
  next.init_flag = false;
  if (current.raw() < prev.min.raw()) {
    next.min = current;
    next.second_min = prev.min;
    next.min_index = current_index;
  } else if (current.raw() < prev.second_min.raw()) {
    next.second_min = current;
  }
  return next;
}

bool match_check(const MinPairEntry& entry, ThresholdMode mode) {
  if (entry.init_flag) return false;
  const std::uint64_t m = entry.min.raw();
  const std::uint64_t s = entry.second_min.raw();
  if (mode == ThresholdMode::binary_10011) {
    // second_min * 10011b = (s << 4) + (s << 1) + s, against min * 100000b.
    return (m << 5) < (s << 4) + (s << 1) + s;
  }
  // min < (3/5) * second_min without rounding.
  return 5 * m < 3 * s;
}

namespace {

// A (query slot, database descriptor) pair travelling through the datapath.
struct Token {
  std::size_t slot = 0;
  std::size_t query_index = 0;
  std::size_t db_index = 0;
  FxSample dot{};
  AngleSample angle{};
  std::optional<MinPairEntry> final_entry;  // set after the last database descriptor
};

class MatchingCore {
 public:
  MatchingCore(const DescriptorSet& queries, const DescriptorSet& db, const PipelineConfig& cfg)
      : queries_(queries),
        db_(db),
        cfg_(cfg),
        depth_(cfg.latency() + 1),
        period_(cfg.cycles_per_database_descriptor()),
        window_(db.size() * cfg.cycles_per_database_descriptor()),
        blocks_((queries.size() + cfg.block_size - 1) / cfg.block_size),
        line_(depth_),
        des_mem_(cfg.block_size),
        min_mem_(cfg.block_size, MinPairEntry::sentinel(cfg.cordic.angle_format)),
        results_(queries.size()) {}

  RunReport run() {
    start_fetch(0);
    for (;; ++cycle_) {
      control();
      line_[cycle_ % depth_] = issue();
      advance();
      if (done_issuing_ && cycle_ == last_slot_cycle_ + depth_ - 1) break;
    }

    RunReport report;
    report.total_cycles = cycle_ + 1;
    report.clock_hz = cfg_.clock_hz;
    report.elapsed_seconds = static_cast<double>(report.total_cycles) / cfg_.clock_hz;
    report.blocks_processed = blocks_;
    report.dot_products_executed = dot_products_;
    report.issue_slots = issue_slots_;
    report.stall_cycles = stall_cycles_;
    report.matches = std::move(results_);
    return report;
  }

 private:
  // DES_MEM refill into the shadow buffer, finishing F_blk cycles later.
  void start_fetch(std::uint64_t now) { fetch_done_cycle_ = now + cfg_.block_fetch_cycles(); }

  // Control unit: swaps in a fetched block once the current one has streamed
  // the whole database, then starts the next refill.
  void control() {
    if (done_issuing_ || in_window()) return;
    if (active_block_ + 1 == blocks_ && window_started_) {
      done_issuing_ = true;
      return;
    }
    if (cycle_ < fetch_done_cycle_) {
      if (window_started_) ++stall_cycles_;
      return;
    }
    active_block_ = window_started_ ? active_block_ + 1 : 0;
    window_started_ = true;
    window_start_ = cycle_;
    const std::size_t base = active_block_ * cfg_.block_size;
    for (std::size_t s = 0; s < cfg_.block_size; ++s) {
      des_mem_[s] = base + s < queries_.size() ? std::optional<std::size_t>(base + s) : std::nullopt;
    }
    if (active_block_ + 1 < blocks_) start_fetch(cycle_);
  }

  bool in_window() const { return window_started_ && cycle_ < window_start_ + window_; }

  std::optional<Token> issue() {
    if (!in_window()) return std::nullopt;
    const std::uint64_t offset = cycle_ - window_start_;
    last_slot_cycle_ = cycle_;
    const std::size_t db_index = offset / period_;
    const std::size_t slot = offset % period_;
    if (slot >= cfg_.block_size) return std::nullopt;  // waiting on the next Register load
    ++issue_slots_;
    if (!des_mem_[slot]) return std::nullopt;  // vacant slot of a partial block
    ++dot_products_;
    return Token{slot, *des_mem_[slot], db_index, {}, {}, std::nullopt};
  }

  std::optional<Token>* at_age(unsigned age) {
    if (cycle_ < age) return nullptr;
    auto& cell = line_[(cycle_ - age) % depth_];
    return cell ? &cell : nullptr;
  }

  // Applies the work of every stage boundary reached this cycle.
  void advance() {
    // Age 0 is the DES_MEM / Register operand read; the stages follow it.
    const unsigned dot_done = cfg_.dot_product_stages;
    const unsigned cosine_done = dot_done + cfg_.cosine_stages;
    const unsigned min_done = cosine_done + cfg_.min_find_stages;
    const unsigned check_done = depth_ - 1;

    if (auto* t = at_age(dot_done)) {
      Token& tok = **t;
      tok.dot = dot_product_core(queries_[tok.query_index], db_[tok.db_index]);
    }
    if (auto* t = at_age(cosine_done)) {
      Token& tok = **t;
      tok.angle = cordic_arccos(tok.dot, cfg_.cordic);
    }
    if (auto* t = at_age(min_done)) {
      Token& tok = **t;
      // The multiplexer feeds sentinels instead of MIN_MEM for the first
      // database descriptor of every block.
      const MinPairEntry prev = tok.db_index == 0
                                    ? MinPairEntry::sentinel(cfg_.cordic.angle_format)
                                    : min_mem_[tok.slot];
      min_mem_[tok.slot] = min_find(tok.angle, tok.db_index, prev);
      if (tok.db_index + 1 == db_.size()) tok.final_entry = min_mem_[tok.slot];
    }
    if (auto* t = at_age(check_done)) {
      Token& tok = **t;
      if (tok.final_entry) emit(tok);
    }
  }

  void emit(const Token& tok) {
    const MinPairEntry& e = *tok.final_entry;
    MatchResult& r = results_[tok.query_index];
    r.query_index = tok.query_index;
    r.query_xy = queries_[tok.query_index].location();
    r.best_index = e.min_index;
    r.best_xy = db_[e.min_index].location();
    r.min_angle = e.min.radians();
    r.second_min_angle = e.second_min.radians();
    r.min_raw = static_cast<std::uint16_t>(e.min.raw());
    r.second_min_raw = static_cast<std::uint16_t>(e.second_min.raw());
    r.matched = match_check(e, cfg_.threshold_mode);
  }

  const DescriptorSet& queries_;
  const DescriptorSet& db_;
  const PipelineConfig& cfg_;
  const unsigned depth_;
  const std::size_t period_;
  const std::uint64_t window_;
  const std::size_t blocks_;

  std::vector<std::optional<Token>> line_;             // datapath shift register
  std::vector<std::optional<std::size_t>> des_mem_;    // query index per slot
  std::vector<MinPairEntry> min_mem_;
  std::vector<MatchResult> results_;

  std::uint64_t cycle_ = 0;
  std::size_t active_block_ = 0;
  std::uint64_t fetch_done_cycle_ = 0;
  bool window_started_ = false;
  std::uint64_t window_start_ = 0;
  std::uint64_t last_slot_cycle_ = 0;
  bool done_issuing_ = false;

  std::uint64_t dot_products_ = 0;
  std::uint64_t issue_slots_ = 0;
  std::uint64_t stall_cycles_ = 0;
};

}  // namespace

RunReport run_pipeline(const DescriptorSet& queries, const DescriptorSet& db,
                       const PipelineConfig& cfg) {
  cfg.validate();
  if (queries.empty()) throw std::invalid_argument("run_pipeline: query set is empty");
  if (db.empty()) throw std::invalid_argument("run_pipeline: database set is empty");
  if (cfg.cordic.angle_format.width() > 16) {
    throw std::invalid_argument("run_pipeline: angle format wider than 16 bits");
  }
  return MatchingCore(queries, db, cfg).run();
}

std::uint64_t predict_cycles(std::size_t m, std::size_t n, const PipelineConfig& cfg) {
  cfg.validate();
  if (m == 0 || n == 0) throw std::invalid_argument("predict_cycles: m and n must be >= 1");
  const std::uint64_t blocks = (m + cfg.block_size - 1) / cfg.block_size;
  const std::uint64_t fill = cfg.block_fetch_cycles();
  const std::uint64_t window = static_cast<std::uint64_t>(n) * cfg.cycles_per_database_descriptor();
  const std::uint64_t spacing = window > fill ? window : fill;
  return fill + (blocks - 1) * spacing + window + cfg.latency();
}

}  // namespace siftmatch

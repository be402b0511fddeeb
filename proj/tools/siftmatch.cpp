// siftmatch: command-line front end for the descriptor matching models.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "siftmatch/agreement.hpp"
#include "siftmatch/cordic.hpp"
#include "siftmatch/descriptor.hpp"
#include "siftmatch/errors.hpp"
#include "siftmatch/pipeline.hpp"
#include "siftmatch/reference_matcher.hpp"
#include "siftmatch/report.hpp"
#include "siftmatch/roofline.hpp"

namespace {

using namespace siftmatch;

enum ExitCode { kOk = 0, kUsage = 2, kIo = 3, kFormat = 4, kInput = 5 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Writes to the named file, or stdout when the name is empty or "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_.open(path, std::ios::binary);
    if (!file_) throw IoError("cannot open '" + path + "' for writing");
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

LoadOptions load_options() {
  LoadOptions opts;
  opts.on_warning = [](const std::string& w) { std::cerr << "warning: " << w << '\n'; };
  return opts;
}

// Ratio actually applied by an engine's comparator.
double effective_threshold(Engine engine, double threshold, ThresholdMode mode) {
  if (engine == Engine::reference) return threshold;
  return mode == ThresholdMode::binary_10011 ? 19.0 / 32.0 : 0.6;
}

struct GenerateArgs {
  std::size_t m = 100;
  std::optional<std::size_t> n;
  std::uint64_t seed = 1;
  double match_fraction = 0.5;
  double noise = 0.02;
  std::string prefix = "synthetic";
  std::string format = "binary";
};

int cmd_generate(const GenerateArgs& a) {
  const std::size_t n = a.n.value_or(a.m);
  if (a.m == 0 || n == 0) throw UsageError("-m and -n must be >= 1");
  SyntheticPair p = generate_synthetic({std::max(a.m, n), a.seed, a.match_fraction, a.noise});
  // Unequal sizes: trim both sets and keep the planted pairs that survive.
  p.queries.descriptors.resize(a.m);
  p.database.descriptors.resize(n);
  std::erase_if(p.ground_truth, [&](const auto& t) { return t.first >= a.m || t.second >= n; });
  const DescriptorFormat fmt = a.format == "text" ? DescriptorFormat::text : DescriptorFormat::binary;
  const std::string ext = fmt == DescriptorFormat::text ? ".siftd" : ".siftdb";
  save_descriptor_set(p.queries, a.prefix + "_queries" + ext, fmt);
  save_descriptor_set(p.database, a.prefix + "_database" + ext, fmt);
  Output truth(a.prefix + "_truth.csv");
  write_ground_truth_csv(truth.stream(), p.ground_truth);
  return kOk;
}

struct MatchArgs {
  std::string queries;
  std::string database;
  std::string engine = "pipeline";
  std::optional<double> threshold;
  std::string threshold_mode = "binary_10011";
  double clock_hz = 100e6;
  std::size_t block_size = 33;
  unsigned threads = 1;
  std::string format = "json";
  std::string output;
};

MatchReport run_match(const MatchArgs& a) {
  MatchReport report;
  report.engine = engine_from_string(a.engine);
  report.queries = a.queries;
  report.database = a.database;
  report.threshold = a.threshold.value_or(kDefaultThreshold);
  if (report.engine == Engine::pipeline && a.threshold && *a.threshold != kDefaultThreshold) {
    throw UsageError("--threshold is fixed at 0.6 for the pipeline engine; use --threshold-mode");
  }
  const DescriptorSet q = load_descriptor_set(a.queries, load_options());
  const DescriptorSet d = load_descriptor_set(a.database, load_options());
  if (report.engine == Engine::reference) {
    report.matches = match_all(q, d, report.threshold, a.threads);
  } else {
    PipelineConfig cfg;
    cfg.clock_hz = a.clock_hz;
    cfg.block_size = a.block_size;
    cfg.threshold_mode = threshold_mode_from_string(a.threshold_mode);
    report.pipeline = cfg;
    report.run = run_pipeline(q, d, cfg);
    report.matches = report.run->matches;
  }
  return report;
}

int cmd_match(const MatchArgs& a) {
  const MatchReport report = run_match(a);
  Output out(a.output);
  if (a.format == "csv") {
    write_matches_csv(out.stream(), report.matches);
  } else {
    out.stream() << to_json(report).dump(2) << '\n';
  }
  return kOk;
}

struct CompareArgs {
  std::string queries;
  std::string database;
  std::string reference_report;
  std::string candidate_report;
  std::string threshold_mode = "exact_0_6";
  std::string output;
};

struct LoadedReport {
  MatchReport report;
  double threshold = kDefaultThreshold;
};

LoadedReport load_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw FormatError("'" + path + "' is not JSON: " + e.what());
  }
  LoadedReport r{match_report_from_json(j), kDefaultThreshold};
  ThresholdMode mode = ThresholdMode::binary_10011;
  if (j.contains("pipeline_config")) {
    mode = threshold_mode_from_string(j["pipeline_config"].value("threshold_mode", "binary_10011"));
  }
  r.threshold = effective_threshold(r.report.engine, r.report.threshold, mode);
  return r;
}

int cmd_compare(const CompareArgs& a) {
  const bool from_reports = !a.reference_report.empty() || !a.candidate_report.empty();
  const bool from_sets = !a.queries.empty() || !a.database.empty();
  if (from_reports == from_sets) {
    throw UsageError("give either --reference/--candidate reports or -q/-d descriptor files");
  }
  std::vector<MatchResult> ref, cand;
  double lo = 0.0, hi = 0.0;
  if (from_reports) {
    if (a.reference_report.empty() || a.candidate_report.empty()) {
      throw UsageError("both --reference and --candidate are required");
    }
    const LoadedReport r = load_report(a.reference_report);
    const LoadedReport c = load_report(a.candidate_report);
    if (r.report.matches.size() != c.report.matches.size()) {
      throw std::invalid_argument("reports differ in query count (" +
                                  std::to_string(r.report.matches.size()) + " vs " +
                                  std::to_string(c.report.matches.size()) + ")");
    }
    ref = r.report.matches;
    cand = c.report.matches;
    lo = std::min(r.threshold, c.threshold);
    hi = std::max(r.threshold, c.threshold);
  } else {
    if (a.queries.empty() || a.database.empty()) throw UsageError("both -q and -d are required");
    const DescriptorSet q = load_descriptor_set(a.queries, load_options());
    const DescriptorSet d = load_descriptor_set(a.database, load_options());
    PipelineConfig cfg;
    cfg.threshold_mode = threshold_mode_from_string(a.threshold_mode);
    ref = match_all(q, d, kDefaultThreshold);
    cand = run_pipeline(q, d, cfg).matches;
    const double t = effective_threshold(Engine::pipeline, kDefaultThreshold, cfg.threshold_mode);
    lo = std::min(t, kDefaultThreshold);
    hi = std::max(t, kDefaultThreshold);
  }
  const AgreementReport rep = compare_results(ref, cand, lo, hi);
  Output out(a.output);
  out.stream() << to_json(rep).dump(2) << '\n';
  return kOk;
}

struct CharacterizeArgs {
  unsigned sqrt_iterations = 37;
  unsigned polar_iterations = 16;
  std::string output;
};

int cmd_characterize(const CharacterizeArgs& a) {
  CordicConfig cfg;
  cfg.sqrt_iterations = a.sqrt_iterations;
  cfg.polar_iterations = a.polar_iterations;
  const ArccosCharacterization c = characterize_arccos(cfg);
  Output out(a.output);
  write_characterization_csv(out.stream(), c);
  const double lsb = std::ldexp(1.0, -cfg.angle_format.fraction_bits);
  char line[160];
  std::snprintf(line, sizeof line,
                "max_error_lsb=%.4f max_error_outside_zone_lsb=%.4f worst_x_raw=%llu exclusion=%g",
                c.max_abs_error / lsb, c.max_abs_error_outside_zone / lsb,
                static_cast<unsigned long long>(c.worst_x_raw), c.exclusion_limit);
  std::cerr << line << '\n';
  return kOk;
}

struct RooflineArgs {
  std::vector<double> bandwidths;
  std::vector<double> range;
  double clock_hz = 100e6;
  std::size_t descriptor_bytes = 256;
  std::string output;
};

int cmd_roofline(const RooflineArgs& a) {
  std::vector<double> bw = a.bandwidths;
  if (!a.range.empty()) {
    const double start = a.range[0], stop = a.range[1], count = a.range[2];
    if (count < 1 || count != std::floor(count) || stop < start) {
      throw UsageError("--range expects START STOP COUNT with START <= STOP and COUNT >= 1");
    }
    const auto n = static_cast<std::size_t>(count);
    for (std::size_t i = 0; i < n; ++i) {
      bw.push_back(n == 1 ? start : start + (stop - start) * static_cast<double>(i) / static_cast<double>(n - 1));
    }
  }
  if (bw.empty()) throw UsageError("no bandwidths given; use --bandwidth or --range");
  RooflineConfig cfg;
  cfg.clock_hz = a.clock_hz;
  cfg.descriptor_bytes = a.descriptor_bytes;
  const auto points = roofline_sweep(cfg, bw);
  Output out(a.output);
  write_roofline_csv(out.stream(), points);
  return kOk;
}

struct BenchArgs {
  std::size_t m = 579;
  std::size_t n = 1021;
  std::uint64_t seed = 1;
  std::string output;
};

int cmd_bench(const BenchArgs& a) {
  if (a.m == 0 || a.n == 0) throw UsageError("-m and -n must be >= 1");
  const SyntheticPair q = generate_synthetic({a.m, a.seed, 0.5, 0.02});
  const SyntheticPair d = generate_synthetic({a.n, a.seed + 1, 0.5, 0.02});
  using Clock = std::chrono::steady_clock;
  const PipelineConfig cfg;

  const auto t0 = Clock::now();
  const RunReport run = run_pipeline(q.queries, d.database, cfg);
  const auto t1 = Clock::now();
  const auto ref = match_all(q.queries, d.database, kDefaultThreshold);
  const auto t2 = Clock::now();

  const auto ms = [](auto d) { return std::chrono::duration<double, std::milli>(d).count(); };
  Json j;
  j["m"] = a.m;
  j["n"] = a.n;
  j["total_cycles"] = run.total_cycles;
  j["predicted_cycles"] = predict_cycles(a.m, a.n, cfg);
  j["modeled_ms"] = run.elapsed_seconds * 1e3;
  j["pipeline_wall_ms"] = ms(t1 - t0);
  j["reference_wall_ms"] = ms(t2 - t1);
  j["reference_matched"] = std::count_if(ref.begin(), ref.end(), [](const auto& r) { return r.matched; });
  j["pipeline_matched"] =
      std::count_if(run.matches.begin(), run.matches.end(), [](const auto& r) { return r.matched; });
  Output out(a.output);
  out.stream() << j.dump(2) << '\n';
  return kOk;
}

int fail(const char* category, const std::string& msg, int code) {
  std::cerr << "error: " << category << ": " << msg << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SIFT descriptor matching: reference matcher, fixed-point pipeline model, "
               "CORDIC characterization and roofline model"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "siftmatch 1.0");

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write a synthetic query/database pair and its ground truth");
  generate->add_option("-m,--count", gen.m, "Query descriptors")->required();
  generate->add_option("-n,--database-count", gen.n, "Database descriptors (default: same as -m)");
  generate->add_option("--seed", gen.seed, "RNG seed");
  generate->add_option("--match-fraction", gen.match_fraction, "Fraction of queries with a planted match")
      ->check(CLI::Range(0.0, 1.0));
  generate->add_option("--noise", gen.noise, "Gaussian noise sigma on planted copies")
      ->check(CLI::NonNegativeNumber);
  generate->add_option("-o,--prefix", gen.prefix, "Output prefix: <p>_queries, <p>_database, <p>_truth.csv");
  generate->add_option("--format", gen.format, "Descriptor file format")
      ->check(CLI::IsMember({"binary", "text"}));

  MatchArgs match;
  auto* match_cmd = app.add_subcommand("match", "Match a query set against a database");
  match_cmd->add_option("-q,--queries", match.queries, "Query descriptor file")->required();
  match_cmd->add_option("-d,--database", match.database, "Database descriptor file")->required();
  match_cmd->add_option("--engine", match.engine)->check(CLI::IsMember({"reference", "pipeline"}));
  match_cmd->add_option("--threshold", match.threshold, "Ratio threshold (reference engine)")
      ->check(CLI::Range(0.0, 1.0));
  match_cmd->add_option("--threshold-mode", match.threshold_mode, "Pipeline comparator")
      ->check(CLI::IsMember({"exact_0_6", "binary_10011"}));
  match_cmd->add_option("--clock", match.clock_hz, "Clock in Hz")->check(CLI::PositiveNumber);
  match_cmd->add_option("--block-size", match.block_size, "DES_MEM block size")->check(CLI::PositiveNumber);
  match_cmd->add_option("--threads", match.threads, "Reference engine workers (0 = all cores)");
  match_cmd->add_option("--format", match.format)->check(CLI::IsMember({"json", "csv"}));
  match_cmd->add_option("-o,--output", match.output, "Output file (default stdout)");

  CompareArgs cmp;
  auto* compare = app.add_subcommand("compare", "Agreement between the reference and pipeline verdicts");
  compare->add_option("-q,--queries", cmp.queries, "Query descriptor file");
  compare->add_option("-d,--database", cmp.database, "Database descriptor file");
  compare->add_option("--reference", cmp.reference_report, "Reference match report (JSON)");
  compare->add_option("--candidate", cmp.candidate_report, "Candidate match report (JSON)");
  compare->add_option("--threshold-mode", cmp.threshold_mode, "Pipeline comparator when matching -q/-d")
      ->check(CLI::IsMember({"exact_0_6", "binary_10011"}));
  compare->add_option("-o,--output", cmp.output, "Output file (default stdout)");

  CharacterizeArgs ch;
  auto* characterize = app.add_subcommand("characterize", "Exhaustive CORDIC arccos error sweep (CSV)");
  characterize->add_option("--sqrt-iterations", ch.sqrt_iterations)->check(CLI::Range(1, 62));
  characterize->add_option("--polar-iterations", ch.polar_iterations)->check(CLI::Range(1, 62));
  characterize->add_option("-o,--output", ch.output, "Output file (default stdout)");

  RooflineArgs roof;
  auto* roofline = app.add_subcommand("roofline", "Attainable throughput against memory bandwidth (CSV)");
  roofline->add_option("--bandwidth", roof.bandwidths, "Bandwidths in bytes/s")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  roofline->add_option("--range", roof.range, "START STOP COUNT in bytes/s")->expected(3);
  roofline->add_option("--clock", roof.clock_hz, "Clock in Hz")->check(CLI::PositiveNumber);
  roofline->add_option("--descriptor-bytes", roof.descriptor_bytes)->check(CLI::PositiveNumber);
  roofline->add_option("-o,--output", roof.output, "Output file (default stdout)");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Time both engines on synthetic sets");
  bench_cmd->add_option("-m", bench.m, "Query count");
  bench_cmd->add_option("-n", bench.n, "Database count");
  bench_cmd->add_option("--seed", bench.seed);
  bench_cmd->add_option("-o,--output", bench.output, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), kUsage);
  }

  try {
    if (*generate) return cmd_generate(gen);
    if (*match_cmd) return cmd_match(match);
    if (*compare) return cmd_compare(cmp);
    if (*characterize) return cmd_characterize(ch);
    if (*roofline) return cmd_roofline(roof);
    if (*bench_cmd) return cmd_bench(bench);
  } catch (const UsageError& e) {
    return fail("usage", e.what(), kUsage);
  } catch (const IoError& e) {
    return fail("io", e.what(), kIo);
  } catch (const FormatError& e) {
    return fail("format", e.what(), kFormat);
  } catch (const std::invalid_argument& e) {
    return fail("input", e.what(), kInput);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), 1);
  }
  return kOk;
}

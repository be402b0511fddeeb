#include <doctest.h>

#include <sstream>

#include "siftmatch/errors.hpp"
#include "siftmatch/report.hpp"
#include "test_support.hpp"

using namespace siftmatch;

namespace {

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

std::size_t line_count(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST_SUITE("report") {

TEST_CASE("engine names") {
  CHECK(to_string(Engine::pipeline) == "pipeline");
  CHECK(engine_from_string("reference") == Engine::reference);
  CHECK_THROWS_AS(engine_from_string("gpu"), std::invalid_argument);
}

TEST_CASE("pipeline report JSON round trip") {
  std::mt19937_64 rng(81);
  const DescriptorSet q = test::random_set(5, rng);
  const DescriptorSet db = test::random_set(7, rng);
  MatchReport report;
  report.engine = Engine::pipeline;
  report.queries = "q.siftdb";
  report.database = "d.siftdb";
  report.pipeline = PipelineConfig{};
  report.run = run_pipeline(q, db);
  report.matches = report.run->matches;

  const Json j = to_json(report);
  CHECK(j["engine"] == "pipeline");
  CHECK(j["total_cycles"] == predict_cycles(5, 7));
  CHECK(j["elapsed_ms"].get<double>() == doctest::Approx(report.run->elapsed_seconds * 1e3));
  CHECK(j["pipeline_config"]["block_size"] == 33);
  CHECK(j["pipeline_config"]["threshold_mode"] == "binary_10011");
  CHECK(j["query_count"] == 5);
  CHECK(j["matches"].size() == 5);
  CHECK(j["matches"][0].contains("min_raw"));

  const MatchReport back = match_report_from_json(Json::parse(j.dump()));
  CHECK(back.engine == Engine::pipeline);
  CHECK(back.queries == "q.siftdb");
  REQUIRE(back.matches.size() == report.matches.size());
  for (std::size_t k = 0; k < back.matches.size(); ++k) {
    const MatchResult& a = back.matches[k];
    const MatchResult& b = report.matches[k];
    CHECK(a.query_index == b.query_index);
    CHECK(a.best_index == b.best_index);
    CHECK(a.matched == b.matched);
    CHECK(a.min_angle == b.min_angle);
    CHECK(a.second_min_angle == b.second_min_angle);
    CHECK(a.min_raw == b.min_raw);
    CHECK(a.second_min_raw == b.second_min_raw);
    CHECK(a.query_xy == b.query_xy);
    CHECK(a.best_xy == b.best_xy);
  }
}

TEST_CASE("reference report has null raw codes") {
  std::mt19937_64 rng(82);
  const DescriptorSet s = test::random_set(3, rng);
  MatchReport report;
  report.matches = match_all(s, s, kDefaultThreshold);
  const Json j = to_json(report);
  CHECK_FALSE(j.contains("total_cycles"));
  CHECK(j["matches"][0]["min_raw"].is_null());
  const MatchReport back = match_report_from_json(j);
  CHECK_FALSE(back.matches[0].min_raw.has_value());
}

TEST_CASE("malformed reports raise FormatError") {
  CHECK_THROWS_AS(match_report_from_json(Json::parse(R"({"engine":"x","matches":[]})")), FormatError);
  CHECK_THROWS_AS(match_report_from_json(Json::parse(R"({"engine":"reference"})")), FormatError);
  CHECK_THROWS_AS(
      match_report_from_json(Json::parse(R"({"engine":"reference","matches":[{"k":0}]})")),
      FormatError);
}

TEST_CASE("agreement report JSON") {
  std::vector<MatchResult> a(2), b(2);
  b[1].matched = true;
  b[1].best_index = 0;
  a[1].min_angle = 0.6;
  a[1].second_min_angle = 1.0;
  const Json j = to_json(compare_results(a, b, 0.59375, 0.6));
  CHECK(j["total"] == 2);
  CHECK(j["agreeing"] == 1);
  CHECK(j["agreement_percent"] == 50.0);
  CHECK(j["disagreements"].size() == 1);
  CHECK(j["disagreements"][0]["k"] == 1);
  CHECK(j["disagreements"][0].contains("ratio_margin"));
}

TEST_CASE("CSV headers and row counts") {
  std::mt19937_64 rng(83);
  const DescriptorSet s = test::random_set(4, rng);
  const RunReport run = run_pipeline(s, s);

  std::ostringstream matches;
  write_matches_csv(matches, run.matches);
  CHECK(first_line(matches.str()) == "k,matched,best_index,qx,qy,bx,by,min_raw,secmin_raw");
  CHECK(line_count(matches.str()) == 5);

  std::ostringstream roof;
  const std::vector<double> bw{3.2e9, 25.6e9};
  write_roofline_csv(roof, roofline_sweep(RooflineConfig{}, bw));
  CHECK(roof.str() == "bandwidth_bytes_per_s,ops_per_s,bound\n3200000000,12500000,memory\n"
                      "25600000000,100000000,compute\n");

  ArccosCharacterization c;
  c.rows.push_back(ArccosSample{0x8000, 1.0, 0, 0.0, 0.0, 0.0});
  std::ostringstream ch;
  write_characterization_csv(ch, c);
  CHECK(ch.str() == "x_raw,x,arccos_raw,arccos,reference,error\n32768,1,0,0,0,0\n");

  std::ostringstream gt;
  const std::vector<std::pair<std::size_t, std::size_t>> pairs{{0, 0}, {2, 2}};
  write_ground_truth_csv(gt, pairs);
  CHECK(gt.str() == "query_index,database_index\n0,0\n2,2\n");
}

}  // TEST_SUITE

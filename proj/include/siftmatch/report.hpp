#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "siftmatch/agreement.hpp"
#include "siftmatch/cordic.hpp"
#include "siftmatch/pipeline.hpp"
#include "siftmatch/reference_matcher.hpp"
#include "siftmatch/roofline.hpp"

namespace siftmatch {

using Json = nlohmann::ordered_json;

enum class Engine { reference, pipeline };

std::string_view to_string(Engine engine);
Engine engine_from_string(std::string_view name);

// What produced a set of match results. `run` and `pipeline` are present for
// the pipeline engine only.
struct MatchReport {
  Engine engine = Engine::reference;
  std::string queries;
  std::string database;
  double threshold = kDefaultThreshold;
  std::optional<PipelineConfig> pipeline;
  std::optional<RunReport> run;
  std::vector<MatchResult> matches;
};

Json to_json(const MatchResult& r);
Json to_json(const MatchReport& report);
Json to_json(const AgreementReport& report);

// Inverse of to_json(MatchReport). Throws FormatError on schema violations.
MatchReport match_report_from_json(const Json& j);

// Header `k,matched,best_index,qx,qy,bx,by,min_raw,secmin_raw`. Raw angle
// columns are empty for the reference engine.
void write_matches_csv(std::ostream& out, std::span<const MatchResult> matches);

// Header `bandwidth_bytes_per_s,ops_per_s,bound`.
void write_roofline_csv(std::ostream& out, std::span<const RooflinePoint> points);

// Header `x_raw,x,arccos_raw,arccos,reference,error`.
void write_characterization_csv(std::ostream& out, const ArccosCharacterization& c);

// Header `query_index,database_index`.
void write_ground_truth_csv(std::ostream& out,
                            std::span<const std::pair<std::size_t, std::size_t>> pairs);

}  // namespace siftmatch

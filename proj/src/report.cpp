#include "siftmatch/report.hpp"

#include <cstdio>
#include <ostream>

#include "siftmatch/errors.hpp"

namespace siftmatch {
namespace {

Json coord(PixelCoord p) { return Json::array({p.x, p.y}); }

PixelCoord coord_from(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw FormatError("coordinate must be [x, y]");
  return PixelCoord{j[0].get<std::uint16_t>(), j[1].get<std::uint16_t>()};
}

// %.17g keeps doubles round-trippable in CSV.
std::string real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string_view to_string(Engine engine) {
  return engine == Engine::reference ? "reference" : "pipeline";
}

Engine engine_from_string(std::string_view name) {
  if (name == "reference") return Engine::reference;
  if (name == "pipeline") return Engine::pipeline;
  throw std::invalid_argument("unknown engine '" + std::string(name) + "'");
}

Json to_json(const MatchResult& r) {
  Json j;
  j["k"] = r.query_index;
  j["matched"] = r.matched;
  j["best_index"] = r.best_index ? Json(*r.best_index) : Json(nullptr);
  j["query_xy"] = coord(r.query_xy);
  j["best_xy"] = coord(r.best_xy);
  j["min_angle"] = r.min_angle;
  j["second_min_angle"] = r.second_min_angle;
  j["min_raw"] = r.min_raw ? Json(*r.min_raw) : Json(nullptr);
  j["secmin_raw"] = r.second_min_raw ? Json(*r.second_min_raw) : Json(nullptr);
  return j;
}

Json to_json(const MatchReport& report) {
  Json j;
  j["engine"] = to_string(report.engine);
  j["queries"] = report.queries;
  j["database"] = report.database;
  j["threshold"] = report.threshold;
  if (report.pipeline) {
    const PipelineConfig& c = *report.pipeline;
    j["pipeline_config"] = Json{
        {"block_size", c.block_size},
        {"fetch_cycles_per_descriptor", c.fetch_cycles_per_descriptor},
        {"dot_product_stages", c.dot_product_stages},
        {"cosine_stages", c.cosine_stages},
        {"min_find_stages", c.min_find_stages},
        {"match_check_stages", c.match_check_stages},
        {"clock_hz", c.clock_hz},
        {"threshold_mode", to_string(c.threshold_mode)},
        {"sqrt_iterations", c.cordic.sqrt_iterations},
        {"polar_iterations", c.cordic.polar_iterations},
    };
  }
  if (report.run) {
    const RunReport& r = *report.run;
    j["total_cycles"] = r.total_cycles;
    j["clock_hz"] = r.clock_hz;
    j["elapsed_seconds"] = r.elapsed_seconds;
    j["elapsed_ms"] = r.elapsed_seconds * 1e3;
    j["blocks_processed"] = r.blocks_processed;
    j["dot_products_executed"] = r.dot_products_executed;
    j["issue_slots"] = r.issue_slots;
    j["stall_cycles"] = r.stall_cycles;
  }
  std::size_t matched = 0;
  Json rows = Json::array();
  for (const auto& m : report.matches) {
    matched += m.matched ? 1 : 0;
    rows.push_back(to_json(m));
  }
  j["query_count"] = report.matches.size();
  j["matched_count"] = matched;
  j["matches"] = std::move(rows);
  return j;
}

Json to_json(const AgreementReport& report) {
  Json j;
  j["total"] = report.total;
  j["agreeing"] = report.agreeing;
  j["agreement_percent"] = 100.0 * report.fraction();
  j["all_disagreements_within_bound"] = report.all_within_bound();
  Json rows = Json::array();
  for (const auto& d : report.disagreements) {
    rows.push_back(Json{
        {"k", d.query_index},
        {"reference_matched", d.reference_matched},
        {"candidate_matched", d.candidate_matched},
        {"reference_best", d.reference_best ? Json(*d.reference_best) : Json(nullptr)},
        {"candidate_best", d.candidate_best ? Json(*d.candidate_best) : Json(nullptr)},
        {"reference_ratio", d.reference_ratio},
        {"ratio_margin", d.ratio_margin},
        {"ratio_bound", d.ratio_bound},
        {"within_bound", d.within_bound},
    });
  }
  j["disagreements"] = std::move(rows);
  return j;
}

MatchReport match_report_from_json(const Json& j) {
  try {
    MatchReport report;
    report.engine = engine_from_string(j.at("engine").get<std::string>());
    report.queries = j.value("queries", "");
    report.database = j.value("database", "");
    report.threshold = j.value("threshold", kDefaultThreshold);
    for (const auto& row : j.at("matches")) {
      MatchResult r;
      r.query_index = row.at("k").get<std::size_t>();
      r.matched = row.at("matched").get<bool>();
      if (!row.at("best_index").is_null()) r.best_index = row["best_index"].get<std::size_t>();
      r.query_xy = coord_from(row.at("query_xy"));
      r.best_xy = coord_from(row.at("best_xy"));
      r.min_angle = row.at("min_angle").get<double>();
      r.second_min_angle = row.at("second_min_angle").get<double>();
      if (row.contains("min_raw") && !row["min_raw"].is_null()) {
        r.min_raw = row["min_raw"].get<std::uint16_t>();
      }
      if (row.contains("secmin_raw") && !row["secmin_raw"].is_null()) {
        r.second_min_raw = row["secmin_raw"].get<std::uint16_t>();
      }
      report.matches.push_back(r);
    }
    return report;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("malformed match report: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("malformed match report: ") + e.what());
  }
}

void write_matches_csv(std::ostream& out, std::span<const MatchResult> matches) {
  out << "k,matched,best_index,qx,qy,bx,by,min_raw,secmin_raw\n";
  for (const auto& r : matches) {
    out << r.query_index << ',' << (r.matched ? 1 : 0) << ',';
    if (r.best_index) out << *r.best_index;
    out << ',' << r.query_xy.x << ',' << r.query_xy.y << ',' << r.best_xy.x << ',' << r.best_xy.y
        << ',';
    if (r.min_raw) out << *r.min_raw;
    out << ',';
    if (r.second_min_raw) out << *r.second_min_raw;
    out << '\n';
  }
}

void write_roofline_csv(std::ostream& out, std::span<const RooflinePoint> points) {
  out << "bandwidth_bytes_per_s,ops_per_s,bound\n";
  for (const auto& p : points) {
    out << real(p.bandwidth_bytes_per_s) << ',' << real(p.attainable_ops_per_s) << ','
        << to_string(p.bound) << '\n';
  }
}

void write_characterization_csv(std::ostream& out, const ArccosCharacterization& c) {
  out << "x_raw,x,arccos_raw,arccos,reference,error\n";
  for (const auto& row : c.rows) {
    out << row.x_raw << ',' << real(row.x) << ',' << row.angle_raw << ',' << real(row.angle) << ','
        << real(row.reference) << ',' << real(row.error) << '\n';
  }
}

void write_ground_truth_csv(std::ostream& out,
                            std::span<const std::pair<std::size_t, std::size_t>> pairs) {
  out << "query_index,database_index\n";
  for (const auto& [q, d] : pairs) out << q << ',' << d << '\n';
}

}  // namespace siftmatch

#include "vcd/metrics.hpp"

#include <fstream>

#include <json.hpp>

namespace vcd {

double micro_average_precision(const PredictionList& predictions,
                               const GroundTruth& gt) {
  if (gt.positives.empty()) throw DataError("ground truth is empty");
  std::uint64_t tp = 0;
  double sum = 0.0;
  std::uint64_t rank = 0;
  for (const auto& e : predictions.entries) {
    ++rank;
    if (gt.positives.count({e.query_id, e.reference_id})) {
      ++tp;
      sum += static_cast<double>(tp) / static_cast<double>(rank);
    }
  }
  return sum / static_cast<double>(gt.positives.size());
}

GroundTruth read_ground_truth_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty ground truth CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "query_id,reference_id") {
    throw DataError("ground truth CSV header mismatch: '" + line + "'");
  }
  GroundTruth gt;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto c = line.find(',');
    if (c == std::string::npos) {
      throw DataError("ground truth CSV line " + std::to_string(line_no) +
                      " is not 'query,reference'");
    }
    const auto inserted =
        gt.positives.insert({line.substr(0, c), line.substr(c + 1)});
    if (!inserted.second) {
      throw DataError("duplicate ground truth pair on line " +
                      std::to_string(line_no));
    }
  }
  return gt;
}

void write_ground_truth_csv_file(const std::string& path,
                                 const GroundTruth& gt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot create " + path);
  out << "query_id,reference_id\n";
  for (const auto& [q, r] : gt.positives) {
    out << q << ',' << r << '\n';
  }
}

EvalReport evaluate(const PredictionList& predictions, const GroundTruth& gt,
                    const std::map<std::string, MethodStats>& stats) {
  EvalReport report;
  report.uap = micro_average_precision(predictions, gt);
  report.positives_total = gt.positives.size();
  report.predictions_total = predictions.entries.size();
  report.per_method_stats = stats;

  std::set<std::string> query_ids, reference_ids;
  for (const auto& e : predictions.entries) {
    query_ids.insert(e.query_id);
    reference_ids.insert(e.reference_id);
  }
  for (const auto& [q, r] : gt.positives) {
    if (!query_ids.count(q)) {
      report.warnings.push_back("ground truth query id not in predictions: " +
                                q);
    }
    if (!reference_ids.count(r)) {
      report.warnings.push_back(
          "ground truth reference id not in predictions: " + r);
    }
  }
  return report;
}

EvalReport evaluate_run(const std::string& scores_path,
                        const std::string& gt_path,
                        const std::map<std::string, MethodStats>& stats) {
  return evaluate(read_scores_csv_file(scores_path),
                  read_ground_truth_csv_file(gt_path), stats);
}

std::string report_to_json(const EvalReport& report) {
  nlohmann::ordered_json doc;
  doc["uap"] = report.uap;
  doc["positives_total"] = report.positives_total;
  doc["predictions_total"] = report.predictions_total;
  doc["warnings"] = report.warnings;
  nlohmann::ordered_json stats = nlohmann::ordered_json::object();
  for (const auto& [name, s] : report.per_method_stats) {
    stats[name] = {{"selected_frames_total", s.selected_frames_total},
                   {"reduction_factor_mean", s.reduction_factor_mean},
                   {"descriptor_bytes", s.descriptor_bytes},
                   {"wall_time_seconds", s.wall_time_seconds},
                   {"videos_per_second", s.videos_per_second}};
  }
  doc["per_method_stats"] = std::move(stats);
  return doc.dump(2) + "\n";
}

void write_report_file(const std::string& path, const EvalReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot create " + path);
  out << report_to_json(report);
}

}  // namespace vcd

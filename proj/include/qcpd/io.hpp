#pragma once

// On-disk formats. Every JSON document and JSONL record written here carries
// a "schema" string; readers reject mismatches (JSONL records without one
// are accepted).
//
//   revisions JSONL   one record per revision (article_id, ts, editor,
//                     registered, kind, text, creation_time)
//   labels JSONL      one record per assessment event (article_id, ts,
//                     class, merged_class, creation_time); articles without
//                     events are not represented
//   corpus directory  manifest.json plus one CSV per article with header
//                     month,F1..F34,valid,is_change_point
//   predictions JSON  calendar month indices per article plus run metadata
//   report JSON       per-article rows, means and echoed metadata

#include <filesystem>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qcpd/evaluation.hpp"
#include "qcpd/features.hpp"
#include "qcpd/model.hpp"

namespace qcpd {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kRevisionsSchema = "qcpd.revisions/1";
inline constexpr std::string_view kLabelsSchema = "qcpd.labels/1";
inline constexpr std::string_view kCorpusSchema = "qcpd.corpus/1";
inline constexpr std::string_view kGroundTruthSchema = "qcpd.ground_truth/1";
inline constexpr std::string_view kPredictionsSchema = "qcpd.predictions/1";
inline constexpr std::string_view kReportSchema = "qcpd.report/1";

/// Shortest text that parses back to the same double.
std::string format_double(double value);
double parse_double(std::string_view text);

void write_revisions_jsonl(std::ostream& out, std::span<const PageHistory> histories);
std::vector<PageHistory> read_revisions_jsonl(std::istream& in);

struct ArticleLabels {
  std::string article_id;
  Instant creation_time;
  std::vector<QualityLabelEvent> events;

  friend bool operator==(const ArticleLabels&, const ArticleLabels&) = default;
};

void write_labels_jsonl(std::ostream& out, std::span<const ArticleLabels> labels);
std::vector<ArticleLabels> read_labels_jsonl(std::istream& in);

void write_series_csv(std::ostream& out, const ArticleSeries& series);
/// Fills matrix, validity and ground truth of `series`.
void read_series_csv(std::istream& in, ArticleSeries& series);

/// Writes manifest.json and one CSV per article into `dir` (created if needed).
void write_corpus(const std::filesystem::path& dir, std::span<const ArticleSeries> corpus);
std::vector<ArticleSeries> read_corpus(const std::filesystem::path& dir);

/// Valid span and ground-truth points (calendar indices) of one article.
struct TruthEntry {
  int first_valid = 1;
  int length = 0;
  ChangePointSet points;
};

Json ground_truth_json(std::span<const ArticleSeries> corpus);
std::map<std::string, TruthEntry> parse_ground_truth(const Json& doc);

struct PredictionSet {
  Json metadata = Json::object();
  std::map<std::string, ChangePointSet> points;  // calendar month indices
};

Json predictions_json(const PredictionSet& predictions);
PredictionSet parse_predictions(const Json& doc);

Json report_json(const EvalReport& report);
EvalReport parse_report(const Json& doc);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& doc);

/// Throws unless doc["schema"] equals `expected`.
void expect_schema(const Json& doc, std::string_view expected);

}  // namespace qcpd

// Copyright 2026 The AMCC Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "amcc/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include <nlohmann/json.hpp>

#include "amcc/error.hpp"

namespace amcc {
namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;
constexpr std::string_view kAnnotationHeader = "worker_id,sample_id,label_id,value";
constexpr std::string_view kTruthHeader = "sample_id,label_id";
constexpr std::string_view kEvalCsvHeader =
    "accuracy,one_minus_rl,one_minus_oe,num_samples,ranking_skipped";
constexpr std::string_view kLedgerCsvHeader =
    "round,queries,round_cost,cumulative_cost,accuracy,one_minus_rl,one_minus_oe";

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos
                                              ? std::string_view::npos
                                              : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

// Splits text into lines, stripping a UTF-8 byte order mark.
std::vector<std::string> read_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  if (!lines.empty() && lines.front().rfind("\xEF\xBB\xBF", 0) == 0) {
    lines.front().erase(0, 3);
  }
  return lines;
}

std::vector<std::string> read_lines_from(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return read_lines(in);
}

int index_of(const std::vector<std::string>& sorted, std::string_view id, const char* kind) {
  const auto it = std::lower_bound(sorted.begin(), sorted.end(), id);
  if (it == sorted.end() || *it != id) {
    throw AlignmentError(std::string("unknown ") + kind + " id '" + std::string(id) + "'");
  }
  return static_cast<int>(it - sorted.begin());
}

std::vector<std::string> sorted_unique(std::set<std::string> ids) {
  return {ids.begin(), ids.end()};
}

void check_header(const std::vector<std::string>& lines, std::string_view header,
                  const char* what) {
  if (lines.empty() || trim(lines.front()).empty()) {
    throw ParseError(std::string(what) + " file is empty", 0);
  }
  if (trim(lines.front()) != header) {
    throw ParseError(std::string(what) + " header must be '" + std::string(header) + "'", 1);
  }
}

json report_json(const EvalReport& r) {
  return json{{"accuracy", r.accuracy},
              {"one_minus_rl", r.one_minus_rl},
              {"one_minus_oe", r.one_minus_oe},
              {"num_samples", r.num_samples},
              {"ranking_skipped", r.ranking_skipped},
              {"per_sample_accuracy", r.per_sample_accuracy}};
}

EvalReport report_from(const json& j) {
  EvalReport r;
  r.accuracy = j.at("accuracy").get<double>();
  r.one_minus_rl = j.at("one_minus_rl").get<double>();
  r.one_minus_oe = j.at("one_minus_oe").get<double>();
  r.num_samples = j.at("num_samples").get<int>();
  r.ranking_skipped = j.at("ranking_skipped").get<int>();
  r.per_sample_accuracy = j.at("per_sample_accuracy").get<std::vector<double>>();
  return r;
}

json round_json(const LedgerRound& r) {
  json triplets = json::array();
  for (const TripletScore& t : r.triplets) {
    triplets.push_back(json{{"sample", t.sample},
                            {"label", t.label},
                            {"worker", t.worker},
                            {"u1", t.u1},
                            {"u2", t.u2},
                            {"u", t.u},
                            {"q", t.q},
                            {"c", t.c},
                            {"combined", t.combined}});
  }
  json out{{"round", r.round},
           {"queries", r.queries},
           {"round_cost", r.round_cost},
           {"cumulative_cost", r.cumulative_cost},
           {"triplets", triplets},
           {"answers", r.answers}};
  out["snapshot"] = r.snapshot ? report_json(*r.snapshot) : json(nullptr);
  return out;
}

LedgerRound round_from(const json& j) {
  LedgerRound r;
  r.round = j.at("round").get<int>();
  r.queries = j.at("queries").get<int>();
  r.round_cost = j.at("round_cost").get<double>();
  r.cumulative_cost = j.at("cumulative_cost").get<double>();
  for (const json& t : j.at("triplets")) {
    TripletScore s;
    s.sample = t.at("sample").get<int>();
    s.label = t.at("label").get<int>();
    s.worker = t.at("worker").get<int>();
    s.u1 = t.at("u1").get<double>();
    s.u2 = t.at("u2").get<double>();
    s.u = t.at("u").get<double>();
    s.q = t.at("q").get<double>();
    s.c = t.at("c").get<double>();
    s.combined = t.at("combined").get<double>();
    r.triplets.push_back(s);
  }
  r.answers = j.at("answers").get<std::vector<int>>();
  if (!j.at("snapshot").is_null()) r.snapshot = report_from(j.at("snapshot"));
  return r;
}

json parse_json(std::string_view text, const char* schema) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), 0);
  }
  if (!j.is_object() || j.value("schema", "") != schema) {
    throw ParseError(std::string("expected a '") + schema + "' document", 0);
  }
  if (j.value("schema_version", 0) != kSchemaVersion) {
    throw ParseError("unsupported schema_version", 0);
  }
  return j;
}

std::vector<std::string> text_lines(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::vector<std::string> lines = read_lines(in);
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  return lines;
}

}  // namespace

int IdMaps::worker_index(std::string_view id) const { return index_of(workers, id, "worker"); }
int IdMaps::sample_index(std::string_view id) const { return index_of(samples, id, "sample"); }
int IdMaps::label_index(std::string_view id) const { return index_of(labels, id, "label"); }

IdMaps default_ids(int num_workers, int num_samples, int num_labels) {
  auto make = [](char prefix, int count) {
    const int width = static_cast<int>(std::to_string(std::max(count - 1, 0)).size());
    std::vector<std::string> out;
    for (int k = 0; k < count; ++k) {
      std::string digits = std::to_string(k);
      out.push_back(prefix + std::string(width - digits.size(), '0') + digits);
    }
    return out;
  };
  return IdMaps{make('w', num_workers), make('s', num_samples), make('l', num_labels)};
}

LoadedAnnotations parse_annotations(std::istream& in, int min_annotations) {
  if (min_annotations < 1) throw ConfigError("min_annotations must be at least 1");
  const std::vector<std::string> lines = read_lines(in);
  check_header(lines, kAnnotationHeader, "annotation");

  struct Record {
    std::string worker, sample, label;
    int value;
  };
  std::vector<Record> records;
  std::set<std::tuple<std::string, std::string, std::string>> seen;
  std::map<std::string, long> per_worker;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const long line_no = static_cast<long>(k) + 1;
    if (trim(lines[k]).empty()) continue;
    const std::vector<std::string_view> cells = split(lines[k]);
    if (cells.size() != 4) {
      throw ParseError("expected 4 columns, found " + std::to_string(cells.size()), line_no);
    }
    for (std::size_t c = 0; c < 3; ++c) {
      if (cells[c].empty()) throw ParseError("empty id", line_no);
    }
    int value = 0;
    if (cells[3] == "1" || cells[3] == "+1") {
      value = 1;
    } else if (cells[3] == "-1") {
      value = -1;
    } else {
      throw ParseError("value must be +1 or -1, got '" + std::string(cells[3]) + "'", line_no);
    }
    Record r{std::string(cells[0]), std::string(cells[1]), std::string(cells[2]), value};
    if (!seen.emplace(r.worker, r.sample, r.label).second) {
      throw ConflictError("duplicate record for worker '" + r.worker + "', sample '" +
                          r.sample + "', label '" + r.label + "' (line " +
                          std::to_string(line_no) + ")");
    }
    ++per_worker[r.worker];
    records.push_back(std::move(r));
  }
  if (records.empty()) throw DataError("annotation file has no records");

  std::vector<std::string> dropped;
  for (const auto& [id, count] : per_worker) {
    if (count < min_annotations) dropped.push_back(id);
  }
  std::erase_if(records, [&](const Record& r) {
    return std::binary_search(dropped.begin(), dropped.end(), r.worker);
  });
  if (records.empty()) {
    throw DataError("every worker has fewer than " + std::to_string(min_annotations) +
                    " annotations");
  }

  std::set<std::string> workers, samples, labels;
  for (const Record& r : records) {
    workers.insert(r.worker);
    samples.insert(r.sample);
    labels.insert(r.label);
  }
  IdMaps ids{sorted_unique(workers), sorted_unique(samples), sorted_unique(labels)};
  if (ids.labels.size() < 2) throw DataError("annotations mention fewer than two labels");

  std::vector<Matrix> matrices(ids.workers.size(),
                               Matrix::Zero(static_cast<Eigen::Index>(ids.samples.size()),
                                            static_cast<Eigen::Index>(ids.labels.size())));
  for (const Record& r : records) {
    matrices[ids.worker_index(r.worker)](ids.sample_index(r.sample), ids.label_index(r.label)) =
        r.value;
  }
  return LoadedAnnotations{AnnotationTensor(std::move(matrices)), std::move(ids),
                           static_cast<long>(records.size()), std::move(dropped)};
}

LoadedAnnotations load_annotations(const std::filesystem::path& path, int min_annotations) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return parse_annotations(in, min_annotations);
}

void write_annotations(std::ostream& out, const AnnotationTensor& tensor, const IdMaps& ids) {
  if (static_cast<int>(ids.workers.size()) != tensor.num_workers() ||
      static_cast<int>(ids.samples.size()) != tensor.num_samples() ||
      static_cast<int>(ids.labels.size()) != tensor.num_labels()) {
    throw DimensionError("id maps do not match the tensor");
  }
  out << kAnnotationHeader << '\n';
  for (int w = 0; w < tensor.num_workers(); ++w) {
    for (int i = 0; i < tensor.num_samples(); ++i) {
      for (int l = 0; l < tensor.num_labels(); ++l) {
        const double v = tensor.at(w, i, l);
        if (v == 0.0) continue;
        out << ids.workers[w] << ',' << ids.samples[i] << ',' << ids.labels[l] << ','
            << (v > 0 ? "1" : "-1") << '\n';
      }
    }
  }
}

void save_annotations(const std::filesystem::path& path, const AnnotationTensor& tensor,
                      const IdMaps& ids) {
  std::ostringstream out;
  write_annotations(out, tensor, ids);
  write_text_file(path, out.str());
}

LabelMatrix load_truth(const std::filesystem::path& path, const IdMaps& ids) {
  const std::vector<std::string> lines = read_lines_from(path);
  check_header(lines, kTruthHeader, "truth");
  LabelMatrix y = LabelMatrix::Zero(static_cast<Eigen::Index>(ids.samples.size()),
                                    static_cast<Eigen::Index>(ids.labels.size()));
  for (std::size_t k = 1; k < lines.size(); ++k) {
    if (trim(lines[k]).empty()) continue;
    const std::vector<std::string_view> cells = split(lines[k]);
    if (cells.size() != 2) throw ParseError("expected 2 columns", static_cast<long>(k) + 1);
    y(ids.sample_index(cells[0]), ids.label_index(cells[1])) = 1;
  }
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    if ((y.row(i).array() == 0).all()) {
      throw AlignmentError("truth file has no label for sample '" + ids.samples[i] + "'");
    }
  }
  return y;
}

void save_truth(const std::filesystem::path& path, const LabelMatrix& truth, const IdMaps& ids) {
  std::ostringstream out;
  out << kTruthHeader << '\n';
  for (Eigen::Index i = 0; i < truth.rows(); ++i) {
    for (Eigen::Index l = 0; l < truth.cols(); ++l) {
      if (truth(i, l) == 1) out << ids.samples[i] << ',' << ids.labels[l] << '\n';
    }
  }
  write_text_file(path, out.str());
}

Matrix load_features(const std::filesystem::path& path,
                     const std::vector<std::string>& sample_ids) {
  const std::vector<std::string> lines = read_lines_from(path);
  if (lines.empty() || trim(lines.front()).empty()) throw ParseError("feature file is empty", 0);
  const std::vector<std::string_view> header = split(lines.front());
  if (header.size() < 2 || header.front() != "sample_id") {
    throw ParseError("feature header must start with 'sample_id' and name a feature", 1);
  }
  const Eigen::Index dim = static_cast<Eigen::Index>(header.size() - 1);
  std::map<std::string, int> position;
  for (std::size_t k = 0; k < sample_ids.size(); ++k) position[sample_ids[k]] = static_cast<int>(k);

  Matrix x(static_cast<Eigen::Index>(sample_ids.size()), dim);
  std::vector<char> filled(sample_ids.size(), 0);
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const long line_no = static_cast<long>(k) + 1;
    if (trim(lines[k]).empty()) continue;
    const std::vector<std::string_view> cells = split(lines[k]);
    if (static_cast<Eigen::Index>(cells.size()) != dim + 1) {
      throw ParseError("expected " + std::to_string(dim + 1) + " columns", line_no);
    }
    const auto it = position.find(std::string(cells[0]));
    if (it == position.end()) {
      throw AlignmentError("feature row for unknown sample id '" + std::string(cells[0]) + "'");
    }
    if (filled[it->second]) {
      throw ConflictError("duplicate feature row for sample '" + std::string(cells[0]) + "'");
    }
    filled[it->second] = 1;
    for (Eigen::Index f = 0; f < dim; ++f) {
      try {
        x(it->second, f) = parse_double(cells[f + 1]);
      } catch (const ParseError& e) {
        throw ParseError(e.what(), line_no);
      }
    }
  }
  for (std::size_t k = 0; k < sample_ids.size(); ++k) {
    if (!filled[k]) throw AlignmentError("no feature row for sample id '" + sample_ids[k] + "'");
  }
  return x;
}

void save_features(const std::filesystem::path& path, const Matrix& features,
                   const std::vector<std::string>& sample_ids) {
  if (static_cast<Eigen::Index>(sample_ids.size()) != features.rows()) {
    throw DimensionError("sample ids do not match feature rows");
  }
  std::ostringstream out;
  out << "sample_id";
  for (Eigen::Index f = 0; f < features.cols(); ++f) out << ",f" << f;
  out << '\n';
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    out << sample_ids[i];
    for (Eigen::Index f = 0; f < features.cols(); ++f) out << ',' << format_double(features(i, f));
    out << '\n';
  }
  write_text_file(path, out.str());
}

int ReplayOracle::answer(int sample, int label, int worker) {
  if (worker < 0 || worker >= recorded_.num_workers() || sample < 0 ||
      sample >= recorded_.num_samples() || label < 0 || label >= recorded_.num_labels()) {
    throw OracleError("replay query out of range");
  }
  const double v = recorded_.at(worker, sample, label);
  if (v == 0.0) {
    throw OracleError("no recorded annotation for worker " + std::to_string(worker) +
                      ", sample " + std::to_string(sample) + ", label " +
                      std::to_string(label));
  }
  return v > 0 ? 1 : -1;
}

bool ReplayOracle::can_answer(int sample, int label, int worker) const {
  return worker >= 0 && worker < recorded_.num_workers() && sample >= 0 &&
         sample < recorded_.num_samples() && label >= 0 && label < recorded_.num_labels() &&
         recorded_.at(worker, sample, label) != 0.0;
}

ReportFormat format_for(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? ReportFormat::kCsv : ReportFormat::kJson;
}

std::string to_json(const EvalReport& report) {
  json j{{"schema", "amcc.eval"}, {"schema_version", kSchemaVersion}};
  j["report"] = report_json(report);
  return j.dump(2) + "\n";
}

std::string to_json(const QueryLedger& ledger) {
  json rounds = json::array();
  for (const LedgerRound& r : ledger.rounds) rounds.push_back(round_json(r));
  json j{{"schema", "amcc.ledger"},
         {"schema_version", kSchemaVersion},
         {"strategy", ledger.strategy},
         {"initial", round_json(ledger.initial)},
         {"rounds", rounds},
         {"pool_exhausted", ledger.pool_exhausted}};
  j["error"] = ledger.error ? json(*ledger.error) : json(nullptr);
  return j.dump(2) + "\n";
}

std::string to_csv(const EvalReport& report) {
  return std::string(kEvalCsvHeader) + "\n" + format_double(report.accuracy) + "," +
         format_double(report.one_minus_rl) + "," + format_double(report.one_minus_oe) + "," +
         std::to_string(report.num_samples) + "," + std::to_string(report.ranking_skipped) +
         "\n";
}

std::string to_csv(const QueryLedger& ledger) {
  std::string out = std::string(kLedgerCsvHeader) + "\n";
  for (const LedgerRound& r : ledger.rounds) {
    out += std::to_string(r.round) + "," + std::to_string(r.queries) + "," +
           format_double(r.round_cost) + "," + format_double(r.cumulative_cost);
    if (r.snapshot) {
      out += "," + format_double(r.snapshot->accuracy) + "," +
             format_double(r.snapshot->one_minus_rl) + "," +
             format_double(r.snapshot->one_minus_oe);
    } else {
      out += ",,,";
    }
    out += "\n";
  }
  return out;
}

EvalReport eval_report_from_json(std::string_view text) {
  return report_from(parse_json(text, "amcc.eval").at("report"));
}

QueryLedger ledger_from_json(std::string_view text) {
  const json j = parse_json(text, "amcc.ledger");
  QueryLedger ledger;
  ledger.strategy = j.at("strategy").get<std::string>();
  ledger.initial = round_from(j.at("initial"));
  for (const json& r : j.at("rounds")) ledger.rounds.push_back(round_from(r));
  ledger.pool_exhausted = j.at("pool_exhausted").get<bool>();
  if (!j.at("error").is_null()) ledger.error = j.at("error").get<std::string>();
  return ledger;
}

EvalReport eval_report_from_csv(std::string_view text) {
  const std::vector<std::string> lines = text_lines(text);
  check_header(lines, kEvalCsvHeader, "evaluation report");
  if (lines.size() != 2) throw ParseError("expected exactly one data row", 0);
  const std::vector<std::string_view> cells = split(lines[1]);
  if (cells.size() != 5) throw ParseError("expected 5 columns", 2);
  EvalReport r;
  r.accuracy = parse_double(cells[0]);
  r.one_minus_rl = parse_double(cells[1]);
  r.one_minus_oe = parse_double(cells[2]);
  r.num_samples = static_cast<int>(parse_double(cells[3]));
  r.ranking_skipped = static_cast<int>(parse_double(cells[4]));
  return r;
}

QueryLedger ledger_from_csv(std::string_view text) {
  const std::vector<std::string> lines = text_lines(text);
  check_header(lines, kLedgerCsvHeader, "ledger");
  QueryLedger ledger;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const long line_no = static_cast<long>(k) + 1;
    const std::vector<std::string_view> cells = split(lines[k]);
    if (cells.size() != 7) throw ParseError("expected 7 columns", line_no);
    LedgerRound r;
    try {
      r.round = static_cast<int>(parse_double(cells[0]));
      r.queries = static_cast<int>(parse_double(cells[1]));
      r.round_cost = parse_double(cells[2]);
      r.cumulative_cost = parse_double(cells[3]);
      if (!cells[4].empty()) {
        EvalReport s;
        s.accuracy = parse_double(cells[4]);
        s.one_minus_rl = parse_double(cells[5]);
        s.one_minus_oe = parse_double(cells[6]);
        r.snapshot = s;
      }
    } catch (const ParseError& e) {
      throw ParseError(e.what(), line_no);
    }
    ledger.rounds.push_back(std::move(r));
  }
  return ledger;
}

void write_report(const EvalReport& report, const std::filesystem::path& path,
                  ReportFormat format) {
  write_text_file(path, format == ReportFormat::kCsv ? to_csv(report) : to_json(report));
}

void write_report(const QueryLedger& ledger, const std::filesystem::path& path,
                  ReportFormat format) {
  write_text_file(path, format == ReportFormat::kCsv ? to_csv(ledger) : to_json(ledger));
}

EvalReport read_eval_report(const std::filesystem::path& path, ReportFormat format) {
  const std::string text = read_text_file(path);
  return format == ReportFormat::kCsv ? eval_report_from_csv(text)
                                      : eval_report_from_json(text);
}

QueryLedger read_ledger(const std::filesystem::path& path, ReportFormat format) {
  const std::string text = read_text_file(path);
  return format == ReportFormat::kCsv ? ledger_from_csv(text) : ledger_from_json(text);
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string format_double(double value) {
  if (!std::isfinite(value)) throw DomainError("cannot serialize a non-finite value");
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  const std::string_view t = trim(text);
  const char* first = t.data();
  if (!t.empty() && t.front() == '+') ++first;
  double value = 0.0;
  const auto res = std::from_chars(first, t.data() + t.size(), value);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw ParseError("not a number: '" + std::string(t) + "'", 0);
  }
  return value;
}

}  // namespace amcc

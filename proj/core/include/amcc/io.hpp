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

// Annotation, truth and feature files, the replay oracle and report
// persistence.
//
// Annotation files are UTF-8 CSV with the header
//   worker_id,sample_id,label_id,value
// and value +1 or -1. Ids map to dense indices in lexicographic order.
// Truth files use the header sample_id,label_id (one row per relevant
// label); feature files use sample_id followed by one column per feature.

#ifndef AMCC_IO_HPP_
#define AMCC_IO_HPP_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "amcc/active.hpp"
#include "amcc/metrics.hpp"
#include "amcc/oracle.hpp"
#include "amcc/types.hpp"

namespace amcc {

struct IdMaps {
  std::vector<std::string> workers;
  std::vector<std::string> samples;
  std::vector<std::string> labels;

  // Throws AlignmentError for unknown ids.
  int worker_index(std::string_view id) const;
  int sample_index(std::string_view id) const;
  int label_index(std::string_view id) const;

  bool operator==(const IdMaps&) const = default;
};

// Zero-padded ids ("w00", "s000", "l0", ...) whose lexicographic order is
// the index order.
IdMaps default_ids(int num_workers, int num_samples, int num_labels);

struct LoadedAnnotations {
  AnnotationTensor tensor;
  IdMaps ids;
  long num_records = 0;                     // records kept
  std::vector<std::string> dropped_workers; // below min_annotations
};

// Workers with fewer than `min_annotations` records are dropped before the
// id maps are built. Throws ParseError (with line number) on malformed rows,
// ConflictError on duplicate records and DataError when nothing remains.
LoadedAnnotations parse_annotations(std::istream& in, int min_annotations = 1);
LoadedAnnotations load_annotations(const std::filesystem::path& path,
                                   int min_annotations = 1);

// Writes every nonzero entry, ordered by worker, sample and label.
void write_annotations(std::ostream& out, const AnnotationTensor& tensor, const IdMaps& ids);
void save_annotations(const std::filesystem::path& path, const AnnotationTensor& tensor,
                      const IdMaps& ids);

// Truth aligned to ids.samples and ids.labels; unknown ids raise
// AlignmentError.
LabelMatrix load_truth(const std::filesystem::path& path, const IdMaps& ids);
void save_truth(const std::filesystem::path& path, const LabelMatrix& truth, const IdMaps& ids);

// Features aligned to `sample_ids`; a missing or unknown sample id raises
// AlignmentError naming it.
Matrix load_features(const std::filesystem::path& path,
                     const std::vector<std::string>& sample_ids);
void save_features(const std::filesystem::path& path, const Matrix& features,
                   const std::vector<std::string>& sample_ids);

// Answers queries from a recorded tensor; unrecorded entries raise
// OracleError.
class ReplayOracle final : public AnnotationOracle {
 public:
  explicit ReplayOracle(AnnotationTensor recorded) : recorded_(std::move(recorded)) {}
  int answer(int sample, int label, int worker) override;
  bool can_answer(int sample, int label, int worker) const override;

 private:
  AnnotationTensor recorded_;
};

enum class ReportFormat { kJson, kCsv };

// ".csv" selects CSV, anything else JSON.
ReportFormat format_for(const std::filesystem::path& path);

// JSON is lossless; CSV keeps one header plus one row per round (ledger) or
// a single row (evaluation), with shortest round-trip decimal doubles.
std::string to_json(const EvalReport& report);
std::string to_json(const QueryLedger& ledger);
std::string to_csv(const EvalReport& report);
std::string to_csv(const QueryLedger& ledger);
EvalReport eval_report_from_json(std::string_view text);
QueryLedger ledger_from_json(std::string_view text);
EvalReport eval_report_from_csv(std::string_view text);
// Restores rounds, query counts, costs and snapshots; triplets and answers
// are not part of the CSV form.
QueryLedger ledger_from_csv(std::string_view text);

void write_report(const EvalReport& report, const std::filesystem::path& path,
                  ReportFormat format);
void write_report(const QueryLedger& ledger, const std::filesystem::path& path,
                  ReportFormat format);
EvalReport read_eval_report(const std::filesystem::path& path, ReportFormat format);
QueryLedger read_ledger(const std::filesystem::path& path, ReportFormat format);

// Writes `text` to `path`, throwing IoError on failure.
void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);
double parse_double(std::string_view text);

}  // namespace amcc

#endif  // AMCC_IO_HPP_

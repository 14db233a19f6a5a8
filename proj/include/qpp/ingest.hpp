#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qpp/data_model.hpp"
#include "qpp/tokenizer.hpp"

namespace qpp {

struct CorpusDoc {
  std::string doc_id;
  std::string contents;
};

using QuerySet = std::map<QueryId, Query>;

// Shortest decimal string that parses back to the same double.
std::string format_double(double value);
// Full-string decimal parse (accepts exponents); nullopt on garbage.
std::optional<double> parse_double(std::string_view text);

// TREC run: `qid Q0 docid rank score tag`. The rank column is ignored and
// ranks are recomputed from the canonical order.
RunSet read_run_file(const std::filesystem::path &path);
RunSet parse_run(std::istream &in, const std::string &source);
void write_run(std::ostream &out, const RunSet &run, std::string_view tag);

// TREC qrels: `qid 0 docid grade`.
Qrels read_qrels(const std::filesystem::path &path);
Qrels parse_qrels(std::istream &in, const std::string &source);
void write_qrels(std::ostream &out, const Qrels &qrels);

// `qid<TAB>text`, term counts from `tokenizer`.
QuerySet read_queries(const std::filesystem::path &path,
                      const Tokenizer &tokenizer);
QuerySet parse_queries(std::istream &in, const std::string &source,
                       const Tokenizer &tokenizer);
void write_queries(std::ostream &out, const QuerySet &queries);

// Streams a JSONL corpus with string fields "id" and "contents", one document
// at a time in file order. Blank lines are skipped.
class CorpusReader {
 public:
  explicit CorpusReader(const std::filesystem::path &path);
  CorpusReader(std::istream &in, std::string source);

  std::optional<CorpusDoc> next();
  std::size_t line() const noexcept { return line_; }
  const std::string &source() const noexcept { return source_; }

 private:
  std::unique_ptr<std::ifstream> owned_;
  std::istream *in_;
  std::string source_;
  std::size_t line_ = 0;
};

void write_corpus_doc(std::ostream &out, const CorpusDoc &doc);

// External predictor output: `qid<TAB>value`.
std::vector<PredictionRecord> read_predictions(const std::filesystem::path &path,
                                               const std::string &predictor);
std::vector<PredictionRecord> parse_predictions(std::istream &in,
                                                const std::string &source,
                                                const std::string &predictor);
void write_predictions(std::ostream &out,
                       const std::vector<PredictionRecord> &records);

// Prediction table as written by `predict`: `qid<TAB>predictor<TAB>value`.
std::vector<PredictionRecord>
read_prediction_table(const std::filesystem::path &path);
std::vector<PredictionRecord> parse_prediction_table(std::istream &in,
                                                     const std::string &source);

// Actuals as written by `eval-run`: `qid<TAB>metric<TAB>value`; the trailing
// `ALL` aggregate line is skipped.
std::vector<ActualRecord> read_actuals(const std::filesystem::path &path);
std::vector<ActualRecord> parse_actuals(std::istream &in,
                                        const std::string &source);

} // namespace qpp

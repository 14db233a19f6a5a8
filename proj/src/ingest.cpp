#include "qpp/ingest.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "qpp/error.hpp"

namespace qpp {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t'))
      ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t')
      ++i;
    if (i > start)
      fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

std::string_view chomp(std::string_view line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n'))
    line.remove_suffix(1);
  return line;
}

std::string_view trim(std::string_view s) {
  auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (!s.empty() && ws(s.front()))
    s.remove_prefix(1);
  while (!s.empty() && ws(s.back()))
    s.remove_suffix(1);
  return s;
}

bool is_blank(std::string_view line) { return trim(line).empty(); }

std::ifstream open_or_throw(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw InputError("cannot open " + path.string());
  return in;
}

double parse_finite(std::string_view text, const std::string &source,
                    std::size_t line, const char *what) {
  auto value = parse_double(text);
  if (!value)
    throw ParseError(source, line,
                     std::string("non-numeric ") + what + " '" +
                         std::string(text) + "'");
  if (!std::isfinite(*value))
    throw ParseError(source, line, std::string("non-finite ") + what);
  return *value;
}

// Splits `qid<TAB>rest` at the first tab.
std::pair<std::string_view, std::string_view>
split_tab(std::string_view line, const std::string &source, std::size_t n) {
  auto tab = line.find('\t');
  if (tab == std::string_view::npos)
    throw ParseError(source, n, "expected qid<TAB>value");
  auto qid = trim(line.substr(0, tab));
  if (qid.empty())
    throw ParseError(source, n, "empty query id");
  return {qid, line.substr(tab + 1)};
}

} // namespace

std::string format_double(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

std::optional<double> parse_double(std::string_view text) {
  if (text.empty())
    return std::nullopt;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(),
                                   value, std::chars_format::general);
  if (ec != std::errc() || ptr != text.data() + text.size())
    return std::nullopt;
  return value;
}

RunSet read_run_file(const std::filesystem::path &path) {
  auto in = open_or_throw(path);
  return parse_run(in, path.string());
}

RunSet parse_run(std::istream &in, const std::string &source) {
  struct Pending {
    QueryId id;
    std::vector<ScoredDoc> docs;
    std::unordered_set<std::string> seen;
  };
  std::map<std::string, Pending> pending;
  std::string raw_line;
  std::size_t n = 0;
  while (std::getline(in, raw_line)) {
    ++n;
    auto line = chomp(raw_line);
    if (is_blank(line))
      continue;
    auto fields = split_ws(line);
    if (fields.size() != 6)
      throw ParseError(source, n,
                       "expected 6 fields (qid Q0 docid rank score tag), got " +
                           std::to_string(fields.size()));
    double score = parse_finite(fields[4], source, n, "score");
    std::string qid(fields[0]);
    auto it = pending.find(qid);
    if (it == pending.end())
      it = pending.emplace(qid, Pending{parse_query_id(qid), {}, {}}).first;
    std::string doc_id(fields[2]);
    if (!it->second.seen.insert(doc_id).second)
      throw ParseError(source, n,
                       "duplicate doc " + doc_id + " for query " + qid);
    it->second.docs.push_back(ScoredDoc{std::move(doc_id), 0, score});
  }
  RunSet run;
  for (auto &[qid, p] : pending) {
    QueryId id = p.id;
    run.emplace(id, RankedList(std::move(p.id), std::move(p.docs)));
  }
  return run;
}

void write_run(std::ostream &out, const RunSet &run, std::string_view tag) {
  for (const auto &[id, list] : run)
    for (const auto &doc : list.docs())
      out << id.raw << " Q0 " << doc.doc_id << ' ' << doc.rank << ' '
          << format_double(doc.score) << ' ' << tag << '\n';
}

Qrels read_qrels(const std::filesystem::path &path) {
  auto in = open_or_throw(path);
  return parse_qrels(in, path.string());
}

Qrels parse_qrels(std::istream &in, const std::string &source) {
  Qrels qrels;
  std::string raw_line;
  std::size_t n = 0;
  while (std::getline(in, raw_line)) {
    ++n;
    auto line = chomp(raw_line);
    if (is_blank(line))
      continue;
    auto fields = split_ws(line);
    if (fields.size() != 4)
      throw ParseError(source, n,
                       "expected 4 fields (qid 0 docid grade), got " +
                           std::to_string(fields.size()));
    auto g = fields[3];
    int grade = 0;
    auto [ptr, ec] = std::from_chars(g.data(), g.data() + g.size(), grade);
    if (ec != std::errc() || ptr != g.data() + g.size())
      throw ParseError(source, n,
                       "non-integer grade '" + std::string(g) + "'");
    if (grade < 0)
      throw ParseError(source, n, "negative grade " + std::to_string(grade));
    try {
      qrels.add(parse_query_id(fields[0]), std::string(fields[2]), grade);
    } catch (const InputError &e) {
      throw ParseError(source, n, e.what());
    }
  }
  return qrels;
}

void write_qrels(std::ostream &out, const Qrels &qrels) {
  for (const auto &[id, grades] : qrels.all())
    for (const auto &[doc, grade] : grades)
      out << id.raw << " 0 " << doc << ' ' << grade << '\n';
}

QuerySet read_queries(const std::filesystem::path &path,
                      const Tokenizer &tokenizer) {
  auto in = open_or_throw(path);
  return parse_queries(in, path.string(), tokenizer);
}

QuerySet parse_queries(std::istream &in, const std::string &source,
                       const Tokenizer &tokenizer) {
  QuerySet queries;
  std::string raw_line;
  std::size_t n = 0;
  while (std::getline(in, raw_line)) {
    ++n;
    auto line = chomp(raw_line);
    if (is_blank(line))
      continue;
    auto [qid, rest] = split_tab(line, source, n);
    auto text = trim(rest);
    if (text.empty())
      throw ParseError(source, n, "empty query text");
    QueryId id = parse_query_id(qid);
    if (queries.count(id))
      throw ParseError(source, n, "duplicate query id " + id.raw);
    try {
      Query q(id, std::string(text), tokenizer.count(text));
      queries.emplace(std::move(id), std::move(q));
    } catch (const InputError &e) {
      throw ParseError(source, n, e.what());
    }
  }
  return queries;
}

void write_queries(std::ostream &out, const QuerySet &queries) {
  for (const auto &[id, q] : queries)
    out << id.raw << '\t' << q.text << '\n';
}

CorpusReader::CorpusReader(const std::filesystem::path &path)
    : owned_(std::make_unique<std::ifstream>(path, std::ios::binary)),
      in_(owned_.get()), source_(path.string()) {
  if (!*owned_)
    throw InputError("cannot open " + source_);
}

CorpusReader::CorpusReader(std::istream &in, std::string source)
    : in_(&in), source_(std::move(source)) {}

std::optional<CorpusDoc> CorpusReader::next() {
  std::string raw_line;
  while (std::getline(*in_, raw_line)) {
    ++line_;
    auto line = chomp(raw_line);
    if (is_blank(line))
      continue;
    auto json = nlohmann::json::parse(line, nullptr, false);
    if (json.is_discarded())
      throw ParseError(source_, line_, "malformed JSON");
    if (!json.is_object())
      throw ParseError(source_, line_, "expected a JSON object");
    auto id = json.find("id");
    auto contents = json.find("contents");
    if (id == json.end() || !id->is_string())
      throw ParseError(source_, line_, "missing string field \"id\"");
    if (contents == json.end() || !contents->is_string())
      throw ParseError(source_, line_, "missing string field \"contents\"");
    CorpusDoc doc{id->get<std::string>(), contents->get<std::string>()};
    if (doc.doc_id.empty())
      throw ParseError(source_, line_, "empty document id");
    return doc;
  }
  return std::nullopt;
}

void write_corpus_doc(std::ostream &out, const CorpusDoc &doc) {
  nlohmann::json json{{"id", doc.doc_id}, {"contents", doc.contents}};
  out << json.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace)
      << '\n';
}

std::vector<PredictionRecord> read_predictions(const std::filesystem::path &path,
                                               const std::string &predictor) {
  auto in = open_or_throw(path);
  return parse_predictions(in, path.string(), predictor);
}

std::vector<PredictionRecord> parse_predictions(std::istream &in,
                                                const std::string &source,
                                                const std::string &predictor) {
  std::vector<PredictionRecord> out;
  std::unordered_set<std::string> seen;
  std::string raw_line;
  std::size_t n = 0;
  while (std::getline(in, raw_line)) {
    ++n;
    auto line = chomp(raw_line);
    if (is_blank(line))
      continue;
    auto [qid, rest] = split_tab(line, source, n);
    double value = parse_finite(trim(rest), source, n, "prediction");
    if (!seen.insert(std::string(qid)).second)
      throw ParseError(source, n, "duplicate query id " + std::string(qid));
    out.emplace_back(parse_query_id(qid), predictor, value);
  }
  return out;
}

void write_predictions(std::ostream &out,
                       const std::vector<PredictionRecord> &records) {
  for (const auto &r : records)
    out << r.query_id.raw << '\t' << format_double(r.value) << '\n';
}

std::vector<PredictionRecord>
read_prediction_table(const std::filesystem::path &path) {
  auto in = open_or_throw(path);
  return parse_prediction_table(in, path.string());
}

std::vector<PredictionRecord> parse_prediction_table(std::istream &in,
                                                     const std::string &source) {
  std::vector<PredictionRecord> out;
  std::set<std::pair<std::string, std::string>> seen;
  std::string raw_line;
  std::size_t n = 0;
  while (std::getline(in, raw_line)) {
    ++n;
    auto line = chomp(raw_line);
    if (is_blank(line))
      continue;
    auto fields = split_ws(line);
    if (fields.size() != 3)
      throw ParseError(source, n, "expected qid<TAB>predictor<TAB>value");
    double value = parse_finite(fields[2], source, n, "prediction");
    std::string qid(fields[0]), predictor(fields[1]);
    if (!seen.emplace(predictor, qid).second)
      throw ParseError(source, n,
                       "duplicate row for " + predictor + "/" + qid);
    out.emplace_back(parse_query_id(qid), std::move(predictor), value);
  }
  return out;
}

std::vector<ActualRecord> read_actuals(const std::filesystem::path &path) {
  auto in = open_or_throw(path);
  return parse_actuals(in, path.string());
}

std::vector<ActualRecord> parse_actuals(std::istream &in,
                                        const std::string &source) {
  std::vector<ActualRecord> out;
  std::set<std::pair<std::string, std::string>> seen;
  std::string raw_line;
  std::size_t n = 0;
  while (std::getline(in, raw_line)) {
    ++n;
    auto line = chomp(raw_line);
    if (is_blank(line))
      continue;
    auto fields = split_ws(line);
    if (fields.size() != 3)
      throw ParseError(source, n, "expected qid<TAB>metric<TAB>value");
    if (fields[0] == "ALL")
      continue;
    double value = parse_finite(fields[2], source, n, "metric value");
    if (value < 0.0 || value > 1.0)
      throw ParseError(source, n, "metric value outside [0,1]");
    std::string qid(fields[0]), metric(fields[1]);
    if (!seen.emplace(metric, qid).second)
      throw ParseError(source, n, "duplicate row for " + metric + "/" + qid);
    out.emplace_back(parse_query_id(qid), std::move(metric), value);
  }
  return out;
}

} // namespace qpp

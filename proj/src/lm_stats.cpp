#include "qpp/lm_stats.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include <openssl/evp.h>

#include "qpp/error.hpp"

namespace qpp {

void CollectionStats::add_document(std::string_view text,
                                   const Tokenizer &tokenizer) {
  tokenizer.for_each_token(text, [&](const std::string &t) {
    ++term_freq_[t];
    ++total_terms_;
  });
}

void CollectionStats::add_term(const std::string &term, std::uint64_t count) {
  if (count == 0)
    return;
  term_freq_[term] += count;
  total_terms_ += count;
}

void CollectionStats::merge(const CollectionStats &other) {
  for (const auto &[term, count] : other.term_freq_)
    term_freq_[term] += count;
  total_terms_ += other.total_terms_;
}

std::uint64_t CollectionStats::count(const std::string &term) const {
  auto it = term_freq_.find(term);
  return it == term_freq_.end() ? 0 : it->second;
}

std::optional<double>
CollectionStats::probability(const std::string &term) const {
  auto it = term_freq_.find(term);
  if (it == term_freq_.end() || total_terms_ == 0)
    return std::nullopt;
  return static_cast<double>(it->second) / static_cast<double>(total_terms_);
}

void CollectionStats::write(std::ostream &out) const {
  std::vector<const std::pair<const std::string, std::uint64_t> *> sorted;
  sorted.reserve(term_freq_.size());
  for (const auto &entry : term_freq_)
    sorted.push_back(&entry);
  std::sort(sorted.begin(), sorted.end(),
            [](auto *a, auto *b) { return a->first < b->first; });
  out << total_terms_ << '\t' << term_freq_.size() << '\n';
  for (const auto *entry : sorted)
    out << entry->first << '\t' << entry->second << '\n';
}

namespace {
std::optional<std::uint64_t> parse_count(std::string_view s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    return std::nullopt;
  return v;
}
} // namespace

CollectionStats CollectionStats::read(std::istream &in,
                                      const std::string &source) {
  CollectionStats stats;
  std::string line;
  if (!std::getline(in, line))
    throw ParseError(source, 1, "missing header");
  auto tab = line.find('\t');
  if (tab == std::string::npos)
    throw ParseError(source, 1, "expected total_terms<TAB>vocab_size");
  auto total = parse_count(std::string_view(line).substr(0, tab));
  auto vocab = parse_count(std::string_view(line).substr(tab + 1));
  if (!total || !vocab)
    throw ParseError(source, 1, "non-integer header field");
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    tab = line.find('\t');
    if (tab == std::string::npos || tab == 0)
      throw ParseError(source, n, "expected term<TAB>count");
    auto count = parse_count(std::string_view(line).substr(tab + 1));
    if (!count || *count == 0)
      throw ParseError(source, n, "count must be a positive integer");
    auto [it, inserted] = stats.term_freq_.emplace(line.substr(0, tab), *count);
    if (!inserted)
      throw ParseError(source, n, "duplicate term " + it->first);
    stats.total_terms_ += *count;
  }
  if (stats.total_terms_ != *total || stats.term_freq_.size() != *vocab)
    throw ParseError(source, 1, "header does not match the term lines");
  return stats;
}

void CollectionStats::save(const std::filesystem::path &path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw InputError("cannot write " + path.string());
  write(out);
}

CollectionStats CollectionStats::load(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw InputError("cannot open " + path.string());
  return read(in, path.string());
}

CollectionStats
build_collection_stats(CorpusReader &corpus, const Tokenizer &tokenizer,
                       const std::function<void(std::uint64_t)> &progress,
                       std::uint64_t progress_every) {
  CollectionStats stats;
  std::uint64_t docs = 0;
  while (auto doc = corpus.next()) {
    stats.add_document(doc->contents, tokenizer);
    ++docs;
    if (progress && progress_every && docs % progress_every == 0)
      progress(docs);
  }
  if (stats.total_terms() == 0)
    throw DegenerateError("corpus contains no tokens");
  return stats;
}

std::string sha256_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw InputError("cannot open " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(
      EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
    throw Error("sha256 init failed");
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() > 0)
      EVP_DigestUpdate(ctx.get(), buf.data(),
                       static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &len);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

void DocTextStore::add(std::string doc_id, std::string text) {
  texts_.insert_or_assign(std::move(doc_id), std::move(text));
}

const std::string *DocTextStore::find(const std::string &doc_id) const {
  auto it = texts_.find(doc_id);
  return it == texts_.end() ? nullptr : &it->second;
}

DocTextStore DocTextStore::load(CorpusReader &corpus,
                                const std::unordered_set<std::string> &wanted) {
  DocTextStore store;
  while (auto doc = corpus.next()) {
    if (!wanted.count(doc->doc_id))
      continue;
    if (store.find(doc->doc_id))
      throw ParseError(corpus.source(), corpus.line(),
                       "duplicate document id " + doc->doc_id);
    store.add(std::move(doc->doc_id), std::move(doc->contents));
  }
  return store;
}

std::vector<double> weights_from_scores(const RankedList &list,
                                        std::size_t top_docs,
                                        WeightMode mode) {
  if (list.empty())
    throw InputError("cannot weight an empty ranked list");
  if (top_docs == 0)
    throw InputError("top_docs must be at least 1");
  std::vector<double> w = list.scores(top_docs);
  if (mode == WeightMode::uniform) {
    std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(w.size()));
    return w;
  }
  constexpr double kEpsilon = 1e-9;
  double lowest = *std::min_element(w.begin(), w.end());
  if (lowest <= 0.0)
    for (double &x : w)
      x = x - lowest + kEpsilon;
  double sum = 0.0;
  for (double x : w)
    sum += x;
  for (double &x : w)
    x /= sum;
  return w;
}

RelevanceModel build_relevance_model(const RankedList &list,
                                     const DocTextSource &texts,
                                     std::span<const double> weights,
                                     std::size_t top_docs,
                                     std::size_t clip_terms,
                                     const Tokenizer &tokenizer) {
  if (top_docs == 0 || clip_terms == 0)
    throw InputError("top_docs and clip_terms must be at least 1");
  std::size_t k = std::min(top_docs, list.size());
  if (k == 0)
    throw InputError("relevance model needs a non-empty ranked list");
  if (weights.size() != k)
    throw InputError("expected " + std::to_string(k) + " document weights, got " +
                     std::to_string(weights.size()));
  double weight_sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw InputError("document weights must be finite and nonnegative");
    weight_sum += w;
  }
  if (!(weight_sum > 0.0))
    throw DegenerateError("document weights sum to zero");

  RelevanceModel rm;
  rm.clipped_at = clip_terms;
  std::map<std::string, double> mixture;
  auto docs = list.docs();
  for (std::size_t i = 0; i < k; ++i) {
    const std::string *text = texts.find(docs[i].doc_id);
    if (!text)
      throw InputError("no text for document " + docs[i].doc_id +
                       " (query " + list.query_id().raw + ")");
    double w = weights[i] / weight_sum;
    if (w == 0.0)
      continue;
    std::map<std::string, std::uint64_t> tf;
    std::uint64_t length = 0;
    tokenizer.for_each_token(*text, [&](const std::string &t) {
      ++tf[t];
      ++length;
    });
    if (length == 0)
      continue;
    ++rm.source_doc_count;
    for (const auto &[term, count] : tf)
      mixture[term] +=
          w * static_cast<double>(count) / static_cast<double>(length);
  }
  if (rm.source_doc_count == 0)
    throw DegenerateError("top documents of query " + list.query_id().raw +
                          " contain no tokens");

  std::vector<std::pair<std::string, double>> ranked(mixture.begin(),
                                                     mixture.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto &a, const auto &b) { return a.second > b.second; });
  if (ranked.size() > clip_terms)
    ranked.resize(clip_terms);
  double mass = 0.0;
  for (const auto &[term, p] : ranked)
    mass += p;
  for (auto &[term, p] : ranked)
    rm.probs.emplace(std::move(term), p / mass);
  return rm;
}

} // namespace qpp

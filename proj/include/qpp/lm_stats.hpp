#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "qpp/data_model.hpp"
#include "qpp/ingest.hpp"
#include "qpp/tokenizer.hpp"

namespace qpp {

// Maximum-likelihood collection language model: P(w|D) = tf(w) / |D|.
class CollectionStats {
 public:
  void add_document(std::string_view text, const Tokenizer &tokenizer);
  void add_term(const std::string &term, std::uint64_t count = 1);
  // Shard merge; associative and commutative.
  void merge(const CollectionStats &other);

  std::uint64_t total_terms() const noexcept { return total_terms_; }
  std::uint64_t vocab_size() const noexcept { return term_freq_.size(); }
  std::uint64_t count(const std::string &term) const;
  // nullopt when the term never occurs in the collection.
  std::optional<double> probability(const std::string &term) const;

  // Sidecar format: `total_terms<TAB>vocab_size`, then `term<TAB>count`
  // lines sorted by term.
  void write(std::ostream &out) const;
  static CollectionStats read(std::istream &in, const std::string &source);
  void save(const std::filesystem::path &path) const;
  static CollectionStats load(const std::filesystem::path &path);

  bool operator==(const CollectionStats &other) const = default;

 private:
  std::uint64_t total_terms_ = 0;
  std::unordered_map<std::string, std::uint64_t> term_freq_;
};

// Streams the whole corpus. Throws DegenerateError if it holds no tokens.
// `progress` is called every `progress_every` documents.
CollectionStats build_collection_stats(
    CorpusReader &corpus, const Tokenizer &tokenizer,
    const std::function<void(std::uint64_t)> &progress = {},
    std::uint64_t progress_every = 1'000'000);

// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path &path);

// Resolves doc ids to raw document text.
class DocTextSource {
 public:
  virtual ~DocTextSource() = default;
  virtual const std::string *find(const std::string &doc_id) const = 0;
};

class DocTextStore final : public DocTextSource {
 public:
  void add(std::string doc_id, std::string text);
  const std::string *find(const std::string &doc_id) const override;
  std::size_t size() const noexcept { return texts_.size(); }

  // Keeps only the documents whose ids are in `wanted`.
  static DocTextStore load(CorpusReader &corpus,
                           const std::unordered_set<std::string> &wanted);

 private:
  std::unordered_map<std::string, std::string> texts_;
};

struct RelevanceModel {
  std::map<std::string, double> probs;
  std::size_t source_doc_count = 0;
  std::size_t clipped_at = 0;
};

enum class WeightMode { sum_normalized, uniform };

// Per-document mixture weights for the first min(top_docs, n) documents.
// sum_normalized divides the scores by their sum; if any of those scores is
// nonpositive they are first shifted to (score - min + 1e-9).
std::vector<double> weights_from_scores(const RankedList &list,
                                        std::size_t top_docs, WeightMode mode);

// RM1-style mixture of unsmoothed document models over the first
// min(top_docs, n) documents of `list` (one weight each), clipped to the
// `clip_terms` most probable terms (ties by term) and renormalized.
RelevanceModel build_relevance_model(const RankedList &list,
                                     const DocTextSource &texts,
                                     std::span<const double> weights,
                                     std::size_t top_docs,
                                     std::size_t clip_terms,
                                     const Tokenizer &tokenizer);

} // namespace qpp

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace qpp {

// Splits text into maximal runs of token bytes: ASCII letters and digits, plus
// any byte >= 0x80 so that UTF-8 encoded words stay whole. ASCII letters are
// lowercased when enabled. Locale-independent.
class Tokenizer {
 public:
  Tokenizer() = default;
  explicit Tokenizer(std::unordered_set<std::string> stopwords,
                     bool lowercase = true)
      : stopwords_(std::move(stopwords)), lowercase_(lowercase) {}

  std::vector<std::string> tokenize(std::string_view text) const;

  template <class Fn> void for_each_token(std::string_view text, Fn &&fn) const {
    std::string token;
    auto flush = [&] {
      if (!token.empty() && !is_stopword(token))
        fn(token);
      token.clear();
    };
    for (char c : text) {
      if (is_token_byte(c))
        token.push_back(lowercase_ ? to_lower(c) : c);
      else
        flush();
    }
    flush();
  }

  std::size_t count(std::string_view text) const;

  bool lowercase() const noexcept { return lowercase_; }
  const std::unordered_set<std::string> &stopwords() const noexcept {
    return stopwords_;
  }

 private:
  static bool is_token_byte(char c) {
    auto u = static_cast<unsigned char>(c);
    return (u >= '0' && u <= '9') || (u >= 'a' && u <= 'z') ||
           (u >= 'A' && u <= 'Z') || u >= 0x80;
  }
  static char to_lower(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
  }
  bool is_stopword(const std::string &token) const {
    return !stopwords_.empty() && stopwords_.count(token) != 0;
  }

  std::unordered_set<std::string> stopwords_;
  bool lowercase_ = true;
};

// One stopword per line; blank lines and lines starting with '#' ignored.
// Entries are lowercased to match the default tokenizer.
std::unordered_set<std::string> read_stopwords(const std::filesystem::path &path);

} // namespace qpp

#include "qpp/tokenizer.hpp"

#include <fstream>

#include "qpp/error.hpp"

namespace qpp {

std::vector<std::string> Tokenizer::tokenize(std::string_view text) const {
  std::vector<std::string> out;
  for_each_token(text, [&](const std::string &t) { out.push_back(t); });
  return out;
}

std::size_t Tokenizer::count(std::string_view text) const {
  std::size_t n = 0;
  for_each_token(text, [&](const std::string &) { ++n; });
  return n;
}

std::unordered_set<std::string> read_stopwords(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw InputError("cannot open stopword file " + path.string());
  std::unordered_set<std::string> out;
  Tokenizer plain;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#')
      continue;
    plain.for_each_token(line, [&](const std::string &t) { out.insert(t); });
  }
  return out;
}

} // namespace qpp

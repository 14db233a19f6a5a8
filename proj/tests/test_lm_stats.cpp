#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "qpp/error.hpp"
#include "qpp/lm_stats.hpp"

using namespace qpp;

namespace {
RankedList make_list(std::vector<std::pair<std::string, double>> docs) {
  std::vector<ScoredDoc> out;
  for (auto &[id, s] : docs)
    out.push_back({id, 0, s});
  return RankedList(parse_query_id("q"), std::move(out));
}

CollectionStats stats_of(const std::vector<std::string> &docs) {
  CollectionStats s;
  Tokenizer tok;
  for (const auto &d : docs)
    s.add_document(d, tok);
  return s;
}
} // namespace

TEST(TokenizerTest, Examples) {
  Tokenizer tok;
  EXPECT_EQ(tok.tokenize("Throat Cancer?"),
            (std::vector<std::string>{"throat", "cancer"}));
  EXPECT_TRUE(tok.tokenize("").empty());
  EXPECT_EQ(tok.tokenize("state-of-the-art 5G"),
            (std::vector<std::string>{"state", "of", "the", "art", "5g"}));
  EXPECT_EQ(tok.tokenize("What is a physician's assistant?"),
            (std::vector<std::string>{"what", "is", "a", "physician", "s",
                                      "assistant"}));
}

TEST(TokenizerTest, StopwordsAndCase) {
  Tokenizer tok({"the", "of"});
  EXPECT_EQ(tok.tokenize("The Art of War"),
            (std::vector<std::string>{"art", "war"}));
  Tokenizer keep({}, false);
  EXPECT_EQ(keep.tokenize("Art"), (std::vector<std::string>{"Art"}));
}

TEST(TokenizerTest, Utf8WordsStayWhole) {
  Tokenizer tok;
  EXPECT_EQ(tok.tokenize("caf\xc3\xa9 au lait"),
            (std::vector<std::string>{"caf\xc3\xa9", "au", "lait"}));
}

TEST(CollectionStatsTest, MaximumLikelihood) {
  auto s = stats_of({"a a b"});
  EXPECT_DOUBLE_EQ(*s.probability("a"), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(*s.probability("b"), 1.0 / 3.0);
  EXPECT_FALSE(s.probability("c"));

  auto two = stats_of({"a", "b"});
  EXPECT_EQ(two.total_terms(), 2u);
  EXPECT_EQ(two.vocab_size(), 2u);
}

TEST(CollectionStatsTest, ProbabilitiesSumToOne) {
  auto s = stats_of({"the quick brown fox", "jumps over the lazy dog", "the end"});
  double sum = 0.0;
  for (const char *w : {"the", "quick", "brown", "fox", "jumps", "over", "lazy",
                        "dog", "end"})
    sum += *s.probability(w);
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(CollectionStatsTest, EmptyCorpusIsAnError) {
  std::istringstream in("{\"id\":\"a\",\"contents\":\"\"}\n{\"id\":\"b\",\"contents\":\"?!\"}\n");
  CorpusReader reader(in, "c");
  EXPECT_THROW(build_collection_stats(reader, Tokenizer()), DegenerateError);
}

TEST(CollectionStatsTest, ShardMergeEqualsConcatenation) {
  std::mt19937_64 rng(17);
  std::vector<std::string> docs;
  for (int i = 0; i < 60; ++i) {
    std::string d;
    for (int w = 0; w < 12; ++w)
      d += "w" + std::to_string(rng() % 40) + " ";
    docs.push_back(d);
  }
  auto whole = stats_of(docs);
  for (std::size_t cut1 : {0u, 13u, 30u})
    for (std::size_t cut2 : {30u, 45u, 60u}) {
      auto a = stats_of({docs.begin(), docs.begin() + cut1});
      auto b = stats_of({docs.begin() + cut1, docs.begin() + cut2});
      auto c = stats_of({docs.begin() + cut2, docs.end()});
      auto left = a;
      left.merge(b);
      left.merge(c);
      auto bc = b;
      bc.merge(c);
      auto right = a;
      right.merge(bc);
      EXPECT_EQ(left, whole);
      EXPECT_EQ(right, whole);
    }
}

TEST(CollectionStatsTest, SidecarRoundTripAndFormat) {
  auto s = stats_of({"b a a", "c"});
  std::ostringstream out;
  s.write(out);
  EXPECT_EQ(out.str(), "4\t3\na\t2\nb\t1\nc\t1\n");
  std::istringstream in(out.str());
  EXPECT_EQ(CollectionStats::read(in, "s"), s);
}

TEST(CollectionStatsTest, SidecarRejectsInconsistentHeader) {
  std::istringstream in("5\t2\na\t2\nb\t1\n");
  EXPECT_THROW(CollectionStats::read(in, "s"), ParseError);
  std::istringstream bad_count("1\t1\na\tzero\n");
  EXPECT_THROW(CollectionStats::read(bad_count, "s"), ParseError);
}

TEST(WeightsTest, SumNormalized) {
  auto w = weights_from_scores(make_list({{"a", 3}, {"b", 1}}), 10,
                               WeightMode::sum_normalized);
  ASSERT_EQ(w.size(), 2u);
  EXPECT_DOUBLE_EQ(w[0], 0.75);
  EXPECT_DOUBLE_EQ(w[1], 0.25);
  auto eq = weights_from_scores(
      make_list({{"a", 5}, {"b", 5}, {"c", 5}, {"d", 5}}), 4,
      WeightMode::sum_normalized);
  for (double x : eq)
    EXPECT_DOUBLE_EQ(x, 0.25);
}

TEST(WeightsTest, ShiftsNonPositiveScores) {
  auto w = weights_from_scores(make_list({{"a", 2}, {"b", -1}}), 2,
                               WeightMode::sum_normalized);
  // oracle: tests/oracles/derived_values.py (shift_w0, shift_w1)
  EXPECT_NEAR(w[0], 0.99999999966666664, 1e-15);
  EXPECT_NEAR(w[1], 3.3333333311111109e-10, 1e-20);
}

TEST(WeightsTest, UniformAndErrors) {
  auto w = weights_from_scores(make_list({{"a", 2}, {"b", 1}, {"c", 0}}), 2,
                               WeightMode::uniform);
  EXPECT_EQ(w, (std::vector<double>{0.5, 0.5}));
  EXPECT_THROW(weights_from_scores(RankedList(parse_query_id("q"), {}), 2,
                                   WeightMode::uniform),
               InputError);
}

TEST(WeightsTest, AlwaysAProbabilityVector) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> d(-100.0, 100.0);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::pair<std::string, double>> docs;
    std::size_t n = 1 + rng() % 50;
    for (std::size_t i = 0; i < n; ++i)
      docs.push_back({"d" + std::to_string(i), d(rng)});
    auto w = weights_from_scores(make_list(docs), 1 + rng() % 60,
                                 WeightMode::sum_normalized);
    double sum = 0.0;
    for (double x : w) {
      EXPECT_GE(x, 0.0);
      sum += x;
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(RelevanceModelTest, SingleDocument) {
  DocTextStore texts;
  texts.add("d1", "a a b");
  std::vector<double> w{1.0};
  auto rm = build_relevance_model(make_list({{"d1", 1}}), texts, w, 1, 10,
                                  Tokenizer());
  EXPECT_DOUBLE_EQ(rm.probs.at("a"), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(rm.probs.at("b"), 1.0 / 3.0);
  EXPECT_EQ(rm.source_doc_count, 1u);
}

TEST(RelevanceModelTest, WeightedMixture) {
  DocTextStore texts;
  texts.add("d1", "a");
  texts.add("d2", "b");
  std::vector<double> w{3.0, 1.0};
  auto rm = build_relevance_model(make_list({{"d1", 2}, {"d2", 1}}), texts, w,
                                  2, 10, Tokenizer());
  EXPECT_DOUBLE_EQ(rm.probs.at("a"), 0.75);
  EXPECT_DOUBLE_EQ(rm.probs.at("b"), 0.25);
}

TEST(RelevanceModelTest, ClipTieBreaksLexicographically) {
  DocTextStore texts;
  texts.add("d1", "b");
  texts.add("d2", "a");
  std::vector<double> w{1.0, 1.0};
  auto rm = build_relevance_model(make_list({{"d1", 2}, {"d2", 1}}), texts, w,
                                  2, 1, Tokenizer());
  ASSERT_EQ(rm.probs.size(), 1u);
  EXPECT_EQ(rm.probs.begin()->first, "a");
  EXPECT_EQ(rm.probs.begin()->second, 1.0);
  EXPECT_EQ(rm.clipped_at, 1u);
}

TEST(RelevanceModelTest, Errors) {
  DocTextStore texts;
  texts.add("d1", "?!");
  std::vector<double> one{1.0};
  EXPECT_THROW(build_relevance_model(make_list({{"dx", 1}}), texts, one, 1, 5,
                                     Tokenizer()),
               InputError);
  EXPECT_THROW(build_relevance_model(make_list({{"d1", 1}}), texts, one, 1, 5,
                                     Tokenizer()),
               DegenerateError);
  std::vector<double> zero{0.0};
  texts.add("d2", "x");
  EXPECT_THROW(build_relevance_model(make_list({{"d2", 1}}), texts, zero, 1, 5,
                                     Tokenizer()),
               DegenerateError);
  std::vector<double> two{0.5, 0.5};
  EXPECT_THROW(build_relevance_model(make_list({{"d2", 1}}), texts, two, 1, 5,
                                     Tokenizer()),
               InputError);
}

TEST(RelevanceModelTest, NormalizedAndClipped) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    DocTextStore texts;
    std::vector<std::pair<std::string, double>> docs;
    std::size_t n = 1 + rng() % 30;
    for (std::size_t i = 0; i < n; ++i) {
      std::string t;
      for (int w = 0; w < 1 + static_cast<int>(rng() % 30); ++w)
        t += "w" + std::to_string(rng() % 80) + " ";
      texts.add("d" + std::to_string(i), t);
      docs.push_back({"d" + std::to_string(i), static_cast<double>(rng() % 100) - 20});
    }
    auto list = make_list(docs);
    std::size_t top = 1 + rng() % 30, clip = 1 + rng() % 50;
    auto w = weights_from_scores(list, top, WeightMode::sum_normalized);
    auto rm = build_relevance_model(list, texts, w, top, clip, Tokenizer());
    double sum = 0.0;
    for (auto &[term, p] : rm.probs) {
      EXPECT_GT(p, 0.0);
      sum += p;
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
    EXPECT_LE(rm.probs.size(), clip);
  }
}

#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "qpp/effectiveness.hpp"
#include "qpp/error.hpp"

using namespace qpp;

namespace {
RankedList list_of(const std::vector<std::string> &ids) {
  std::vector<ScoredDoc> docs;
  for (std::size_t i = 0; i < ids.size(); ++i)
    docs.push_back({ids[i], 0, static_cast<double>(ids.size() - i)});
  return RankedList(parse_query_id("q"), std::move(docs));
}

Qrels qrels_of(const std::vector<std::pair<std::string, int>> &grades) {
  Qrels q;
  for (auto &[d, g] : grades)
    q.add(parse_query_id("q"), d, g);
  return q;
}
} // namespace

TEST(MetricSpecTest, Parse) {
  auto s = MetricSpec::parse("ndcg@3");
  EXPECT_EQ(s.kind, MetricKind::ndcg);
  EXPECT_EQ(s.cutoff, 3u);
  EXPECT_EQ(MetricSpec::parse("recall@100").name(), "recall@100");
  for (const char *bad : {"ndcg", "ndcg@0", "map@10", "ndcg@x", "recall@"})
    EXPECT_THROW(MetricSpec::parse(bad), InputError) << bad;
}

TEST(NdcgTest, IdealSingleRelevant) {
  auto v = ndcg_at_k(list_of({"r", "x", "y"}), qrels_of({{"r", 1}}), 3);
  EXPECT_EQ(*v, 1.0);
}

TEST(NdcgTest, HandComputedGradedExample) {
  // ranks hold grades [1, 0, 2]; qrels grades {2, 1} plus a judged 0
  auto v = ndcg_at_k(list_of({"g1", "g0", "g2"}),
                     qrels_of({{"g1", 1}, {"g2", 2}, {"g0", 0}}), 3);
  // oracle: tests/oracles/derived_values.py (ndcg@3)
  EXPECT_NEAR(*v, 0.76018753343186851, 1e-12);
}

TEST(NdcgTest, NoRelevantInTopK) {
  auto v = ndcg_at_k(list_of({"a", "b", "c", "r"}), qrels_of({{"r", 2}}), 3);
  EXPECT_EQ(*v, 0.0);
}

TEST(NdcgTest, UnjudgeableQueries) {
  EXPECT_FALSE(ndcg_at_k(list_of({"a"}), Qrels(), 3));
  EXPECT_FALSE(ndcg_at_k(list_of({"a"}), qrels_of({{"a", 0}}), 3));
}

TEST(NdcgTest, ExponentialGain) {
  auto v = ndcg_at_k(list_of({"g1", "g2"}), qrels_of({{"g1", 1}, {"g2", 2}}),
                     2, Gain::exponential);
  double dcg = 1.0 / 1.0 + 3.0 / std::log2(3.0);
  double idcg = 3.0 / 1.0 + 1.0 / std::log2(3.0);
  EXPECT_NEAR(*v, dcg / idcg, 1e-15);
}

TEST(RecallTest, Examples) {
  EXPECT_EQ(*recall_at_k(list_of({"a", "b", "x"}), qrels_of({{"a", 1}, {"b", 2}}), 100), 1.0);
  EXPECT_EQ(*recall_at_k(list_of({"a", "x", "y"}),
                         qrels_of({{"a", 1}, {"b", 1}, {"c", 1}, {"d", 1}}), 100),
            0.25);
  EXPECT_EQ(*recall_at_k(list_of({"d2"}), qrels_of({{"d1", 2}, {"d2", 1}}), 10, 2),
            0.0);
  EXPECT_FALSE(recall_at_k(list_of({"d2"}), qrels_of({{"d2", 1}}), 10, 2));
}

TEST(EffectivenessProperties, RandomizedInvariants) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 300; ++trial) {
    std::size_t n = 1 + rng() % 60;
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i)
      ids.push_back("d" + std::to_string(i));
    std::shuffle(ids.begin(), ids.end(), rng);
    std::map<std::string, int> graded;
    for (std::size_t i = 0; i < n + 10; ++i)
      if (rng() % 3 == 0)
        graded["d" + std::to_string(i)] = static_cast<int>(rng() % 4);
    graded["d0"] = 1 + static_cast<int>(rng() % 3);
    std::vector<std::pair<std::string, int>> grades(graded.begin(), graded.end());
    Qrels qrels = qrels_of(grades);
    auto list = list_of(ids);
    std::size_t k = 1 + rng() % (n + 5);

    double ndcg = *ndcg_at_k(list, qrels, k);
    EXPECT_GE(ndcg, 0.0);
    EXPECT_LE(ndcg, 1.0);

    // Permuting below rank k changes nothing.
    if (k < n) {
      auto permuted = ids;
      std::shuffle(permuted.begin() + static_cast<long>(k), permuted.end(), rng);
      EXPECT_EQ(*ndcg_at_k(list_of(permuted), qrels, k), ndcg);
    }

    // Appending unjudged documents changes nothing at k <= n.
    auto longer = ids;
    longer.push_back("unjudged-1");
    longer.push_back("unjudged-2");
    std::size_t kk = std::min(k, n);
    EXPECT_EQ(*ndcg_at_k(list_of(longer), qrels, kk), *ndcg_at_k(list, qrels, kk));
    EXPECT_EQ(*recall_at_k(list_of(longer), qrels, kk),
              *recall_at_k(list, qrels, kk));

    // Recall monotone in k.
    double prev = 0.0;
    for (std::size_t c = 1; c <= n + 2; ++c) {
      double r = *recall_at_k(list, qrels, c);
      EXPECT_GE(r, prev);
      prev = r;
    }

    // The ideal ordering scores exactly 1.
    auto ideal = grades;
    std::stable_sort(ideal.begin(), ideal.end(),
                     [](auto &a, auto &b) { return a.second > b.second; });
    std::vector<std::string> ideal_ids;
    for (auto &[d, g] : ideal)
      ideal_ids.push_back(d);
    EXPECT_EQ(*ndcg_at_k(list_of(ideal_ids), qrels, k), 1.0);
  }
}

TEST(ActualsTest, MeanAndUnjudged) {
  RunSet run;
  Qrels qrels;
  auto add = [&](const std::string &qid, std::vector<std::string> docs) {
    std::vector<ScoredDoc> sd;
    for (std::size_t i = 0; i < docs.size(); ++i)
      sd.push_back({docs[i], 0, 10.0 - static_cast<double>(i)});
    auto id = parse_query_id(qid);
    run.emplace(id, RankedList(id, sd));
  };
  add("a", {"r", "x", "y"});
  add("b", {"x", "r", "y"});
  add("c", {"x", "y", "z"});
  qrels.add(parse_query_id("a"), "r", 1);
  qrels.add(parse_query_id("b"), "r", 1);
  qrels.add(parse_query_id("d"), "r", 1);
  auto result = actuals_for_run(run, qrels, MetricSpec::parse("recall@1"));
  EXPECT_EQ(result.records.size(), 2u);
  EXPECT_EQ(result.unjudged, 1u);
  EXPECT_EQ(*result.mean, 0.5);
  std::ostringstream out;
  write_actuals(out, result);
  EXPECT_EQ(out.str(), "a\trecall@1\t1\nb\trecall@1\t0\nALL\trecall@1\t0.5\n");

  auto none = actuals_for_run(run, Qrels(), MetricSpec::parse("ndcg@3"));
  EXPECT_TRUE(none.records.empty());
  EXPECT_FALSE(none.mean);
}

TEST(ActualsTest, ArithmeticMean) {
  RunSet run;
  Qrels qrels;
  // nDCG@3 of 0.2/0.4/0.6 is awkward to engineer; use recall@5 with 5
  // relevant docs each and 1, 2, 3 retrieved.
  for (int q = 1; q <= 3; ++q) {
    auto id = parse_query_id("q" + std::to_string(q));
    std::vector<ScoredDoc> docs;
    for (int i = 0; i < 5; ++i) {
      std::string d = "d" + std::to_string(i);
      docs.push_back({i < q ? d : "n" + std::to_string(i), 0, 5.0 - i});
      qrels.add(id, d, 1);
    }
    run.emplace(id, RankedList(id, docs));
  }
  auto result = actuals_for_run(run, qrels, MetricSpec::parse("recall@5"));
  EXPECT_NEAR(*result.mean, 0.4, 1e-15);
}

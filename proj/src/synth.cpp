#include "qpp/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <string>

#include "qpp/error.hpp"

namespace qpp {

namespace {

constexpr std::size_t kGeneralVocab = 3000;
constexpr std::size_t kTopicVocab = 40;
constexpr std::size_t kPoolExtra = 200;

std::string general_word(std::size_t i) { return "w" + std::to_string(i); }

std::string topic_word(std::size_t topic, std::size_t i) {
  return "t" + std::to_string(topic) + "x" + std::to_string(i);
}

class Generator {
 public:
  explicit Generator(std::uint64_t seed) : rng_(seed) {}

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }
  double normal(double sd) { return std::normal_distribution<double>(0.0, sd)(rng_); }
  std::size_t below(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
  }
  std::mt19937_64 &engine() { return rng_; }

  // Skewed draw over the general vocabulary so the collection model is not flat.
  std::size_t zipfish(std::size_t n) {
    double u = uniform();
    return std::min(n - 1, static_cast<std::size_t>(std::pow(u, 2.5) * n));
  }

 private:
  std::mt19937_64 rng_;
};

std::string make_text(Generator &g, std::size_t topic,
                      const std::vector<std::string> &boost_terms,
                      double boost_rate) {
  std::size_t len = 15 + g.below(25);
  std::string text;
  for (std::size_t i = 0; i < len; ++i) {
    double u = g.uniform();
    std::string word;
    if (!boost_terms.empty() && u < boost_rate)
      word = boost_terms[g.below(boost_terms.size())];
    else if (u < boost_rate + 0.25)
      word = topic_word(topic, g.below(kTopicVocab));
    else
      word = general_word(g.zipfish(kGeneralVocab));
    if (!text.empty())
      text.push_back(' ');
    text += word;
  }
  return text;
}

} // namespace

SynthDataset generate_synth(const SynthConfig &config) {
  if (config.queries == 0 || config.depth < 10 || config.turns_per_topic == 0)
    throw InputError("synthetic benchmark needs >= 1 query, depth >= 10 and "
                     ">= 1 turn per topic");
  Generator g(config.seed);
  SynthDataset data;
  const std::size_t topics =
      (config.queries + config.turns_per_topic - 1) / config.turns_per_topic;
  const std::size_t pool_size = config.depth + kPoolExtra;

  // Topic pools hold the base text of every document; relevant documents get
  // query terms mixed in later.
  std::vector<std::vector<std::string>> pool_ids(topics);
  std::map<std::string, std::string> texts;
  for (std::size_t t = 0; t < topics; ++t)
    for (std::size_t j = 0; j < pool_size; ++j) {
      std::string id = "T" + std::to_string(t + 1) + "-D" + std::to_string(j);
      texts[id] = make_text(g, t, {}, 0.0);
      pool_ids[t].push_back(std::move(id));
    }

  for (std::size_t i = 0; i < config.queries; ++i) {
    const std::size_t topic = i / config.turns_per_topic;
    const std::size_t turn = i % config.turns_per_topic + 1;
    SynthQuery q;
    q.id = parse_query_id(std::to_string(topic + 1) + "_" + std::to_string(turn));
    q.latent_quality = g.uniform();
    const double u = q.latent_quality;

    std::size_t qlen = 2 + g.below(5);
    std::vector<std::string> terms;
    for (std::size_t k = 0; k < qlen; ++k) {
      terms.push_back(topic_word(topic, g.below(kTopicVocab)));
      if (!q.text.empty())
        q.text.push_back(' ');
      q.text += terms.back();
    }

    // Head spread grows with u; tail is a noisy floor well above zero.
    const double spread = 2.0 + 18.0 * u;
    std::vector<double> scores(config.depth);
    for (std::size_t r = 0; r < config.depth; ++r)
      scores[r] = 5.0 + spread * std::exp(-static_cast<double>(r) / 30.0) +
                  std::abs(g.normal(0.3));
    std::sort(scores.begin(), scores.end(), std::greater<>());

    std::vector<std::string> pool = pool_ids[topic];
    std::shuffle(pool.begin(), pool.end(), g.engine());
    std::vector<std::string> retrieved(pool.begin(),
                                       pool.begin() + config.depth);

    // Relevant documents land in the top 5 with probability 0.1 + 0.8u.
    std::size_t relevant = 3 + g.below(6);
    std::vector<std::string> placed(config.depth);
    std::set<std::size_t> taken;
    for (std::size_t k = 0; k < relevant; ++k) {
      std::size_t rank = g.uniform() < 0.1 + 0.8 * u
                             ? g.below(5)
                             : 5 + g.below(config.depth - 5);
      while (taken.count(rank))
        rank = (rank + 1) % config.depth;
      taken.insert(rank);
      placed[rank] = retrieved[k];
      int grade = 1 + static_cast<int>(g.below(3));
      data.qrels.add(q.id, retrieved[k], grade);
      texts[retrieved[k]] = make_text(g, topic, terms, 0.15);
    }
    std::size_t next = relevant;
    for (std::size_t r = 0; r < config.depth; ++r)
      if (placed[r].empty())
        placed[r] = retrieved[next++];
    // A few judged non-relevant documents and sometimes an unretrieved
    // relevant one.
    for (std::size_t k = 0; k < 3; ++k) {
      const std::string &doc = placed[5 + g.below(config.depth - 5)];
      if (!data.qrels.grade(q.id, doc))
        data.qrels.add(q.id, doc, 0);
    }
    if (g.uniform() < 0.5)
      data.qrels.add(q.id, pool[config.depth + g.below(kPoolExtra)],
                     1 + static_cast<int>(g.below(2)));

    std::vector<ScoredDoc> docs;
    docs.reserve(config.depth);
    for (std::size_t r = 0; r < config.depth; ++r)
      docs.push_back(ScoredDoc{placed[r], r + 1, scores[r]});
    data.run.emplace(q.id, RankedList(q.id, std::move(docs)));
    data.queries.push_back(std::move(q));
  }

  for (auto &[id, text] : texts)
    data.corpus.push_back(CorpusDoc{id, text});
  return data;
}

void write_synth(const SynthDataset &data, const std::filesystem::path &dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char *name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out)
      throw InputError("cannot write " + (dir / name).string());
    return out;
  };
  {
    auto out = open("run.txt");
    write_run(out, data.run, "synth");
  }
  {
    auto out = open("qrels.txt");
    write_qrels(out, data.qrels);
  }
  {
    auto out = open("queries.tsv");
    for (const auto &q : data.queries)
      out << q.id.raw << '\t' << q.text << '\n';
  }
  {
    auto out = open("latent.tsv");
    for (const auto &q : data.queries)
      out << q.id.raw << '\t' << format_double(q.latent_quality) << '\n';
  }
  {
    auto out = open("corpus.jsonl");
    for (const auto &doc : data.corpus)
      write_corpus_doc(out, doc);
  }
}

} // namespace qpp

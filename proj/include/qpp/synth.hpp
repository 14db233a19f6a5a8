#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "qpp/data_model.hpp"
#include "qpp/ingest.hpp"

namespace qpp {

// Desk-scale benchmark with a known answer. Every query draws a latent
// quality u in [0,1]; u raises both the spread of the head of the score
// curve and the chance that relevant documents sit in the top ranks, so
// spread-based predictors (NQC, WIG, sigma_max) correlate positively with
// nDCG@3 by construction.
struct SynthConfig {
  std::uint64_t seed = 7;
  std::size_t queries = 50;
  std::size_t depth = 1000;
  std::size_t turns_per_topic = 5;
};

struct SynthQuery {
  QueryId id;
  std::string text;
  double latent_quality = 0.0;
};

struct SynthDataset {
  std::vector<SynthQuery> queries;
  RunSet run;
  Qrels qrels;
  std::vector<CorpusDoc> corpus;
};

SynthDataset generate_synth(const SynthConfig &config);

// Writes run.txt, qrels.txt, queries.tsv, corpus.jsonl and latent.tsv.
void write_synth(const SynthDataset &data, const std::filesystem::path &dir);

} // namespace qpp

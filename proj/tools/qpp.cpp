// qpp: post-retrieval query performance prediction toolkit.
//
// Subcommands: eval-run, build-stats, predict, correlate, score-dist,
// synth-bench. Exit codes: 0 success, 2 input/format error, 3 empty or
// degenerate result.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "qpp/correlate.hpp"
#include "qpp/effectiveness.hpp"
#include "qpp/error.hpp"
#include "qpp/ingest.hpp"
#include "qpp/lm_stats.hpp"
#include "qpp/predictors.hpp"
#include "qpp/synth.hpp"

namespace fs = std::filesystem;
using namespace qpp;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitEmpty = 3;

struct TokenizerOptions {
  std::string stopwords;
  bool keep_case = false;

  Tokenizer make() const {
    std::unordered_set<std::string> stop;
    if (!stopwords.empty())
      stop = read_stopwords(stopwords);
    return Tokenizer(std::move(stop), !keep_case);
  }
};

void add_tokenizer_options(CLI::App *cmd, TokenizerOptions &opt) {
  cmd->add_option("--stopwords", opt.stopwords,
                  "Stopword list, one per line (default: none removed)")
      ->check(CLI::ExistingFile);
  cmd->add_flag("--keep-case", opt.keep_case,
                "Do not lowercase tokens (default: lowercase)");
}

std::ofstream open_out(const fs::path &path) {
  if (path.has_parent_path())
    fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw InputError("cannot write " + path.string());
  return out;
}

std::pair<std::string, std::string> split_named(const std::string &spec) {
  auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size())
    throw InputError("expected NAME=PATH, got '" + spec + "'");
  return {spec.substr(0, eq), spec.substr(eq + 1)};
}

// ---------------------------------------------------------------- eval-run

struct EvalRunConfig {
  std::string run;
  std::string qrels;
  std::vector<std::string> metrics{"ndcg@3", "ndcg@100", "recall@100"};
  int recall_threshold = 1;
  std::string gain = "linear";
  std::string out_dir = ".";
};

int cmd_eval_run(const EvalRunConfig &cfg) {
  std::vector<MetricSpec> specs;
  for (const auto &m : cfg.metrics) {
    MetricSpec spec = MetricSpec::parse(m);
    spec.relevance_threshold = cfg.recall_threshold;
    spec.gain = cfg.gain == "exponential" ? Gain::exponential : Gain::linear;
    specs.push_back(spec);
  }
  RunSet run = read_run_file(cfg.run);
  Qrels qrels = read_qrels(cfg.qrels);
  spdlog::info("{} queries in run, {} judged queries in qrels", run.size(),
               qrels.judged_queries().size());
  bool empty = false;
  for (const auto &spec : specs) {
    ActualsResult actuals = actuals_for_run(run, qrels, spec);
    fs::path path = fs::path(cfg.out_dir) / ("actuals." + spec.name() + ".tsv");
    auto out = open_out(path);
    write_actuals(out, actuals);
    if (actuals.unjudged)
      spdlog::warn("{}: {} unjudged queries skipped", spec.name(),
                   actuals.unjudged);
    if (actuals.mean)
      spdlog::info("{}: mean {} over {} judged queries -> {}", spec.name(),
                   format_double(*actuals.mean), actuals.records.size(),
                   path.string());
    else {
      spdlog::warn("{}: no judged queries", spec.name());
      empty = true;
    }
  }
  return empty ? kExitEmpty : kExitOk;
}

// ------------------------------------------------------------- build-stats

struct BuildStatsConfig {
  std::string corpus;
  std::string out = "collection.stats.tsv";
  bool force = false;
  TokenizerOptions tokenizer;
};

int cmd_build_stats(const BuildStatsConfig &cfg) {
  Tokenizer tokenizer = cfg.tokenizer.make();
  std::string hash = sha256_file(cfg.corpus);
  fs::path hash_path = cfg.out + ".sha256";
  if (!cfg.force && fs::exists(cfg.out) && fs::exists(hash_path)) {
    std::ifstream in(hash_path);
    std::string stored;
    in >> stored;
    if (stored == hash) {
      spdlog::info("{} is up to date for corpus {} (sha256 {})", cfg.out,
                   cfg.corpus, hash);
      return kExitOk;
    }
  }
  CorpusReader reader{fs::path(cfg.corpus)};
  CollectionStats stats = build_collection_stats(
      reader, tokenizer,
      [](std::uint64_t docs) { spdlog::info("{} documents processed", docs); });
  {
    auto out = open_out(cfg.out);
    stats.write(out);
  }
  {
    auto out = open_out(hash_path);
    out << hash << '\n';
  }
  spdlog::info("wrote {}: {} tokens, {} terms (corpus sha256 {})", cfg.out,
               stats.total_terms(), stats.vocab_size(), hash);
  return kExitOk;
}

// ----------------------------------------------------------------- predict

struct PredictConfig {
  std::string run;
  std::string queries;
  std::vector<std::string> predictors{"all"};
  std::string stats;
  std::string corpus;
  std::string out = "predictions.tsv";
  std::string sigma_norm = "length";
  double score_shift = 0.0;
  std::size_t threads = 1;
  PredictorParams params;
  TokenizerOptions tokenizer;
};

std::vector<Predictor> parse_selection(const std::vector<std::string> &names) {
  std::vector<Predictor> out;
  for (const auto &n : names) {
    if (n == "all") {
      for (auto p : all_predictors())
        if (std::find(out.begin(), out.end(), p) == out.end())
          out.push_back(p);
      continue;
    }
    auto p = parse_predictor(n);
    if (std::find(out.begin(), out.end(), p) == out.end())
      out.push_back(p);
  }
  return out;
}

int cmd_predict(PredictConfig cfg) {
  auto selection = parse_selection(cfg.predictors);
  cfg.params.sigma_normalization = cfg.sigma_norm == "sqrt-length"
                                       ? SigmaNormalization::sqrt_query_length
                                       : SigmaNormalization::query_length;
  cfg.params.validate();
  bool wants_clarity = std::find(selection.begin(), selection.end(),
                                 Predictor::clarity) != selection.end();
  if (wants_clarity && (cfg.stats.empty() || cfg.corpus.empty()))
    throw InputError("clarity needs --stats and --corpus");

  PredictionResources res;
  res.tokenizer = cfg.tokenizer.make();
  res.params = cfg.params;
  res.score_shift = cfg.score_shift;
  res.threads = cfg.threads;

  RunSet run = read_run_file(cfg.run);
  QuerySet queries = read_queries(cfg.queries, res.tokenizer);
  if (cfg.score_shift != 0.0)
    spdlog::info("score shift {} applied to every score and corpus score",
                 format_double(cfg.score_shift));

  std::optional<CollectionStats> stats;
  std::optional<DocTextStore> texts;
  if (wants_clarity) {
    stats = CollectionStats::load(cfg.stats);
    std::unordered_set<std::string> wanted;
    for (const auto &[id, list] : run) {
      auto docs = list.docs();
      for (std::size_t i = 0; i < std::min(docs.size(), cfg.params.clarity_top_docs);
           ++i)
        wanted.insert(docs[i].doc_id);
    }
    CorpusReader reader{fs::path(cfg.corpus)};
    texts = DocTextStore::load(reader, wanted);
    spdlog::info("loaded {} of {} document texts needed for clarity",
                 texts->size(), wanted.size());
    res.collection_stats = &*stats;
    res.doc_text_source = &*texts;
  }

  PredictionTable table = run_predictors(queries, run, res, selection);
  for (const auto &id : table.skipped)
    spdlog::warn("query {} skipped: no ranked list", id.raw);
  for (const auto &f : table.failures)
    spdlog::warn("{} failed for {}: {}", f.predictor, f.query_id.raw, f.message);
  if (cfg.out == "-") {
    write_prediction_table(std::cout, table);
  } else {
    auto out = open_out(cfg.out);
    write_prediction_table(out, table);
  }
  spdlog::info("{} predictions, {} failures, {} skipped queries",
               table.records.size(), table.failures.size(),
               table.skipped.size());
  return table.records.empty() ? kExitEmpty : kExitOk;
}

// --------------------------------------------------------------- correlate

struct CorrelateConfig {
  std::vector<std::string> predictions;
  std::vector<std::string> external;
  std::vector<std::string> actuals;
  std::string per_turn;
  std::string kendall_p = "normal";
  std::string out_dir = ".";
};

int cmd_correlate(const CorrelateConfig &cfg) {
  if (cfg.predictions.empty() && cfg.external.empty())
    throw InputError("need at least one --predictions or --external source");
  KendallTest test = parse_kendall_test(cfg.kendall_p);
  std::optional<Coefficient> per_turn;
  if (!cfg.per_turn.empty())
    per_turn = parse_coefficient(cfg.per_turn);

  std::vector<PredictionRecord> predictions;
  for (const auto &path : cfg.predictions) {
    auto recs = read_prediction_table(path);
    predictions.insert(predictions.end(), recs.begin(), recs.end());
  }
  for (const auto &spec : cfg.external) {
    auto [name, path] = split_named(spec);
    auto recs = read_predictions(path, name);
    predictions.insert(predictions.end(), recs.begin(), recs.end());
  }
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto &p : predictions)
    if (!seen.emplace(p.predictor, p.query_id.raw).second)
      throw InputError("predictor " + p.predictor + " has two values for " +
                       p.query_id.raw + " across prediction sources");

  std::vector<ActualRecord> actuals;
  for (const auto &path : cfg.actuals) {
    auto recs = read_actuals(path);
    actuals.insert(actuals.end(), recs.begin(), recs.end());
  }
  std::set<std::string> metrics;
  for (const auto &a : actuals)
    metrics.insert(a.metric);

  CorrelationReport report;
  for (const auto &metric : metrics) {
    auto part = evaluate_predictors(predictions, actuals, metric, test);
    report.rows.insert(report.rows.end(), part.rows.begin(), part.rows.end());
  }
  std::sort(report.rows.begin(), report.rows.end(),
            [](const ReportRow &a, const ReportRow &b) {
              return std::tie(a.predictor, a.metric) <
                     std::tie(b.predictor, b.metric);
            });
  for (const auto &row : report.rows) {
    if (!row.ok())
      spdlog::warn("{} vs {}: {}", row.predictor, row.metric, row.error);
    else if (row.dropped_predictions || row.dropped_actuals)
      spdlog::info("{} vs {}: n={}, dropped {} predictions and {} actuals",
                   row.predictor, row.metric, row.n, row.dropped_predictions,
                   row.dropped_actuals);
  }
  fs::path dir(cfg.out_dir);
  {
    auto out = open_out(dir / "report.tsv");
    write_report_tsv(out, report);
  }
  {
    auto out = open_out(dir / "report.json");
    out << report_json(report).dump(2) << '\n';
  }

  if (per_turn) {
    std::map<std::string, std::vector<PredictionRecord>> by_predictor;
    for (const auto &p : predictions)
      by_predictor[p.predictor].push_back(p);
    for (const auto &metric : metrics) {
      std::vector<ActualRecord> m;
      for (const auto &a : actuals)
        if (a.metric == metric)
          m.push_back(a);
      for (const auto &[name, recs] : by_predictor) {
        try {
          auto turns = per_turn_correlation(recs, m, *per_turn, test);
          auto out = open_out(dir / ("per_turn." + name + "." + metric + ".tsv"));
          write_per_turn(out, turns);
        } catch (const InputError &e) {
          spdlog::warn("per-turn {} vs {}: {}", name, metric, e.what());
        }
      }
    }
  }
  spdlog::info("{} of {} report rows succeeded", report.succeeded(),
               report.rows.size());
  return report.succeeded() ? kExitOk : kExitEmpty;
}

// -------------------------------------------------------------- score-dist

struct ScoreDistConfig {
  std::vector<std::string> runs;
  std::size_t bins = 50;
  std::string out_dir = ".";
};

int cmd_score_dist(const ScoreDistConfig &cfg) {
  if (cfg.bins == 0)
    throw InputError("--bins must be at least 1");
  std::vector<ScoreDistribution> dists;
  fs::path dir(cfg.out_dir);
  std::set<std::string> names;
  for (const auto &spec : cfg.runs) {
    auto [name, path] = split_named(spec);
    if (!names.insert(name).second)
      throw InputError("duplicate run name " + name);
    RunSet run = read_run_file(path);
    try {
      auto dist = score_distribution(name, run, cfg.bins);
      auto out = open_out(dir / ("score_dist." + name + ".tsv"));
      write_histogram(out, dist);
      dists.push_back(std::move(dist));
    } catch (const DegenerateError &e) {
      spdlog::warn("run {}: {}", name, e.what());
      ScoreDistribution failed;
      failed.run = name;
      failed.error = e.what();
      dists.push_back(std::move(failed));
    }
  }
  auto out = open_out(dir / "score_dist_summary.tsv");
  write_distribution_summary(out, dists);
  bool any = std::any_of(dists.begin(), dists.end(),
                         [](const auto &d) { return d.error.empty(); });
  return any ? kExitOk : kExitEmpty;
}

// ------------------------------------------------------------- synth-bench

int cmd_synth_bench(const SynthConfig &cfg, const std::string &out_dir) {
  SynthDataset data = generate_synth(cfg);
  write_synth(data, out_dir);
  spdlog::info("wrote {} queries x {} documents (seed {}) to {}",
               data.queries.size(), cfg.depth, cfg.seed, out_dir);
  return kExitOk;
}

} // namespace

int main(int argc, char **argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("qpp"));
  spdlog::set_pattern("[%l] %v");

  CLI::App app{"Post-retrieval query performance prediction and evaluation"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "TOML/INI config file; command-line flags win");

  EvalRunConfig eval_cfg;
  auto *eval = app.add_subcommand("eval-run", "Per-query nDCG@k / Recall@k of a run");
  eval->add_option("--run", eval_cfg.run, "TREC run file")->required()->check(CLI::ExistingFile);
  eval->add_option("--qrels", eval_cfg.qrels, "TREC qrels file")->required()->check(CLI::ExistingFile);
  eval->add_option("--metrics", eval_cfg.metrics,
                   "Metrics as ndcg@K / recall@K (default: ndcg@3, ndcg@100, recall@100)")
      ->delimiter(',');
  eval->add_option("--recall-threshold", eval_cfg.recall_threshold,
                   "Minimum grade counted as relevant for recall (default 1)");
  eval->add_option("--gain", eval_cfg.gain,
                   "nDCG gain: linear (trec_eval ndcg_cut) or exponential (default linear)")
      ->check(CLI::IsMember({"linear", "exponential"}));
  eval->add_option("--out-dir", eval_cfg.out_dir, "Output directory (default .)");

  BuildStatsConfig stats_cfg;
  auto *stats = app.add_subcommand("build-stats", "Collection language model sidecar from a JSONL corpus");
  stats->add_option("--corpus", stats_cfg.corpus, "JSONL corpus with id/contents")->required()->check(CLI::ExistingFile);
  stats->add_option("--out", stats_cfg.out, "Sidecar path (default collection.stats.tsv)");
  stats->add_flag("--force", stats_cfg.force, "Rebuild even if the corpus hash is unchanged");
  add_tokenizer_options(stats, stats_cfg.tokenizer);

  PredictConfig pred_cfg;
  auto *pred = app.add_subcommand("predict", "Compute unsupervised QPP predictors");
  pred->add_option("--run", pred_cfg.run, "TREC run file")->required()->check(CLI::ExistingFile);
  pred->add_option("--queries", pred_cfg.queries, "Rewritten queries, qid<TAB>text")->required()->check(CLI::ExistingFile);
  pred->add_option("--predictors", pred_cfg.predictors,
                   "Comma list of clarity,wig,nqc,sigma_max,n_sigma_x,smv or all (default all)")
      ->delimiter(',');
  pred->add_option("--stats", pred_cfg.stats, "Collection stats sidecar (clarity)")->check(CLI::ExistingFile);
  pred->add_option("--corpus", pred_cfg.corpus, "JSONL corpus for document texts (clarity)")->check(CLI::ExistingFile);
  pred->add_option("--wig-k", pred_cfg.params.wig_k, "WIG cutoff (default 5, the usual WIG setting)");
  pred->add_option("--nqc-k", pred_cfg.params.nqc_k, "NQC cutoff (default 100)");
  pred->add_option("--smv-k", pred_cfg.params.smv_k, "SMV cutoff (default 100)");
  pred->add_option("--sigma-x", pred_cfg.params.sigma_x_percent,
                   "n(sigma_x%) threshold as percent of the top score (default 50)");
  pred->add_option("--sigma-norm", pred_cfg.sigma_norm,
                   "n(sigma_x%) normalization: length or sqrt-length (default length)")
      ->check(CLI::IsMember({"length", "sqrt-length"}));
  pred->add_option("--clarity-docs", pred_cfg.params.clarity_top_docs,
                   "Documents in the clarity relevance model (default 100)");
  pred->add_option("--clarity-terms", pred_cfg.params.clarity_clip_terms,
                   "Relevance model clipped to this many terms (default 100)");
  pred->add_option("--corpus-depth", pred_cfg.params.corpus_score_depth,
                   "Corpus score = mean score of this many top documents (default 1000)");
  pred->add_flag("--strict-corpus-sign", pred_cfg.params.strict_corpus_sign,
                 "Divide NQC/SMV by the signed corpus score instead of its magnitude");
  pred->add_option("--score-shift", pred_cfg.score_shift,
                   "Add this constant to every score before prediction (default 0)");
  pred->add_option("--threads", pred_cfg.threads, "Worker threads (default 1)")->check(CLI::PositiveNumber);
  pred->add_option("--out", pred_cfg.out, "Prediction table, '-' for stdout (default predictions.tsv)");
  add_tokenizer_options(pred, pred_cfg.tokenizer);

  CorrelateConfig corr_cfg;
  auto *corr = app.add_subcommand("correlate", "Correlate predictions with actual effectiveness");
  corr->add_option("--predictions", corr_cfg.predictions, "Prediction table(s) from predict")->check(CLI::ExistingFile);
  corr->add_option("--external", corr_cfg.external, "External predictor output NAME=PATH (qid<TAB>value)");
  corr->add_option("--actuals", corr_cfg.actuals, "Actuals file(s) from eval-run")->required()->check(CLI::ExistingFile);
  corr->add_option("--per-turn", corr_cfg.per_turn, "Also write per-turn correlations with this coefficient")
      ->check(CLI::IsMember({"pearson", "kendall", "spearman"}));
  corr->add_option("--kendall-p", corr_cfg.kendall_p,
                   "Kendall significance: normal (tie-corrected, continuity-corrected) or t (default normal)")
      ->check(CLI::IsMember({"normal", "t"}));
  corr->add_option("--out-dir", corr_cfg.out_dir, "Output directory (default .)");

  ScoreDistConfig dist_cfg;
  auto *dist = app.add_subcommand("score-dist", "Min-max normalized score histograms per run");
  dist->add_option("--run", dist_cfg.runs, "NAME=PATH of a run file (repeatable)")->required();
  dist->add_option("--bins", dist_cfg.bins, "Histogram bins (default 50)");
  dist->add_option("--out-dir", dist_cfg.out_dir, "Output directory (default .)");

  SynthConfig synth_cfg;
  std::string synth_out;
  auto *synth = app.add_subcommand("synth-bench", "Generate a deterministic synthetic benchmark");
  synth->add_option("--seed", synth_cfg.seed, "Random seed (default 7)");
  synth->add_option("--queries", synth_cfg.queries, "Number of queries (default 50)");
  synth->add_option("--depth", synth_cfg.depth, "Ranked list depth (default 1000)");
  synth->add_option("--turns", synth_cfg.turns_per_topic, "Turns per conversation topic (default 5)");
  synth->add_option("--out-dir", synth_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*eval)
      return cmd_eval_run(eval_cfg);
    if (*stats)
      return cmd_build_stats(stats_cfg);
    if (*pred)
      return cmd_predict(pred_cfg);
    if (*corr)
      return cmd_correlate(corr_cfg);
    if (*dist)
      return cmd_score_dist(dist_cfg);
    if (*synth)
      return cmd_synth_bench(synth_cfg, synth_out);
  } catch (const DegenerateError &e) {
    spdlog::error("{}", e.what());
    return kExitEmpty;
  } catch (const InputError &e) {
    spdlog::error("{}", e.what());
    return kExitInput;
  } catch (const fs::filesystem_error &e) {
    spdlog::error("{}", e.what());
    return kExitInput;
  } catch (const std::exception &e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return kExitOk;
}

#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/logger.h>
#include <spdlog/sinks/ostream_sink.h>

#include "citegraph/citation_graph.hpp"
#include "citegraph/corpus.hpp"
#include "citegraph/embedding.hpp"
#include "citegraph/error.hpp"
#include "citegraph/exec.hpp"
#include "citegraph/inverted_index.hpp"
#include "citegraph/metrics.hpp"
#include "citegraph/pairs.hpp"
#include "citegraph/pipeline.hpp"
#include "citegraph/self_check.hpp"
#include "citegraph/submodular.hpp"

namespace citegraph::cli {

namespace {

using ojson = nlohmann::ordered_json;

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err)
{
    auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
    auto logger = std::make_shared<spdlog::logger>("citegraph", sink);
    logger->set_pattern("[%l] %v");
    auto level = spdlog::level::info;
    if (const char* env = std::getenv("CITEGRAPH_LOG")) {
        std::string_view value(env);
        if (value == "error") {
            level = spdlog::level::err;
        } else if (value == "debug") {
            level = spdlog::level::debug;
        }
    }
    logger->set_level(level);
    return logger;
}

/// Output file when a path is given, `fallback` otherwise.
class Sink {
  public:
    Sink(const std::string& path, std::ostream& fallback)
    {
        if (!path.empty()) {
            m_file.open(path, std::ios::binary);
            if (!m_file) {
                throw DataError("cannot write output file: " + path);
            }
        }
        m_out = path.empty() ? &fallback : &m_file;
    }
    std::ostream& stream() { return *m_out; }

  private:
    std::ofstream m_file;
    std::ostream* m_out;
};

struct Context {
    std::ostream& out;
    std::shared_ptr<spdlog::logger> log;
};

struct IngestArgs {
    std::string corpus;
    std::string split = "2010,2011,2012";
    std::string out_dir;
};

void write_corpus(const Corpus& corpus, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write corpus file: " + path.string());
    }
    for (const auto& doc : corpus.documents()) {
        out << to_jsonl(doc) << '\n';
    }
}

void run_ingest(const IngestArgs& args, Context& ctx)
{
    auto corpus = load_corpus(args.corpus);
    auto spec = parse_split_spec(args.split);
    auto split = split_by_year(corpus, spec);
    const auto& report = corpus.report();
    for (const auto& [from, missing] : report.dangling) {
        ctx.log->debug("{} references unknown id {}", from, missing);
    }
    ctx.log->info("loaded {} documents, {} dangling references", corpus.size(), report.dangling.size());

    if (!args.out_dir.empty()) {
        std::filesystem::create_directories(args.out_dir);
        write_corpus(split.train, std::filesystem::path(args.out_dir) / "train.jsonl");
        write_corpus(split.dev, std::filesystem::path(args.out_dir) / "dev.jsonl");
        write_corpus(split.test, std::filesystem::path(args.out_dir) / "test.jsonl");
    }
    ojson result;
    result["documents"] = corpus.size();
    result["dangling_references"] = report.dangling.size();
    result["empty_references"] = report.empty_references.size();
    result["train"] = split.train.size();
    result["dev"] = split.dev.size();
    result["test"] = split.test.size();
    result["dropped"] = split.dropped;
    result["excluded_no_references"] = split.excluded_no_references;
    ctx.out << result.dump() << '\n';
}

struct IndexArgs {
    std::string corpus;
    std::string out;
    std::string split;
    bool keep_case = false;
};

Corpus candidate_corpus(const Corpus& corpus, const std::string& split_text, bool include_dev)
{
    if (split_text.empty()) {
        return corpus;
    }
    auto split = split_by_year(corpus, parse_split_spec(split_text));
    if (!include_dev) {
        return split.train;
    }
    auto docs = split.train.documents();
    docs.insert(docs.end(), split.dev.documents().begin(), split.dev.documents().end());
    return Corpus(std::move(docs));
}

void run_index(const IndexArgs& args, Context& ctx)
{
    auto corpus = candidate_corpus(load_corpus(args.corpus), args.split, false);
    Tokenizer tokenizer;
    tokenizer.lowercase = !args.keep_case;
    auto index = InvertedIndex::build(corpus, tokenizer);
    index.save(args.out);
    ojson result;
    result["num_docs"] = index.num_docs();
    result["num_terms"] = index.num_terms();
    result["avg_doc_length"] = index.avg_doc_length();
    ctx.out << result.dump() << '\n';
}

struct GraphArgs {
    std::string corpus;
    std::string edges;
    std::string query_id;
    int max_d = 3;
    double theta = 0.4;
    bool undirected = false;
};

void run_graph(const GraphArgs& args, Context& ctx)
{
    auto corpus = load_corpus(args.corpus);
    auto graph = CitationGraph::build(corpus);
    if (!args.edges.empty()) {
        Sink sink(args.edges, ctx.out);
        graph.write_edge_list(sink.stream());
    }
    ojson result;
    result["nodes"] = graph.num_nodes();
    result["edges"] = graph.num_edges();
    result["skipped_references"] = graph.skipped_references();
    if (!args.query_id.empty()) {
        auto direction = args.undirected ? Direction::undirected : Direction::forward;
        ojson list = ojson::array();
        for (const auto& p : positives(graph, args.query_id, args.max_d, args.theta, direction)) {
            list.push_back({{"id", p.positive_id}, {"distance", p.distance}, {"sim", p.target_sim}});
        }
        result["positives"] = list;
    }
    ctx.out << result.dump() << '\n';
}

struct PairsArgs {
    std::string corpus;
    std::string strategy = "random";
    int max_d = 1;
    double theta = 0.4;
    std::string emb;
    std::uint64_t seed = 0;
    std::string out;
    std::string split;
    bool triplets = false;
    bool cross_product = false;
    bool undirected = false;
};

void run_pairs(const PairsArgs& args, Context& ctx)
{
    auto corpus = candidate_corpus(load_corpus(args.corpus), args.split, false);
    auto graph = CitationGraph::build(corpus);
    std::optional<EmbeddingMatrix> emb;
    if (!args.emb.empty()) {
        emb = EmbeddingMatrix::load(args.emb);
    }
    PairOptions options;
    options.max_d = args.max_d;
    options.theta = args.theta;
    options.strategy = parse_negative_strategy(args.strategy);
    options.seed = args.seed;
    options.direction = args.undirected ? Direction::undirected : Direction::forward;
    options.cross_product = args.cross_product;

    std::vector<std::string> queries;
    for (const auto& doc : corpus.documents()) {
        queries.push_back(doc.id);
    }
    const EmbeddingMatrix* emb_ptr = emb ? &*emb : nullptr;
    Sink sink(args.out, ctx.out);
    std::size_t records = 0;
    std::size_t shortfalls = 0;
    if (args.triplets) {
        auto set = generate_triplets(graph, emb_ptr, queries, options);
        write_triplets_jsonl(sink.stream(), set, options);
        records = set.triplets.size();
        shortfalls = set.shortfalls.size();
    } else {
        auto set = generate_pairs(graph, emb_ptr, queries, options);
        write_pairs_jsonl(sink.stream(), set, options);
        records = set.pairs.size();
        shortfalls = set.shortfalls.size();
    }
    ctx.log->info("{} {} for {} queries, {} with fewer negatives than positives", records,
                  args.triplets ? "triplets" : "pairs", queries.size(), shortfalls);
    if (!args.out.empty()) {
        ojson result;
        result[args.triplets ? "triplets" : "pairs"] = records;
        result["queries"] = queries.size();
        result["shortfalls"] = shortfalls;
        ctx.out << result.dump() << '\n';
    }
}

struct RecommendArgs {
    std::string corpus;
    std::string scorer = "bm25";
    std::string selector = "topk";
    std::string partition = "authors";
    std::size_t k = 10;
    std::size_t prefilter = 0;
    std::string emb;
    std::string index;
    std::vector<std::string> query_ids;
    std::string query_text;
    std::string query_emb;
    std::string batch;
    std::string split = "2010,2011,2012";
    bool include_dev = false;
    std::string out;
    std::string trace;
    double bm25_k = 1.2;
    double bm25_b = 0.75;
};

void run_recommend(const RecommendArgs& args, Context& ctx)
{
    auto corpus = load_corpus(args.corpus);
    auto candidates = candidate_corpus(corpus, args.split, args.include_dev);

    PipelineConfig config;
    config.scorer = parse_scorer(args.scorer);
    config.selector = parse_selector(args.selector);
    if (config.selector == Selector::qai) {
        config.partition_key = parse_partition_key(args.partition);
    }
    config.budget = args.k;
    if (args.prefilter > 0) {
        config.prefilter = args.prefilter;
    }
    config.bm25 = {args.bm25_k, args.bm25_b};
    config.validate();

    std::optional<InvertedIndex> index;
    std::optional<EmbeddingMatrix> emb;
    if (config.scorer == Scorer::cosine) {
        if (args.emb.empty()) {
            throw DataError("--scorer cosine needs --emb");
        }
        emb = EmbeddingMatrix::load(args.emb);
    } else if (!args.index.empty()) {
        index = InvertedIndex::load(args.index);
        if (index->doc_ids().size() != candidates.size()) {
            throw DataError(args.index + ": index does not cover the candidate pool (" + std::to_string(index->num_docs())
                            + " vs " + std::to_string(candidates.size()) + " documents)");
        }
        for (const auto& id : index->doc_ids()) {
            if (!candidates.contains(id)) {
                throw DataError(args.index + ": indexed document " + id + " is not a candidate");
            }
        }
    } else {
        index = InvertedIndex::build(candidates);
    }
    Resources resources{&candidates, index ? &*index : nullptr, emb ? &*emb : nullptr};

    std::vector<Query> queries;
    if (!args.batch.empty()) {
        if (args.split.empty()) {
            throw std::invalid_argument("--batch needs --split");
        }
        auto split = split_by_year(corpus, parse_split_spec(args.split));
        if (args.batch != "dev" && args.batch != "test") {
            throw std::invalid_argument("--batch must be dev or test");
        }
        for (const auto& doc : (args.batch == "dev" ? split.dev : split.test).documents()) {
            queries.push_back(Query::from_document(doc));
        }
    }
    for (const auto& id : args.query_ids) {
        queries.push_back(Query::from_document(corpus.at(id)));
    }
    if (!args.query_text.empty()) {
        Query q{"", args.query_text, std::nullopt};
        if (!args.query_emb.empty()) {
            auto qemb = EmbeddingMatrix::load(args.query_emb);
            if (qemb.size() == 0) {
                throw DataError(args.query_emb + ": no query vector");
            }
            auto row = qemb.row(0);
            q.vector = std::vector<float>(row.begin(), row.end());
            q.id = qemb.id(0);
        }
        queries.push_back(std::move(q));
    }
    if (queries.empty()) {
        throw std::invalid_argument("nothing to recommend for: pass --query-id, --query-text or --batch");
    }

    Run run;
    if (queries.size() == 1 || !args.trace.empty()) {
        if (queries.size() != 1) {
            throw std::invalid_argument("--trace needs exactly one query");
        }
        auto list = recommend(config, resources, queries.front());
        if (!args.trace.empty()) {
            Sink trace(args.trace, ctx.out);
            write_selection_trace(trace.stream(), list);
        }
        run.emplace(queries.front().id, std::move(list.ids));
    } else {
        run = recommend_batch(config, resources, queries);
    }
    ctx.log->info("{} queries over {} candidates", run.size(), candidates.size());

    Sink sink(args.out, ctx.out);
    write_run_jsonl(sink.stream(), run);
    if (!args.out.empty()) {
        ojson result;
        result["queries"] = run.size();
        result["candidates"] = candidates.size();
        result["scorer"] = to_string(config.scorer);
        result["selector"] = to_string(config.selector);
        if (config.partition_key) {
            result["partition"] = to_string(*config.partition_key);
        }
        result["k"] = config.budget;
        auto prefilter = config.effective_prefilter();
        result["prefilter"] = prefilter ? ojson(*prefilter) : ojson(nullptr);
        ctx.out << result.dump() << '\n';
    }
}

struct EvaluateArgs {
    std::string run;
    std::string corpus;
    std::string ks = "10,20,50,100";
    std::string f1_mode = "mean-pr";
};

void run_evaluate(const EvaluateArgs& args, Context& ctx)
{
    auto corpus = load_corpus(args.corpus);
    auto run = load_run(args.run);
    std::vector<Document> query_docs;
    for (const auto& [query, ranked] : run) {
        query_docs.push_back(corpus.at(query));
    }
    auto truth = truth_from_corpus(Corpus(std::move(query_docs)), corpus);
    F1Mode mode = F1Mode::mean_precision_recall;
    if (args.f1_mode == "mean-f1") {
        mode = F1Mode::mean_f1;
    } else if (args.f1_mode != "mean-pr") {
        throw std::invalid_argument("--f1-mode must be mean-pr or mean-f1");
    }
    auto ks = parse_ks(args.ks);
    auto result = evaluate(run, truth, ks, mode);
    if (result.excluded > 0) {
        ctx.log->info("{} queries without resolvable references were excluded", result.excluded);
    }
    ctx.out << to_json(result).dump() << '\n';
}

struct CheckArgs {
    std::size_t trials = 1000;
    std::uint64_t seed = 0;
};

bool run_check(const CheckArgs& args, Context& ctx)
{
    auto results = run_self_checks(args.seed, args.trials);
    bool all = true;
    ojson checks = ojson::array();
    for (const auto& r : results) {
        all = all && r.passed;
        checks.push_back({{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
        if (!r.passed) {
            ctx.log->error("check {} failed: {}", r.name, r.detail);
        }
    }
    ojson result;
    result["passed"] = all;
    result["checks"] = checks;
    ctx.out << result.dump() << '\n';
    return all;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Citation recommendation engine: lexical and embedding scoring, citation-graph "
                 "training pairs, submodular selection, evaluation."};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value configuration file; command-line flags take precedence");
    int jobs = 0;
    app.add_option("--jobs", jobs, "Worker threads for parallel kernels (default: all cores)");

    IngestArgs ingest;
    auto* ingest_cmd = app.add_subcommand("ingest", "Load a corpus and report its year-based split");
    ingest_cmd->add_option("--corpus", ingest.corpus, "Corpus JSONL")->required();
    ingest_cmd->add_option("--split", ingest.split, "train_max_year,dev_year,test_year")->capture_default_str();
    ingest_cmd->add_option("--out-dir", ingest.out_dir, "Write train/dev/test JSONL files here");

    IndexArgs index;
    auto* index_cmd = app.add_subcommand("index", "Build and save an inverted index (CGIX1)");
    index_cmd->add_option("--corpus", index.corpus, "Corpus JSONL")->required();
    index_cmd->add_option("--out", index.out, "Index file to write")->required();
    index_cmd->add_option("--split", index.split, "Index only the training split of this split spec");
    index_cmd->add_flag("--keep-case", index.keep_case, "Do not lowercase tokens");

    GraphArgs graph;
    auto* graph_cmd = app.add_subcommand("graph", "Citation graph statistics, edge list and positives");
    graph_cmd->add_option("--corpus", graph.corpus, "Corpus JSONL")->required();
    graph_cmd->add_option("--edges", graph.edges, "Write the sorted TSV edge list here");
    graph_cmd->add_option("--query-id", graph.query_id, "List the positives of this document");
    graph_cmd->add_option("--max-d", graph.max_d, "Largest citation distance")->check(CLI::Range(1, 3))->capture_default_str();
    graph_cmd->add_option("--theta", graph.theta, "Target similarity decay")->capture_default_str();
    graph_cmd->add_flag("--undirected", graph.undirected, "Ignore edge direction");

    PairsArgs pairs;
    auto* pairs_cmd = app.add_subcommand("pairs", "Generate Siamese pairs or triplets from the citation graph");
    pairs_cmd->add_option("--corpus", pairs.corpus, "Corpus JSONL")->required();
    pairs_cmd->add_option("--strategy", pairs.strategy, "random | nearest | farthest")
        ->check(CLI::IsMember({"random", "nearest", "farthest"}))
        ->capture_default_str();
    pairs_cmd->add_option("--max-d", pairs.max_d, "Largest citation distance of positives")
        ->check(CLI::Range(1, 3))
        ->capture_default_str();
    pairs_cmd->add_option("--theta", pairs.theta, "Target similarity decay")->capture_default_str();
    pairs_cmd->add_option("--emb", pairs.emb, "CGEMB1 embeddings (nearest/farthest)");
    pairs_cmd->add_option("--seed", pairs.seed, "Random seed")->capture_default_str();
    pairs_cmd->add_option("--out", pairs.out, "Output JSONL (default: stdout)");
    pairs_cmd->add_option("--split", pairs.split, "Mine the training split of this split spec only");
    pairs_cmd->add_flag("--triplets", pairs.triplets, "Emit triplets instead of pairs");
    pairs_cmd->add_flag("--cross-product", pairs.cross_product, "Triplets: every positive with every negative");
    pairs_cmd->add_flag("--undirected", pairs.undirected, "Ignore edge direction");

    RecommendArgs rec;
    auto* rec_cmd = app.add_subcommand("recommend", "Recommend citations for query documents");
    rec_cmd->add_option("--corpus", rec.corpus, "Corpus JSONL")->required();
    rec_cmd->add_option("--scorer", rec.scorer, "tfidf | bm25 | cosine")
        ->check(CLI::IsMember({"tfidf", "bm25", "cosine"}))
        ->capture_default_str();
    rec_cmd->add_option("--selector", rec.selector, "topk | qai")
        ->check(CLI::IsMember({"topk", "top-k", "qai"}))
        ->capture_default_str();
    rec_cmd->add_option("--partition", rec.partition, "authors | venue")
        ->check(CLI::IsMember({"authors", "venue"}))
        ->capture_default_str();
    rec_cmd->add_option("--k", rec.k, "Budget")->check(CLI::PositiveNumber)->capture_default_str();
    rec_cmd->add_option("--prefilter", rec.prefilter, "Candidate pool size before submodular selection");
    rec_cmd->add_option("--emb", rec.emb, "CGEMB1 embeddings (cosine scorer)");
    rec_cmd->add_option("--index", rec.index, "Prebuilt CGIX1 index over the candidate pool");
    rec_cmd->add_option("--query-id", rec.query_ids, "Query document id (repeatable)");
    rec_cmd->add_option("--query-text", rec.query_text, "Free-text query");
    rec_cmd->add_option("--query-emb", rec.query_emb, "CGEMB1 file whose first row embeds --query-text");
    rec_cmd->add_option("--batch", rec.batch, "Recommend for every document of the dev or test split")
        ->check(CLI::IsMember({"dev", "test"}));
    rec_cmd->add_option("--split", rec.split, "Split spec; candidates are its training split ('' = whole corpus)")
        ->capture_default_str();
    rec_cmd->add_flag("--include-dev", rec.include_dev, "Add the dev split to the candidate pool");
    rec_cmd->add_option("--out", rec.out, "Run file to write (default: stdout)");
    rec_cmd->add_option("--trace", rec.trace, "Selection trace JSONL (single query)");
    rec_cmd->add_option("--bm25-k", rec.bm25_k, "BM25 k")->capture_default_str();
    rec_cmd->add_option("--bm25-b", rec.bm25_b, "BM25 b")->capture_default_str();

    EvaluateArgs eval;
    auto* eval_cmd = app.add_subcommand("evaluate", "Score a run file (MRR, F1@k)");
    eval_cmd->add_option("--run", eval.run, "Run JSONL")->required();
    eval_cmd->add_option("--corpus", eval.corpus, "Corpus JSONL providing the ground truth")->required();
    eval_cmd->add_option("--ks", eval.ks, "Cut-offs")->capture_default_str();
    eval_cmd->add_option("--f1-mode", eval.f1_mode, "mean-pr | mean-f1")
        ->check(CLI::IsMember({"mean-pr", "mean-f1"}))
        ->capture_default_str();

    CheckArgs check;
    auto* check_cmd = app.add_subcommand("check", "Run the built-in consistency checks");
    check_cmd->add_option("--trials", check.trials, "Submodularity samples")->capture_default_str();
    check_cmd->add_option("--seed", check.seed, "Random seed")->capture_default_str();

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        auto code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    Context ctx{out, make_logger(err)};
    set_max_threads(jobs);
    try {
        if (*ingest_cmd) {
            run_ingest(ingest, ctx);
        } else if (*index_cmd) {
            run_index(index, ctx);
        } else if (*graph_cmd) {
            run_graph(graph, ctx);
        } else if (*pairs_cmd) {
            run_pairs(pairs, ctx);
        } else if (*rec_cmd) {
            run_recommend(rec, ctx);
        } else if (*eval_cmd) {
            run_evaluate(eval, ctx);
        } else if (*check_cmd) {
            return run_check(check, ctx) ? exit_ok : exit_data;
        }
    } catch (const std::invalid_argument& e) {
        ctx.log->error("{}", e.what());
        return exit_usage;
    } catch (const std::exception& e) {
        ctx.log->error("{}", e.what());
        return exit_data;
    }
    out.flush();
    return exit_ok;
}

}  // namespace citegraph::cli

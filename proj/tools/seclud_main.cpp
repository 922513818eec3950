#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "seclud/bench.hpp"
#include "seclud/cluster.hpp"
#include "seclud/codec.hpp"
#include "seclud/corpus.hpp"
#include "seclud/index.hpp"
#include "seclud/index_io.hpp"
#include "seclud/query.hpp"

namespace fs = std::filesystem;
using namespace seclud;

namespace {

void log_line(const std::string& msg) { std::cerr << "seclud: " << msg << "\n"; }

void log_config(const CLI::App& app) {
    std::istringstream lines(app.config_to_str(true, false));
    std::string line;
    log_line(std::string(app.get_name()) + " configuration:");
    while (std::getline(lines, line)) {
        if (!line.empty()) std::cerr << "  " << line << "\n";
    }
}

void log_cluster_config(const ClusterConfig& cfg) {
    std::ostringstream out;
    write_cluster_config(out, cfg);
    std::istringstream lines(out.str());
    std::string line;
    log_line("clustering configuration:");
    while (std::getline(lines, line)) std::cerr << "  " << line << "\n";
}

std::ifstream open_in(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    return in;
}

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    return out;
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("SECLUD_SEED"); env && *env) {
        try {
            std::size_t used = 0;
            const auto v = std::stoull(env, &used);
            if (used == std::string(env).size()) return v;
        } catch (const std::exception&) {
        }
        throw Error("SECLUD_SEED must be a non-negative integer");
    }
    return 1;
}

Clustering load_clustering(const fs::path& path, std::size_t num_docs) {
    auto in = open_in(path);
    return read_clustering_csv(in, num_docs);
}

ProbTable load_probs(const Corpus& corpus, const std::string& log_path, std::size_t tc) {
    if (log_path.empty()) return probabilities_from_corpus(corpus, tc);
    auto in = open_in(log_path);
    auto log = read_query_log(in);
    if (log.skipped) log_line("query log: skipped " + std::to_string(log.skipped) + " lines without two terms");
    return probabilities_from_log(log.pairs, corpus, tc);
}

std::vector<std::size_t> parse_size_list(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stoull(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw Error("expected a comma separated list of integers, got '" + text + "'");
        }
    }
    if (out.empty()) throw Error("empty list");
    return out;
}

struct IndexOpts {
    std::string in;
    std::string out;
    std::string format;
    std::string codec = "gamma";
};

int run_index(const IndexOpts& o) {
    const auto codec = parse_codec(o.codec);
    InputFormat format = InputFormat::plain;
    if (!o.format.empty()) {
        format = parse_input_format(o.format);
    } else if (fs::path(o.in).extension() == ".jsonl") {
        format = InputFormat::jsonl;
    }
    Corpus corpus;
    if (o.in == "-") {
        corpus = ingest(std::cin, format);
    } else {
        auto in = open_in(o.in);
        corpus = ingest(in, format);
    }
    const auto index = build_index(corpus);
    save_index_file(o.out, corpus, index, codec);
    std::cout << "documents " << corpus.num_docs() << "\nterms " << corpus.num_terms() << "\npostings "
              << index.num_postings() << "\nwritten " << index_file(o.out).string() << "\n";
    return 0;
}

struct ClusterOpts {
    std::string index;
    std::string algo = "topdown";
    std::string config;
    std::string log;
    std::string out;
    std::optional<std::uint32_t> k;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::optional<std::size_t> tc;
};

ClusterConfig effective_config(const ClusterOpts& o) {
    ClusterConfig cfg;
    cfg.seed = default_seed();
    if (!o.config.empty()) {
        auto in = open_in(o.config);
        cfg = read_cluster_config(in, cfg);
    }
    if (o.k) cfg.k = *o.k;
    if (o.seed) cfg.seed = *o.seed;
    if (o.threads) cfg.threads = *o.threads;
    if (o.tc) cfg.tc = *o.tc;
    cfg.validate();
    return cfg;
}

int run_cluster(const ClusterOpts& o) {
    if (o.algo != "topdown" && o.algo != "flat") throw Error("--algo must be topdown or flat");
    const auto cfg = effective_config(o);
    log_cluster_config(cfg);
    const auto loaded = load_index_file(o.index);
    const auto& corpus = loaded.corpus;
    if (corpus.num_docs() < cfg.k) {
        throw Error("k = " + std::to_string(cfg.k) + " exceeds the number of documents (" +
                    std::to_string(corpus.num_docs()) + ")");
    }
    const auto probs = load_probs(corpus, o.log, cfg.tc);
    ClusterRunInfo info;
    const auto clustering =
        o.algo == "topdown" ? topdown(corpus, probs, cfg, &info) : multilevel_init(corpus, cfg.k, probs, cfg, &info);
    auto out = open_out(o.out);
    write_clustering_csv(out, clustering);
    const auto counts = ClusterCounts::from_corpus(corpus, clustering, probs.size());
    const double psi_k = psi(counts, probs);
    const double psi_1 = psi(counts.merged(), probs);
    std::cout << "clusters " << clustering.k << "\nnonempty " << clustering.num_nonempty() << "\npsi " << psi_k
              << "\npsi_single " << psi_1 << "\nS_T " << (psi_k > 0 ? psi_1 / psi_k : 0.0) << "\nrounds "
              << info.final_rounds << "\n";
    if (o.algo == "topdown") {
        std::cout << "leaves " << info.leaves << "\nmerged_leaves " << info.merged_leaves << "\n";
    }
    return 0;
}

struct QueryOpts {
    std::string index;
    std::string clusters;
    std::string variant = "single";
    std::string terms;
    bool steps = false;
    bool ids = false;
};

int run_query(const QueryOpts& o) {
    const auto variant = parse_variant(o.variant);
    if (variant != QueryVariant::single && o.clusters.empty()) {
        throw Error("variant " + o.variant + " needs --clusters");
    }
    const auto loaded = load_index_file(o.index);
    const auto& corpus = loaded.corpus;
    const auto clustering =
        o.clusters.empty() ? Clustering::single(corpus.num_docs()) : load_clustering(o.clusters, corpus.num_docs());
    const auto engine = QueryEngine::build(variant, loaded.index, clustering);

    std::vector<TermId> ids;
    const auto words = tokenize(o.terms);
    if (words.empty()) throw Error("--terms holds no searchable term");
    bool unknown = false;
    for (const auto& w : words) {
        const auto t = corpus.lookup(w);
        if (t == kNoTerm) unknown = true;
        ids.push_back(t);
    }
    std::uint64_t steps = 0;
    const auto result = unknown ? std::vector<DocId>{} : engine.query(ids, &steps);
    std::cout << "results " << result.size() << "\n";
    if (o.steps) std::cout << "steps " << steps << "\n";
    if (o.ids) {
        const auto& names = corpus.doc_names();
        for (DocId d : result) std::cout << (names.empty() ? std::to_string(d) : names[d]) << "\n";
    }
    return 0;
}

struct BenchOpts {
    std::string index;
    std::string clusters;
    std::string log;
    std::string out;
    std::string plot_data;
    std::string compression;
    std::string tc_sweep;
    std::string tc_out;
    std::string config;
    std::optional<std::uint64_t> workload_seed;
    std::optional<std::uint32_t> k;
    std::size_t queries = 100'000;
    std::size_t tc = 100'000;
    unsigned repetitions = 3;
    std::size_t bucket = kDefaultBucketSize;
    std::size_t cluster_bucket = kDefaultClusterIndexBucketSize;
};

void write_plot(const fs::path& path, const std::string& header, const std::vector<std::pair<double, double>>& xy) {
    auto out = open_out(path);
    out << "# " << header << "\n";
    for (const auto& [x, y] : xy) out << x << ' ' << y << "\n";
}

int run_bench(const BenchOpts& o) {
    if (o.repetitions < 1) throw Error("--repetitions must be at least 1");
    if (!o.log.empty() && o.workload_seed) throw Error("--log and --workload-seed are mutually exclusive");
    std::vector<std::size_t> tc_values;
    if (!o.tc_sweep.empty()) tc_values = parse_size_list(o.tc_sweep);
    ClusterConfig sweep_cfg;
    sweep_cfg.seed = default_seed();
    if (!o.config.empty()) {
        auto in = open_in(o.config);
        sweep_cfg = read_cluster_config(in, sweep_cfg);
    }
    if (o.k) sweep_cfg.k = *o.k;
    sweep_cfg.validate();

    const auto loaded = load_index_file(o.index);
    const auto& corpus = loaded.corpus;
    const auto clustering = load_clustering(o.clusters, corpus.num_docs());

    Workload workload;
    if (!o.log.empty()) {
        auto in = open_in(o.log);
        const auto log = read_query_log(in);
        workload = workload_from_log(log, corpus, o.tc);
        log_line("query log: " + std::to_string(workload.queries.size()) + " queries, " +
                 std::to_string(workload.unknown) + " with unknown terms, " + std::to_string(workload.self_pairs) +
                 " self-pairs dropped");
    } else {
        const auto seed = o.workload_seed ? *o.workload_seed : default_seed();
        workload = generate_workload(probabilities_from_corpus(corpus, o.tc), o.queries, seed);
    }
    if (workload.queries.empty()) throw Error("the workload holds no query");

    BenchOptions bo;
    bo.bucket_size = o.bucket;
    bo.cluster_bucket_size = o.cluster_bucket;
    bo.repetitions = o.repetitions;
    const auto report = speedup_report(corpus, loaded.index, clustering, workload, bo);
    write_speedup_summary(std::cout, report);
    if (!o.out.empty()) {
        auto out = open_out(o.out);
        write_speedup_csv(out, report);
    } else {
        write_speedup_csv(std::cout, report);
    }

    std::vector<CompressionRow> compression;
    if (!o.compression.empty() || !o.plot_data.empty()) {
        std::vector<std::pair<std::string, std::vector<DocId>>> orderings;
        std::vector<DocId> identity(corpus.num_docs());
        for (std::size_t d = 0; d < identity.size(); ++d) identity[d] = static_cast<DocId>(d);
        orderings.emplace_back("identity", std::move(identity));
        orderings.emplace_back("random", random_permutation(corpus.num_docs(), default_seed()));
        orderings.emplace_back("reordered", build_reordering(clustering));
        compression = compression_report(loaded.index, orderings, kAllCodecs);
        if (!o.compression.empty()) {
            auto out = open_out(o.compression);
            write_compression_csv(out, compression);
        }
    }

    std::vector<TcRow> tc_rows;
    if (!tc_values.empty()) {
        log_cluster_config(sweep_cfg);
        tc_rows = tc_sensitivity(corpus, loaded.index, workload, tc_values, sweep_cfg, bo);
        if (!o.tc_out.empty()) {
            auto out = open_out(o.tc_out);
            write_tc_csv(out, tc_rows);
        } else {
            write_tc_csv(std::cout, tc_rows);
        }
    }

    if (!o.plot_data.empty()) {
        const fs::path dir = o.plot_data;
        write_plot(dir / "speedup_steps.dat", "variant(0=single,1=percluster,2=clusterindex,3=reordered) speedup",
                   {{0, 1.0}, {1, report.s_p_steps}, {2, report.s_c_steps}, {3, report.s_r_steps}});
        write_plot(dir / "speedup_wall.dat", "variant(0=single,1=percluster,2=clusterindex,3=reordered) speedup",
                   {{0, 1.0}, {1, report.s_p_wall}, {2, report.s_c_wall}, {3, report.s_r_wall}});
        for (Codec c : kAllCodecs) {
            std::vector<std::pair<double, double>> xy;
            double x = 0;
            for (const auto& row : compression) {
                if (row.codec == c) xy.emplace_back(x++, row.bits_per_posting);
            }
            write_plot(dir / ("compression_" + std::string(codec_name(c)) + ".dat"),
                       "ordering(0=identity,1=random,2=reordered) bits_per_posting", xy);
        }
        if (!tc_rows.empty()) {
            std::vector<std::pair<double, double>> st, sc, sr;
            for (const auto& r : tc_rows) {
                st.emplace_back(static_cast<double>(r.tc), r.s_t);
                sc.emplace_back(static_cast<double>(r.tc), r.s_c_steps);
                sr.emplace_back(static_cast<double>(r.tc), r.s_r_wall);
            }
            write_plot(dir / "tc_S_T.dat", "tc S_T", st);
            write_plot(dir / "tc_S_C.dat", "tc S_C_steps", sc);
            write_plot(dir / "tc_S_R.dat", "tc S_R_wall", sr);
        }
    }
    return 0;
}

struct StatsOpts {
    std::string index;
    std::string clusters;
    std::size_t top = 10;
    std::size_t tc = 100'000;
};

int run_stats(const StatsOpts& o) {
    const auto loaded = load_index_file(o.index);
    const auto& corpus = loaded.corpus;
    const auto& index = loaded.index;
    std::cout << "documents " << corpus.num_docs() << "\nterms " << corpus.num_terms() << "\ntotal_size "
              << corpus.total_size() << "\npostings " << index.num_postings() << "\nstored_codec "
              << codec_name(loaded.codec) << "\n";
    if (index.num_postings() > 0) {
        for (Codec c : kAllCodecs) {
            std::cout << "bits_per_posting_" << codec_name(c) << ' ' << bits_per_posting(index, c) << "\n";
        }
    }
    for (TermId t = 0; t < std::min(o.top, corpus.num_terms()); ++t) {
        std::cout << "term " << t << ' ' << corpus.term(t) << " df " << corpus.df(t) << "\n";
    }
    if (!o.clusters.empty()) {
        const auto clustering = load_clustering(o.clusters, corpus.num_docs());
        const auto probs = probabilities_from_corpus(corpus, o.tc);
        const auto counts = ClusterCounts::from_corpus(corpus, clustering, probs.size());
        const auto [lo, hi] = std::minmax_element(clustering.sizes.begin(), clustering.sizes.end());
        std::cout << "clusters " << clustering.k << "\nnonempty " << clustering.num_nonempty() << "\nsmallest "
                  << *lo << "\nlargest " << *hi << "\npsi " << psi(counts, probs) << "\npsi_single "
                  << psi(counts.merged(), probs) << "\n";
    }
    return 0;
}

struct GenOpts {
    PlantedParams params;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string truth;
    std::string log_out;
    std::size_t log_queries = 0;
};

int run_gen(GenOpts o) {
    o.params.seed = o.seed ? *o.seed : default_seed();
    const auto planted = generate_planted_corpus(o.params);
    const auto& corpus = planted.corpus;
    auto out = open_out(o.out);
    for (DocId d = 0; d < corpus.num_docs(); ++d) {
        const auto terms = corpus.terms_of(d);
        for (std::size_t i = 0; i < terms.size(); ++i) out << (i ? " " : "") << corpus.term(terms[i]);
        out << "\n";
    }
    if (!o.truth.empty()) {
        auto t = open_out(o.truth);
        t << "doc_id,topic\n";
        for (std::size_t d = 0; d < planted.topic.size(); ++d) t << d << ',' << planted.topic[d] << "\n";
    }
    if (!o.log_out.empty()) {
        const auto workload =
            generate_workload(probabilities_from_corpus(corpus, corpus.num_terms()), o.log_queries, o.params.seed);
        auto l = open_out(o.log_out);
        for (const auto& [a, b] : workload.queries) l << corpus.term(a) << ' ' << corpus.term(b) << "\n";
    }
    std::cout << "documents " << corpus.num_docs() << "\nterms " << corpus.num_terms() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"seclud: exact conjunctive search over clustered inverted indexes"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    IndexOpts io;
    auto* index_cmd = app.add_subcommand("index", "Build and store an inverted index");
    index_cmd->add_option("--in", io.in, "Input documents (file or - for stdin)")->required();
    index_cmd->add_option("--out", io.out, "Output file or directory")->required();
    index_cmd->add_option("--format", io.format, "plain or jsonl (default: from extension)");
    index_cmd->add_option("--codec", io.codec, "golomb, gamma, delta or vbyte")->capture_default_str();

    ClusterOpts co;
    auto* cluster_cmd = app.add_subcommand("cluster", "Cluster the documents of an index");
    cluster_cmd->add_option("--index", co.index, "Index file or directory")->required();
    cluster_cmd->add_option("--out", co.out, "Output clustering CSV")->required();
    cluster_cmd->add_option("--algo", co.algo, "topdown or flat")->capture_default_str();
    cluster_cmd->add_option("--k", co.k, "Target number of clusters");
    cluster_cmd->add_option("--seed", co.seed, "Random seed (default: SECLUD_SEED or 1)");
    cluster_cmd->add_option("--threads", co.threads, "Worker threads");
    cluster_cmd->add_option("--tc", co.tc, "Number of frequent terms in the objective");
    cluster_cmd->add_option("--config", co.config, "key = value configuration file");
    cluster_cmd->add_option("--log", co.log, "Query log for term probabilities");

    QueryOpts qo;
    auto* query_cmd = app.add_subcommand("query", "Run one conjunctive query");
    query_cmd->add_option("--index", qo.index, "Index file or directory")->required();
    query_cmd->add_option("--terms", qo.terms, "Query terms, e.g. \"car tuning\"")->required();
    query_cmd->add_option("--variant", qo.variant, "single, percluster, clusterindex or reordered")
        ->capture_default_str();
    query_cmd->add_option("--clusters", qo.clusters, "Clustering CSV");
    query_cmd->add_flag("--steps", qo.steps, "Print the step counter");
    query_cmd->add_flag("--ids", qo.ids, "Print the matching document ids");

    BenchOpts bo;
    auto* bench_cmd = app.add_subcommand("bench", "Measure speedups of the clustered query variants");
    bench_cmd->add_option("--index", bo.index, "Index file or directory")->required();
    bench_cmd->add_option("--clusters", bo.clusters, "Clustering CSV")->required();
    bench_cmd->add_option("--workload-seed", bo.workload_seed, "Seed of the generated workload");
    bench_cmd->add_option("--queries", bo.queries, "Generated queries")->capture_default_str();
    bench_cmd->add_option("--log", bo.log, "Query log instead of a generated workload");
    bench_cmd->add_option("--tc", bo.tc, "Frequent terms in the probability table")->capture_default_str();
    bench_cmd->add_option("--repetitions", bo.repetitions, "Timing repetitions")->capture_default_str();
    bench_cmd->add_option("--bucket", bo.bucket, "Bucket size of document lists")->capture_default_str();
    bench_cmd->add_option("--cluster-bucket", bo.cluster_bucket, "Bucket size of cluster lists")
        ->capture_default_str();
    bench_cmd->add_option("--out", bo.out, "Speedup CSV (default: stdout)");
    bench_cmd->add_option("--compression", bo.compression, "Compression CSV");
    bench_cmd->add_option("--tc-sweep", bo.tc_sweep, "Comma separated TC values to re-cluster with");
    bench_cmd->add_option("--tc-out", bo.tc_out, "TC sensitivity CSV (default: stdout)");
    bench_cmd->add_option("--config", bo.config, "Clustering configuration for --tc-sweep");
    bench_cmd->add_option("--k", bo.k, "Target clusters for --tc-sweep");
    bench_cmd->add_option("--plot-data", bo.plot_data, "Directory for x/y series files");

    StatsOpts so;
    auto* stats_cmd = app.add_subcommand("stats", "Describe an index and optionally a clustering");
    stats_cmd->add_option("--index", so.index, "Index file or directory")->required();
    stats_cmd->add_option("--clusters", so.clusters, "Clustering CSV");
    stats_cmd->add_option("--top", so.top, "Most frequent terms to list")->capture_default_str();
    stats_cmd->add_option("--tc", so.tc, "Frequent terms for psi")->capture_default_str();

    GenOpts go;
    auto* gen_cmd = app.add_subcommand("gen", "Generate a planted-topic corpus");
    gen_cmd->add_option("--out", go.out, "Output corpus, one document per line")->required();
    gen_cmd->add_option("--topics", go.params.topics)->capture_default_str();
    gen_cmd->add_option("--docs-per-topic", go.params.docs_per_topic)->capture_default_str();
    gen_cmd->add_option("--vocab", go.params.vocab_per_topic, "Private vocabulary per topic")->capture_default_str();
    gen_cmd->add_option("--shared-vocab", go.params.shared_vocab)->capture_default_str();
    gen_cmd->add_option("--overlap", go.params.overlap_fraction, "Fraction of shared tokens")->capture_default_str();
    gen_cmd->add_option("--zipf", go.params.zipf_exponent)->capture_default_str();
    gen_cmd->add_option("--doc-length", go.params.doc_length, "Mean tokens per document")->capture_default_str();
    gen_cmd->add_option("--seed", go.seed, "Random seed (default: SECLUD_SEED or 1)");
    gen_cmd->add_option("--truth", go.truth, "Ground truth CSV doc_id,topic");
    gen_cmd->add_option("--log-out", go.log_out, "Also write a query log");
    gen_cmd->add_option("--log-queries", go.log_queries, "Queries in the log")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help();
        return 1;
    }

    try {
        for (auto* sub : app.get_subcommands()) log_config(*sub);
        if (*index_cmd) return run_index(io);
        if (*cluster_cmd) return run_cluster(co);
        if (*query_cmd) return run_query(qo);
        if (*bench_cmd) return run_bench(bo);
        if (*stats_cmd) return run_stats(so);
        if (*gen_cmd) return run_gen(go);
    } catch (const InvariantViolation& e) {
        std::cerr << "seclud: internal error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "seclud: error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

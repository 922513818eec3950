#include "seclud/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <random>

namespace seclud {

namespace {

std::vector<double> zipf_cdf(std::size_t n, double exponent) {
    std::vector<double> cdf(n);
    double acc = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        acc += 1.0 / std::pow(static_cast<double>(r + 1), exponent);
        cdf[r] = acc;
    }
    for (auto& v : cdf) v /= acc;
    return cdf;
}

std::size_t draw(const std::vector<double>& cdf, double u) {
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

using Clock = std::chrono::steady_clock;

}  // namespace

PlantedCorpus generate_planted_corpus(const PlantedParams& params) {
    if (params.topics == 0 || params.docs_per_topic == 0 || params.vocab_per_topic == 0 ||
        params.doc_length == 0) {
        throw Error("planted corpus parameters must be positive");
    }
    if (params.overlap_fraction < 0.0 || params.overlap_fraction > 1.0) {
        throw Error("overlap_fraction must lie in [0, 1]");
    }
    if (params.overlap_fraction > 0.0 && params.shared_vocab == 0) throw Error("shared vocabulary is empty");

    std::mt19937_64 rng(params.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto private_cdf = zipf_cdf(params.vocab_per_topic, params.zipf_exponent);
    const auto shared_cdf = zipf_cdf(std::max<std::size_t>(params.shared_vocab, 1), params.zipf_exponent);

    std::vector<std::vector<std::string>> private_words(params.topics);
    for (std::uint32_t z = 0; z < params.topics; ++z) {
        for (std::size_t r = 0; r < params.vocab_per_topic; ++r) {
            private_words[z].push_back("t" + std::to_string(z) + "w" + std::to_string(r));
        }
    }
    std::vector<std::string> shared_words;
    for (std::size_t r = 0; r < params.shared_vocab; ++r) shared_words.push_back("s" + std::to_string(r));

    PlantedCorpus out;
    out.topic.reserve(params.topics * params.docs_per_topic);
    for (std::uint32_t z = 0; z < params.topics; ++z) out.topic.insert(out.topic.end(), params.docs_per_topic, z);
    std::shuffle(out.topic.begin(), out.topic.end(), rng);

    const std::size_t lo = std::max<std::size_t>(1, params.doc_length / 2);
    const std::size_t hi = std::max(lo, params.doc_length + params.doc_length / 2);
    std::uniform_int_distribution<std::size_t> length(lo, hi);
    CorpusBuilder builder;
    std::vector<std::string> tokens;
    for (const auto z : out.topic) {
        tokens.clear();
        const std::size_t len = length(rng);
        for (std::size_t i = 0; i < len; ++i) {
            if (unit(rng) < params.overlap_fraction) {
                tokens.push_back(shared_words[draw(shared_cdf, unit(rng))]);
            } else {
                tokens.push_back(private_words[z][draw(private_cdf, unit(rng))]);
            }
        }
        builder.add_document(tokens);
    }
    out.corpus = std::move(builder).finish();
    return out;
}

Workload generate_workload(const ProbTable& probs, std::size_t num_queries, std::uint64_t seed) {
    const auto support = std::count_if(probs.p.begin(), probs.p.end(), [](double p) { return p > 0.0; });
    if (support < 2) throw Error("a workload needs at least two terms with positive probability");
    Workload w;
    w.probs = probs;
    std::mt19937_64 rng(seed);
    std::discrete_distribution<TermId> pick(probs.p.begin(), probs.p.end());
    w.queries.reserve(num_queries);
    for (std::size_t i = 0; i < num_queries; ++i) {
        const TermId t = pick(rng);
        TermId u = pick(rng);
        while (u == t) {
            ++w.self_pairs;
            u = pick(rng);
        }
        w.queries.emplace_back(t, u);
    }
    return w;
}

Workload workload_from_log(const QueryLog& log, const Corpus& corpus, std::size_t tc) {
    Workload w;
    w.probs = probabilities_from_log(log.pairs, corpus, tc);
    for (const auto& [a, b] : log.pairs) {
        const TermId t = corpus.lookup(a);
        const TermId u = corpus.lookup(b);
        if (t == kNoTerm || u == kNoTerm) {
            ++w.unknown;
            continue;
        }
        if (t == u) {
            ++w.self_pairs;
            continue;
        }
        w.queries.emplace_back(t, u);
    }
    return w;
}

ProbTable restrict_probs(const ProbTable& probs, std::size_t tc) {
    ProbTable out;
    out.source = probs.source;
    out.p.assign(probs.p.begin(), probs.p.begin() + static_cast<std::ptrdiff_t>(std::min(tc, probs.size())));
    const double sum = std::accumulate(out.p.begin(), out.p.end(), 0.0);
    if (!(sum > 0.0)) throw Error("no probability mass among the " + std::to_string(tc) + " most frequent terms");
    for (auto& v : out.p) v /= sum;
    return out;
}

double theoretical_speedup(const ClusterCounts& counts, const ProbTable& probs, CostModel model) {
    const double clustered = psi_model(counts, probs, model);
    if (!(clustered > 0.0)) throw Error("degenerate workload: clustered cost is zero");
    return psi_model(counts.merged(), probs, model) / clustered;
}

double theoretical_speedup(const Corpus& corpus, const Clustering& clustering, const ProbTable& probs,
                           CostModel model) {
    return theoretical_speedup(ClusterCounts::from_corpus(corpus, clustering, probs.size()), probs, model);
}

RunTotals run_workload(const QueryEngine& engine, const Workload& workload, unsigned repetitions,
                       std::vector<std::vector<DocId>>* results) {
    RunTotals totals;
    repetitions = std::max(1u, repetitions);
    if (results) {
        results->clear();
        results->reserve(workload.queries.size());
    }
    std::uint64_t sink = 0;
    double seconds = 0.0;
    for (unsigned r = 0; r < repetitions; ++r) {
        std::uint64_t steps = 0;
        const auto start = Clock::now();
        for (const auto& [t, u] : workload.queries) {
            auto ids = engine.query(t, u, &steps);
            sink += ids.size();
            if (r == 0 && results) results->push_back(std::move(ids));
        }
        seconds += std::chrono::duration<double>(Clock::now() - start).count();
        totals.steps = steps;
    }
    totals.seconds = seconds / repetitions + 0.0 * static_cast<double>(sink);
    return totals;
}

MeasuredSpeedup measured_speedup(const QueryEngine& a, const QueryEngine& b, const Workload& workload,
                                 unsigned repetitions) {
    MeasuredSpeedup m;
    std::vector<std::vector<DocId>> ra;
    std::vector<std::vector<DocId>> rb;
    m.a = run_workload(a, workload, repetitions, &ra);
    m.b = run_workload(b, workload, repetitions, &rb);
    for (std::size_t i = 0; i < ra.size(); ++i) m.mismatches += ra[i] != rb[i];
    m.wall_ratio = m.b.seconds > 0.0 ? m.a.seconds / m.b.seconds : 1.0;
    m.step_ratio = m.b.steps > 0 ? static_cast<double>(m.a.steps) / static_cast<double>(m.b.steps)
                                 : (m.a.steps == 0 ? 1.0 : 0.0);
    return m;
}

SpeedupReport speedup_report(const Corpus& corpus, const InvertedIndex& index, const Clustering& clustering,
                             const Workload& workload, const BenchOptions& options) {
    SpeedupReport report;
    report.queries = workload.queries.size();
    report.clusters = clustering.k;
    report.s_t = theoretical_speedup(corpus, clustering, workload.probs, CostModel::lookup_min);
    if (options.comparison_model) {
        const auto table = workload.probs.size() <= kBruteforceTermLimit
                               ? workload.probs
                               : restrict_probs(workload.probs, kBruteforceTermLimit);
        const auto counts = ClusterCounts::from_corpus(corpus, clustering, table.size());
        report.sl_terms = table.size();
        report.s_t_small = theoretical_speedup(counts, table, CostModel::lookup_min);
        report.s_l = theoretical_speedup(counts, table, CostModel::comparison_log);
    }

    std::vector<std::vector<DocId>> reference;
    for (auto variant : kAllVariants) {
        const auto engine =
            QueryEngine::build(variant, index, clustering, options.bucket_size, options.cluster_bucket_size);
        std::vector<std::vector<DocId>> results;
        report.totals[static_cast<int>(variant)] = run_workload(engine, workload, options.repetitions, &results);
        if (variant == QueryVariant::single) {
            reference = std::move(results);
            continue;
        }
        for (std::size_t i = 0; i < results.size(); ++i) {
            if (results[i] != reference[i]) {
                throw InvariantViolation("query variant " + std::string(variant_name(variant)) +
                                         " disagrees with the single index on query " + std::to_string(i));
            }
        }
    }
    const auto& single = report.totals[static_cast<int>(QueryVariant::single)];
    auto ratio = [&](QueryVariant v, bool steps) {
        const auto& other = report.totals[static_cast<int>(v)];
        if (steps) return other.steps ? static_cast<double>(single.steps) / static_cast<double>(other.steps) : 0.0;
        return other.seconds > 0.0 ? single.seconds / other.seconds : 0.0;
    };
    report.s_c_steps = ratio(QueryVariant::cluster_index, true);
    report.s_c_wall = ratio(QueryVariant::cluster_index, false);
    report.s_r_steps = ratio(QueryVariant::reordered, true);
    report.s_r_wall = ratio(QueryVariant::reordered, false);
    report.s_p_steps = ratio(QueryVariant::per_cluster, true);
    report.s_p_wall = ratio(QueryVariant::per_cluster, false);
    return report;
}

void write_speedup_csv(std::ostream& out, const SpeedupReport& r) {
    out << "metric,value\n";
    out << "clusters," << r.clusters << "\n";
    out << "queries," << r.queries << "\n";
    out << "S_T," << r.s_t << "\n";
    out << "S_L," << r.s_l << "\n";
    out << "S_T_small," << r.s_t_small << "\n";
    out << "SL_terms," << r.sl_terms << "\n";
    out << "S_C_steps," << r.s_c_steps << "\n";
    out << "S_C_wall," << r.s_c_wall << "\n";
    out << "S_R_steps," << r.s_r_steps << "\n";
    out << "S_R_wall," << r.s_r_wall << "\n";
    out << "S_P_steps," << r.s_p_steps << "\n";
    out << "S_P_wall," << r.s_p_wall << "\n";
    for (auto v : kAllVariants) {
        const auto& t = r.totals[static_cast<int>(v)];
        out << "steps_" << variant_name(v) << "," << t.steps << "\n";
        out << "seconds_" << variant_name(v) << "," << t.seconds << "\n";
    }
}

void write_speedup_summary(std::ostream& out, const SpeedupReport& r) {
    out << "clusters: " << r.clusters << ", queries: " << r.queries << "\n"
        << "  S_T (lookup-min model)      " << r.s_t << "\n";
    if (r.sl_terms > 0) {
        out << "  on the " << r.sl_terms << " most frequent terms: S_L (comparison-log) " << r.s_l
            << ", S_T (lookup-min) " << r.s_t_small << "\n";
    }
    out << "  S_C cluster index   steps " << r.s_c_steps << "  wall " << r.s_c_wall << "\n"
        << "  S_R reordered       steps " << r.s_r_steps << "  wall " << r.s_r_wall << "\n"
        << "  per-cluster         steps " << r.s_p_steps << "  wall " << r.s_p_wall << "\n";
}

std::vector<CompressionRow> compression_report(
    const InvertedIndex& index, const std::vector<std::pair<std::string, std::vector<DocId>>>& orderings,
    std::span<const Codec> codecs) {
    std::vector<CompressionRow> rows;
    for (const auto& [name, perm] : orderings) {
        const auto permuted = permute_index(index, perm);
        for (Codec c : codecs) rows.push_back({name, c, bits_per_posting(permuted, c)});
    }
    return rows;
}

void write_compression_csv(std::ostream& out, std::span<const CompressionRow> rows) {
    out << "ordering,codec,bits_per_posting\n";
    for (const auto& r : rows) out << r.ordering << ',' << codec_name(r.codec) << ',' << r.bits_per_posting << "\n";
}

std::vector<DocId> random_permutation(std::size_t n, std::uint64_t seed) {
    std::vector<DocId> perm(n);
    std::iota(perm.begin(), perm.end(), DocId{0});
    // own stream, so it never replays a shuffle made elsewhere with the same seed
    std::mt19937_64 rng(seed ^ 0x6a09e667f3bcc909ull);
    std::shuffle(perm.begin(), perm.end(), rng);
    return perm;
}

std::vector<TcRow> tc_sensitivity(const Corpus& corpus, const InvertedIndex& index, const Workload& workload,
                                  std::span<const std::size_t> tc_values, const ClusterConfig& config,
                                  const BenchOptions& options) {
    std::vector<TcRow> rows;
    BenchOptions opts = options;
    opts.comparison_model = false;
    for (const std::size_t tc : tc_values) {
        ClusterConfig cfg = config;
        cfg.tc = tc;
        const auto probs = restrict_probs(workload.probs, tc);
        const auto clustering = topdown(corpus, probs, cfg);
        const auto report = speedup_report(corpus, index, clustering, workload, opts);
        rows.push_back({tc, clustering.k, report.s_t, report.s_c_steps, report.s_r_steps, report.s_c_wall,
                        report.s_r_wall});
    }
    return rows;
}

void write_tc_csv(std::ostream& out, std::span<const TcRow> rows) {
    out << "tc,clusters,S_T,S_C_steps,S_R_steps,S_C_wall,S_R_wall\n";
    for (const auto& r : rows) {
        out << r.tc << ',' << r.clusters << ',' << r.s_t << ',' << r.s_c_steps << ',' << r.s_r_steps << ','
            << r.s_c_wall << ',' << r.s_r_wall << "\n";
    }
}

double adjusted_rand_index(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
    if (a.size() != b.size()) throw Error("labelings differ in length");
    const double n = static_cast<double>(a.size());
    std::map<std::pair<std::uint32_t, std::uint32_t>, double> joint;
    std::map<std::uint32_t, double> ra;
    std::map<std::uint32_t, double> rb;
    for (std::size_t i = 0; i < a.size(); ++i) {
        joint[{a[i], b[i]}] += 1;
        ra[a[i]] += 1;
        rb[b[i]] += 1;
    }
    auto c2 = [](double x) { return x * (x - 1) / 2; };
    double index = 0, sa = 0, sb = 0;
    for (const auto& [_, v] : joint) index += c2(v);
    for (const auto& [_, v] : ra) sa += c2(v);
    for (const auto& [_, v] : rb) sb += c2(v);
    const double expected = sa * sb / c2(n);
    const double max_index = (sa + sb) / 2;
    if (max_index == expected) return 1.0;
    return (index - expected) / (max_index - expected);
}

}  // namespace seclud

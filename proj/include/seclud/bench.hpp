#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "seclud/cluster.hpp"
#include "seclud/codec.hpp"
#include "seclud/corpus.hpp"
#include "seclud/index.hpp"
#include "seclud/query.hpp"

namespace seclud {

/// Synthetic corpus with a known topic partition. Every topic owns a
/// Zipf-distributed private vocabulary; a shared Zipf pool supplies a
/// fraction `overlap_fraction` of all tokens.
struct PlantedParams {
    std::uint32_t topics = 16;
    std::size_t docs_per_topic = 3125;
    std::size_t vocab_per_topic = 2000;
    std::size_t shared_vocab = 1000;
    double overlap_fraction = 0.2;
    double zipf_exponent = 1.0;
    std::size_t doc_length = 40;  // mean tokens per document, uniform in [L/2, 3L/2]
    std::uint64_t seed = 1;
};

struct PlantedCorpus {
    Corpus corpus;
    std::vector<std::uint32_t> topic;  // ground truth per document
};

PlantedCorpus generate_planted_corpus(const PlantedParams& params);

/// Weighted two-term queries plus the probability table used for S_T.
struct Workload {
    std::vector<std::pair<TermId, TermId>> queries;
    ProbTable probs;
    std::size_t self_pairs = 0;  // t = u draws resampled or dropped
    std::size_t unknown = 0;     // log queries with a term outside the dictionary
};

/// i.i.d. term pairs drawn from `probs`; self-pairs are redrawn.
Workload generate_workload(const ProbTable& probs, std::size_t num_queries, std::uint64_t seed);

/// Maps a query log onto term ids; probabilities come from the same log.
Workload workload_from_log(const QueryLog& log, const Corpus& corpus, std::size_t tc);

/// probs restricted to [0, tc) and renormalised.
ProbTable restrict_probs(const ProbTable& probs, std::size_t tc);

/// psi(single cluster) / psi(clustering) with the same probability table.
double theoretical_speedup(const ClusterCounts& counts, const ProbTable& probs, CostModel model);
double theoretical_speedup(const Corpus& corpus, const Clustering& clustering, const ProbTable& probs,
                           CostModel model);

struct RunTotals {
    double seconds = 0.0;  // mean over repetitions for the whole workload
    std::uint64_t steps = 0;
};

/// Runs the workload `repetitions` times and returns mean wall-clock and steps.
/// When `results` is non-null it receives one result vector per query.
RunTotals run_workload(const QueryEngine& engine, const Workload& workload, unsigned repetitions,
                       std::vector<std::vector<DocId>>* results = nullptr);

struct MeasuredSpeedup {
    double wall_ratio = 0.0;  // seconds(a) / seconds(b)
    double step_ratio = 0.0;  // steps(a) / steps(b)
    RunTotals a;
    RunTotals b;
    std::size_t mismatches = 0;
};

MeasuredSpeedup measured_speedup(const QueryEngine& a, const QueryEngine& b, const Workload& workload,
                                 unsigned repetitions = 3);

struct BenchOptions {
    std::size_t bucket_size = kDefaultBucketSize;
    std::size_t cluster_bucket_size = kDefaultClusterIndexBucketSize;
    unsigned repetitions = 3;
    bool comparison_model = true;  // S_L over the first kBruteforceTermLimit terms
};

struct SpeedupReport {
    double s_t = 0.0;
    double s_l = 0.0;         // comparison-log model, 0 when not evaluated
    double s_t_small = 0.0;   // lookup-min model on the same table as s_l
    std::size_t sl_terms = 0; // terms in that table
    double s_c_steps = 0.0;
    double s_c_wall = 0.0;
    double s_r_steps = 0.0;
    double s_r_wall = 0.0;
    double s_p_steps = 0.0;  // per-cluster without the cluster index
    double s_p_wall = 0.0;
    RunTotals totals[4];  // indexed by QueryVariant
    std::size_t queries = 0;
    std::uint32_t clusters = 0;
};

/// Builds all four engines, runs the workload on each, and fails with
/// InvariantViolation if any two engines disagree on any query.
SpeedupReport speedup_report(const Corpus& corpus, const InvertedIndex& index, const Clustering& clustering,
                             const Workload& workload, const BenchOptions& options);

void write_speedup_csv(std::ostream& out, const SpeedupReport& report);
void write_speedup_summary(std::ostream& out, const SpeedupReport& report);

struct CompressionRow {
    std::string ordering;
    Codec codec;
    double bits_per_posting;
};

/// Bits per posting of the whole index under every (ordering, codec) pair.
/// Each ordering maps old document ids to new ones.
std::vector<CompressionRow> compression_report(
    const InvertedIndex& index, const std::vector<std::pair<std::string, std::vector<DocId>>>& orderings,
    std::span<const Codec> codecs);

void write_compression_csv(std::ostream& out, std::span<const CompressionRow> rows);

std::vector<DocId> random_permutation(std::size_t n, std::uint64_t seed);

struct TcRow {
    std::size_t tc = 0;
    std::uint32_t clusters = 0;
    double s_t = 0.0;
    double s_c_steps = 0.0;
    double s_r_steps = 0.0;
    double s_c_wall = 0.0;
    double s_r_wall = 0.0;
};

/// Re-clusters (TopDown, fixed seed) with the objective restricted to the tc
/// most frequent terms, then evaluates against the full workload.
std::vector<TcRow> tc_sensitivity(const Corpus& corpus, const InvertedIndex& index, const Workload& workload,
                                  std::span<const std::size_t> tc_values, const ClusterConfig& config,
                                  const BenchOptions& options);

void write_tc_csv(std::ostream& out, std::span<const TcRow> rows);

/// Adjusted Rand index between two labelings of the same items.
double adjusted_rand_index(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b);

}  // namespace seclud

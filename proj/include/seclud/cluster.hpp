#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "seclud/common.hpp"
#include "seclud/corpus.hpp"
#include "seclud/intersect.hpp"

namespace seclud {

/// Tuning knobs of the clustering algorithms. Defaults are the reference
/// configuration.
struct ClusterConfig {
    std::uint32_t k = 64;                         // target number of clusters
    double epsilon = 0.1;                         // multilevel sample factor
    double convergence_threshold = 0.01;          // minimum relative psi improvement per round
    std::size_t doc_grained_threshold = 100'000;  // below this many documents, update after every move
    std::size_t base_case_size = 0;               // multilevel recursion floor; 0 = doc_grained_threshold / 10
    std::uint32_t chi = 8;                        // TopDown splitting factor
    std::size_t tc = 100'000;                     // number of frequent terms used by the objective
    std::uint32_t max_rounds = 50;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    bool compact_leaves = true;  // merge adjacent undersized TopDown leaves

    void validate() const;
    std::size_t effective_base_case() const;
};

/// Reads `key = value` lines (`#` comments) whose keys mirror the field names.
ClusterConfig read_cluster_config(std::istream& in, ClusterConfig base = {});
void write_cluster_config(std::ostream& out, const ClusterConfig& config);

/// A partition of the documents [0, n) into k clusters.
struct Clustering {
    std::uint32_t k = 0;
    std::vector<ClusterId> assign;
    std::vector<std::uint32_t> sizes;

    std::size_t num_docs() const { return assign.size(); }
    std::uint32_t num_nonempty() const;

    static Clustering from_assignment(std::vector<ClusterId> assign, std::uint32_t k);
    static Clustering single(std::size_t num_docs);

    void validate(std::size_t num_docs) const;
};

/// CSV `doc_id,cluster_id` with a header line.
void write_clustering_csv(std::ostream& out, const Clustering& c);
Clustering read_clustering_csv(std::istream& in, std::size_t num_docs);

struct TermCount {
    TermId term;
    std::uint32_t count;
};

/// n_j(t): documents of cluster j containing frequent term t. Sparse per cluster.
class ClusterCounts {
public:
    ClusterCounts() = default;

    static ClusterCounts from_corpus(const Corpus& corpus, const Clustering& clustering, std::size_t tc);
    /// Per cluster list of (term, count); zero counts are dropped.
    static ClusterCounts from_table(std::vector<std::vector<TermCount>> table);

    std::size_t num_clusters() const { return clusters_.size(); }
    std::span<const TermCount> cluster(ClusterId j) const { return clusters_.at(j); }
    std::uint32_t count(ClusterId j, TermId t) const;
    /// Counts of a single cluster holding every document.
    ClusterCounts merged() const;

    /// Adds one document's frequent terms to cluster j.
    void add_document(ClusterId j, std::span<const TermId> terms, std::size_t tc);

private:
    std::vector<std::vector<TermCount>> clusters_;  // sorted by term
};

/// Per-cluster lookup of S(v) = sum of p(u) over terms u with n(u) > v.
///
/// Built by sorting the cluster's terms by count and summing probabilities
/// from the top; queries binary-search the distinct count values.
class ScoreTable {
public:
    ScoreTable() = default;
    /// entries: (count, probability) of every term present in the cluster.
    static ScoreTable build(std::vector<std::pair<std::uint32_t, double>> entries);

    double suffix_mass(std::uint32_t v) const;
    double total_mass() const { return above_.empty() ? 0.0 : above_.front(); }
    std::span<const std::uint32_t> values() const { return values_; }

private:
    std::vector<std::uint32_t> values_;  // distinct counts, ascending
    std::vector<double> above_;          // above_[i] = mass with count >= values_[i]; above_.back() = 0
};

struct ScoreTables {
    std::vector<ScoreTable> clusters;
};

ScoreTables build_score_tables(const ClusterCounts& counts, const ProbTable& probs);

/// Increase of psi when a document containing only t joins cluster j:
/// p(t) * S_j(n_j(t)).
double score_term(const ScoreTables& tables, const ClusterCounts& counts, ClusterId j, TermId t,
                  const ProbTable& probs);
/// Sum of score_term over the frequent terms of the document.
double score_doc(const ScoreTables& tables, const ClusterCounts& counts, ClusterId j,
                 std::span<const TermId> doc, const ProbTable& probs);

/// Expected query cost under the lookup-min model:
/// sum over term pairs {t,u} of p(t) p(u) sum_j min(n_j(t), n_j(u)).
/// O(m_j log m_j) per cluster.
double psi(const ClusterCounts& counts, const ProbTable& probs);

inline constexpr std::size_t kBruteforceTermLimit = 2000;

/// Pair enumeration over the frequent terms. Throws Error when more than
/// kBruteforceTermLimit terms have non-zero probability.
double psi_bruteforce(const ClusterCounts& counts, const ProbTable& probs, CostModel model);

/// psi for either cost model (comparison-log goes through pair enumeration).
double psi_model(const ClusterCounts& counts, const ProbTable& probs, CostModel model);

struct ClusterRunInfo {
    std::uint32_t final_rounds = 0;  // K-means rounds of the last (outermost) refinement
    std::uint32_t refinements = 0;
    std::size_t leaves = 0;          // TopDown leaves before compaction
    std::size_t merged_leaves = 0;
    std::size_t forced_splits = 0;
};

/// One round with frozen score tables; returns the new clustering and its psi.
std::pair<Clustering, double> kmeans_round(const Corpus& corpus, const Clustering& clustering,
                                           const ProbTable& probs, const ClusterConfig& config);

/// Sequential refinement that updates the tables after every move. Stops on
/// a pass without moves, on less than convergence_threshold improvement, or
/// after max_rounds passes.
Clustering kmeans_doc_grained(const Corpus& corpus, const Clustering& clustering, const ProbTable& probs,
                              const ClusterConfig& config, ClusterRunInfo* info = nullptr);

/// Flat clustering of all documents into k clusters via recursive sampling
/// followed by K-means refinement.
Clustering multilevel_init(const Corpus& corpus, std::uint32_t k, const ProbTable& probs,
                           const ClusterConfig& config, ClusterRunInfo* info = nullptr);

/// Sample size used at one multilevel level: max(k, ceil(epsilon * n)).
std::size_t multilevel_sample_size(std::size_t n, std::uint32_t k, double epsilon);

/// Pieces for a TopDown subproblem of s documents: clamp(ceil(s k / n), 2, chi).
std::uint32_t topdown_pieces(std::size_t s, std::size_t n, std::uint32_t k, std::uint32_t chi);

/// Recursive splitting into config.k .. 2 config.k clusters, numbered in
/// depth-first leaf order.
Clustering topdown(const Corpus& corpus, const ProbTable& probs, const ClusterConfig& config,
                   ClusterRunInfo* info = nullptr);

}  // namespace seclud

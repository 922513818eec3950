#pragma once

// Dense working representation shared by the clustering algorithms.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "seclud/cluster.hpp"

namespace seclud::detail {

using Rng = std::mt19937_64;

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

/// A set of documents with their frequent terms renumbered densely.
struct Subproblem {
    std::vector<DocId> docs;             // global ids
    std::vector<std::uint32_t> offsets;  // docs.size() + 1
    std::vector<std::uint32_t> terms;    // local term ids
    std::vector<double> prob;            // per local term, all > 0
    std::vector<TermId> global_term;

    std::size_t num_docs() const { return docs.size(); }
    std::size_t num_terms() const { return prob.size(); }
    std::span<const std::uint32_t> doc_terms(std::size_t i) const {
        return std::span<const std::uint32_t>(terms).subspan(offsets[i], offsets[i + 1] - offsets[i]);
    }
};

/// Terms t < min(tc, probs.size()) with p(t) > 0 take part.
Subproblem make_subproblem(const Corpus& corpus, std::span<const DocId> docs, const ProbTable& probs,
                           std::size_t tc);

/// Clustering state over a subset (`members`, indices into a Subproblem).
struct Partition {
    std::uint32_t k = 0;
    std::vector<std::uint32_t> members;
    std::vector<std::uint32_t> assign;  // parallel to members
    std::vector<std::uint32_t> sizes;
    std::vector<std::uint32_t> counts;  // k x num_terms

    std::uint32_t& count(std::uint32_t j, std::uint32_t t, std::size_t m) { return counts[j * m + t]; }
};

void rebuild_counts(const Subproblem& sub, Partition& part);
double partition_psi(const Subproblem& sub, const Partition& part);

/// score[j * m + t] = p(t) * S_j(n_j(t)), frozen for a round.
std::vector<double> frozen_scores(const Subproblem& sub, const Partition& part);

std::uint32_t kmeans_rounds(const Subproblem& sub, Partition& part, const ClusterConfig& config);
std::uint32_t doc_grained(const Subproblem& sub, Partition& part, const ClusterConfig& config, Rng& rng);
/// Doc-grained below the threshold, round-based otherwise. Returns rounds run.
std::uint32_t refine(const Subproblem& sub, Partition& part, const ClusterConfig& config, Rng& rng);

/// One frozen-table reassignment pass plus empty-cluster reseeding.
void kmeans_round_step(const Subproblem& sub, Partition& part, const ClusterConfig& config);

Partition multilevel(const Subproblem& sub, std::vector<std::uint32_t> members, std::uint32_t k,
                     const ClusterConfig& config, Rng& rng, ClusterRunInfo* info);

/// Farthest-first seeds plus nearest-seed assignment.
Partition seed_partition(const Subproblem& sub, std::vector<std::uint32_t> members, std::uint32_t k, Rng& rng);

Partition partition_from_clustering(const Subproblem& sub, const Clustering& clustering);
Clustering clustering_from_partition(const Subproblem& sub, const Partition& part, std::size_t num_docs);

}  // namespace seclud::detail

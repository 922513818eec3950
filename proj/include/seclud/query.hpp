#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "seclud/cluster.hpp"
#include "seclud/index.hpp"

namespace seclud {

enum class QueryVariant { single, per_cluster, cluster_index, reordered };

inline constexpr QueryVariant kAllVariants[] = {QueryVariant::single, QueryVariant::per_cluster,
                                                QueryVariant::cluster_index, QueryVariant::reordered};

std::string_view variant_name(QueryVariant v);
/// Accepts single, percluster, clusterindex, reordered.
QueryVariant parse_variant(std::string_view name);

/// New id of every document when clusters are laid out one after another in
/// ascending cluster id, keeping the original order inside a cluster:
/// the j-th document of cluster i becomes j + sum_{l < i} |c_l|.
std::vector<DocId> build_reordering(const Clustering& clustering);

std::vector<DocId> invert_permutation(std::span<const DocId> perm);

/// Exact conjunctive queries. All variants return the same sorted ids (in the
/// original id space); they differ only in how much work they do.
class QueryEngine {
public:
    static QueryEngine single(const InvertedIndex& index, std::size_t bucket_size = kDefaultBucketSize);
    static QueryEngine per_cluster(const InvertedIndex& index, const Clustering& clustering,
                                   std::size_t bucket_size = kDefaultBucketSize);
    static QueryEngine cluster_index(const InvertedIndex& index, const Clustering& clustering,
                                     std::size_t bucket_size = kDefaultBucketSize,
                                     std::size_t cluster_bucket_size = kDefaultClusterIndexBucketSize);
    static QueryEngine reordered(const InvertedIndex& index, const Clustering& clustering,
                                 std::size_t bucket_size = kDefaultBucketSize);
    static QueryEngine build(QueryVariant variant, const InvertedIndex& index, const Clustering& clustering,
                             std::size_t bucket_size = kDefaultBucketSize,
                             std::size_t cluster_bucket_size = kDefaultClusterIndexBucketSize);

    QueryVariant variant() const { return variant_; }
    std::size_t num_terms() const { return df_.size(); }

    /// Two-term query. Unknown terms give an empty result. Adds the number of
    /// lookups performed to *steps.
    std::vector<DocId> query(TermId t, TermId u, std::uint64_t* steps = nullptr) const;

    /// Any number of terms: the two rarest are intersected first, the rest
    /// are checked by membership probes.
    std::vector<DocId> query(std::span<const TermId> terms, std::uint64_t* steps = nullptr) const;

private:
    struct ClusterPart {
        std::vector<DocId> local_to_global;
        std::unordered_map<TermId, BucketedList> lists;
    };

    QueryEngine() = default;

    std::vector<DocId> intersect_in_cluster(ClusterId j, TermId t, TermId u, std::uint64_t* steps) const;
    bool contains(TermId t, DocId doc) const;

    QueryVariant variant_ = QueryVariant::single;
    std::vector<std::size_t> df_;
    std::vector<BucketedList> global_;  // single, reordered (permuted ids)
    std::vector<DocId> perm_;           // reordered: old -> new
    std::vector<DocId> inverse_;        // reordered: new -> old
    std::vector<ClusterPart> clusters_;
    std::vector<BucketedList> cluster_lists_;  // cluster index: term -> cluster ids
    std::vector<ClusterId> doc_cluster_;
    std::vector<DocId> doc_local_;
};

}  // namespace seclud

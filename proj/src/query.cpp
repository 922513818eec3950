#include "seclud/query.hpp"

#include <algorithm>

#include "seclud/intersect.hpp"

namespace seclud {

std::string_view variant_name(QueryVariant v) {
    switch (v) {
        case QueryVariant::single: return "single";
        case QueryVariant::per_cluster: return "percluster";
        case QueryVariant::cluster_index: return "clusterindex";
        case QueryVariant::reordered: return "reordered";
    }
    return "unknown";
}

QueryVariant parse_variant(std::string_view name) {
    for (auto v : kAllVariants) {
        if (variant_name(v) == name) return v;
    }
    throw Error("unknown query variant '" + std::string(name) +
                "' (expected single, percluster, clusterindex or reordered)");
}

std::vector<DocId> build_reordering(const Clustering& clustering) {
    std::vector<DocId> start(clustering.k + 1, 0);
    for (ClusterId j = 0; j < clustering.k; ++j) start[j + 1] = start[j] + clustering.sizes[j];
    std::vector<DocId> perm(clustering.assign.size());
    for (std::size_t d = 0; d < perm.size(); ++d) perm[d] = start[clustering.assign[d]]++;
    return perm;
}

std::vector<DocId> invert_permutation(std::span<const DocId> perm) {
    std::vector<DocId> inverse(perm.size());
    for (std::size_t d = 0; d < perm.size(); ++d) inverse[perm[d]] = static_cast<DocId>(d);
    return inverse;
}

namespace {

std::vector<std::size_t> document_frequencies(const InvertedIndex& index) {
    std::vector<std::size_t> df(index.lists.size());
    for (std::size_t t = 0; t < df.size(); ++t) df[t] = index.lists[t].size();
    return df;
}

void check_clustering(const InvertedIndex& index, const Clustering& clustering) {
    if (clustering.num_docs() != index.universe) throw Error("clustering does not match the index size");
    clustering.validate(index.universe);
}

// Shorter list drives the lookup.
std::vector<DocId> lookup_pair(const BucketedList& a, const BucketedList& b, std::uint64_t* steps) {
    return a.size() <= b.size() ? intersect_lookup(a.docs(), b, steps) : intersect_lookup(b.docs(), a, steps);
}

}  // namespace

QueryEngine QueryEngine::single(const InvertedIndex& index, std::size_t bucket_size) {
    QueryEngine e;
    e.variant_ = QueryVariant::single;
    e.df_ = document_frequencies(index);
    e.global_.reserve(index.lists.size());
    for (const auto& list : index.lists) e.global_.push_back(bucketize(list, bucket_size, index.universe));
    return e;
}

QueryEngine QueryEngine::per_cluster(const InvertedIndex& index, const Clustering& clustering,
                                     std::size_t bucket_size) {
    check_clustering(index, clustering);
    QueryEngine e;
    e.variant_ = QueryVariant::per_cluster;
    e.df_ = document_frequencies(index);
    e.clusters_.resize(clustering.k);
    e.doc_cluster_ = clustering.assign;
    e.doc_local_.resize(index.universe);
    for (DocId d = 0; d < index.universe; ++d) {
        auto& part = e.clusters_[clustering.assign[d]];
        e.doc_local_[d] = static_cast<DocId>(part.local_to_global.size());
        part.local_to_global.push_back(d);
    }
    std::vector<std::vector<DocId>> local(clustering.k);
    std::vector<ClusterId> touched;
    for (TermId t = 0; t < index.lists.size(); ++t) {
        for (DocId d : index.lists[t]) {
            const auto j = clustering.assign[d];
            if (local[j].empty()) touched.push_back(j);
            local[j].push_back(e.doc_local_[d]);
        }
        for (ClusterId j : touched) {
            const auto universe = e.clusters_[j].local_to_global.size();
            e.clusters_[j].lists.emplace(t, BucketedList(std::move(local[j]), bucket_size, universe));
            local[j] = {};
        }
        touched.clear();
    }
    return e;
}

QueryEngine QueryEngine::cluster_index(const InvertedIndex& index, const Clustering& clustering,
                                       std::size_t bucket_size, std::size_t cluster_bucket_size) {
    QueryEngine e = per_cluster(index, clustering, bucket_size);
    e.variant_ = QueryVariant::cluster_index;
    e.cluster_lists_.reserve(index.lists.size());
    std::vector<DocId> ids;
    for (TermId t = 0; t < index.lists.size(); ++t) {
        ids.clear();
        for (ClusterId j = 0; j < clustering.k; ++j) {
            if (e.clusters_[j].lists.contains(t)) ids.push_back(j);
        }
        e.cluster_lists_.push_back(bucketize(ids, cluster_bucket_size, clustering.k));
    }
    return e;
}

QueryEngine QueryEngine::reordered(const InvertedIndex& index, const Clustering& clustering,
                                   std::size_t bucket_size) {
    check_clustering(index, clustering);
    QueryEngine e;
    e.variant_ = QueryVariant::reordered;
    e.df_ = document_frequencies(index);
    e.perm_ = build_reordering(clustering);
    e.inverse_ = invert_permutation(e.perm_);
    const auto permuted = permute_index(index, e.perm_);
    e.global_.reserve(permuted.lists.size());
    for (const auto& list : permuted.lists) e.global_.push_back(bucketize(list, bucket_size, index.universe));
    return e;
}

QueryEngine QueryEngine::build(QueryVariant variant, const InvertedIndex& index, const Clustering& clustering,
                               std::size_t bucket_size, std::size_t cluster_bucket_size) {
    switch (variant) {
        case QueryVariant::single: return single(index, bucket_size);
        case QueryVariant::per_cluster: return per_cluster(index, clustering, bucket_size);
        case QueryVariant::cluster_index: return cluster_index(index, clustering, bucket_size, cluster_bucket_size);
        case QueryVariant::reordered: return reordered(index, clustering, bucket_size);
    }
    throw Error("unknown query variant");
}

std::vector<DocId> QueryEngine::intersect_in_cluster(ClusterId j, TermId t, TermId u, std::uint64_t* steps) const {
    const auto& part = clusters_[j];
    const auto a = part.lists.find(t);
    if (a == part.lists.end()) return {};
    const auto b = part.lists.find(u);
    if (b == part.lists.end()) return {};
    auto ids = lookup_pair(a->second, b->second, steps);
    for (auto& id : ids) id = part.local_to_global[id];
    return ids;
}

std::vector<DocId> QueryEngine::query(TermId t, TermId u, std::uint64_t* steps) const {
    if (t >= df_.size() || u >= df_.size()) return {};
    std::vector<DocId> out;
    switch (variant_) {
        case QueryVariant::single:
            out = lookup_pair(global_[t], global_[u], steps);
            break;
        case QueryVariant::reordered:
            out = lookup_pair(global_[t], global_[u], steps);
            for (auto& id : out) id = inverse_[id];
            std::sort(out.begin(), out.end());
            break;
        case QueryVariant::per_cluster:
            for (ClusterId j = 0; j < clusters_.size(); ++j) {
                const auto part = intersect_in_cluster(j, t, u, steps);
                out.insert(out.end(), part.begin(), part.end());
            }
            std::sort(out.begin(), out.end());
            break;
        case QueryVariant::cluster_index: {
            const auto candidates = lookup_pair(cluster_lists_[t], cluster_lists_[u], steps);
            for (ClusterId j : candidates) {
                const auto part = intersect_in_cluster(j, t, u, steps);
                out.insert(out.end(), part.begin(), part.end());
            }
            std::sort(out.begin(), out.end());
            break;
        }
    }
    return out;
}

bool QueryEngine::contains(TermId t, DocId doc) const {
    switch (variant_) {
        case QueryVariant::single: return global_[t].contains(doc);
        case QueryVariant::reordered: return global_[t].contains(perm_[doc]);
        case QueryVariant::per_cluster:
        case QueryVariant::cluster_index: {
            const auto& part = clusters_[doc_cluster_[doc]];
            const auto it = part.lists.find(t);
            return it != part.lists.end() && it->second.contains(doc_local_[doc]);
        }
    }
    return false;
}

std::vector<DocId> QueryEngine::query(std::span<const TermId> terms, std::uint64_t* steps) const {
    if (terms.empty()) return {};
    for (TermId t : terms) {
        if (t >= df_.size()) return {};
    }
    std::vector<TermId> sorted(terms.begin(), terms.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::stable_sort(sorted.begin(), sorted.end(), [&](TermId a, TermId b) { return df_[a] < df_[b]; });
    if (sorted.size() == 1) return query(sorted[0], sorted[0], steps);
    auto result = query(sorted[0], sorted[1], steps);
    for (std::size_t i = 2; i < sorted.size() && !result.empty(); ++i) {
        if (steps) *steps += result.size();
        std::erase_if(result, [&](DocId d) { return !contains(sorted[i], d); });
    }
    return result;
}

}  // namespace seclud

#include <algorithm>
#include <functional>
#include <numeric>

#include "cluster_engine.hpp"

namespace seclud {

std::uint32_t topdown_pieces(std::size_t s, std::size_t n, std::uint32_t k, std::uint32_t chi) {
    const std::size_t wanted = (s * k + n - 1) / n;
    return static_cast<std::uint32_t>(std::clamp<std::size_t>(wanted, 2, chi));
}

Clustering topdown(const Corpus& corpus, const ProbTable& probs, const ClusterConfig& config,
                   ClusterRunInfo* info) {
    config.validate();
    const std::size_t n = corpus.num_docs();
    const std::uint32_t k = config.k;
    if (k < 2) throw Error("TopDown clustering needs k >= 2");
    if (k > n) throw Error("k exceeds the number of documents");

    // a subproblem is a leaf once s <= n / k
    auto small_enough = [&](std::size_t s) { return s * k <= n; };

    std::vector<std::vector<DocId>> leaves;
    std::uint64_t node = 0;
    std::function<void(std::vector<DocId>)> split = [&](std::vector<DocId> docs) {
        const std::size_t s = docs.size();
        if (small_enough(s) || s <= 1) {
            leaves.push_back(std::move(docs));
            return;
        }
        const auto q = static_cast<std::uint32_t>(std::min<std::size_t>(topdown_pieces(s, n, k, config.chi), s));
        std::vector<std::vector<DocId>> pieces(q);
        {
            const auto sub = detail::make_subproblem(corpus, docs, probs, config.tc);
            detail::Rng rng(detail::mix_seed(config.seed, node++));
            std::vector<std::uint32_t> members(s);
            std::iota(members.begin(), members.end(), 0u);
            const auto part = detail::multilevel(sub, std::move(members), q, config, rng, node == 1 ? info : nullptr);
            for (std::size_t i = 0; i < part.members.size(); ++i) {
                pieces[part.assign[i]].push_back(sub.docs[part.members[i]]);
            }
        }
        std::erase_if(pieces, [](const auto& p) { return p.empty(); });
        if (pieces.size() < 2) {
            // the objective put everything together; cut into equal runs
            pieces.assign(q, {});
            for (std::size_t i = 0; i < s; ++i) pieces[i * q / s].push_back(docs[i]);
            if (info) ++info->forced_splits;
        }
        docs = {};
        for (auto& piece : pieces) split(std::move(piece));
    };

    std::vector<DocId> all(n);
    std::iota(all.begin(), all.end(), DocId{0});
    split(std::move(all));
    if (info) info->leaves = leaves.size();

    // Adjacent leaves whose union still fits are merged; afterwards any two
    // neighbours together exceed n / k, which caps the count below 2k.
    std::vector<std::vector<DocId>> clusters;
    for (auto& leaf : leaves) {
        if (config.compact_leaves && !clusters.empty() && small_enough(clusters.back().size() + leaf.size())) {
            clusters.back().insert(clusters.back().end(), leaf.begin(), leaf.end());
            if (info) ++info->merged_leaves;
        } else {
            clusters.push_back(std::move(leaf));
        }
    }

    std::vector<ClusterId> assign(n, 0);
    for (ClusterId j = 0; j < clusters.size(); ++j) {
        for (DocId d : clusters[j]) assign[d] = j;
    }
    return Clustering::from_assignment(std::move(assign), static_cast<std::uint32_t>(clusters.size()));
}

}  // namespace seclud

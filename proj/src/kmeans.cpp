#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "cluster_engine.hpp"

namespace seclud {

namespace detail {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    // splitmix64 finaliser
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

Subproblem make_subproblem(const Corpus& corpus, std::span<const DocId> docs, const ProbTable& probs,
                           std::size_t tc) {
    Subproblem sub;
    const std::size_t limit = std::min(tc, probs.size());
    std::vector<std::uint32_t> local(limit, std::numeric_limits<std::uint32_t>::max());
    sub.docs.assign(docs.begin(), docs.end());
    sub.offsets.reserve(docs.size() + 1);
    sub.offsets.push_back(0);
    for (DocId d : docs) {
        for (TermId t : corpus.terms_of(d)) {
            if (t >= limit) break;  // terms are sorted, the rest are rare
            const double p = probs(t);
            if (p <= 0.0) continue;
            if (local[t] == std::numeric_limits<std::uint32_t>::max()) {
                local[t] = static_cast<std::uint32_t>(sub.prob.size());
                sub.prob.push_back(p);
                sub.global_term.push_back(t);
            }
            sub.terms.push_back(local[t]);
        }
        sub.offsets.push_back(static_cast<std::uint32_t>(sub.terms.size()));
    }
    return sub;
}

void rebuild_counts(const Subproblem& sub, Partition& part) {
    const std::size_t m = sub.num_terms();
    part.sizes.assign(part.k, 0);
    part.counts.assign(static_cast<std::size_t>(part.k) * m, 0);
    for (std::size_t i = 0; i < part.members.size(); ++i) {
        const auto j = part.assign[i];
        ++part.sizes[j];
        for (auto t : sub.doc_terms(part.members[i])) ++part.counts[j * m + t];
    }
}

double partition_psi(const Subproblem& sub, const Partition& part) {
    const std::size_t m = sub.num_terms();
    std::vector<std::pair<std::uint32_t, double>> entries;
    long double total = 0.0L;
    for (std::uint32_t j = 0; j < part.k; ++j) {
        entries.clear();
        for (std::size_t t = 0; t < m; ++t) {
            const auto n = part.counts[j * m + t];
            if (n > 0) entries.emplace_back(n, sub.prob[t]);
        }
        std::sort(entries.begin(), entries.end());
        long double after = 0.0L;
        for (std::size_t i = entries.size(); i-- > 0;) {
            total += static_cast<long double>(entries[i].second) * entries[i].first * after;
            after += entries[i].second;
        }
    }
    return static_cast<double>(total);
}

std::vector<double> frozen_scores(const Subproblem& sub, const Partition& part) {
    const std::size_t m = sub.num_terms();
    std::vector<double> scores(static_cast<std::size_t>(part.k) * m);
    std::vector<std::pair<std::uint32_t, double>> entries;
    for (std::uint32_t j = 0; j < part.k; ++j) {
        entries.clear();
        const auto* row = &part.counts[j * m];
        for (std::size_t t = 0; t < m; ++t) {
            if (row[t] > 0) entries.emplace_back(row[t], sub.prob[t]);
        }
        const auto table = ScoreTable::build(std::move(entries));
        entries = {};
        for (std::size_t t = 0; t < m; ++t) scores[j * m + t] = sub.prob[t] * table.suffix_mass(row[t]);
    }
    return scores;
}

namespace {

template <typename F>
void parallel_for(std::size_t n, unsigned threads, F&& body) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n / 1024 + 1)));
    if (threads == 1) {
        body(std::size_t{0}, n);
        return;
    }
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&body, begin, end] { body(begin, end); });
    }
}

// Probability mass per count value of one cluster in fixed point, with a
// Fenwick tree for "mass with count > v". Integer weights keep repeated
// add/remove cycles exact.
class CountMass {
public:
    void add(std::uint32_t v, std::int64_t w) {
        if (v > cap_) grow(v);
        point_[v] += w;
        for (std::size_t i = v; i <= cap_; i += i & (~i + 1)) tree_[i] += w;
        total_ += w;
    }

    std::int64_t above(std::uint32_t v) const {
        if (v >= cap_) return 0;
        std::int64_t prefix = 0;
        for (std::size_t i = v; i > 0; i -= i & (~i + 1)) prefix += tree_[i];
        return total_ - prefix;
    }

private:
    void grow(std::uint32_t v) {
        cap_ = std::max<std::size_t>({v, 2 * cap_, 16});
        point_.resize(cap_ + 1, 0);
        tree_.assign(cap_ + 1, 0);
        for (std::size_t i = 1; i <= cap_; ++i) {
            tree_[i] += point_[i];
            const std::size_t parent = i + (i & (~i + 1));
            if (parent <= cap_) tree_[parent] += tree_[i];
        }
    }

    std::vector<std::int64_t> point_{0};
    std::vector<std::int64_t> tree_{0};
    std::size_t cap_ = 0;
    std::int64_t total_ = 0;
};

constexpr double kMassScale = 1125899906842624.0;  // 2^50

bool converged(double prev, double now, double threshold) {
    if (!(prev > 0.0)) return true;
    return (prev - now) / prev < threshold;
}

}  // namespace

void kmeans_round_step(const Subproblem& sub, Partition& part, const ClusterConfig& config) {
    const std::size_t m = sub.num_terms();
    const std::uint32_t k = part.k;
    const auto scores = frozen_scores(sub, part);
    std::vector<double> own(part.members.size());
    parallel_for(part.members.size(), config.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const auto terms = sub.doc_terms(part.members[i]);
            std::uint32_t best = 0;
            double best_score = std::numeric_limits<double>::infinity();
            for (std::uint32_t j = 0; j < k; ++j) {
                const double* row = &scores[j * m];
                double s = 0.0;
                for (auto t : terms) s += row[t];
                if (s < best_score) {
                    best_score = s;
                    best = j;
                }
            }
            part.assign[i] = best;
            own[i] = best_score;
        }
    });
    rebuild_counts(sub, part);

    // Refill empty clusters with the worst-fitting documents. A document that
    // costs nothing where it is stays put.
    std::vector<std::uint32_t> empty;
    for (std::uint32_t j = 0; j < k; ++j) {
        if (part.sizes[j] == 0) empty.push_back(j);
    }
    if (empty.empty()) return;
    std::vector<std::uint32_t> order(part.members.size());
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return own[a] > own[b]; });
    std::size_t next = 0;
    bool moved = false;
    for (auto e : empty) {
        while (next < order.size() && (own[order[next]] <= 0.0 || part.sizes[part.assign[order[next]]] <= 1)) {
            ++next;
        }
        if (next == order.size()) break;
        const auto i = order[next++];
        --part.sizes[part.assign[i]];
        part.assign[i] = e;
        ++part.sizes[e];
        moved = true;
    }
    if (moved) rebuild_counts(sub, part);
}

std::uint32_t kmeans_rounds(const Subproblem& sub, Partition& part, const ClusterConfig& config) {
    Partition best = part;
    double best_psi = partition_psi(sub, part);
    double prev = best_psi;
    std::uint32_t rounds = 0;
    while (rounds < config.max_rounds) {
        kmeans_round_step(sub, part, config);
        ++rounds;
        const double now = partition_psi(sub, part);
        if (now < best_psi) {
            best_psi = now;
            best = part;
        }
        if (converged(prev, now, config.convergence_threshold)) break;
        prev = now;
    }
    part = std::move(best);
    return rounds;
}

std::uint32_t doc_grained(const Subproblem& sub, Partition& part, const ClusterConfig& config, Rng& rng) {
    const std::size_t m = sub.num_terms();
    const std::uint32_t k = part.k;
    std::vector<std::int64_t> weight(m);
    for (std::size_t t = 0; t < m; ++t) weight[t] = std::llround(sub.prob[t] * kMassScale);
    std::vector<CountMass> mass(k);
    for (std::uint32_t j = 0; j < k; ++j) {
        for (std::size_t t = 0; t < m; ++t) {
            if (const auto n = part.counts[j * m + t]; n > 0) mass[j].add(n, weight[t]);
        }
    }

    std::vector<std::uint32_t> order(part.members.size());
    std::iota(order.begin(), order.end(), 0u);
    double prev = partition_psi(sub, part);
    std::uint32_t rounds = 0;
    while (rounds < config.max_rounds) {
        std::shuffle(order.begin(), order.end(), rng);
        std::size_t moves = 0;
        for (auto pos : order) {
            const auto terms = sub.doc_terms(part.members[pos]);
            const auto current = part.assign[pos];
            std::uint32_t best = 0;
            double best_score = std::numeric_limits<double>::infinity();
            for (std::uint32_t j = 0; j < k; ++j) {
                const auto* row = &part.counts[j * m];
                double s = 0.0;
                for (auto t : terms) s += sub.prob[t] * static_cast<double>(mass[j].above(row[t]));
                if (s < best_score) {
                    best_score = s;
                    best = j;
                }
            }
            if (best == current) continue;
            auto* from = &part.counts[current * m];
            auto* to = &part.counts[best * m];
            for (auto t : terms) {
                const auto v = from[t]--;
                mass[current].add(v, -weight[t]);
                if (v > 1) mass[current].add(v - 1, weight[t]);
                const auto u = to[t]++;
                if (u > 0) mass[best].add(u, -weight[t]);
                mass[best].add(u + 1, weight[t]);
            }
            --part.sizes[current];
            ++part.sizes[best];
            part.assign[pos] = best;
            ++moves;
        }
        ++rounds;
        if (moves == 0) break;
        const double now = partition_psi(sub, part);
        if (converged(prev, now, config.convergence_threshold)) break;
        prev = now;
    }
    return rounds;
}

std::uint32_t refine(const Subproblem& sub, Partition& part, const ClusterConfig& config, Rng& rng) {
    if (part.members.size() < config.doc_grained_threshold) return doc_grained(sub, part, config, rng);
    return kmeans_rounds(sub, part, config);
}

Partition seed_partition(const Subproblem& sub, std::vector<std::uint32_t> members, std::uint32_t k, Rng& rng) {
    const std::size_t n = members.size();
    if (n < k) throw Error("cannot form " + std::to_string(k) + " clusters from " + std::to_string(n) + " documents");
    Partition part;
    part.k = k;
    part.members = std::move(members);
    part.assign.assign(n, 0);

    std::vector<double> doc_mass(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (auto t : sub.doc_terms(part.members[i])) doc_mass[i] += sub.prob[t];
    }
    std::vector<double> nearest_dist(n, std::numeric_limits<double>::infinity());
    std::vector<std::uint32_t> nearest(n, 0);
    std::vector<char> is_seed(n, 0);
    std::vector<std::uint32_t> stamp(sub.num_terms(), 0);

    std::size_t seed = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    for (std::uint32_t s = 0; s < k; ++s) {
        is_seed[seed] = 1;
        nearest[seed] = s;
        nearest_dist[seed] = -1.0;
        for (auto t : sub.doc_terms(part.members[seed])) stamp[t] = s + 1;
        // distance = share of a document's probability mass the seed lacks
        for (std::size_t i = 0; i < n; ++i) {
            if (is_seed[i]) continue;
            double covered = 0.0;
            for (auto t : sub.doc_terms(part.members[i])) {
                if (stamp[t] == s + 1) covered += sub.prob[t];
            }
            const double dist = doc_mass[i] > 0.0 ? 1.0 - covered / doc_mass[i] : 0.0;
            if (dist < nearest_dist[i]) {
                nearest_dist[i] = dist;
                nearest[i] = s;
            }
        }
        if (s + 1 == k) break;
        std::size_t next = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (is_seed[i]) continue;
            if (next == n || nearest_dist[i] > nearest_dist[next] ||
                (nearest_dist[i] == nearest_dist[next] && doc_mass[i] > doc_mass[next])) {
                next = i;
            }
        }
        seed = next;
    }
    part.assign = std::move(nearest);
    rebuild_counts(sub, part);
    return part;
}

namespace {

Partition extend(const Subproblem& sub, const Partition& sample, std::vector<std::uint32_t> members) {
    const std::size_t m = sub.num_terms();
    const auto scores = frozen_scores(sub, sample);
    std::vector<std::int64_t> slot(sub.num_docs(), -1);
    for (std::size_t i = 0; i < sample.members.size(); ++i) slot[sample.members[i]] = sample.assign[i];
    Partition part;
    part.k = sample.k;
    part.members = std::move(members);
    part.assign.resize(part.members.size());
    for (std::size_t i = 0; i < part.members.size(); ++i) {
        const auto d = part.members[i];
        if (slot[d] >= 0) {
            part.assign[i] = static_cast<std::uint32_t>(slot[d]);
            continue;
        }
        const auto terms = sub.doc_terms(d);
        std::uint32_t best = 0;
        double best_score = std::numeric_limits<double>::infinity();
        for (std::uint32_t j = 0; j < part.k; ++j) {
            double s = 0.0;
            for (auto t : terms) s += scores[j * m + t];
            if (s < best_score) {
                best_score = s;
                best = j;
            }
        }
        part.assign[i] = best;
    }
    rebuild_counts(sub, part);
    return part;
}

}  // namespace

Partition multilevel(const Subproblem& sub, std::vector<std::uint32_t> members, std::uint32_t k,
                     const ClusterConfig& config, Rng& rng, ClusterRunInfo* info) {
    const std::size_t n = members.size();
    if (n < k) throw Error("cannot form " + std::to_string(k) + " clusters from " + std::to_string(n) + " documents");
    const std::size_t sample_size = multilevel_sample_size(n, k, config.epsilon);
    Partition part;
    if (n <= std::max<std::size_t>(k, config.effective_base_case()) || sample_size >= n) {
        part = seed_partition(sub, std::move(members), k, rng);
    } else {
        std::vector<std::uint32_t> sample = members;
        std::shuffle(sample.begin(), sample.end(), rng);
        sample.resize(sample_size);
        std::sort(sample.begin(), sample.end());
        const Partition coarse = multilevel(sub, std::move(sample), k, config, rng, nullptr);
        part = extend(sub, coarse, std::move(members));
    }
    const auto rounds = refine(sub, part, config, rng);
    if (info) {
        info->final_rounds = rounds;
        ++info->refinements;
    }
    return part;
}

Partition partition_from_clustering(const Subproblem& sub, const Clustering& clustering) {
    Partition part;
    part.k = clustering.k;
    part.members.resize(sub.num_docs());
    std::iota(part.members.begin(), part.members.end(), 0u);
    part.assign.resize(sub.num_docs());
    for (std::size_t i = 0; i < sub.num_docs(); ++i) part.assign[i] = clustering.assign.at(sub.docs[i]);
    rebuild_counts(sub, part);
    return part;
}

Clustering clustering_from_partition(const Subproblem& sub, const Partition& part, std::size_t num_docs) {
    std::vector<ClusterId> assign(num_docs, 0);
    for (std::size_t i = 0; i < part.members.size(); ++i) assign[sub.docs[part.members[i]]] = part.assign[i];
    return Clustering::from_assignment(std::move(assign), part.k);
}

}  // namespace detail

using detail::Rng;

void ClusterConfig::validate() const {
    if (k < 1) throw Error("k must be at least 1");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error("epsilon must lie in (0, 1)");
    if (chi < 2) throw Error("chi must be at least 2");
    if (tc < 1) throw Error("tc must be at least 1");
    if (!(convergence_threshold >= 0.0)) throw Error("convergence_threshold must be non-negative");
    if (max_rounds < 1) throw Error("max_rounds must be at least 1");
}

std::size_t ClusterConfig::effective_base_case() const {
    return base_case_size != 0 ? base_case_size : doc_grained_threshold / 10;
}

std::size_t multilevel_sample_size(std::size_t n, std::uint32_t k, double epsilon) {
    const auto scaled = static_cast<std::size_t>(std::ceil(epsilon * static_cast<double>(n) - 1e-9));
    return std::max<std::size_t>(k, scaled);
}

namespace {

detail::Subproblem whole_corpus(const Corpus& corpus, const ProbTable& probs, std::size_t tc) {
    std::vector<DocId> all(corpus.num_docs());
    std::iota(all.begin(), all.end(), DocId{0});
    return detail::make_subproblem(corpus, all, probs, tc);
}

}  // namespace

std::pair<Clustering, double> kmeans_round(const Corpus& corpus, const Clustering& clustering,
                                           const ProbTable& probs, const ClusterConfig& config) {
    config.validate();
    clustering.validate(corpus.num_docs());
    const auto sub = whole_corpus(corpus, probs, config.tc);
    auto part = detail::partition_from_clustering(sub, clustering);
    detail::kmeans_round_step(sub, part, config);
    const double value = detail::partition_psi(sub, part);
    return {detail::clustering_from_partition(sub, part, corpus.num_docs()), value};
}

Clustering kmeans_doc_grained(const Corpus& corpus, const Clustering& clustering, const ProbTable& probs,
                              const ClusterConfig& config, ClusterRunInfo* info) {
    config.validate();
    clustering.validate(corpus.num_docs());
    const auto sub = whole_corpus(corpus, probs, config.tc);
    auto part = detail::partition_from_clustering(sub, clustering);
    Rng rng(config.seed);
    const auto rounds = detail::doc_grained(sub, part, config, rng);
    if (info) {
        info->final_rounds = rounds;
        ++info->refinements;
    }
    return detail::clustering_from_partition(sub, part, corpus.num_docs());
}

Clustering multilevel_init(const Corpus& corpus, std::uint32_t k, const ProbTable& probs,
                           const ClusterConfig& config, ClusterRunInfo* info) {
    config.validate();
    if (corpus.num_docs() < k) {
        throw Error("cannot form " + std::to_string(k) + " clusters from " + std::to_string(corpus.num_docs()) +
                    " documents");
    }
    const auto sub = whole_corpus(corpus, probs, config.tc);
    std::vector<std::uint32_t> members(sub.num_docs());
    std::iota(members.begin(), members.end(), 0u);
    Rng rng(config.seed);
    auto part = detail::multilevel(sub, std::move(members), k, config, rng, info);
    return detail::clustering_from_partition(sub, part, corpus.num_docs());
}

}  // namespace seclud

#include <algorithm>
#include <map>

#include "seclud/cluster.hpp"

namespace seclud {

std::uint32_t Clustering::num_nonempty() const {
    return static_cast<std::uint32_t>(std::count_if(sizes.begin(), sizes.end(), [](auto s) { return s > 0; }));
}

Clustering Clustering::from_assignment(std::vector<ClusterId> assign, std::uint32_t k) {
    Clustering c;
    c.k = k;
    c.sizes.assign(k, 0);
    for (ClusterId j : assign) {
        if (j >= k) throw Error("cluster id " + std::to_string(j) + " out of range");
        ++c.sizes[j];
    }
    c.assign = std::move(assign);
    return c;
}

Clustering Clustering::single(std::size_t num_docs) {
    return from_assignment(std::vector<ClusterId>(num_docs, 0), 1);
}

void Clustering::validate(std::size_t num_docs) const {
    SECLUD_CHECK(assign.size() == num_docs, "clustering does not cover every document");
    SECLUD_CHECK(sizes.size() == k, "cluster size table has wrong length");
    std::vector<std::uint32_t> s(k, 0);
    for (ClusterId j : assign) {
        SECLUD_CHECK(j < k, "cluster id out of range");
        ++s[j];
    }
    SECLUD_CHECK(s == sizes, "cluster sizes inconsistent with assignment");
}

ClusterCounts ClusterCounts::from_corpus(const Corpus& corpus, const Clustering& clustering, std::size_t tc) {
    if (clustering.num_docs() != corpus.num_docs()) throw Error("clustering and corpus sizes differ");
    const std::size_t m = corpus.frequent_count(tc);
    std::vector<std::map<TermId, std::uint32_t>> acc(clustering.k);
    for (const auto& doc : corpus.docs()) {
        auto& cluster = acc[clustering.assign[doc.doc]];
        for (TermId t : doc.terms) {
            if (t >= m) break;
            ++cluster[t];
        }
    }
    ClusterCounts out;
    out.clusters_.resize(clustering.k);
    for (ClusterId j = 0; j < clustering.k; ++j) {
        out.clusters_[j].reserve(acc[j].size());
        for (auto [t, n] : acc[j]) out.clusters_[j].push_back({t, n});
    }
    return out;
}

ClusterCounts ClusterCounts::from_table(std::vector<std::vector<TermCount>> table) {
    ClusterCounts out;
    for (auto& cluster : table) {
        std::erase_if(cluster, [](const TermCount& tc) { return tc.count == 0; });
        std::sort(cluster.begin(), cluster.end(), [](auto a, auto b) { return a.term < b.term; });
        for (std::size_t i = 1; i < cluster.size(); ++i) {
            if (cluster[i].term == cluster[i - 1].term) throw Error("duplicate term in count table");
        }
    }
    out.clusters_ = std::move(table);
    return out;
}

std::uint32_t ClusterCounts::count(ClusterId j, TermId t) const {
    const auto& c = clusters_.at(j);
    auto it = std::lower_bound(c.begin(), c.end(), t, [](const TermCount& a, TermId b) { return a.term < b; });
    return (it != c.end() && it->term == t) ? it->count : 0;
}

ClusterCounts ClusterCounts::merged() const {
    std::map<TermId, std::uint32_t> acc;
    for (const auto& cluster : clusters_) {
        for (auto [t, n] : cluster) acc[t] += n;
    }
    std::vector<TermCount> all;
    all.reserve(acc.size());
    for (auto [t, n] : acc) all.push_back({t, n});
    ClusterCounts out;
    out.clusters_.push_back(std::move(all));
    return out;
}

void ClusterCounts::add_document(ClusterId j, std::span<const TermId> terms, std::size_t tc) {
    if (j >= clusters_.size()) clusters_.resize(j + 1);
    auto& c = clusters_[j];
    for (TermId t : terms) {
        if (t >= tc) continue;
        auto it = std::lower_bound(c.begin(), c.end(), t, [](const TermCount& a, TermId b) { return a.term < b; });
        if (it != c.end() && it->term == t) {
            ++it->count;
        } else {
            c.insert(it, TermCount{t, 1});
        }
    }
}

ScoreTable ScoreTable::build(std::vector<std::pair<std::uint32_t, double>> entries) {
    ScoreTable table;
    std::erase_if(entries, [](const auto& e) { return e.first == 0; });
    std::sort(entries.begin(), entries.end());
    std::vector<double> mass;
    for (const auto& [v, p] : entries) {
        if (table.values_.empty() || table.values_.back() != v) {
            table.values_.push_back(v);
            mass.push_back(0.0);
        }
        mass.back() += p;
    }
    table.above_.assign(table.values_.size() + 1, 0.0);
    long double acc = 0.0L;
    for (std::size_t i = mass.size(); i-- > 0;) {
        acc += mass[i];
        table.above_[i] = static_cast<double>(acc);
    }
    return table;
}

double ScoreTable::suffix_mass(std::uint32_t v) const {
    const auto it = std::upper_bound(values_.begin(), values_.end(), v);
    if (above_.empty()) return 0.0;
    return above_[static_cast<std::size_t>(it - values_.begin())];
}

ScoreTables build_score_tables(const ClusterCounts& counts, const ProbTable& probs) {
    ScoreTables tables;
    tables.clusters.reserve(counts.num_clusters());
    for (ClusterId j = 0; j < counts.num_clusters(); ++j) {
        std::vector<std::pair<std::uint32_t, double>> entries;
        for (auto [t, n] : counts.cluster(j)) {
            const double p = probs(t);
            if (p > 0.0) entries.emplace_back(n, p);
        }
        tables.clusters.push_back(ScoreTable::build(std::move(entries)));
    }
    return tables;
}

double score_term(const ScoreTables& tables, const ClusterCounts& counts, ClusterId j, TermId t,
                  const ProbTable& probs) {
    const double p = probs(t);
    if (p == 0.0) return 0.0;
    return p * tables.clusters.at(j).suffix_mass(counts.count(j, t));
}

double score_doc(const ScoreTables& tables, const ClusterCounts& counts, ClusterId j,
                 std::span<const TermId> doc, const ProbTable& probs) {
    double s = 0.0;
    for (TermId t : doc) s += score_term(tables, counts, j, t, probs);
    return s;
}

namespace {

// Sum over pairs of p_t p_u min(n_t, n_u): after sorting by count, every
// term pairs with the mass sorted after it at its own count.
long double psi_of_entries(std::vector<std::pair<std::uint32_t, double>>& entries) {
    std::sort(entries.begin(), entries.end());
    long double after = 0.0L;
    long double sum = 0.0L;
    for (std::size_t i = entries.size(); i-- > 0;) {
        const auto [n, p] = entries[i];
        sum += static_cast<long double>(p) * n * after;
        after += p;
    }
    return sum;
}

}  // namespace

double psi(const ClusterCounts& counts, const ProbTable& probs) {
    long double total = 0.0L;
    std::vector<std::pair<std::uint32_t, double>> entries;
    for (ClusterId j = 0; j < counts.num_clusters(); ++j) {
        entries.clear();
        for (auto [t, n] : counts.cluster(j)) {
            const double p = probs(t);
            if (p > 0.0 && n > 0) entries.emplace_back(n, p);
        }
        total += psi_of_entries(entries);
    }
    return static_cast<double>(total);
}

double psi_bruteforce(const ClusterCounts& counts, const ProbTable& probs, CostModel model) {
    std::vector<TermId> terms;
    for (TermId t = 0; t < probs.size(); ++t) {
        if (probs(t) > 0.0) terms.push_back(t);
    }
    if (terms.size() > kBruteforceTermLimit) {
        throw Error("pair enumeration limited to " + std::to_string(kBruteforceTermLimit) + " frequent terms");
    }
    // dense per-cluster count rows over the participating terms
    std::vector<TermId> slot(probs.size(), kNoTerm);
    for (TermId i = 0; i < terms.size(); ++i) slot[terms[i]] = i;
    const std::size_t m = terms.size();
    long double total = 0.0L;
    std::vector<std::uint32_t> row(m);
    std::vector<std::uint32_t> present;
    for (ClusterId j = 0; j < counts.num_clusters(); ++j) {
        std::fill(row.begin(), row.end(), 0u);
        present.clear();
        for (auto [t, n] : counts.cluster(j)) {
            if (t < slot.size() && slot[t] != kNoTerm) {
                row[slot[t]] = n;
                present.push_back(slot[t]);
            }
        }
        // pairs with a zero count cost nothing under either model
        for (std::size_t a = 0; a < present.size(); ++a) {
            const auto ta = present[a];
            const long double pa = probs(terms[ta]);
            for (std::size_t b = a + 1; b < present.size(); ++b) {
                const auto tb = present[b];
                total += pa * probs(terms[tb]) *
                         intersection_cost(model, static_cast<double>(row[ta]), static_cast<double>(row[tb]));
            }
        }
    }
    return static_cast<double>(total);
}

double psi_model(const ClusterCounts& counts, const ProbTable& probs, CostModel model) {
    return model == CostModel::lookup_min ? psi(counts, probs) : psi_bruteforce(counts, probs, model);
}

}  // namespace seclud

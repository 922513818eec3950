#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "seclud/intersect.hpp"
#include "seclud/query.hpp"

using namespace seclud;

namespace {

struct Instance {
    Corpus corpus;
    InvertedIndex index;
    Clustering clustering;
};

Instance random_instance(std::mt19937_64& rng) {
    CorpusBuilder b;
    const std::size_t docs = 1 + rng() % 400;
    const std::size_t vocab = 2 + rng() % 60;
    std::vector<std::string> tokens;
    for (std::size_t d = 0; d < docs; ++d) {
        tokens.clear();
        const std::size_t len = rng() % 12;
        for (std::size_t i = 0; i < len; ++i) tokens.push_back("w" + std::to_string(rng() % vocab));
        b.add_document(tokens);
    }
    Instance in{std::move(b).finish(), {}, {}};
    in.index = build_index(in.corpus);
    const std::uint32_t k = 1 + static_cast<std::uint32_t>(rng() % 12);
    std::vector<ClusterId> assign(docs);
    for (auto& a : assign) a = static_cast<ClusterId>(rng() % k);
    in.clustering = Clustering::from_assignment(std::move(assign), k);
    return in;
}

// The four-cluster table: n_j(a), n_j(b) per cluster.
Instance example_instance() {
    const std::uint32_t rows[4][2] = {{2000, 10000}, {10000, 1000}, {40000, 1000}, {1000, 25000}};
    InvertedIndex index;
    index.lists.resize(2);
    std::vector<ClusterId> assign;
    DocId next = 0;
    for (ClusterId j = 0; j < 4; ++j) {
        const auto span = std::max(rows[j][0], rows[j][1]);
        for (DocId i = 0; i < span; ++i) {
            if (i < rows[j][0]) index.lists[0].push_back(next);
            if (i < rows[j][1]) index.lists[1].push_back(next);
            assign.push_back(j);
            ++next;
        }
    }
    index.universe = next;
    std::vector<std::string> dict{"a", "b"};
    if (index.lists[0].size() < index.lists[1].size()) std::swap(dict[0], dict[1]);
    Instance in{Corpus::from_postings(dict, index.lists, next), std::move(index),
                Clustering::from_assignment(std::move(assign), 4)};
    return in;
}

}  // namespace

TEST_CASE("variant names") {
    for (auto v : kAllVariants) CHECK(parse_variant(variant_name(v)) == v);
    CHECK_THROWS_AS(parse_variant("fast"), Error);
}

TEST_CASE("reordering layout") {
    // sizes [3, 2]; the second document of cluster 1 moves to 1 + 3
    const auto c = Clustering::from_assignment({0, 1, 0, 1, 0}, 2);
    const auto perm = build_reordering(c);
    CHECK(perm == std::vector<DocId>{0, 3, 1, 4, 2});
    CHECK(invert_permutation(perm) == std::vector<DocId>{0, 2, 4, 1, 3});
    const auto single = build_reordering(Clustering::single(4));
    CHECK(single == std::vector<DocId>{0, 1, 2, 3});
}

TEST_CASE("reordering is a bijection") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 50; ++i) {
        const auto in = random_instance(rng);
        auto perm = build_reordering(in.clustering);
        std::sort(perm.begin(), perm.end());
        for (DocId d = 0; d < perm.size(); ++d) REQUIRE(perm[d] == d);
    }
}

TEST_CASE("step accounting on the four-cluster example") {
    const auto in = example_instance();
    const auto single = QueryEngine::single(in.index);
    const auto per = QueryEngine::per_cluster(in.index, in.clustering);
    std::uint64_t s1 = 0, sk = 0;
    const auto r1 = single.query(0, 1, &s1);
    const auto rk = per.query(0, 1, &sk);
    CHECK(s1 == 37000);
    CHECK(sk == 5000);
    CHECK(r1 == rk);
    CHECK(r1.size() == 5000);
}

TEST_CASE("all variants agree with the merge oracle") {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 60; ++i) {
        const auto in = random_instance(rng);
        if (in.corpus.num_terms() == 0) continue;
        std::vector<QueryEngine> engines;
        for (auto v : kAllVariants) engines.push_back(QueryEngine::build(v, in.index, in.clustering, 1 + rng() % 20, 1 + rng() % 10));
        for (int q = 0; q < 200; ++q) {
            const TermId t = static_cast<TermId>(rng() % in.corpus.num_terms());
            const TermId u = static_cast<TermId>(rng() % in.corpus.num_terms());
            const auto expected = intersect_merge(in.index.lists[t], in.index.lists[u]);
            for (const auto& e : engines) REQUIRE(e.query(t, u) == expected);
        }
    }
}

TEST_CASE("per-cluster steps equal the analytic cost") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 40; ++i) {
        const auto in = random_instance(rng);
        if (in.corpus.num_terms() == 0) continue;
        const auto per = QueryEngine::per_cluster(in.index, in.clustering);
        const auto single = QueryEngine::single(in.index);
        const auto n = oracle::cluster_counts(
            [&] {
                oracle::Docs docs;
                for (DocId d = 0; d < in.corpus.num_docs(); ++d) {
                    docs.emplace_back(in.corpus.terms_of(d).begin(), in.corpus.terms_of(d).end());
                }
                return docs;
            }(),
            in.clustering.assign, in.clustering.k);
        for (int q = 0; q < 50; ++q) {
            const TermId t = static_cast<TermId>(rng() % in.corpus.num_terms());
            const TermId u = static_cast<TermId>(rng() % in.corpus.num_terms());
            std::uint64_t expected = 0;
            for (const auto& cluster : n) {
                const auto a = cluster.find(t);
                const auto b = cluster.find(u);
                expected += std::min(a == cluster.end() ? 0 : a->second, b == cluster.end() ? 0 : b->second);
            }
            std::uint64_t steps = 0;
            per.query(t, u, &steps);
            REQUIRE(steps == expected);
            steps = 0;
            single.query(t, u, &steps);
            REQUIRE(steps == std::min(in.corpus.df(t), in.corpus.df(u)));
        }
    }
}

TEST_CASE("a single cluster behaves like the single index") {
    std::mt19937_64 rng(6);
    const auto in = random_instance(rng);
    const auto one = Clustering::single(in.corpus.num_docs());
    const auto single = QueryEngine::single(in.index);
    const auto per = QueryEngine::per_cluster(in.index, one);
    const auto reordered = QueryEngine::reordered(in.index, one);
    for (TermId t = 0; t < in.corpus.num_terms(); ++t) {
        for (TermId u = 0; u < in.corpus.num_terms(); ++u) {
            std::uint64_t a = 0, b = 0, c = 0;
            const auto r = single.query(t, u, &a);
            REQUIRE(per.query(t, u, &b) == r);
            REQUIRE(reordered.query(t, u, &c) == r);
            REQUIRE(a == b);
            REQUIRE(a == c);
        }
    }
}

TEST_CASE("cluster index skips clusters without both terms") {
    // a lives only in cluster 0, b only in cluster 1
    InvertedIndex index{4, {{0, 1}, {2, 3}}};
    const auto c = Clustering::from_assignment({0, 0, 1, 1}, 2);
    const auto engine = QueryEngine::cluster_index(index, c);
    std::uint64_t steps = 0;
    CHECK(engine.query(0, 1, &steps).empty());
    CHECK(steps == 1);  // one probe of the cluster list, no document work
}

TEST_CASE("idempotent and unknown queries") {
    InvertedIndex index{5, {{0, 2, 4}, {1, 2}}};
    const auto c = Clustering::from_assignment({0, 1, 0, 1, 2}, 3);
    for (auto v : kAllVariants) {
        const auto e = QueryEngine::build(v, index, c);
        CHECK(e.query(0, 0) == std::vector<DocId>{0, 2, 4});
        CHECK(e.query(0, 1) == std::vector<DocId>{2});
        CHECK(e.query(0, 7).empty());
        CHECK(e.query(kNoTerm, 0).empty());
    }
}

TEST_CASE("multi-term queries") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 30; ++i) {
        const auto in = random_instance(rng);
        if (in.corpus.num_terms() == 0) continue;
        std::vector<QueryEngine> engines;
        for (auto v : kAllVariants) engines.push_back(QueryEngine::build(v, in.index, in.clustering));
        for (int q = 0; q < 50; ++q) {
            std::vector<TermId> terms;
            const std::size_t len = 1 + rng() % 4;
            for (std::size_t j = 0; j < len; ++j) terms.push_back(static_cast<TermId>(rng() % in.corpus.num_terms()));
            auto expected = in.index.lists[terms[0]];
            for (auto t : terms) expected = intersect_merge(expected, in.index.lists[t]);
            for (const auto& e : engines) REQUIRE(e.query(terms) == expected);
        }
        CHECK(engines[0].query(std::vector<TermId>{}).empty());
        CHECK(engines[0].query(std::vector<TermId>{0, kNoTerm}).empty());
    }
}

TEST_CASE("engines reject mismatched clusterings") {
    InvertedIndex index{3, {{0, 1}}};
    CHECK_THROWS_AS(QueryEngine::per_cluster(index, Clustering::single(4)), Error);
    CHECK_THROWS_AS(QueryEngine::reordered(index, Clustering::single(2)), Error);
}

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "seclud/index.hpp"
#include "seclud/index_io.hpp"

using namespace seclud;

namespace {

Corpus corpus_of(const std::string& text) {
    std::istringstream in(text);
    return ingest(in, InputFormat::plain);
}

}  // namespace

TEST_CASE("build_index lists documents per term") {
    const auto c = corpus_of("a b\nb\n");
    const auto idx = build_index(c);
    CHECK(idx.universe == 2);
    CHECK(idx.lists[c.lookup("a")] == PostingList{0});
    CHECK(idx.lists[c.lookup("b")] == PostingList{0, 1});
    CHECK(idx.num_postings() == c.total_size());

    const auto empty = build_index(corpus_of(""));
    CHECK(empty.lists.empty());
    CHECK(empty.num_postings() == 0);
}

TEST_CASE("index membership matches documents") {
    std::mt19937_64 rng(5);
    std::string text;
    for (int d = 0; d < 200; ++d) {
        for (int i = 0; i < 6; ++i) text += "t" + std::to_string(rng() % 40) + " ";
        text += "\n";
    }
    const auto c = corpus_of(text);
    const auto idx = build_index(c);
    for (DocId d = 0; d < c.num_docs(); ++d) {
        for (TermId t = 0; t < c.num_terms(); ++t) {
            const auto terms = c.terms_of(d);
            const bool in_doc = std::binary_search(terms.begin(), terms.end(), t);
            const bool in_list = std::binary_search(idx.lists[t].begin(), idx.lists[t].end(), d);
            CHECK(in_doc == in_list);
        }
    }
}

TEST_CASE("permute_index relabels and sorts") {
    InvertedIndex idx{3, {{0, 2}, {1}}};
    const std::vector<DocId> perm{2, 0, 1};
    const auto p = permute_index(idx, perm);
    CHECK(p.lists[0] == PostingList{1, 2});
    CHECK(p.lists[1] == PostingList{0});
    CHECK_THROWS_AS(permute_index(idx, std::vector<DocId>{0, 1}), Error);
}

TEST_CASE("bucket width follows the universe") {
    const auto wide = bucketize(std::vector<DocId>{1, 5, 9}, 16, 12);
    CHECK(wide.num_buckets() == 1);
    CHECK(wide.lookup_bucket(5).size() == 3);

    std::vector<DocId> all(100);
    for (DocId i = 0; i < 100; ++i) all[i] = i;
    const auto even = bucketize(all, 10, 100);
    CHECK(even.bucket_width() == 10);
    CHECK(even.num_buckets() == 10);
    for (DocId x = 0; x < 100; x += 10) CHECK(even.lookup_bucket(x).size() == 10);

    const auto none = bucketize(std::vector<DocId>{}, 16, 100);
    CHECK(none.empty());
    CHECK(none.num_buckets() == 0);
    CHECK_FALSE(none.contains(3));
    CHECK(none.lookup_bucket(3).empty());
}

TEST_CASE("bucketize rejects bad input") {
    CHECK_THROWS_AS(bucketize(std::vector<DocId>{1}, 0, 10), Error);
    CHECK_THROWS_AS(bucketize(std::vector<DocId>{10}, 4, 10), Error);
}

TEST_CASE("bucket lookup finds exactly the members") {
    std::mt19937_64 rng(11);
    for (int round = 0; round < 20; ++round) {
        const std::uint32_t universe = 1 + rng() % 5000;
        const auto docs = oracle::sorted_sample(rng, universe, 1 + rng() % 1000);
        const std::size_t B = 1 + rng() % 20;
        const auto list = bucketize(docs, B, universe);
        for (DocId x = 0; x < universe + 5; ++x) {
            const auto bucket = list.lookup_bucket(x);
            const bool scan = std::find(bucket.begin(), bucket.end(), x) != bucket.end();
            const bool member = std::binary_search(docs.begin(), docs.end(), x);
            REQUIRE(scan == member);
            REQUIRE(list.contains(x) == member);
        }
    }
}

TEST_CASE("index container roundtrip") {
    const auto c = corpus_of("alpha beta\nbeta gamma\n\ngamma beta delta\n");
    const auto idx = build_index(c);
    for (Codec codec : kAllCodecs) {
        std::stringstream buf;
        save_index(buf, c, idx, codec);
        const auto loaded = load_index(buf);
        CHECK(loaded.codec == codec);
        CHECK(loaded.index.lists == idx.lists);
        CHECK(loaded.index.universe == idx.universe);
        CHECK(loaded.corpus.dictionary() == c.dictionary());
        CHECK(loaded.corpus.num_docs() == c.num_docs());
        CHECK(loaded.corpus.dfs() == c.dfs());
    }
}

TEST_CASE("index container keeps document names") {
    std::istringstream in("{\"id\":\"d1\",\"text\":\"x y\"}\n{\"id\":\"d2\",\"text\":\"y\"}\n");
    const auto c = ingest(in, InputFormat::jsonl);
    std::stringstream buf;
    save_index(buf, c, build_index(c), Codec::golomb);
    CHECK(load_index(buf).corpus.doc_names() == c.doc_names());
}

TEST_CASE("index container rejects damage") {
    const auto c = corpus_of("a b\nb c\nc a b\n");
    std::stringstream buf;
    save_index(buf, c, build_index(c), Codec::gamma);
    const auto bytes = buf.str();

    std::istringstream bad_magic("XXXXX" + bytes.substr(5));
    CHECK_THROWS_AS(load_index(bad_magic), Error);

    std::istringstream truncated(bytes.substr(0, bytes.size() - 3));
    CHECK_THROWS_AS(load_index(truncated), Error);

    auto flipped = bytes;
    flipped[flipped.size() - 1] ^= 0x40;
    std::istringstream corrupt(flipped);
    CHECK_THROWS_AS(load_index(corrupt), Error);
}

TEST_CASE("index files and directories") {
    const auto dir = std::filesystem::temp_directory_path() / "seclud_index_test";
    std::filesystem::remove_all(dir);
    const auto c = corpus_of("a b\nb\n");
    save_index_file(dir, c, build_index(c), Codec::delta);
    CHECK(std::filesystem::exists(dir / "index.scld"));
    CHECK(index_file(dir) == dir / "index.scld");
    CHECK(load_index_file(dir).index.lists == build_index(c).lists);
    CHECK_THROWS_AS(load_index_file(dir / "missing"), Error);
    std::filesystem::remove_all(dir);
}
